#include "aqclab/state.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>

#include "aqclab/errors.hpp"
#include "aqclab/pauli.hpp"

namespace aqclab {

StateVector StateVector::zero(int n_qubits, int qubit_cap) {
    if (n_qubits < 1)
        throw validation_error("StateVector: qubit count must be positive");
    if (n_qubits > qubit_cap)
        throw resource_error("StateVector: " + std::to_string(n_qubits) +
                             " qubits exceeds cap of " + std::to_string(qubit_cap));
    StateVector psi;
    psi.n_qubits = n_qubits;
    psi.amplitudes.assign(std::uint64_t{1} << n_qubits, cplx{});
    return psi;
}

double StateVector::norm_sq() const {
    const std::int64_t dim = static_cast<std::int64_t>(amplitudes.size());
    const cplx* a = amplitudes.data();
    double total = 0.0;
#pragma omp parallel for schedule(static) reduction(+ : total) if (dim >= 65536)
    for (std::int64_t i = 0; i < dim; ++i)
        total += a[i].real() * a[i].real() + a[i].imag() * a[i].imag();
    return total;
}

void StateVector::require_normalized(double tolerance) const {
    const double drift = std::abs(1.0 - norm_sq());
    if (!(drift <= tolerance))
        throw validation_error("state norm violated: |1 - norm^2| = " +
                               format_double(drift));
}

std::int64_t SectorMap::rank(std::uint64_t z) const {
    const auto it = std::lower_bound(indices.begin(), indices.end(), z);
    if (it == indices.end() || *it != z) return -1;
    return it - indices.begin();
}

std::uint64_t binomial(int n, int k) {
    if (k < 0 || k > n) return 0;
    k = std::min(k, n - k);
    std::uint64_t result = 1;
    for (int i = 1; i <= k; ++i) {
        result = result * static_cast<std::uint64_t>(n - k + i) / i;
    }
    return result;
}

StateVector uniform_superposition(int n_qubits, int qubit_cap) {
    StateVector psi = StateVector::zero(n_qubits, qubit_cap);
    const double amp = std::pow(2.0, -0.5 * n_qubits);
    std::fill(psi.amplitudes.begin(), psi.amplitudes.end(), cplx{amp, 0.0});
    return psi;
}

SectorMap sector_map(int n_qubits, int weight) {
    if (n_qubits < 1 || n_qubits > 63)
        throw validation_error("sector_map: invalid qubit count");
    if (weight < 0 || weight > n_qubits)
        throw validation_error("sector_map: Hamming weight out of range");
    SectorMap map;
    map.n_qubits = n_qubits;
    map.weight = weight;
    map.indices.reserve(binomial(n_qubits, weight));
    if (weight == 0) {
        map.indices.push_back(0);
        return map;
    }
    const std::uint64_t limit = std::uint64_t{1} << n_qubits;
    std::uint64_t v = (std::uint64_t{1} << weight) - 1;
    while (v < limit) {
        map.indices.push_back(v);
        // Gosper's hack: next integer with the same popcount.
        const std::uint64_t t = v | (v - 1);
        v = (t + 1) | (((~t & (t + 1)) - 1) >> (std::countr_zero(v) + 1));
    }
    return map;
}

StateVector dicke_state(int n_qubits, int weight, int qubit_cap) {
    const SectorMap sector = sector_map(n_qubits, weight);
    StateVector psi = StateVector::zero(n_qubits, qubit_cap);
    const double amp = 1.0 / std::sqrt(static_cast<double>(sector.dim()));
    for (const std::uint64_t z : sector.indices) psi.amplitudes[z] = cplx{amp, 0.0};
    return psi;
}

double energy_expectation(const StateVector& psi, const SqhOperator& op,
                          double norm_tolerance, double imag_tolerance) {
    if (op.n_qubits() != psi.n_qubits)
        throw validation_error("energy_expectation: operator/state qubit count mismatch");
    psi.require_normalized(norm_tolerance);
    const StateVector h_psi = matvec(op, psi);
    const std::int64_t dim = static_cast<std::int64_t>(psi.amplitudes.size());
    const cplx* a = psi.amplitudes.data();
    const cplx* b = h_psi.amplitudes.data();
    double re = 0.0, im = 0.0;
#pragma omp parallel for schedule(static) reduction(+ : re, im) if (dim >= 65536)
    for (std::int64_t i = 0; i < dim; ++i) {
        const cplx v = std::conj(a[i]) * b[i];
        re += v.real();
        im += v.imag();
    }
    if (!(std::abs(im) < imag_tolerance))
        throw validation_error("energy_expectation: imaginary residual " +
                               format_double(im) + " exceeds tolerance");
    return re;
}

double solution_overlap(const StateVector& psi, std::uint64_t w) {
    if (w >= psi.dim())
        throw validation_error("solution_overlap: basis index out of range");
    return std::norm(psi.amplitudes[w]);
}

double sector_leakage(const StateVector& psi, int weight) {
    if (weight < 0 || weight > psi.n_qubits)
        throw validation_error("sector_leakage: Hamming weight out of range");
    const std::uint64_t dim = psi.dim();
    double outside = 0.0;
    for (std::uint64_t z = 0; z < dim; ++z)
        if (std::popcount(z) != weight) outside += std::norm(psi.amplitudes[z]);
    return outside;
}

std::vector<double> sector_probabilities(const StateVector& psi) {
    std::vector<double> probs(psi.n_qubits + 1, 0.0);
    const std::uint64_t dim = psi.dim();
    for (std::uint64_t z = 0; z < dim; ++z)
        probs[std::popcount(z)] += std::norm(psi.amplitudes[z]);
    return probs;
}

SqhOperator total_flip_operator(int n_qubits) {
    std::vector<SqhTerm> terms;
    terms.reserve(n_qubits);
    for (int q = 1; q <= n_qubits; ++q)
        terms.emplace_back(-0.5, std::vector<PauliFactor>{{q, PauliAxis::Z}});
    return SqhOperator(n_qubits, 0.5 * n_qubits, std::move(terms));
}

namespace {
constexpr char kStateMagic[8] = {'S', 'Q', 'H', 'S', 'T', 'A', 'T', 'E'};
}

void save_state(const StateVector& psi, const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw validation_error("save_state: cannot open " + path);
    out.write(kStateMagic, sizeof(kStateMagic));
    const std::uint32_t n = static_cast<std::uint32_t>(psi.n_qubits);
    const std::uint32_t reserved = 0;
    out.write(reinterpret_cast<const char*>(&n), sizeof(n));
    out.write(reinterpret_cast<const char*>(&reserved), sizeof(reserved));
    out.write(reinterpret_cast<const char*>(psi.amplitudes.data()),
              static_cast<std::streamsize>(psi.amplitudes.size() * sizeof(cplx)));
    if (!out) throw validation_error("save_state: write failed for " + path);
}

StateVector load_state(const std::string& path, int qubit_cap) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw validation_error("load_state: cannot open " + path);
    char magic[8];
    std::uint32_t n = 0, reserved = 0;
    in.read(magic, sizeof(magic));
    in.read(reinterpret_cast<char*>(&n), sizeof(n));
    in.read(reinterpret_cast<char*>(&reserved), sizeof(reserved));
    if (!in || std::memcmp(magic, kStateMagic, sizeof(magic)) != 0)
        throw validation_error("load_state: bad header in " + path);
    StateVector psi = StateVector::zero(static_cast<int>(n), qubit_cap);
    in.read(reinterpret_cast<char*>(psi.amplitudes.data()),
            static_cast<std::streamsize>(psi.amplitudes.size() * sizeof(cplx)));
    if (!in) throw validation_error("load_state: truncated file " + path);
    return psi;
}

}  // namespace aqclab
