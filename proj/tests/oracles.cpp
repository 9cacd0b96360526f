#include "oracles.hpp"

#include <bit>
#include <cmath>
#include <queue>

namespace oracle {

Eigen::Matrix2cd pauli_matrix(int which) {
    Eigen::Matrix2cd m;
    const cplx i{0.0, 1.0};
    switch (which) {
        case 0: m << 1, 0, 0, 1; break;
        case 1: m << 0, 1, 1, 0; break;
        case 2: m << 0, -i, i, 0; break;
        default: m << 1, 0, 0, -1; break;
    }
    return m;
}

namespace {

Eigen::MatrixXcd kron(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
    Eigen::MatrixXcd out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

int axis_code(aqclab::PauliAxis axis) {
    switch (axis) {
        case aqclab::PauliAxis::X: return 1;
        case aqclab::PauliAxis::Y: return 2;
        case aqclab::PauliAxis::Z: return 3;
    }
    return 0;
}

}  // namespace

Eigen::MatrixXcd dense_oracle(const aqclab::SqhOperator& op) {
    const int n = op.n_qubits();
    const Eigen::Index dim = Eigen::Index{1} << n;
    Eigen::MatrixXcd total = op.shift() * Eigen::MatrixXcd::Identity(dim, dim);
    for (const auto& term : op.terms()) {
        std::vector<int> codes(n, 0);
        for (const auto& f : term.factors()) codes[f.qubit - 1] = axis_code(f.axis);
        // qubit n is the outermost Kronecker factor
        Eigen::MatrixXcd product = pauli_matrix(codes[n - 1]);
        for (int q = n - 1; q >= 1; --q) product = kron(product, pauli_matrix(codes[q - 1]));
        total += term.weight() * product;
    }
    return total;
}

Eigen::VectorXcd to_eigen(const aqclab::StateVector& psi) {
    return Eigen::Map<const Eigen::VectorXcd>(psi.amplitudes.data(),
                                              static_cast<Eigen::Index>(psi.dim()));
}

aqclab::StateVector from_eigen(const Eigen::VectorXcd& v, int n_qubits) {
    aqclab::StateVector psi = aqclab::StateVector::zero(n_qubits);
    for (Eigen::Index i = 0; i < v.size(); ++i) psi.amplitudes[i] = v(i);
    return psi;
}

namespace {

void apply_exponential(const Eigen::MatrixXcd& h, double dt, Eigen::VectorXcd& psi) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h);
    const Eigen::VectorXcd phases =
        (es.eigenvalues().array().cast<cplx>() * cplx(0.0, -dt)).exp();
    psi = es.eigenvectors() * (phases.asDiagonal() * (es.eigenvectors().adjoint() * psi));
}

// Fourth-order commutator-free Magnus slice: two exponentials built from the
// Hamiltonian at the two Gauss-Legendre nodes of the slice.
Eigen::VectorXcd propagate_fixed(const aqclab::Path& path, double total_time,
                                 const Eigen::VectorXcd& psi0, int slices) {
    std::vector<Eigen::MatrixXcd> dense_parts;
    dense_parts.reserve(path.parts.size());
    for (const auto& part : path.parts) dense_parts.push_back(dense_oracle(part.op));

    const auto h_at = [&](double s, Eigen::MatrixXcd& h) {
        h.setZero();
        for (std::size_t p = 0; p < dense_parts.size(); ++p)
            h += path.parts[p].envelope(s) * dense_parts[p];
    };

    // slice within smooth segments only: envelope kinks sit on boundaries
    std::vector<double> bounds{0.0};
    for (const double b : path.breakpoints)
        if (b > 0.0 && b < 1.0) bounds.push_back(b * total_time);
    bounds.push_back(total_time);
    std::sort(bounds.begin(), bounds.end());

    const double c1 = 0.5 - std::sqrt(3.0) / 6.0;
    const double c2 = 0.5 + std::sqrt(3.0) / 6.0;
    const double a1 = 0.25 + std::sqrt(3.0) / 6.0;
    const double a2 = 0.25 - std::sqrt(3.0) / 6.0;

    Eigen::VectorXcd psi = psi0;
    Eigen::MatrixXcd h1(psi0.size(), psi0.size());
    Eigen::MatrixXcd h2(psi0.size(), psi0.size());
    for (std::size_t seg = 0; seg + 1 < bounds.size(); ++seg) {
        const double len = bounds[seg + 1] - bounds[seg];
        if (len <= 0.0) continue;
        const int seg_slices =
            std::max(1, static_cast<int>(std::llround(slices * len / total_time)));
        const double dt = len / seg_slices;
        for (int k = 0; k < seg_slices; ++k) {
            const double t0 = bounds[seg] + k * dt;
            h_at((t0 + c1 * dt) / total_time, h1);
            h_at((t0 + c2 * dt) / total_time, h2);
            apply_exponential(a1 * h1 + a2 * h2, dt, psi);
            apply_exponential(a2 * h1 + a1 * h2, dt, psi);
        }
    }
    return psi;
}

}  // namespace

Eigen::VectorXcd propagate_oracle(const aqclab::Path& path, double total_time,
                                  const Eigen::VectorXcd& psi0, int initial_slices,
                                  double tol) {
    if (total_time == 0.0) return psi0;
    int slices = initial_slices;
    Eigen::VectorXcd coarse = propagate_fixed(path, total_time, psi0, slices);
    for (int round = 0; round < 6; ++round) {
        slices *= 2;
        const Eigen::VectorXcd fine = propagate_fixed(path, total_time, psi0, slices);
        if ((fine - coarse).norm() < tol) return fine;
        coarse = fine;
    }
    throw std::runtime_error("propagate_oracle: no convergence to tolerance");
}

aqclab::SqhOperator random_operator(std::mt19937_64& rng, int n_qubits, int max_terms) {
    const auto uniform = [&rng](double lo, double hi) {
        return lo + (hi - lo) * ((rng() >> 11) * 0x1.0p-53);
    };
    const int n_terms = 1 + static_cast<int>(rng() % max_terms);
    std::vector<aqclab::SqhTerm> terms;
    for (int t = 0; t < n_terms; ++t) {
        const int order = 1 + static_cast<int>(rng() % n_qubits);
        std::vector<int> qubits(n_qubits);
        for (int q = 0; q < n_qubits; ++q) qubits[q] = q + 1;
        for (int q = 0; q < order; ++q)
            std::swap(qubits[q], qubits[q + rng() % (n_qubits - q)]);
        std::vector<aqclab::PauliFactor> factors;
        for (int q = 0; q < order; ++q)
            factors.push_back({qubits[q], static_cast<aqclab::PauliAxis>(rng() % 3)});
        terms.emplace_back(uniform(-2.0, 2.0), std::move(factors));
    }
    return aqclab::SqhOperator(n_qubits, uniform(-1.0, 1.0), std::move(terms));
}

aqclab::StateVector random_state(std::mt19937_64& rng, int n_qubits) {
    const auto uniform = [&rng] { return (rng() >> 11) * 0x1.0p-53 - 0.5; };
    aqclab::StateVector psi = aqclab::StateVector::zero(n_qubits);
    for (auto& a : psi.amplitudes) a = cplx(uniform(), uniform());
    const double norm = std::sqrt(psi.norm_sq());
    for (auto& a : psi.amplitudes) a /= norm;
    return psi;
}

long penalty_oracle(const aqclab::Ec3Instance& inst, std::uint64_t z) {
    long total = 0;
    for (const auto& c : inst.clauses) {
        const long ones = std::popcount(z & c.mask());
        total += (1 - ones) * (1 - ones);
    }
    return total;
}

bool connected_and_covering(const aqclab::Ec3Instance& inst) {
    if (inst.clauses.empty()) return false;
    std::vector<std::vector<int>> adjacency(inst.n + 1);
    for (const auto& c : inst.clauses) {
        const auto& b = c.bits;
        for (const auto [i, j] : {std::pair{b[0], b[1]}, std::pair{b[0], b[2]},
                                  std::pair{b[1], b[2]}}) {
            adjacency[i].push_back(j);
            adjacency[j].push_back(i);
        }
    }
    std::vector<char> seen(inst.n + 1, 0);
    std::queue<int> frontier;
    frontier.push(inst.clauses.front().bits[0]);
    seen[inst.clauses.front().bits[0]] = 1;
    while (!frontier.empty()) {
        const int v = frontier.front();
        frontier.pop();
        for (const int u : adjacency[v])
            if (!seen[u]) {
                seen[u] = 1;
                frontier.push(u);
            }
    }
    for (int b = 1; b <= inst.n; ++b)
        if (!seen[b]) return false;  // uncovered or unreachable
    return true;
}

double power_law_exponent(const std::vector<double>& x, const std::vector<double>& y) {
    const std::size_t n = x.size();
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double lx = std::log(x[i]);
        const double ly = std::log(y[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace oracle
