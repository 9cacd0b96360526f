#include "aqclab/dense.hpp"

#include <cmath>

#include "aqclab/errors.hpp"

namespace aqclab {

Eigen::MatrixXcd to_dense(const SqhOperator& op) {
    const Eigen::Index dim = Eigen::Index{1} << op.n_qubits();
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(dim, dim);
    for (Eigen::Index z = 0; z < dim; ++z) {
        m(z, z) += op.shift();
        for (const auto& t : op.terms()) {
            const TermImage img = apply_term(t, static_cast<std::uint64_t>(z),
                                             op.n_qubits());
            m(static_cast<Eigen::Index>(img.index), z) += t.weight() * img.phase();
        }
    }
    return m;
}

SqhOperator decompose_dense(const Eigen::MatrixXcd& h, double hermiticity_tolerance,
                            double drop_tolerance) {
    const Eigen::Index dim = h.rows();
    if (dim < 2 || h.cols() != dim || (dim & (dim - 1)) != 0)
        throw validation_error("decompose_dense: dimension must be a power of two");
    int n = 0;
    while ((Eigen::Index{1} << n) < dim) ++n;
    if (n > 6)
        throw resource_error("decompose_dense: capped at 6 qubits (4^n products)");
    if ((h - h.adjoint()).cwiseAbs().maxCoeff() > hermiticity_tolerance)
        throw validation_error("decompose_dense: matrix is not Hermitian within tolerance");

    double shift = 0.0;
    std::vector<SqhTerm> terms;
    const std::uint64_t gpm_count = std::uint64_t{1} << (2 * n);
    for (std::uint64_t g = 0; g < gpm_count; ++g) {
        std::vector<PauliFactor> factors;
        for (int q = 1; q <= n; ++q) {
            const int digit = static_cast<int>(g >> (2 * (q - 1)) & 3);
            if (digit == 0) continue;
            factors.push_back({q, static_cast<PauliAxis>(digit - 1)});
        }

        cplx trace{};
        if (factors.empty()) {
            trace = h.trace();
        } else {
            const SqhTerm probe(1.0, factors);
            for (Eigen::Index z = 0; z < dim; ++z) {
                const TermImage img = apply_term(probe, static_cast<std::uint64_t>(z), n);
                trace += img.phase() * h(z, static_cast<Eigen::Index>(img.index));
            }
        }
        const cplx m = trace / static_cast<double>(dim);
        if (std::abs(m.imag()) > 1e-9)
            throw validation_error("decompose_dense: complex Pauli coefficient (non-Hermitian input)");
        if (factors.empty()) {
            shift = m.real();
        } else if (std::abs(m.real()) >= drop_tolerance) {
            terms.emplace_back(m.real(), std::move(factors));
        }
    }
    return SqhOperator(n, std::abs(shift) >= drop_tolerance ? shift : 0.0,
                       std::move(terms));
}

}  // namespace aqclab
