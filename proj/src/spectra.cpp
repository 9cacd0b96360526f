#include "aqclab/spectra.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <functional>
#include <random>

#include <Eigen/Dense>

#include "aqclab/dense.hpp"
#include "aqclab/errors.hpp"

namespace aqclab {

namespace {

using Applier = std::function<void(const cplx*, cplx*)>;

void sector_matvec(const SqhOperator& op, const SectorMap& map, const cplx* in,
                   cplx* out) {
    const std::int64_t dim = static_cast<std::int64_t>(map.dim());
    const double shift = op.shift();
    const auto& terms = op.terms();
#pragma omp parallel for schedule(static) if (dim >= 2048)
    for (std::int64_t b = 0; b < dim; ++b) {
        const std::uint64_t y = map.indices[b];
        cplx acc = shift * in[b];
        for (const auto& t : terms) {
            const std::uint64_t z = y ^ t.flip_mask();
            if (std::popcount(z) != map.weight) continue;  // outside the sector
            const std::int64_t a = map.rank(z);
            const int k = (t.phase_base() + 2 * std::popcount(z & t.phase_mask())) & 3;
            const cplx v = in[a];
            switch (k) {
                case 0: acc += t.weight() * v; break;
                case 1: acc += cplx(-t.weight() * v.imag(), t.weight() * v.real()); break;
                case 2: acc -= t.weight() * v; break;
                default: acc += cplx(t.weight() * v.imag(), -t.weight() * v.real()); break;
            }
        }
        out[b] = acc;
    }
}

Eigen::MatrixXcd dense_sector(const SqhOperator& op, const SectorMap& map) {
    const std::int64_t dim = static_cast<std::int64_t>(map.dim());
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(dim, dim);
    for (std::int64_t a = 0; a < dim; ++a) {
        m(a, a) += op.shift();
        const std::uint64_t z = map.indices[a];
        for (const auto& t : op.terms()) {
            const TermImage img = apply_term(t, z, op.n_qubits());
            const std::int64_t b = map.rank(img.index);
            if (b < 0) continue;
            m(b, a) += t.weight() * img.phase();
        }
    }
    return m;
}

double dot_real(const std::vector<cplx>& a, const std::vector<cplx>& b) {
    const std::int64_t n = static_cast<std::int64_t>(a.size());
    double re = 0.0;
#pragma omp parallel for schedule(static) reduction(+ : re) if (n >= 65536)
    for (std::int64_t i = 0; i < n; ++i)
        re += a[i].real() * b[i].real() + a[i].imag() * b[i].imag();
    return re;
}

cplx dot(const std::vector<cplx>& a, const std::vector<cplx>& b) {
    const std::int64_t n = static_cast<std::int64_t>(a.size());
    double re = 0.0, im = 0.0;
#pragma omp parallel for schedule(static) reduction(+ : re, im) if (n >= 65536)
    for (std::int64_t i = 0; i < n; ++i) {
        const cplx v = std::conj(a[i]) * b[i];
        re += v.real();
        im += v.imag();
    }
    return {re, im};
}

void axpy(std::vector<cplx>& y, cplx alpha, const std::vector<cplx>& x) {
    const std::int64_t n = static_cast<std::int64_t>(y.size());
#pragma omp parallel for schedule(static) if (n >= 65536)
    for (std::int64_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

double norm2_of(const std::vector<cplx>& a) { return dot_real(a, a); }

std::vector<cplx> random_unit_vector(std::size_t dim, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    const auto uniform = [&rng] {
        return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
    };
    std::vector<cplx> v(dim);
    for (auto& x : v) {
        // Box-Muller, kept library-independent for reproducibility.
        const double r = std::sqrt(-2.0 * std::log(uniform()));
        const double phi = 2.0 * M_PI * uniform();
        x = cplx(r * std::cos(phi), r * std::sin(phi));
    }
    const double norm = std::sqrt(norm2_of(v));
    for (auto& x : v) x /= norm;
    return v;
}

struct LockedPair {
    double value;
    std::vector<cplx> vector;
    double residual;
};

// Restarted Lanczos with full reorthogonalization. Converged Ritz pairs are
// locked and deflated, and each restart explores the orthogonal complement
// with a fresh random vector. Degenerate eigenvalues surface one copy per
// restart; a final verification round confirms that nothing below the k-th
// locked value is left.
EigenResult lanczos_lowest(const Applier& apply, std::size_t dim, int k,
                           const EigOptions& opts) {
    std::vector<LockedPair> locked;
    long iterations_left = opts.max_iterations;
    int total_iterations = 0;
    double best_residual = std::numeric_limits<double>::infinity();
    bool verifying = false;
    double kth_before = std::numeric_limits<double>::infinity();

    const auto orthogonalize = [&](std::vector<cplx>& w,
                                   const std::vector<std::vector<cplx>>& basis) {
        for (int pass = 0; pass < 2; ++pass) {
            for (const auto& lp : locked) axpy(w, -dot(lp.vector, w), lp.vector);
            for (const auto& u : basis) axpy(w, -dot(u, w), u);
        }
    };

    for (int round = 0; round < 2 * k + 8; ++round) {
        if (locked.size() == dim) break;

        std::vector<cplx> start = random_unit_vector(
            dim, opts.start_seed + 0x9e3779b97f4a7c15ULL * round);
        orthogonalize(start, {});
        const double start_norm = std::sqrt(norm2_of(start));
        if (start_norm < 1e-8) break;  // complement numerically empty
        for (auto& x : start) x /= start_norm;

        std::vector<std::vector<cplx>> basis{std::move(start)};
        std::vector<double> alphas, betas;
        std::vector<cplx> w(dim);
        bool deflated = false;

        while (iterations_left > 0 &&
               basis.size() + locked.size() <= dim) {
            --iterations_left;
            ++total_iterations;
            const int j = static_cast<int>(alphas.size()) + 1;
            const auto& v = basis.back();
            apply(v.data(), w.data());
            const double alpha = dot_real(v, w);
            alphas.push_back(alpha);
            axpy(w, -alpha, v);
            if (j >= 2) axpy(w, -betas[j - 2], basis[j - 2]);
            orthogonalize(w, basis);
            const double beta = std::sqrt(norm2_of(w));

            Eigen::VectorXd diag = Eigen::Map<Eigen::VectorXd>(alphas.data(), j);
            Eigen::VectorXd sub = j > 1
                                      ? Eigen::VectorXd(Eigen::Map<Eigen::VectorXd>(
                                            betas.data(), j - 1))
                                      : Eigen::VectorXd();
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> tri;
            tri.computeFromTridiagonal(diag, sub);
            const double lowest_bound = std::abs(beta * tri.eigenvectors()(j - 1, 0));
            best_residual = std::min(best_residual, lowest_bound);
            deflated = beta < 1e-12;

            if (lowest_bound < 0.1 * opts.tol || deflated || iterations_left == 0) {
                // Lock every Ritz pair (ascending) that verifies explicitly.
                std::vector<cplx> hx(dim);
                for (int i = 0; i < j; ++i) {
                    std::vector<cplx> x(dim, cplx{});
                    for (int col = 0; col < j; ++col)
                        axpy(x, tri.eigenvectors()(col, i), basis[col]);
                    const double norm = std::sqrt(norm2_of(x));
                    if (norm < 0.5) break;  // degenerate basis leftovers
                    for (auto& c : x) c /= norm;
                    apply(x.data(), hx.data());
                    axpy(hx, -tri.eigenvalues()(i), x);
                    const double residual = std::sqrt(norm2_of(hx));
                    best_residual = std::min(best_residual, residual);
                    if (residual < opts.tol)
                        locked.push_back({tri.eigenvalues()(i), std::move(x), residual});
                    else
                        break;
                }
                break;
            }
            for (auto& x : w) x /= beta;
            betas.push_back(beta);
            basis.push_back(w);
        }

        std::sort(locked.begin(), locked.end(),
                  [](const LockedPair& a, const LockedPair& b) { return a.value < b.value; });

        if (static_cast<int>(locked.size()) >= k) {
            if (!verifying) {
                verifying = true;  // confirmation round in the complement
                kth_before = locked[k - 1].value;
                continue;
            }
            if (locked[k - 1].value < kth_before - 1e-12) {
                kth_before = locked[k - 1].value;  // found lower: confirm again
                continue;
            }
            EigenResult result;
            result.iterations = total_iterations;
            for (int i = 0; i < k; ++i) {
                result.eigenvalues.push_back(locked[i].value);
                result.residuals.push_back(locked[i].residual);
                if (opts.compute_vectors) result.vectors.push_back(locked[i].vector);
            }
            return result;
        }
        if (iterations_left <= 0)
            throw solver_error("lowest_eigs: iteration cap reached with " +
                                   std::to_string(locked.size()) + " of " +
                                   std::to_string(k) + " pairs converged (best residual " +
                                   format_double(best_residual) + ")",
                               best_residual);
    }

    if (static_cast<int>(locked.size()) >= k) {
        EigenResult result;
        result.iterations = total_iterations;
        std::sort(locked.begin(), locked.end(),
                  [](const LockedPair& a, const LockedPair& b) { return a.value < b.value; });
        for (int i = 0; i < k; ++i) {
            result.eigenvalues.push_back(locked[i].value);
            result.residuals.push_back(locked[i].residual);
            if (opts.compute_vectors) result.vectors.push_back(locked[i].vector);
        }
        return result;
    }
    throw solver_error("lowest_eigs: restarts exhausted before convergence",
                       best_residual);
}

EigenResult dense_lowest(const Eigen::MatrixXcd& m, int k, const EigOptions& opts) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(m);
    if (es.info() != Eigen::Success)
        throw solver_error("lowest_eigs: dense diagonalization failed", -1.0);
    EigenResult result;
    result.dense = true;
    for (int i = 0; i < k; ++i) {
        result.eigenvalues.push_back(es.eigenvalues()(i));
        const Eigen::VectorXcd v = es.eigenvectors().col(i);
        result.residuals.push_back((m * v - es.eigenvalues()(i) * v).norm());
        if (opts.compute_vectors)
            result.vectors.emplace_back(v.data(), v.data() + v.size());
    }
    return result;
}

}  // namespace

EigenResult lowest_eigs(const SqhOperator& op, int k, std::optional<int> sector,
                        const EigOptions& opts) {
    if (k < 1)
        throw validation_error("lowest_eigs: k must be positive");

    std::optional<SectorMap> map;
    std::size_t dim;
    if (sector) {
        if (*sector < 0 || *sector > op.n_qubits())
            throw validation_error("lowest_eigs: sector weight out of range");
        map = sector_map(op.n_qubits(), *sector);
        dim = map->dim();
#ifndef NDEBUG
        if (op.n_qubits() <= 6) {
            const Eigen::MatrixXcd h = to_dense(op);
            const std::int64_t full = std::int64_t{1} << op.n_qubits();
            for (std::int64_t a = 0; a < full; ++a)
                for (std::int64_t b = 0; b < full; ++b)
                    if (std::popcount(static_cast<std::uint64_t>(a)) !=
                            std::popcount(static_cast<std::uint64_t>(b)) &&
                        std::abs(h(a, b)) > 1e-9)
                        throw validation_error(
                            "lowest_eigs: operator does not preserve Hamming sectors");
        }
#endif
    } else {
        dim = std::uint64_t{1} << op.n_qubits();
    }
    if (static_cast<std::size_t>(k) > dim)
        throw validation_error("lowest_eigs: k exceeds space dimension " +
                               std::to_string(dim));

    if (dim <= opts.dense_threshold) {
        const Eigen::MatrixXcd m = map ? dense_sector(op, *map) : to_dense(op);
        return dense_lowest(m, k, opts);
    }

    const Applier apply = map
        ? Applier([&op, &mp = *map](const cplx* in, cplx* out) {
              sector_matvec(op, mp, in, out);
          })
        : Applier([&op, dim](const cplx* in, cplx* out) {
              matvec_into(op, {in, dim}, {out, dim});
          });
    return lanczos_lowest(apply, dim, k, opts);
}

GapCurve gap_curve(const Path& path, std::span<const double> s_grid,
                   std::optional<int> sector, const EigOptions& opts) {
    if (s_grid.size() < 2)
        throw validation_error("gap_curve: need at least two grid points");
    for (std::size_t i = 0; i < s_grid.size(); ++i) {
        if (s_grid[i] < 0.0 || s_grid[i] > 1.0)
            throw validation_error("gap_curve: grid point outside [0, 1]");
        if (i > 0 && s_grid[i] <= s_grid[i - 1])
            throw validation_error("gap_curve: grid must be strictly increasing");
    }

    GapCurve curve;
    curve.s_grid.assign(s_grid.begin(), s_grid.end());
    const std::int64_t points = static_cast<std::int64_t>(s_grid.size());
    curve.e1.resize(points);
    curve.e2.resize(points);
    curve.gap.resize(points);

    std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic)
    for (std::int64_t i = 0; i < points; ++i) {
        try {
            const SqhOperator h = hamiltonian_at(path, s_grid[i]);
            const EigenResult eig = lowest_eigs(h, 2, sector, opts);
            curve.e1[i] = eig.eigenvalues[0];
            curve.e2[i] = eig.eigenvalues[1];
            curve.gap[i] = eig.eigenvalues[1] - eig.eigenvalues[0];
        } catch (const std::exception& e) {
#pragma omp critical
            if (!failure) {
                try {
                    throw solver_error("gap_curve: failure at s = " +
                                           format_double(s_grid[i]) + ": " + e.what(),
                                       -1.0);
                } catch (...) {
                    failure = std::current_exception();
                }
            }
        }
    }
    if (failure) std::rethrow_exception(failure);

    for (std::int64_t i = 0; i < points; ++i)
        if (curve.gap[i] < -100.0 * opts.tol)
            throw solver_error("gap_curve: negative gap " + format_double(curve.gap[i]) +
                                   " at s = " + format_double(curve.s_grid[i]),
                               curve.gap[i]);
    const auto [s_star, g_min] = min_gap(curve);
    curve.min_gap_s = s_star;
    curve.min_gap = g_min;
    return curve;
}

std::pair<double, double> min_gap(const GapCurve& curve) {
    if (curve.gap.empty())
        throw validation_error("min_gap: empty curve");
    std::size_t best = 0;
    for (std::size_t i = 1; i < curve.gap.size(); ++i)
        if (curve.gap[i] < curve.gap[best]) best = i;  // ties keep the smaller s
    return {curve.s_grid[best], curve.gap[best]};
}

std::vector<double> uniform_grid(int points) {
    if (points < 2)
        throw validation_error("uniform_grid: need at least two points");
    std::vector<double> grid(points);
    for (int i = 0; i < points; ++i)
        grid[i] = static_cast<double>(i) / (points - 1);
    return grid;
}

StateVector embed_sector(const SectorMap& map, std::span<const cplx> coeffs,
                         int qubit_cap) {
    if (coeffs.size() != map.dim())
        throw validation_error("embed_sector: coefficient count mismatch");
    StateVector psi = StateVector::zero(map.n_qubits, qubit_cap);
    for (std::size_t i = 0; i < coeffs.size(); ++i)
        psi.amplitudes[map.indices[i]] = coeffs[i];
    return psi;
}

}  // namespace aqclab
