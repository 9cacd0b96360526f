#include <doctest.h>

#include <cmath>
#include <random>

#include "aqclab/dense.hpp"
#include "aqclab/errors.hpp"
#include "aqclab/pauli.hpp"
#include "aqclab/state.hpp"
#include "oracles.hpp"

using namespace aqclab;

namespace {

SqhTerm term(double w, std::initializer_list<PauliFactor> factors) {
    return SqhTerm(w, std::vector<PauliFactor>(factors));
}

double max_abs_diff(const StateVector& a, const Eigen::VectorXcd& b) {
    double worst = 0.0;
    for (Eigen::Index i = 0; i < b.size(); ++i)
        worst = std::max(worst, std::abs(a.amplitudes[i] - b(i)));
    return worst;
}

}  // namespace

TEST_CASE("apply_term: single-qubit actions and phases") {
    const SqhTerm x = term(1.0, {{1, PauliAxis::X}});
    const auto ix = apply_term(x, 0, 1);
    CHECK(ix.index == 1);
    CHECK(ix.phase() == cplx{1.0, 0.0});

    const SqhTerm y = term(1.0, {{1, PauliAxis::Y}});
    const auto iy0 = apply_term(y, 0, 1);
    CHECK(iy0.index == 1);
    CHECK(iy0.phase() == cplx{0.0, 1.0});  // sigma^y|0> = +i|1>
    const auto iy1 = apply_term(y, 1, 1);
    CHECK(iy1.index == 0);
    CHECK(iy1.phase() == cplx{0.0, -1.0});  // sigma^y|1> = -i|0>

    // z1 = 1, z2 = 0: one set bit contributes -1 under z1 z2
    const SqhTerm zz = term(1.0, {{1, PauliAxis::Z}, {2, PauliAxis::Z}});
    const auto izz = apply_term(zz, 1, 2);
    CHECK(izz.index == 1);
    CHECK(izz.phase() == cplx{-1.0, 0.0});
}

TEST_CASE("apply_term: contract violations") {
    const SqhTerm x = term(1.0, {{3, PauliAxis::X}});
    CHECK_THROWS_AS(apply_term(x, 0, 2), validation_error);  // qubit 3 beyond n=2
    const SqhTerm x1 = term(1.0, {{1, PauliAxis::X}});
    CHECK_THROWS_AS(apply_term(x1, 4, 2), validation_error);  // z = 4 out of range
}

TEST_CASE("apply_term: involution up to phase (property)") {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 200; ++trial) {
        const int n = 2 + static_cast<int>(rng() % 5);
        const SqhOperator op = oracle::random_operator(rng, n, 6);
        const std::uint64_t z = rng() & ((std::uint64_t{1} << n) - 1);
        for (const auto& t : op.terms()) {
            const auto first = apply_term(t, z, n);
            const auto second = apply_term(t, first.index, n);
            CHECK(second.index == z);
            CHECK(((first.phase_exponent + second.phase_exponent) & 3) == 0);
        }
    }
}

TEST_CASE("SqhTerm validation") {
    CHECK_THROWS_AS(SqhTerm(1.0, {}), validation_error);
    CHECK_THROWS_AS(term(1.0, {{2, PauliAxis::X}, {2, PauliAxis::Z}}), validation_error);
    CHECK_THROWS_AS(term(1.0, {{0, PauliAxis::X}}), validation_error);
    CHECK_THROWS_AS(SqhTerm(std::nan(""), {{1, PauliAxis::X}}), validation_error);
    // order-independent canonical form
    const SqhTerm a = term(1.0, {{3, PauliAxis::Y}, {1, PauliAxis::X}});
    CHECK(a.factors().front().qubit == 1);
    CHECK(a.factors().back().qubit == 3);
}

TEST_CASE("SqhOperator merges duplicate factor lists") {
    const SqhOperator op(2, 0.5,
                         {term(0.75, {{1, PauliAxis::X}}), term(0.25, {{1, PauliAxis::X}}),
                          term(1.0, {{2, PauliAxis::Z}})});
    REQUIRE(op.terms().size() == 2);
    CHECK(op.terms()[0].weight() == 1.0);  // merged
    CHECK(op.spectral_bound() == doctest::Approx(2.5));
}

TEST_CASE("matvec: shift-only operators") {
    std::mt19937_64 rng(11);
    const StateVector psi = oracle::random_state(rng, 3);

    const SqhOperator shifted(3, 2.5, {});
    const StateVector phi = matvec(shifted, psi);
    for (std::size_t i = 0; i < psi.amplitudes.size(); ++i)
        CHECK(phi.amplitudes[i] == 2.5 * psi.amplitudes[i]);

    const StateVector zero = matvec(SqhOperator::zero(3), psi);
    for (const auto& a : zero.amplitudes) CHECK(a == cplx{});
}

TEST_CASE("matvec agrees with the dense Kronecker oracle") {
    std::mt19937_64 rng(23);
    for (int trial = 0; trial < 50; ++trial) {
        const int n = 2 + static_cast<int>(rng() % 3);  // 2..4
        const SqhOperator op = oracle::random_operator(rng, n, 10);
        const StateVector psi = oracle::random_state(rng, n);
        const Eigen::VectorXcd expected = oracle::dense_oracle(op) * oracle::to_eigen(psi);
        CHECK(max_abs_diff(matvec(op, psi), expected) < 1e-12);
        CHECK(max_abs_diff(matvec_serial(op, psi), expected) < 1e-12);
    }
}

TEST_CASE("parallel gather and serial scatter kernels agree") {
    std::mt19937_64 rng(31);
    for (int trial = 0; trial < 20; ++trial) {
        const int n = 2 + static_cast<int>(rng() % 7);  // up to 8 qubits
        const SqhOperator op = oracle::random_operator(rng, n, 12);
        const StateVector psi = oracle::random_state(rng, n);
        const StateVector a = matvec(op, psi);
        const StateVector b = matvec_serial(op, psi);
        double worst = 0.0;
        for (std::size_t i = 0; i < a.amplitudes.size(); ++i)
            worst = std::max(worst, std::abs(a.amplitudes[i] - b.amplitudes[i]));
        CHECK(worst < 1e-13);
    }
}

TEST_CASE("matvec is linear") {
    std::mt19937_64 rng(41);
    const int n = 4;
    const SqhOperator op = oracle::random_operator(rng, n, 8);
    const StateVector psi = oracle::random_state(rng, n);
    const StateVector phi = oracle::random_state(rng, n);
    const double a = 0.37, b = -1.21;

    StateVector combo = StateVector::zero(n);
    for (std::size_t i = 0; i < combo.amplitudes.size(); ++i)
        combo.amplitudes[i] = a * psi.amplitudes[i] + b * phi.amplitudes[i];

    const StateVector left = matvec(op, combo);
    const StateVector hp = matvec(op, psi);
    const StateVector hq = matvec(op, phi);
    for (std::size_t i = 0; i < left.amplitudes.size(); ++i)
        CHECK(std::abs(left.amplitudes[i] - (a * hp.amplitudes[i] + b * hq.amplitudes[i])) <
              1e-12);
}

TEST_CASE("matvec rejects dimension mismatch") {
    std::mt19937_64 rng(3);
    const SqhOperator op = oracle::random_operator(rng, 3, 4);
    const StateVector psi = oracle::random_state(rng, 4);
    CHECK_THROWS_AS(matvec(op, psi), validation_error);
}

TEST_CASE("linear_combine") {
    std::mt19937_64 rng(53);
    const SqhOperator a = oracle::random_operator(rng, 3, 6);
    const SqhOperator b = oracle::random_operator(rng, 3, 6);

    SUBCASE("zero coefficient drops out") {
        CHECK(linear_combine({{1.0, &a}, {0.0, &b}}) == a);
    }
    SUBCASE("halves recombine exactly") {
        CHECK(linear_combine({{0.5, &a}, {0.5, &a}}) == a);
    }
    SUBCASE("matches the dense oracle at s = 0.3") {
        const double s = 0.3;
        const SqhOperator mixed = linear_combine({{1.0 - s, &a}, {s, &b}});
        const Eigen::MatrixXcd expected =
            (1.0 - s) * oracle::dense_oracle(a) + s * oracle::dense_oracle(b);
        CHECK((oracle::dense_oracle(mixed) - expected).cwiseAbs().maxCoeff() < 1e-12);
    }
    SUBCASE("mismatched qubit counts are rejected") {
        const SqhOperator c = oracle::random_operator(rng, 4, 3);
        CHECK_THROWS_AS(linear_combine({{1.0, &a}, {1.0, &c}}), validation_error);
    }
}

TEST_CASE("energy expectation is real for random operators (Hermiticity)") {
    std::mt19937_64 rng(61);
    for (int trial = 0; trial < 25; ++trial) {
        const int n = 2 + static_cast<int>(rng() % 4);
        const SqhOperator op = oracle::random_operator(rng, n, 8);
        const StateVector psi = oracle::random_state(rng, n);
        const StateVector hpsi = matvec(op, psi);
        cplx inner{};
        for (std::size_t i = 0; i < psi.amplitudes.size(); ++i)
            inner += std::conj(psi.amplitudes[i]) * hpsi.amplitudes[i];
        CHECK(std::abs(inner.imag()) < 1e-10);
    }
}

TEST_CASE("transverse Ising operator stores exactly 2n terms") {
    for (const int n : {4, 8, 16}) {
        const Path path = ising_path(n, 1.0);
        const SqhOperator h = hamiltonian_at(path, 0.5);
        CHECK(static_cast<int>(h.terms().size()) == 2 * n);
    }
}

TEST_CASE("decompose_dense") {
    SUBCASE("sigma^z decomposes to a single term") {
        const SqhOperator op = decompose_dense(oracle::pauli_matrix(3));
        CHECK(op.shift() == 0.0);
        REQUIRE(op.terms().size() == 1);
        CHECK(op.terms()[0].weight() == doctest::Approx(1.0));
        CHECK(op.terms()[0].factors() ==
              std::vector<PauliFactor>{{1, PauliAxis::Z}});
    }
    SUBCASE("the two-qubit identity is pure shift") {
        const SqhOperator op = decompose_dense(Eigen::MatrixXcd::Identity(4, 4));
        CHECK(op.shift() == doctest::Approx(1.0));
        CHECK(op.terms().empty());
    }
    SUBCASE("round trip recovers the original term set") {
        std::mt19937_64 rng(47);
        for (int trial = 0; trial < 10; ++trial) {
            const SqhOperator op = oracle::random_operator(rng, 2, 5);
            const SqhOperator back = decompose_dense(oracle::dense_oracle(op));
            REQUIRE(back.terms().size() == op.terms().size());
            CHECK(back.shift() == doctest::Approx(op.shift()).epsilon(1e-12));
            for (std::size_t i = 0; i < op.terms().size(); ++i) {
                CHECK(back.terms()[i].factors() == op.terms()[i].factors());
                CHECK(back.terms()[i].weight() ==
                      doctest::Approx(op.terms()[i].weight()).epsilon(1e-12));
            }
        }
    }
    SUBCASE("library dense rendering agrees with the Kronecker oracle") {
        std::mt19937_64 rng(53);
        for (int trial = 0; trial < 10; ++trial) {
            const SqhOperator op = oracle::random_operator(rng, 4, 8);
            CHECK((to_dense(op) - oracle::dense_oracle(op)).cwiseAbs().maxCoeff() <
                  1e-12);
        }
    }
    SUBCASE("invalid inputs") {
        Eigen::MatrixXcd skew(2, 2);
        skew << 0.0, cplx{0.0, 1.0}, cplx{0.0, 1.0}, 0.0;  // not Hermitian
        CHECK_THROWS_AS(decompose_dense(skew), validation_error);
        CHECK_THROWS_AS(decompose_dense(Eigen::MatrixXcd::Identity(3, 3)),
                        validation_error);  // not a power of two
        CHECK_THROWS_AS(decompose_dense(Eigen::MatrixXcd::Identity(256, 256)),
                        resource_error);  // beyond the 6-qubit cap
    }
}

TEST_CASE("operator dump emits canonically and round-trips bit-exactly") {
    std::mt19937_64 rng(71);
    for (int trial = 0; trial < 20; ++trial) {
        const int n = 2 + static_cast<int>(rng() % 4);
        const SqhOperator op = oracle::random_operator(rng, n, 8);
        const std::string dump = emit_operator(op);
        const SqhOperator back = parse_operator(dump, n);
        CHECK(back == op);
        CHECK(emit_operator(back) == dump);
    }
}

TEST_CASE("operator dump format details") {
    const SqhOperator op(3, -0.75,
                         {term(0.5, {{2, PauliAxis::Y}}),
                          term(-1.25, {{1, PauliAxis::X}, {3, PauliAxis::Z}})});
    CHECK(emit_operator(op) == "shift -0.75\n-1.25 1:x 3:z\n0.5 2:y\n");

    CHECK_THROWS_AS(parse_operator("0.5 1:x\n", 2), validation_error);    // missing shift
    CHECK_THROWS_AS(parse_operator("shift 0\n1 5:x\n", 2), validation_error);  // range
    CHECK_THROWS_AS(parse_operator("shift 0\n1 1:q\n", 2), validation_error);  // axis
    CHECK_THROWS_AS(parse_operator("shift 0\nbad 1:x\n", 2), validation_error);
}
