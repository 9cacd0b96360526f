#include <doctest.h>

#include <bit>
#include <cmath>
#include <cstdio>
#include <random>

#include "aqclab/errors.hpp"
#include "aqclab/pauli.hpp"
#include "aqclab/state.hpp"
#include "oracles.hpp"

using namespace aqclab;

TEST_CASE("uniform superposition") {
    const StateVector one = uniform_superposition(1);
    CHECK(one.amplitudes[0].real() == doctest::Approx(1.0 / std::sqrt(2.0)));
    CHECK(one.amplitudes[1].real() == doctest::Approx(1.0 / std::sqrt(2.0)));

    const StateVector two = uniform_superposition(2);
    for (const auto& a : two.amplitudes) CHECK(a == cplx{0.5, 0.0});

    const StateVector ten = uniform_superposition(10);
    CHECK(std::abs(1.0 - ten.norm_sq()) < 1e-12);

    CHECK_THROWS_AS(uniform_superposition(30), resource_error);
    CHECK_NOTHROW(uniform_superposition(27, 27));  // explicit cap override
}

TEST_CASE("dicke states") {
    const StateVector d21 = dicke_state(2, 1);
    const double r = 1.0 / std::sqrt(2.0);
    CHECK(d21.amplitudes[0] == cplx{});
    CHECK(d21.amplitudes[1].real() == doctest::Approx(r));
    CHECK(d21.amplitudes[2].real() == doctest::Approx(r));
    CHECK(d21.amplitudes[3] == cplx{});

    const StateVector d30 = dicke_state(3, 0);
    CHECK(d30.amplitudes[0] == cplx{1.0, 0.0});

    const StateVector d42 = dicke_state(4, 2);
    int nonzero = 0;
    for (const auto& a : d42.amplitudes)
        if (a != cplx{}) {
            ++nonzero;
            CHECK(a.real() == doctest::Approx(1.0 / std::sqrt(6.0)));
        }
    CHECK(nonzero == 6);

    CHECK_THROWS_AS(dicke_state(3, 4), validation_error);
}

TEST_CASE("dicke state is a Hamming-weight eigenstate of the total flip operator") {
    for (const auto [n, delta] : {std::pair{4, 2}, std::pair{5, 1}, std::pair{6, 3}}) {
        const StateVector psi = dicke_state(n, delta);
        const SqhOperator flips = total_flip_operator(n);
        const StateVector out = matvec(flips, psi);
        for (std::size_t i = 0; i < psi.amplitudes.size(); ++i)
            CHECK(std::abs(out.amplitudes[i] - static_cast<double>(delta) *
                                                   psi.amplitudes[i]) < 1e-12);
    }
}

TEST_CASE("sector maps") {
    const SectorMap m31 = sector_map(3, 1);
    CHECK(m31.indices == std::vector<std::uint64_t>{1, 2, 4});
    CHECK(sector_map(3, 3).indices == std::vector<std::uint64_t>{7});
    CHECK(sector_map(13, 4).dim() == 715);

    const SectorMap m52 = sector_map(5, 2);
    CHECK(m52.dim() == binomial(5, 2));
    for (std::size_t i = 1; i < m52.indices.size(); ++i)
        CHECK(m52.indices[i - 1] < m52.indices[i]);
    CHECK(m52.rank(3) == 0);
    CHECK(m52.rank(7) == -1);
}

TEST_CASE("energy expectation") {
    // eigenstate |1> of sigma^z has energy -1
    const SqhOperator z(1, 0.0, {SqhTerm(1.0, {{1, PauliAxis::Z}})});
    StateVector one = StateVector::zero(1);
    one.amplitudes[1] = 1.0;
    CHECK(energy_expectation(one, z) == doctest::Approx(-1.0));

    // |+> under sigma^z averages to zero
    CHECK(energy_expectation(uniform_superposition(1), z) == doctest::Approx(0.0));

    // random operator against the dense quadratic form
    std::mt19937_64 rng(19);
    const SqhOperator op = oracle::random_operator(rng, 4, 10);
    const StateVector psi = oracle::random_state(rng, 4);
    const Eigen::VectorXcd v = oracle::to_eigen(psi);
    const double expected = (v.adjoint() * (oracle::dense_oracle(op) * v))(0).real();
    CHECK(energy_expectation(psi, op) == doctest::Approx(expected).epsilon(1e-10));

    // norm violations are refused
    StateVector big = psi;
    for (auto& a : big.amplitudes) a *= 1.1;
    CHECK_THROWS_AS(energy_expectation(big, op), validation_error);
}

TEST_CASE("solution overlap") {
    StateVector basis = StateVector::zero(3);
    basis.amplitudes[5] = 1.0;
    CHECK(solution_overlap(basis, 5) == doctest::Approx(1.0));

    CHECK(solution_overlap(uniform_superposition(4), 7) == doctest::Approx(1.0 / 16.0));

    const StateVector d = dicke_state(4, 2);
    CHECK(solution_overlap(d, 1) == 0.0);  // weight-1 index, disjoint support

    CHECK_THROWS_AS(solution_overlap(basis, 8), validation_error);
}

TEST_CASE("sector leakage and sector probabilities") {
    CHECK(sector_leakage(dicke_state(5, 2), 2) == 0.0);
    CHECK(sector_leakage(uniform_superposition(2), 1) == doctest::Approx(0.5));

    std::mt19937_64 rng(29);
    const StateVector psi = oracle::random_state(rng, 6);
    const auto probs = sector_probabilities(psi);
    double total = 0.0;
    for (int d = 0; d <= 6; ++d) {
        total += probs[d];
        CHECK(probs[d] == doctest::Approx(1.0 - sector_leakage(psi, d)).epsilon(1e-12));
    }
    CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("state dump round-trips") {
    std::mt19937_64 rng(37);
    const StateVector psi = oracle::random_state(rng, 5);
    const std::string path = "state_roundtrip.sqhstate";
    save_state(psi, path);
    const StateVector back = load_state(path);
    REQUIRE(back.n_qubits == 5);
    for (std::size_t i = 0; i < psi.amplitudes.size(); ++i)
        CHECK(back.amplitudes[i] == psi.amplitudes[i]);
    std::remove(path.c_str());

    CHECK_THROWS_AS(load_state("does_not_exist.sqhstate"), validation_error);
}
