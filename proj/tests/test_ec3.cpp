#include <doctest.h>

#include <algorithm>
#include <bit>
#include <cstdio>
#include <random>

#include "aqclab/ec3.hpp"
#include "aqclab/errors.hpp"
#include "aqclab/pauli.hpp"
#include "aqclab/state.hpp"
#include "oracles.hpp"

using namespace aqclab;

namespace {

Ec3Instance make_instance(int n, std::initializer_list<Clause> clauses) {
    Ec3Instance inst;
    inst.n = n;
    inst.clauses.assign(clauses);
    inst.validate();
    return inst;
}

}  // namespace

TEST_CASE("clause basics") {
    const Clause c(13, 4, 1);
    CHECK(c.bits == std::array<int, 3>{1, 4, 13});  // stored ascending
    CHECK_THROWS_AS(Clause(1, 1, 2), validation_error);
    CHECK_THROWS_AS(Clause(0, 1, 2), validation_error);
}

TEST_CASE("clause satisfaction on the 13-bit reference assignment") {
    // z = 1098 = 0010001001010b has upbits {2, 4, 7, 11}
    const std::uint64_t z = 1098;
    CHECK(clause_satisfied(Clause(1, 4, 13), z));   // only bit 4 is up
    CHECK(clause_satisfied(Clause(9, 11, 13), z));  // only bit 11 is up
    CHECK_FALSE(clause_satisfied(Clause(1, 2, 3), 0));
    CHECK_FALSE(clause_satisfied(Clause(2, 4, 7), z));  // three upbits
}

TEST_CASE("clause satisfaction equals mask-and-popcount (property)") {
    std::mt19937_64 rng(101);
    for (int trial = 0; trial < 10000; ++trial) {
        const int n = 5 + static_cast<int>(rng() % 16);
        const int a = 1 + static_cast<int>(rng() % n);
        const int b = 1 + static_cast<int>(rng() % n);
        const int c = 1 + static_cast<int>(rng() % n);
        if (a == b || a == c || b == c) continue;
        const Clause clause(a, b, c);
        const std::uint64_t z = rng() & ((std::uint64_t{1} << n) - 1);
        const int ones = static_cast<int>(z >> (a - 1) & 1) +
                         static_cast<int>(z >> (b - 1) & 1) +
                         static_cast<int>(z >> (c - 1) & 1);
        CHECK(clause_satisfied(clause, z) == (ones == 1));
    }
}

TEST_CASE("count_solutions") {
    CHECK(count_solutions(make_instance(4, {})) == 16);  // no clauses
    CHECK(count_solutions(make_instance(3, {Clause(1, 2, 3)})) == 3);

    // brute-force derived: two overlapping clauses on five bits
    const Ec3Instance two = make_instance(5, {Clause(1, 2, 3), Clause(3, 4, 5)});
    long long by_hand = 0;
    for (std::uint64_t z = 0; z < 32; ++z)
        if (clause_satisfied(two.clauses[0], z) && clause_satisfied(two.clauses[1], z))
            ++by_hand;
    CHECK(by_hand == 5);
    CHECK(count_solutions(two) == by_hand);

    CHECK(count_solutions(two, 2) == 2);  // capped scan reports ">= 2"
    CHECK(find_solutions(two, 100).size() == 5);
}

TEST_CASE("instance statistics") {
    const auto single = instance_stats(make_instance(3, {Clause(1, 2, 3)}));
    CHECK(single.per_bit == std::vector<int>{1, 1, 1});
    CHECK(single.pair_count(1, 2) == 1);
    CHECK(single.pair_count(2, 3) == 1);
    CHECK(single.max_pair_count() == 1);

    const auto stats = instance_stats(make_instance(5, {Clause(1, 2, 3), Clause(1, 4, 5)}));
    CHECK(stats.per_bit == std::vector<int>{2, 1, 1, 1, 1});
    CHECK(stats.pair_count(1, 2) == 1);
    CHECK(stats.pair_count(4, 5) == 1);
    CHECK(stats.pair_count(2, 4) == 0);

    // sum rule: every clause contributes three bits and three pairs
    for (int trial = 0; trial < 50; ++trial) {
        const Ec3Instance inst = generate_hard_instance(9, 500 + trial);
        const auto s = instance_stats(inst);
        int bit_sum = 0, pair_sum = 0;
        for (const int v : s.per_bit) bit_sum += v;
        for (const int v : s.per_pair) pair_sum += v;
        CHECK(bit_sum == 3 * s.m);
        CHECK(pair_sum == 3 * s.m);
        CHECK(s.max_pair_count() == 1);
    }
}

TEST_CASE("final Hamiltonian diagonal matches the clause-penalty oracle") {
    const auto diagonal_entry = [](const SqhOperator& op, std::uint64_t z) {
        StateVector basis = StateVector::zero(op.n_qubits());
        basis.amplitudes[z] = 1.0;
        return matvec(op, basis).amplitudes[z].real();
    };

    const Ec3Instance single = make_instance(3, {Clause(1, 2, 3)});
    const SqhOperator h = final_hamiltonian(single, 1.0);
    CHECK(diagonal_entry(h, 1) == 0.0);  // satisfying assignment
    CHECK(diagonal_entry(h, 0) == 1.0);  // empty assignment pays one penalty

    for (int trial = 0; trial < 10; ++trial) {
        const int n = 7 + trial % 3;
        const Ec3Instance inst = generate_hard_instance(n, 900 + trial);
        const SqhOperator hf = final_hamiltonian(inst, 1.0);
        for (std::uint64_t z = 0; z < (std::uint64_t{1} << n); ++z)
            CHECK(diagonal_entry(hf, z) ==
                  static_cast<double>(oracle::penalty_oracle(inst, z)));
    }
}

TEST_CASE("final Hamiltonian is diagonal and its kernel counts the solutions") {
    for (int trial = 0; trial < 5; ++trial) {
        const Ec3Instance inst = generate_hard_instance(8, 300 + trial);
        const SqhOperator hf = final_hamiltonian(inst, 1.0);
        for (const auto& t : hf.terms())
            for (const auto& f : t.factors()) CHECK(f.axis == PauliAxis::Z);

        const Eigen::MatrixXcd dense = oracle::dense_oracle(hf);
        int zeros = 0;
        for (Eigen::Index z = 0; z < dense.rows(); ++z)
            if (std::abs(dense(z, z)) < 1e-12) ++zeros;
        CHECK(zeros == count_solutions(inst));
    }
}

TEST_CASE("hard instance generator") {
    SUBCASE("unique solution, connectivity, coverage, pair rule") {
        for (int seed = 0; seed < 25; ++seed) {
            const Ec3Instance inst = generate_hard_instance(7, seed);
            CHECK(count_solutions(inst) == 1);
            CHECK(*inst.known_solution == find_solutions(inst, 2).front());
            CHECK(oracle::connected_and_covering(inst));
            CHECK(instance_stats(inst).max_pair_count() == 1);
            CHECK(inst.m() <= (2 * 7 + 2) / 3 + 2);
        }
    }
    SUBCASE("deterministic for fixed (n, seed)") {
        const Ec3Instance a = generate_hard_instance(9, 4242);
        const Ec3Instance b = generate_hard_instance(9, 4242);
        CHECK(a.clauses == b.clauses);
        CHECK(*a.known_solution == *b.known_solution);
        const Ec3Instance c = generate_hard_instance(9, 4243);
        CHECK(a.clauses != c.clauses);
    }
    SUBCASE("clause ratio stays near the phase transition") {
        for (const int n : {7, 9, 11})
            for (int seed = 0; seed < 100; ++seed) {
                const double ratio =
                    static_cast<double>(generate_hard_instance(n, seed).m()) / n;
                CHECK(ratio >= 0.5);
                CHECK(ratio <= 0.9);
            }
    }
    SUBCASE("rejects bad arguments") {
        CHECK_THROWS_AS(generate_hard_instance(3, 1), validation_error);
        CHECK_THROWS_AS(generate_hard_instance(31, 1), resource_error);
    }
}

TEST_CASE("removable clauses") {
    SUBCASE("single clause: nothing to remove") {
        CHECK(removable_clauses(make_instance(3, {Clause(1, 2, 3)})).empty());
    }
    SUBCASE("chain: every removal breaks coverage or connectivity") {
        const Ec3Instance chain =
            make_instance(7, {Clause(1, 2, 3), Clause(3, 4, 5), Clause(5, 6, 7)});
        CHECK(removable_clauses(chain).empty());
        // cross-check each removal against the BFS oracle
        for (std::size_t skip = 0; skip < chain.clauses.size(); ++skip) {
            Ec3Instance reduced;
            reduced.n = chain.n;
            for (std::size_t i = 0; i < chain.clauses.size(); ++i)
                if (i != skip) reduced.clauses.push_back(chain.clauses[i]);
            CHECK_FALSE(oracle::connected_and_covering(reduced));
        }
    }
    SUBCASE("cycle with full double coverage has removable clauses") {
        const Ec3Instance cycle = make_instance(
            6, {Clause(1, 2, 3), Clause(3, 4, 5), Clause(5, 6, 1), Clause(2, 4, 6)});
        const auto removable = removable_clauses(cycle);
        CHECK(!removable.empty());
        for (const auto& r : removable) {
            Ec3Instance reduced;
            reduced.n = cycle.n;
            for (const auto& c : cycle.clauses)
                if (!(c == r)) reduced.clauses.push_back(c);
            CHECK(oracle::connected_and_covering(reduced));
        }
    }
}

TEST_CASE("instance file format") {
    SUBCASE("round trip is bit exact") {
        for (int seed = 0; seed < 10; ++seed) {
            const Ec3Instance inst = generate_hard_instance(8, seed);
            const std::string text = emit_instance(inst);
            const Ec3Instance back = parse_instance(text);
            CHECK(back.n == inst.n);
            CHECK(back.clauses == inst.clauses);
            CHECK(back.known_solution == inst.known_solution);
            CHECK(emit_instance(back) == text);
        }
    }
    SUBCASE("file save and load") {
        const Ec3Instance inst = generate_hard_instance(7, 3);
        const std::string path = "roundtrip_test.ec3";
        save_instance(inst, path);
        const Ec3Instance back = load_instance(path);
        CHECK(back.clauses == inst.clauses);
        std::remove(path.c_str());
    }
    SUBCASE("parser rejects malformed input with line numbers") {
        CHECK_THROWS_WITH_AS(parse_instance("ec3 5 1\n1 2 9\n"),
                             doctest::Contains("line 2"), validation_error);
        CHECK_THROWS_WITH_AS(parse_instance("ec3 5 2\n1 2 3\n1 2 3\n"),
                             doctest::Contains("duplicate"), validation_error);
        CHECK_THROWS_AS(parse_instance("ec3 5 2\n1 2 3\n"), validation_error);  // count
        CHECK_THROWS_AS(parse_instance("bogus\n"), validation_error);
        CHECK_THROWS_AS(parse_instance("ec3 5 1\n1 2 x\n"), validation_error);
    }
}
