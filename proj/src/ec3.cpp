#include "aqclab/ec3.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>

#include "aqclab/errors.hpp"
#include "aqclab/pauli.hpp"

namespace aqclab {

Clause::Clause(int a, int b, int c) : bits{a, b, c} {
    std::sort(bits.begin(), bits.end());
    if (bits[0] < 1 || bits[0] == bits[1] || bits[1] == bits[2])
        throw validation_error("Clause: three distinct positive bit indices required");
}

std::uint64_t Clause::mask() const {
    return (std::uint64_t{1} << (bits[0] - 1)) | (std::uint64_t{1} << (bits[1] - 1)) |
           (std::uint64_t{1} << (bits[2] - 1));
}

void Ec3Instance::validate() const {
    if (n < 3) throw validation_error("Ec3Instance: need at least 3 bits");
    for (const auto& c : clauses)
        if (c.bits[2] > n)
            throw validation_error("Ec3Instance: clause bit exceeds n");
    std::vector<Clause> sorted = clauses;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
        throw validation_error("Ec3Instance: duplicate clause");
    if (known_solution && *known_solution >> n)
        throw validation_error("Ec3Instance: known solution out of range");
}

bool clause_satisfied(const Clause& clause, std::uint64_t z) {
    return std::popcount(z & clause.mask()) == 1;
}

namespace {

bool all_satisfied(const std::vector<Clause>& clauses, std::uint64_t z) {
    for (const auto& c : clauses)
        if (std::popcount(z & c.mask()) != 1) return false;
    return true;
}

}  // namespace

long long count_solutions(const Ec3Instance& inst, std::optional<long long> cap) {
    inst.validate();
    if (inst.n > 30 && !cap)
        throw resource_error("count_solutions: exhaustive mode capped at n = 30");
    const std::uint64_t dim = std::uint64_t{1} << inst.n;
    long long count = 0;
    for (std::uint64_t z = 0; z < dim; ++z) {
        if (all_satisfied(inst.clauses, z)) {
            ++count;
            if (cap && count >= *cap) return count;
        }
    }
    return count;
}

std::vector<std::uint64_t> find_solutions(const Ec3Instance& inst, std::size_t max_count) {
    inst.validate();
    if (inst.n > 30)
        throw resource_error("find_solutions: exhaustive mode capped at n = 30");
    std::vector<std::uint64_t> sols;
    const std::uint64_t dim = std::uint64_t{1} << inst.n;
    for (std::uint64_t z = 0; z < dim && sols.size() < max_count; ++z)
        if (all_satisfied(inst.clauses, z)) sols.push_back(z);
    return sols;
}

int InstanceStats::pair_count(int i, int j) const {
    if (i == j || i < 1 || j < 1 || i > n || j > n)
        throw validation_error("InstanceStats: bad pair");
    if (i > j) std::swap(i, j);
    // upper-triangle offset for (i, j), 1-based
    const int a = i - 1, b = j - 1;
    return per_pair[a * n - a * (a + 1) / 2 + (b - a - 1)];
}

int InstanceStats::max_pair_count() const {
    return per_pair.empty() ? 0 : *std::max_element(per_pair.begin(), per_pair.end());
}

InstanceStats instance_stats(const Ec3Instance& inst) {
    inst.validate();
    InstanceStats stats;
    stats.n = inst.n;
    stats.m = inst.m();
    stats.per_bit.assign(inst.n, 0);
    stats.per_pair.assign(static_cast<std::size_t>(inst.n) * (inst.n - 1) / 2, 0);
    const auto pair_slot = [&](int i, int j) {  // 1-based, i < j
        const int a = i - 1, b = j - 1;
        return a * inst.n - a * (a + 1) / 2 + (b - a - 1);
    };
    for (const auto& c : inst.clauses) {
        for (const int bit : c.bits) ++stats.per_bit[bit - 1];
        ++stats.per_pair[pair_slot(c.bits[0], c.bits[1])];
        ++stats.per_pair[pair_slot(c.bits[0], c.bits[2])];
        ++stats.per_pair[pair_slot(c.bits[1], c.bits[2])];
    }
    return stats;
}

SqhOperator clause_penalty(const Clause& clause, int n_qubits, double omega) {
    // [1 - (1/2) sum_k (1 - sigma^z)]^2 expands to
    // 1 - (1/2) sum_k sigma^z_k + (1/2) sum_{k<l} sigma^z_k sigma^z_l.
    std::vector<SqhTerm> terms;
    for (const int bit : clause.bits)
        terms.emplace_back(-0.5 * omega, std::vector<PauliFactor>{{bit, PauliAxis::Z}});
    const auto& b = clause.bits;
    for (const auto [i, j] : {std::pair{b[0], b[1]}, std::pair{b[0], b[2]}, std::pair{b[1], b[2]}})
        terms.emplace_back(0.5 * omega,
                           std::vector<PauliFactor>{{i, PauliAxis::Z}, {j, PauliAxis::Z}});
    return SqhOperator(n_qubits, omega, std::move(terms));
}

SqhOperator final_hamiltonian(const Ec3Instance& inst, double omega) {
    const InstanceStats stats = instance_stats(inst);
    std::vector<SqhTerm> terms;
    for (int i = 1; i <= inst.n; ++i) {
        if (stats.per_bit[i - 1] == 0) continue;
        terms.emplace_back(-0.5 * omega * stats.per_bit[i - 1],
                           std::vector<PauliFactor>{{i, PauliAxis::Z}});
    }
    for (int i = 1; i <= inst.n; ++i)
        for (int j = i + 1; j <= inst.n; ++j) {
            const int nij = stats.pair_count(i, j);
            if (nij == 0) continue;
            terms.emplace_back(0.5 * omega * nij,
                               std::vector<PauliFactor>{{i, PauliAxis::Z}, {j, PauliAxis::Z}});
        }
    return SqhOperator(inst.n, omega * stats.m, std::move(terms));
}

bool covers_all_bits(const Ec3Instance& inst) {
    std::uint64_t mask = 0;
    for (const auto& c : inst.clauses) mask |= c.mask();
    return std::popcount(mask) == inst.n;
}

namespace {

struct UnionFind {
    std::vector<int> parent;
    explicit UnionFind(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
    int find(int x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    }
    void unite(int a, int b) { parent[find(a)] = find(b); }
};

}  // namespace

bool hypergraph_connected(const Ec3Instance& inst) {
    if (inst.clauses.empty()) return false;
    UnionFind uf(inst.n);
    std::uint64_t touched = 0;
    for (const auto& c : inst.clauses) {
        uf.unite(c.bits[0] - 1, c.bits[1] - 1);
        uf.unite(c.bits[0] - 1, c.bits[2] - 1);
        touched |= c.mask();
    }
    int root = -1;
    for (int b = 0; b < inst.n; ++b) {
        if (!(touched >> b & 1)) continue;
        const int r = uf.find(b);
        if (root == -1) root = r;
        else if (r != root) return false;
    }
    return true;
}

std::vector<Clause> removable_clauses(const Ec3Instance& inst) {
    inst.validate();
    std::vector<Clause> result;
    if (inst.m() < 2) return result;
    for (std::size_t skip = 0; skip < inst.clauses.size(); ++skip) {
        Ec3Instance reduced;
        reduced.n = inst.n;
        for (std::size_t i = 0; i < inst.clauses.size(); ++i)
            if (i != skip) reduced.clauses.push_back(inst.clauses[i]);
        if (covers_all_bits(reduced) && hypergraph_connected(reduced))
            result.push_back(inst.clauses[skip]);
    }
    return result;
}

namespace {

// Bounded draw built on raw mt19937_64 output (rejection sampling), so that
// generated instances are identical across standard library implementations.
std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t bound) {
    const std::uint64_t reject_above =
        std::numeric_limits<std::uint64_t>::max() -
        std::numeric_limits<std::uint64_t>::max() % bound;
    for (;;) {
        const std::uint64_t v = rng();
        if (v < reject_above) return v % bound;
    }
}

}  // namespace

Ec3Instance generate_hard_instance(int n, std::uint64_t seed, long max_restarts) {
    if (n < 4)
        throw validation_error("generate_hard_instance: need n >= 4");
    if (n > 30)
        throw resource_error("generate_hard_instance: solution checking capped at n = 30");

    std::vector<Clause> pool;
    for (int a = 1; a <= n; ++a)
        for (int b = a + 1; b <= n; ++b)
            for (int c = b + 1; c <= n; ++c) pool.emplace_back(a, b, c);

    // ceil(2n/3) + 2, additionally capped so that m/n never leaves [0.5, 0.9]
    const int m_max = std::min((2 * n + 2) / 3 + 2, 9 * n / 10);
    const std::uint64_t full_mask = (std::uint64_t{1} << n) - 1;
    std::mt19937_64 rng(seed);

    const auto pair_key = [n](int i, int j) {  // 1-based, unordered
        if (i > j) std::swap(i, j);
        return (i - 1) * n + (j - 1);
    };

    for (long attempt = 1; attempt <= max_restarts; ++attempt) {
        std::vector<char> alive(pool.size(), 1);
        std::vector<char> pair_used(static_cast<std::size_t>(n) * n, 0);
        std::vector<int> accepted;
        std::uint64_t vertex_mask = 0;

        const auto accept = [&](int idx) {
            const Clause& c = pool[idx];
            alive[idx] = 0;
            accepted.push_back(idx);
            vertex_mask |= c.mask();
            pair_used[pair_key(c.bits[0], c.bits[1])] = 1;
            pair_used[pair_key(c.bits[0], c.bits[2])] = 1;
            pair_used[pair_key(c.bits[1], c.bits[2])] = 1;
        };
        const auto eligible = [&](int idx) {
            if (!alive[idx]) return false;
            const Clause& c = pool[idx];
            if ((c.mask() & vertex_mask) == 0) return false;  // must touch the graph
            return !pair_used[pair_key(c.bits[0], c.bits[1])] &&
                   !pair_used[pair_key(c.bits[0], c.bits[2])] &&
                   !pair_used[pair_key(c.bits[1], c.bits[2])];
        };
        const auto finish = [&](std::uint64_t solution) {
            Ec3Instance inst;
            inst.n = n;
            for (const int idx : accepted) inst.clauses.push_back(pool[idx]);
            inst.known_solution = solution;
            return inst;
        };

        accept(static_cast<int>(uniform_below(rng, pool.size())));

        bool covered = false;
        bool failed = false;
        std::vector<std::uint64_t> sols;
        while (!failed) {
            if (static_cast<int>(accepted.size()) >= m_max) break;  // budget: restart
            std::vector<int> candidates;
            for (std::size_t i = 0; i < pool.size(); ++i)
                if (eligible(static_cast<int>(i))) candidates.push_back(static_cast<int>(i));
            if (candidates.empty()) break;  // pool exhausted: restart
            const int drawn = candidates[uniform_below(rng, candidates.size())];

            if (!covered) {
                accept(drawn);
                if (vertex_mask == full_mask) {
                    covered = true;
                    sols.clear();
                    std::vector<Clause> so_far;
                    for (const int idx : accepted) so_far.push_back(pool[idx]);
                    for (std::uint64_t z = 0; z <= full_mask; ++z)
                        if (all_satisfied(so_far, z)) sols.push_back(z);
                    if (sols.empty()) break;  // unsatisfiable already: restart
                    if (sols.size() == 1) return finish(sols.front());
                }
            } else {
                std::vector<std::uint64_t> filtered;
                for (const std::uint64_t z : sols)
                    if (clause_satisfied(pool[drawn], z)) filtered.push_back(z);
                if (filtered.empty()) {
                    alive[drawn] = 0;  // discard: it would kill all solutions
                    continue;
                }
                accept(drawn);
                sols = std::move(filtered);
                if (sols.size() == 1) return finish(sols.front());
            }
        }
    }
    throw generation_error("generate_hard_instance: no unique-solution instance for n = " +
                               std::to_string(n) + " within restart budget",
                           max_restarts);
}

std::string emit_instance(const Ec3Instance& inst) {
    inst.validate();
    std::string out = "ec3 " + std::to_string(inst.n) + " " + std::to_string(inst.m()) + "\n";
    if (inst.known_solution)
        out += "solution " + std::to_string(*inst.known_solution) + "\n";
    for (const auto& c : inst.clauses)
        out += std::to_string(c.bits[0]) + " " + std::to_string(c.bits[1]) + " " +
               std::to_string(c.bits[2]) + "\n";
    return out;
}

namespace {

long parse_int_token(std::istringstream& ls, int line_no, const char* what) {
    std::string tok;
    if (!(ls >> tok))
        throw validation_error("instance file line " + std::to_string(line_no) +
                               ": missing " + what);
    long v = 0;
    const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (res.ec != std::errc{} || res.ptr != tok.data() + tok.size())
        throw validation_error("instance file line " + std::to_string(line_no) +
                               ": bad integer '" + tok + "'");
    return v;
}

}  // namespace

Ec3Instance parse_instance(std::string_view text) {
    std::istringstream stream{std::string(text)};
    std::string line;
    int line_no = 0;
    Ec3Instance inst;
    long expected_m = -1;

    while (std::getline(stream, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::istringstream ls(line);
        if (expected_m < 0) {
            std::string head;
            ls >> head;
            if (head != "ec3")
                throw validation_error("instance file line " + std::to_string(line_no) +
                                       ": expected 'ec3 <n> <m>'");
            inst.n = static_cast<int>(parse_int_token(ls, line_no, "bit count"));
            expected_m = parse_int_token(ls, line_no, "clause count");
            if (inst.n < 3 || inst.n > 63 || expected_m < 0)
                throw validation_error("instance file line " + std::to_string(line_no) +
                                       ": invalid header values");
            continue;
        }
        if (!inst.known_solution && inst.clauses.empty() && line.rfind("solution", 0) == 0) {
            std::string head;
            ls >> head;
            const long z = parse_int_token(ls, line_no, "solution value");
            if (z < 0 || (z >> inst.n) != 0)
                throw validation_error("instance file line " + std::to_string(line_no) +
                                       ": solution out of range");
            inst.known_solution = static_cast<std::uint64_t>(z);
            continue;
        }
        const long a = parse_int_token(ls, line_no, "bit index");
        const long b = parse_int_token(ls, line_no, "bit index");
        const long c = parse_int_token(ls, line_no, "bit index");
        if (a < 1 || b < 1 || c < 1 || a > inst.n || b > inst.n || c > inst.n)
            throw validation_error("instance file line " + std::to_string(line_no) +
                                   ": bit index out of range [1, " + std::to_string(inst.n) + "]");
        Clause clause(static_cast<int>(a), static_cast<int>(b), static_cast<int>(c));
        if (std::find(inst.clauses.begin(), inst.clauses.end(), clause) != inst.clauses.end())
            throw validation_error("instance file line " + std::to_string(line_no) +
                                   ": duplicate clause");
        inst.clauses.push_back(clause);
    }
    if (expected_m < 0)
        throw validation_error("instance file: missing header");
    if (expected_m != inst.m())
        throw validation_error("instance file: header declares " + std::to_string(expected_m) +
                               " clauses, found " + std::to_string(inst.m()));
    inst.validate();
    return inst;
}

void save_instance(const Ec3Instance& inst, const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw validation_error("save_instance: cannot open " + path);
    out << emit_instance(inst);
    if (!out) throw validation_error("save_instance: write failed for " + path);
}

Ec3Instance load_instance(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw validation_error("load_instance: cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_instance(buf.str());
}

}  // namespace aqclab
