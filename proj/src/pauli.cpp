#include "aqclab/pauli.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>

#include "aqclab/errors.hpp"
#include "aqclab/state.hpp"

namespace aqclab {

char axis_char(PauliAxis axis) {
    switch (axis) {
        case PauliAxis::X: return 'x';
        case PauliAxis::Y: return 'y';
        case PauliAxis::Z: return 'z';
    }
    return '?';
}

SqhTerm::SqhTerm(double weight, std::vector<PauliFactor> factors)
    : weight_(weight), factors_(std::move(factors)) {
    if (factors_.empty())
        throw validation_error("SqhTerm: factor list must be non-empty (identity belongs in the shift)");
    if (!std::isfinite(weight_))
        throw validation_error("SqhTerm: weight must be finite");
    std::sort(factors_.begin(), factors_.end());
    for (std::size_t i = 0; i < factors_.size(); ++i) {
        const auto [q, axis] = factors_[i];
        if (q < 1 || q > 64)
            throw validation_error("SqhTerm: qubit index " + std::to_string(q) + " out of range");
        if (i > 0 && factors_[i - 1].qubit == q)
            throw validation_error("SqhTerm: repeated qubit index " + std::to_string(q));
        const std::uint64_t bit = std::uint64_t{1} << (q - 1);
        switch (axis) {
            case PauliAxis::X: flip_mask_ |= bit; break;
            case PauliAxis::Y: flip_mask_ |= bit; phase_mask_ |= bit; phase_base_ = (phase_base_ + 1) & 3; break;
            case PauliAxis::Z: phase_mask_ |= bit; break;
        }
    }
}

TermImage apply_term(const SqhTerm& term, std::uint64_t z, int n_qubits) {
    if (n_qubits < 1 || n_qubits > 64)
        throw validation_error("apply_term: invalid qubit count");
    if (n_qubits < 64 && z >= (std::uint64_t{1} << n_qubits))
        throw validation_error("apply_term: basis index out of range");
    if (term.max_qubit() > n_qubits)
        throw validation_error("apply_term: term addresses qubit beyond register");
    const int k = (term.phase_base() + 2 * std::popcount(z & term.phase_mask())) & 3;
    return TermImage{z ^ term.flip_mask(), k};
}

SqhOperator::SqhOperator(int n_qubits, double shift, std::vector<SqhTerm> terms,
                         double drop_tolerance)
    : n_qubits_(n_qubits), shift_(shift) {
    if (n_qubits < 1 || n_qubits > 64)
        throw validation_error("SqhOperator: qubit count must be in [1, 64]");
    if (!std::isfinite(shift))
        throw validation_error("SqhOperator: shift must be finite");
    for (const auto& t : terms)
        if (t.max_qubit() > n_qubits)
            throw validation_error("SqhOperator: term addresses qubit beyond register");

    std::sort(terms.begin(), terms.end(), [](const SqhTerm& a, const SqhTerm& b) {
        return a.factors() < b.factors();
    });
    terms_.reserve(terms.size());
    for (auto& t : terms) {
        if (!terms_.empty() && terms_.back().factors() == t.factors()) {
            const double merged = terms_.back().weight() + t.weight();
            terms_.back() = t.with_weight(merged);
        } else {
            terms_.push_back(std::move(t));
        }
    }
    std::erase_if(terms_, [drop_tolerance](const SqhTerm& t) {
        return std::abs(t.weight()) <= drop_tolerance;
    });
}

double SqhOperator::spectral_bound() const {
    double bound = std::abs(shift_);
    for (const auto& t : terms_) bound += std::abs(t.weight());
    return bound;
}

bool SqhOperator::operator==(const SqhOperator& other) const {
    if (n_qubits_ != other.n_qubits_ || shift_ != other.shift_ ||
        terms_.size() != other.terms_.size())
        return false;
    for (std::size_t i = 0; i < terms_.size(); ++i)
        if (terms_[i].weight() != other.terms_[i].weight() ||
            terms_[i].factors() != other.terms_[i].factors())
            return false;
    return true;
}

namespace {

// Term data flattened for the inner loop.
struct KernelTerm {
    std::uint64_t flip;
    std::uint64_t pmask;
    int base;
    double coeff;
};

inline void add_phased(cplx& acc, int k, double c, cplx v) {
    switch (k) {
        case 0: acc += c * v; break;
        case 1: acc += cplx(-c * v.imag(), c * v.real()); break;
        case 2: acc -= c * v; break;
        default: acc += cplx(c * v.imag(), -c * v.real()); break;
    }
}

}  // namespace

void accumulate_weighted(std::span<const WeightedOperator> parts,
                         const StateVector& in, StateVector& out,
                         bool times_minus_i) {
    for (const auto& p : parts)
        if (p.op->n_qubits() != in.n_qubits)
            throw validation_error("accumulate_weighted: operator/state qubit count mismatch");
    if (out.n_qubits != in.n_qubits || out.amplitudes.size() != in.amplitudes.size())
        throw validation_error("accumulate_weighted: output buffer has wrong shape");

    double shift_total = 0.0;
    std::vector<KernelTerm> kt;
    for (const auto& p : parts) {
        shift_total += p.coefficient * p.op->shift();
        for (const auto& t : p.op->terms())
            kt.push_back({t.flip_mask(), t.phase_mask(), t.phase_base(),
                          p.coefficient * t.weight()});
    }

    const std::int64_t dim = static_cast<std::int64_t>(in.dim());
    const cplx* src = in.amplitudes.data();
    cplx* dst = out.amplitudes.data();
    const KernelTerm* terms = kt.data();
    const std::int64_t n_terms = static_cast<std::int64_t>(kt.size());

#pragma omp parallel for schedule(static) if (dim >= 2048)
    for (std::int64_t y = 0; y < dim; ++y) {
        cplx acc = shift_total * src[y];
        for (std::int64_t t = 0; t < n_terms; ++t) {
            const std::uint64_t z = static_cast<std::uint64_t>(y) ^ terms[t].flip;
            const int k = (terms[t].base + 2 * std::popcount(z & terms[t].pmask)) & 3;
            add_phased(acc, k, terms[t].coeff, src[z]);
        }
        dst[y] = times_minus_i ? cplx(acc.imag(), -acc.real()) : acc;
    }
}

StateVector matvec(const SqhOperator& op, const StateVector& psi) {
    if (op.n_qubits() != psi.n_qubits)
        throw validation_error("matvec: operator/state qubit count mismatch");
    StateVector out;
    out.n_qubits = psi.n_qubits;
    out.amplitudes.resize(psi.amplitudes.size());
    const WeightedOperator part{1.0, &op};
    accumulate_weighted({&part, 1}, psi, out);
    return out;
}

void matvec_into(const SqhOperator& op, std::span<const cplx> in, std::span<cplx> out) {
    const std::uint64_t dim = std::uint64_t{1} << op.n_qubits();
    if (in.size() != dim || out.size() != dim)
        throw validation_error("matvec_into: span length must be 2^n");
    const double shift = op.shift();
    const auto& terms = op.terms();
    const std::int64_t d = static_cast<std::int64_t>(dim);
    const std::int64_t n_terms = static_cast<std::int64_t>(terms.size());
    const cplx* src = in.data();
    cplx* dst = out.data();
#pragma omp parallel for schedule(static) if (d >= 2048)
    for (std::int64_t y = 0; y < d; ++y) {
        cplx acc = shift * src[y];
        for (std::int64_t t = 0; t < n_terms; ++t) {
            const SqhTerm& kt = terms[t];
            const std::uint64_t z = static_cast<std::uint64_t>(y) ^ kt.flip_mask();
            const int k = (kt.phase_base() + 2 * std::popcount(z & kt.phase_mask())) & 3;
            add_phased(acc, k, kt.weight(), src[z]);
        }
        dst[y] = acc;
    }
}

StateVector matvec_serial(const SqhOperator& op, const StateVector& psi) {
    if (op.n_qubits() != psi.n_qubits)
        throw validation_error("matvec_serial: operator/state qubit count mismatch");
    StateVector out;
    out.n_qubits = psi.n_qubits;
    out.amplitudes.assign(psi.amplitudes.size(), cplx{});
    const std::uint64_t dim = psi.dim();
    for (std::uint64_t z = 0; z < dim; ++z)
        out.amplitudes[z] = op.shift() * psi.amplitudes[z];
    for (const auto& t : op.terms()) {
        for (std::uint64_t z = 0; z < dim; ++z) {
            const TermImage img = apply_term(t, z, psi.n_qubits);
            add_phased(out.amplitudes[img.index], img.phase_exponent, t.weight(),
                       psi.amplitudes[z]);
        }
    }
    return out;
}

SqhOperator linear_combine(std::span<const std::pair<double, const SqhOperator*>> parts) {
    if (parts.empty())
        throw validation_error("linear_combine: empty part list");
    const int n = parts.front().second->n_qubits();
    double shift = 0.0;
    std::vector<SqhTerm> terms;
    for (const auto& [c, op] : parts) {
        if (op->n_qubits() != n)
            throw validation_error("linear_combine: mismatched qubit counts");
        shift += c * op->shift();
        for (const auto& t : op->terms())
            terms.push_back(t.with_weight(c * t.weight()));
    }
    return SqhOperator(n, shift, std::move(terms), 1e-15);
}

SqhOperator linear_combine(std::initializer_list<std::pair<double, const SqhOperator*>> parts) {
    return linear_combine(std::span<const std::pair<double, const SqhOperator*>>(
        parts.begin(), parts.size()));
}

SqhOperator scaled(const SqhOperator& op, double factor) {
    std::vector<SqhTerm> terms;
    terms.reserve(op.terms().size());
    for (const auto& t : op.terms()) terms.push_back(t.with_weight(factor * t.weight()));
    return SqhOperator(op.n_qubits(), factor * op.shift(), std::move(terms));
}

std::string format_double(double value) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, res.ptr);
}

std::string emit_operator(const SqhOperator& op) {
    std::string out = "shift " + format_double(op.shift()) + "\n";
    for (const auto& t : op.terms()) {
        out += format_double(t.weight());
        for (const auto& f : t.factors()) {
            out += ' ';
            out += std::to_string(f.qubit);
            out += ':';
            out += axis_char(f.axis);
        }
        out += '\n';
    }
    return out;
}

namespace {

double parse_strict_double(std::string_view token, int line_no) {
    double v = 0.0;
    const auto res = std::from_chars(token.data(), token.data() + token.size(), v);
    if (res.ec != std::errc{} || res.ptr != token.data() + token.size())
        throw validation_error("operator dump line " + std::to_string(line_no) +
                               ": bad number '" + std::string(token) + "'");
    return v;
}

int parse_strict_int(std::string_view token, int line_no) {
    int v = 0;
    const auto res = std::from_chars(token.data(), token.data() + token.size(), v);
    if (res.ec != std::errc{} || res.ptr != token.data() + token.size())
        throw validation_error("operator dump line " + std::to_string(line_no) +
                               ": bad integer '" + std::string(token) + "'");
    return v;
}

}  // namespace

SqhOperator parse_operator(std::string_view text, int n_qubits) {
    std::istringstream stream{std::string(text)};
    std::string line;
    int line_no = 0;
    double shift = 0.0;
    bool have_shift = false;
    std::vector<SqhTerm> terms;

    while (std::getline(stream, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string tok;
        ls >> tok;
        if (!have_shift) {
            if (tok != "shift")
                throw validation_error("operator dump line 1: expected 'shift <value>'");
            ls >> tok;
            shift = parse_strict_double(tok, line_no);
            have_shift = true;
            continue;
        }
        const double w = parse_strict_double(tok, line_no);
        std::vector<PauliFactor> factors;
        while (ls >> tok) {
            const auto colon = tok.find(':');
            if (colon == std::string::npos || colon + 2 != tok.size())
                throw validation_error("operator dump line " + std::to_string(line_no) +
                                       ": bad factor '" + tok + "'");
            const int q = parse_strict_int(tok.substr(0, colon), line_no);
            PauliAxis axis;
            switch (tok[colon + 1]) {
                case 'x': axis = PauliAxis::X; break;
                case 'y': axis = PauliAxis::Y; break;
                case 'z': axis = PauliAxis::Z; break;
                default:
                    throw validation_error("operator dump line " + std::to_string(line_no) +
                                           ": bad axis '" + tok.substr(colon + 1) + "'");
            }
            if (q < 1 || q > n_qubits)
                throw validation_error("operator dump line " + std::to_string(line_no) +
                                       ": qubit " + std::to_string(q) + " out of range");
            factors.push_back({q, axis});
        }
        if (factors.empty())
            throw validation_error("operator dump line " + std::to_string(line_no) +
                                   ": term without factors");
        terms.emplace_back(w, std::move(factors));
    }
    if (!have_shift)
        throw validation_error("operator dump: missing 'shift' line");
    return SqhOperator(n_qubits, shift, std::move(terms));
}

}  // namespace aqclab
