#include "aqclab/integrator.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>

#include <json.hpp>

#include "aqclab/errors.hpp"

namespace aqclab {

namespace {

// Evaluate the envelopes at s = t/T and run the fused -i H psi kernel.
void rhs_into(const TimeDependentHamiltonian& h, const StateVector& psi, double t,
              StateVector& out, std::vector<WeightedOperator>& scratch) {
    const double s = h.total_time > 0.0 ? t / h.total_time : 0.0;
    scratch.clear();
    for (const auto& part : h.path.parts) {
        const double c = part.envelope(s);
        if (!std::isfinite(c))
            throw std::runtime_error("rhs: envelope value not finite at t = " +
                                     format_double(t));
        scratch.push_back({c, &part.op});
    }
    accumulate_weighted(scratch, psi, out, /*times_minus_i=*/true);
}

struct Segment {
    double t0 = 0.0;
    double t1 = 0.0;
    long steps = 0;
    double h = 0.0;
};

std::vector<Segment> plan_segments(const TimeDependentHamiltonian& h, double dt) {
    std::vector<double> bounds{0.0};
    for (const double b : h.path.breakpoints)
        if (b > 0.0 && b < 1.0) bounds.push_back(b * h.total_time);
    bounds.push_back(h.total_time);
    std::sort(bounds.begin(), bounds.end());

    std::vector<Segment> segments;
    for (std::size_t i = 0; i + 1 < bounds.size(); ++i) {
        Segment seg;
        seg.t0 = bounds[i];
        seg.t1 = bounds[i + 1];
        const double len = seg.t1 - seg.t0;
        if (len <= 0.0) continue;
        seg.steps = std::max<long>(1, static_cast<long>(std::ceil(len / dt - 1e-9)));
        seg.h = len / static_cast<double>(seg.steps);
        segments.push_back(seg);
    }
    return segments;
}

struct Buffers {
    StateVector pred, k2, k3, k4, stage;
    std::array<StateVector, 4> f;  // derivative history, f[3] most recent

    explicit Buffers(const StateVector& shape) {
        for (StateVector* b : {&pred, &k2, &k3, &k4, &stage}) {
            b->n_qubits = shape.n_qubits;
            b->amplitudes.resize(shape.amplitudes.size());
        }
        for (auto& b : f) {
            b.n_qubits = shape.n_qubits;
            b.amplitudes.resize(shape.amplitudes.size());
        }
    }
};

// out = y + c1*a + c2*b + c3*c + c4*d
void combine4(StateVector& out, const StateVector& y, double c1, const StateVector& a,
              double c2, const StateVector& b, double c3, const StateVector& c,
              double c4, const StateVector& d) {
    const std::int64_t dim = static_cast<std::int64_t>(y.amplitudes.size());
    cplx* o = out.amplitudes.data();
    const cplx* yp = y.amplitudes.data();
    const cplx* ap = a.amplitudes.data();
    const cplx* bp = b.amplitudes.data();
    const cplx* cp = c.amplitudes.data();
    const cplx* dp = d.amplitudes.data();
#pragma omp parallel for schedule(static) if (dim >= 2048)
    for (std::int64_t i = 0; i < dim; ++i)
        o[i] = yp[i] + c1 * ap[i] + c2 * bp[i] + c3 * cp[i] + c4 * dp[i];
}

// y += c1*a + c2*b + c3*c + c4*d, returning the new squared norm.
double update4(StateVector& y, double c1, const StateVector& a, double c2,
               const StateVector& b, double c3, const StateVector& c, double c4,
               const StateVector& d) {
    const std::int64_t dim = static_cast<std::int64_t>(y.amplitudes.size());
    cplx* yp = y.amplitudes.data();
    const cplx* ap = a.amplitudes.data();
    const cplx* bp = b.amplitudes.data();
    const cplx* cp = c.amplitudes.data();
    const cplx* dp = d.amplitudes.data();
    double norm2 = 0.0;
#pragma omp parallel for schedule(static) reduction(+ : norm2) if (dim >= 2048)
    for (std::int64_t i = 0; i < dim; ++i) {
        const cplx v = yp[i] + c1 * ap[i] + c2 * bp[i] + c3 * cp[i] + c4 * dp[i];
        yp[i] = v;
        norm2 += v.real() * v.real() + v.imag() * v.imag();
    }
    return norm2;
}

// out = y + c*a
void axpy_into(StateVector& out, const StateVector& y, double c, const StateVector& a) {
    const std::int64_t dim = static_cast<std::int64_t>(y.amplitudes.size());
    cplx* o = out.amplitudes.data();
    const cplx* yp = y.amplitudes.data();
    const cplx* ap = a.amplitudes.data();
#pragma omp parallel for schedule(static) if (dim >= 2048)
    for (std::int64_t i = 0; i < dim; ++i) o[i] = yp[i] + c * ap[i];
}

void scale_state(StateVector& y, double factor) {
    const std::int64_t dim = static_cast<std::int64_t>(y.amplitudes.size());
    cplx* yp = y.amplitudes.data();
#pragma omp parallel for schedule(static) if (dim >= 2048)
    for (std::int64_t i = 0; i < dim; ++i) yp[i] *= factor;
}

}  // namespace

StateVector rhs(const TimeDependentHamiltonian& h, const StateVector& psi, double t) {
    if (t < 0.0 || t > h.total_time + 1e-12)
        throw validation_error("rhs: time outside [0, T]");
    StateVector out;
    out.n_qubits = psi.n_qubits;
    out.amplitudes.resize(psi.amplitudes.size());
    std::vector<WeightedOperator> scratch;
    rhs_into(h, psi, t, out, scratch);
    return out;
}

double default_time_step(const TimeDependentHamiltonian& h) {
    double e_max = 0.0;
    for (const double s : {0.0, 0.5, 1.0}) {
        double bound = 0.0;
        for (const auto& part : h.path.parts)
            bound += std::abs(part.envelope(s)) * part.op.spectral_bound();
        e_max = std::max(e_max, bound);
    }
    if (e_max <= 1e-30) return 1e-2;
    return std::min(1e-2, 0.05 / e_max);
}

void save_checkpoint(const Checkpoint& cp, const std::string& prefix) {
    save_state(cp.psi, prefix + ".psi.sqhstate");
    for (int i = 0; i < 4; ++i)
        save_state(cp.history[i], prefix + ".f" + std::to_string(i) + ".sqhstate");
    nlohmann::json j;
    j["t"] = cp.t;
    j["global_step"] = cp.global_step;
    j["segment"] = cp.segment;
    j["step_in_segment"] = cp.step_in_segment;
    j["h"] = cp.h;
    j["n_qubits"] = cp.psi.n_qubits;
    j["state_file"] = prefix + ".psi.sqhstate";
    j["history_files"] = {prefix + ".f0.sqhstate", prefix + ".f1.sqhstate",
                          prefix + ".f2.sqhstate", prefix + ".f3.sqhstate"};
    std::ofstream out(prefix + ".json", std::ios::binary | std::ios::trunc);
    if (!out) throw validation_error("save_checkpoint: cannot open " + prefix + ".json");
    out << j.dump(2) << "\n";
}

Checkpoint load_checkpoint(const std::string& prefix) {
    std::ifstream in(prefix + ".json", std::ios::binary);
    if (!in) throw validation_error("load_checkpoint: cannot open " + prefix + ".json");
    nlohmann::json j;
    in >> j;
    Checkpoint cp;
    cp.t = j.at("t").get<double>();
    cp.global_step = j.at("global_step").get<long>();
    cp.segment = j.at("segment").get<int>();
    cp.step_in_segment = j.at("step_in_segment").get<long>();
    cp.h = j.at("h").get<double>();
    cp.psi = load_state(j.at("state_file").get<std::string>());
    const auto files = j.at("history_files").get<std::vector<std::string>>();
    if (files.size() != 4)
        throw validation_error("load_checkpoint: expected 4 history files");
    for (int i = 0; i < 4; ++i) cp.history[i] = load_state(files[i]);
    return cp;
}

std::pair<StateVector, EvolveDiagnostics> evolve(
    const StateVector& psi0, const TimeDependentHamiltonian& h,
    const EvolutionSpec& spec, const EvolveObserver& observer, long observe_every,
    const Checkpoint* resume) {
    const auto wall_start = std::chrono::steady_clock::now();
    EvolveDiagnostics diag;

    if (h.path.n_qubits() != psi0.n_qubits)
        throw validation_error("evolve: path/state qubit count mismatch");
    if (h.total_time < 0.0)
        throw validation_error("evolve: negative total time");
    if (h.total_time == 0.0) {
        if (observer) observer(0, 0.0, psi0);
        diag.norm_drift = std::abs(1.0 - psi0.norm_sq());
        return {psi0, diag};
    }

    const double dt = spec.dt > 0.0 ? spec.dt : default_time_step(h);
    if (dt > h.total_time)
        throw validation_error("evolve: dt exceeds total time");
    if (!resume) psi0.require_normalized(1e-9);

    const std::vector<Segment> segments = plan_segments(h, dt);
    diag.restarts = static_cast<long>(segments.size()) - 1;

    StateVector y = resume ? resume->psi : psi0;
    Buffers buf(y);
    std::vector<WeightedOperator> scratch;
    auto& f = buf.f;

    const auto eval = [&](double t, const StateVector& in, StateVector& out) {
        rhs_into(h, in, t, out, scratch);
        ++diag.rhs_evaluations;
    };

    long global_step = resume ? resume->global_step : 0;
    const int first_segment = resume ? resume->segment : 0;
    if (resume) {
        for (int i = 0; i < 4; ++i) f[i] = resume->history[i];
        diag.dt = resume->h;
    }

    if (observer && !resume) observer(0, 0.0, y);

    const auto post_step = [&](double t_now, double norm2, int segment,
                               long step_in_segment, double h_step,
                               bool history_valid) {
        ++global_step;
        ++diag.steps;
        if (!std::isfinite(norm2))
            throw divergence_error("evolve: non-finite amplitudes at step " +
                                       std::to_string(global_step),
                                   global_step);
        const double drift = std::abs(1.0 - norm2);
        if (drift > spec.norm_tolerance) {
            if (!spec.renormalize)
                throw divergence_error("evolve: norm drift " + format_double(drift) +
                                           " exceeds tolerance at step " +
                                           std::to_string(global_step),
                                       global_step);
            // The flow is linear, so rescaling state and history together is
            // exactly equivalent to having rescaled earlier.
            const double factor = 1.0 / std::sqrt(norm2);
            scale_state(y, factor);
            for (auto& fi : f) scale_state(fi, factor);
            norm2 = 1.0;
        }
        diag.norm_drift = std::abs(1.0 - norm2);
        if (observer && observe_every > 0 && global_step % observe_every == 0)
            observer(global_step, t_now, y);
        if (spec.checkpoint_every > 0 && history_valid &&
            global_step % spec.checkpoint_every == 0) {
            Checkpoint cp;
            cp.t = t_now;
            cp.global_step = global_step;
            cp.segment = segment;
            cp.step_in_segment = step_in_segment;
            cp.h = h_step;
            cp.psi = y;
            cp.history = f;
            save_checkpoint(cp, spec.checkpoint_prefix);
        }
    };

    for (int si = first_segment; si < static_cast<int>(segments.size()); ++si) {
        const Segment& seg = segments[si];
        const double hs = seg.h;
        diag.dt = std::max(diag.dt, hs);
        const bool multistep = seg.steps >= 4;
        long i = 0;
        if (resume && si == first_segment) {
            if (std::abs(hs - resume->h) > 1e-12 * std::max(1.0, hs))
                throw validation_error("evolve: checkpoint step size does not match plan");
            i = resume->step_in_segment;
        }

        for (; i < seg.steps; ++i) {
            const double t = seg.t0 + hs * static_cast<double>(i);
            const bool in_bootstrap = !multistep || i < 3;

            if (in_bootstrap) {
                // Classical fourth-order one-step method; its first stage
                // derivative doubles as the multistep history entry.
                StateVector& k1 = f[std::min<long>(i, 3)];
                eval(t, y, k1);
                axpy_into(buf.stage, y, 0.5 * hs, k1);
                eval(t + 0.5 * hs, buf.stage, buf.k2);
                axpy_into(buf.stage, y, 0.5 * hs, buf.k2);
                eval(t + 0.5 * hs, buf.stage, buf.k3);
                axpy_into(buf.stage, y, hs, buf.k3);
                eval(t + hs, buf.stage, buf.k4);
                const double norm2 =
                    update4(y, hs / 6.0, k1, hs / 3.0, buf.k2, hs / 3.0, buf.k3,
                            hs / 6.0, buf.k4);
                const bool closing_bootstrap = multistep && i == 2;
                if (closing_bootstrap) {
                    // One extra evaluation completes the history at t_3.
                    eval(t + hs, y, f[3]);
                }
                post_step(t + hs, norm2, si, i + 1, hs, closing_bootstrap);
            } else {
                // Predict (Adams-Bashforth), evaluate once at the prediction,
                // correct (Adams-Moulton), keep the predictor derivative as
                // history.
                const double c = hs / 24.0;
                combine4(buf.pred, y, 55 * c, f[3], -59 * c, f[2], 37 * c, f[1],
                         -9 * c, f[0]);
                eval(t + hs, buf.pred, buf.stage);
                const double norm2 = update4(y, 9 * c, buf.stage, 19 * c, f[3],
                                             -5 * c, f[2], 1 * c, f[1]);
                std::swap(f[0], f[1]);
                std::swap(f[1], f[2]);
                std::swap(f[2], f[3]);
                std::swap(f[3], buf.stage);
                post_step(t + hs, norm2, si, i + 1, hs, true);
            }
        }
    }

    if (observer) {
        if (observe_every <= 0 || global_step % observe_every != 0)
            observer(global_step, h.total_time, y);
    }
    diag.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - wall_start)
            .count();
    return {std::move(y), diag};
}

}  // namespace aqclab
