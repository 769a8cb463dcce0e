#include "anisoflow/schemes.hpp"

#include "levelset_internal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace anisoflow {

namespace {

constexpr double kBandCells = 6.0;

struct CurveMeasure {
    GeometryCache cache;
    DiagnosticsRow row;
    double h_abs_max = 0.0;
};

struct CurvePolicy {
    using State = SurfaceState;
    using Measure = CurveMeasure;
    const FlowConfig& config;

    Measure measure(const State& s) const {
        Measure m;
        m.cache = compute_geometry(s);
        const auto [hmin, hmax] = std::minmax_element(m.cache.H.begin(), m.cache.H.end());
        const ConvexityReport cv = convexity_monitor(m.cache);
        const RadialExtremes ext = radial_extremes(s);
        m.row = {s.t, area(m.cache), *hmin, *hmax, cv.k_min, ext.r_min, ext.r_max, 0.0};
        m.h_abs_max = std::max(std::abs(*hmin), std::abs(*hmax));
        return m;
    }

    double dt(const State& s, const Measure& m, double remaining) const {
        if (config.fixed_dt) return std::min(*config.fixed_dt, remaining);
        return adaptive_dt(s, m.cache, config.cfl, remaining);
    }

    State step(const State& s, const Measure& m, double dt) const {
        if (s.rep == Representation::radial_graph) return step_radial(s, m.cache, dt, config.r_stop);
        return step_parametric(s, m.cache, dt, config.tangential_redistribution);
    }

    // Radial graphs raise Collapse inside the step.
    bool breached(const State& s, const Measure& m) const {
        return s.rep == Representation::parametric_curve && m.row.r_min <= config.r_stop;
    }

    Snapshot snapshot(const State& s, const Measure& m, long step) const {
        Snapshot snap;
        snap.t = s.t;
        snap.step = step;
        snap.rep = std::string(to_string(s.rep));
        if (s.rep == Representation::radial_graph) {
            snap.r = s.r;
        } else {
            snap.points = s.points;
        }
        snap.H = m.cache.H;
        snap.dmu = m.cache.dmu;
        snap.k_min = m.row.k_min;
        snap.area = m.row.area;
        const double cell = m.cache.surface_dim == 1 ? m.cache.d_theta : m.cache.d_theta * m.cache.d_phi;
        double acc = 0.0;
        for (int k = 0; k < m.cache.size(); ++k) acc += m.cache.H[k] * m.cache.H[k] * m.cache.dmu[k];
        snap.h2_integral = acc * cell;
        snap.state = s;
        return snap;
    }

    void finish(RunRecord& rec, const State& s) const { rec.final_state = s; }
};

struct LevelSetMeasure {
    detail::LevelSetRates rates;
    ZeroSet zero;
    std::vector<double> H;  // at the ray points
    double h2 = 0.0;
    DiagnosticsRow row;
    double h_abs_max = 0.0;
};

struct LevelSetPolicy {
    using State = LevelSetGrid;
    using Measure = LevelSetMeasure;
    const FlowConfig& config;

    Measure measure(const State& g) const {
        Measure m;
        m.rates = detail::levelset_rates(g, kBandCells);
        std::vector<double> nodal(m.rates.rate.size(), std::numeric_limits<double>::quiet_NaN());
        for (std::size_t k = 0; k < nodal.size(); ++k)
            if (m.rates.speed[k] > 0.0) nodal[k] = -m.rates.rate[k] / m.rates.speed[k];
        m.zero = extract_zero_set(g, g.params.rays);

        const auto& pts = m.zero.ray_points;
        const std::size_t n = pts.size();
        m.H.resize(n);
        for (std::size_t k = 0; k < n; ++k) m.H[k] = detail::interpolate(g, nodal, pts[k]);

        const MinkowskiNorm& F = *g.norm;
        double len = 0.0, h2 = 0.0;
        double r_min = std::numeric_limits<double>::infinity(), r_max = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            const VecN& p = pts[k];
            const VecN& q = pts[(k + 1) % n];
            const VecN d = q - p;
            const double e = d.norm();
            VecN inward(2);
            inward << -d[1] / e, d[0] / e;
            const double w = F.dual_norm(Covector(inward)) * e;
            len += w;
            const double hm = 0.5 * (m.H[k] + m.H[(k + 1) % n]);
            h2 += hm * hm * w;
            const double r = F.eval(Vector(VecN(g.center - p)));
            r_min = std::min(r_min, r);
            r_max = std::max(r_max, r);
        }
        m.h2 = h2;
        const auto [hmin, hmax] = std::minmax_element(m.H.begin(), m.H.end());
        m.row = {g.t, len, *hmin, *hmax, *hmin, r_min, r_max, 0.0};
        m.h_abs_max = std::max(std::abs(*hmin), std::abs(*hmax));
        if (!std::isfinite(m.h_abs_max)) throw Error(ErrorKind::GradientDegenerate, "curvature undefined on the zero set");
        return m;
    }

    double dt(const State& g, const Measure&, double remaining) const {
        const double dt = config.fixed_dt ? *config.fixed_dt : config.cfl * g.dx * g.dx;
        return std::min(dt, remaining);
    }

    // The rates are consumed; a failed step ends the run anyway.
    State step(const State& g, Measure& m, double dt) const {
        return detail::levelset_advance(g, std::move(m.rates), dt);
    }

    bool breached(const State&, const Measure& m) const { return m.row.r_min <= config.r_stop; }

    Snapshot snapshot(const State& g, const Measure& m, long step) const {
        Snapshot snap;
        snap.t = g.t;
        snap.step = step;
        snap.rep = "level_set";
        snap.points = m.zero.ray_points;
        snap.H = m.H;
        snap.k_min = m.row.k_min;
        snap.area = m.row.area;
        snap.h2_integral = m.h2;
        return snap;
    }

    void finish(RunRecord& rec, const State& g) const { rec.final_grid = g; }
};

template <class Policy>
std::vector<RunRecord> drive(const Policy& policy, std::vector<typename Policy::State> states,
                             const FlowConfig& config) {
    using Measure = typename Policy::Measure;
    const std::size_t members = states.size();
    std::vector<RunRecord> records(members);
    std::vector<Measure> measures;
    measures.reserve(members);
    for (std::size_t m = 0; m < members; ++m) {
        records[m].config = config;
        measures.push_back(policy.measure(states[m]));
        records[m].diagnostics.push_back(measures[m].row);
        records[m].snapshots.push_back(policy.snapshot(states[m], measures[m], 0));
    }

    const double t_end = config.t_end;
    const double t_eps = 1e-14 * std::max(1.0, t_end);
    long step = 0;
    double t = members ? states[0].t : 0.0;
    StopReason stop = StopReason::t_end;
    std::optional<ErrorKind> error_kind;
    std::string message;

    auto stop_with = [&](StopReason why, std::optional<ErrorKind> kind, std::string what) {
        stop = why;
        error_kind = kind;
        message = std::move(what);
    };

    while (t_end - t > t_eps) {
        const double remaining = t_end - t;
        double dt = remaining;
        for (std::size_t m = 0; m < members; ++m) dt = std::min(dt, policy.dt(states[m], measures[m], remaining));

        std::vector<typename Policy::State> next;
        std::vector<Measure> next_measures;
        next.reserve(members);
        next_measures.reserve(members);
        bool halted = false;
        try {
            for (std::size_t m = 0; m < members; ++m) {
                next.push_back(policy.step(states[m], measures[m], dt));
                next_measures.push_back(policy.measure(next.back()));
                if (policy.breached(next.back(), next_measures.back())) {
                    stop_with(StopReason::r_stop, std::nullopt, "radius reached the stop threshold");
                    halted = true;
                    break;
                }
            }
        } catch (const Error& e) {
            if (e.kind() == ErrorKind::Collapse) {
                stop_with(StopReason::r_stop, std::nullopt, e.what());
            } else {
                stop_with(StopReason::error, e.kind(), e.what());
            }
            halted = true;
        }
        if (halted) break;

        ++step;
        t = next[0].t;
        bool capped = false;
        for (std::size_t m = 0; m < members; ++m) {
            states[m] = std::move(next[m]);
            measures[m] = std::move(next_measures[m]);
            DiagnosticsRow row = measures[m].row;
            row.dt = dt;
            records[m].diagnostics.push_back(row);
            if (step % config.snapshot_every == 0) {
                records[m].snapshots.push_back(policy.snapshot(states[m], measures[m], step));
            }
            if (measures[m].h_abs_max > config.h_cap) capped = true;
        }
        if (capped) {
            stop_with(StopReason::h_cap, std::nullopt, "curvature exceeded the cap");
            break;
        }
    }

    for (std::size_t m = 0; m < members; ++m) {
        RunRecord& rec = records[m];
        if (rec.snapshots.back().step != step) rec.snapshots.push_back(policy.snapshot(states[m], measures[m], step));
        rec.stop = stop;
        rec.error_kind = error_kind;
        rec.message = message;
        rec.steps = step;
        policy.finish(rec, states[m]);
    }
    return records;
}

Scheme scheme_of(const SurfaceState& s) {
    return s.rep == Representation::radial_graph ? Scheme::radial_graph : Scheme::parametric_curve;
}

}  // namespace

RunRecord run(const SurfaceState& initial, const FlowConfig& config) {
    config.validate();
    if (config.scheme == Scheme::level_set) return run(levelset_from_surface(initial, config.level_set), config);
    return run_synchronized({initial}, config).front();
}

RunRecord run(const LevelSetGrid& initial, const FlowConfig& config) {
    config.validate();
    if (config.scheme != Scheme::level_set) throw Error(ErrorKind::InvalidParams, "grid runs need the level_set scheme");
    const LevelSetPolicy policy{config};
    return drive(policy, std::vector<LevelSetGrid>{initial}, config).front();
}

std::vector<RunRecord> run_synchronized(const std::vector<SurfaceState>& initials, const FlowConfig& config) {
    config.validate();
    if (initials.empty()) throw Error(ErrorKind::InvalidParams, "no states to run");
    for (const auto& s : initials) {
        if (scheme_of(s) != config.scheme) {
            throw Error(ErrorKind::InvalidParams, "initial state representation does not match flow.scheme");
        }
        if (s.t != initials.front().t) throw Error(ErrorKind::InvalidParams, "synchronized states need a common time");
    }
    const CurvePolicy policy{config};
    return drive(policy, initials, config);
}

}  // namespace anisoflow
