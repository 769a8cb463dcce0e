#include "anisoflow/schemes.hpp"

#include "periodic_spline.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace anisoflow {

std::string_view to_string(Scheme s) {
    switch (s) {
        case Scheme::radial_graph: return "radial_graph";
        case Scheme::parametric_curve: return "parametric_curve";
        case Scheme::level_set: return "level_set";
    }
    return "unknown";
}

Scheme scheme_from_string(std::string_view name) {
    if (name == "radial_graph") return Scheme::radial_graph;
    if (name == "parametric_curve") return Scheme::parametric_curve;
    if (name == "level_set") return Scheme::level_set;
    throw Error(ErrorKind::InvalidParams, "unknown scheme '" + std::string(name) + "'");
}

std::string_view to_string(StopReason s) {
    switch (s) {
        case StopReason::t_end: return "t_end";
        case StopReason::r_stop: return "r_stop";
        case StopReason::h_cap: return "h_cap";
        case StopReason::error: return "error";
    }
    return "unknown";
}

void FlowConfig::validate() const {
    auto finite_positive = [](double v) { return std::isfinite(v) && v > 0.0; };
    if (!(cfl > 0.0 && cfl <= 0.5)) throw SchemaViolation("flow.cfl", "must be in (0,0.5]");
    if (!(std::isfinite(t_end) && t_end >= 0.0)) throw SchemaViolation("flow.t_end", "must be >= 0");
    if (!finite_positive(r_stop)) throw SchemaViolation("flow.r_stop", "must be > 0");
    if (!(h_cap > 0.0)) throw SchemaViolation("flow.h_cap", "must be > 0");
    if (snapshot_every < 1) throw SchemaViolation("flow.snapshot_every", "must be >= 1");
    if (fixed_dt && !finite_positive(*fixed_dt)) throw SchemaViolation("flow.fixed_dt", "must be > 0");
    if (!finite_positive(level_set.dx)) throw SchemaViolation("flow.level_set.dx", "must be > 0");
    if (!(std::isfinite(level_set.margin) && level_set.margin >= 0.0)) {
        throw SchemaViolation("flow.level_set.margin", "must be >= 0");
    }
    if (level_set.reinit_every < 1) throw SchemaViolation("flow.level_set.reinit_every", "must be >= 1");
    if (level_set.reinit_iterations < 0) throw SchemaViolation("flow.level_set.reinit_iterations", "must be >= 0");
    if (level_set.rays < 16) throw SchemaViolation("flow.level_set.rays", "must be >= 16");
    if (scheme == Scheme::level_set && fixed_dt && *fixed_dt > 0.5 * level_set.dx * level_set.dx) {
        throw SchemaViolation("flow.fixed_dt", "level-set steps must satisfy dt <= 0.5 dx^2");
    }
}

namespace {

double min_spatial_scale(const SurfaceState& s) {
    double m = std::numeric_limits<double>::infinity();
    if (s.rep == Representation::parametric_curve) {
        const int n = s.size();
        for (int k = 0; k < n; ++k) m = std::min(m, (s.points[(k + 1) % n] - s.points[k]).norm());
        return m;
    }
    const double dth = s.d_theta();
    const double dph = s.d_phi();
    for (int k = 0; k < s.size(); ++k) {
        const VecN& z = s.directions[k];
        double cell = dth;
        if (s.n_phi > 0) {
            const double sin_phi = std::hypot(z[0], z[1]) / z.norm();
            cell = std::min(dth * sin_phi, dph);
        }
        m = std::min(m, s.r[k] * cell * z.norm());
    }
    return m;
}

void check_mesh(const std::vector<VecN>& pts) {
    const std::size_t n = pts.size();
    double lo = std::numeric_limits<double>::infinity();
    double hi = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        const double e = (pts[(k + 1) % n] - pts[k]).norm();
        if (!std::isfinite(e)) throw Error(ErrorKind::MeshDegenerate, "non-finite vertex");
        lo = std::min(lo, e);
        hi = std::max(hi, e);
    }
    if (lo < 1e-10) throw Error(ErrorKind::MeshDegenerate, "edge shorter than 1e-10");
    if (hi > 100.0 * lo) throw Error(ErrorKind::MeshDegenerate, "edge length ratio above 100");
}

}  // namespace

double adaptive_dt(const SurfaceState& state, const GeometryCache& cache, double cfl, double remaining) {
    const double s = min_spatial_scale(state);
    double hmax = 0.0;
    for (double h : cache.H) hmax = std::max(hmax, std::abs(h));
    double dt = cfl * s * s / (1.0 + hmax * s);
    dt = std::max(dt, 1e-10);
    return std::min(dt, remaining);
}

SurfaceState step_radial(const SurfaceState& state, const GeometryCache& cache, double dt, double r_stop) {
    if (state.rep != Representation::radial_graph) {
        throw Error(ErrorKind::InvalidParams, "step_radial needs a radial graph");
    }
    if (!(dt > 0.0)) throw Error(ErrorKind::InvalidParams, "dt must be positive");
    SurfaceState next = state;
    for (int k = 0; k < state.size(); ++k) {
        const double r = state.r[k];
        const double v = r + dt * (-cache.conormal_scale[k] / r) * cache.H[k];
        if (!std::isfinite(v)) throw Error(ErrorKind::DegenerateMetric, "non-finite radius");
        if (v <= r_stop) throw Error(ErrorKind::Collapse, "radius reached the stop threshold");
        next.r[k] = v;
    }
    next.t = state.t + dt;
    next.generation = state.generation + 1;
    return next;
}

SurfaceState step_radial(const SurfaceState& state, double dt, double r_stop) {
    return step_radial(state, compute_geometry(state), dt, r_stop);
}

SurfaceState step_parametric(const SurfaceState& state, const GeometryCache& cache, double dt, bool redistribute) {
    if (state.rep != Representation::parametric_curve) {
        throw Error(ErrorKind::InvalidParams, "step_parametric needs a parametric curve");
    }
    if (!(dt > 0.0)) throw Error(ErrorKind::InvalidParams, "dt must be positive");
    SurfaceState next = state;
    for (int k = 0; k < state.size(); ++k) next.points[k] = state.points[k] + dt * cache.H[k] * cache.normal[k];
    check_mesh(next.points);
    if (redistribute) {
        next.points = redistribute_points(next.points);
        check_mesh(next.points);
    }
    next.t = state.t + dt;
    next.generation = state.generation + 1;
    return next;
}

SurfaceState step_parametric(const SurfaceState& state, double dt, bool redistribute) {
    return step_parametric(state, compute_geometry(state), dt, redistribute);
}

std::vector<VecN> redistribute_points(const std::vector<VecN>& points) {
    const detail::PeriodicCurveSpline spline(points);
    const std::size_t n = points.size();
    const double L = spline.period();
    std::vector<VecN> out;
    out.reserve(n);
    out.push_back(points[0]);
    for (std::size_t k = 1; k < n; ++k) out.push_back(spline.eval(L * static_cast<double>(k) / n));
    return out;
}

double curve_hausdorff(const std::vector<VecN>& a, const std::vector<VecN>& b) {
    const detail::PeriodicCurveSpline sa(a);
    const detail::PeriodicCurveSpline sb(b);
    double d = 0.0;
    for (const VecN& p : a) d = std::max(d, (sb.eval(sb.project(p)) - p).norm());
    for (const VecN& p : b) d = std::max(d, (sa.eval(sa.project(p)) - p).norm());
    return d;
}

}  // namespace anisoflow
