#include <doctest.h>

#include "anisoflow/schemes.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

using namespace anisoflow;

namespace {

constexpr double kPi = std::numbers::pi;

using NormPtr = std::shared_ptr<const MinkowskiNorm>;

NormPtr euclid() { return std::make_shared<MinkowskiNorm>(MinkowskiNorm::euclidean(2)); }
NormPtr randers() { return std::make_shared<MinkowskiNorm>(MinkowskiNorm::randers({0.3, 0.0})); }

VecN origin() { return VecN::Zero(2); }

VecN vec(double x, double y) {
    VecN v(2);
    v << x, y;
    return v;
}

// Worst relative deviation of both radial extremes from sqrt(1 - 2t).
double shrinking_circle_error(const RunRecord& rec, double t_max) {
    double e = 0.0;
    for (const auto& d : rec.diagnostics) {
        if (d.t > t_max + 1e-12) break;
        const double exact = std::sqrt(1.0 - 2.0 * d.t);
        e = std::max({e, std::abs(d.r_min - exact) / exact, std::abs(d.r_max - exact) / exact});
    }
    return e;
}

double stddev_over_mean(const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m += x;
    m /= static_cast<double>(v.size());
    double s = 0.0;
    for (double x : v) s += (x - m) * (x - m);
    return std::sqrt(s / static_cast<double>(v.size())) / m;
}

}  // namespace

TEST_CASE("flow config validation") {
    FlowConfig c;
    CHECK_NOTHROW(c.validate());
    c.cfl = 0.9;
    try {
        c.validate();
        FAIL("expected SchemaViolation");
    } catch (const SchemaViolation& e) {
        CHECK(e.key() == "flow.cfl");
        CHECK(e.reason() == "must be in (0,0.5]");
    }
    c = FlowConfig{};
    c.r_stop = 0.0;
    CHECK_THROWS_AS(c.validate(), SchemaViolation);
    c = FlowConfig{};
    c.t_end = -1.0;
    CHECK_THROWS_AS(c.validate(), SchemaViolation);
    c = FlowConfig{};
    c.snapshot_every = 0;
    CHECK_THROWS_AS(c.validate(), SchemaViolation);
    CHECK(scheme_from_string("level_set") == Scheme::level_set);
    CHECK_THROWS_AS(scheme_from_string("spectral"), Error);
}

TEST_CASE("adaptive time step law") {
    const SurfaceState s = wulff_radial(euclid(), origin(), 1.0, 256);
    const GeometryCache c = compute_geometry(s);
    const double h = 2 * kPi / 256;
    const double dt = adaptive_dt(s, c, 0.2);
    CHECK(dt == doctest::Approx(0.2 * h * h / (1 + h)).epsilon(1e-9));
    CHECK(dt == doctest::Approx(1.18e-4).epsilon(5e-3));
    CHECK(adaptive_dt(s, c, 0.1) == doctest::Approx(dt / 2).epsilon(1e-14));
    CHECK(adaptive_dt(s, c, 0.2, 1e-5) == 1e-5);

    const SurfaceState small = wulff_radial(euclid(), origin(), 0.06, 256);
    const double s_small = 0.06 * h;
    const double dt_small = adaptive_dt(small, compute_geometry(small), 0.2);
    CHECK(dt_small == doctest::Approx(0.2 * s_small * s_small / (1 + s_small / 0.06)).epsilon(1e-6));
    CHECK(dt_small / dt == doctest::Approx(0.06 * 0.06).epsilon(1e-6));

    const SurfaceState p = wulff_parametric(euclid(), origin(), 1.0, 256);
    const double chord = 2 * std::sin(kPi / 256);
    CHECK(adaptive_dt(p, compute_geometry(p), 0.2) ==
          doctest::Approx(0.2 * chord * chord / (1 + chord)).epsilon(1e-6));
}

TEST_CASE("radial scheme follows the shrinking circle") {
    FlowConfig cfg;
    cfg.t_end = 0.45;
    const RunRecord rec = run(wulff_radial(euclid(), origin(), 1.0, 256), cfg);
    CHECK(rec.stop == StopReason::t_end);
    CHECK(rec.halt_time() == doctest::Approx(0.45).epsilon(1e-14));
    CHECK(shrinking_circle_error(rec, 0.45) <= 1e-3);
}

TEST_CASE("radial scheme keeps Wulff shapes round") {
    SurfaceState s = wulff_radial(euclid(), origin(), 1.0, 256);
    SurfaceState w = wulff_radial(randers(), origin(), 1.0, 256);
    for (int k = 0; k < 100; ++k) {
        const GeometryCache c = compute_geometry(s);
        s = step_radial(s, c, adaptive_dt(s, c, 0.2));
        const GeometryCache cw = compute_geometry(w);
        w = step_radial(w, cw, adaptive_dt(w, cw, 0.2));
    }
    CHECK(stddev_over_mean(s.r) <= 1e-10);
    CHECK(s.generation == 100);
    // only as round as the discrete curvature is constant
    CHECK(stddev_over_mean(w.r) <= 1e-8);

    FlowConfig cfg;
    cfg.t_end = 0.45;
    const RunRecord rec = run(wulff_radial(randers(), origin(), 1.0, 256), cfg);
    CHECK(shrinking_circle_error(rec, 0.45) <= 1e-3);
}

TEST_CASE("radial collapse and scheme mismatch") {
    const SurfaceState s = wulff_radial(euclid(), origin(), 0.1, 64);
    try {
        step_radial(s, 0.006, 0.05);
        FAIL("expected Collapse");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::Collapse);
    }
    CHECK_THROWS_AS(step_parametric(s, 1e-4, false), Error);

    FlowConfig cfg;
    cfg.t_end = 1.0;
    const RunRecord rec = run(wulff_radial(euclid(), origin(), 0.5, 64), cfg);
    CHECK(rec.stop == StopReason::r_stop);
    CHECK(rec.final_state->r.size() == 64);
    for (double r : rec.final_state->r) CHECK(r > cfg.r_stop);
    CHECK(rec.final_state->t == rec.halt_time());
}

TEST_CASE("parametric scheme follows the shrinking circle") {
    FlowConfig cfg;
    cfg.scheme = Scheme::parametric_curve;
    cfg.t_end = 0.45;
    const RunRecord rec = run(wulff_parametric(euclid(), origin(), 1.0, 256), cfg);
    CHECK(rec.stop == StopReason::t_end);
    CHECK(shrinking_circle_error(rec, 0.45) <= 1e-3);
}

TEST_CASE("parametric ellipse area decreases every step") {
    FlowConfig cfg;
    cfg.scheme = Scheme::parametric_curve;
    cfg.t_end = 0.3;
    const RunRecord rec = run(ellipse_parametric(euclid(), origin(), 2.0, 1.0, 256), cfg);
    REQUIRE(rec.diagnostics.size() > 10);
    for (std::size_t k = 1; k < rec.diagnostics.size(); ++k) {
        CHECK(rec.diagnostics[k].area < rec.diagnostics[k - 1].area);
        CHECK(rec.diagnostics[k].t > rec.diagnostics[k - 1].t);
    }
}

TEST_CASE("tangential velocity does not change the curve to first order") {
    const SurfaceState s = ellipse_parametric(randers(), origin(), 2.0, 1.0, 512);
    const GeometryCache c = compute_geometry(s);
    const double dt = 1e-3;
    const SurfaceState a = step_parametric(s, c, dt, false);
    SurfaceState b = a;
    for (int k = 0; k < s.size(); ++k) {
        const VecN& T = c.tangents[k][0];
        const double theta = 2 * kPi * k / s.size();
        b.points[k] += dt * (0.5 + std::sin(3 * theta)) * T / T.norm();
    }
    const double d = curve_hausdorff(a.points, b.points);
    CHECK(d <= 5 * dt * dt);
    // The tangential displacement itself is first order.
    double moved = 0.0;
    for (int k = 0; k < s.size(); ++k) moved = std::max(moved, (a.points[k] - b.points[k]).norm());
    CHECK(moved > 100 * d);
}

TEST_CASE("redistribution") {
    SurfaceState s = wulff_parametric(euclid(), origin(), 1.0, 128);
    const auto same = redistribute_points(s.points);
    for (std::size_t k = 0; k < same.size(); ++k) CHECK((same[k] - s.points[k]).norm() <= 1e-12);

    // Bunch the vertices, then spread them out again.
    std::vector<VecN> bunched;
    for (int k = 0; k < 128; ++k) {
        const double u = 2 * kPi * k / 128;
        const double th = u + 0.4 * std::sin(u);
        bunched.push_back(vec(2 * std::cos(th), std::sin(th)));
    }
    const auto spread = redistribute_points(bunched);
    CHECK((spread[0] - bunched[0]).norm() == 0.0);
    double lo = 1e9, hi = 0.0;
    for (std::size_t k = 0; k < spread.size(); ++k) {
        const double e = (spread[(k + 1) % spread.size()] - spread[k]).norm();
        lo = std::min(lo, e);
        hi = std::max(hi, e);
    }
    CHECK(hi / lo <= 1.01);
    // Still on the ellipse.
    for (const VecN& p : spread) CHECK(std::abs(p[0] * p[0] / 4 + p[1] * p[1] - 1.0) <= 1e-4);
}

TEST_CASE("curve Hausdorff distance") {
    const auto a = wulff_parametric(euclid(), origin(), 1.0, 64).points;
    const auto b = wulff_parametric(euclid(), origin(), 1.1, 100).points;
    CHECK(curve_hausdorff(a, b) == doctest::Approx(0.1).epsilon(1e-4));
    CHECK(curve_hausdorff(a, a) <= 1e-14);
    std::vector<VecN> shifted;
    for (const VecN& p : a) shifted.push_back(p + vec(0.05, 0.0));
    CHECK(curve_hausdorff(a, shifted) == doctest::Approx(0.05).epsilon(1e-3));
}

TEST_CASE("schemes agree on the ellipse") {
    FlowConfig cfg;
    cfg.t_end = 0.2;
    const RunRecord radial = run(ellipse_radial(euclid(), origin(), 2.0, 1.0, 256), cfg);
    cfg.scheme = Scheme::parametric_curve;
    const RunRecord param = run(ellipse_parametric(euclid(), origin(), 2.0, 1.0, 256), cfg);
    CHECK(curve_hausdorff(radial.final_state->positions(), param.final_state->points) <= 1e-2);

    cfg.scheme = Scheme::level_set;
    cfg.level_set.dx = 0.025;
    cfg.snapshot_every = 1000;
    const RunRecord ls = run(ellipse_parametric(euclid(), origin(), 2.0, 1.0, 256), cfg);
    REQUIRE(ls.stop == StopReason::t_end);
    CHECK(ls.snapshots.back().rep == "level_set");
    CHECK(ls.diagnostics.back().H_min > 0.0);
    CHECK(ls.diagnostics.back().H_min == doctest::Approx(param.diagnostics.back().H_min).epsilon(0.1));
    CHECK(curve_hausdorff(ls.snapshots.back().points, param.final_state->points) <= 2 * cfg.level_set.dx);
}

TEST_CASE("radial monotonicity under mean convexity") {
    FlowConfig cfg;
    cfg.t_end = 0.1;
    cfg.snapshot_every = 1;
    const RunRecord rec = run(ellipse_radial(randers(), origin(), 1.5, 1.0, 128), cfg);
    for (std::size_t s = 1; s < rec.snapshots.size(); ++s) {
        REQUIRE(rec.diagnostics[s - 1].H_min >= 0.0);
        const auto& prev = rec.snapshots[s - 1].r;
        const auto& cur = rec.snapshots[s].r;
        for (std::size_t k = 0; k < cur.size(); ++k) CHECK(cur[k] - prev[k] <= 1e-10);
    }
}

TEST_CASE("level set circle") {
    const VecN lo = vec(-1.6, -1.6), hi = vec(1.6, 1.6);
    const double dx = 0.0125;
    LevelSetGrid g = make_levelset_grid(euclid(), lo, hi, dx, [](const VecN& x) { return x.norm() - 1.0; }, origin());
    CHECK(g.nx == 257);
    const ZeroSet z0 = extract_zero_set(g);
    for (double r : z0.ray_radii) CHECK(std::abs(r - 1.0) <= 1e-3);
    CHECK(z0.centroid.norm() <= 1e-10);

    const double dt = 0.2 * dx * dx;
    while (g.t < 0.2 - 1e-12) g = step_levelset(g, std::min(dt, 0.2 - g.t));
    const ZeroSet z = extract_zero_set(g);
    const double exact = std::sqrt(1 - 2 * 0.2);
    double lo_r = 1e9, hi_r = 0.0, mean = 0.0, var = 0.0;
    for (double r : z.ray_radii) {
        CHECK(std::abs(r - exact) <= 2 * dx);
        lo_r = std::min(lo_r, r);
        hi_r = std::max(hi_r, r);
        mean += r;
    }
    mean /= static_cast<double>(z.ray_radii.size());
    for (double r : z.ray_radii) var += (r - mean) * (r - mean);
    var /= static_cast<double>(z.ray_radii.size());
    CHECK(var <= dx);
    CHECK(hi_r - lo_r <= dx);

    const std::vector<double> H = levelset_curvature(g);
    const int centre_row = g.ny / 2;
    // Node on the x axis closest to the curve.
    const int i = static_cast<int>(std::lround((exact - lo[0]) / dx));
    CHECK(H[g.index(i, centre_row)] == doctest::Approx(1.0 / (lo[0] + i * dx)).epsilon(2e-2));

    CHECK_THROWS_AS(step_levelset(g, dx * dx), Error);
}

TEST_CASE("level set Randers Wulff shape shrinks homothetically") {
    const auto R = randers();
    const double dx = 0.025;
    FlowConfig cfg;
    cfg.scheme = Scheme::level_set;
    cfg.t_end = 0.2;
    cfg.snapshot_every = 10000;
    const LevelSetGrid g = make_levelset_grid(R, vec(-1.6, -1.6), vec(1.6, 1.6), dx,
                                              [&](const VecN& x) { return x.norm() == 0.0 ? -1.0 : R->eval(Vector(VecN(-x))) - 1.0; }, origin(),
                                              LevelSetParams{.dx = dx});
    const RunRecord ls = run(g, cfg);
    REQUIRE(ls.stop == StopReason::t_end);

    cfg.scheme = Scheme::radial_graph;
    const RunRecord radial = run(wulff_radial(R, origin(), 1.0, 256), cfg);
    CHECK(curve_hausdorff(ls.snapshots.back().points, radial.final_state->positions()) <= 2 * dx);
    // and that radial run is itself the scaled Wulff shape
    for (double r : radial.final_state->r) CHECK(r == doctest::Approx(std::sqrt(0.6)).epsilon(1e-3));
}

TEST_CASE("level set reinitialization and degeneracy") {
    const VecN lo = vec(-1.6, -1.6), hi = vec(1.6, 1.6);
    const double dx = 0.025;
    LevelSetGrid steep = make_levelset_grid(euclid(), lo, hi, dx, [](const VecN& x) { return 3 * (x.norm() - 1); },
                                            origin());
    reinitialize(steep, 60);
    for (int j = 0; j < steep.ny; ++j)
        for (int i = 0; i < steep.nx; ++i) {
            const double d = steep.node(i, j).norm() - 1.0;
            if (std::abs(d) < 6 * dx) CHECK(std::abs(steep.f[steep.index(i, j)] - d) <= 2e-3);
        }
    for (double r : extract_zero_set(steep).ray_radii) CHECK(std::abs(r - 1.0) <= 2e-3);

    LevelSetParams params;
    params.reinit_iterations = 0;
    const LevelSetGrid flat = make_levelset_grid(euclid(), lo, hi, dx, [](const VecN& x) { return 0.01 * (x.norm() - 1); },
                                                 origin(), params);
    try {
        step_levelset(flat, 0.2 * dx * dx);
        FAIL("expected GradientDegenerate");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::GradientDegenerate);
    }

    CHECK_THROWS_AS(make_levelset_grid(euclid(), lo, hi, dx, [](const VecN& x) { return x.norm() - 1.55; }, origin()),
                    Error);
}

TEST_CASE("run bookkeeping") {
    FlowConfig cfg;
    cfg.t_end = 0.0;
    const RunRecord none = run(wulff_radial(euclid(), origin(), 1.0, 64), cfg);
    CHECK(none.snapshots.size() == 1);
    CHECK(none.diagnostics.size() == 1);
    CHECK(none.steps == 0);
    CHECK(none.diagnostics[0].dt == 0.0);

    cfg.t_end = 0.45;
    cfg.snapshot_every = 100;
    const RunRecord rec = run(wulff_radial(euclid(), origin(), 1.0, 256), cfg);
    CHECK(rec.diagnostics.size() == static_cast<std::size_t>(rec.steps) + 1);
    CHECK(rec.snapshots.front().step == 0);
    CHECK(rec.snapshots.back().step == rec.steps);
    CHECK(rec.snapshots.size() == static_cast<std::size_t>(rec.steps / 100 + 1 + (rec.steps % 100 != 0)));
    for (std::size_t k = 1; k < rec.diagnostics.size(); ++k) {
        CHECK(rec.diagnostics[k].area < rec.diagnostics[k - 1].area);
        CHECK(rec.diagnostics[k].dt > 0.0);
    }

    const RunRecord again = run(wulff_radial(euclid(), origin(), 1.0, 256), cfg);
    REQUIRE(again.diagnostics.size() == rec.diagnostics.size());
    bool identical = true;
    for (std::size_t k = 0; k < rec.diagnostics.size(); ++k) {
        const auto& a = rec.diagnostics[k];
        const auto& b = again.diagnostics[k];
        identical = identical && a.t == b.t && a.area == b.area && a.H_min == b.H_min && a.H_max == b.H_max &&
                    a.k_min == b.k_min && a.r_min == b.r_min && a.r_max == b.r_max && a.dt == b.dt;
    }
    CHECK(identical);

    cfg.scheme = Scheme::parametric_curve;
    CHECK_THROWS_AS(run(wulff_radial(euclid(), origin(), 1.0, 64), cfg), Error);
}

TEST_CASE("ellipse run halts on the curvature cap") {
    FlowConfig cfg;
    cfg.scheme = Scheme::parametric_curve;
    cfg.t_end = 8.0;
    cfg.h_cap = 50.0;
    cfg.r_stop = 1e-3;
    cfg.snapshot_every = 100000;
    const RunRecord rec = run(ellipse_parametric(euclid(), origin(), 2.0, 1.0, 128), cfg);
    CHECK(rec.stop == StopReason::h_cap);
    // extinction of the (2,1) ellipse is at area / 2 pi = 1
    CHECK(rec.halt_time() == doctest::Approx(1.0).epsilon(1e-3));
    CHECK(rec.diagnostics.back().area > 0.0);
    CHECK(rec.diagnostics.back().r_min > cfg.r_stop);
    CHECK(rec.diagnostics.back().H_max > 50.0);
    CHECK(rec.diagnostics[rec.diagnostics.size() - 2].H_max <= 50.0);
}

TEST_CASE("synchronized runs share their time grid") {
    FlowConfig cfg;
    cfg.t_end = 0.1;
    cfg.snapshot_every = 50;
    const auto recs = run_synchronized({wulff_radial(randers(), origin(), 0.8, 128),
                                        ellipse_radial(randers(), origin(), 2.0, 1.0, 128),
                                        wulff_radial(randers(), origin(), 2.2, 128)},
                                       cfg);
    REQUIRE(recs.size() == 3);
    for (const auto& r : recs) {
        REQUIRE(r.diagnostics.size() == recs[0].diagnostics.size());
        for (std::size_t k = 0; k < r.diagnostics.size(); ++k) {
            CHECK(r.diagnostics[k].t == recs[0].diagnostics[k].t);
            CHECK(r.diagnostics[k].dt == recs[0].diagnostics[k].dt);
        }
    }
    // The small sphere has the tightest step; its solo run uses the same dt.
    const RunRecord solo = run(wulff_radial(randers(), origin(), 0.8, 128), cfg);
    CHECK(solo.diagnostics[1].dt == recs[0].diagnostics[1].dt);

    // One member collapsing stops everyone.
    cfg.t_end = 1.0;
    const auto stopped =
        run_synchronized({wulff_radial(euclid(), origin(), 0.5, 64), wulff_radial(euclid(), origin(), 2.0, 64)}, cfg);
    CHECK(stopped[0].stop == StopReason::r_stop);
    CHECK(stopped[1].stop == StopReason::r_stop);
    CHECK(stopped[1].halt_time() == stopped[0].halt_time());
}
