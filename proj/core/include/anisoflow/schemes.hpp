#pragma once

#include "anisoflow/surface.hpp"

#include <limits>
#include <optional>
#include <string>

namespace anisoflow {

enum class Scheme { radial_graph, parametric_curve, level_set };
std::string_view to_string(Scheme s);
Scheme scheme_from_string(std::string_view name);

enum class StopReason { t_end, r_stop, h_cap, error };
std::string_view to_string(StopReason s);

struct LevelSetParams {
    double dx = 0.0125;
    double margin = 0.4;  // box padding around the initial curve
    int reinit_every = 20;
    int reinit_iterations = 5;
    int rays = 360;

    bool operator==(const LevelSetParams&) const = default;
};

struct FlowConfig {
    Scheme scheme = Scheme::radial_graph;
    double cfl = 0.2;
    double t_end = 1.0;
    double r_stop = 0.05;
    double h_cap = 1e4;  // stop once max |H| exceeds this
    int snapshot_every = 100;
    bool tangential_redistribution = true;
    std::optional<double> fixed_dt;  // bypasses the adaptive law
    LevelSetParams level_set;

    /// Throws SchemaViolation naming the offending flow.* key.
    void validate() const;

    bool operator==(const FlowConfig&) const = default;
};

// -- curve schemes -----------------------------------------------------------

/// dt = cfl s^2 / (1 + max|H| s) with s the smallest spatial scale, clamped to
/// [1e-10, remaining].
double adaptive_dt(const SurfaceState& state, const GeometryCache& cache, double cfl,
                   double remaining = std::numeric_limits<double>::infinity());

/// r <- r + dt (-F*(nu-bar)/r) H. Throws Collapse if some r_k <= r_stop.
SurfaceState step_radial(const SurfaceState& state, const GeometryCache& cache, double dt, double r_stop = 0.0);
SurfaceState step_radial(const SurfaceState& state, double dt, double r_stop = 0.0);

/// X <- X + dt H n, optionally followed by resampling at uniform chord length
/// on a periodic cubic spline (vertex 0 stays put). Throws MeshDegenerate on
/// tiny edges or edge ratios above 100.
SurfaceState step_parametric(const SurfaceState& state, const GeometryCache& cache, double dt, bool redistribute);
SurfaceState step_parametric(const SurfaceState& state, double dt, bool redistribute);

/// Uniform chord-length resampling of a closed polygon.
std::vector<VecN> redistribute_points(const std::vector<VecN>& points);

/// Symmetric Hausdorff distance between two closed curves, each read as the
/// periodic cubic spline through its vertices.
double curve_hausdorff(const std::vector<VecN>& a, const std::vector<VecN>& b);

// -- level set ---------------------------------------------------------------

/// Nodal values f on a uniform box grid, f < 0 inside the curve.
struct LevelSetGrid {
    std::shared_ptr<const MinkowskiNorm> norm;
    VecN lo;  // lower-left node
    double dx = 0.0;
    int nx = 0;
    int ny = 0;
    std::vector<double> f;  // index j * nx + i
    VecN center;            // reference point for radial diagnostics
    LevelSetParams params;
    double t = 0.0;
    long generation = 0;
    // Last L^{-1}(du) per node, used to warm-start the Legendre inversion
    // (empty for the euclidean norm).
    std::vector<VecN> gradient_hint;

    int index(int i, int j) const { return j * nx + i; }
    VecN node(int i, int j) const;
};

LevelSetGrid make_levelset_grid(std::shared_ptr<const MinkowskiNorm> norm, const VecN& lo, const VecN& hi,
                                double dx, const std::function<double(const VecN&)>& f, const VecN& center,
                                LevelSetParams params = {});
/// Signed Euclidean distance to the polygon of a curve state.
LevelSetGrid levelset_from_surface(const SurfaceState& state, LevelSetParams params = {});

/// Explicit Euler step of the level-set equation, with periodic signed
/// distance reinitialization. Throws GradientDegenerate.
LevelSetGrid step_levelset(const LevelSetGrid& grid, double dt);

/// Anisotropic mean curvature of the level sets at every node (NaN where the
/// gradient vanishes or the stencil leaves the grid).
std::vector<double> levelset_curvature(const LevelSetGrid& grid);

/// Russo-Smereka signed-distance relaxation (Euclidean).
void reinitialize(LevelSetGrid& grid, int iterations);

struct ZeroSet {
    std::vector<std::array<VecN, 2>> segments;  // oriented with the inside on the left
    VecN centroid;
    std::vector<VecN> ray_points;   // one per ray from the centroid, ccw
    std::vector<double> ray_radii;  // Euclidean distances to the centroid
};
ZeroSet extract_zero_set(const LevelSetGrid& grid, int rays = 360);

// -- runs --------------------------------------------------------------------

struct DiagnosticsRow {
    double t = 0.0;
    double area = 0.0;
    double H_min = 0.0;
    double H_max = 0.0;
    double k_min = 0.0;
    double r_min = 0.0;
    double r_max = 0.0;
    double dt = 0.0;
};

struct Snapshot {
    double t = 0.0;
    long step = 0;
    std::string rep;            // radial_graph, parametric_curve or level_set
    std::vector<double> r;      // radial graphs
    std::vector<VecN> points;   // parametric curves and level-set zero sets
    std::vector<double> H;
    std::vector<double> dmu;    // curve schemes
    double k_min = 0.0;
    double area = 0.0;
    double h2_integral = 0.0;   // integral of H^2 against the area measure
    std::optional<SurfaceState> state;
};

struct RunRecord {
    FlowConfig config;
    std::vector<DiagnosticsRow> diagnostics;
    std::vector<Snapshot> snapshots;
    StopReason stop = StopReason::t_end;
    std::optional<ErrorKind> error_kind;
    std::string message;
    long steps = 0;
    std::optional<SurfaceState> final_state;
    std::optional<LevelSetGrid> final_grid;

    double halt_time() const { return diagnostics.empty() ? 0.0 : diagnostics.back().t; }
};

/// Runs the configured scheme from a curve state. Scheme errors end the run
/// with StopReason::error and leave the last valid state in the record.
RunRecord run(const SurfaceState& initial, const FlowConfig& config);
RunRecord run(const LevelSetGrid& initial, const FlowConfig& config);

/// Curve runs advanced in lockstep with the smallest admissible dt, so all
/// records share their time grid. The first member to stop stops everyone and
/// its reason is copied to every record.
std::vector<RunRecord> run_synchronized(const std::vector<SurfaceState>& initials, const FlowConfig& config);

}  // namespace anisoflow
