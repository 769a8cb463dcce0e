#pragma once

#include "anisoflow/geometry_kernel.hpp"

#include <array>
#include <functional>
#include <memory>
#include <vector>

namespace anisoflow {

enum class Representation { radial_graph, parametric_curve };

std::string_view to_string(Representation rep);

/// Samples of the unit inverse Minkowski sphere {z : F(-z) = 1}.
///
/// Curves use theta_k = 2 pi k / N. Surfaces use a longitude-colatitude grid
/// with colatitudes (j + 1/2) pi / n_phi, so the poles sit half a cell off the
/// grid; index k = j * n_theta + i.
struct DirectionGrid {
    VecN center;
    int n_theta = 0;
    int n_phi = 0;
    std::vector<VecN> directions;
    std::vector<double> rho;  // z_k = rho_k * e_k with e_k the Euclidean unit direction

    int surface_dim() const { return n_phi == 0 ? 1 : 2; }
};

DirectionGrid build_inverse_sphere_grid(const MinkowskiNorm& norm, const VecN& center, int n);
DirectionGrid build_inverse_sphere_grid(const MinkowskiNorm& norm, const VecN& center, int n_theta, int n_phi);

/// A discrete closed hypersurface. Values are immutable once a step has
/// produced them; schemes return new states.
struct SurfaceState {
    Representation rep = Representation::radial_graph;
    std::shared_ptr<const MinkowskiNorm> norm;
    VecN center;
    int n_theta = 0;
    int n_phi = 0;  // 0 for curves
    std::vector<VecN> directions;  // radial_graph only
    std::vector<double> r;         // radial_graph only
    std::vector<VecN> points;      // parametric_curve only
    double t = 0.0;
    long generation = 0;

    int surface_dim() const { return n_phi == 0 ? 1 : 2; }
    int ambient_dim() const { return norm->dim(); }
    int size() const { return n_phi == 0 ? n_theta : n_theta * n_phi; }
    double d_theta() const;
    double d_phi() const;
    VecN position(int k) const;
    std::vector<VecN> positions() const;
};

// Builders. Radial graphs are parametrised over the inverse Minkowski sphere
// of the given norm, X = center + r(z) z.
SurfaceState make_radial_graph(std::shared_ptr<const MinkowskiNorm> norm, const DirectionGrid& grid,
                               std::vector<double> r);
SurfaceState make_radial_graph(std::shared_ptr<const MinkowskiNorm> norm, const DirectionGrid& grid,
                               const std::function<double(const VecN& z)>& radius_along);
SurfaceState make_parametric_curve(std::shared_ptr<const MinkowskiNorm> norm, const VecN& center,
                                   std::vector<VecN> points);

/// The inverse Minkowski sphere {x : F(-(x - center)) = radius}.
SurfaceState wulff_radial(std::shared_ptr<const MinkowskiNorm> norm, const VecN& center, double radius, int n);
SurfaceState wulff_parametric(std::shared_ptr<const MinkowskiNorm> norm, const VecN& center, double radius, int n);
/// Axis-aligned Euclidean ellipse (a circle when a == b), either as a radial
/// graph over the norm's inverse sphere or as a polygon with points at
/// (a cos theta, b sin theta).
SurfaceState ellipse_radial(std::shared_ptr<const MinkowskiNorm> norm, const VecN& center, double a, double b, int n);
SurfaceState ellipse_parametric(std::shared_ptr<const MinkowskiNorm> norm, const VecN& center, double a, double b,
                                int n);
/// Euclidean sphere of the given radius as a radial graph over a lat-long grid.
SurfaceState sphere_radial(std::shared_ptr<const MinkowskiNorm> norm, const VecN& center, double radius, int n_theta,
                           int n_phi);

/// Pointwise extrinsic geometry. Matrices are n x n with n the surface
/// dimension; vectors live in the ambient space.
struct GeometryCache {
    int surface_dim = 1;
    double d_theta = 0.0;
    double d_phi = 0.0;
    double sigma = 1.0;
    std::vector<std::array<VecN, 2>> tangents;  // X_i
    std::vector<std::array<VecN, 3>> second;    // X_11, X_12, X_22
    std::vector<VecN> conormal_raw;             // nu-bar
    std::vector<double> conormal_scale;         // F*(nu-bar)
    std::vector<VecN> conormal;                 // unit conormal nu
    std::vector<VecN> normal;                   // inner unit normal n = L^{-1}(nu)
    std::vector<MatN> g_hat;
    std::vector<MatN> g_hat_inv;
    std::vector<MatN> h;
    std::vector<MatN> shape;      // A = g_hat^{-1} h
    std::vector<VecN> principal;  // ascending eigenvalues of A
    std::vector<MatN> g_bar;      // metric of the direction grid (radial only)
    std::vector<double> H;
    std::vector<double> dmu;

    int size() const { return static_cast<int>(H.size()); }
};

/// Tangents and second derivatives come from 4th-order periodic central
/// differences of the embedding; the anisotropic mean curvature is the
/// trace g_hat^{ij} h_ij with h_ij = nu(X_ij), so no connection on the surface
/// is ever needed. The area density carries the constant volume factor sigma.
GeometryCache compute_geometry(const SurfaceState& state, double sigma = 1.0);

struct ConvexityReport {
    double k_min = 0.0;
    double k_max = 0.0;
    double theta_min = 0.0;  // min over points and directions of h(v,v)/g_hat(v,v)
};
ConvexityReport convexity_monitor(const GeometryCache& cache);

double area(const GeometryCache& cache);

struct RadialExtremes {
    double r_min = 0.0;
    double r_max = 0.0;
};
RadialExtremes radial_extremes(const SurfaceState& state);

/// F(-(X_k - center)) for every vertex; equals r for radial graphs.
std::vector<double> radial_function(const SurfaceState& state);

/// vol(Euclidean unit ball) / vol({F < 1}) by quadrature over directions.
double busemann_hausdorff_sigma(const MinkowskiNorm& norm, int samples = 4096);

/// Signed Euclidean area enclosed by a closed polygon (positive if ccw).
double signed_polygon_area(const std::vector<VecN>& points);

}  // namespace anisoflow
