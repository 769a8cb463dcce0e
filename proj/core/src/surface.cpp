#include "anisoflow/surface.hpp"

#include "small_linalg.hpp"
#include "stencils.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <limits>
#include <numbers>

namespace anisoflow {

std::string_view to_string(Representation rep) {
    switch (rep) {
        case Representation::radial_graph: return "radial_graph";
        case Representation::parametric_curve: return "parametric_curve";
    }
    return "unknown";
}

namespace {

constexpr double kPi = std::numbers::pi;

VecN unit_direction(double theta) {
    VecN e(2);
    e << std::cos(theta), std::sin(theta);
    return e;
}

VecN unit_direction(double theta, double phi) {
    VecN e(3);
    e << std::sin(phi) * std::cos(theta), std::sin(phi) * std::sin(theta), std::cos(phi);
    return e;
}

VecN perp(const VecN& v) {
    VecN p(2);
    p << -v[1], v[0];
    return p;
}

VecN cross(const VecN& a, const VecN& b) {
    VecN c(3);
    c << a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0];
    return c;
}

void check_center(const MinkowskiNorm& norm, const VecN& center) {
    if (center.size() != norm.dim()) {
        throw Error(ErrorKind::InvalidParams, "center dimension does not match the norm");
    }
}

// First and second parameter derivatives of a per-vertex field.
template <class T>
struct Derivatives {
    std::vector<std::array<T, 2>> first;
    std::vector<std::array<T, 3>> second;
};

template <class T>
Derivatives<T> differentiate(const std::vector<T>& f, int n_theta, int n_phi, double dth, double dph) {
    using namespace stencil;
    const int count = static_cast<int>(f.size());
    Derivatives<T> d;
    d.first.resize(count);
    d.second.resize(count);
    if (n_phi == 0) {
        const int n = n_theta;
        for (int k = 0; k < n; ++k) {
            const T& fm2 = f[wrap(k - 2, n)];
            const T& fm1 = f[wrap(k - 1, n)];
            const T& fp1 = f[wrap(k + 1, n)];
            const T& fp2 = f[wrap(k + 2, n)];
            d.first[k][0] = first(fm2, fm1, fp1, fp2, dth);
            d.second[k][0] = second(fm2, fm1, f[k], fp1, fp2, dth);
        }
        return d;
    }
    const LatLong grid{n_theta, n_phi};
    std::vector<T> f_phi(count);
    for (int j = 0; j < n_phi; ++j)
        for (int i = 0; i < n_theta; ++i) {
            const int k = grid.index(i, j);
            const T& tm2 = f[grid.index(i - 2, j)];
            const T& tm1 = f[grid.index(i - 1, j)];
            const T& tp1 = f[grid.index(i + 1, j)];
            const T& tp2 = f[grid.index(i + 2, j)];
            const T& pm2 = f[grid.index(i, j - 2)];
            const T& pm1 = f[grid.index(i, j - 1)];
            const T& pp1 = f[grid.index(i, j + 1)];
            const T& pp2 = f[grid.index(i, j + 2)];
            d.first[k][0] = first(tm2, tm1, tp1, tp2, dth);
            d.first[k][1] = first(pm2, pm1, pp1, pp2, dph);
            d.second[k][0] = second(tm2, tm1, f[k], tp1, tp2, dth);
            d.second[k][2] = second(pm2, pm1, f[k], pp1, pp2, dph);
            f_phi[k] = d.first[k][1];
        }
    // mixed derivative: theta-derivative of the phi-derivative, same row
    for (int j = 0; j < n_phi; ++j)
        for (int i = 0; i < n_theta; ++i) {
            const int k = grid.index(i, j);
            d.second[k][1] = first(f_phi[grid.index(i - 2, j)], f_phi[grid.index(i - 1, j)],
                                   f_phi[grid.index(i + 1, j)], f_phi[grid.index(i + 2, j)], dth);
        }
    return d;
}

}  // namespace

DirectionGrid build_inverse_sphere_grid(const MinkowskiNorm& norm, const VecN& center, int n) {
    if (norm.dim() != 2) throw Error(ErrorKind::InvalidParams, "curve grids need a 2-dimensional norm");
    if (n < 16) throw Error(ErrorKind::InvalidParams, "direction grid needs N >= 16");
    check_center(norm, center);
    DirectionGrid grid;
    grid.center = center;
    grid.n_theta = n;
    grid.directions.reserve(n);
    grid.rho.reserve(n);
    for (int k = 0; k < n; ++k) {
        const VecN e = unit_direction(2.0 * kPi * k / n);
        const double rho = 1.0 / norm.eval(Vector(-e));
        grid.rho.push_back(rho);
        grid.directions.push_back(rho * e);
    }
    return grid;
}

DirectionGrid build_inverse_sphere_grid(const MinkowskiNorm& norm, const VecN& center, int n_theta, int n_phi) {
    if (norm.dim() != 3) throw Error(ErrorKind::InvalidParams, "surface grids need a 3-dimensional norm");
    if (n_theta < 16 || n_phi < 8 || n_theta % 2 != 0) {
        throw Error(ErrorKind::InvalidParams, "lat-long grid needs even n_theta >= 16 and n_phi >= 8");
    }
    check_center(norm, center);
    DirectionGrid grid;
    grid.center = center;
    grid.n_theta = n_theta;
    grid.n_phi = n_phi;
    grid.directions.reserve(n_theta * n_phi);
    for (int j = 0; j < n_phi; ++j) {
        const double phi = (j + 0.5) * kPi / n_phi;
        for (int i = 0; i < n_theta; ++i) {
            const VecN e = unit_direction(2.0 * kPi * i / n_theta, phi);
            const double rho = 1.0 / norm.eval(Vector(-e));
            grid.rho.push_back(rho);
            grid.directions.push_back(rho * e);
        }
    }
    return grid;
}

double SurfaceState::d_theta() const { return 2.0 * kPi / n_theta; }
double SurfaceState::d_phi() const { return n_phi == 0 ? 0.0 : kPi / n_phi; }

VecN SurfaceState::position(int k) const {
    if (rep == Representation::radial_graph) return center + r[k] * directions[k];
    return points[k];
}

std::vector<VecN> SurfaceState::positions() const {
    std::vector<VecN> out;
    out.reserve(size());
    for (int k = 0; k < size(); ++k) out.push_back(position(k));
    return out;
}

SurfaceState make_radial_graph(std::shared_ptr<const MinkowskiNorm> norm, const DirectionGrid& grid,
                               std::vector<double> r) {
    if (static_cast<int>(r.size()) != static_cast<int>(grid.directions.size())) {
        throw Error(ErrorKind::InvalidParams, "radial values do not match the direction grid");
    }
    for (double v : r) {
        if (!(v > 0.0) || !std::isfinite(v)) throw Error(ErrorKind::InvalidParams, "radial values must be positive");
    }
    SurfaceState s;
    s.rep = Representation::radial_graph;
    s.norm = std::move(norm);
    s.center = grid.center;
    s.n_theta = grid.n_theta;
    s.n_phi = grid.n_phi;
    s.directions = grid.directions;
    s.r = std::move(r);
    return s;
}

SurfaceState make_radial_graph(std::shared_ptr<const MinkowskiNorm> norm, const DirectionGrid& grid,
                               const std::function<double(const VecN& z)>& radius_along) {
    std::vector<double> r;
    r.reserve(grid.directions.size());
    for (const VecN& z : grid.directions) r.push_back(radius_along(z));
    return make_radial_graph(std::move(norm), grid, std::move(r));
}

SurfaceState make_parametric_curve(std::shared_ptr<const MinkowskiNorm> norm, const VecN& center,
                                   std::vector<VecN> points) {
    if (norm->dim() != 2) throw Error(ErrorKind::InvalidParams, "parametric curves live in the plane");
    check_center(*norm, center);
    if (points.size() < 16) throw Error(ErrorKind::InvalidParams, "parametric curve needs at least 16 points");
    const int n = static_cast<int>(points.size());
    for (int k = 0; k < n; ++k) {
        if (points[k].size() != 2) throw Error(ErrorKind::InvalidParams, "points must be 2-dimensional");
        if ((points[(k + 1) % n] - points[k]).norm() <= 1e-10) {
            throw Error(ErrorKind::MeshDegenerate, "edge shorter than 1e-10");
        }
    }
    SurfaceState s;
    s.rep = Representation::parametric_curve;
    s.norm = std::move(norm);
    s.center = center;
    s.n_theta = n;
    s.points = std::move(points);
    return s;
}

SurfaceState wulff_radial(std::shared_ptr<const MinkowskiNorm> norm, const VecN& center, double radius, int n) {
    const DirectionGrid grid = build_inverse_sphere_grid(*norm, center, n);
    return make_radial_graph(std::move(norm), grid, std::vector<double>(n, radius));
}

SurfaceState wulff_parametric(std::shared_ptr<const MinkowskiNorm> norm, const VecN& center, double radius, int n) {
    const DirectionGrid grid = build_inverse_sphere_grid(*norm, center, n);
    std::vector<VecN> pts;
    pts.reserve(n);
    for (const VecN& z : grid.directions) pts.push_back(center + radius * z);
    return make_parametric_curve(std::move(norm), center, std::move(pts));
}

SurfaceState ellipse_radial(std::shared_ptr<const MinkowskiNorm> norm, const VecN& center, double a, double b, int n) {
    if (!(a > 0 && b > 0)) throw Error(ErrorKind::InvalidParams, "semi-axes must be positive");
    const DirectionGrid grid = build_inverse_sphere_grid(*norm, center, n);
    return make_radial_graph(std::move(norm), grid, [a, b](const VecN& z) {
        return 1.0 / std::sqrt((z[0] / a) * (z[0] / a) + (z[1] / b) * (z[1] / b));
    });
}

SurfaceState ellipse_parametric(std::shared_ptr<const MinkowskiNorm> norm, const VecN& center, double a, double b,
                                int n) {
    if (!(a > 0 && b > 0)) throw Error(ErrorKind::InvalidParams, "semi-axes must be positive");
    std::vector<VecN> pts;
    pts.reserve(n);
    for (int k = 0; k < n; ++k) {
        const double th = 2.0 * kPi * k / n;
        VecN p(2);
        p << center[0] + a * std::cos(th), center[1] + b * std::sin(th);
        pts.push_back(p);
    }
    return make_parametric_curve(std::move(norm), center, std::move(pts));
}

SurfaceState sphere_radial(std::shared_ptr<const MinkowskiNorm> norm, const VecN& center, double radius, int n_theta,
                           int n_phi) {
    const DirectionGrid grid = build_inverse_sphere_grid(*norm, center, n_theta, n_phi);
    return make_radial_graph(std::move(norm), grid, [radius](const VecN& z) { return radius / z.norm(); });
}

double signed_polygon_area(const std::vector<VecN>& pts) {
    double acc = 0.0;
    const std::size_t n = pts.size();
    for (std::size_t k = 0; k < n; ++k) {
        const VecN& p = pts[k];
        const VecN& q = pts[(k + 1) % n];
        acc += p[0] * q[1] - q[0] * p[1];
    }
    return 0.5 * acc;
}

GeometryCache compute_geometry(const SurfaceState& state, double sigma) {
    const MinkowskiNorm& norm = *state.norm;
    const int count = state.size();
    const int sdim = state.surface_dim();
    const double dth = state.d_theta();
    const double dph = state.d_phi();

    GeometryCache c;
    c.surface_dim = sdim;
    c.d_theta = dth;
    c.d_phi = dph;
    c.sigma = sigma;

    const std::vector<VecN> X = state.positions();
    const Derivatives<VecN> dX = differentiate(X, state.n_theta, state.n_phi, dth, dph);
    c.tangents = dX.first;
    c.second = dX.second;

    double orientation = 1.0;
    if (state.rep == Representation::parametric_curve) {
        orientation = signed_polygon_area(X) >= 0.0 ? 1.0 : -1.0;
    }

    const bool radial = state.rep == Representation::radial_graph;
    Derivatives<VecN> dz;
    if (radial) {
        dz = differentiate(state.directions, state.n_theta, state.n_phi, dth, dph);
        c.g_bar.resize(count);
    }

    c.conormal_raw.resize(count);
    c.conormal_scale.resize(count);
    c.conormal.resize(count);
    c.normal.resize(count);
    c.g_hat.resize(count);
    c.g_hat_inv.resize(count);
    c.h.resize(count);
    c.shape.resize(count);
    c.principal.resize(count);
    c.H.resize(count);
    c.dmu.resize(count);

    for (int k = 0; k < count; ++k) {
        const auto& T = c.tangents[k];
        // Any covector annihilating the tangents; scale fixed below.
        const VecN annihilator = sdim == 1 ? perp(T[0]) : cross(T[0], T[1]);

        VecN nu_bar;
        if (radial) {
            // nu-bar(z) = -r, the normalisation carried by
            // nu-bar = g(-z)(-r z + r^i z_i); it also selects the inward side.
            const VecN& z = state.directions[k];
            const double cz = annihilator.dot(z);
            if (std::abs(cz) < 1e-300) throw Error(ErrorKind::DegenerateMetric, "surface is tangent to a ray");
            nu_bar = (-state.r[k] / cz) * annihilator;

            MatN gb(sdim, sdim);
            const MatN gz = norm.fundamental_tensor(Vector(-z)).g;
            for (int i = 0; i < sdim; ++i)
                for (int j = 0; j < sdim; ++j) gb(i, j) = dz.first[k][i].dot(gz * dz.first[k][j]);
            c.g_bar[k] = gb;
        } else {
            const double len = annihilator.norm();
            if (!(len > 1e-12 * X[k].norm() + 1e-300)) {
                throw Error(ErrorKind::DegenerateMetric, "tangent vanishes");
            }
            nu_bar = orientation * annihilator / len;
        }

        const Vector y = norm.legendre_inv(Covector(nu_bar));
        const double dual = norm.eval(y);  // F*(nu-bar) = F(L^{-1}(nu-bar))
        const VecN nu = nu_bar / dual;
        const VecN n = y.components() / dual;

        c.conormal_raw[k] = nu_bar;
        c.conormal_scale[k] = dual;
        c.conormal[k] = nu;
        c.normal[k] = n;

        const MatN gn = norm.fundamental_tensor(Vector(n)).g;
        MatN gh(sdim, sdim), hh(sdim, sdim);
        for (int i = 0; i < sdim; ++i)
            for (int j = 0; j < sdim; ++j) gh(i, j) = T[i].dot(gn * T[j]);
        const auto& S = c.second[k];
        if (sdim == 1) {
            hh(0, 0) = nu.dot(S[0]);
        } else {
            hh(0, 0) = nu.dot(S[0]);
            hh(0, 1) = hh(1, 0) = nu.dot(S[1]);
            hh(1, 1) = nu.dot(S[2]);
        }

        const double det = detail::det_small(gh);
        double scale = 1.0;
        for (int i = 0; i < sdim; ++i) scale *= T[i].squaredNorm() * gn.norm();
        if (!(det > 1e-14 * scale) || !std::isfinite(det)) {
            throw Error(ErrorKind::DegenerateMetric, "induced metric is numerically singular");
        }
        const MatN gi = detail::inverse_small(gh);
        c.g_hat[k] = gh;
        c.g_hat_inv[k] = gi;
        c.h[k] = hh;
        c.shape[k] = gi * hh;
        c.H[k] = c.shape[k].trace();

        if (sdim == 1) {
            VecN kk(1);
            kk[0] = c.shape[k](0, 0);
            c.principal[k] = kk;
        } else {
            Eigen::GeneralizedSelfAdjointEigenSolver<MatN> es(hh, gh);
            c.principal[k] = es.eigenvalues();
        }

        MatN frame(norm.dim(), norm.dim());
        frame.col(0) = n;
        for (int i = 0; i < sdim; ++i) frame.col(i + 1) = T[i];
        c.dmu[k] = sigma * std::abs(detail::det_small(frame));
    }
    return c;
}

ConvexityReport convexity_monitor(const GeometryCache& cache) {
    ConvexityReport r;
    r.k_min = std::numeric_limits<double>::infinity();
    r.k_max = -std::numeric_limits<double>::infinity();
    for (const VecN& k : cache.principal) {
        r.k_min = std::min(r.k_min, k.minCoeff());
        r.k_max = std::max(r.k_max, k.maxCoeff());
    }
    // A is g_hat-self-adjoint, so min_v h(v,v)/g_hat(v,v) is its smallest eigenvalue.
    r.theta_min = r.k_min;
    return r;
}

double area(const GeometryCache& cache) {
    double acc = 0.0;
    for (double d : cache.dmu) acc += d;
    const double cell = cache.surface_dim == 1 ? cache.d_theta : cache.d_theta * cache.d_phi;
    return acc * cell;
}

std::vector<double> radial_function(const SurfaceState& state) {
    if (state.rep == Representation::radial_graph) return state.r;
    std::vector<double> out;
    out.reserve(state.size());
    for (const VecN& p : state.points) out.push_back(state.norm->eval(Vector(-(p - state.center))));
    return out;
}

RadialExtremes radial_extremes(const SurfaceState& state) {
    const std::vector<double> r = radial_function(state);
    const auto [lo, hi] = std::minmax_element(r.begin(), r.end());
    return {*lo, *hi};
}

double busemann_hausdorff_sigma(const MinkowskiNorm& norm, int samples) {
    if (norm.dim() == 2) {
        double acc = 0.0;
        for (int k = 0; k < samples; ++k) {
            const double f = norm.eval(Vector(unit_direction(2.0 * kPi * k / samples)));
            acc += 1.0 / (f * f);
        }
        const double vol = 0.5 * acc * (2.0 * kPi / samples);
        return kPi / vol;
    }
    const int n_phi = std::max(16, static_cast<int>(std::sqrt(samples / 2.0)));
    const int n_theta = 2 * n_phi;
    double acc = 0.0;
    for (int j = 0; j < n_phi; ++j) {
        const double phi = (j + 0.5) * kPi / n_phi;
        for (int i = 0; i < n_theta; ++i) {
            const double f = norm.eval(Vector(unit_direction(2.0 * kPi * i / n_theta, phi)));
            acc += std::sin(phi) / (f * f * f);
        }
    }
    const double vol = acc * (2.0 * kPi / n_theta) * (kPi / n_phi) / 3.0;
    return (4.0 * kPi / 3.0) / vol;
}

}  // namespace anisoflow
