#include "anisoflow/schemes.hpp"

#include "levelset_internal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace anisoflow {

namespace {

constexpr double kBandCells = 6.0;
constexpr double kCheckBandCells = 4.0;

VecN vec2(double x, double y) {
    VecN v(2);
    v << x, y;
    return v;
}

double point_segment_distance(const VecN& p, const VecN& a, const VecN& b) {
    const VecN ab = b - a;
    const double t = std::clamp((p - a).dot(ab) / ab.squaredNorm(), 0.0, 1.0);
    return (a + t * ab - p).norm();
}

bool inside_polygon(const VecN& p, const std::vector<VecN>& poly) {
    bool in = false;
    const std::size_t n = poly.size();
    for (std::size_t k = 0, j = n - 1; k < n; j = k++) {
        const VecN& a = poly[k];
        const VecN& b = poly[j];
        if ((a[1] > p[1]) != (b[1] > p[1]) && p[0] < (b[0] - a[0]) * (p[1] - a[1]) / (b[1] - a[1]) + a[0]) in = !in;
    }
    return in;
}

void check_margin(const LevelSetGrid& g) {
    // No interior node within five cells of the box boundary.
    constexpr int kMargin = 5;
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            const bool near = i < kMargin || j < kMargin || i >= g.nx - kMargin || j >= g.ny - kMargin;
            if (near && g.f[g.index(i, j)] <= 0.0) {
                throw Error(ErrorKind::InvalidParams, "zero level set is closer than 5 cells to the grid boundary");
            }
        }
}

double min_gradient_in_band(const LevelSetGrid& g) {
    const double band = kCheckBandCells * g.dx;
    double m = std::numeric_limits<double>::infinity();
    for (int j = 1; j < g.ny - 1; ++j)
        for (int i = 1; i < g.nx - 1; ++i) {
            const int k = g.index(i, j);
            if (std::abs(g.f[k]) > band) continue;
            const double gx = (g.f[k + 1] - g.f[k - 1]) / (2 * g.dx);
            const double gy = (g.f[k + g.nx] - g.f[k - g.nx]) / (2 * g.dx);
            m = std::min(m, std::hypot(gx, gy));
        }
    return m;
}

}  // namespace

VecN LevelSetGrid::node(int i, int j) const { return vec2(lo[0] + i * dx, lo[1] + j * dx); }

LevelSetGrid make_levelset_grid(std::shared_ptr<const MinkowskiNorm> norm, const VecN& lo, const VecN& hi, double dx,
                                const std::function<double(const VecN&)>& f, const VecN& center,
                                LevelSetParams params) {
    if (norm->dim() != 2) throw Error(ErrorKind::InvalidParams, "level sets need a 2-dimensional norm");
    if (lo.size() != 2 || hi.size() != 2 || center.size() != 2) {
        throw Error(ErrorKind::InvalidParams, "level-set box and center must be 2-dimensional");
    }
    if (!(dx > 0.0)) throw Error(ErrorKind::InvalidParams, "dx must be positive");
    LevelSetGrid g;
    g.norm = std::move(norm);
    g.lo = lo;
    g.dx = dx;
    g.nx = static_cast<int>(std::floor((hi[0] - lo[0]) / dx + 1e-9)) + 1;
    g.ny = static_cast<int>(std::floor((hi[1] - lo[1]) / dx + 1e-9)) + 1;
    if (g.nx < 12 || g.ny < 12) throw Error(ErrorKind::InvalidParams, "level-set box is too small");
    g.center = center;
    params.dx = dx;
    g.params = params;
    g.f.resize(static_cast<std::size_t>(g.nx) * g.ny);
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) g.f[g.index(i, j)] = f(g.node(i, j));
    check_margin(g);
    return g;
}

LevelSetGrid levelset_from_surface(const SurfaceState& state, LevelSetParams params) {
    if (state.surface_dim() != 1) throw Error(ErrorKind::InvalidParams, "level sets represent curves only");
    const std::vector<VecN> poly = state.positions();
    VecN lo = poly[0], hi = poly[0];
    for (const VecN& p : poly) {
        lo = lo.cwiseMin(p);
        hi = hi.cwiseMax(p);
    }
    const double pad = std::max(params.margin, 6.0 * params.dx);
    lo.array() -= pad;
    hi.array() += pad;
    // Snap the box so that the reference center sits on a node.
    const VecN& c = state.center;
    for (int a = 0; a < 2; ++a) {
        lo[a] = c[a] - std::ceil((c[a] - lo[a]) / params.dx) * params.dx;
        hi[a] = c[a] + std::ceil((hi[a] - c[a]) / params.dx) * params.dx;
    }
    const std::size_t n = poly.size();
    auto sdf = [&](const VecN& x) {
        double d = std::numeric_limits<double>::infinity();
        for (std::size_t k = 0; k < n; ++k) d = std::min(d, point_segment_distance(x, poly[k], poly[(k + 1) % n]));
        return inside_polygon(x, poly) ? -d : d;
    };
    return make_levelset_grid(state.norm, lo, hi, params.dx, sdf, state.center, params);
}

namespace detail {

LevelSetRates levelset_rates(const LevelSetGrid& g, double band_cells) {
    const int nx = g.nx, ny = g.ny;
    const std::size_t count = g.f.size();
    const double dx = g.dx;
    const double band = band_cells * dx;
    const bool euclidean = g.norm->family() == NormFamily::euclidean;

    LevelSetRates out;
    out.rate.assign(count, std::numeric_limits<double>::quiet_NaN());
    out.speed.assign(count, std::numeric_limits<double>::quiet_NaN());
    if (!euclidean) {
        out.hint = g.gradient_hint;
        out.hint.resize(count);
    }

    // Scratch reused across steps; only entries of needed nodes are read.
    thread_local std::vector<double> vx, vy, ux, uy;
    thread_local std::vector<char> need, flat;
    thread_local std::vector<int> active, needed;
    vx.resize(count);
    vy.resize(count);
    ux.resize(count);
    uy.resize(count);
    flat.resize(count);
    need.assign(count, 0);
    active.clear();
    needed.clear();
    for (int j = 2; j < ny - 2; ++j)
        for (int i = 2; i < nx - 2; ++i) {
            const int k = g.index(i, j);
            if (std::abs(g.f[k]) > band) continue;
            active.push_back(k);
            for (int m : {k, k - 1, k + 1, k - nx, k + nx}) {
                if (!need[m]) needed.push_back(m);
                need[m] = 1;
            }
        }

    // V = L^{-1}(du) for u = -f, which is positive inside.
    for (int k : needed) {
        const double gx = -(g.f[k + 1] - g.f[k - 1]) / (2 * dx);
        const double gy = -(g.f[k + nx] - g.f[k - nx]) / (2 * dx);
        ux[k] = gx;
        uy[k] = gy;
        flat[k] = std::hypot(gx, gy) < 1e-8;
        if (flat[k]) {
            vx[k] = vy[k] = 0.0;
        } else if (euclidean) {
            vx[k] = gx;
            vy[k] = gy;
        } else {
            const Vector V = g.norm->legendre_inv(Covector(vec2(gx, gy)), Vector(out.hint[k]));
            vx[k] = V.components()[0];
            vy[k] = V.components()[1];
            out.hint[k] = V.components();
        }
    }

    for (int k : active) {
        const double div = (vx[k + 1] - vx[k - 1] + vy[k + nx] - vy[k - nx]) / (2 * dx);
        if (flat[k]) {
            out.rate[k] = div;
            continue;
        }
        // V^k d_k V
        const double dVx_dx = (vx[k + 1] - vx[k - 1]) / (2 * dx);
        const double dVy_dx = (vy[k + 1] - vy[k - 1]) / (2 * dx);
        const double dVx_dy = (vx[k + nx] - vx[k - nx]) / (2 * dx);
        const double dVy_dy = (vy[k + nx] - vy[k - nx]) / (2 * dx);
        const double wx = vx[k] * dVx_dx + vy[k] * dVx_dy;
        const double wy = vx[k] * dVy_dx + vy[k] * dVy_dy;
        const double duV = ux[k] * vx[k] + uy[k] * vy[k];  // F(V)^2
        out.rate[k] = div - (ux[k] * wx + uy[k] * wy) / duV;
        out.speed[k] = std::sqrt(duV);
    }
    return out;
}

LevelSetGrid levelset_advance(const LevelSetGrid& g, LevelSetRates rates, double dt) {
    if (!(dt > 0.0) || dt > 0.5 * g.dx * g.dx * (1.0 + 1e-12)) {
        throw Error(ErrorKind::InvalidParams, "level-set step needs 0 < dt <= 0.5 dx^2");
    }
    LevelSetGrid next;
    next.norm = g.norm;
    next.lo = g.lo;
    next.dx = g.dx;
    next.nx = g.nx;
    next.ny = g.ny;
    next.center = g.center;
    next.params = g.params;
    next.f = g.f;
    for (std::size_t k = 0; k < g.f.size(); ++k) {
        if (!std::isnan(rates.rate[k])) next.f[k] = g.f[k] - dt * rates.rate[k];
    }
    next.gradient_hint = std::move(rates.hint);
    next.t = g.t + dt;
    next.generation = g.generation + 1;

    bool reinit = next.params.reinit_iterations > 0 && next.generation % next.params.reinit_every == 0;
    if (!reinit && min_gradient_in_band(next) < 0.5) reinit = true;
    if (reinit) {
        reinitialize(next, std::max(1, next.params.reinit_iterations));
        if (min_gradient_in_band(next) < 0.1) {
            throw Error(ErrorKind::GradientDegenerate, "level-set gradient below 0.1 near the zero set");
        }
    }
    return next;
}

double interpolate(const LevelSetGrid& g, const std::vector<double>& field, const VecN& p) {
    const double sx = (p[0] - g.lo[0]) / g.dx;
    const double sy = (p[1] - g.lo[1]) / g.dx;
    const int i = std::clamp(static_cast<int>(std::floor(sx)), 0, g.nx - 2);
    const int j = std::clamp(static_cast<int>(std::floor(sy)), 0, g.ny - 2);
    const double a = sx - i, b = sy - j;
    const double w[4] = {(1 - a) * (1 - b), a * (1 - b), (1 - a) * b, a * b};
    const int k[4] = {g.index(i, j), g.index(i + 1, j), g.index(i, j + 1), g.index(i + 1, j + 1)};
    double acc = 0.0, wsum = 0.0;
    for (int m = 0; m < 4; ++m) {
        if (std::isnan(field[k[m]])) continue;
        acc += w[m] * field[k[m]];
        wsum += w[m];
    }
    if (wsum <= 0.0) return std::numeric_limits<double>::quiet_NaN();
    return acc / wsum;
}

}  // namespace detail

LevelSetGrid step_levelset(const LevelSetGrid& grid, double dt) {
    return detail::levelset_advance(grid, detail::levelset_rates(grid, kBandCells), dt);
}

std::vector<double> levelset_curvature(const LevelSetGrid& grid) {
    const detail::LevelSetRates r = detail::levelset_rates(grid, kBandCells);
    std::vector<double> H(r.rate.size(), std::numeric_limits<double>::quiet_NaN());
    for (std::size_t k = 0; k < H.size(); ++k) {
        if (r.speed[k] > 0.0) H[k] = -r.rate[k] / r.speed[k];
    }
    return H;
}

void reinitialize(LevelSetGrid& g, int iterations) {
    const int nx = g.nx, ny = g.ny;
    const double dx = g.dx;
    const double dtau = 0.5 * dx;
    const std::vector<double> f0 = g.f;
    const std::size_t count = f0.size();

    auto at = [&](const std::vector<double>& f, int i, int j) {
        return f[g.index(std::clamp(i, 0, nx - 1), std::clamp(j, 0, ny - 1))];
    };
    auto sgn = [](double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); };

    // Subcell distance estimates next to the interface keep it from drifting.
    std::vector<double> D(count, std::numeric_limits<double>::quiet_NaN());
    std::vector<int> nodes;
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i) {
            const int k = g.index(i, j);
            nodes.push_back(k);
            const double c = f0[k];
            const double l = at(f0, i - 1, j), r = at(f0, i + 1, j), b = at(f0, i, j - 1), t = at(f0, i, j + 1);
            if (c * l > 0 && c * r > 0 && c * b > 0 && c * t > 0) continue;
            const double gx = std::max({std::abs(r - l) / 2, std::abs(r - c), std::abs(c - l), 1e-12});
            const double gy = std::max({std::abs(t - b) / 2, std::abs(t - c), std::abs(c - b), 1e-12});
            D[k] = dx * c / std::hypot(gx, gy);
        }

    std::vector<double> next = g.f;
    for (int it = 0; it < iterations; ++it) {
        for (int k : nodes) {
            const int i = k % nx, j = k / nx;
            const double s = sgn(f0[k]);
            const double c = g.f[k];
            if (!std::isnan(D[k])) {
                next[k] = c - (dtau / dx) * (s * std::abs(c) - D[k]);
                continue;
            }
            const double a = (c - at(g.f, i - 1, j)) / dx;
            const double b = (at(g.f, i + 1, j) - c) / dx;
            const double cc = (c - at(g.f, i, j - 1)) / dx;
            const double d = (at(g.f, i, j + 1) - c) / dx;
            double grad;
            if (s > 0) {
                grad = std::sqrt(std::max(std::pow(std::max(a, 0.0), 2), std::pow(std::min(b, 0.0), 2)) +
                                 std::max(std::pow(std::max(cc, 0.0), 2), std::pow(std::min(d, 0.0), 2)));
            } else {
                grad = std::sqrt(std::max(std::pow(std::min(a, 0.0), 2), std::pow(std::max(b, 0.0), 2)) +
                                 std::max(std::pow(std::min(cc, 0.0), 2), std::pow(std::max(d, 0.0), 2)));
            }
            next[k] = c - dtau * s * (grad - 1.0);
        }
        for (int k : nodes) g.f[k] = next[k];
    }
}

ZeroSet extract_zero_set(const LevelSetGrid& g, int rays) {
    ZeroSet z;
    const int nx = g.nx;
    auto value = [&](int i, int j) { return g.f[g.index(i, j)]; };
    auto crossing = [&](int i0, int j0, int i1, int j1) {
        const double a = value(i0, j0), b = value(i1, j1);
        const double t = a / (a - b);
        return VecN(g.node(i0, j0) + t * (g.node(i1, j1) - g.node(i0, j0)));
    };
    for (int j = 0; j < g.ny - 1; ++j)
        for (int i = 0; i < nx - 1; ++i) {
            // corners ccw: (i,j) (i+1,j) (i+1,j+1) (i,j+1); inside is f < 0
            const double v[4] = {value(i, j), value(i + 1, j), value(i + 1, j + 1), value(i, j + 1)};
            const int ci[4] = {i, i + 1, i + 1, i};
            const int cj[4] = {j, j, j + 1, j + 1};
            int mask = 0;
            for (int m = 0; m < 4; ++m)
                if (v[m] < 0.0) mask |= 1 << m;
            if (mask == 0 || mask == 15) continue;
            std::vector<std::pair<int, VecN>> cuts;
            for (int e = 0; e < 4; ++e) {
                const int m0 = e, m1 = (e + 1) % 4;
                if ((v[m0] < 0.0) != (v[m1] < 0.0)) cuts.emplace_back(e, crossing(ci[m0], cj[m0], ci[m1], cj[m1]));
            }
            std::vector<std::array<VecN, 2>> segs;
            if (cuts.size() == 2) {
                segs.push_back({cuts[0].second, cuts[1].second});
            } else if (cuts.size() == 4) {
                const double mid = 0.25 * (v[0] + v[1] + v[2] + v[3]);
                // Pair edges so that the centre joins the corners sharing its sign.
                const bool c0 = (v[0] < 0.0) == (mid < 0.0);
                if (c0) {
                    segs.push_back({cuts[0].second, cuts[1].second});
                    segs.push_back({cuts[2].second, cuts[3].second});
                } else {
                    segs.push_back({cuts[3].second, cuts[0].second});
                    segs.push_back({cuts[1].second, cuts[2].second});
                }
            }
            for (auto& s : segs) {
                // Orient with the inside (decreasing f) on the left.
                const VecN mid = 0.5 * (s[0] + s[1]);
                const double a = (mid[0] - g.node(i, j)[0]) / g.dx;
                const double b = (mid[1] - g.node(i, j)[1]) / g.dx;
                const double fx = ((1 - b) * (v[1] - v[0]) + b * (v[2] - v[3])) / g.dx;
                const double fy = ((1 - a) * (v[3] - v[0]) + a * (v[2] - v[1])) / g.dx;
                const VecN d = s[1] - s[0];
                const double left_dot_inward = -d[1] * (-fx) + d[0] * (-fy);
                if (left_dot_inward < 0.0) std::swap(s[0], s[1]);
                if ((s[1] - s[0]).norm() > 0.0) z.segments.push_back(s);
            }
        }
    if (z.segments.empty()) throw Error(ErrorKind::GradientDegenerate, "level set has no zero crossing");

    double A = 0.0, cx = 0.0, cy = 0.0;
    for (const auto& s : z.segments) {
        const double cr = s[0][0] * s[1][1] - s[1][0] * s[0][1];
        A += 0.5 * cr;
        cx += (s[0][0] + s[1][0]) * cr;
        cy += (s[0][1] + s[1][1]) * cr;
    }
    if (!(A > 0.0)) throw Error(ErrorKind::GradientDegenerate, "zero set encloses no area");
    z.centroid = vec2(cx / (6 * A), cy / (6 * A));

    const double two_pi = 2.0 * std::numbers::pi;
    z.ray_radii.assign(rays, -1.0);
    for (const auto& s : z.segments) {
        const VecN p = s[0] - z.centroid;
        const VecN q = s[1] - z.centroid;
        double a0 = std::atan2(p[1], p[0]);
        double span = std::remainder(std::atan2(q[1], q[0]) - a0, two_pi);
        VecN from = p, to = q;
        if (span < 0.0) {
            a0 += span;
            span = -span;
            std::swap(from, to);
        }
        const long m0 = static_cast<long>(std::ceil(a0 * rays / two_pi));
        const long m1 = static_cast<long>(std::floor((a0 + span) * rays / two_pi));
        for (long m = m0; m <= m1; ++m) {
            const double th = two_pi * static_cast<double>(m) / rays;
            const VecN dir = vec2(std::cos(th), std::sin(th));
            const VecN e = to - from;
            const double den = dir[0] * e[1] - dir[1] * e[0];
            if (std::abs(den) < 1e-300) continue;
            const double rho = (from[0] * e[1] - from[1] * e[0]) / den;
            const int idx = static_cast<int>(((m % rays) + rays) % rays);
            if (rho > 0.0) z.ray_radii[idx] = std::max(z.ray_radii[idx], rho);
        }
    }
    z.ray_points.reserve(rays);
    for (int m = 0; m < rays; ++m) {
        if (!(z.ray_radii[m] > 0.0)) {
            throw Error(ErrorKind::MeshDegenerate, "zero set is not star-shaped about its centroid");
        }
        const double th = two_pi * m / rays;
        z.ray_points.push_back(z.centroid + z.ray_radii[m] * vec2(std::cos(th), std::sin(th)));
    }
    return z;
}

}  // namespace anisoflow
