#include "anisoflow/geometry_kernel.hpp"

#include "anisoflow/detail/dual.hpp"
#include "small_linalg.hpp"

#include <cmath>
#include <numbers>
#include <algorithm>
#include <sstream>

namespace anisoflow {

std::string_view to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::ZeroVector: return "ZeroVector";
        case ErrorKind::InvalidParams: return "InvalidParams";
        case ErrorKind::NotPositiveDefinite: return "NotPositiveDefinite";
        case ErrorKind::NoConvergence: return "NoConvergence";
        case ErrorKind::DegenerateMetric: return "DegenerateMetric";
        case ErrorKind::Collapse: return "Collapse";
        case ErrorKind::MeshDegenerate: return "MeshDegenerate";
        case ErrorKind::GradientDegenerate: return "GradientDegenerate";
        case ErrorKind::WrongInitialData: return "WrongInitialData";
        case ErrorKind::InsufficientSnapshots: return "InsufficientSnapshots";
        case ErrorKind::NotMeanConvex: return "NotMeanConvex";
        case ErrorKind::NotConvexInitially: return "NotConvexInitially";
        case ErrorKind::NotNestedInitially: return "NotNestedInitially";
        case ErrorKind::RedistributionActive: return "RedistributionActive";
        case ErrorKind::FileNotFound: return "FileNotFound";
        case ErrorKind::SchemaViolation: return "SchemaViolation";
        case ErrorKind::IoError: return "IoError";
    }
    return "Unknown";
}

std::string_view to_string(NormFamily family) {
    switch (family) {
        case NormFamily::euclidean: return "euclidean";
        case NormFamily::randers: return "randers";
        case NormFamily::lp_smooth: return "lp_smooth";
    }
    return "unknown";
}

std::string_view to_string(DerivativeMode mode) {
    switch (mode) {
        case DerivativeMode::analytic: return "analytic";
        case DerivativeMode::forward_ad: return "forward_ad";
        case DerivativeMode::finite_difference: return "finite_difference";
    }
    return "unknown";
}

NormFamily norm_family_from_string(std::string_view name) {
    if (name == "euclidean") return NormFamily::euclidean;
    if (name == "randers") return NormFamily::randers;
    if (name == "lp_smooth") return NormFamily::lp_smooth;
    throw Error(ErrorKind::InvalidParams, "unknown norm family '" + std::string(name) + "'");
}

DerivativeMode derivative_mode_from_string(std::string_view name) {
    if (name == "analytic") return DerivativeMode::analytic;
    if (name == "forward_ad") return DerivativeMode::forward_ad;
    if (name == "finite_difference") return DerivativeMode::finite_difference;
    throw Error(ErrorKind::InvalidParams, "unknown derivative mode '" + std::string(name) + "'");
}

std::optional<std::string> check_norm_params(const NormSpec& spec) {
    if (spec.dim < 2 || spec.dim > kMaxDim) {
        return "dim must be 2 or 3";
    }
    if (spec.family == NormFamily::randers) {
        if (static_cast<int>(spec.b.size()) != spec.dim) {
            return "b must have dim components";
        }
        double nb = 0.0;
        for (double v : spec.b) {
            if (!std::isfinite(v)) return "b must be finite";
            nb += v * v;
        }
        if (std::sqrt(nb) >= 1.0) {
            return "Euclidean norm must be < 1";
        }
    }
    if (spec.family == NormFamily::lp_smooth) {
        if (spec.p < 4 || spec.p % 2 != 0) {
            return "p must be an even integer >= 4";
        }
        // epsilon = 0 is pure lp: a norm, but g degenerates on the coordinate axes
        if (!(spec.epsilon >= 0.0 && spec.epsilon <= 1.0)) {
            return "epsilon must be in [0,1]";
        }
    }
    return std::nullopt;
}

namespace {

using detail::NestedDual;

// E(y) = F(y)^2 / 2, generic over the scalar type for AD.
template <class T>
T half_sq(const NormSpec& spec, const VecN& drift, const std::array<T, kMaxDim>& y) {
    const int dim = spec.dim;
    T sq = y[0] * y[0];
    for (int i = 1; i < dim; ++i) sq = sq + y[i] * y[i];
    switch (spec.family) {
        case NormFamily::euclidean:
            return 0.5 * sq;
        case NormFamily::randers: {
            using std::sqrt;
            T f = sqrt(sq);
            for (int i = 0; i < dim; ++i) f = f + drift[i] * y[i];
            return 0.5 * (f * f);
        }
        case NormFamily::lp_smooth: {
            using std::pow;
            T s = T(0.0);
            for (int i = 0; i < dim; ++i) {
                T yp = y[i];
                for (int k = 1; k < spec.p; ++k) yp = yp * y[i];
                s = s + yp;
            }
            return 0.5 * ((1.0 - spec.epsilon) * pow(s, 2.0 / spec.p) + spec.epsilon * sq);
        }
    }
    return T(0.0);
}

template <int K>
double ad_partial(const NormSpec& spec, const VecN& drift, const VecN& y, const std::array<int, K>& idx) {
    std::array<NestedDual<K>, kMaxDim> vars{};
    for (int m = 0; m < spec.dim; ++m) {
        std::array<bool, 4> seed{};
        for (int l = 0; l < K; ++l) seed[l] = idx[l] == m;
        vars[m] = detail::seeded<K>(y[m], seed);
    }
    return detail::mixed_part<K>(half_sq(spec, drift, vars));
}

double plain_half_sq(const NormSpec& spec, const VecN& drift, const VecN& y) {
    std::array<double, kMaxDim> a{};
    for (int i = 0; i < spec.dim; ++i) a[i] = y[i];
    return half_sq(spec, drift, a);
}

// Step per derivative order, relative to |y|. Each order gets the step that
// balances the h^6 truncation of the 7-point stencil against roundoff.
constexpr std::array<double, 5> kFdStep = {0.0, 1e-3, 2e-3, 5e-3, 1e-2};

// Nested 6th-order central first differences of E along axes idx[0..K-1].
template <int K>
double fd_partial(const NormSpec& spec, const VecN& drift, const VecN& y, const std::array<int, K>& idx,
                  double h) {
    if constexpr (K == 0) {
        return plain_half_sq(spec, drift, y);
    } else {
        std::array<int, K - 1> rest{};
        for (int l = 0; l + 1 < K; ++l) rest[l] = idx[l + 1];
        const int axis = idx[0];
        auto at = [&](double s) {
            VecN ys = y;
            ys[axis] += s * h;
            return fd_partial<K - 1>(spec, drift, ys, rest, h);
        };
        return (45.0 * (at(1.0) - at(-1.0)) - 9.0 * (at(2.0) - at(-2.0)) + (at(3.0) - at(-3.0))) / (60.0 * h);
    }
}

template <int K>
double partial(const NormSpec& spec, const VecN& drift, const VecN& y, const std::array<int, K>& idx) {
    if (spec.derivative_mode == DerivativeMode::finite_difference) {
        return fd_partial<K>(spec, drift, y, idx, kFdStep[K] * y.norm());
    }
    return ad_partial<K>(spec, drift, y, idx);
}

// Closed-form derivatives of F for the euclidean/randers families, built from
// the derivatives of alpha = |y| up to fourth order.
struct RandersJet {
    double F;
    VecN F1;
    MatN F2;
    Tensor3 F3;
    Tensor4 F4;
};

RandersJet randers_jet(const VecN& drift, const VecN& y, int order) {
    const int n = static_cast<int>(y.size());
    const double a = y.norm();
    const VecN u = y / a;
    auto d = [](int i, int j) { return i == j ? 1.0 : 0.0; };

    RandersJet jet{a + drift.dot(y), u + drift, MatN(n, n), Tensor3(n), Tensor4(n)};
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) jet.F2(i, j) = (d(i, j) - u[i] * u[j]) / a;
    if (order < 3) return jet;

    const double a2 = a * a;
    const double a3 = a2 * a;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k)
                jet.F3(i, j, k) = -(d(i, j) * u[k] + d(i, k) * u[j] + d(j, k) * u[i] - 3.0 * u[i] * u[j] * u[k]) / a2;
    if (order < 4) return jet;

    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k)
                for (int l = 0; l < n; ++l) {
                    const double dd = d(i, j) * d(k, l) + d(i, k) * d(j, l) + d(i, l) * d(j, k);
                    const double duu = d(i, j) * u[k] * u[l] + d(i, k) * u[j] * u[l] + d(i, l) * u[j] * u[k] +
                                       d(j, k) * u[i] * u[l] + d(j, l) * u[i] * u[k] + d(k, l) * u[i] * u[j];
                    jet.F4(i, j, k, l) = (-dd + 3.0 * duu - 15.0 * u[i] * u[j] * u[k] * u[l]) / a3;
                }
    return jet;
}

}  // namespace

MinkowskiNorm::MinkowskiNorm(NormSpec spec) : spec_(std::move(spec)) {
    if (auto err = check_norm_params(spec_)) {
        throw Error(ErrorKind::InvalidParams, *err);
    }
    drift_ = VecN::Zero(spec_.dim);
    if (spec_.family == NormFamily::randers) {
        for (int i = 0; i < spec_.dim; ++i) drift_[i] = spec_.b[i];
    }
}

MinkowskiNorm MinkowskiNorm::euclidean(int dim, DerivativeMode mode) {
    NormSpec s;
    s.family = NormFamily::euclidean;
    s.dim = dim;
    s.derivative_mode = mode;
    return MinkowskiNorm(s);
}

MinkowskiNorm MinkowskiNorm::randers(std::vector<double> b, DerivativeMode mode) {
    NormSpec s;
    s.family = NormFamily::randers;
    s.dim = static_cast<int>(b.size());
    s.b = std::move(b);
    s.derivative_mode = mode;
    return MinkowskiNorm(s);
}

MinkowskiNorm MinkowskiNorm::lp_smooth(int dim, int p, double epsilon, DerivativeMode mode) {
    NormSpec s;
    s.family = NormFamily::lp_smooth;
    s.dim = dim;
    s.p = p;
    s.epsilon = epsilon;
    s.derivative_mode = mode;
    return MinkowskiNorm(s);
}

bool MinkowskiNorm::is_reversible() const {
    return spec_.family != NormFamily::randers || drift_.norm() == 0.0;
}

MinkowskiNorm MinkowskiNorm::with_mode(DerivativeMode mode) const {
    NormSpec s = spec_;
    s.derivative_mode = mode;
    return MinkowskiNorm(s);
}

void MinkowskiNorm::require_nonzero(const VecN& y) const {
    if (y.size() != spec_.dim) {
        throw Error(ErrorKind::InvalidParams, "dimension mismatch");
    }
    if (!(y.norm() > kZeroVectorThreshold)) {
        throw Error(ErrorKind::ZeroVector, "F is undefined at the origin");
    }
}

double MinkowskiNorm::eval(const Vector& yv) const {
    const VecN& y = yv.components();
    require_nonzero(y);
    switch (spec_.family) {
        case NormFamily::euclidean: return y.norm();
        case NormFamily::randers: return y.norm() + drift_.dot(y);
        case NormFamily::lp_smooth: return std::sqrt(2.0 * plain_half_sq(spec_, drift_, y));
    }
    return 0.0;
}

VecN MinkowskiNorm::gradient_half_sq(const VecN& y) const {
    const int n = spec_.dim;
    const bool closed_form = spec_.derivative_mode == DerivativeMode::analytic &&
                             spec_.family != NormFamily::lp_smooth;
    if (closed_form) {
        if (spec_.family == NormFamily::euclidean) return y;
        const double a = y.norm();
        return (a + drift_.dot(y)) * (y / a + drift_);
    }
    VecN out(n);
    for (int i = 0; i < n; ++i) out[i] = partial<1>(spec_, drift_, y, {i});
    return out;
}

MatN MinkowskiNorm::hessian_half_sq(const VecN& y) const {
    const int n = spec_.dim;
    const bool closed_form = spec_.derivative_mode == DerivativeMode::analytic &&
                             spec_.family != NormFamily::lp_smooth;
    if (closed_form) {
        if (spec_.family == NormFamily::euclidean) return MatN::Identity(n, n);
        const RandersJet jet = randers_jet(drift_, y, 2);
        return jet.F * jet.F2 + jet.F1 * jet.F1.transpose();
    }
    MatN g(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) {
            g(i, j) = partial<2>(spec_, drift_, y, {i, j});
            g(j, i) = g(i, j);
        }
    return g;
}

Metric MinkowskiNorm::fundamental_tensor(const Vector& yv) const {
    const VecN& y = yv.components();
    require_nonzero(y);
    Metric m;
    m.g = hessian_half_sq(y);
    if (!detail::positive_definite_small(m.g)) {
        throw Error(ErrorKind::NotPositiveDefinite, "fundamental tensor is not positive definite");
    }
    m.g_inv = detail::inverse_small(m.g);
    m.g_inv = 0.5 * (m.g_inv + m.g_inv.transpose()).eval();
    return m;
}

Tensor3 MinkowskiNorm::cartan(const Vector& yv) const {
    const VecN& y = yv.components();
    require_nonzero(y);
    const int n = spec_.dim;
    Tensor3 c(n);
    if (spec_.family == NormFamily::euclidean && spec_.derivative_mode == DerivativeMode::analytic) {
        return c;
    }
    if (spec_.family == NormFamily::randers && spec_.derivative_mode == DerivativeMode::analytic) {
        const RandersJet J = randers_jet(drift_, y, 3);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                for (int k = 0; k < n; ++k)
                    c(i, j, k) = 0.5 * (J.F1[k] * J.F2(i, j) + J.F1[i] * J.F2(j, k) + J.F1[j] * J.F2(i, k) +
                                        J.F * J.F3(i, j, k));
        return c;
    }
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j)
            for (int k = j; k < n; ++k) {
                const double v = 0.5 * partial<3>(spec_, drift_, y, {i, j, k});
                c(i, j, k) = c(i, k, j) = c(j, i, k) = c(j, k, i) = c(k, i, j) = c(k, j, i) = v;
            }
    return c;
}

Tensor4 MinkowskiNorm::cartan_deriv(const Vector& yv) const {
    const VecN& y = yv.components();
    require_nonzero(y);
    const int n = spec_.dim;
    Tensor4 c(n);
    if (spec_.family == NormFamily::euclidean && spec_.derivative_mode == DerivativeMode::analytic) {
        return c;
    }
    if (spec_.family == NormFamily::randers && spec_.derivative_mode == DerivativeMode::analytic) {
        const RandersJet J = randers_jet(drift_, y, 4);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                for (int k = 0; k < n; ++k)
                    for (int l = 0; l < n; ++l)
                        c(i, j, k, l) =
                            0.5 * (J.F1[l] * J.F3(i, j, k) + J.F * J.F4(i, j, k, l) + J.F2(k, l) * J.F2(i, j) +
                                   J.F1[k] * J.F3(i, j, l) + J.F2(i, l) * J.F2(j, k) + J.F1[i] * J.F3(j, k, l) +
                                   J.F2(j, l) * J.F2(i, k) + J.F1[j] * J.F3(i, k, l));
        return c;
    }
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j)
            for (int k = j; k < n; ++k)
                for (int l = k; l < n; ++l) {
                    const double v = 0.5 * partial<4>(spec_, drift_, y, {i, j, k, l});
                    std::array<int, 4> p{i, j, k, l};
                    // all permutations of a sorted index tuple
                    do {
                        c(p[0], p[1], p[2], p[3]) = v;
                    } while (std::next_permutation(p.begin(), p.end()));
                }
    return c;
}

Covector MinkowskiNorm::legendre(const Vector& yv) const {
    const VecN& y = yv.components();
    require_nonzero(y);
    return Covector(gradient_half_sq(y));
}

Vector MinkowskiNorm::legendre_inv(const Covector& xi) const {
    return legendre_inv(xi, Vector(xi.components()));
}

Vector MinkowskiNorm::legendre_inv(const Covector& xiv, const Vector& guess) const {
    const VecN& xi = xiv.components();
    require_nonzero(xi);
    if (spec_.family == NormFamily::euclidean) {
        return Vector(xi);
    }
    const double scale = xi.norm();
    VecN y = guess.components().size() == xi.size() && guess.components().norm() > kZeroVectorThreshold
                 ? guess.components()
                 : xi;
    VecN residual = gradient_half_sq(y) - xi;
    for (int iter = 0; iter < kLegendreMaxIterations; ++iter) {
        const double res_norm = residual.norm();
        if (res_norm <= kLegendreTolerance * scale) {
            return Vector(y);
        }
        const MatN g = hessian_half_sq(y);
        const VecN step = detail::inverse_small(g) * residual;
        // Backtrack if the full Newton step overshoots through the origin or
        // increases the residual.
        double damping = 1.0;
        for (int k = 0; k < 30; ++k) {
            const VecN trial = y - damping * step;
            if (trial.norm() > kZeroVectorThreshold) {
                const VecN trial_res = gradient_half_sq(trial) - xi;
                if (trial_res.norm() < res_norm || damping < 1e-6) {
                    y = trial;
                    residual = trial_res;
                    break;
                }
            }
            damping *= 0.5;
        }
    }
    if (residual.norm() <= kLegendreTolerance * scale) {
        return Vector(y);
    }
    std::ostringstream msg;
    msg << "Legendre inversion did not converge in " << kLegendreMaxIterations
        << " iterations (residual " << residual.norm() << ")";
    throw Error(ErrorKind::NoConvergence, msg.str());
}

double MinkowskiNorm::dual_norm(const Covector& xi) const {
    const Vector y = legendre_inv(xi);
    return pair(xi, y) / eval(y);
}

bool ValidationReport::all_pass() const {
    if (!valid) return false;
    for (const auto& id : identities)
        if (!id.pass) return false;
    for (const auto& id : cross_checks)
        if (!id.pass) return false;
    return true;
}

std::vector<VecN> quasi_random_directions(int dim, int count) {
    std::vector<VecN> out;
    out.reserve(count);
    const double golden = 0.5 * (std::sqrt(5.0) - 1.0);
    const double two_pi = 2.0 * std::numbers::pi;
    for (int k = 0; k < count; ++k) {
        const double frac = std::fmod((k + 0.5) * golden, 1.0);
        VecN v(dim);
        if (dim == 2) {
            v << std::cos(two_pi * frac), std::sin(two_pi * frac);
        } else {
            // Fibonacci lattice on S^2.
            const double zc = 1.0 - 2.0 * (k + 0.5) / count;
            const double rho = std::sqrt(std::max(0.0, 1.0 - zc * zc));
            v << rho * std::cos(two_pi * frac), rho * std::sin(two_pi * frac), zc;
        }
        out.push_back(v);
    }
    return out;
}

}  // namespace anisoflow
