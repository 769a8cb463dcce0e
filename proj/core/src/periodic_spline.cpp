#include "periodic_spline.hpp"

#include "anisoflow/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace anisoflow::detail {

PeriodicCurveSpline::PeriodicCurveSpline(const std::vector<VecN>& points) {
    const std::size_t n = points.size();
    if (n < 4) throw Error(ErrorKind::MeshDegenerate, "spline needs at least 4 points");
    knots_.resize(n + 1);
    xs_.resize(n + 1);
    ys_.resize(n + 1);
    knots_[0] = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        const VecN& p = points[k];
        const VecN& q = points[(k + 1) % n];
        const double len = (q - p).norm();
        if (!(len > 0.0)) throw Error(ErrorKind::MeshDegenerate, "repeated vertex");
        knots_[k + 1] = knots_[k] + len;
        xs_[k] = p[0];
        ys_[k] = p[1];
    }
    xs_[n] = xs_[0];
    ys_[n] = ys_[0];
    x_.reset(gsl_interp_alloc(gsl_interp_cspline_periodic, n + 1));
    y_.reset(gsl_interp_alloc(gsl_interp_cspline_periodic, n + 1));
    acc_.reset(gsl_interp_accel_alloc());
    if (gsl_interp_init(x_.get(), knots_.data(), xs_.data(), n + 1) != 0 ||
        gsl_interp_init(y_.get(), knots_.data(), ys_.data(), n + 1) != 0) {
        throw Error(ErrorKind::MeshDegenerate, "periodic spline setup failed");
    }
}

double PeriodicCurveSpline::wrap(double s) const {
    const double L = period();
    double w = std::fmod(s, L);
    if (w < 0.0) w += L;
    return std::min(w, L);
}

VecN PeriodicCurveSpline::eval(double s) const {
    const double w = wrap(s);
    VecN p(2);
    p << gsl_interp_eval(x_.get(), knots_.data(), xs_.data(), w, acc_.get()),
        gsl_interp_eval(y_.get(), knots_.data(), ys_.data(), w, acc_.get());
    return p;
}

VecN PeriodicCurveSpline::deriv(double s) const {
    const double w = wrap(s);
    VecN p(2);
    p << gsl_interp_eval_deriv(x_.get(), knots_.data(), xs_.data(), w, acc_.get()),
        gsl_interp_eval_deriv(y_.get(), knots_.data(), ys_.data(), w, acc_.get());
    return p;
}

VecN PeriodicCurveSpline::deriv2(double s) const {
    const double w = wrap(s);
    VecN p(2);
    p << gsl_interp_eval_deriv2(x_.get(), knots_.data(), xs_.data(), w, acc_.get()),
        gsl_interp_eval_deriv2(y_.get(), knots_.data(), ys_.data(), w, acc_.get());
    return p;
}

double PeriodicCurveSpline::project(const VecN& p) const {
    const std::size_t n = knots_.size() - 1;
    constexpr int kSub = 4;
    double best_s = 0.0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < n; ++k) {
        const double h = knots_[k + 1] - knots_[k];
        for (int m = 0; m < kSub; ++m) {
            const double s = knots_[k] + h * m / kSub;
            const double d = (eval(s) - p).squaredNorm();
            if (d < best_d) {
                best_d = d;
                best_s = s;
            }
        }
    }
    const double max_step = period() / static_cast<double>(n);
    double s = best_s;
    for (int iter = 0; iter < 20; ++iter) {
        const VecN r = eval(s) - p;
        const VecN d1 = deriv(s);
        const double grad = r.dot(d1);
        const double hess = d1.squaredNorm() + r.dot(deriv2(s));
        if (!(hess > 0.0)) break;
        const double step = std::clamp(grad / hess, -max_step, max_step);
        s -= step;
        if (std::abs(step) < 1e-15 * period()) break;
    }
    return (eval(s) - p).squaredNorm() <= best_d ? s : best_s;
}

}  // namespace anisoflow::detail
