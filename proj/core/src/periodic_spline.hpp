#pragma once

#include "anisoflow/tensor.hpp"

#include <gsl/gsl_interp.h>

#include <memory>
#include <vector>

namespace anisoflow::detail {

/// Periodic cubic spline through the vertices of a closed planar polygon,
/// parametrised by cumulative chord length.
class PeriodicCurveSpline {
public:
    explicit PeriodicCurveSpline(const std::vector<VecN>& points);

    double period() const { return knots_.back(); }
    const std::vector<double>& knots() const { return knots_; }

    VecN eval(double s) const;
    VecN deriv(double s) const;
    VecN deriv2(double s) const;

    /// Parameter of the point closest to p, refined by Newton from the best
    /// of a dense sample.
    double project(const VecN& p) const;

private:
    double wrap(double s) const;

    struct InterpDeleter {
        void operator()(gsl_interp* p) const { gsl_interp_free(p); }
    };
    struct AccelDeleter {
        void operator()(gsl_interp_accel* p) const { gsl_interp_accel_free(p); }
    };

    std::vector<double> knots_;
    std::vector<double> xs_;
    std::vector<double> ys_;
    std::unique_ptr<gsl_interp, InterpDeleter> x_;
    std::unique_ptr<gsl_interp, InterpDeleter> y_;
    std::unique_ptr<gsl_interp_accel, AccelDeleter> acc_;
};

}  // namespace anisoflow::detail
