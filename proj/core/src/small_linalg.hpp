#pragma once

#include "anisoflow/tensor.hpp"

// Closed-form determinant and inverse for the 1x1..3x3 matrices used
// throughout; Eigen's dynamic-size decompositions dominate runtime otherwise.

namespace anisoflow::detail {

inline double det_small(const MatN& a) {
    switch (a.rows()) {
        case 1: return a(0, 0);
        case 2: return a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0);
        default:
            return a(0, 0) * (a(1, 1) * a(2, 2) - a(1, 2) * a(2, 1)) - a(0, 1) * (a(1, 0) * a(2, 2) - a(1, 2) * a(2, 0)) +
                   a(0, 2) * (a(1, 0) * a(2, 1) - a(1, 1) * a(2, 0));
    }
}

inline MatN inverse_small(const MatN& a) {
    const int n = static_cast<int>(a.rows());
    MatN inv(n, n);
    const double d = det_small(a);
    switch (n) {
        case 1: inv(0, 0) = 1.0 / d; break;
        case 2:
            inv << a(1, 1), -a(0, 1), -a(1, 0), a(0, 0);
            inv /= d;
            break;
        default:
            inv(0, 0) = a(1, 1) * a(2, 2) - a(1, 2) * a(2, 1);
            inv(0, 1) = a(0, 2) * a(2, 1) - a(0, 1) * a(2, 2);
            inv(0, 2) = a(0, 1) * a(1, 2) - a(0, 2) * a(1, 1);
            inv(1, 0) = a(1, 2) * a(2, 0) - a(1, 0) * a(2, 2);
            inv(1, 1) = a(0, 0) * a(2, 2) - a(0, 2) * a(2, 0);
            inv(1, 2) = a(0, 2) * a(1, 0) - a(0, 0) * a(1, 2);
            inv(2, 0) = a(1, 0) * a(2, 1) - a(1, 1) * a(2, 0);
            inv(2, 1) = a(0, 1) * a(2, 0) - a(0, 0) * a(2, 1);
            inv(2, 2) = a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0);
            inv /= d;
    }
    return inv;
}

/// Sylvester's criterion on a symmetric matrix.
inline bool positive_definite_small(const MatN& a) {
    const int n = static_cast<int>(a.rows());
    if (!(a(0, 0) > 0.0)) return false;
    if (n >= 2 && !(a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0) > 0.0)) return false;
    if (n >= 3 && !(det_small(a) > 0.0)) return false;
    return true;
}

}  // namespace anisoflow::detail
