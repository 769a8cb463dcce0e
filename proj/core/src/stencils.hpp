#pragma once

// 4th-order central difference stencils on uniform periodic grids.

namespace anisoflow::stencil {

template <class T>
T first(const T& fm2, const T& fm1, const T& fp1, const T& fp2, double h) {
    return (fm2 - 8.0 * fm1 + 8.0 * fp1 - fp2) / (12.0 * h);
}

template <class T>
T second(const T& fm2, const T& fm1, const T& f0, const T& fp1, const T& fp2, double h) {
    return (-fm2 + 16.0 * fm1 - 30.0 * f0 + 16.0 * fp1 - fp2) / (12.0 * h * h);
}

inline int wrap(int i, int n) {
    const int m = i % n;
    return m < 0 ? m + n : m;
}

/// Lat-long grid index of (i, j) after walking across a pole: colatitude
/// row j outside [0, n_phi) reflects and the longitude shifts by half a turn.
struct LatLong {
    int n_theta;
    int n_phi;

    int index(int i, int j) const {
        if (j < 0) {
            j = -1 - j;
            i += n_theta / 2;
        } else if (j >= n_phi) {
            j = 2 * n_phi - 1 - j;
            i += n_theta / 2;
        }
        return j * n_theta + wrap(i, n_theta);
    }
};

}  // namespace anisoflow::stencil
