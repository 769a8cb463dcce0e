#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cassert>
#include <cmath>

namespace anisoflow {

// Ambient spaces are R^2 or R^3; fixed max size keeps everything on the stack.
inline constexpr int kMaxDim = 3;

using VecN = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, kMaxDim, 1>;
using MatN = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, kMaxDim, kMaxDim>;

struct VectorTag {};
struct CovectorTag {};

/// Components in ambient linear coordinates, tagged by variance so that a
/// tangent vector cannot be passed where a 1-form is expected.
template <class Kind>
class Components {
public:
    Components() = default;
    explicit Components(VecN c) : c_(std::move(c)) {}

    const VecN& components() const noexcept { return c_; }
    int dim() const noexcept { return static_cast<int>(c_.size()); }
    double operator[](int i) const { return c_[i]; }

    Components operator-() const { return Components(-c_); }
    friend Components operator*(double s, const Components& a) { return Components(s * a.c_); }
    friend Components operator+(const Components& a, const Components& b) { return Components(a.c_ + b.c_); }
    friend Components operator-(const Components& a, const Components& b) { return Components(a.c_ - b.c_); }

private:
    VecN c_;
};

using Vector = Components<VectorTag>;
using Covector = Components<CovectorTag>;

inline double pair(const Covector& xi, const Vector& y) {
    assert(xi.dim() == y.dim());
    return xi.components().dot(y.components());
}

/// Totally generic dense tensor of fixed rank over an ambient space of
/// dimension <= 3, stored row-major.
template <int Rank>
class Tensor {
public:
    static constexpr int kCapacity = Rank == 3 ? 27 : 81;
    static_assert(Rank == 3 || Rank == 4);

    Tensor() = default;
    explicit Tensor(int dim) : dim_(dim) { data_.fill(0.0); }

    int dim() const noexcept { return dim_; }

    template <class... I>
    double& operator()(I... idx) {
        static_assert(sizeof...(I) == Rank);
        return data_[offset(idx...)];
    }
    template <class... I>
    double operator()(I... idx) const {
        static_assert(sizeof...(I) == Rank);
        return data_[offset(idx...)];
    }

    double max_abs() const {
        double m = 0.0;
        int n = 1;
        for (int r = 0; r < Rank; ++r) n *= dim_;
        for (int i = 0; i < n; ++i) m = std::max(m, std::abs(data_[i]));
        return m;
    }

private:
    template <class... I>
    int offset(I... idx) const {
        int off = 0;
        ((off = off * dim_ + static_cast<int>(idx)), ...);
        return off;
    }

    int dim_ = 0;
    std::array<double, kCapacity> data_{};
};

using Tensor3 = Tensor<3>;
using Tensor4 = Tensor<4>;

}  // namespace anisoflow
