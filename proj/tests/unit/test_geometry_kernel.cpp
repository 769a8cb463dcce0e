#include <doctest.h>

#include "anisoflow/geometry_kernel.hpp"

#include <cmath>
#include <numbers>

using namespace anisoflow;

namespace {

Vector vec(std::initializer_list<double> c) {
    VecN v(static_cast<int>(c.size()));
    int i = 0;
    for (double x : c) v[i++] = x;
    return Vector(v);
}

Covector covec(std::initializer_list<double> c) { return Covector(vec(c).components()); }

// Central second differences of E = F^2/2, using only F itself.
MatN fd_hessian_of_half_sq(const MinkowskiNorm& F, const VecN& y, double h) {
    const int n = F.dim();
    auto E = [&](const VecN& z) {
        const double f = F.eval(Vector(z));
        return 0.5 * f * f;
    };
    MatN H(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            VecN pp = y, pm = y, mp = y, mm = y;
            pp[i] += h; pp[j] += h;
            pm[i] += h; pm[j] -= h;
            mp[i] -= h; mp[j] += h;
            mm[i] -= h; mm[j] -= h;
            H(i, j) = (E(pp) - E(pm) - E(mp) + E(mm)) / (4 * h * h);
        }
    return H;
}

// Brute-force dual: maximise xi(u) over the unit sphere F(u) = 1 by dense
// angular search, refined by ternary search inside the winning bracket.
struct DualOracle {
    double value;
    VecN maximiser;
};

DualOracle brute_force_dual(const MinkowskiNorm& F, const VecN& xi, int samples) {
    auto score = [&](double th) {
        VecN e(2);
        e << std::cos(th), std::sin(th);
        const VecN u = e / F.eval(Vector(e));
        return xi.dot(u);
    };
    const double step = 2.0 * std::numbers::pi / samples;
    int best = 0;
    double best_val = -1e300;
    for (int k = 0; k < samples; ++k) {
        const double v = score(k * step);
        if (v > best_val) {
            best_val = v;
            best = k;
        }
    }
    double lo = (best - 1) * step, hi = (best + 1) * step;
    for (int it = 0; it < 200; ++it) {
        const double m1 = lo + (hi - lo) / 3, m2 = hi - (hi - lo) / 3;
        if (score(m1) < score(m2)) lo = m1; else hi = m2;
    }
    const double th = 0.5 * (lo + hi);
    VecN e(2);
    e << std::cos(th), std::sin(th);
    return {score(th), e / F.eval(Vector(e))};
}

std::vector<MinkowskiNorm> all_norms() {
    return {
        MinkowskiNorm::euclidean(2),
        MinkowskiNorm::euclidean(3),
        MinkowskiNorm::randers({0.3, 0.0}),
        MinkowskiNorm::randers({0.2, -0.4}),
        MinkowskiNorm::randers({0.1, 0.3, -0.2}),
        MinkowskiNorm::lp_smooth(2, 4, 0.1),
        MinkowskiNorm::lp_smooth(3, 6, 0.2),
        MinkowskiNorm::randers({0.3, 0.0}, DerivativeMode::forward_ad),
        MinkowskiNorm::randers({0.3, 0.0}, DerivativeMode::finite_difference),
        MinkowskiNorm::lp_smooth(2, 4, 0.1, DerivativeMode::finite_difference),
    };
}

}  // namespace

TEST_CASE("eval closed forms") {
    CHECK(MinkowskiNorm::euclidean(2).eval(vec({3, 4})) == doctest::Approx(5.0).epsilon(1e-15));

    const auto R = MinkowskiNorm::randers({0.3, 0.0});
    CHECK(R.eval(vec({1, 0})) == doctest::Approx(1.3).epsilon(1e-15));
    CHECK(R.eval(vec({-1, 0})) == doctest::Approx(0.7).epsilon(1e-15));
    CHECK_FALSE(R.is_reversible());

    const auto L = MinkowskiNorm::lp_smooth(2, 4, 0.0);
    CHECK(L.eval(vec({1, 1})) == doctest::Approx(std::pow(2.0, 0.25)).epsilon(1e-15));
    // pure l4 loses strong convexity on the axes
    try {
        L.fundamental_tensor(vec({1, 0}));
        FAIL("expected NotPositiveDefinite");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::NotPositiveDefinite);
    }
}

TEST_CASE("eval errors") {
    const auto E = MinkowskiNorm::euclidean(2);
    CHECK_THROWS_AS(E.eval(vec({0, 0})), Error);
    try {
        E.eval(vec({1e-15, 0}));
        FAIL("expected ZeroVector");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::ZeroVector);
    }
    try {
        MinkowskiNorm::randers({1.2, 0.0});
        FAIL("expected InvalidParams");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::InvalidParams);
    }
    CHECK_THROWS_AS(MinkowskiNorm::lp_smooth(2, 3, 0.1), Error);
    CHECK_THROWS_AS(MinkowskiNorm::lp_smooth(2, 4, -0.1), Error);
}

TEST_CASE("fundamental tensor") {
    SUBCASE("euclidean is the identity") {
        const Metric m = MinkowskiNorm::euclidean(3).fundamental_tensor(vec({0.3, -2, 5}));
        CHECK(m.g == MatN::Identity(3, 3));
        CHECK(m.g_inv == MatN::Identity(3, 3));
    }
    SUBCASE("randers Euler identity") {
        const auto R = MinkowskiNorm::randers({0.3, 0.0});
        const Metric m = R.fundamental_tensor(vec({1, 0}));
        VecN y(2);
        y << 1, 0;
        CHECK(y.dot(m.g * y) == doctest::Approx(1.69).epsilon(1e-14));
        CHECK((m.g * m.g_inv - MatN::Identity(2, 2)).norm() < 1e-14);
    }
    SUBCASE("lp_smooth matches finite differences of F^2/2") {
        const auto L = MinkowskiNorm::lp_smooth(2, 4, 0.1);
        VecN y(2);
        y << 1, 2;
        const MatN fd = fd_hessian_of_half_sq(L, y, 1e-4);
        const MatN g = L.fundamental_tensor(Vector(y)).g;
        CHECK((g - fd).cwiseAbs().maxCoeff() < 1e-6);
    }
    SUBCASE("randers analytic agrees with AD") {
        const auto A = MinkowskiNorm::randers({0.2, -0.4});
        const auto D = A.with_mode(DerivativeMode::forward_ad);
        for (const VecN& d : quasi_random_directions(2, 50)) {
            CHECK((A.fundamental_tensor(Vector(d)).g - D.fundamental_tensor(Vector(d)).g).norm() < 1e-13);
        }
    }
}

TEST_CASE("cartan tensor") {
    SUBCASE("euclidean vanishes") {
        const auto E = MinkowskiNorm::euclidean(2);
        CHECK(E.cartan(vec({1, 2})).max_abs() == 0.0);
        CHECK(E.cartan_deriv(vec({1, 2})).max_abs() == 0.0);
    }
    SUBCASE("randers contraction with y vanishes") {
        const auto R = MinkowskiNorm::randers({0.3, 0.0});
        const Tensor3 C = R.cartan(vec({0, 1}));
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) CHECK(std::abs(C(i, j, 1)) < 1e-10);
        CHECK(C.max_abs() > 0.01);
    }
    SUBCASE("lp_smooth matches finite differences of g") {
        const auto L = MinkowskiNorm::lp_smooth(2, 4, 0.1);
        VecN y(2);
        y << 1, 1;
        const Tensor3 C = L.cartan(Vector(y));
        const double h = 1e-5;
        for (int k = 0; k < 2; ++k) {
            VecN yp = y, ym = y;
            yp[k] += h;
            ym[k] -= h;
            const MatN dg = (L.fundamental_tensor(Vector(yp)).g - L.fundamental_tensor(Vector(ym)).g) / (2 * h);
            for (int i = 0; i < 2; ++i)
                for (int j = 0; j < 2; ++j) CHECK(std::abs(C(i, j, k) - 0.5 * dg(i, j)) < 1e-5);
        }
    }
    SUBCASE("C_ijkl is the derivative of C_ijk") {
        for (const auto& F : {MinkowskiNorm::randers({0.3, 0.1}), MinkowskiNorm::lp_smooth(2, 4, 0.1)}) {
            VecN y(2);
            y << 0.7, -1.1;
            const Tensor4 D = F.cartan_deriv(Vector(y));
            const double h = 1e-5;
            for (int l = 0; l < 2; ++l) {
                VecN yp = y, ym = y;
                yp[l] += h;
                ym[l] -= h;
                const Tensor3 Cp = F.cartan(Vector(yp)), Cm = F.cartan(Vector(ym));
                for (int i = 0; i < 2; ++i)
                    for (int j = 0; j < 2; ++j)
                        for (int k = 0; k < 2; ++k)
                            CHECK(std::abs(D(i, j, k, l) - (Cp(i, j, k) - Cm(i, j, k)) / (2 * h)) < 1e-6);
            }
        }
    }
}

TEST_CASE("legendre transform") {
    SUBCASE("euclidean identity map") {
        const auto E = MinkowskiNorm::euclidean(2);
        const Covector L = E.legendre(vec({1, 2}));
        CHECK(L[0] == 1.0);
        CHECK(L[1] == 2.0);
        const Vector y = E.legendre_inv(L);
        CHECK(y[0] == 1.0);
        CHECK(y[1] == 2.0);
    }
    SUBCASE("randers is norm preserving") {
        const auto R = MinkowskiNorm::randers({0.3, 0.0});
        const Vector y = vec({2, 1});
        CHECK(std::abs(R.dual_norm(R.legendre(y)) - R.eval(y)) < 1e-10);
    }
    SUBCASE("randers inverse against brute-force maximiser") {
        const auto R = MinkowskiNorm::randers({0.3, 0.0});
        VecN xi(2);
        xi << 1, 0;
        const DualOracle oracle = brute_force_dual(R, xi, 100000);
        const VecN expected = oracle.value * oracle.maximiser;
        const Vector y = R.legendre_inv(Covector(xi));
        CHECK((y.components() - expected).norm() < 1e-6);
        // closed-form randers dual norm: (sqrt((1-|b|^2)|xi|^2 + (b.xi)^2) - b.xi) / (1-|b|^2)
        const double closed = (std::sqrt(0.91 + 0.09) - 0.3) / 0.91;
        CHECK(R.dual_norm(Covector(xi)) == doctest::Approx(closed).epsilon(1e-12));
        CHECK(oracle.value == doctest::Approx(closed).epsilon(1e-10));
    }
    SUBCASE("zero covector") {
        CHECK_THROWS_AS(MinkowskiNorm::randers({0.3, 0.0}).legendre_inv(covec({0, 0})), Error);
    }
}

TEST_CASE("property: norm invariants over 1000 directions") {
    for (const auto& F : all_norms()) {
        CAPTURE(to_string(F.family()));
        CAPTURE(to_string(F.derivative_mode()));
        const bool fd = F.derivative_mode() == DerivativeMode::finite_difference;
        const double hom_tol = fd ? 1e-8 : 1e-12;
        const double id_tol = fd ? 1e-6 : 1e-10;
        const int n = F.dim();
        for (const VecN& d : quasi_random_directions(n, 1000)) {
            const Vector y(1.7 * d);
            const double f = F.eval(y);
            REQUIRE(f > 0);
            for (double lam : {0.5, 2.0, 10.0}) CHECK(std::abs(F.eval(lam * y) - lam * f) <= hom_tol * lam * f);

            const Metric m = F.fundamental_tensor(y);
            CHECK(std::abs(y.components().dot(m.g * y.components()) - f * f) <= id_tol * f * f);
            CHECK(Eigen::SelfAdjointEigenSolver<MatN>(m.g).eigenvalues().minCoeff() > 0);

            const Tensor3 C = F.cartan(y);
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) {
                    double acc = 0;
                    for (int k = 0; k < n; ++k) acc += C(i, j, k) * y[k];
                    CHECK(std::abs(acc) <= id_tol);
                }

            const Covector L = F.legendre(y);
            CHECK((F.legendre_inv(L).components() - y.components()).norm() <= 1e-10 * y.components().norm());
            CHECK(std::abs(F.dual_norm(L) - f) <= 1e-10 * f);
        }
    }
}

TEST_CASE("irreversibility is representable") {
    const auto R = MinkowskiNorm::randers({0.3, 0.0});
    CHECK(R.eval(vec({1, 0})) != R.eval(vec({-1, 0})));
}

TEST_CASE("validate_norm") {
    SUBCASE("euclidean") {
        NormSpec s;
        const ValidationReport r = validate_norm(s, 1000);
        CHECK(r.valid);
        for (const auto& id : r.identities) {
            CAPTURE(id.name);
            CHECK(id.max_violation < 1e-12);
        }
        CHECK(r.all_pass());
    }
    SUBCASE("randers") {
        NormSpec s;
        s.family = NormFamily::randers;
        s.b = {0.3, 0.0};
        const ValidationReport r = validate_norm(s, 1000);
        CHECK(r.valid);
        for (const auto& id : r.identities) {
            CAPTURE(id.name);
            CHECK(id.max_violation < 1e-9);
        }
        CHECK(r.all_pass());
    }
    SUBCASE("invalid randers drift is reported") {
        NormSpec s;
        s.family = NormFamily::randers;
        s.b = {1.2, 0.0};
        const ValidationReport r = validate_norm(s, 1000);
        CHECK_FALSE(r.valid);
        REQUIRE(r.errors.size() == 1);
        CHECK(r.errors[0].find("InvalidParams") != std::string::npos);
        CHECK_FALSE(r.all_pass());
    }
    SUBCASE("lp_smooth in 3D, all modes") {
        for (auto mode : {DerivativeMode::analytic, DerivativeMode::forward_ad, DerivativeMode::finite_difference}) {
            NormSpec s;
            s.family = NormFamily::lp_smooth;
            s.dim = 3;
            s.p = 4;
            s.epsilon = 0.1;
            s.derivative_mode = mode;
            const ValidationReport r = validate_norm(s, 200);
            CAPTURE(to_string(mode));
            CHECK(r.all_pass());
        }
    }
}
