#include "anisoflow/geometry_kernel.hpp"

#include <Eigen/Eigenvalues>

#include <array>
#include <cmath>
#include <limits>

namespace anisoflow {

namespace {

struct Tolerances {
    double homogeneity;
    double identity;
    double cross_check;
};

Tolerances tolerances_for(DerivativeMode mode) {
    if (mode == DerivativeMode::finite_difference) return {1e-8, 1e-6, 1e-6};
    return {1e-12, 1e-10, 1e-6};
}

class Tracker {
public:
    void add(const char* name, double tol) { entries_.push_back({name, 0.0, tol, true}); }
    void observe(std::size_t i, double v) {
        if (!std::isfinite(v)) v = std::numeric_limits<double>::infinity();
        entries_[i].max_violation = std::max(entries_[i].max_violation, v);
    }
    std::vector<IdentityViolation> finish() {
        for (auto& e : entries_) e.pass = e.max_violation <= e.tolerance;
        return entries_;
    }

private:
    std::vector<IdentityViolation> entries_;
};

enum Id : std::size_t {
    kHomogeneity,
    kLegendreHomogeneity,
    kEuler,
    kGZeroHomogeneity,
    kPositiveDefinite,
    kCartanContraction,
    kCartanSymmetry,
    kLegendreRoundTrip,
    kDualNorm,
    kCrossCheckG,
    kCrossCheckCartan,
};

}  // namespace

ValidationReport validate_norm(const NormSpec& spec, int sample_count) {
    ValidationReport report;
    report.spec = spec;
    report.sample_count = sample_count;
    if (sample_count < 100) {
        report.valid = false;
        report.errors.push_back("InvalidParams: sample_count must be >= 100");
        return report;
    }
    if (auto err = check_norm_params(spec)) {
        report.valid = false;
        report.errors.push_back("InvalidParams: " + *err);
        return report;
    }

    const MinkowskiNorm norm(spec);
    const MinkowskiNorm reference = norm.with_mode(spec.derivative_mode == DerivativeMode::finite_difference
                                                       ? DerivativeMode::forward_ad
                                                       : DerivativeMode::finite_difference);
    const Tolerances tol = tolerances_for(spec.derivative_mode);
    const int n = spec.dim;

    Tracker t;
    t.add("homogeneity", tol.homogeneity);
    t.add("legendre_homogeneity", tol.identity);
    t.add("euler_identity", tol.identity);
    t.add("g_zero_homogeneity", tol.identity);
    t.add("positive_definite", 0.0);
    t.add("cartan_contraction", tol.identity);
    t.add("cartan_symmetry", tol.identity);
    t.add("legendre_round_trip", tol.identity);
    t.add("dual_norm_consistency", tol.identity);
    t.add("fd_cross_check_g", tol.cross_check);
    t.add("fd_cross_check_cartan", tol.cross_check);

    double min_eig = std::numeric_limits<double>::infinity();
    const std::array<double, 3> lambdas = {0.5, 2.0, 10.0};
    const auto dirs = quasi_random_directions(n, sample_count);

    for (std::size_t s = 0; s < dirs.size(); ++s) {
        // vary magnitudes so the homogeneity identities are not trivially met
        const double magnitude = 0.25 + 3.0 * std::fmod(static_cast<double>(s) * 0.7548776662466927, 1.0);
        const Vector y(magnitude * dirs[s]);
        try {
            const double F = norm.eval(y);
            const Covector L = norm.legendre(y);
            const Metric m = norm.fundamental_tensor(y);

            for (double lam : lambdas) {
                const Vector ly = lam * y;
                t.observe(kHomogeneity, std::abs(norm.eval(ly) - lam * F) / (lam * F));
                t.observe(kLegendreHomogeneity,
                          (norm.legendre(ly).components() - lam * L.components()).norm() / (lam * F));
                t.observe(kGZeroHomogeneity,
                          (norm.fundamental_tensor(ly).g - m.g).cwiseAbs().maxCoeff() / m.g.cwiseAbs().maxCoeff());
            }

            const VecN& yc = y.components();
            t.observe(kEuler, std::abs(yc.dot(m.g * yc) - F * F) / (F * F));

            Eigen::SelfAdjointEigenSolver<MatN> eig(m.g);
            min_eig = std::min(min_eig, eig.eigenvalues().minCoeff());

            const Tensor3 C = norm.cartan(y);
            double contraction = 0.0;
            double asym = 0.0;
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) {
                    double acc = 0.0;
                    for (int k = 0; k < n; ++k) {
                        acc += C(i, j, k) * yc[k];
                        asym = std::max({asym, std::abs(C(i, j, k) - C(j, i, k)), std::abs(C(i, j, k) - C(i, k, j))});
                    }
                    contraction = std::max(contraction, std::abs(acc));
                }
            // C scales like 1/|y|; the contraction is 0-homogeneous
            t.observe(kCartanContraction, contraction);
            t.observe(kCartanSymmetry, asym * magnitude);

            const Vector back = norm.legendre_inv(L);
            t.observe(kLegendreRoundTrip, (back.components() - yc).norm() / yc.norm());
            t.observe(kDualNorm, std::abs(norm.dual_norm(L) - F) / F);

            const Metric mr = reference.fundamental_tensor(y);
            t.observe(kCrossCheckG, (m.g - mr.g).cwiseAbs().maxCoeff() / m.g.cwiseAbs().maxCoeff());
            const Tensor3 Cr = reference.cartan(y);
            double cdiff = 0.0;
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j)
                    for (int k = 0; k < n; ++k) cdiff = std::max(cdiff, std::abs(C(i, j, k) - Cr(i, j, k)));
            t.observe(kCrossCheckCartan, cdiff * magnitude);
        } catch (const Error& e) {
            report.valid = false;
            report.errors.push_back(e.what());
            break;
        }
    }

    report.identities = t.finish();
    report.cross_checks.assign(report.identities.begin() + kCrossCheckG, report.identities.end());
    report.identities.resize(kCrossCheckG);
    report.min_eigenvalue = min_eig;
    for (auto& id : report.identities) {
        if (id.name == "positive_definite") {
            id.max_violation = min_eig > 0.0 ? 0.0 : -min_eig;
            id.pass = min_eig > 0.0;
        }
    }
    return report;
}

}  // namespace anisoflow
