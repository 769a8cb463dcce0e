#pragma once

#include "anisoflow/errors.hpp"
#include "anisoflow/tensor.hpp"

#include <optional>
#include <string>
#include <vector>

namespace anisoflow {

enum class NormFamily { euclidean, randers, lp_smooth };
enum class DerivativeMode { analytic, forward_ad, finite_difference };

std::string_view to_string(NormFamily family);
std::string_view to_string(DerivativeMode mode);
NormFamily norm_family_from_string(std::string_view name);
DerivativeMode derivative_mode_from_string(std::string_view name);

/// Unvalidated norm parameters as they come out of a config file.
struct NormSpec {
    NormFamily family = NormFamily::euclidean;
    int dim = 2;
    std::vector<double> b;  // randers drift covector
    int p = 4;              // lp_smooth exponent
    double epsilon = 0.1;   // lp_smooth quadratic blend
    DerivativeMode derivative_mode = DerivativeMode::analytic;

    bool operator==(const NormSpec&) const = default;
};

/// Returns a description of the first violated norm axiom, if any.
std::optional<std::string> check_norm_params(const NormSpec& spec);

struct Metric {
    MatN g;
    MatN g_inv;
};

inline constexpr double kZeroVectorThreshold = 1e-14;

/// A Minkowski norm F on R^dim. Immutable; every member is a pure function of
/// its arguments and safe to call concurrently.
///
/// All derivative tensors are taken with respect to the direction y:
///   g_ij  = 1/2 [F^2]_{y^i y^j}
///   C_ijk = 1/2 dg_ij/dy^k,   C_ijkl = dC_ijk/dy^l
/// For euclidean and randers the analytic mode uses closed forms; lp_smooth has
/// no closed form registered and falls back to forward-mode AD.
class MinkowskiNorm {
public:
    explicit MinkowskiNorm(NormSpec spec);

    static MinkowskiNorm euclidean(int dim, DerivativeMode mode = DerivativeMode::analytic);
    static MinkowskiNorm randers(std::vector<double> b, DerivativeMode mode = DerivativeMode::analytic);
    static MinkowskiNorm lp_smooth(int dim, int p, double epsilon,
                                   DerivativeMode mode = DerivativeMode::forward_ad);

    const NormSpec& spec() const noexcept { return spec_; }
    NormFamily family() const noexcept { return spec_.family; }
    int dim() const noexcept { return spec_.dim; }
    DerivativeMode derivative_mode() const noexcept { return spec_.derivative_mode; }
    bool is_reversible() const;

    /// Same norm, different derivative strategy.
    MinkowskiNorm with_mode(DerivativeMode mode) const;

    double eval(const Vector& y) const;
    Metric fundamental_tensor(const Vector& y) const;
    Tensor3 cartan(const Vector& y) const;
    Tensor4 cartan_deriv(const Vector& y) const;

    /// L(y)_a = g_ab(y) y^b, the gradient of F^2/2.
    Covector legendre(const Vector& y) const;

    /// Newton iteration on y -> L(y); the Jacobian is exactly g(y).
    Vector legendre_inv(const Covector& xi) const;
    /// Same, starting the iteration from a nearby solution.
    Vector legendre_inv(const Covector& xi, const Vector& guess) const;

    /// F*(xi) = max{xi(y) : F(y) = 1}.
    double dual_norm(const Covector& xi) const;

    // S-curvature of a Minkowski space with a constant volume density vanishes
    // identically, so the mean curvature and its anisotropic version coincide.
    static constexpr double s_curvature() { return 0.0; }

    // Newton controls for legendre_inv.
    static constexpr double kLegendreTolerance = 1e-12;
    static constexpr int kLegendreMaxIterations = 50;

private:
    void require_nonzero(const VecN& y) const;
    VecN gradient_half_sq(const VecN& y) const;
    MatN hessian_half_sq(const VecN& y) const;

    NormSpec spec_;
    VecN drift_;
};

struct IdentityViolation {
    std::string name;
    double max_violation = 0.0;
    double tolerance = 0.0;
    bool pass = true;
};

struct ValidationReport {
    NormSpec spec;
    int sample_count = 0;
    bool valid = true;
    std::vector<std::string> errors;
    std::vector<IdentityViolation> identities;
    // derivative tensors against an independent derivative strategy
    std::vector<IdentityViolation> cross_checks;
    double min_eigenvalue = 0.0;

    bool all_pass() const;
};

/// Directions on the unit Euclidean sphere from a fixed low-discrepancy
/// sequence (golden-angle spiral), so every run sees the same samples.
std::vector<VecN> quasi_random_directions(int dim, int count);

/// Probes homogeneity, the Euler identities, positive definiteness, the Cartan
/// contraction, the Legendre round trip and an analytic-vs-finite-difference
/// cross-check. Parameter errors are reported, not thrown.
ValidationReport validate_norm(const NormSpec& spec, int sample_count);

}  // namespace anisoflow
