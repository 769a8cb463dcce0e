#pragma once

#include "anisoflow/schemes.hpp"

#include <string>
#include <utility>
#include <vector>

namespace anisoflow {

/// Worst value seen at one snapshot (or one step) against the bound in force
/// there.
struct CheckDetail {
    double t = 0.0;
    double observed = 0.0;
    double bound = 0.0;
};

/// margin > 0 means the observed value sits inside its bound.
struct CheckResult {
    std::string name;
    bool pass = false;
    double observed = 0.0;
    double bound = 0.0;
    double margin = 0.0;
    std::vector<CheckDetail> details;
    std::vector<std::pair<std::string, double>> summary;

    double summary_value(const std::string& key) const;
};

/// Homothetic shrinking of a Wulff shape: the radial profile keeps its form and
/// its scale follows sqrt(1 - t/T), T = r0^2 / (2n). Throws WrongInitialData.
/// Summary: homothety, fitted_T, T.
CheckResult check_wulff_selfsimilar(const RunRecord& record);

/// dA/dt = -int H^2 dmu at interior snapshots (2% relative), monotone area and
/// the time-integrated dissipation bound. Throws InsufficientSnapshots.
CheckResult check_area_identity(const RunRecord& record);

/// Lower bound on H_min(t) from its initial value, monotone H_min and the
/// maximal-time bound. Throws NotMeanConvex.
CheckResult check_hmin_bound(const RunRecord& record);

/// Smallest principal curvature stays >= -1e-6 and turns positive after five
/// steps. Throws NotConvexInitially.
CheckResult check_convexity(const RunRecord& record);

/// Radial gaps between an enclosed Wulff sphere, a surface and an enclosing
/// Wulff sphere never shrink. Records must come from one synchronized run.
/// Throws NotNestedInitially.
CheckResult check_comparison(const RunRecord& inner, const RunRecord& outer, const RunRecord& mid);

/// Time derivatives of the induced metric and of the normal, by centered
/// differences over consecutive snapshots, against
///   d/dt g_ij = -2 H h_ij - 2 C(n)(X_i, X_j, grad H),   d/dt n = -grad H.
/// Throws RedistributionActive. Summary: metric_error, normal_error,
/// cartan_term (largest |C(n)(X_i, X_j, grad H)|).
CheckResult check_evolution_identities(const RunRecord& record);

/// F(-(X - center)) for each snapshot point, using the record's norm and
/// center (level-set snapshots take them from the final grid).
std::vector<double> snapshot_radii(const RunRecord& record, const Snapshot& snap);

}  // namespace anisoflow
