#pragma once

#include "anisoflow/schemes.hpp"

namespace anisoflow::detail {

/// du/dt at nodes within the band (NaN elsewhere) and F(V) = F*(du).
struct LevelSetRates {
    std::vector<double> rate;
    std::vector<double> speed;
    std::vector<VecN> hint;
};

LevelSetRates levelset_rates(const LevelSetGrid& grid, double band_cells);
LevelSetGrid levelset_advance(const LevelSetGrid& grid, LevelSetRates rates, double dt);

/// Bilinear interpolation skipping NaN corners.
double interpolate(const LevelSetGrid& grid, const std::vector<double>& field, const VecN& p);

}  // namespace anisoflow::detail
