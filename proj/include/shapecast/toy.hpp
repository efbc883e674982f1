#pragma once

#include "shapecast/evaluator.hpp"

namespace shapecast::toy {

// Built-in 5x5x3 worked example used by `toy-verify` and the regression
// tests: three small patterns whose pairwise distances demonstrate that the
// transport distance ranks shape similarity where a spatially-lagged score
// and a cell-wise difference cannot.
Sequence3D pattern(int index);  // 1, 2 or 3

// Distance-decayed 5x5 neighbor weights for the spatially-lagged baseline.
const SpatialKernel& spatial_kernel();

struct Report {
    double emd_12 = 0, emd_13 = 0;  // raw-coordinate transport distances
    double sp_12 = 0, sp_13 = 0;    // spatially-lagged baseline
    double ed_12 = 0, ed_13 = 0;    // cell-wise absolute difference
    bool emd_prefers_p2 = false;    // emd_12 < emd_13
    bool sp_prefers_p3 = false;     // sp_12 > sp_13
    bool ed_tied = false;           // ed_12 == ed_13
};

Report run();

}  // namespace shapecast::toy
