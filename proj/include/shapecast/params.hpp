#pragma once

namespace shapecast {

enum class CoordMode { normalized, raw };

// Model parameters with the published defaults. thr1 gates shape distance,
// thr2 gates the active-cell ratio, clu_coef scales the scenario-clustering
// threshold with the forecast box size.
struct ModelParams {
    double thr1 = 0.15;
    double thr2 = 0.05;
    double clu_coef = 0.0054;
    int radius = 2;
    int input_window = 12;
    int horizon = 6;
    double stride_frac = 0.5;
    double dim_var_frac = 0.25;
    int min_matches = 1;
    double relax_factor = 1.5;
    int max_relax_steps = 3;

    void validate() const;
};

}  // namespace shapecast
