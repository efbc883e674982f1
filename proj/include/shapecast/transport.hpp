#pragma once

#include <filesystem>
#include <vector>

#include "shapecast/cube.hpp"
#include "shapecast/params.hpp"

namespace shapecast {

struct TransportPlan {
    int n1 = 0, n2 = 0;
    std::vector<double> gamma;  // row-major n1 x n2 flows
    std::vector<double> cost;   // pairwise Euclidean distances
    double objective = 0.0;

    double flow(int i, int j) const { return gamma[size_t(i) * n2 + j]; }
    double cost_at(int i, int j) const { return cost[size_t(i) * n2 + j]; }
};

// Exact optimum of the balanced transportation problem
//   min sum_ij gamma_ij * c_ij   s.t. marginals equal the cube weights,
// solved with a transportation-specialized network simplex. Throws
// ValidationError when the two masses differ by more than 1e-6.
TransportPlan solve_ot(const DensityCube& source, const DensityCube& target);

struct EmdResult {
    double value = 0.0;
    int rotation = 0;  // quarter-turns applied to the first argument
};

// Minimum transport cost over the four orientations around the time axis.
EmdResult emd_min_rotation(const DensityCube& a, const DensityCube& b);
double emd(const DensityCube& a, const DensityCube& b);
// Single fixed orientation (k = 0); this restriction makes emd a metric.
double emd_fixed(const DensityCube& a, const DensityCube& b);

// |tanh(ln(n_active_a / n_active_b))|, symmetric in its arguments.
double active_ratio(const DensityCube& a, const DensityCube& b);

struct Similarity {
    bool similar = false;
    double emd = 0.0;
    double r = 0.0;
    int rotation = 0;
};

// Both gates are strict: emd < thr1 and r < thr2.
Similarity is_similar(const DensityCube& a, const DensityCube& b, const ModelParams& params);

void dump_plan_csv(const TransportPlan& plan, const std::filesystem::path& path);

}  // namespace shapecast
