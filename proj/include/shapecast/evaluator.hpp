#pragma once

#include <array>
#include <optional>
#include <vector>

#include "shapecast/cube.hpp"
#include "shapecast/transport.hpp"

namespace shapecast {

double mse(const std::vector<double>& obs, const std::vector<double>& pred);

// Ratio of past-future fatalities to sequence fatalities; the escalation
// indicator. Requires a non-zero sequence total.
double r_inc(const Sequence3D& seq, const Sequence3D& pf);

// sign(x) * ln(1 + |x|)
double log_modulus(double x);

// ln((benchmark + 1) / (model + 1)); positive means the model wins.
double log_ratio(double metric_benchmark, double metric_model);

struct ZoneMetrics {
    double abs_error = 0.0;            // |sum(obs) - sum(pred)| over the box
    std::optional<double> emd;         // absent when either side has no mass
    double mape_logmod = 0.0;          // log-modulus of the relative error
    double max_error = 0.0;            // max cell-wise |obs - pred|
};

// obs and pred must cover the same box. The relative error denominator is
// sum(obs), smoothed to 1 when the observed total is zero.
ZoneMetrics zone_metrics(const Sequence3D& obs, const Sequence3D& pred);

using SpatialKernel = std::array<std::array<double, 5>, 5>;

// Classical spatially-lagged distance: per month, the absolute difference of
// kernel-weighted sums, accumulated over months.
double spatial_distance_baseline(const Sequence3D& p1, const Sequence3D& p2,
                                 const SpatialKernel& kernel);

// Element-wise absolute-difference total.
double euclidean_baseline(const Sequence3D& p1, const Sequence3D& p2);

struct SeqSample {
    DensityCube cube;
    Dims3 dims;
    double r_inc = 0.0;
    std::optional<DensityCube> pf_cube;  // absent when the past future is all zero
};

// Zone sequences with their observed past futures, sampled at every
// `month_step`-th train-end month where both windows fit the data.
std::vector<SeqSample> collect_sequences(const FatalityField& field, const ModelParams& params,
                                         int first_train_end, int last_train_end,
                                         int month_step = 1);

struct CorrelationBin {
    double lo = 0.0, hi = 0.0;
    long n = 0;                 // pairs contributing delta r_inc
    double mean_delta_r_inc = 0.0, se_delta_r_inc = 0.0;
    long n_pf = 0;              // pairs with both past futures non-zero
    double mean_emd_pf = 0.0, se_emd_pf = 0.0;
};

// Pairs samples with comparable dims (within +-dim_var_frac) and active-cell
// counts (ratio gate), bins them by pattern EMD, and reports the mean
// outcome differences per bin with standard errors sd/sqrt(n).
std::vector<CorrelationBin> pattern_future_correlation(const std::vector<SeqSample>& samples,
                                                       const ModelParams& params,
                                                       double bin_width = 0.05);

}  // namespace shapecast
