#pragma once

#include <vector>

#include "shapecast/matcher.hpp"

namespace shapecast {

// Maps each source cell to floor((i + 0.5) * target/source) per axis and
// sums collisions, so the total is conserved exactly.
Sequence3D rescale_past_future(const Sequence3D& pf, Dims3 target_dims);

struct Projection {
    std::vector<double> values;  // lon marginal, then lat, then time
    bool all_zero = false;
};

// Marginal sums of the mass-normalized sequence along each axis.
Projection project_axes(const Sequence3D& seq);

struct Scenario {
    std::vector<int> members;  // indices into the match list
    Sequence3D mean_values;
    double probability = 0.0;
    double mean_member_emd = 0.0;
};

// Single-linkage clustering of the reshaped past futures: matches whose
// projection distance is below clu_coef * (W_lat * W_lon * H) share a
// scenario. Matched rotations are inverted first so every past future is
// expressed in the input's orientation.
std::vector<Scenario> cluster_matches(const std::vector<MatchResult>& matches, Dims3 target_dims,
                                      const ModelParams& params);

struct Forecast {
    long long zone_id = 0;
    Origin3 origin;  // bbox corner; origin.t is the first forecast month
    Dims3 dims;      // (W_lat, W_lon, H)
    std::vector<double> values;
    double chosen_probability = 0.0;
    int chosen_scenario = -1;

    double& at(int la, int lo, int t) {
        return values[(size_t(la) * dims.w_lon + lo) * dims.len + t];
    }
    double at(int la, int lo, int t) const {
        return values[(size_t(la) * dims.w_lon + lo) * dims.len + t];
    }
};

// Places the largest scenario's mean at the zone's bounding box. Size ties
// break on lowest mean member EMD, then lowest scenario index.
Forecast make_forecast(const ActiveZone& zone, const std::vector<Scenario>& scenarios,
                       int t_forecast_start);

Forecast zero_forecast(const ActiveZone& zone, int t_forecast_start, int horizon);

// Cells covered by several zone forecasts are replaced by the cell-wise mean
// of the contributing predictions in every contributing forecast.
std::vector<Forecast> merge_zone_forecasts(std::vector<Forecast> forecasts);

std::vector<ForecastRecord> forecast_records(const std::vector<Forecast>& forecasts);

}  // namespace shapecast
