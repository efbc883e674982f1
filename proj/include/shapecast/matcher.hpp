#pragma once

#include <optional>
#include <string>
#include <vector>

#include "shapecast/csv.hpp"
#include "shapecast/cube.hpp"
#include "shapecast/grid.hpp"
#include "shapecast/transport.hpp"

namespace shapecast {

// Dense history tensor with 3D prefix sums so all-zero candidate windows are
// skipped in O(1). Built once per field; reads outside the extent are zero.
class HistoryIndex {
public:
    explicit HistoryIndex(const FatalityField& field);

    bool empty() const { return !ext_.has_value(); }
    const std::optional<GridExtent>& extent() const { return ext_; }
    long long box_sum(Origin3 origin, Dims3 dims) const;
    Sequence3D extract(Origin3 origin, Dims3 dims) const;

private:
    std::optional<GridExtent> ext_;
    int nla_ = 0, nlo_ = 0, nt_ = 0;
    std::vector<long long> vals_;    // (lat, lon, t) dense, local indices
    std::vector<long long> prefix_;  // (nla+1)(nlo+1)(nt+1) corner sums
};

struct MatchResult {
    Origin3 origin;
    Dims3 dims;
    int rotation = 0;
    double emd = 0.0;
    double r = 0.0;
    Sequence3D past_future;  // same spatial box, next `horizon` months
    bool relaxed = false;
};

// Candidate window dimensions: the input dims varied by +-dim_var_frac per
// axis (round half up, clamped to >= 1), as a deduplicated Cartesian product.
std::vector<Dims3> window_dims(Dims3 input_dims, double dim_var_frac);

struct SearchOptions {
    int workers = 1;
    CoordMode coords = CoordMode::normalized;
    // The input's own window, excluded from its match set.
    std::optional<std::pair<Origin3, Dims3>> exclude;
};

struct SearchOutcome {
    std::vector<MatchResult> matches;
    long long windows_scanned = 0;
    long long windows_nonzero = 0;
    int relax_steps = 0;
    bool fallback = false;  // nothing usable found; forecast zero
};

// Scans every candidate dimension triple on its stride lattice (stride =
// max(1, floor(dim * stride_frac)) per axis), keeping windows whose past
// future still fits inside [epoch, train_end]. Output order is
// (t0, lat0, lon0, dims) regardless of worker count.
SearchOutcome rolling_search(const HistoryIndex& history, const DensityCube& input_cube,
                             Dims3 input_dims, int train_end, const ModelParams& params,
                             const SearchOptions& options = {});

// Repeats rolling_search with thresholds scaled by relax_factor (at most
// max_relax_steps times) until min_matches are found; matches from relaxed
// passes are flagged.
SearchOutcome relax_search(const HistoryIndex& history, const DensityCube& input_cube,
                           Dims3 input_dims, int train_end, const ModelParams& params,
                           const SearchOptions& options = {});

void append_provenance(csv::Writer& w, long long zone_id, const std::vector<MatchResult>& matches);
std::vector<std::string> provenance_header();

}  // namespace shapecast
