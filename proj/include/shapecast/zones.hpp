#pragma once

#include <utility>
#include <vector>

#include "shapecast/grid.hpp"
#include "shapecast/params.hpp"

namespace shapecast {

struct Cell {
    int lat = 0, lon = 0;
    bool operator==(const Cell&) const = default;
    auto operator<=>(const Cell&) const = default;  // row-major order
};

struct ActiveCellMask {
    int t_start = 0, t_end = 0;
    int lat0 = 0, lon0 = 0;
    int n_lat = 0, n_lon = 0;
    std::vector<uint8_t> active;  // row-major (lat, lon)

    bool at_local(int la, int lo) const { return active[size_t(la) * n_lon + lo] != 0; }
};

struct Bbox {
    int lat_min = 0, lat_max = 0, lon_min = 0, lon_max = 0;
    int n_lat() const { return lat_max - lat_min + 1; }
    int n_lon() const { return lon_max - lon_min + 1; }
};

// A connected group of active cells; cells are absolute grid coordinates,
// kept sorted row-major. Ids are 1-based in scan order of the minimum cell.
struct ActiveZone {
    int zone_id = 0;
    std::vector<Cell> cells;
    Bbox bbox;

    bool contains(Cell c) const;
};

ActiveCellMask active_mask(const AggregatedGrid& grid);

// Union-find labeling: two active cells join the same zone iff linked by a
// chain of active cells with consecutive Chebyshev distance <= radius.
std::vector<ActiveZone> label_zones(const ActiveCellMask& mask, int radius = 2);

// Drops single-cell zones and renumbers.
std::vector<ActiveZone> erode(const std::vector<ActiveZone>& zones);

struct MergedZone {
    ActiveZone zone;
    bool overlapped = false;  // cells were shared; forecasts get averaged
};

// Zones sharing at least one cell are merged into their cell-set union.
std::vector<MergedZone> dilate_union(const std::vector<ActiveZone>& zones_a,
                                     const std::vector<ActiveZone>& zones_b);

struct CoverageEntry {
    int train_end = 0;
    double pct_fatalities = 0.0;
    double pct_active_cells = 0.0;
};

struct CoverageSeries {
    std::vector<CoverageEntry> entries;
    std::vector<int> skipped_months;  // insufficient history for window + test span
};

// For each train-end month: zones are built from the trailing input window
// and coverage is measured over the following `horizon` months. A zero
// denominator (no test fatalities / no test-active cells) reports 1.
CoverageSeries coverage_stats(const FatalityField& field, const ModelParams& params,
                              int first_train_end, int last_train_end, int workers = 1);

}  // namespace shapecast
