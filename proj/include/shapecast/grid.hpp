#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <unordered_map>
#include <vector>

namespace shapecast {

// Inclusive bounds on all three axes. month_idx is a single global integer
// axis; calendar conversion happens outside the engine.
struct GridExtent {
    int lon_min = 0, lon_max = 0;
    int lat_min = 0, lat_max = 0;
    int month_min = 0, month_max = 0;

    int n_lon() const { return lon_max - lon_min + 1; }
    int n_lat() const { return lat_max - lat_min + 1; }
    int n_months() const { return month_max - month_min + 1; }
    bool contains(int lon, int lat, int month) const {
        return lon >= lon_min && lon <= lon_max && lat >= lat_min && lat <= lat_max &&
               month >= month_min && month <= month_max;
    }
};

struct CellMonthKey {
    int lon = 0, lat = 0, month = 0;
    bool operator==(const CellMonthKey&) const = default;
};

struct CellMonthKeyHash {
    size_t operator()(const CellMonthKey& k) const {
        uint64_t h = 1469598103934665603ull;
        for (uint64_t v : {uint64_t(uint32_t(k.lon)), uint64_t(uint32_t(k.lat)),
                           uint64_t(uint32_t(k.month))}) {
            h ^= v;
            h *= 1099511628211ull;
        }
        return size_t(h);
    }
};

// Sparse monthly fatality counts on an integer lattice. Immutable after load;
// an absent key reads as zero. The empty field is an explicit state (no
// extent) rather than a sentinel bounding box.
class FatalityField {
public:
    using Map = std::unordered_map<CellMonthKey, long long, CellMonthKeyHash>;

    FatalityField() = default;

    // Accumulates one event row; zero counts widen the extent without
    // storing a cell. Negative counts are rejected by ingest before here.
    void add(int lon, int lat, int month, long long fatalities);

    long long at(int lon, int lat, int month) const;
    bool empty() const { return !extent_.has_value(); }
    const std::optional<GridExtent>& extent() const { return extent_; }
    const Map& cells() const { return cells_; }
    long long total() const;

private:
    Map cells_;
    std::optional<GridExtent> extent_;
};

// 2D cumulative layer over one month window, spanning the field's spatial
// extent. Indices into sums are local; lat0/lon0 anchor them to the field.
struct AggregatedGrid {
    int t_start = 0, t_end = 0;
    int lat0 = 0, lon0 = 0;
    int n_lat = 0, n_lon = 0;
    std::vector<long long> sums;  // row-major (lat, lon)

    bool empty() const { return sums.empty(); }
    long long at_local(int la, int lo) const { return sums[size_t(la) * n_lon + lo]; }
    long long at_abs(int lat, int lon) const { return at_local(lat - lat0, lon - lon0); }
};

// Event table: header `lon,lat,month,fatalities`. Duplicate keys are summed.
FatalityField ingest_events(const std::filesystem::path& path);

AggregatedGrid aggregate(const FatalityField& field, int t_start, int t_end);

struct ForecastRecord {
    long long zone_id = 0;
    int lon = 0, lat = 0, month = 0;
    double pred = 0.0;
    bool operator==(const ForecastRecord&) const = default;
};

// Forecast table: header `zone_id,lon,lat,month,pred`. Rows are written
// sorted by (zone_id, month, lat, lon); pred carries up to six fractional
// digits so export/ingest round-trips.
void export_forecast(std::vector<ForecastRecord> records, const std::filesystem::path& path);
std::vector<ForecastRecord> ingest_forecast(const std::filesystem::path& path);

// Benchmark grids reuse the forecast schema; a 4-column `lon,lat,month,pred`
// variant without zone ids is also accepted.
std::vector<ForecastRecord> ingest_benchmark(const std::filesystem::path& path);

}  // namespace shapecast
