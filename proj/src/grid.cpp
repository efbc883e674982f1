#include "shapecast/grid.hpp"

#include <algorithm>

#include "shapecast/csv.hpp"
#include "shapecast/errors.hpp"

namespace shapecast {

void FatalityField::add(int lon, int lat, int month, long long fatalities) {
    if (!extent_) {
        extent_ = GridExtent{lon, lon, lat, lat, month, month};
    } else {
        extent_->lon_min = std::min(extent_->lon_min, lon);
        extent_->lon_max = std::max(extent_->lon_max, lon);
        extent_->lat_min = std::min(extent_->lat_min, lat);
        extent_->lat_max = std::max(extent_->lat_max, lat);
        extent_->month_min = std::min(extent_->month_min, month);
        extent_->month_max = std::max(extent_->month_max, month);
    }
    if (fatalities == 0) return;
    cells_[CellMonthKey{lon, lat, month}] += fatalities;
}

long long FatalityField::at(int lon, int lat, int month) const {
    auto it = cells_.find(CellMonthKey{lon, lat, month});
    return it == cells_.end() ? 0 : it->second;
}

long long FatalityField::total() const {
    long long s = 0;
    for (const auto& [k, v] : cells_) s += v;
    return s;
}

FatalityField ingest_events(const std::filesystem::path& path) {
    csv::Table t = csv::read_table(path);
    csv::require_header(t, path, {"lon", "lat", "month", "fatalities"});
    FatalityField field;
    for (size_t r = 0; r < t.rows.size(); ++r) {
        const auto& row = t.rows[r];
        long line = t.line_numbers[r];
        if (row.size() != 4)
            throw ParseError(path.string(), line, "expected 4 columns, got " +
                                                      std::to_string(row.size()));
        long long lon = csv::parse_int(row[0], path.string(), line, "lon");
        long long lat = csv::parse_int(row[1], path.string(), line, "lat");
        long long month = csv::parse_int(row[2], path.string(), line, "month");
        long long fat = csv::parse_int(row[3], path.string(), line, "fatalities");
        if (fat < 0)
            throw ValidationError(path.string() + ":" + std::to_string(line) +
                                  ": negative fatalities: " + row[3]);
        field.add(int(lon), int(lat), int(month), fat);
    }
    return field;
}

AggregatedGrid aggregate(const FatalityField& field, int t_start, int t_end) {
    if (t_start > t_end) throw ValidationError("aggregate: t_start > t_end");
    AggregatedGrid g;
    g.t_start = t_start;
    g.t_end = t_end;
    if (field.empty()) return g;
    const GridExtent& e = *field.extent();
    // A window entirely outside the data is a legitimate boundary case and
    // yields an all-zero grid, not an error.
    g.lat0 = e.lat_min;
    g.lon0 = e.lon_min;
    g.n_lat = e.n_lat();
    g.n_lon = e.n_lon();
    g.sums.assign(size_t(g.n_lat) * g.n_lon, 0);
    for (const auto& [k, v] : field.cells()) {
        if (k.month < t_start || k.month > t_end) continue;
        g.sums[size_t(k.lat - g.lat0) * g.n_lon + (k.lon - g.lon0)] += v;
    }
    return g;
}

void export_forecast(std::vector<ForecastRecord> records, const std::filesystem::path& path) {
    std::sort(records.begin(), records.end(), [](const ForecastRecord& a, const ForecastRecord& b) {
        if (a.zone_id != b.zone_id) return a.zone_id < b.zone_id;
        if (a.month != b.month) return a.month < b.month;
        if (a.lat != b.lat) return a.lat < b.lat;
        return a.lon < b.lon;
    });
    csv::Writer w(path);
    w.row({"zone_id", "lon", "lat", "month", "pred"});
    for (const auto& r : records) {
        w.row({std::to_string(r.zone_id), std::to_string(r.lon), std::to_string(r.lat),
               std::to_string(r.month), csv::format_decimal(r.pred)});
    }
    w.close();
}

static ForecastRecord parse_forecast_row(const std::vector<std::string>& row, bool with_zone,
                                         const std::string& path, long line) {
    ForecastRecord rec;
    size_t i = 0;
    if (with_zone) rec.zone_id = csv::parse_int(row[i++], path, line, "zone_id");
    rec.lon = int(csv::parse_int(row[i++], path, line, "lon"));
    rec.lat = int(csv::parse_int(row[i++], path, line, "lat"));
    rec.month = int(csv::parse_int(row[i++], path, line, "month"));
    rec.pred = csv::parse_double(row[i], path, line, "pred");
    if (rec.pred < 0)
        throw ValidationError(path + ":" + std::to_string(line) + ": negative pred");
    return rec;
}

std::vector<ForecastRecord> ingest_forecast(const std::filesystem::path& path) {
    csv::Table t = csv::read_table(path);
    csv::require_header(t, path, {"zone_id", "lon", "lat", "month", "pred"});
    std::vector<ForecastRecord> out;
    out.reserve(t.rows.size());
    for (size_t r = 0; r < t.rows.size(); ++r) {
        if (t.rows[r].size() != 5)
            throw ParseError(path.string(), t.line_numbers[r], "expected 5 columns");
        out.push_back(parse_forecast_row(t.rows[r], true, path.string(), t.line_numbers[r]));
    }
    return out;
}

std::vector<ForecastRecord> ingest_benchmark(const std::filesystem::path& path) {
    csv::Table t = csv::read_table(path);
    bool with_zone;
    if (t.header == std::vector<std::string>{"zone_id", "lon", "lat", "month", "pred"}) {
        with_zone = true;
    } else if (t.header == std::vector<std::string>{"lon", "lat", "month", "pred"}) {
        with_zone = false;
    } else {
        throw ParseError(path.string(), 1,
                         "benchmark header must be 'zone_id,lon,lat,month,pred' or "
                         "'lon,lat,month,pred'");
    }
    std::vector<ForecastRecord> out;
    out.reserve(t.rows.size());
    for (size_t r = 0; r < t.rows.size(); ++r) {
        size_t want = with_zone ? 5 : 4;
        if (t.rows[r].size() != want)
            throw ParseError(path.string(), t.line_numbers[r], "bad column count");
        out.push_back(parse_forecast_row(t.rows[r], with_zone, path.string(), t.line_numbers[r]));
    }
    return out;
}

}  // namespace shapecast
