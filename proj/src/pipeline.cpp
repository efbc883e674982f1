#include "shapecast/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

#include "shapecast/csv.hpp"
#include "shapecast/errors.hpp"
#include "shapecast/evaluator.hpp"
#include "shapecast/forecaster.hpp"
#include "shapecast/grid.hpp"
#include "shapecast/matcher.hpp"
#include "shapecast/toy.hpp"
#include "shapecast/zones.hpp"

namespace shapecast::pipeline {

namespace fs = std::filesystem;

namespace {

int to_int(const std::string& key, const std::string& value) {
    try {
        size_t pos = 0;
        int v = std::stoi(value, &pos);
        if (pos != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw ValidationError("field '" + key + "': not an integer: '" + value + "'");
    }
}

double to_double(const std::string& key, const std::string& value) {
    try {
        size_t pos = 0;
        double v = std::stod(value, &pos);
        if (pos != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw ValidationError("field '" + key + "': not a number: '" + value + "'");
    }
}

bool to_switch(const std::string& key, const std::string& value) {
    if (value == "on") return true;
    if (value == "off") return false;
    throw ValidationError("field '" + key + "': expected on|off, got '" + value + "'");
}

std::string trim(const std::string& s) {
    size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    size_t e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

}  // namespace

void set_key(RunConfig& c, const std::string& key, const std::string& value) {
    if (key == "events")
        c.events = value;
    else if (key == "forecast")
        c.forecasts.push_back(value);
    else if (key == "benchmark")
        c.benchmarks.push_back(value);
    else if (key == "out")
        c.out_dir = value;
    else if (key == "train_end")
        c.train_end = to_int(key, value);
    else if (key == "first_train_end")
        c.first_train_end = to_int(key, value);
    else if (key == "last_train_end")
        c.last_train_end = to_int(key, value);
    else if (key == "workers")
        c.workers = to_int(key, value);
    else if (key == "coords") {
        if (value == "normalized")
            c.coords = CoordMode::normalized;
        else if (value == "raw")
            c.coords = CoordMode::raw;
        else
            throw ValidationError("field 'coords': expected normalized|raw, got '" + value + "'");
    } else if (key == "relax")
        c.relax = to_switch(key, value);
    else if (key == "correlation")
        c.correlation = to_switch(key, value);
    else if (key == "correlation_step")
        c.correlation_step = to_int(key, value);
    else if (key == "thr1")
        c.params.thr1 = to_double(key, value);
    else if (key == "thr2")
        c.params.thr2 = to_double(key, value);
    else if (key == "clu_coef")
        c.params.clu_coef = to_double(key, value);
    else if (key == "radius")
        c.params.radius = to_int(key, value);
    else if (key == "input_window")
        c.params.input_window = to_int(key, value);
    else if (key == "horizon")
        c.params.horizon = to_int(key, value);
    else if (key == "stride_frac")
        c.params.stride_frac = to_double(key, value);
    else if (key == "dim_var_frac")
        c.params.dim_var_frac = to_double(key, value);
    else if (key == "min_matches")
        c.params.min_matches = to_int(key, value);
    else if (key == "relax_factor")
        c.params.relax_factor = to_double(key, value);
    else if (key == "max_relax_steps")
        c.params.max_relax_steps = to_int(key, value);
    else
        throw ValidationError("unknown config key '" + key + "'");
}

void apply_config_file(RunConfig& c, const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open config file " + path.string());
    std::string line;
    long lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string s = trim(line);
        if (s.empty() || s[0] == '#') continue;
        size_t eq = s.find('=');
        if (eq == std::string::npos)
            throw ValidationError(path.string() + ":" + std::to_string(lineno) +
                                  ": expected 'key = value'");
        set_key(c, trim(s.substr(0, eq)), trim(s.substr(eq + 1)));
    }
}

namespace {

void require(bool ok, const std::string& msg) {
    if (!ok) throw ValidationError(msg);
}

void require_file(const std::string& field, const std::string& path) {
    require(!path.empty(), "field '" + field + "': input file is required");
    require(fs::exists(path), "field '" + field + "': no such file: " + path);
}

fs::path prepare_out_dir(const RunConfig& c) {
    require(!c.out_dir.empty(), "field 'out': output directory is required");
    fs::path dir(c.out_dir);
    fs::create_directories(dir);
    return dir;
}

void write_manifest(const RunConfig& c, const fs::path& dir, const std::string& command) {
    std::ofstream out(dir / "manifest.txt");
    out << "command=" << command << " events=" << c.events << " out=" << c.out_dir;
    if (c.train_end) out << " train_end=" << *c.train_end;
    if (c.first_train_end) out << " first_train_end=" << *c.first_train_end;
    if (c.last_train_end) out << " last_train_end=" << *c.last_train_end;
    const ModelParams& p = c.params;
    out << " thr1=" << csv::format_full(p.thr1) << " thr2=" << csv::format_full(p.thr2)
        << " clu_coef=" << csv::format_full(p.clu_coef) << " radius=" << p.radius
        << " input_window=" << p.input_window << " horizon=" << p.horizon
        << " stride_frac=" << csv::format_full(p.stride_frac)
        << " dim_var_frac=" << csv::format_full(p.dim_var_frac)
        << " min_matches=" << p.min_matches
        << " relax_factor=" << csv::format_full(p.relax_factor)
        << " max_relax_steps=" << p.max_relax_steps
        << " relax=" << (c.relax ? "on" : "off")
        << " coords=" << (c.coords == CoordMode::raw ? "raw" : "normalized")
        << " workers=" << c.workers << "\n";
}

struct DetectResult {
    FatalityField field;
    std::vector<ActiveZone> zones;
    std::vector<ActiveZone> singletons;
};

DetectResult detect_zones(const RunConfig& c) {
    require_file("events", c.events);
    require(c.train_end.has_value(), "field 'train_end': required");
    c.params.validate();
    DetectResult r;
    r.field = ingest_events(c.events);
    AggregatedGrid grid =
        aggregate(r.field, *c.train_end - c.params.input_window + 1, *c.train_end);
    std::vector<ActiveZone> labeled = label_zones(active_mask(grid), c.params.radius);
    for (const auto& z : labeled)
        if (z.cells.size() < 2) r.singletons.push_back(z);
    for (size_t i = 0; i < r.singletons.size(); ++i) r.singletons[i].zone_id = int(i) + 1;
    r.zones = erode(labeled);
    return r;
}

void write_zone_report(const std::vector<ActiveZone>& zones, const fs::path& path) {
    csv::Writer w(path);
    w.row({"zone_id", "lat", "lon"});
    for (const auto& z : zones)
        for (const Cell& cell : z.cells)
            w.row({std::to_string(z.zone_id), std::to_string(cell.lat), std::to_string(cell.lon)});
    w.close();
}

}  // namespace

void run_detect(const RunConfig& c, std::ostream& log) {
    fs::path dir = prepare_out_dir(c);
    DetectResult r = detect_zones(c);
    write_zone_report(r.zones, dir / "zones.csv");
    write_zone_report(r.singletons, dir / "singletons.csv");
    write_manifest(c, dir, "detect");
    if (r.zones.empty()) log << "warning: no active zones in the training window\n";
    log << "detect: " << r.zones.size() << " zones, " << r.singletons.size()
        << " eroded singletons\n";
}

void run_forecast(const RunConfig& c, std::ostream& log) {
    fs::path dir = prepare_out_dir(c);
    DetectResult det = detect_zones(c);
    write_zone_report(det.zones, dir / "zones.csv");
    write_zone_report(det.singletons, dir / "singletons.csv");

    const int train_end = *c.train_end;
    const int t_fc = train_end + 1;
    HistoryIndex hist(det.field);

    csv::Writer scen(dir / "scenarios.csv");
    scen.row({"zone_id", "scenario_idx", "probability", "n_members"});
    csv::Writer prov(dir / "provenance.csv");
    prov.row(provenance_header());

    std::vector<Forecast> forecasts;
    for (const ActiveZone& zone : det.zones) {
        Sequence3D input_seq =
            extract_sequence(det.field, zone, train_end - c.params.input_window + 1, train_end);
        DensityCube input_cube = to_density_cube(input_seq, c.coords);

        SearchOptions opt;
        opt.workers = c.workers;
        opt.coords = c.coords;
        opt.exclude = std::make_pair(input_seq.origin, input_seq.dims);
        SearchOutcome outcome =
            c.relax ? relax_search(hist, input_cube, input_seq.dims, train_end, c.params, opt)
                    : rolling_search(hist, input_cube, input_seq.dims, train_end, c.params, opt);

        append_provenance(prov, zone.zone_id, outcome.matches);
        if (outcome.matches.empty()) {
            log << "warning: zone " << zone.zone_id << " has no similar history, forecasting zero\n";
            forecasts.push_back(zero_forecast(zone, t_fc, c.params.horizon));
            scen.row({std::to_string(zone.zone_id), "0", "0", "0"});
            continue;
        }
        Dims3 target{zone.bbox.n_lat(), zone.bbox.n_lon(), c.params.horizon};
        std::vector<Scenario> scenarios = cluster_matches(outcome.matches, target, c.params);
        for (size_t i = 0; i < scenarios.size(); ++i)
            scen.row({std::to_string(zone.zone_id), std::to_string(i),
                      csv::format_decimal(scenarios[i].probability),
                      std::to_string(scenarios[i].members.size())});
        forecasts.push_back(make_forecast(zone, scenarios, t_fc));
    }
    forecasts = merge_zone_forecasts(std::move(forecasts));
    export_forecast(forecast_records(forecasts), dir / "forecast.csv");
    scen.close();
    prov.close();
    write_manifest(c, dir, "forecast");
    if (det.zones.empty()) log << "warning: no zones, forecast is empty\n";
    log << "forecast: " << det.zones.size() << " zones -> " << dir.string() << "\n";
}

namespace {

struct ZoneBlock {
    long long zone_id = 0;
    Sequence3D pred;
    Sequence3D obs;
    std::optional<Sequence3D> bench;
};

struct PeriodData {
    int period = 0;  // first forecast month
    int horizon = 0;
    std::vector<ZoneBlock> zones;
};

PeriodData load_period(const std::string& forecast_path, const std::string* benchmark_path,
                       const FatalityField& field) {
    std::vector<ForecastRecord> recs = ingest_forecast(forecast_path);
    require(!recs.empty(), "forecast file has no rows: " + forecast_path);

    std::map<std::tuple<int, int, int>, double> bench_map;
    if (benchmark_path) {
        for (const auto& r : ingest_benchmark(*benchmark_path)) {
            auto key = std::make_tuple(r.lat, r.lon, r.month);
            auto [it, inserted] = bench_map.try_emplace(key, r.pred);
            if (!inserted && it->second != r.pred)
                throw ValidationError("benchmark has conflicting values for cell (" +
                                      std::to_string(r.lat) + "," + std::to_string(r.lon) +
                                      ") month " + std::to_string(r.month));
        }
    }

    PeriodData pd;
    int m_min = recs.front().month, m_max = recs.front().month;
    for (const auto& r : recs) {
        m_min = std::min(m_min, r.month);
        m_max = std::max(m_max, r.month);
    }
    pd.period = m_min;
    pd.horizon = m_max - m_min + 1;

    std::map<long long, std::vector<ForecastRecord>> by_zone;
    for (const auto& r : recs) by_zone[r.zone_id].push_back(r);

    for (auto& [zid, rows] : by_zone) {
        Bbox bb{rows[0].lat, rows[0].lat, rows[0].lon, rows[0].lon};
        for (const auto& r : rows) {
            bb.lat_min = std::min(bb.lat_min, r.lat);
            bb.lat_max = std::max(bb.lat_max, r.lat);
            bb.lon_min = std::min(bb.lon_min, r.lon);
            bb.lon_max = std::max(bb.lon_max, r.lon);
        }
        ZoneBlock zb;
        zb.zone_id = zid;
        Origin3 origin{bb.lat_min, bb.lon_min, pd.period};
        Dims3 dims{bb.n_lat(), bb.n_lon(), pd.horizon};
        zb.pred = Sequence3D::zeros(origin, dims);
        Sequence3D seen = Sequence3D::zeros(origin, dims);
        for (const auto& r : rows) {
            int la = r.lat - bb.lat_min, lo = r.lon - bb.lon_min, t = r.month - pd.period;
            if (seen.at(la, lo, t) != 0.0)
                throw ValidationError("duplicate forecast cell in zone " + std::to_string(zid));
            seen.at(la, lo, t) = 1.0;
            zb.pred.at(la, lo, t) = r.pred;
        }
        for (double s : seen.values)
            if (s == 0.0)
                throw ValidationError("zone " + std::to_string(zid) + " in " + forecast_path +
                                      " does not cover its full box " +
                                      "(cell-mismatch)");
        zb.obs = Sequence3D::zeros(origin, dims);
        for (int la = 0; la < dims.w_lat; ++la)
            for (int lo = 0; lo < dims.w_lon; ++lo)
                for (int t = 0; t < dims.len; ++t)
                    zb.obs.at(la, lo, t) = double(
                        field.at(bb.lon_min + lo, bb.lat_min + la, pd.period + t));
        if (benchmark_path) {
            Sequence3D bench = Sequence3D::zeros(origin, dims);
            for (int la = 0; la < dims.w_lat; ++la)
                for (int lo = 0; lo < dims.w_lon; ++lo)
                    for (int t = 0; t < dims.len; ++t) {
                        auto it = bench_map.find(
                            {bb.lat_min + la, bb.lon_min + lo, pd.period + t});
                        if (it == bench_map.end())
                            throw ValidationError(
                                "benchmark cell-mismatch: missing cell (" +
                                std::to_string(bb.lat_min + la) + "," +
                                std::to_string(bb.lon_min + lo) + ") month " +
                                std::to_string(pd.period + t));
                        bench.at(la, lo, t) = it->second;
                    }
            zb.bench = std::move(bench);
        }
        pd.zones.push_back(std::move(zb));
    }
    return pd;
}

struct Welford {
    long n = 0;
    double mean = 0, m2 = 0;
    void add(double x) {
        ++n;
        double d = x - mean;
        mean += d / double(n);
        m2 += d * (x - mean);
    }
    double se() const { return n < 2 ? 0.0 : std::sqrt(m2 / double(n - 1)) / std::sqrt(double(n)); }
};

struct CellStats {
    Welford ae_lr, se_lr;
    double sq_model = 0, sq_bench = 0;
    long n = 0;
};

std::string opt_str(const std::optional<double>& v) {
    return v ? csv::format_full(*v) : std::string();
}

}  // namespace

void run_evaluate(const RunConfig& c, std::ostream& log) {
    require_file("events", c.events);
    require(!c.forecasts.empty(), "field 'forecast': at least one forecast file is required");
    for (const auto& f : c.forecasts) require_file("forecast", f);
    for (const auto& b : c.benchmarks) require_file("benchmark", b);
    require(c.benchmarks.empty() || c.benchmarks.size() == c.forecasts.size(),
            "field 'benchmark': must pair one benchmark file per forecast file");
    c.params.validate();
    fs::path dir = prepare_out_dir(c);
    const bool with_bench = !c.benchmarks.empty();

    FatalityField field = ingest_events(c.events);

    std::vector<PeriodData> periods;
    for (size_t i = 0; i < c.forecasts.size(); ++i)
        periods.push_back(
            load_period(c.forecasts[i], with_bench ? &c.benchmarks[i] : nullptr, field));
    std::sort(periods.begin(), periods.end(),
              [](const PeriodData& a, const PeriodData& b) { return a.period < b.period; });
    for (size_t i = 1; i < periods.size(); ++i)
        require(periods[i].period != periods[i - 1].period,
                "two forecast files share the same period");

    csv::Writer percell(dir / "percell.csv");
    percell.row(with_bench
                    ? std::vector<std::string>{"zone_id", "period", "horizon", "lat", "lon",
                                               "month", "obs", "pred", "bench"}
                    : std::vector<std::string>{"zone_id", "period", "horizon", "lat", "lon",
                                               "month", "obs", "pred"});

    csv::Writer report(dir / "report.csv");
    report.row({"zone_id", "period", "horizon", "metric", "value"});
    auto metric_row = [&](long long zone, int period, int horizon, const std::string& name,
                          double value) {
        report.row({std::to_string(zone), std::to_string(period), std::to_string(horizon), name,
                    csv::format_full(value)});
    };

    csv::Writer zone_perf(dir / "zone_perf.csv");
    zone_perf.row({"zone_id", "period", "r_inc", "magnitude", "dimension", "mape_logmod_model",
                   "mape_logmod_bench", "ae_logratio"});
    std::optional<csv::Writer> zone_scatter;
    if (with_bench) {
        zone_scatter.emplace(dir / "zone_scatter.csv");
        zone_scatter->row({"zone_id", "period", "ae_logratio", "emd_logratio"});
    }

    // (period, horizon) -> stats; horizon 0 aggregates a whole period,
    // period 0 aggregates across periods.
    std::map<std::pair<int, int>, CellStats> stats;
    std::vector<double> hist_values;  // per (zone cell, period) mse log ratio
    std::map<std::pair<int, int>, std::pair<double, double>> map_cells;

    for (const PeriodData& pd : periods) {
        for (const ZoneBlock& zb : pd.zones) {
            const Dims3 d = zb.pred.dims;
            for (int la = 0; la < d.w_lat; ++la) {
                for (int lo = 0; lo < d.w_lon; ++lo) {
                    double cell_sq_model = 0, cell_sq_bench = 0;
                    for (int t = 0; t < d.len; ++t) {
                        double obs = zb.obs.at(la, lo, t);
                        double pred = zb.pred.at(la, lo, t);
                        int month = pd.period + t;
                        int h = t + 1;
                        std::vector<std::string> row{
                            std::to_string(zb.zone_id),  std::to_string(pd.period),
                            std::to_string(h),           std::to_string(zb.obs.origin.lat + la),
                            std::to_string(zb.obs.origin.lon + lo), std::to_string(month),
                            csv::format_decimal(obs),    csv::format_decimal(pred)};
                        double sq_model = (obs - pred) * (obs - pred);
                        cell_sq_model += sq_model;
                        double ae_lr = 0, se_lr = 0, sq_bench = 0;
                        if (with_bench) {
                            double bench = zb.bench->at(la, lo, t);
                            row.push_back(csv::format_decimal(bench));
                            sq_bench = (obs - bench) * (obs - bench);
                            cell_sq_bench += sq_bench;
                            ae_lr = log_ratio(std::abs(obs - bench), std::abs(obs - pred));
                            se_lr = log_ratio(sq_bench, sq_model);
                        }
                        percell.row(row);
                        for (auto key : {std::pair{pd.period, h}, std::pair{pd.period, 0},
                                         std::pair{0, h}, std::pair{0, 0}}) {
                            CellStats& cs = stats[key];
                            cs.sq_model += sq_model;
                            cs.n += 1;
                            if (with_bench) {
                                cs.sq_bench += sq_bench;
                                cs.ae_lr.add(ae_lr);
                                cs.se_lr.add(se_lr);
                            }
                        }
                    }
                    if (with_bench) {
                        int lat = zb.obs.origin.lat + la, lon = zb.obs.origin.lon + lo;
                        hist_values.push_back(
                            log_ratio(cell_sq_bench / d.len, cell_sq_model / d.len));
                        auto& mc = map_cells[{lat, lon}];
                        mc.first += cell_sq_bench;
                        mc.second += cell_sq_model;
                    }
                }
            }

            // Zone-level block metrics.
            ZoneMetrics zm = zone_metrics(zb.obs, zb.pred);
            metric_row(zb.zone_id, pd.period, 0, "abs_error", zm.abs_error);
            if (zm.emd) metric_row(zb.zone_id, pd.period, 0, "emd", *zm.emd);
            metric_row(zb.zone_id, pd.period, 0, "mape_logmod", zm.mape_logmod);
            metric_row(zb.zone_id, pd.period, 0, "max_error", zm.max_error);

            Sequence3D input_seq = Sequence3D::zeros(
                Origin3{zb.obs.origin.lat, zb.obs.origin.lon, pd.period - c.params.input_window},
                Dims3{d.w_lat, d.w_lon, c.params.input_window});
            for (int la = 0; la < d.w_lat; ++la)
                for (int lo = 0; lo < d.w_lon; ++lo)
                    for (int t = 0; t < c.params.input_window; ++t)
                        input_seq.at(la, lo, t) =
                            double(field.at(input_seq.origin.lon + lo, input_seq.origin.lat + la,
                                            input_seq.origin.t + t));
            double magnitude = input_seq.total();
            int dimension = input_seq.count_nonzero();
            std::optional<double> rinc;
            if (magnitude > 0) {
                rinc = r_inc(input_seq, zb.obs);
                metric_row(zb.zone_id, pd.period, 0, "r_inc", *rinc);
            }
            metric_row(zb.zone_id, pd.period, 0, "magnitude", magnitude);
            metric_row(zb.zone_id, pd.period, 0, "dimension", double(dimension));

            std::optional<double> ae_lr_zone, emd_lr_zone, mape_bench;
            if (with_bench) {
                ZoneMetrics zmb = zone_metrics(zb.obs, *zb.bench);
                metric_row(zb.zone_id, pd.period, 0, "abs_error_bench", zmb.abs_error);
                if (zmb.emd) metric_row(zb.zone_id, pd.period, 0, "emd_bench", *zmb.emd);
                metric_row(zb.zone_id, pd.period, 0, "mape_logmod_bench", zmb.mape_logmod);
                metric_row(zb.zone_id, pd.period, 0, "max_error_bench", zmb.max_error);
                ae_lr_zone = log_ratio(zmb.abs_error, zm.abs_error);
                mape_bench = zmb.mape_logmod;
                metric_row(zb.zone_id, pd.period, 0, "ae_logratio", *ae_lr_zone);
                if (zm.emd && zmb.emd) {
                    emd_lr_zone = log_ratio(*zmb.emd, *zm.emd);
                    metric_row(zb.zone_id, pd.period, 0, "emd_logratio", *emd_lr_zone);
                }
                zone_scatter->row({std::to_string(zb.zone_id), std::to_string(pd.period),
                                   csv::format_full(*ae_lr_zone), opt_str(emd_lr_zone)});
            }
            zone_perf.row({std::to_string(zb.zone_id), std::to_string(pd.period), opt_str(rinc),
                           csv::format_full(magnitude), std::to_string(dimension),
                           csv::format_full(zm.mape_logmod), opt_str(mape_bench),
                           opt_str(ae_lr_zone)});
        }
    }

    for (const auto& [key, cs] : stats) {
        auto [period, horizon] = key;
        metric_row(0, period, horizon, "n_cells", double(cs.n));
        metric_row(0, period, horizon, "mse_model", cs.sq_model / double(cs.n));
        if (with_bench) {
            metric_row(0, period, horizon, "mse_bench", cs.sq_bench / double(cs.n));
            metric_row(0, period, horizon, "ae_logratio_mean", cs.ae_lr.mean);
            metric_row(0, period, horizon, "ae_logratio_se", cs.ae_lr.se());
            metric_row(0, period, horizon, "se_logratio_mean", cs.se_lr.mean);
            metric_row(0, period, horizon, "se_logratio_se", cs.se_lr.se());
        }
    }

    if (with_bench) {
        int h_max = 0;
        for (const auto& pd : periods) h_max = std::max(h_max, pd.horizon);
        auto write_table = [&](const fs::path& path, bool squared) {
            csv::Writer w(path);
            std::vector<std::string> head{"period"};
            for (int h = 1; h <= h_max; ++h) {
                head.push_back("h" + std::to_string(h));
                head.push_back("se" + std::to_string(h));
            }
            head.push_back("all");
            head.push_back("se_all");
            w.row(head);
            auto row_for = [&](int period, const std::string& label) {
                std::vector<std::string> row{label};
                for (int h = 1; h <= h_max + 1; ++h) {
                    int hh = h <= h_max ? h : 0;
                    auto it = stats.find({period, hh});
                    if (it == stats.end()) {
                        row.push_back("");
                        row.push_back("");
                        continue;
                    }
                    const Welford& wf = squared ? it->second.se_lr : it->second.ae_lr;
                    row.push_back(csv::format_full(wf.mean));
                    row.push_back(csv::format_full(wf.se()));
                }
                w.row(row);
            };
            for (const auto& pd : periods) row_for(pd.period, std::to_string(pd.period));
            row_for(0, "all");
            w.close();
        };
        write_table(dir / "table_ae_logratio.csv", false);
        write_table(dir / "table_se_logratio.csv", true);

        const double bin_w = 0.25;
        std::map<long, long> bins;
        for (double v : hist_values) bins[long(std::floor(v / bin_w))]++;
        csv::Writer hist(dir / "hist_mse_logratio.csv");
        hist.row({"bin_lo", "bin_hi", "count"});
        for (const auto& [b, n] : bins)
            hist.row({csv::format_full(double(b) * bin_w), csv::format_full(double(b + 1) * bin_w),
                      std::to_string(n)});
        hist.close();

        csv::Writer mapw(dir / "map_mse_logratio.csv");
        mapw.row({"lat", "lon", "value"});
        for (const auto& [cell, sq] : map_cells)
            mapw.row({std::to_string(cell.first), std::to_string(cell.second),
                      csv::format_full(log_ratio(sq.first, sq.second))});
        mapw.close();
    }

    if (c.correlation) {
        require(!field.empty(), "correlation requires event history");
        const GridExtent& e = *field.extent();
        int first = c.first_train_end.value_or(e.month_min + c.params.input_window - 1);
        int last = c.last_train_end.value_or(e.month_max - c.params.horizon);
        std::vector<SeqSample> samples =
            collect_sequences(field, c.params, first, last, c.correlation_step);
        std::vector<CorrelationBin> bins = pattern_future_correlation(samples, c.params);
        csv::Writer w(dir / "correlation.csv");
        w.row({"bin_lo", "bin_hi", "n", "mean_delta_r_inc", "se_delta_r_inc", "n_pf",
               "mean_emd_pf", "se_emd_pf"});
        for (const auto& b : bins)
            w.row({csv::format_full(b.lo), csv::format_full(b.hi), std::to_string(b.n),
                   csv::format_full(b.mean_delta_r_inc), csv::format_full(b.se_delta_r_inc),
                   std::to_string(b.n_pf), csv::format_full(b.mean_emd_pf),
                   csv::format_full(b.se_emd_pf)});
        w.close();
        log << "correlation: " << samples.size() << " sequences\n";
    }

    percell.close();
    report.close();
    zone_perf.close();
    if (zone_scatter) zone_scatter->close();
    write_manifest(c, dir, "evaluate");
    log << "evaluate: " << periods.size() << " period(s) -> " << dir.string() << "\n";
}

void run_coverage(const RunConfig& c, std::ostream& log) {
    require_file("events", c.events);
    c.params.validate();
    fs::path dir = prepare_out_dir(c);
    FatalityField field = ingest_events(c.events);
    require(!field.empty(), "coverage: events file is empty");
    const GridExtent& e = *field.extent();
    int feas_first = e.month_min + c.params.input_window - 1;
    int feas_last = e.month_max - c.params.horizon;
    if (feas_first > feas_last)
        throw ValidationError(
            "coverage: history spans months " + std::to_string(e.month_min) + ".." +
            std::to_string(e.month_max) + " but needs at least " +
            std::to_string(c.params.input_window + c.params.horizon) +
            " months (input_window + horizon)");
    int first = c.first_train_end.value_or(feas_first);
    int last = c.last_train_end.value_or(feas_last);
    CoverageSeries series = coverage_stats(field, c.params, first, last, c.workers);
    for (int m : series.skipped_months)
        log << "warning: train end " << m << " skipped (insufficient history)\n";
    csv::Writer w(dir / "coverage.csv");
    w.row({"train_end_month", "pct_fatalities", "pct_active_cells"});
    for (const auto& entry : series.entries)
        w.row({std::to_string(entry.train_end), csv::format_full(entry.pct_fatalities),
               csv::format_full(entry.pct_active_cells)});
    w.close();
    write_manifest(c, dir, "coverage");
    log << "coverage: " << series.entries.size() << " months -> " << dir.string() << "\n";
}

bool run_toy_verify(std::ostream& out) { return check_toy_report(toy::run(), out); }

bool check_toy_report(const toy::Report& r, std::ostream& out) {
    bool ok = true;
    auto check = [&](const std::string& name, double got, double want, double tol) {
        bool pass = std::abs(got - want) <= tol;
        ok = ok && pass;
        out << name << " = " << csv::format_full(got) << " (expected " << csv::format_full(want)
            << " +- " << csv::format_full(tol) << ") " << (pass ? "PASS" : "FAIL") << "\n";
    };
    check("emd_p1_p2", r.emd_12, 0.2290, 1e-3);
    check("emd_p1_p3", r.emd_13, 0.2984, 1e-3);
    check("sp_p1_p2", r.sp_12, 8.57, 1e-2);
    check("sp_p1_p3", r.sp_13, 5.13, 1e-2);
    check("ed_p1_p2", r.ed_12, 84.0, 0.0);
    check("ed_p1_p3", r.ed_13, 84.0, 0.0);
    auto flag = [&](const std::string& name, bool pass) {
        ok = ok && pass;
        out << name << " " << (pass ? "PASS" : "FAIL") << "\n";
    };
    flag("emd ranks p2 closer than p3", r.emd_prefers_p2);
    flag("spatial baseline ranks p3 closer than p2", r.sp_prefers_p3);
    flag("euclidean baseline cannot separate them", r.ed_tied);
    out << (ok ? "toy-verify: PASS" : "toy-verify: FAIL") << "\n";
    return ok;
}

}  // namespace shapecast::pipeline
