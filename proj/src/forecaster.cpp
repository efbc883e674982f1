#include "shapecast/forecaster.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "shapecast/errors.hpp"

namespace shapecast {

Sequence3D rescale_past_future(const Sequence3D& pf, Dims3 target_dims) {
    if (pf.dims.volume() == 0 || target_dims.volume() == 0)
        throw ValidationError("rescale_past_future: degenerate dims");
    Sequence3D out = Sequence3D::zeros(pf.origin, target_dims);
    auto map_idx = [](int i, int source, int target) {
        return int(std::floor((double(i) + 0.5) * double(target) / double(source)));
    };
    for (int la = 0; la < pf.dims.w_lat; ++la) {
        int tla = map_idx(la, pf.dims.w_lat, target_dims.w_lat);
        for (int lo = 0; lo < pf.dims.w_lon; ++lo) {
            int tlo = map_idx(lo, pf.dims.w_lon, target_dims.w_lon);
            for (int t = 0; t < pf.dims.len; ++t) {
                double v = pf.at(la, lo, t);
                if (v == 0.0) continue;
                out.at(tla, tlo, map_idx(t, pf.dims.len, target_dims.len)) += v;
            }
        }
    }
    return out;
}

Projection project_axes(const Sequence3D& seq) {
    Projection p;
    double total = seq.total();
    p.values.assign(size_t(seq.dims.w_lon) + seq.dims.w_lat + seq.dims.len, 0.0);
    if (total == 0.0) {
        p.all_zero = true;
        return p;
    }
    for (int la = 0; la < seq.dims.w_lat; ++la) {
        for (int lo = 0; lo < seq.dims.w_lon; ++lo) {
            for (int t = 0; t < seq.dims.len; ++t) {
                double v = seq.at(la, lo, t) / total;
                p.values[lo] += v;
                p.values[size_t(seq.dims.w_lon) + la] += v;
                p.values[size_t(seq.dims.w_lon) + seq.dims.w_lat + t] += v;
            }
        }
    }
    return p;
}

namespace {

double projection_distance(const Projection& a, const Projection& b) {
    double s = 0;
    for (size_t i = 0; i < a.values.size(); ++i) {
        double d = a.values[i] - b.values[i];
        s += d * d;
    }
    return std::sqrt(s);
}

bool canonical_match_order(const MatchResult& a, const MatchResult& b) {
    if (a.origin.t != b.origin.t) return a.origin.t < b.origin.t;
    if (a.origin.lat != b.origin.lat) return a.origin.lat < b.origin.lat;
    if (a.origin.lon != b.origin.lon) return a.origin.lon < b.origin.lon;
    if (a.dims != b.dims) return a.dims < b.dims;
    return a.rotation < b.rotation;
}

}  // namespace

std::vector<Scenario> cluster_matches(const std::vector<MatchResult>& matches, Dims3 target_dims,
                                      const ModelParams& params) {
    if (matches.empty()) throw ValidationError("cluster_matches: no matches");
    // Canonical order first, so the scenario layout is independent of how
    // the caller produced the list.
    std::vector<const MatchResult*> sorted;
    sorted.reserve(matches.size());
    for (const auto& m : matches) sorted.push_back(&m);
    std::sort(sorted.begin(), sorted.end(),
              [](const MatchResult* a, const MatchResult* b) { return canonical_match_order(*a, *b); });

    const int n = int(sorted.size());
    std::vector<Sequence3D> reshaped;
    std::vector<Projection> projections;
    reshaped.reserve(n);
    projections.reserve(n);
    for (const MatchResult* m : sorted) {
        Sequence3D pf = rotate_sequence90(m->past_future, (4 - m->rotation) % 4);
        reshaped.push_back(rescale_past_future(pf, target_dims));
        projections.push_back(project_axes(reshaped.back()));
    }

    const double clu_d = params.clu_coef * double(target_dims.volume());
    std::vector<int> parent(n);
    std::iota(parent.begin(), parent.end(), 0);
    std::function<int(int)> find = [&](int x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (projection_distance(projections[i], projections[j]) < clu_d) {
                int a = find(i), b = find(j);
                if (a != b) parent[std::max(a, b)] = std::min(a, b);
            }

    std::map<int, std::vector<int>> groups;  // keyed by min member index
    for (int i = 0; i < n; ++i) groups[find(i)].push_back(i);

    std::vector<Scenario> scenarios;
    scenarios.reserve(groups.size());
    for (auto& [root, members] : groups) {
        Scenario s;
        s.members = members;
        s.probability = double(members.size()) / double(n);
        s.mean_values = Sequence3D::zeros(reshaped[members[0]].origin, target_dims);
        double emd_sum = 0.0;
        for (int m : members) {
            emd_sum += sorted[m]->emd;
            for (size_t c = 0; c < s.mean_values.values.size(); ++c)
                s.mean_values.values[c] += reshaped[m].values[c];
        }
        for (auto& v : s.mean_values.values) v /= double(members.size());
        s.mean_member_emd = emd_sum / double(members.size());
        scenarios.push_back(std::move(s));
    }
    return scenarios;
}

Forecast make_forecast(const ActiveZone& zone, const std::vector<Scenario>& scenarios,
                       int t_forecast_start) {
    if (scenarios.empty()) throw ValidationError("make_forecast: no scenarios");
    int best = 0;
    for (int i = 1; i < int(scenarios.size()); ++i) {
        const Scenario& s = scenarios[i];
        const Scenario& cur = scenarios[best];
        if (s.members.size() > cur.members.size() ||
            (s.members.size() == cur.members.size() && s.mean_member_emd < cur.mean_member_emd))
            best = i;
    }
    const Scenario& chosen = scenarios[best];
    Forecast f;
    f.zone_id = zone.zone_id;
    f.origin = Origin3{zone.bbox.lat_min, zone.bbox.lon_min, t_forecast_start};
    f.dims = chosen.mean_values.dims;
    f.values = chosen.mean_values.values;
    f.chosen_probability = chosen.probability;
    f.chosen_scenario = best;
    return f;
}

Forecast zero_forecast(const ActiveZone& zone, int t_forecast_start, int horizon) {
    Forecast f;
    f.zone_id = zone.zone_id;
    f.origin = Origin3{zone.bbox.lat_min, zone.bbox.lon_min, t_forecast_start};
    f.dims = Dims3{zone.bbox.n_lat(), zone.bbox.n_lon(), horizon};
    f.values.assign(size_t(f.dims.volume()), 0.0);
    f.chosen_probability = 0.0;
    return f;
}

std::vector<Forecast> merge_zone_forecasts(std::vector<Forecast> forecasts) {
    std::sort(forecasts.begin(), forecasts.end(),
              [](const Forecast& a, const Forecast& b) { return a.zone_id < b.zone_id; });
    struct Acc {
        double sum = 0.0;
        int count = 0;
    };
    std::map<std::tuple<int, int, int>, Acc> cells;  // (lat, lon, month)
    for (const auto& f : forecasts)
        for (int la = 0; la < f.dims.w_lat; ++la)
            for (int lo = 0; lo < f.dims.w_lon; ++lo)
                for (int t = 0; t < f.dims.len; ++t) {
                    Acc& a = cells[{f.origin.lat + la, f.origin.lon + lo, f.origin.t + t}];
                    a.sum += f.at(la, lo, t);
                    a.count += 1;
                }
    for (auto& f : forecasts)
        for (int la = 0; la < f.dims.w_lat; ++la)
            for (int lo = 0; lo < f.dims.w_lon; ++lo)
                for (int t = 0; t < f.dims.len; ++t) {
                    const Acc& a =
                        cells.at({f.origin.lat + la, f.origin.lon + lo, f.origin.t + t});
                    if (a.count > 1) f.at(la, lo, t) = a.sum / a.count;
                }
    return forecasts;
}

std::vector<ForecastRecord> forecast_records(const std::vector<Forecast>& forecasts) {
    std::vector<ForecastRecord> out;
    for (const auto& f : forecasts)
        for (int la = 0; la < f.dims.w_lat; ++la)
            for (int lo = 0; lo < f.dims.w_lon; ++lo)
                for (int t = 0; t < f.dims.len; ++t)
                    out.push_back(ForecastRecord{f.zone_id, f.origin.lon + lo, f.origin.lat + la,
                                                 f.origin.t + t, f.at(la, lo, t)});
    return out;
}

}  // namespace shapecast
