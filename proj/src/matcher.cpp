#include "shapecast/matcher.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <thread>

#include "shapecast/errors.hpp"

namespace shapecast {

HistoryIndex::HistoryIndex(const FatalityField& field) {
    if (field.empty()) return;
    ext_ = *field.extent();
    nla_ = ext_->n_lat();
    nlo_ = ext_->n_lon();
    nt_ = ext_->n_months();
    vals_.assign(size_t(nla_) * nlo_ * nt_, 0);
    for (const auto& [k, v] : field.cells()) {
        size_t i =
            (size_t(k.lat - ext_->lat_min) * nlo_ + (k.lon - ext_->lon_min)) * nt_ +
            (k.month - ext_->month_min);
        vals_[i] = v;
    }
    prefix_.assign(size_t(nla_ + 1) * (nlo_ + 1) * (nt_ + 1), 0);
    auto P = [&](int a, int b, int c) -> long long& {
        return prefix_[(size_t(a) * (nlo_ + 1) + b) * (nt_ + 1) + c];
    };
    for (int a = 1; a <= nla_; ++a)
        for (int b = 1; b <= nlo_; ++b)
            for (int c = 1; c <= nt_; ++c)
                P(a, b, c) = vals_[(size_t(a - 1) * nlo_ + (b - 1)) * nt_ + (c - 1)] +
                             P(a - 1, b, c) + P(a, b - 1, c) + P(a, b, c - 1) -
                             P(a - 1, b - 1, c) - P(a - 1, b, c - 1) - P(a, b - 1, c - 1) +
                             P(a - 1, b - 1, c - 1);
}

long long HistoryIndex::box_sum(Origin3 origin, Dims3 dims) const {
    if (!ext_) return 0;
    int a0 = std::max(0, origin.lat - ext_->lat_min);
    int b0 = std::max(0, origin.lon - ext_->lon_min);
    int c0 = std::max(0, origin.t - ext_->month_min);
    int a1 = std::min(nla_, origin.lat - ext_->lat_min + dims.w_lat);
    int b1 = std::min(nlo_, origin.lon - ext_->lon_min + dims.w_lon);
    int c1 = std::min(nt_, origin.t - ext_->month_min + dims.len);
    if (a0 >= a1 || b0 >= b1 || c0 >= c1) return 0;
    auto P = [&](int a, int b, int c) {
        return prefix_[(size_t(a) * (nlo_ + 1) + b) * (nt_ + 1) + c];
    };
    return P(a1, b1, c1) - P(a0, b1, c1) - P(a1, b0, c1) - P(a1, b1, c0) + P(a0, b0, c1) +
           P(a0, b1, c0) + P(a1, b0, c0) - P(a0, b0, c0);
}

Sequence3D HistoryIndex::extract(Origin3 origin, Dims3 dims) const {
    Sequence3D s = Sequence3D::zeros(origin, dims);
    if (!ext_) return s;
    for (int la = 0; la < dims.w_lat; ++la) {
        int a = origin.lat + la - ext_->lat_min;
        if (a < 0 || a >= nla_) continue;
        for (int lo = 0; lo < dims.w_lon; ++lo) {
            int b = origin.lon + lo - ext_->lon_min;
            if (b < 0 || b >= nlo_) continue;
            for (int t = 0; t < dims.len; ++t) {
                int c = origin.t + t - ext_->month_min;
                if (c < 0 || c >= nt_) continue;
                s.at(la, lo, t) = double(vals_[(size_t(a) * nlo_ + b) * nt_ + c]);
            }
        }
    }
    return s;
}

std::vector<Dims3> window_dims(Dims3 input_dims, double dim_var_frac) {
    if (input_dims.w_lat < 1 || input_dims.w_lon < 1 || input_dims.len < 1)
        throw ValidationError("window_dims: dims must be >= 1");
    auto variants = [&](int d) {
        std::set<int> s;
        for (double scale : {1.0 - dim_var_frac, 1.0, 1.0 + dim_var_frac})
            s.insert(std::max(1, int(std::floor(double(d) * scale + 0.5))));
        return std::vector<int>(s.begin(), s.end());
    };
    std::vector<int> lats = variants(input_dims.w_lat);
    std::vector<int> lons = variants(input_dims.w_lon);
    std::vector<int> lens = variants(input_dims.len);
    std::vector<Dims3> out;
    for (int a : lats)
        for (int b : lons)
            for (int c : lens) out.push_back(Dims3{a, b, c});
    return out;
}

namespace {

int stride_of(int dim, double frac) { return std::max(1, int(std::floor(double(dim) * frac))); }

struct Candidate {
    Origin3 origin;
    Dims3 dims;
};

bool match_order(const MatchResult& a, const MatchResult& b) {
    if (a.origin.t != b.origin.t) return a.origin.t < b.origin.t;
    if (a.origin.lat != b.origin.lat) return a.origin.lat < b.origin.lat;
    if (a.origin.lon != b.origin.lon) return a.origin.lon < b.origin.lon;
    return a.dims < b.dims;
}

}  // namespace

SearchOutcome rolling_search(const HistoryIndex& history, const DensityCube& input_cube,
                             Dims3 input_dims, int train_end, const ModelParams& params,
                             const SearchOptions& options) {
    params.validate();
    if (input_cube.points.empty()) throw ValidationError("rolling_search: empty input cube");
    SearchOutcome outcome;
    if (history.empty()) return outcome;
    const GridExtent& ext = *history.extent();

    for (const Dims3& dims : window_dims(input_dims, params.dim_var_frac)) {
        if (dims.w_lat > ext.n_lat() || dims.w_lon > ext.n_lon()) continue;
        int s_lat = stride_of(dims.w_lat, params.stride_frac);
        int s_lon = stride_of(dims.w_lon, params.stride_frac);
        int s_t = stride_of(dims.len, params.stride_frac);

        std::vector<Candidate> candidates;
        for (int t0 = ext.month_min; t0 + dims.len + params.horizon - 1 <= train_end; t0 += s_t) {
            for (int la0 = ext.lat_min; la0 + dims.w_lat - 1 <= ext.lat_max; la0 += s_lat) {
                for (int lo0 = ext.lon_min; lo0 + dims.w_lon - 1 <= ext.lon_max; lo0 += s_lon) {
                    ++outcome.windows_scanned;
                    Origin3 o{la0, lo0, t0};
                    if (options.exclude && options.exclude->first == o &&
                        options.exclude->second == dims)
                        continue;
                    if (history.box_sum(o, dims) == 0) continue;
                    ++outcome.windows_nonzero;
                    candidates.push_back(Candidate{o, dims});
                }
            }
        }
        if (candidates.empty()) continue;

        std::vector<std::optional<MatchResult>> results(candidates.size());
        auto evaluate = [&](size_t begin, size_t end) {
            for (size_t i = begin; i < end; ++i) {
                const Candidate& c = candidates[i];
                Sequence3D seq = history.extract(c.origin, c.dims);
                DensityCube cand = to_density_cube(seq, options.coords);
                // The ratio gate is cheap; a failing R rejects regardless of
                // the transport distance, so those solves are skipped.
                double r = active_ratio(input_cube, cand);
                if (r >= params.thr2) continue;
                EmdResult e = emd_min_rotation(input_cube, cand);
                if (e.value >= params.thr1) continue;
                if (c.origin.t + c.dims.len + params.horizon - 1 > train_end)
                    throw InternalError("rolling_search: past future leaks past train_end");
                MatchResult m;
                m.origin = c.origin;
                m.dims = c.dims;
                m.rotation = e.rotation;
                m.emd = e.value;
                m.r = r;
                m.past_future = history.extract(
                    Origin3{c.origin.lat, c.origin.lon, c.origin.t + c.dims.len},
                    Dims3{c.dims.w_lat, c.dims.w_lon, params.horizon});
                results[i] = std::move(m);
            }
        };
        int workers = std::max(1, options.workers);
        if (workers == 1 || candidates.size() < 2) {
            evaluate(0, candidates.size());
        } else {
            size_t per = (candidates.size() + workers - 1) / size_t(workers);
            std::vector<std::thread> pool;
            for (int w = 0; w < workers; ++w) {
                size_t lo = size_t(w) * per, hi = std::min(candidates.size(), lo + per);
                if (lo >= hi) break;
                pool.emplace_back(evaluate, lo, hi);
            }
            for (auto& t : pool) t.join();
        }
        for (auto& r : results)
            if (r) outcome.matches.push_back(std::move(*r));
    }
    std::sort(outcome.matches.begin(), outcome.matches.end(), match_order);
    return outcome;
}

SearchOutcome relax_search(const HistoryIndex& history, const DensityCube& input_cube,
                           Dims3 input_dims, int train_end, const ModelParams& params,
                           const SearchOptions& options) {
    SearchOutcome out = rolling_search(history, input_cube, input_dims, train_end, params, options);
    ModelParams relaxed = params;
    int steps = 0;
    while (int(out.matches.size()) < params.min_matches && steps < params.max_relax_steps) {
        ++steps;
        relaxed.thr1 *= params.relax_factor;
        relaxed.thr2 *= params.relax_factor;
        long long scanned = out.windows_scanned;
        out = rolling_search(history, input_cube, input_dims, train_end, relaxed, options);
        out.windows_scanned = scanned;  // keep the first pass's census
        for (auto& m : out.matches) m.relaxed = true;
    }
    out.relax_steps = steps;
    out.fallback = out.matches.empty();
    return out;
}

std::vector<std::string> provenance_header() {
    return {"zone_id", "t0",  "lat0", "lon0", "w_lat", "w_lon",
            "l",       "rotation", "emd",  "r",    "relaxed"};
}

void append_provenance(csv::Writer& w, long long zone_id, const std::vector<MatchResult>& matches) {
    for (const auto& m : matches) {
        w.row({std::to_string(zone_id), std::to_string(m.origin.t), std::to_string(m.origin.lat),
               std::to_string(m.origin.lon), std::to_string(m.dims.w_lat),
               std::to_string(m.dims.w_lon), std::to_string(m.dims.len),
               std::to_string(m.rotation), csv::format_full(m.emd), csv::format_full(m.r),
               m.relaxed ? "1" : "0"});
    }
}

}  // namespace shapecast
