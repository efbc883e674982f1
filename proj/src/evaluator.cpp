#include "shapecast/evaluator.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "shapecast/errors.hpp"
#include "shapecast/matcher.hpp"

namespace shapecast {

double mse(const std::vector<double>& obs, const std::vector<double>& pred) {
    if (obs.size() != pred.size() || obs.empty())
        throw ValidationError("mse: series must have equal non-zero length");
    double s = 0;
    for (size_t i = 0; i < obs.size(); ++i) {
        double d = obs[i] - pred[i];
        s += d * d;
    }
    return s / double(obs.size());
}

double r_inc(const Sequence3D& seq, const Sequence3D& pf) {
    double denom = seq.total();
    if (denom <= 0) throw ValidationError("r_inc: sequence has zero fatalities");
    return pf.total() / denom;
}

double log_modulus(double x) {
    if (x > 0) return std::log1p(x);
    if (x < 0) return -std::log1p(-x);
    return 0.0;
}

double log_ratio(double metric_benchmark, double metric_model) {
    return std::log((metric_benchmark + 1.0) / (metric_model + 1.0));
}

ZoneMetrics zone_metrics(const Sequence3D& obs, const Sequence3D& pred) {
    if (obs.dims != pred.dims)
        throw ValidationError("zone_metrics: obs and pred boxes differ");
    ZoneMetrics zm;
    double so = obs.total(), sp = pred.total();
    zm.abs_error = std::abs(so - sp);
    for (size_t i = 0; i < obs.values.size(); ++i)
        zm.max_error = std::max(zm.max_error, std::abs(obs.values[i] - pred.values[i]));
    double denom = so > 0 ? so : 1.0;
    zm.mape_logmod = log_modulus((sp - so) / denom);
    if (so > 0 && sp > 0)
        zm.emd = emd_fixed(to_density_cube(obs), to_density_cube(pred));
    return zm;
}

double spatial_distance_baseline(const Sequence3D& p1, const Sequence3D& p2,
                                 const SpatialKernel& kernel) {
    if (p1.dims != p2.dims) throw ValidationError("spatial_distance_baseline: shape mismatch");
    if (p1.dims.w_lat != 5 || p1.dims.w_lon != 5)
        throw ValidationError("spatial_distance_baseline: patterns must be 5x5 spatially");
    double total = 0;
    for (int t = 0; t < p1.dims.len; ++t) {
        double s1 = 0, s2 = 0;
        for (int la = 0; la < 5; ++la)
            for (int lo = 0; lo < 5; ++lo) {
                s1 += p1.at(la, lo, t) * kernel[la][lo];
                s2 += p2.at(la, lo, t) * kernel[la][lo];
            }
        total += std::abs(s1 - s2);
    }
    return total;
}

double euclidean_baseline(const Sequence3D& p1, const Sequence3D& p2) {
    if (p1.dims != p2.dims) throw ValidationError("euclidean_baseline: shape mismatch");
    double s = 0;
    for (size_t i = 0; i < p1.values.size(); ++i) s += std::abs(p1.values[i] - p2.values[i]);
    return s;
}

std::vector<SeqSample> collect_sequences(const FatalityField& field, const ModelParams& params,
                                         int first_train_end, int last_train_end,
                                         int month_step) {
    params.validate();
    if (month_step < 1) throw ValidationError("collect_sequences: month_step must be >= 1");
    std::vector<SeqSample> out;
    if (field.empty()) return out;
    const GridExtent& e = *field.extent();
    for (int m = first_train_end; m <= last_train_end; m += month_step) {
        if (m - params.input_window + 1 < e.month_min || m + params.horizon > e.month_max)
            continue;
        AggregatedGrid g = aggregate(field, m - params.input_window + 1, m);
        for (const ActiveZone& z : erode(label_zones(active_mask(g), params.radius))) {
            Sequence3D seq = extract_sequence(field, z, m - params.input_window + 1, m);
            Sequence3D pf = extract_sequence(field, z, m + 1, m + params.horizon);
            SeqSample s;
            s.cube = to_density_cube(seq);
            s.dims = seq.dims;
            s.r_inc = r_inc(seq, pf);
            if (pf.total() > 0) s.pf_cube = to_density_cube(pf);
            out.push_back(std::move(s));
        }
    }
    return out;
}

namespace {

bool axis_comparable(int a, int b, double f) {
    auto lo = [f](int d) { return std::max(1, int(std::floor(double(d) * (1.0 - f) + 0.5))); };
    auto hi = [f](int d) { return std::max(1, int(std::floor(double(d) * (1.0 + f) + 0.5))); };
    return (b >= lo(a) && b <= hi(a)) || (a >= lo(b) && a <= hi(b));
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
    double se() const {
        if (n < 2) return 0.0;
        return std::sqrt(m2 / double(n - 1)) / std::sqrt(double(n));
    }
};

}  // namespace

std::vector<CorrelationBin> pattern_future_correlation(const std::vector<SeqSample>& samples,
                                                       const ModelParams& params,
                                                       double bin_width) {
    if (bin_width <= 0) throw ValidationError("pattern_future_correlation: bin_width must be > 0");
    std::map<long, std::pair<Welford, Welford>> bins;  // key -> (delta r_inc, emd_pf)
    for (size_t i = 0; i < samples.size(); ++i) {
        for (size_t j = i + 1; j < samples.size(); ++j) {
            const SeqSample& a = samples[i];
            const SeqSample& b = samples[j];
            if (!axis_comparable(a.dims.w_lat, b.dims.w_lat, params.dim_var_frac) ||
                !axis_comparable(a.dims.w_lon, b.dims.w_lon, params.dim_var_frac) ||
                !axis_comparable(a.dims.len, b.dims.len, params.dim_var_frac))
                continue;
            if (active_ratio(a.cube, b.cube) >= params.thr2) continue;
            double x = emd(a.cube, b.cube);
            long key = long(std::floor(x / bin_width));
            auto& [dr, epf] = bins[key];
            dr.add(std::abs(a.r_inc - b.r_inc));
            if (a.pf_cube && b.pf_cube) epf.add(emd(*a.pf_cube, *b.pf_cube));
        }
    }
    std::vector<CorrelationBin> out;
    for (auto& [key, w] : bins) {
        CorrelationBin cb;
        cb.lo = double(key) * bin_width;
        cb.hi = cb.lo + bin_width;
        cb.n = w.first.n;
        cb.mean_delta_r_inc = w.first.mean;
        cb.se_delta_r_inc = w.first.se();
        cb.n_pf = w.second.n;
        cb.mean_emd_pf = w.second.mean;
        cb.se_emd_pf = w.second.se();
        out.push_back(cb);
    }
    return out;
}

}  // namespace shapecast
