#include <doctest.h>

#include <cmath>
#include <random>

#include "shapecast/errors.hpp"
#include "shapecast/evaluator.hpp"
#include "shapecast/toy.hpp"

using namespace shapecast;

namespace {

Sequence3D seq_of(Dims3 d, std::vector<double> vals) {
    Sequence3D s = Sequence3D::zeros(Origin3{}, d);
    REQUIRE(vals.size() == s.values.size());
    s.values = std::move(vals);
    return s;
}

SeqSample sample_from(Sequence3D seq, Sequence3D pf) {
    SeqSample s;
    s.dims = seq.dims;
    s.r_inc = r_inc(seq, pf);
    s.cube = to_density_cube(seq);
    if (pf.total() > 0) s.pf_cube = to_density_cube(pf);
    return s;
}

}  // namespace

TEST_CASE("mse basics") {
    CHECK(mse({1, 2, 3}, {1, 2, 3}) == 0.0);
    CHECK(mse({0, 0}, {1, 1}) == 1.0);
    CHECK(mse({3}, {0}) == 9.0);
    CHECK_THROWS_AS(mse({1, 2}, {1}), ValidationError);
    CHECK_THROWS_AS(mse({}, {}), ValidationError);
}

TEST_CASE("r_inc basics") {
    Sequence3D seq = seq_of(Dims3{1, 1, 2}, {4, 6});
    CHECK(r_inc(seq, seq_of(Dims3{1, 1, 2}, {4, 6})) == 1.0);
    CHECK(r_inc(seq_of(Dims3{1, 1, 2}, {4, 6}), seq_of(Dims3{1, 1, 1}, {25})) == 2.5);
    CHECK(r_inc(seq, seq_of(Dims3{1, 1, 2}, {0, 0})) == 0.0);
    CHECK_THROWS_AS(r_inc(seq_of(Dims3{1, 1, 1}, {0}), seq), ValidationError);
}

TEST_CASE("log_modulus is odd and zero at zero") {
    CHECK(log_modulus(0.0) == 0.0);
    std::mt19937 rng(55);
    std::uniform_real_distribution<double> u(-20.0, 20.0);
    for (int i = 0; i < 100; ++i) {
        double x = u(rng);
        CHECK(log_modulus(-x) == doctest::Approx(-log_modulus(x)).epsilon(1e-12));
    }
    CHECK(log_modulus(std::exp(1.0) - 1.0) == doctest::Approx(1.0));
}

TEST_CASE("log_ratio basics and antisymmetry") {
    CHECK(log_ratio(5, 5) == 0.0);
    CHECK(log_ratio(9, 4) == doctest::Approx(std::log(2.0)).epsilon(1e-12));
    CHECK(log_ratio(0, 0) == 0.0);
    std::mt19937 rng(56);
    std::uniform_real_distribution<double> u(0.0, 50.0);
    for (int i = 0; i < 100; ++i) {
        double a = u(rng), b = u(rng);
        CHECK(log_ratio(a, b) == doctest::Approx(-log_ratio(b, a)).epsilon(1e-12));
    }
}

TEST_CASE("zone_metrics: perfect prediction scores zero everywhere") {
    Sequence3D obs = seq_of(Dims3{1, 2, 2}, {1, 2, 3, 4});
    ZoneMetrics zm = zone_metrics(obs, obs);
    CHECK(zm.abs_error == 0.0);
    REQUIRE(zm.emd.has_value());
    CHECK(*zm.emd < 1e-9);
    CHECK(zm.mape_logmod == 0.0);
    CHECK(zm.max_error == 0.0);
}

TEST_CASE("zone_metrics: cumulative absolute error") {
    Sequence3D obs = seq_of(Dims3{1, 1, 2}, {60, 40});
    Sequence3D pred = seq_of(Dims3{1, 1, 2}, {70, 60});
    ZoneMetrics zm = zone_metrics(obs, pred);
    CHECK(zm.abs_error == 30.0);
    CHECK(zm.mape_logmod == doctest::Approx(log_modulus(30.0 / 100.0)).epsilon(1e-12));
    CHECK(zm.max_error == 20.0);
}

TEST_CASE("zone_metrics: adjacent-cell miss keeps abs_error zero but not emd") {
    // Mass in one cell observed, same mass in the neighboring cell
    // predicted: cumulative error says perfect, the shape distance says
    // one normalized cell spacing.
    Sequence3D obs = seq_of(Dims3{1, 3, 1}, {50, 0, 0});
    Sequence3D pred = seq_of(Dims3{1, 3, 1}, {0, 50, 0});
    ZoneMetrics zm = zone_metrics(obs, pred);
    CHECK(zm.abs_error == 0.0);
    REQUIRE(zm.emd.has_value());
    CHECK(*zm.emd == doctest::Approx(0.5).epsilon(1e-9));  // 1/(3-1)
}

TEST_CASE("zone_metrics: zero observed mass smooths the denominator and drops emd") {
    Sequence3D obs = seq_of(Dims3{1, 1, 2}, {0, 0});
    Sequence3D pred = seq_of(Dims3{1, 1, 2}, {3, 0});
    ZoneMetrics zm = zone_metrics(obs, pred);
    CHECK_FALSE(zm.emd.has_value());
    CHECK(zm.abs_error == 3.0);
    CHECK(zm.mape_logmod == doctest::Approx(log_modulus(3.0)).epsilon(1e-12));
}

TEST_CASE("zone_metrics rejects mismatched boxes") {
    CHECK_THROWS_AS(
        zone_metrics(seq_of(Dims3{1, 1, 1}, {1}), seq_of(Dims3{1, 1, 2}, {1, 1})),
        ValidationError);
}

TEST_CASE("spatial and euclidean baselines reproduce the worked example") {
    Sequence3D p1 = toy::pattern(1), p2 = toy::pattern(2), p3 = toy::pattern(3);
    const SpatialKernel& k = toy::spatial_kernel();
    CHECK(std::abs(spatial_distance_baseline(p1, p2, k) - 8.57) < 1e-2);
    CHECK(std::abs(spatial_distance_baseline(p1, p3, k) - 5.13) < 1e-2);
    CHECK(spatial_distance_baseline(p1, p1, k) == 0.0);
    CHECK(euclidean_baseline(p1, p2) == 84.0);
    CHECK(euclidean_baseline(p1, p3) == 84.0);
    CHECK(euclidean_baseline(p2, p2) == 0.0);
    CHECK_THROWS_AS(euclidean_baseline(p1, seq_of(Dims3{1, 1, 1}, {1})), ValidationError);
}

TEST_CASE("the motivating inequality triple holds") {
    toy::Report r = toy::run();
    CHECK(r.emd_12 < r.emd_13);
    CHECK(r.sp_12 > r.sp_13);
    CHECK(r.ed_12 == r.ed_13);
}

TEST_CASE("correlation: identical planted pairs land in the zero bin") {
    Sequence3D seq = seq_of(Dims3{1, 2, 2}, {1, 2, 3, 4});
    Sequence3D pf = seq_of(Dims3{1, 2, 2}, {2, 2, 2, 2});
    std::vector<SeqSample> samples{sample_from(seq, pf), sample_from(seq, pf)};
    ModelParams p;
    auto bins = pattern_future_correlation(samples, p);
    REQUIRE(bins.size() == 1);
    CHECK(bins[0].lo == 0.0);
    CHECK(bins[0].n == 1);
    CHECK(bins[0].mean_delta_r_inc == 0.0);
    CHECK(bins[0].mean_emd_pf < 1e-9);
}

TEST_CASE("correlation: monotone construction gives non-decreasing bin means") {
    // Single-point patterns marching along a wide box: pattern distance,
    // past-future distance and the r_inc gap all grow linearly together.
    ModelParams p;
    p.thr2 = 0.5;  // active counts are all 1, the gate always passes
    std::vector<SeqSample> samples;
    const int W = 21;
    for (int i = 0; i < 6; ++i) {
        Sequence3D seq = Sequence3D::zeros(Origin3{}, Dims3{1, W, 1});
        seq.at(0, i, 0) = 10;
        Sequence3D pf = Sequence3D::zeros(Origin3{}, Dims3{1, W, 1});
        pf.at(0, i, 0) = 10 * (i + 1);
        samples.push_back(sample_from(seq, pf));
    }
    // Bin width incommensurate with the lattice spacing so no pair lands on
    // a bin edge.
    auto bins = pattern_future_correlation(samples, p, 0.07);
    REQUIRE(bins.size() >= 2);
    for (size_t i = 1; i < bins.size(); ++i) {
        CHECK(bins[i].lo > bins[i - 1].lo);
        CHECK(bins[i].mean_delta_r_inc >= bins[i - 1].mean_delta_r_inc);
        CHECK(bins[i].mean_emd_pf >= bins[i - 1].mean_emd_pf);
    }
}

TEST_CASE("correlation: nothing comparable gives an empty table") {
    // Dimensions too different for the +-1/4 gate.
    std::vector<SeqSample> samples{
        sample_from(seq_of(Dims3{1, 1, 1}, {5}), seq_of(Dims3{1, 1, 1}, {5})),
        sample_from(seq_of(Dims3{1, 12, 1}, {1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1}),
                    seq_of(Dims3{1, 12, 1}, {1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0}))};
    ModelParams p;
    CHECK(pattern_future_correlation(samples, p).empty());
}

TEST_CASE("collect_sequences pairs each zone with its observed past future") {
    FatalityField f;
    for (int m = 0; m < 18; ++m) {
        f.add(0, 0, m, 2);
        f.add(1, 0, m, 1);
    }
    ModelParams p;
    auto samples = collect_sequences(f, p, 11, 11);
    REQUIRE(samples.size() == 1);
    CHECK(samples[0].dims == Dims3{1, 2, 12});
    // 6 test months of 3 fatalities over 12 training months of 3.
    CHECK(samples[0].r_inc == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(samples[0].pf_cube.has_value());
}
