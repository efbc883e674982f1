#include <doctest.h>

#include <random>
#include <set>

#include "oracles.hpp"
#include "shapecast/errors.hpp"
#include "shapecast/zones.hpp"

using namespace shapecast;

namespace {

ActiveCellMask mask_from(int n_lat, int n_lon, const std::vector<Cell>& active) {
    ActiveCellMask m;
    m.n_lat = n_lat;
    m.n_lon = n_lon;
    m.active.assign(size_t(n_lat) * n_lon, 0);
    for (const Cell& c : active) m.active[size_t(c.lat) * n_lon + c.lon] = 1;
    return m;
}

ActiveZone zone_of(int id, std::vector<Cell> cells) {
    ActiveZone z;
    z.zone_id = id;
    std::sort(cells.begin(), cells.end());
    z.bbox = {cells[0].lat, cells[0].lat, cells[0].lon, cells[0].lon};
    for (const Cell& c : cells) {
        z.bbox.lat_min = std::min(z.bbox.lat_min, c.lat);
        z.bbox.lat_max = std::max(z.bbox.lat_max, c.lat);
        z.bbox.lon_min = std::min(z.bbox.lon_min, c.lon);
        z.bbox.lon_max = std::max(z.bbox.lon_max, c.lon);
    }
    z.cells = std::move(cells);
    return z;
}

}  // namespace

TEST_CASE("active_mask thresholds at one fatality") {
    FatalityField f;
    f.add(4, 3, 0, 9);
    f.add(0, 0, 0, 0);
    AggregatedGrid g = aggregate(f, 0, 0);
    ActiveCellMask m = active_mask(g);
    int n_true = 0;
    for (auto v : m.active) n_true += v;
    CHECK(n_true == 1);
    CHECK(m.at_local(3 - g.lat0, 4 - g.lon0));
}

TEST_CASE("active_mask: all-zero grid gives all-false mask") {
    FatalityField f;
    f.add(2, 2, 0, 0);
    ActiveCellMask m = active_mask(aggregate(f, 0, 0));
    for (auto v : m.active) CHECK(v == 0);
}

TEST_CASE("label_zones joins cells at Chebyshev distance two") {
    auto zones = label_zones(mask_from(1, 5, {{0, 0}, {0, 2}}), 2);
    REQUIRE(zones.size() == 1);
    CHECK(zones[0].cells.size() == 2);
}

TEST_CASE("label_zones splits cells at distance three") {
    auto zones = label_zones(mask_from(1, 5, {{0, 0}, {0, 3}}), 2);
    CHECK(zones.size() == 2);
}

TEST_CASE("label_zones: empty mask gives no zones") {
    CHECK(label_zones(mask_from(4, 4, {}), 2).empty());
}

TEST_CASE("label_zones matches flood fill on random masks") {
    std::mt19937 rng(123);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 200; ++trial) {
        ActiveCellMask m;
        m.n_lat = 30;
        m.n_lon = 30;
        m.active.resize(900);
        double density = 0.05 + 0.3 * u(rng);
        for (auto& a : m.active) a = u(rng) < density ? 1 : 0;
        auto zones = label_zones(m, 2);
        auto expected = oracles::flood_fill_zones(m, 2);
        REQUIRE(zones.size() == expected.size());
        for (size_t i = 0; i < zones.size(); ++i) CHECK(zones[i].cells == expected[i]);
    }
}

TEST_CASE("label_zones partitions the active cells") {
    std::mt19937 rng(77);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    ActiveCellMask m;
    m.n_lat = 20;
    m.n_lon = 20;
    m.active.resize(400);
    for (auto& a : m.active) a = u(rng) < 0.2 ? 1 : 0;
    auto zones = label_zones(m, 2);
    std::set<Cell> seen;
    size_t total = 0;
    for (const auto& z : zones) {
        total += z.cells.size();
        seen.insert(z.cells.begin(), z.cells.end());
    }
    size_t n_active = 0;
    for (auto v : m.active) n_active += v;
    CHECK(total == n_active);
    CHECK(seen.size() == n_active);  // no cell in two zones
}

TEST_CASE("zone ids are deterministic scan order") {
    auto zones = label_zones(mask_from(6, 6, {{5, 5}, {0, 0}, {0, 1}, {5, 4}}), 1);
    REQUIRE(zones.size() == 2);
    CHECK(zones[0].zone_id == 1);
    CHECK(zones[0].cells.front() == Cell{0, 0});
    CHECK(zones[1].zone_id == 2);
}

TEST_CASE("erode keeps only multi-cell zones") {
    std::vector<ActiveZone> zones{zone_of(1, {{0, 0}}), zone_of(2, {{5, 5}, {5, 6}})};
    auto out = erode(zones);
    REQUIRE(out.size() == 1);
    CHECK(out[0].cells.size() == 2);
    CHECK(out[0].zone_id == 1);  // renumbered
}

TEST_CASE("erode: all singletons vanish") {
    std::vector<ActiveZone> zones{zone_of(1, {{0, 0}}), zone_of(2, {{9, 9}})};
    CHECK(erode(zones).empty());
}

TEST_CASE("erode is idempotent") {
    std::vector<ActiveZone> zones{zone_of(1, {{0, 0}}), zone_of(2, {{5, 5}, {5, 6}}),
                                  zone_of(3, {{8, 0}, {8, 1}, {8, 2}})};
    auto once = erode(zones);
    auto twice = erode(once);
    REQUIRE(once.size() == twice.size());
    for (size_t i = 0; i < once.size(); ++i) CHECK(once[i].cells == twice[i].cells);
}

TEST_CASE("erosion retains exactly the clustered share of active cells") {
    // 47 cells in multi-cell zones plus 3 isolated cells: 94% retained.
    std::vector<Cell> active;
    for (int i = 0; i < 47; ++i) active.push_back(Cell{i / 10, i % 10});
    active.push_back(Cell{20, 0});
    active.push_back(Cell{20, 10});
    active.push_back(Cell{20, 20});
    auto zones = erode(label_zones(mask_from(25, 25, active), 2));
    size_t kept = 0;
    for (const auto& z : zones) kept += z.cells.size();
    CHECK(kept == 47);
    CHECK(double(kept) / double(active.size()) == doctest::Approx(0.94));
}

TEST_CASE("dilate_union passes disjoint zones through unflagged") {
    auto a = zone_of(1, {{0, 0}, {0, 1}});
    auto b = zone_of(1, {{9, 9}, {9, 8}});
    auto out = dilate_union({a}, {b});
    REQUIRE(out.size() == 2);
    CHECK_FALSE(out[0].overlapped);
    CHECK_FALSE(out[1].overlapped);
}

TEST_CASE("dilate_union merges an identical pair into one flagged zone") {
    auto a = zone_of(1, {{0, 0}, {0, 1}});
    auto out = dilate_union({a}, {a});
    REQUIRE(out.size() == 1);
    CHECK(out[0].overlapped);
    CHECK(out[0].zone.cells == a.cells);
}

TEST_CASE("dilate_union merges partial overlap into the set union") {
    auto a = zone_of(1, {{0, 0}, {0, 1}});
    auto b = zone_of(1, {{0, 1}, {0, 2}});
    auto out = dilate_union({a}, {b});
    REQUIRE(out.size() == 1);
    CHECK(out[0].overlapped);
    CHECK(out[0].zone.cells == std::vector<Cell>{{0, 0}, {0, 1}, {0, 2}});
}

TEST_CASE("dilate_union is commutative up to ids") {
    auto a = zone_of(1, {{0, 0}, {0, 1}});
    auto b = zone_of(1, {{0, 1}, {0, 2}});
    auto c = zone_of(2, {{7, 7}, {7, 8}});
    auto ab = dilate_union({a, c}, {b});
    auto ba = dilate_union({b}, {a, c});
    REQUIRE(ab.size() == ba.size());
    for (size_t i = 0; i < ab.size(); ++i) {
        CHECK(ab[i].zone.cells == ba[i].zone.cells);
        CHECK(ab[i].overlapped == ba[i].overlapped);
    }
}

TEST_CASE("coverage_stats: everything inside the zones reports 1/1") {
    ModelParams p;
    FatalityField f;
    // Two-cell zone active through the training year, test fatalities inside.
    for (int m = 0; m < 18; ++m) {
        f.add(0, 0, m, 3);
        f.add(1, 0, m, 2);
    }
    CoverageSeries s = coverage_stats(f, p, 11, 11);
    REQUIRE(s.entries.size() == 1);
    CHECK(s.entries[0].pct_fatalities == 1.0);
    CHECK(s.entries[0].pct_active_cells == 1.0);
}

TEST_CASE("coverage_stats: a remote eruption subtracts exactly its share") {
    ModelParams p;
    FatalityField fbase;
    for (int m = 0; m < 18; ++m) {
        fbase.add(0, 0, m, 3);
        fbase.add(1, 0, m, 2);
    }
    FatalityField f = fbase;
    // 40 fatalities far from any training zone, inside the test window.
    f.add(30, 30, 14, 40);
    long long in_zone = 0;
    for (int m = 12; m < 18; ++m) in_zone += 3 + 2;
    CoverageSeries s = coverage_stats(f, p, 11, 11);
    REQUIRE(s.entries.size() == 1);
    double expect = double(in_zone) / double(in_zone + 40);
    CHECK(s.entries[0].pct_fatalities == doctest::Approx(expect).epsilon(1e-12));

    CoverageSeries s0 = coverage_stats(fbase, p, 11, 11);
    CHECK(s0.entries[0].pct_fatalities == 1.0);
    CHECK(s.entries[0].pct_fatalities + 40.0 / double(in_zone + 40) ==
          doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("coverage_stats skips months without history") {
    ModelParams p;
    FatalityField f;
    for (int m = 0; m < 18; ++m) f.add(0, 0, m, 1), f.add(1, 0, m, 1);
    CoverageSeries s = coverage_stats(f, p, 5, 12);
    // train_end 5..10 lack a full 12-month window; 12 lacks a 6-month test.
    CHECK(s.entries.size() == 1);
    CHECK(s.entries[0].train_end == 11);
    CHECK(s.skipped_months.size() == 7);
}

TEST_CASE("coverage percentages stay in [0,1] and are worker-invariant") {
    std::mt19937 rng(5);
    std::uniform_int_distribution<int> c(0, 8), m(0, 29), v(1, 9);
    FatalityField f;
    for (int i = 0; i < 300; ++i) f.add(c(rng), c(rng), m(rng), v(rng));
    ModelParams p;
    CoverageSeries s1 = coverage_stats(f, p, 11, 23, 1);
    CoverageSeries s4 = coverage_stats(f, p, 11, 23, 4);
    REQUIRE(s1.entries.size() == s4.entries.size());
    for (size_t i = 0; i < s1.entries.size(); ++i) {
        CHECK(s1.entries[i].pct_fatalities >= 0.0);
        CHECK(s1.entries[i].pct_fatalities <= 1.0);
        CHECK(s1.entries[i].pct_active_cells >= 0.0);
        CHECK(s1.entries[i].pct_active_cells <= 1.0);
        CHECK(s1.entries[i].pct_fatalities == s4.entries[i].pct_fatalities);
        CHECK(s1.entries[i].pct_active_cells == s4.entries[i].pct_active_cells);
    }
}

TEST_CASE("ModelParams validation names the bad field") {
    ModelParams p;
    p.thr1 = -1;
    CHECK_THROWS_WITH_AS(p.validate(), "thr1 must be > 0", ValidationError);
}
