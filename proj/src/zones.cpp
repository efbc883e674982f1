#include "shapecast/zones.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <set>
#include <thread>

#include "shapecast/errors.hpp"

namespace shapecast {

void ModelParams::validate() const {
    if (thr1 <= 0) throw ValidationError("thr1 must be > 0");
    if (thr2 <= 0) throw ValidationError("thr2 must be > 0");
    if (clu_coef <= 0) throw ValidationError("clu_coef must be > 0");
    if (radius < 1) throw ValidationError("radius must be >= 1");
    if (input_window < 1) throw ValidationError("input_window must be >= 1");
    if (horizon < 1) throw ValidationError("horizon must be >= 1");
    if (stride_frac <= 0 || stride_frac > 1) throw ValidationError("stride_frac must be in (0,1]");
    if (dim_var_frac < 0 || dim_var_frac >= 1)
        throw ValidationError("dim_var_frac must be in [0,1)");
    if (min_matches < 1) throw ValidationError("min_matches must be >= 1");
    if (relax_factor <= 1.0) throw ValidationError("relax_factor must be > 1");
    if (max_relax_steps < 0) throw ValidationError("max_relax_steps must be >= 0");
}

bool ActiveZone::contains(Cell c) const {
    return std::binary_search(cells.begin(), cells.end(), c);
}

ActiveCellMask active_mask(const AggregatedGrid& grid) {
    ActiveCellMask m;
    m.t_start = grid.t_start;
    m.t_end = grid.t_end;
    m.lat0 = grid.lat0;
    m.lon0 = grid.lon0;
    m.n_lat = grid.n_lat;
    m.n_lon = grid.n_lon;
    m.active.resize(grid.sums.size());
    for (size_t i = 0; i < grid.sums.size(); ++i) m.active[i] = grid.sums[i] >= 1 ? 1 : 0;
    return m;
}

namespace {

struct UnionFind {
    std::vector<int> parent;
    explicit UnionFind(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
    int find(int x) {
        while (parent[x] != x) {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        return x;
    }
    void unite(int a, int b) {
        a = find(a);
        b = find(b);
        if (a == b) return;
        // Keep the minimum index as root so labels are scan-order stable.
        if (a < b)
            parent[b] = a;
        else
            parent[a] = b;
    }
};

std::vector<ActiveZone> zones_from_components(std::map<int, std::vector<Cell>>& comps) {
    std::vector<std::vector<Cell>> groups;
    groups.reserve(comps.size());
    for (auto& [root, cells] : comps) {
        std::sort(cells.begin(), cells.end());
        groups.push_back(std::move(cells));
    }
    std::sort(groups.begin(), groups.end(),
              [](const auto& a, const auto& b) { return a.front() < b.front(); });
    std::vector<ActiveZone> zones;
    zones.reserve(groups.size());
    int next_id = 1;
    for (auto& g : groups) {
        ActiveZone z;
        z.zone_id = next_id++;
        z.bbox = {g.front().lat, g.front().lat, g.front().lon, g.front().lon};
        for (const Cell& c : g) {
            z.bbox.lat_min = std::min(z.bbox.lat_min, c.lat);
            z.bbox.lat_max = std::max(z.bbox.lat_max, c.lat);
            z.bbox.lon_min = std::min(z.bbox.lon_min, c.lon);
            z.bbox.lon_max = std::max(z.bbox.lon_max, c.lon);
        }
        z.cells = std::move(g);
        zones.push_back(std::move(z));
    }
    return zones;
}

}  // namespace

std::vector<ActiveZone> label_zones(const ActiveCellMask& mask, int radius) {
    if (radius < 1) throw ValidationError("label_zones: radius must be >= 1");
    const int H = mask.n_lat, W = mask.n_lon;
    UnionFind uf(H * W);
    for (int la = 0; la < H; ++la) {
        for (int lo = 0; lo < W; ++lo) {
            if (!mask.at_local(la, lo)) continue;
            // Forward half of the (2r+1)^2 neighborhood is enough.
            for (int dla = 0; dla <= radius; ++dla) {
                for (int dlo = dla == 0 ? 1 : -radius; dlo <= radius; ++dlo) {
                    int nla = la + dla, nlo = lo + dlo;
                    if (nla >= H || nlo < 0 || nlo >= W) continue;
                    if (mask.at_local(nla, nlo)) uf.unite(la * W + lo, nla * W + nlo);
                }
            }
        }
    }
    std::map<int, std::vector<Cell>> comps;
    for (int la = 0; la < H; ++la)
        for (int lo = 0; lo < W; ++lo)
            if (mask.at_local(la, lo))
                comps[uf.find(la * W + lo)].push_back(Cell{mask.lat0 + la, mask.lon0 + lo});
    return zones_from_components(comps);
}

std::vector<ActiveZone> erode(const std::vector<ActiveZone>& zones) {
    std::vector<ActiveZone> kept;
    for (const auto& z : zones)
        if (z.cells.size() >= 2) kept.push_back(z);
    std::sort(kept.begin(), kept.end(),
              [](const ActiveZone& a, const ActiveZone& b) { return a.cells.front() < b.cells.front(); });
    for (size_t i = 0; i < kept.size(); ++i) kept[i].zone_id = int(i) + 1;
    return kept;
}

std::vector<MergedZone> dilate_union(const std::vector<ActiveZone>& zones_a,
                                     const std::vector<ActiveZone>& zones_b) {
    std::vector<const ActiveZone*> all;
    for (const auto& z : zones_a) all.push_back(&z);
    for (const auto& z : zones_b) all.push_back(&z);
    UnionFind uf(int(all.size()));
    std::map<Cell, int> owner;
    for (size_t i = 0; i < all.size(); ++i) {
        for (const Cell& c : all[i]->cells) {
            auto [it, inserted] = owner.try_emplace(c, int(i));
            if (!inserted) uf.unite(it->second, int(i));
        }
    }
    std::map<int, std::vector<int>> groups;
    for (size_t i = 0; i < all.size(); ++i) groups[uf.find(int(i))].push_back(int(i));

    std::map<int, std::vector<Cell>> comps;
    std::map<int, bool> flagged;
    int key = 0;
    for (auto& [root, members] : groups) {
        std::set<Cell> cells;
        for (int m : members)
            cells.insert(all[m]->cells.begin(), all[m]->cells.end());
        comps[key] = std::vector<Cell>(cells.begin(), cells.end());
        flagged[key] = members.size() > 1;
        ++key;
    }
    // Rebuild flags after zones_from_components reorders by minimum cell.
    std::vector<std::pair<Cell, bool>> flag_by_min;
    for (auto& [k, cells] : comps) flag_by_min.emplace_back(cells.front(), flagged[k]);
    std::vector<ActiveZone> zones = zones_from_components(comps);
    std::vector<MergedZone> out;
    out.reserve(zones.size());
    for (auto& z : zones) {
        bool f = false;
        for (auto& [min_cell, flag] : flag_by_min)
            if (min_cell == z.cells.front()) f = flag;
        out.push_back(MergedZone{std::move(z), f});
    }
    return out;
}

namespace {

CoverageEntry coverage_for_month(const FatalityField& field, const ModelParams& params, int m) {
    AggregatedGrid g = aggregate(field, m - params.input_window + 1, m);
    std::vector<ActiveZone> zones = erode(label_zones(active_mask(g), params.radius));
    std::set<Cell> zone_cells;
    for (const auto& z : zones) zone_cells.insert(z.cells.begin(), z.cells.end());

    int test_start = m + 1, test_end = m + params.horizon;
    long long fat_total = 0, fat_in = 0;
    std::set<Cell> active_total, active_in;
    for (const auto& [k, v] : field.cells()) {
        if (k.month < test_start || k.month > test_end) continue;
        Cell c{k.lat, k.lon};
        fat_total += v;
        active_total.insert(c);
        if (zone_cells.count(c)) {
            fat_in += v;
            active_in.insert(c);
        }
    }
    CoverageEntry e;
    e.train_end = m;
    e.pct_fatalities = fat_total == 0 ? 1.0 : double(fat_in) / double(fat_total);
    e.pct_active_cells =
        active_total.empty() ? 1.0 : double(active_in.size()) / double(active_total.size());
    return e;
}

}  // namespace

CoverageSeries coverage_stats(const FatalityField& field, const ModelParams& params,
                              int first_train_end, int last_train_end, int workers) {
    params.validate();
    if (first_train_end > last_train_end)
        throw ValidationError("coverage_stats: first_train_end > last_train_end");
    CoverageSeries series;
    if (field.empty()) {
        for (int m = first_train_end; m <= last_train_end; ++m) series.skipped_months.push_back(m);
        return series;
    }
    const GridExtent& e = *field.extent();
    std::vector<int> months;
    for (int m = first_train_end; m <= last_train_end; ++m) {
        if (m - params.input_window + 1 < e.month_min || m + params.horizon > e.month_max)
            series.skipped_months.push_back(m);
        else
            months.push_back(m);
    }
    series.entries.resize(months.size());
    int n_workers = std::max(1, std::min<int>(workers, int(months.size())));
    if (n_workers <= 1) {
        for (size_t i = 0; i < months.size(); ++i)
            series.entries[i] = coverage_for_month(field, params, months[i]);
    } else {
        std::vector<std::thread> pool;
        size_t per = (months.size() + n_workers - 1) / n_workers;
        for (int w = 0; w < n_workers; ++w) {
            size_t lo = w * per, hi = std::min(months.size(), lo + per);
            if (lo >= hi) break;
            pool.emplace_back([&, lo, hi] {
                for (size_t i = lo; i < hi; ++i)
                    series.entries[i] = coverage_for_month(field, params, months[i]);
            });
        }
        for (auto& t : pool) t.join();
    }
    return series;
}

}  // namespace shapecast
