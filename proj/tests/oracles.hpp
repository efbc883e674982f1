#pragma once

// Independent reference implementations used only to check the engine.
// These deliberately use different algorithms from the library (BFS flood
// fill instead of union-find, polytope vertex enumeration instead of the
// simplex) so agreement is meaningful.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <queue>
#include <random>
#include <set>
#include <vector>

#include "shapecast/cube.hpp"
#include "shapecast/zones.hpp"

namespace oracles {

// BFS flood fill over active cells with Chebyshev-radius neighborhoods.
// Returns components as sorted cell sets, sorted by their minimum cell.
inline std::vector<std::vector<shapecast::Cell>> flood_fill_zones(
    const shapecast::ActiveCellMask& mask, int radius) {
    const int H = mask.n_lat, W = mask.n_lon;
    std::vector<char> visited(size_t(H) * W, 0);
    std::vector<std::vector<shapecast::Cell>> comps;
    for (int la = 0; la < H; ++la) {
        for (int lo = 0; lo < W; ++lo) {
            if (!mask.at_local(la, lo) || visited[size_t(la) * W + lo]) continue;
            std::vector<shapecast::Cell> comp;
            std::queue<std::pair<int, int>> q;
            q.push({la, lo});
            visited[size_t(la) * W + lo] = 1;
            while (!q.empty()) {
                auto [a, b] = q.front();
                q.pop();
                comp.push_back(shapecast::Cell{mask.lat0 + a, mask.lon0 + b});
                for (int da = -radius; da <= radius; ++da) {
                    for (int db = -radius; db <= radius; ++db) {
                        int na = a + da, nb = b + db;
                        if (na < 0 || na >= H || nb < 0 || nb >= W) continue;
                        if (!mask.at_local(na, nb) || visited[size_t(na) * W + nb]) continue;
                        visited[size_t(na) * W + nb] = 1;
                        q.push({na, nb});
                    }
                }
            }
            std::sort(comp.begin(), comp.end());
            comps.push_back(std::move(comp));
        }
    }
    std::sort(comps.begin(), comps.end(),
              [](const auto& x, const auto& y) { return x.front() < y.front(); });
    return comps;
}

// Exact transportation optimum by enumerating every basic feasible solution:
// each spanning tree of the bipartite supply/demand graph determines a
// unique flow; the optimum is the cheapest feasible one. Only viable for
// m, n <= 4 or so.
inline double transport_vertex_enumeration(const std::vector<double>& supply,
                                           const std::vector<double>& demand,
                                           const std::vector<double>& cost) {
    const int m = int(supply.size()), n = int(demand.size());
    const int edges = m * n, nodes = m + n, need = nodes - 1;
    double best = std::numeric_limits<double>::infinity();
    std::vector<int> pick;
    std::vector<int> chosen(need);

    std::function<void(int, int)> recurse = [&](int start, int depth) {
        if (depth == need) {
            // Solve flows by repeatedly peeling degree-1 nodes.
            std::vector<double> residual(nodes);
            for (int i = 0; i < m; ++i) residual[i] = supply[i];
            for (int j = 0; j < n; ++j) residual[m + j] = demand[j];
            std::vector<int> degree(nodes, 0);
            std::vector<char> alive(need, 1);
            for (int e = 0; e < need; ++e) {
                degree[chosen[e] / n]++;
                degree[m + chosen[e] % n]++;
            }
            std::vector<double> flow(need, 0.0);
            for (int round = 0; round < need; ++round) {
                int leaf_edge = -1, leaf_node = -1;
                for (int e = 0; e < need && leaf_edge < 0; ++e) {
                    if (!alive[e]) continue;
                    int r = chosen[e] / n, c = m + chosen[e] % n;
                    if (degree[r] == 1) {
                        leaf_edge = e;
                        leaf_node = r;
                    } else if (degree[c] == 1) {
                        leaf_edge = e;
                        leaf_node = c;
                    }
                }
                if (leaf_edge < 0) return;  // has a cycle, not a tree
                int r = chosen[leaf_edge] / n, c = m + chosen[leaf_edge] % n;
                double f = residual[leaf_node];
                flow[leaf_edge] = f;
                int other = leaf_node == r ? c : r;
                residual[other] -= f;
                residual[leaf_node] = 0;
                alive[leaf_edge] = 0;
                degree[r]--;
                degree[c]--;
            }
            double obj = 0;
            for (int e = 0; e < need; ++e) {
                if (flow[e] < -1e-12) return;  // infeasible vertex
                obj += flow[e] * cost[size_t(chosen[e])];
            }
            best = std::min(best, obj);
            return;
        }
        for (int e = start; e < edges; ++e) {
            chosen[depth] = e;
            recurse(e + 1, depth + 1);
        }
    };
    recurse(0, 0);
    return best;
}

// Small random cube on an integer lattice, normalized coordinates.
inline shapecast::DensityCube random_cube(std::mt19937& rng, int max_pts = 8) {
    std::uniform_int_distribution<int> npts(1, max_pts);
    std::uniform_int_distribution<int> coord(0, 4);
    std::uniform_real_distribution<double> mass(0.2, 2.0);
    int n = npts(rng);
    std::set<std::tuple<int, int, int>> used;
    std::vector<shapecast::CubePoint> pts;
    for (int i = 0; i < n; ++i) {
        auto key = std::make_tuple(coord(rng), coord(rng), coord(rng));
        if (!used.insert(key).second) continue;
        shapecast::CubePoint p;
        p.u_lon = std::get<0>(key) / 4.0;
        p.u_lat = std::get<1>(key) / 4.0;
        p.u_t = std::get<2>(key) / 4.0;
        p.weight = mass(rng);
        pts.push_back(p);
    }
    double total = 0;
    for (auto& p : pts) total += p.weight;
    for (auto& p : pts) p.weight /= total;
    shapecast::DensityCube c;
    c.points = pts;
    c.n_active = int(pts.size());
    c.source_dims = shapecast::Dims3{5, 5, 5};
    return c;
}

}  // namespace oracles
