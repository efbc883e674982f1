#include "shapecast/transport.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "shapecast/csv.hpp"
#include "shapecast/errors.hpp"

namespace shapecast {

namespace {

constexpr double kOptTol = 1e-9;   // reduced-cost optimality tolerance
constexpr double kMassTol = 1e-6;  // marginal mass mismatch allowed

double point_distance(const CubePoint& a, const CubePoint& b) {
    double dl = a.u_lon - b.u_lon;
    double da = a.u_lat - b.u_lat;
    double dt = a.u_t - b.u_t;
    return std::sqrt(dl * dl + da * da + dt * dt);
}

// Dense transportation simplex. The basis is a spanning tree over the m
// row-nodes and n column-nodes; duals and the pivot cycle are recomputed
// from scratch each iteration, which is plenty fast at the instance sizes
// this engine produces (tens to low hundreds of points).
class TransportSimplex {
public:
    TransportSimplex(std::vector<double> supply, std::vector<double> demand,
                     const std::vector<double>& cost)
        : m_(int(supply.size())),
          n_(int(demand.size())),
          a_(std::move(supply)),
          b_(std::move(demand)),
          c_(cost),
          flow_(size_t(m_) * n_, 0.0),
          basic_(size_t(m_) * n_, 0) {}

    void run() {
        northwest_corner();
        const int nodes = m_ + n_;
        // Enough headroom over the typical pivot count; exceeding it means
        // the pivot rules are broken, not that the instance is hard.
        const long max_pivots = 20000 + 500L * nodes;
        int degenerate_streak = 0;
        bool bland = false;
        for (long pivot = 0;; ++pivot) {
            if (pivot > max_pivots)
                throw InternalError("transport simplex exceeded pivot budget");
            compute_duals();
            int enter = select_entering(bland);
            if (enter < 0) return;  // optimal within tolerance
            double theta = pivot_on(enter);
            if (theta > 0.0) {
                degenerate_streak = 0;
                bland = false;
            } else if (++degenerate_streak > nodes) {
                bland = true;  // anti-cycling: fall back to smallest-index rule
            }
        }
    }

    double flow_at(int i, int j) const { return flow_[size_t(i) * n_ + j]; }

private:
    size_t idx(int i, int j) const { return size_t(i) * n_ + j; }

    void northwest_corner() {
        int i = 0, j = 0;
        double ra = a_[0], rb = b_[0];
        while (true) {
            double x = std::min(ra, rb);
            flow_[idx(i, j)] = x;
            basic_[idx(i, j)] = 1;
            ra -= x;
            rb -= x;
            if (i == m_ - 1 && j == n_ - 1) break;
            if (ra <= rb && i < m_ - 1) {
                ++i;
                ra = a_[i];
            } else {
                ++j;
                rb = b_[j];
            }
        }
    }

    void compute_duals() {
        u_.assign(m_, 0.0);
        v_.assign(n_, 0.0);
        std::vector<char> seen(m_ + n_, 0);
        std::vector<int> stack{0};  // root at row 0, u[0] = 0
        seen[0] = 1;
        while (!stack.empty()) {
            int node = stack.back();
            stack.pop_back();
            if (node < m_) {
                for (int j = 0; j < n_; ++j) {
                    if (basic_[idx(node, j)] && !seen[m_ + j]) {
                        v_[j] = c_[idx(node, j)] - u_[node];
                        seen[m_ + j] = 1;
                        stack.push_back(m_ + j);
                    }
                }
            } else {
                int j = node - m_;
                for (int i = 0; i < m_; ++i) {
                    if (basic_[idx(i, j)] && !seen[i]) {
                        u_[i] = c_[idx(i, j)] - v_[j];
                        seen[i] = 1;
                        stack.push_back(i);
                    }
                }
            }
        }
    }

    int select_entering(bool bland) const {
        int best = -1;
        double best_r = -kOptTol;
        for (int i = 0; i < m_; ++i) {
            for (int j = 0; j < n_; ++j) {
                size_t k = idx(i, j);
                if (basic_[k]) continue;
                double r = c_[k] - u_[i] - v_[j];
                if (r < best_r) {
                    best = int(k);
                    if (bland) return best;
                    best_r = r;
                }
            }
        }
        return best;
    }

    // Applies the pivot for the entering arc and returns the flow shift.
    double pivot_on(int enter) {
        int ei = enter / n_, ej = enter % n_;
        std::vector<int> parent(m_ + n_, -1);
        std::vector<char> seen(m_ + n_, 0);
        std::vector<int> queue{ei};
        seen[ei] = 1;
        while (!queue.empty()) {
            std::vector<int> next;
            for (int node : queue) {
                if (node < m_) {
                    for (int j = 0; j < n_; ++j)
                        if (basic_[idx(node, j)] && !seen[m_ + j]) {
                            seen[m_ + j] = 1;
                            parent[m_ + j] = node;
                            next.push_back(m_ + j);
                        }
                } else {
                    int j = node - m_;
                    for (int i = 0; i < m_; ++i)
                        if (basic_[idx(i, j)] && !seen[i]) {
                            seen[i] = 1;
                            parent[i] = m_ + j;
                            next.push_back(i);
                        }
                }
            }
            queue = std::move(next);
        }
        if (!seen[m_ + ej]) throw InternalError("transport simplex: basis not spanning");

        // Tree path from the entering column back to the entering row;
        // edges alternate -,+,-,... starting at the column endpoint.
        std::vector<size_t> minus, plus;
        int node = m_ + ej;
        bool negative = true;
        while (node != ei) {
            int par = parent[node];
            size_t arc = node < m_ ? idx(node, par - m_) : idx(par, node - m_);
            (negative ? minus : plus).push_back(arc);
            negative = !negative;
            node = par;
        }

        double theta = std::numeric_limits<double>::infinity();
        size_t leave = size_t(-1);
        for (size_t arc : minus) {
            // Smallest-index tie break keeps the leaving choice Bland-safe.
            if (flow_[arc] < theta || (flow_[arc] == theta && arc < leave)) {
                theta = flow_[arc];
                leave = arc;
            }
        }
        for (size_t arc : plus) flow_[arc] += theta;
        for (size_t arc : minus) flow_[arc] -= theta;
        flow_[size_t(enter)] = theta;
        basic_[size_t(enter)] = 1;
        flow_[leave] = 0.0;
        basic_[leave] = 0;
        return theta;
    }

    int m_, n_;
    std::vector<double> a_, b_;
    const std::vector<double>& c_;
    std::vector<double> flow_;
    std::vector<char> basic_;
    std::vector<double> u_, v_;
};

}  // namespace

TransportPlan solve_ot(const DensityCube& source, const DensityCube& target) {
    if (source.points.empty() || target.points.empty())
        throw ValidationError("solve_ot: empty distribution");
    double sa = source.mass(), sb = target.mass();
    if (std::abs(sa - sb) > kMassTol)
        throw ValidationError("solve_ot: marginal masses differ by " +
                              std::to_string(std::abs(sa - sb)));

    const int m = int(source.points.size());
    const int n = int(target.points.size());
    TransportPlan plan;
    plan.n1 = m;
    plan.n2 = n;
    plan.cost.resize(size_t(m) * n);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < n; ++j)
            plan.cost[size_t(i) * n + j] = point_distance(source.points[i], target.points[j]);

    std::vector<double> supply(m), demand(n);
    for (int i = 0; i < m; ++i) supply[i] = source.points[i].weight;
    // Rescale the demand side so the problem is balanced to the last bit.
    for (int j = 0; j < n; ++j) demand[j] = target.points[j].weight * (sa / sb);

    TransportSimplex simplex(std::move(supply), std::move(demand), plan.cost);
    simplex.run();

    plan.gamma.resize(size_t(m) * n);
    double obj = 0.0;
    for (int i = 0; i < m; ++i) {
        for (int j = 0; j < n; ++j) {
            double f = simplex.flow_at(i, j);
            plan.gamma[size_t(i) * n + j] = f;
            obj += f * plan.cost[size_t(i) * n + j];
        }
    }
    plan.objective = obj;
    return plan;
}

EmdResult emd_min_rotation(const DensityCube& a, const DensityCube& b) {
    EmdResult best;
    best.value = std::numeric_limits<double>::infinity();
    for (int k = 0; k < 4; ++k) {
        double v = solve_ot(rotate90(a, k), b).objective;
        if (v < best.value) {
            best.value = v;
            best.rotation = k;
        }
    }
    return best;
}

double emd(const DensityCube& a, const DensityCube& b) { return emd_min_rotation(a, b).value; }

double emd_fixed(const DensityCube& a, const DensityCube& b) { return solve_ot(a, b).objective; }

double active_ratio(const DensityCube& a, const DensityCube& b) {
    if (a.n_active < 1 || b.n_active < 1)
        throw ValidationError("active_ratio: cube without active cells");
    // |tanh(ln(n1/n2))| in algebraic form: with r = max/min >= 1 this is
    // (r^2 - 1) / (r^2 + 1), exactly symmetric and exact on small ratios.
    double r = double(std::max(a.n_active, b.n_active)) / double(std::min(a.n_active, b.n_active));
    return (r * r - 1.0) / (r * r + 1.0);
}

Similarity is_similar(const DensityCube& a, const DensityCube& b, const ModelParams& params) {
    Similarity s;
    s.r = active_ratio(a, b);
    EmdResult e = emd_min_rotation(a, b);
    s.emd = e.value;
    s.rotation = e.rotation;
    s.similar = s.emd < params.thr1 && s.r < params.thr2;
    return s;
}

void dump_plan_csv(const TransportPlan& plan, const std::filesystem::path& path) {
    csv::Writer w(path);
    w.row({"src_idx", "dst_idx", "flow", "cost"});
    for (int i = 0; i < plan.n1; ++i)
        for (int j = 0; j < plan.n2; ++j)
            if (plan.flow(i, j) != 0.0)
                w.row({std::to_string(i), std::to_string(j), csv::format_full(plan.flow(i, j)),
                       csv::format_full(plan.cost_at(i, j))});
    w.close();
}

}  // namespace shapecast
