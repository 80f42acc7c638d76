// Test-only oracles, deliberately implemented on different routes than the
// library code they check.
#ifndef SOCAP_TESTS_ORACLES_HPP
#define SOCAP_TESTS_ORACLES_HPP

#include <cmath>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <vector>

#include "socap/community.hpp"
#include "socap/graph.hpp"
#include "socap/rng.hpp"

namespace oracles {

// Paper-formula modularity by brute edge classification: for every community,
// scan the full edge list and count incident/within edges directly.
inline double modularity_paper_edge_tally(const socap::GraphView& g, const socap::Partition& p) {
    std::vector<std::pair<int, int>> edges;
    for (std::size_t v = 0; v < g.n; ++v)
        for (std::int32_t u : g.neighbors(v))
            if (static_cast<std::size_t>(u) > v) edges.emplace_back(static_cast<int>(v), u);
    const double L = static_cast<double>(edges.size());
    double q = 0.0;
    for (int k = 1; k <= p.K; ++k) {
        double lk = 0.0, lkw = 0.0;
        for (const auto& [a, b] : edges) {
            const bool in_a = p.label[static_cast<std::size_t>(a)] == k;
            const bool in_b = p.label[static_cast<std::size_t>(b)] == k;
            if (in_a || in_b) lk += 1.0;
            if (in_a && in_b) lkw += 1.0;
        }
        q += lkw / L - (lk / L) * (lk / L);
    }
    return q;
}

inline double q_max_edge_tally(const socap::GraphView& g, const socap::Partition& p) {
    std::vector<std::pair<int, int>> edges;
    for (std::size_t v = 0; v < g.n; ++v)
        for (std::int32_t u : g.neighbors(v))
            if (static_cast<std::size_t>(u) > v) edges.emplace_back(static_cast<int>(v), u);
    const double L = static_cast<double>(edges.size());
    double q = 0.0;
    for (int k = 1; k <= p.K; ++k) {
        double lk = 0.0;
        for (const auto& [a, b] : edges)
            if (p.label[static_cast<std::size_t>(a)] == k || p.label[static_cast<std::size_t>(b)] == k) lk += 1.0;
        q += lk / L - (lk / L) * (lk / L);
    }
    return q;
}

// Newman-Girvan modularity straight from the definition:
// (1/2L) sum_ij (A_ij - k_i k_j / 2L) [c_i = c_j].
inline double ng_modularity_definition(const socap::GraphView& g, const socap::Partition& p) {
    const double two_l = 2.0 * static_cast<double>(g.m);
    std::vector<std::vector<char>> adj(g.n, std::vector<char>(g.n, 0));
    std::vector<double> deg(g.n, 0.0);
    for (std::size_t v = 0; v < g.n; ++v) {
        deg[v] = static_cast<double>(g.degree(v));
        for (std::int32_t u : g.neighbors(v)) adj[v][static_cast<std::size_t>(u)] = 1;
    }
    double q = 0.0;
    for (std::size_t i = 0; i < g.n; ++i)
        for (std::size_t j = 0; j < g.n; ++j)
            if (p.label[i] == p.label[j]) q += static_cast<double>(adj[i][j]) - deg[i] * deg[j] / two_l;
    return q / two_l;
}

// Exhaustive best NG modularity by a second, recursive enumeration that
// assigns nodes from the highest index down.
inline double best_modularity_recursive(const socap::GraphView& g) {
    const std::size_t n = g.n;
    std::vector<int> label(n, -1);
    double best = -std::numeric_limits<double>::infinity();
    socap::Partition p;
    p.label.resize(n);

    auto evaluate = [&]() {
        int K = 0;
        for (std::size_t v = 0; v < n; ++v) K = std::max(K, label[v] + 1);
        for (std::size_t v = 0; v < n; ++v) p.label[v] = label[v] + 1;
        p.K = K;
        best = std::max(best, ng_modularity_definition(g, p));
    };

    // assign node (n-1-depth); block ids introduced in first-use order
    auto rec = [&](auto&& self, std::size_t depth, int used) -> void {
        if (depth == n) {
            evaluate();
            return;
        }
        const std::size_t v = n - 1 - depth;
        for (int c = 0; c <= used; ++c) {
            label[v] = c;
            self(self, depth + 1, std::max(used, c + 1));
        }
        label[v] = -1;
    };
    rec(rec, 0, 0);
    return best;
}

// Gaussian elimination with partial pivoting on the normal equations
// (X'X) beta = X'y, no Eigen involved.
inline std::vector<double> solve_normal_equations(const std::vector<std::vector<double>>& X,
                                                  const std::vector<double>& y) {
    const std::size_t n = X.size(), p = X[0].size();
    std::vector<std::vector<double>> A(p, std::vector<double>(p + 1, 0.0));
    for (std::size_t a = 0; a < p; ++a) {
        for (std::size_t b = 0; b < p; ++b)
            for (std::size_t i = 0; i < n; ++i) A[a][b] += X[i][a] * X[i][b];
        for (std::size_t i = 0; i < n; ++i) A[a][p] += X[i][a] * y[i];
    }
    for (std::size_t col = 0; col < p; ++col) {
        std::size_t piv = col;
        for (std::size_t r = col + 1; r < p; ++r)
            if (std::fabs(A[r][col]) > std::fabs(A[piv][col])) piv = r;
        std::swap(A[col], A[piv]);
        if (std::fabs(A[col][col]) < 1e-12) throw std::runtime_error("singular normal equations");
        for (std::size_t r = 0; r < p; ++r) {
            if (r == col) continue;
            const double f = A[r][col] / A[col][col];
            for (std::size_t c = col; c <= p; ++c) A[r][c] -= f * A[col][c];
        }
    }
    std::vector<double> beta(p);
    for (std::size_t r = 0; r < p; ++r) beta[r] = A[r][p] / A[r][r];
    return beta;
}

// Full exact U distribution for tie-free designs by dynamic programming over
// rank-sum counts; returns the two-sided p for u_obs.
inline double mwu_exact_p_dp(std::size_t n1, std::size_t n2, std::int64_t u_obs) {
    const std::size_t N = n1 + n2;
    const std::size_t max_sum = N * (N + 1) / 2;
    // ways[j][s]: subsets of size j of ranks seen so far with rank sum s
    std::vector<std::vector<double>> ways(n1 + 1, std::vector<double>(max_sum + 1, 0.0));
    ways[0][0] = 1.0;
    for (std::size_t r = 1; r <= N; ++r)
        for (std::size_t j = std::min(n1, r); j >= 1; --j)
            for (std::size_t s = max_sum; s >= r; --s) ways[j][s] += ways[j - 1][s - r];
    const std::int64_t two_mu = static_cast<std::int64_t>(n1) * static_cast<std::int64_t>(n2);
    const std::int64_t d_obs = std::llabs(2 * u_obs - two_mu);
    double total = 0.0, extreme = 0.0;
    const std::int64_t offset = static_cast<std::int64_t>(n1 * (n1 + 1) / 2);
    for (std::size_t s = 0; s <= max_sum; ++s) {
        const double w = ways[n1][s];
        if (w == 0.0) continue;
        total += w;
        const std::int64_t u = static_cast<std::int64_t>(s) - offset;
        if (std::llabs(2 * u - two_mu) >= d_obs) extreme += w;
    }
    return extreme / total;
}

// Independent transcription of the tie-corrected normal approximation.
inline double mwu_normal_p_reference(const std::vector<double>& a, const std::vector<double>& b,
                                     double u) {
    const double n1 = static_cast<double>(a.size()), n2 = static_cast<double>(b.size());
    const double N = n1 + n2;
    std::map<double, int> counts;
    for (double v : a) ++counts[v];
    for (double v : b) ++counts[v];
    double tie = 0.0;
    for (const auto& [v, t] : counts) tie += static_cast<double>(t) * t * t - t;
    const double mu = n1 * n2 / 2.0;
    const double var = n1 * n2 / 12.0 * ((N + 1.0) - tie / (N * (N - 1.0)));
    if (var <= 0.0) return 1.0;
    const double d = u - mu;
    if (d == 0.0) return 1.0;
    const double z = (std::fabs(d) - 0.5 < 0.0 ? 0.0 : std::fabs(d) - 0.5) / std::sqrt(var);
    const double phi = 0.5 * std::erfc(z / std::sqrt(2.0));
    return std::min(1.0, 2.0 * phi);
}

// se of c'beta via an explicit quadratic form over the covariance matrix.
inline double quadratic_form_se(const std::vector<std::vector<double>>& cov, const std::vector<double>& c) {
    double s = 0.0;
    for (std::size_t i = 0; i < c.size(); ++i)
        for (std::size_t j = 0; j < c.size(); ++j) s += c[i] * cov[i][j] * c[j];
    return std::sqrt(s);
}

// Adjusted Rand index between two labelings.
inline double adjusted_rand_index(const std::vector<std::int32_t>& a, const std::vector<std::int32_t>& b) {
    const std::size_t n = a.size();
    std::map<std::pair<std::int32_t, std::int32_t>, double> cell;
    std::map<std::int32_t, double> ra, rb;
    for (std::size_t i = 0; i < n; ++i) {
        cell[{a[i], b[i]}] += 1.0;
        ra[a[i]] += 1.0;
        rb[b[i]] += 1.0;
    }
    auto choose2 = [](double m) { return m * (m - 1.0) / 2.0; };
    double sum_cell = 0.0, sum_a = 0.0, sum_b = 0.0;
    for (const auto& [k, v] : cell) sum_cell += choose2(v);
    for (const auto& [k, v] : ra) sum_a += choose2(v);
    for (const auto& [k, v] : rb) sum_b += choose2(v);
    const double total = choose2(static_cast<double>(n));
    const double expected = sum_a * sum_b / total;
    const double max_index = 0.5 * (sum_a + sum_b);
    if (max_index == expected) return 1.0;
    return (sum_cell - expected) / (max_index - expected);
}

// Random simple graph on n nodes with edge probability p; at least one edge
// is guaranteed by redrawing.
inline socap::SocialGraph random_graph(std::size_t n, double p, socap::Rng& rng) {
    std::vector<std::pair<socap::NodeId, socap::SettlementId>> attr;
    for (std::size_t i = 0; i < n; ++i) attr.emplace_back("n" + std::to_string(i), "S");
    while (true) {
        std::vector<std::pair<socap::NodeId, socap::NodeId>> edges;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j)
                if (rng.next_double() < p) edges.emplace_back(attr[i].first, attr[j].first);
        if (!edges.empty()) return socap::SocialGraph::build(edges, attr);
    }
}

}  // namespace oracles

#endif
