// Community detection and modularity measures. Detection runs standard
// degree-based (Newman-Girvan) modularity maximization via Louvain; the
// reported Q, Q_max and fragmentation F use the edge-incidence formulation
// evaluated on the detected partition.
#ifndef SOCAP_COMMUNITY_HPP
#define SOCAP_COMMUNITY_HPP

#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <utility>
#include <vector>

#include "socap/graph.hpp"
#include "socap/rng.hpp"

namespace socap {

// Community labels per node, contiguous 1..K.
struct Partition {
    std::vector<std::int32_t> label;
    std::int32_t K = 0;
};

// How a cross-community edge contributes to L_k, the count of edges adjacent
// to members of group k:
//   per_group      - the edge increments L_k of both endpoint groups, so
//                    sum_k L_k >= L (literal reading; default)
//   half_per_group - each endpoint group gets 1/2, so sum_k L_k = L and
//                    L_k = d_k/2; under this rule Q reduces to standard
//                    Newman-Girvan modularity (sensitivity switch)
enum class CrossingEdgeRule { per_group, half_per_group };

struct CommunityEdgeCounts {
    std::vector<std::int64_t> incident;  // edges with >=1 endpoint in k (crossing counted per group)
    std::vector<std::int64_t> within;    // edges with both endpoints in k
    std::int64_t L = 0;
    std::int32_t K = 0;
};

struct ModularityReport {
    double Q = 0.0;
    double Q_max = 0.0;
    double F = 0.0;
    std::int32_t K = 0;
    std::int64_t L = 0;
    std::size_t n_nodes = 0;
    std::vector<std::pair<std::int64_t, std::int64_t>> per_community;  // (L_k, L_k^w)
    bool degenerate = false;  // Q_max == 0, F forced to 0
    bool undefined = false;   // L == 0, F has no value
};

namespace detail {

// Weighted multigraph used across Louvain aggregation levels. self_w follows
// the convention that a community's internal mass enters its strength once
// already doubled (2x the undirected internal weight).
struct LevelGraph {
    std::size_t n = 0;
    std::vector<std::size_t> off;
    std::vector<std::int32_t> adj;
    std::vector<double> w;
    std::vector<double> self_w;
    std::vector<double> strength;
    double two_m = 0.0;
};

inline LevelGraph level_from_view(const GraphView& g) {
    LevelGraph lg;
    lg.n = g.n;
    lg.off.assign(g.off, g.off + g.n + 1);
    lg.adj.assign(g.adj, g.adj + lg.off[g.n]);
    lg.w.assign(lg.adj.size(), 1.0);
    lg.self_w.assign(g.n, 0.0);
    lg.strength.resize(g.n);
    for (std::size_t v = 0; v < g.n; ++v) lg.strength[v] = static_cast<double>(g.degree(v));
    lg.two_m = 2.0 * static_cast<double>(g.m);
    return lg;
}

// One level of seeded local moving. comm is in/out; returns true if any node moved.
inline bool local_moving(const LevelGraph& lg, std::vector<std::int32_t>& comm, Rng& rng) {
    const std::size_t n = lg.n;
    std::vector<double> tot(n, 0.0);
    for (std::size_t v = 0; v < n; ++v) tot[static_cast<std::size_t>(comm[v])] += lg.strength[v];

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    rng.shuffle(order);

    std::vector<double> wsum(n, 0.0);
    std::vector<std::int32_t> touched;
    bool any_move = false;
    bool moved_this_sweep = true;
    int sweeps = 0;
    while (moved_this_sweep && sweeps < 1000) {
        moved_this_sweep = false;
        ++sweeps;
        for (std::size_t v : order) {
            const std::int32_t c_old = comm[v];
            touched.clear();
            for (std::size_t e = lg.off[v]; e < lg.off[v + 1]; ++e) {
                const std::int32_t u = lg.adj[e];
                if (static_cast<std::size_t>(u) == v) continue;
                const std::int32_t cu = comm[static_cast<std::size_t>(u)];
                if (wsum[static_cast<std::size_t>(cu)] == 0.0) touched.push_back(cu);
                wsum[static_cast<std::size_t>(cu)] += lg.w[e];
            }
            tot[static_cast<std::size_t>(c_old)] -= lg.strength[v];
            const double kv = lg.strength[v];
            std::int32_t best_c = c_old;
            double best_gain = wsum[static_cast<std::size_t>(c_old)] - tot[static_cast<std::size_t>(c_old)] * kv / lg.two_m;
            for (std::int32_t c : touched) {
                const double gain = wsum[static_cast<std::size_t>(c)] - tot[static_cast<std::size_t>(c)] * kv / lg.two_m;
                if (gain > best_gain || (gain == best_gain && c < best_c)) {
                    best_gain = gain;
                    best_c = c;
                }
            }
            tot[static_cast<std::size_t>(best_c)] += lg.strength[v];
            for (std::int32_t c : touched) wsum[static_cast<std::size_t>(c)] = 0.0;
            wsum[static_cast<std::size_t>(c_old)] = 0.0;
            if (best_c != c_old) {
                comm[v] = best_c;
                moved_this_sweep = true;
                any_move = true;
            }
        }
    }
    return any_move;
}

// Compacts community ids in order of first appearance over node index and
// builds the aggregated weighted graph.
inline LevelGraph aggregate(const LevelGraph& lg, std::vector<std::int32_t>& comm, std::size_t& n_comms) {
    const std::size_t n = lg.n;
    std::vector<std::int32_t> remap(n, -1);
    std::int32_t next = 0;
    for (std::size_t v = 0; v < n; ++v) {
        auto& r = remap[static_cast<std::size_t>(comm[v])];
        if (r < 0) r = next++;
        comm[v] = r;
    }
    n_comms = static_cast<std::size_t>(next);

    LevelGraph out;
    out.n = n_comms;
    out.self_w.assign(n_comms, 0.0);
    out.strength.assign(n_comms, 0.0);
    out.two_m = lg.two_m;

    std::vector<std::vector<std::pair<std::int32_t, double>>> nb(n_comms);
    std::vector<double> acc(n_comms, 0.0);
    std::vector<std::int32_t> touched;
    std::vector<std::vector<std::size_t>> members(n_comms);
    for (std::size_t v = 0; v < n; ++v) members[static_cast<std::size_t>(comm[v])].push_back(v);
    for (std::size_t c = 0; c < n_comms; ++c) {
        touched.clear();
        double self_mass = 0.0;
        for (std::size_t v : members[c]) {
            self_mass += lg.self_w[v];
            for (std::size_t e = lg.off[v]; e < lg.off[v + 1]; ++e) {
                const std::int32_t u = lg.adj[e];
                const std::int32_t cu = comm[static_cast<std::size_t>(u)];
                if (static_cast<std::size_t>(cu) == c) {
                    self_mass += lg.w[e];  // internal edges show up twice across directed scans
                } else {
                    if (acc[static_cast<std::size_t>(cu)] == 0.0) touched.push_back(cu);
                    acc[static_cast<std::size_t>(cu)] += lg.w[e];
                }
            }
        }
        std::sort(touched.begin(), touched.end());
        out.self_w[c] = self_mass;
        double str = self_mass;
        for (std::int32_t cu : touched) {
            nb[c].emplace_back(cu, acc[static_cast<std::size_t>(cu)]);
            str += acc[static_cast<std::size_t>(cu)];
            acc[static_cast<std::size_t>(cu)] = 0.0;
        }
        out.strength[c] = str;
    }
    out.off.assign(n_comms + 1, 0);
    for (std::size_t c = 0; c < n_comms; ++c) out.off[c + 1] = out.off[c] + nb[c].size();
    out.adj.resize(out.off[n_comms]);
    out.w.resize(out.off[n_comms]);
    for (std::size_t c = 0; c < n_comms; ++c) {
        std::size_t at = out.off[c];
        for (const auto& [u, wt] : nb[c]) {
            out.adj[at] = u;
            out.w[at] = wt;
            ++at;
        }
    }
    return out;
}

}  // namespace detail

// Seeded Louvain over standard degree-based modularity (resolution 1). The
// node-visit order is shuffled from the seed once per level; gain ties break
// toward the lowest community label. Isolated nodes stay singletons.
inline Partition louvain(const GraphView& g, std::uint64_t seed) {
    if (g.n == 0) throw std::invalid_argument("louvain: empty graph");
    Partition p;
    p.label.assign(g.n, 0);
    if (g.m == 0) {
        for (std::size_t v = 0; v < g.n; ++v) p.label[v] = static_cast<std::int32_t>(v) + 1;
        p.K = static_cast<std::int32_t>(g.n);
        return p;
    }

    std::vector<std::int32_t> assign(g.n);
    std::iota(assign.begin(), assign.end(), 0);

    detail::LevelGraph lg = detail::level_from_view(g);
    int level = 0;
    while (true) {
        Rng rng = derive_rng(seed, "louvain-level", static_cast<std::uint64_t>(level));
        std::vector<std::int32_t> comm(lg.n);
        std::iota(comm.begin(), comm.end(), 0);
        const bool moved = detail::local_moving(lg, comm, rng);
        std::size_t n_comms = 0;
        detail::LevelGraph next = detail::aggregate(lg, comm, n_comms);
        for (auto& a : assign) a = comm[static_cast<std::size_t>(a)];
        if (!moved || n_comms == lg.n) break;
        lg = std::move(next);
        ++level;
    }

    // contiguous labels 1..K by first appearance
    std::vector<std::int32_t> remap(g.n, 0);
    std::int32_t K = 0;
    for (std::size_t v = 0; v < g.n; ++v) {
        auto& r = remap[static_cast<std::size_t>(assign[v])];
        if (r == 0) r = ++K;
        p.label[v] = r;
    }
    p.K = K;
    return p;
}

inline Partition louvain(const SocialGraph& g, std::uint64_t seed) { return louvain(g.view(), seed); }

inline void check_partition(const GraphView& g, const Partition& p) {
    if (p.label.size() != g.n) throw std::invalid_argument("partition does not cover the graph");
    for (std::int32_t l : p.label)
        if (l < 1 || l > p.K) throw std::invalid_argument("partition labels must be contiguous 1..K");
}

inline CommunityEdgeCounts community_edge_counts(const GraphView& g, const Partition& p) {
    check_partition(g, p);
    if (g.m == 0) throw std::invalid_argument("modularity undefined: graph has no edges");
    CommunityEdgeCounts c;
    c.K = p.K;
    c.L = static_cast<std::int64_t>(g.m);
    c.incident.assign(static_cast<std::size_t>(p.K), 0);
    c.within.assign(static_cast<std::size_t>(p.K), 0);
    for (std::size_t v = 0; v < g.n; ++v) {
        for (std::int32_t u : g.neighbors(v)) {
            if (static_cast<std::size_t>(u) <= v) continue;  // each undirected edge once
            const std::size_t cv = static_cast<std::size_t>(p.label[v] - 1);
            const std::size_t cu = static_cast<std::size_t>(p.label[static_cast<std::size_t>(u)] - 1);
            if (cv == cu) {
                ++c.within[cv];
                ++c.incident[cv];
            } else {
                ++c.incident[cv];
                ++c.incident[cu];
            }
        }
    }
    return c;
}

inline double lk_value(const CommunityEdgeCounts& c, std::size_t k, CrossingEdgeRule rule) {
    const std::int64_t boundary = c.incident[k] - c.within[k];
    return rule == CrossingEdgeRule::per_group
               ? static_cast<double>(c.incident[k])
               : static_cast<double>(c.within[k]) + 0.5 * static_cast<double>(boundary);
}

// Q = sum_k [ L_k^w/L - (L_k/L)^2 ]
inline double modularity_paper(const CommunityEdgeCounts& c,
                               CrossingEdgeRule rule = CrossingEdgeRule::per_group) {
    const double L = static_cast<double>(c.L);
    double q = 0.0;
    for (std::size_t k = 0; k < c.incident.size(); ++k) {
        const double x = lk_value(c, k, rule) / L;
        q += static_cast<double>(c.within[k]) / L - x * x;
    }
    return q;
}

inline double modularity_paper(const GraphView& g, const Partition& p,
                               CrossingEdgeRule rule = CrossingEdgeRule::per_group) {
    return modularity_paper(community_edge_counts(g, p), rule);
}

inline double modularity_paper(const SocialGraph& g, const Partition& p,
                               CrossingEdgeRule rule = CrossingEdgeRule::per_group) {
    return modularity_paper(g.view(), p, rule);
}

// Q_max = sum_k [ L_k/L - (L_k/L)^2 ], the value Q would take if every edge
// adjacent to group k were within it.
inline double q_max(const CommunityEdgeCounts& c, CrossingEdgeRule rule = CrossingEdgeRule::per_group) {
    const double L = static_cast<double>(c.L);
    double q = 0.0;
    for (std::size_t k = 0; k < c.incident.size(); ++k) {
        const double x = lk_value(c, k, rule) / L;
        q += x - x * x;
    }
    return q;
}

inline double q_max(const GraphView& g, const Partition& p,
                    CrossingEdgeRule rule = CrossingEdgeRule::per_group) {
    return q_max(community_edge_counts(g, p), rule);
}

inline double q_max(const SocialGraph& g, const Partition& p,
                    CrossingEdgeRule rule = CrossingEdgeRule::per_group) {
    return q_max(g.view(), p, rule);
}

// Standard Newman-Girvan modularity: sum_k [ L_k^w/L - (d_k/2L)^2 ].
inline double ng_modularity(const GraphView& g, const Partition& p) {
    check_partition(g, p);
    if (g.m == 0) throw std::invalid_argument("modularity undefined: graph has no edges");
    std::vector<std::int64_t> within(static_cast<std::size_t>(p.K), 0);
    std::vector<std::int64_t> degsum(static_cast<std::size_t>(p.K), 0);
    for (std::size_t v = 0; v < g.n; ++v) {
        degsum[static_cast<std::size_t>(p.label[v] - 1)] += static_cast<std::int64_t>(g.degree(v));
        for (std::int32_t u : g.neighbors(v))
            if (static_cast<std::size_t>(u) > v && p.label[v] == p.label[static_cast<std::size_t>(u)])
                ++within[static_cast<std::size_t>(p.label[v] - 1)];
    }
    const double L = static_cast<double>(g.m);
    double q = 0.0;
    for (std::size_t k = 0; k < within.size(); ++k) {
        const double dk = static_cast<double>(degsum[k]) / (2.0 * L);
        q += static_cast<double>(within[k]) / L - dk * dk;
    }
    return q;
}

inline double ng_modularity(const SocialGraph& g, const Partition& p) { return ng_modularity(g.view(), p); }

// Fragmentation of a settlement-internal graph: Louvain partition, then
// F = Q/Q_max with F = 0 when Q_max = 0 (single effective community).
// L = 0 yields an undefined report instead of a value.
inline ModularityReport fragmentation(const GraphView& g, std::uint64_t seed,
                                      CrossingEdgeRule rule = CrossingEdgeRule::per_group) {
    ModularityReport r;
    r.n_nodes = g.n;
    r.L = static_cast<std::int64_t>(g.m);
    if (g.m == 0) {
        r.undefined = true;
        r.Q = r.Q_max = r.F = std::numeric_limits<double>::quiet_NaN();
        r.K = static_cast<std::int32_t>(g.n);
        return r;
    }
    const Partition p = louvain(g, seed);
    const CommunityEdgeCounts counts = community_edge_counts(g, p);
    r.K = p.K;
    r.Q = modularity_paper(counts, rule);
    r.Q_max = q_max(counts, rule);
    r.per_community.reserve(counts.incident.size());
    for (std::size_t k = 0; k < counts.incident.size(); ++k)
        r.per_community.emplace_back(counts.incident[k], counts.within[k]);
    if (r.Q_max == 0.0) {
        r.degenerate = true;
        r.F = 0.0;
    } else {
        r.F = r.Q / r.Q_max;
    }
    return r;
}

inline ModularityReport fragmentation(const SocialGraph& g_internal, std::uint64_t seed,
                                      CrossingEdgeRule rule = CrossingEdgeRule::per_group) {
    return fragmentation(g_internal.view(), seed, rule);
}

struct BruteForceResult {
    Partition partition;
    double q = 0.0;
    std::uint64_t partitions_tried = 0;
};

// Exact maximizer of Newman-Girvan modularity over all set partitions,
// enumerated as restricted growth strings. Test oracle; Bell(10) = 115975.
inline BruteForceResult brute_force_best_partition(const GraphView& g, std::size_t max_nodes = 10) {
    if (g.n > max_nodes) throw std::invalid_argument("brute_force_best_partition: graph too large");
    if (g.n == 0) throw std::invalid_argument("brute_force_best_partition: empty graph");
    if (g.m == 0) throw std::invalid_argument("brute_force_best_partition: modularity undefined without edges");

    std::vector<std::pair<std::int32_t, std::int32_t>> edges;
    edges.reserve(g.m);
    std::vector<std::int64_t> deg(g.n);
    for (std::size_t v = 0; v < g.n; ++v) {
        deg[v] = static_cast<std::int64_t>(g.degree(v));
        for (std::int32_t u : g.neighbors(v))
            if (static_cast<std::size_t>(u) > v) edges.emplace_back(static_cast<std::int32_t>(v), u);
    }
    const double L = static_cast<double>(g.m);

    const std::size_t n = g.n;
    std::vector<std::int32_t> a(n, 0), b(n, 1);  // RGS; b[j] = 1 + max(a[0..j-1])
    std::vector<double> within(n), degsum(n);
    BruteForceResult best;
    best.q = -std::numeric_limits<double>::infinity();

    auto evaluate = [&]() {
        const std::int32_t K = *std::max_element(a.begin(), a.end()) + 1;
        std::fill(within.begin(), within.begin() + K, 0.0);
        std::fill(degsum.begin(), degsum.begin() + K, 0.0);
        for (std::size_t v = 0; v < n; ++v) degsum[static_cast<std::size_t>(a[v])] += static_cast<double>(deg[v]);
        for (const auto& [u, v] : edges)
            if (a[static_cast<std::size_t>(u)] == a[static_cast<std::size_t>(v)])
                within[static_cast<std::size_t>(a[static_cast<std::size_t>(u)])] += 1.0;
        double q = 0.0;
        for (std::int32_t k = 0; k < K; ++k) {
            const double dk = degsum[static_cast<std::size_t>(k)] / (2.0 * L);
            q += within[static_cast<std::size_t>(k)] / L - dk * dk;
        }
        ++best.partitions_tried;
        if (q > best.q) {
            best.q = q;
            best.partition.label.assign(a.begin(), a.end());
            best.partition.K = K;
        }
    };

    // Knuth 7.2.1.5 Algorithm H over restricted growth strings
    evaluate();
    while (n > 1) {
        if (a[n - 1] != b[n - 1]) {
            ++a[n - 1];
            evaluate();
            continue;
        }
        std::size_t j = n - 2;
        while (j > 0 && a[j] == b[j]) --j;
        if (j == 0) break;
        ++a[j];
        const std::int32_t m = b[j] + (a[j] == b[j] ? 1 : 0);
        for (std::size_t k = j + 1; k < n; ++k) {
            a[k] = 0;
            b[k] = m;
        }
        evaluate();
    }
    for (auto& l : best.partition.label) ++l;  // 1..K
    return best;
}

inline BruteForceResult brute_force_best_partition(const SocialGraph& g, std::size_t max_nodes = 10) {
    return brute_force_best_partition(g.view(), max_nodes);
}

}  // namespace socap

#endif
