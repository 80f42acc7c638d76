// Ego-network diversity: standard modularity of the Louvain partition of a
// user's alters-without-ego subgraph, aggregated to a settlement mean.
#ifndef SOCAP_DIVERSITY_HPP
#define SOCAP_DIVERSITY_HPP

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "socap/community.hpp"
#include "socap/graph.hpp"
#include "socap/rng.hpp"

namespace socap {

struct EgoDiversity {
    NodeId ego;
    double q_ego = 0.0;
    std::size_t n_alters = 0;
    std::int64_t n_alter_edges = 0;
    std::int32_t k_ego = 0;
    // false when degree = 0 or the alters subgraph has no edges; such egos
    // carry q_ego = 0 and are excluded from the settlement mean by default
    bool included = false;
};

struct SettlementDiversity {
    SettlementId settlement;
    double d = std::numeric_limits<double>::quiet_NaN();
    std::int64_t n_included = 0;
    std::int64_t n_excluded = 0;
    bool defined = false;
};

// exclude_degenerate: mean over users whose alters subgraph has at least one
// edge (exclusions reported). strict_all: the paper's literal denominator,
// every settlement member counts and degenerate egos contribute 0.
enum class DiversityInclusion { exclude_degenerate, strict_all };

namespace detail {

inline EgoDiversity ego_diversity_impl(const SocialGraph& g, std::int32_t ego, std::uint64_t seed,
                                       GraphWorkspace& ws, bool internal_only) {
    EgoDiversity r;
    r.ego = g.node_id(ego);
    if (g.degree(ego) == 0) return r;
    const LocalSubgraph sub = g.ego_alters_local(ego, ws, internal_only);
    r.n_alters = sub.node_count();
    r.n_alter_edges = static_cast<std::int64_t>(sub.edge_count());
    if (r.n_alters == 0 || r.n_alter_edges == 0) {
        r.k_ego = static_cast<std::int32_t>(r.n_alters);
        return r;
    }
    const GraphView v = sub.view();
    const Partition p = louvain(v, derive_seed(seed, "ego", fnv1a(r.ego)));
    r.k_ego = p.K;
    r.q_ego = ng_modularity(v, p);
    r.included = true;
    return r;
}

inline SettlementDiversity settlement_diversity_impl(const SocialGraph& g, const SettlementId& s,
                                                     std::uint64_t seed, DiversityInclusion inclusion,
                                                     bool internal_only) {
    SettlementDiversity out;
    out.settlement = s;
    const std::int32_t si = g.find_settlement(s);
    if (si < 0) return out;
    const auto& mem = g.members(si);
    GraphWorkspace ws;
    double sum = 0.0;
    for (std::int32_t v : mem) {
        const EgoDiversity e = ego_diversity_impl(g, v, seed, ws, internal_only);
        if (e.included) {
            sum += e.q_ego;
            ++out.n_included;
        } else {
            ++out.n_excluded;
        }
    }
    if (inclusion == DiversityInclusion::strict_all) {
        // degenerate egos enter as 0; denominator is |S|
        out.n_included += out.n_excluded;
        out.n_excluded = 0;
    }
    if (out.n_included > 0) {
        out.d = sum / static_cast<double>(out.n_included);
        out.defined = true;
    }
    return out;
}

}  // namespace detail

// Q_ego for one user: alters-without-ego subgraph (alters from every
// settlement), Louvain, Newman-Girvan modularity. The per-ego Louvain seed is
// derived from (seed, ego id), so results do not depend on evaluation order.
inline EgoDiversity ego_diversity(const SocialGraph& g, const NodeId& ego, std::uint64_t seed) {
    GraphWorkspace ws;
    return detail::ego_diversity_impl(g, g.require_node(ego), seed, ws, false);
}

// D_S: mean Q_ego over the settlement's users under the inclusion rule.
inline SettlementDiversity settlement_diversity(const SocialGraph& g, const SettlementId& s,
                                                std::uint64_t seed,
                                                DiversityInclusion inclusion = DiversityInclusion::exclude_degenerate) {
    return detail::settlement_diversity_impl(g, s, seed, inclusion, false);
}

// SI variant: alters restricted to the ego's own settlement before detection.
inline SettlementDiversity internal_diversity(const SocialGraph& g, const SettlementId& s,
                                              std::uint64_t seed,
                                              DiversityInclusion inclusion = DiversityInclusion::exclude_degenerate) {
    return detail::settlement_diversity_impl(g, s, seed, inclusion, true);
}

}  // namespace socap

#endif
