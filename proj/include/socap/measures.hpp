// Per-settlement network measures (fragmentation F, diversity D, internal
// diversity) with one canonical seed-derivation scheme. The synthetic-data
// generator and the pipeline both go through this, so ground truth and
// pipeline output agree for the same seed.
#ifndef SOCAP_MEASURES_HPP
#define SOCAP_MEASURES_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "socap/community.hpp"
#include "socap/diversity.hpp"
#include "socap/graph.hpp"
#include "socap/parallel.hpp"
#include "socap/rng.hpp"

namespace socap {

struct MeasureRow {
    SettlementId settlement;
    ModularityReport frag;
    SettlementDiversity div;
    SettlementDiversity div_internal;
};

inline std::uint64_t fragmentation_seed(std::uint64_t seed, const SettlementId& s) {
    return derive_seed(seed, "fragmentation", fnv1a(s));
}

// Fragmentation is evaluated on the settlement-internal subgraph; diversity
// per-ego seeds are derived inside the diversity module from (seed, ego id).
inline std::vector<MeasureRow> compute_measures(const SocialGraph& g,
                                                const std::vector<SettlementId>& settlements,
                                                std::uint64_t seed,
                                                CrossingEdgeRule rule = CrossingEdgeRule::per_group,
                                                DiversityInclusion inclusion = DiversityInclusion::exclude_degenerate,
                                                unsigned threads = 0) {
    std::vector<MeasureRow> rows(settlements.size());
    parallel_for(settlements.size(), threads, [&](std::size_t i) {
        const SettlementId& s = settlements[i];
        MeasureRow& r = rows[i];
        r.settlement = s;
        const std::int32_t si = g.find_settlement(s);
        if (si < 0) {
            r.frag.undefined = true;
            return;
        }
        GraphWorkspace ws;
        const LocalSubgraph internal = g.internal_local(si, ws);
        r.frag = fragmentation(internal.view(), fragmentation_seed(seed, s), rule);
        r.div = settlement_diversity(g, s, seed, inclusion);
        r.div_internal = internal_diversity(g, s, seed, inclusion);
    });
    return rows;
}

}  // namespace socap

#endif
