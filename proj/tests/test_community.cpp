#include <catch_amalgamated.hpp>

#include "oracles.hpp"
#include "socap/community.hpp"
#include "socap/synth.hpp"

using namespace socap;
using Catch::Matchers::WithinAbs;

namespace {

SocialGraph disjoint_cliques(int k, int size) {
    std::vector<std::pair<NodeId, NodeId>> edges;
    std::vector<std::pair<NodeId, SettlementId>> attr;
    for (int c = 0; c < k; ++c)
        for (int i = 0; i < size; ++i) {
            attr.emplace_back("c" + std::to_string(c) + "_" + std::to_string(i), "S");
            for (int j = i + 1; j < size; ++j)
                edges.emplace_back("c" + std::to_string(c) + "_" + std::to_string(i),
                                   "c" + std::to_string(c) + "_" + std::to_string(j));
        }
    return SocialGraph::build(edges, attr);
}

SocialGraph complete_graph(int n) { return disjoint_cliques(1, n); }

Partition single_community(const SocialGraph& g) {
    Partition p;
    p.label.assign(g.node_count(), 1);
    p.K = 1;
    return p;
}

}  // namespace

TEST_CASE("louvain separates two disjoint 4-cliques") {
    const SocialGraph g = disjoint_cliques(2, 4);
    const Partition p = louvain(g, 3);
    CHECK(p.K == 2);
    // clique membership constant within each clique
    for (int c = 0; c < 2; ++c)
        for (int i = 1; i < 4; ++i)
            CHECK(p.label[static_cast<std::size_t>(c * 4 + i)] == p.label[static_cast<std::size_t>(c * 4)]);
    CHECK(p.label[0] != p.label[4]);
}

TEST_CASE("louvain keeps a complete graph together") {
    const Partition p = louvain(complete_graph(6), 11);
    CHECK(p.K == 1);
}

TEST_CASE("louvain recovers a well-separated planted partition exactly") {
    TownSpec spec{"T", 60, 3, 0.9, 0.02, 0.0, 12345};
    const TownDraw d = generate_town(spec);
    const SocialGraph g = town_graph(spec, d);
    const Partition p = louvain(g, 7);
    std::vector<std::int32_t> detected(g.node_count());
    std::vector<std::int32_t> planted(g.node_count());
    for (std::size_t v = 0; v < g.node_count(); ++v) {
        detected[v] = p.label[v];
        // node ids are T_u<i> in insertion order
        planted[v] = d.block[v];
    }
    CHECK(oracles::adjusted_rand_index(detected, planted) == 1.0);
}

TEST_CASE("louvain is deterministic for a fixed seed and empty graphs are rejected") {
    TownSpec spec{"T", 80, 4, 0.3, 0.03, 0.0, 5};
    const SocialGraph g = town_graph(spec, generate_town(spec));
    const Partition a = louvain(g, 42), b = louvain(g, 42);
    CHECK(a.label == b.label);
    CHECK_THROWS(louvain(SocialGraph::build({}, {}), 1));
}

TEST_CASE("louvain puts isolated nodes in singleton communities") {
    const SocialGraph g = SocialGraph::build({{"a", "b"}},
                                             {{"a", "S"}, {"b", "S"}, {"i1", "S"}, {"i2", "S"}});
    const Partition p = louvain(g, 8);
    CHECK(p.K == 3);  // {a,b} merged, i1 and i2 alone
    CHECK(p.label[2] != p.label[3]);
}

TEST_CASE("paper modularity on two disjoint 4-cliques with the clique partition") {
    const SocialGraph g = disjoint_cliques(2, 4);
    Partition p;
    p.label = {1, 1, 1, 1, 2, 2, 2, 2};
    p.K = 2;
    const auto counts = community_edge_counts(g.view(), p);
    CHECK(counts.L == 12);
    for (std::size_t k = 0; k < 2; ++k) {
        CHECK(counts.incident[k] == 6);
        CHECK(counts.within[k] == 6);
    }
    CHECK_THAT(modularity_paper(counts), WithinAbs(0.5, 1e-15));
    CHECK_THAT(q_max(counts), WithinAbs(0.5, 1e-15));
}

TEST_CASE("single-community partition gives Q = 0 and Q_max = 0 on any graph") {
    Rng rng(5150);
    for (int rep = 0; rep < 10; ++rep) {
        const SocialGraph g = oracles::random_graph(4 + rng.next_below(8), 0.4, rng);
        const Partition p = single_community(g);
        CHECK_THAT(modularity_paper(g, p), WithinAbs(0.0, 1e-15));
        CHECK_THAT(q_max(g, p), WithinAbs(0.0, 1e-15));
    }
}

TEST_CASE("paper modularity matches the edge-tally oracle on random partitions") {
    Rng rng(777);
    for (int rep = 0; rep < 20; ++rep) {
        const SocialGraph g = oracles::random_graph(20, 0.2, rng);
        Partition p;
        p.K = 3;
        p.label.resize(g.node_count());
        for (auto& l : p.label) l = static_cast<std::int32_t>(rng.next_below(3)) + 1;
        CHECK_THAT(modularity_paper(g, p),
                   WithinAbs(oracles::modularity_paper_edge_tally(g.view(), p), 1e-12));
        CHECK_THAT(q_max(g, p), WithinAbs(oracles::q_max_edge_tally(g.view(), p), 1e-12));
    }
}

TEST_CASE("q_max per-term check on triangle plus pendant edge") {
    // a-b-c triangle, pendant edge c-d; partition {a,b,c} {d}
    const SocialGraph g = SocialGraph::build({{"a", "b"}, {"b", "c"}, {"a", "c"}, {"c", "d"}},
                                             {{"a", "S"}, {"b", "S"}, {"c", "S"}, {"d", "S"}});
    Partition p;
    p.label = {1, 1, 1, 2};
    p.K = 2;
    const auto counts = community_edge_counts(g.view(), p);
    // the c-d edge is adjacent to both groups
    CHECK(counts.incident[0] == 4);
    CHECK(counts.within[0] == 3);
    CHECK(counts.incident[1] == 1);
    CHECK(counts.within[1] == 0);
    CHECK(counts.incident[0] + counts.incident[1] >= counts.L);
    // hand tally: Q = (3/4 - 1) + (0 - 1/16), Q_max = (1 - 1) + (1/4 - 1/16)
    CHECK_THAT(modularity_paper(counts), WithinAbs(-0.3125, 1e-15));
    CHECK_THAT(q_max(counts), WithinAbs(0.1875, 1e-15));
}

TEST_CASE("half-per-group crossing rule reduces paper Q to Newman-Girvan modularity") {
    Rng rng(31);
    for (int rep = 0; rep < 10; ++rep) {
        const SocialGraph g = oracles::random_graph(15, 0.25, rng);
        const Partition p = louvain(g, rep);
        CHECK_THAT(modularity_paper(g, p, CrossingEdgeRule::half_per_group),
                   WithinAbs(ng_modularity(g, p), 1e-12));
    }
}

TEST_CASE("modularity requires edges") {
    const SocialGraph g = SocialGraph::build({}, {{"a", "S"}, {"b", "S"}});
    Partition p;
    p.label = {1, 2};
    p.K = 2;
    CHECK_THROWS(modularity_paper(g, p));
    CHECK_THROWS(q_max(g, p));
    CHECK_THROWS(ng_modularity(g, p));
}

TEST_CASE("fragmentation extremes") {
    const ModularityReport cliques = fragmentation(disjoint_cliques(2, 4), 4);
    CHECK(cliques.F == 1.0);
    CHECK_FALSE(cliques.degenerate);

    const ModularityReport k6 = fragmentation(complete_graph(6), 4);
    CHECK(k6.K == 1);
    CHECK(k6.Q == 0.0);
    CHECK(k6.Q_max == 0.0);
    CHECK(k6.F == 0.0);
    CHECK(k6.degenerate);

    const SocialGraph edgeless = SocialGraph::build({}, {{"a", "S"}, {"b", "S"}});
    const ModularityReport undef = fragmentation(edgeless, 4);
    CHECK(undef.undefined);
    CHECK(std::isnan(undef.F));
}

TEST_CASE("ng modularity matches the definition oracle") {
    Rng rng(888);
    for (int rep = 0; rep < 15; ++rep) {
        const SocialGraph g = oracles::random_graph(12, 0.3, rng);
        const Partition p = louvain(g, rep);
        CHECK_THAT(ng_modularity(g, p), WithinAbs(oracles::ng_modularity_definition(g.view(), p), 1e-12));
    }
}

TEST_CASE("brute force on K4 ties at Q = 0 over all 15 partitions") {
    const auto r = brute_force_best_partition(complete_graph(4));
    CHECK(r.partitions_tried == 15);
    CHECK_THAT(r.q, WithinAbs(0.0, 1e-15));
}

TEST_CASE("brute force finds the two disjoint triangles") {
    const auto r = brute_force_best_partition(disjoint_cliques(2, 3));
    CHECK(r.partition.K == 2);
    CHECK_THAT(r.q, WithinAbs(0.5, 1e-15));
}

TEST_CASE("brute force agrees with an independent recursive enumeration") {
    Rng rng(4242);
    for (int rep = 0; rep < 8; ++rep) {
        const SocialGraph g = oracles::random_graph(4 + rng.next_below(3), 0.45, rng);
        const auto r = brute_force_best_partition(g);
        CHECK_THAT(r.q, WithinAbs(oracles::best_modularity_recursive(g.view()), 1e-12));
    }
    // 4-cycle specifically
    const SocialGraph c4 = SocialGraph::build({{"a", "b"}, {"b", "c"}, {"c", "d"}, {"d", "a"}},
                                              {{"a", "S"}, {"b", "S"}, {"c", "S"}, {"d", "S"}});
    CHECK_THAT(brute_force_best_partition(c4).q,
               WithinAbs(oracles::best_modularity_recursive(c4.view()), 1e-15));
}

TEST_CASE("brute force rejects oversized or edgeless graphs") {
    CHECK_THROWS(brute_force_best_partition(complete_graph(11)));
    CHECK_THROWS(brute_force_best_partition(SocialGraph::build({}, {{"a", "S"}})));
}

TEST_CASE("property: louvain modularity never beats the brute-force optimum") {
    Rng rng(60661);
    for (int rep = 0; rep < 30; ++rep) {
        const SocialGraph g = oracles::random_graph(4 + rng.next_below(4), 0.4, rng);
        const Partition p = louvain(g, rep);
        const auto best = brute_force_best_partition(g);
        CHECK(ng_modularity(g, p) <= best.q + 1e-12);
    }
}

TEST_CASE("property: Q <= Q_max, equality only without crossing edges") {
    Rng rng(1919);
    for (int rep = 0; rep < 20; ++rep) {
        const SocialGraph g = oracles::random_graph(12, 0.3, rng);
        Partition p;
        p.K = 1 + static_cast<std::int32_t>(rng.next_below(4));
        p.label.resize(g.node_count());
        std::int32_t maxl = 1;
        for (auto& l : p.label) {
            l = static_cast<std::int32_t>(rng.next_below(static_cast<std::uint64_t>(p.K))) + 1;
            maxl = std::max(maxl, l);
        }
        p.K = maxl;
        const auto counts = community_edge_counts(g.view(), p);
        const double q = modularity_paper(counts), qm = q_max(counts);
        CHECK(q <= qm + 1e-12);
        std::int64_t crossing = 0;
        for (std::size_t k = 0; k < counts.incident.size(); ++k) {
            CHECK(counts.within[k] <= counts.incident[k]);
            CHECK(counts.incident[k] <= counts.L);
            crossing += counts.incident[k] - counts.within[k];
        }
        if (crossing == 0)
            CHECK_THAT(q, WithinAbs(qm, 1e-12));
        else
            CHECK(q < qm);
    }
}

TEST_CASE("property: Q, Q_max, F invariant under node relabeling") {
    Rng rng(246);
    const SocialGraph g = oracles::random_graph(14, 0.3, rng);
    const Partition p = louvain(g, 5);
    const double q0 = modularity_paper(g, p), m0 = q_max(g, p);

    // permute node names, rebuild, map the partition through the permutation
    std::vector<std::size_t> perm(g.node_count());
    std::iota(perm.begin(), perm.end(), 0);
    rng.shuffle(perm);
    std::vector<std::pair<NodeId, SettlementId>> attr(g.node_count());
    for (std::size_t v = 0; v < g.node_count(); ++v)
        attr[perm[v]] = {"m" + std::to_string(perm[v]), "S"};
    std::vector<std::pair<NodeId, NodeId>> edges;
    for (std::size_t v = 0; v < g.node_count(); ++v)
        for (std::int32_t u : g.neighbors(static_cast<std::int32_t>(v)))
            if (static_cast<std::size_t>(u) > v)
                edges.emplace_back("m" + std::to_string(perm[v]),
                                   "m" + std::to_string(perm[static_cast<std::size_t>(u)]));
    const SocialGraph h = SocialGraph::build(edges, attr);
    Partition q;
    q.K = p.K;
    q.label.resize(h.node_count());
    for (std::size_t v = 0; v < g.node_count(); ++v)
        q.label[static_cast<std::size_t>(h.require_node("m" + std::to_string(perm[v])))] = p.label[v];
    CHECK_THAT(modularity_paper(h, q), WithinAbs(q0, 1e-12));
    CHECK_THAT(q_max(h, q), WithinAbs(m0, 1e-12));
}
