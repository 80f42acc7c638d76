#include <catch_amalgamated.hpp>

#include "oracles.hpp"
#include "socap/graph.hpp"
#include "socap/synth.hpp"

using namespace socap;

namespace {

SocialGraph two_towns_with_bridge() {
    // town A: triangle a0,a1,a2; town B: triangle b0,b1,b2; bridge a0-b0
    std::vector<std::pair<NodeId, NodeId>> edges = {{"a0", "a1"}, {"a1", "a2"}, {"a0", "a2"},
                                                    {"b0", "b1"}, {"b1", "b2"}, {"b0", "b2"},
                                                    {"a0", "b0"}};
    std::vector<std::pair<NodeId, SettlementId>> attr = {{"a0", "A"}, {"a1", "A"}, {"a2", "A"},
                                                         {"b0", "B"}, {"b1", "B"}, {"b2", "B"}};
    return SocialGraph::build(edges, attr);
}

}  // namespace

TEST_CASE("build drops duplicate edges and self-loops") {
    const SocialGraph g = SocialGraph::build({{"a", "b"}, {"b", "a"}, {"a", "a"}},
                                             {{"a", "S1"}, {"b", "S1"}});
    CHECK(g.node_count() == 2);
    CHECK(g.edge_count() == 1);
    CHECK(g.degree_of("a") == 1);
}

TEST_CASE("empty inputs give an empty graph") {
    const SocialGraph g = SocialGraph::build({}, {});
    CHECK(g.node_count() == 0);
    CHECK(g.edge_count() == 0);
}

TEST_CASE("edge node missing from attribution is a fatal error naming the node") {
    CHECK_THROWS_WITH(SocialGraph::build({{"a", "b"}}, {{"a", "S1"}}),
                      Catch::Matchers::ContainsSubstring("'b'"));
}

TEST_CASE("conflicting settlement attribution is rejected") {
    CHECK_THROWS_WITH(SocialGraph::build({}, {{"a", "S1"}, {"a", "S2"}}),
                      Catch::Matchers::ContainsSubstring("conflicting"));
}

TEST_CASE("attributed nodes without edges are isolated graph nodes") {
    const SocialGraph g = SocialGraph::build({{"a", "b"}}, {{"a", "S1"}, {"b", "S1"}, {"c", "S2"}});
    CHECK(g.node_count() == 3);
    CHECK(g.degree_of("c") == 0);
}

TEST_CASE("internal subgraph removes cross-settlement edges") {
    const SocialGraph g = two_towns_with_bridge();
    const SocialGraph a = g.internal_subgraph("A");
    CHECK(a.node_count() == 3);
    CHECK(a.edge_count() == 3);  // the bridge is gone
    for (std::int32_t v = 0; v < 3; ++v) CHECK(a.settlement_of(v) == "A");
}

TEST_CASE("internal subgraph of the only settlement is the whole graph") {
    const SocialGraph g = SocialGraph::build({{"a", "b"}, {"b", "c"}},
                                             {{"a", "S"}, {"b", "S"}, {"c", "S"}});
    const SocialGraph s = g.internal_subgraph("S");
    CHECK(s.node_count() == g.node_count());
    CHECK(s.edge_count() == g.edge_count());
}

TEST_CASE("internal subgraph of an unknown settlement is empty, not an error") {
    const SocialGraph g = two_towns_with_bridge();
    const SocialGraph u = g.internal_subgraph("nowhere");
    CHECK(u.node_count() == 0);
    CHECK(u.edge_count() == 0);
}

TEST_CASE("internal edge count matches the generator's intra-town draw") {
    // two SBM towns joined by explicit bridges; the internal subgraph must
    // recover exactly the edges the generator drew for each town
    TownSpec ta{"A", 40, 3, 0.5, 0.1, 0.0, 7};
    TownSpec tb{"B", 30, 2, 0.4, 0.05, 0.0, 9};
    const TownDraw da = generate_town(ta), db = generate_town(tb);
    std::vector<std::pair<NodeId, SettlementId>> attr;
    for (int i = 0; i < ta.n_users; ++i) attr.emplace_back("A_u" + std::to_string(i), "A");
    for (int i = 0; i < tb.n_users; ++i) attr.emplace_back("B_u" + std::to_string(i), "B");
    std::vector<std::pair<NodeId, NodeId>> edges;
    for (auto [x, y] : da.edges) edges.emplace_back("A_u" + std::to_string(x), "A_u" + std::to_string(y));
    for (auto [x, y] : db.edges) edges.emplace_back("B_u" + std::to_string(x), "B_u" + std::to_string(y));
    edges.emplace_back("A_u0", "B_u0");
    edges.emplace_back("A_u1", "B_u5");
    const SocialGraph g = SocialGraph::build(edges, attr);
    CHECK(g.internal_subgraph("A").edge_count() == da.edges.size());
    CHECK(g.internal_subgraph("B").edge_count() == db.edges.size());
    CHECK(g.edge_count() == da.edges.size() + db.edges.size() + 2);
}

TEST_CASE("ego alters subgraph: star center has edgeless alters") {
    std::vector<std::pair<NodeId, NodeId>> edges;
    std::vector<std::pair<NodeId, SettlementId>> attr = {{"hub", "S"}};
    for (int i = 0; i < 5; ++i) {
        attr.emplace_back("s" + std::to_string(i), "S");
        edges.emplace_back("hub", "s" + std::to_string(i));
    }
    const SocialGraph g = SocialGraph::build(edges, attr);
    const SocialGraph alters = g.ego_alters_subgraph("hub");
    CHECK(alters.node_count() == 5);
    CHECK(alters.edge_count() == 0);
}

TEST_CASE("ego alters subgraph: triangle gives 2 alters and 1 edge") {
    const SocialGraph g = SocialGraph::build({{"a", "b"}, {"b", "c"}, {"a", "c"}},
                                             {{"a", "S"}, {"b", "S"}, {"c", "S"}});
    const SocialGraph alters = g.ego_alters_subgraph("a");
    CHECK(alters.node_count() == 2);
    CHECK(alters.edge_count() == 1);
}

TEST_CASE("ego alters subgraph keeps alters from every settlement") {
    std::vector<std::pair<NodeId, NodeId>> edges = {{"e", "x1"}, {"e", "y1"}, {"e", "z1"},
                                                    {"x1", "y1"}};
    std::vector<std::pair<NodeId, SettlementId>> attr = {
        {"e", "S"}, {"x1", "X"}, {"y1", "Y"}, {"z1", "Z"}};
    const SocialGraph g = SocialGraph::build(edges, attr);
    const SocialGraph alters = g.ego_alters_subgraph("e");
    CHECK(alters.node_count() == 3);
    CHECK(alters.edge_count() == 1);  // x1-y1 retained across towns
    CHECK_THROWS(g.ego_alters_subgraph("missing"));
}

TEST_CASE("degree, edge_count, settlement_members basics") {
    const SocialGraph tri = SocialGraph::build({{"a", "b"}, {"b", "c"}, {"a", "c"}},
                                               {{"a", "S"}, {"b", "S"}, {"c", "S"}});
    CHECK(tri.degree_of("a") == 2);
    CHECK(tri.degree_of("b") == 2);
    CHECK(tri.degree_of("c") == 2);
    CHECK_THROWS(tri.degree_of("zz"));

    std::vector<std::pair<NodeId, NodeId>> k5_edges;
    std::vector<std::pair<NodeId, SettlementId>> k5_attr;
    for (int i = 0; i < 5; ++i) k5_attr.emplace_back("k" + std::to_string(i), "K");
    for (int i = 0; i < 5; ++i)
        for (int j = i + 1; j < 5; ++j)
            k5_edges.emplace_back("k" + std::to_string(i), "k" + std::to_string(j));
    CHECK(SocialGraph::build(k5_edges, k5_attr).edge_count() == 10);

    CHECK(tri.settlement_members("S").size() == 3);
    CHECK(tri.settlement_members("empty").empty());
}

TEST_CASE("property: degree sum equals twice the edge count") {
    Rng rng(2024);
    for (int rep = 0; rep < 25; ++rep) {
        const SocialGraph g = oracles::random_graph(3 + rng.next_below(12), 0.3, rng);
        std::size_t degsum = 0;
        for (std::size_t v = 0; v < g.node_count(); ++v) degsum += g.degree(static_cast<std::int32_t>(v));
        CHECK(degsum == 2 * g.edge_count());
    }
}

TEST_CASE("property: internal subgraphs plus cross edges reconstruct the edge set") {
    const SocialGraph g = two_towns_with_bridge();
    std::size_t internal_total = 0;
    for (const auto& s : g.settlement_ids()) internal_total += g.internal_subgraph(s).edge_count();
    std::size_t cross = 0;
    for (std::size_t v = 0; v < g.node_count(); ++v)
        for (std::int32_t u : g.neighbors(static_cast<std::int32_t>(v)))
            if (static_cast<std::size_t>(u) > v &&
                g.settlement_index(static_cast<std::int32_t>(v)) != g.settlement_index(u))
                ++cross;
    CHECK(internal_total + cross == g.edge_count());
}

TEST_CASE("property: alters subgraph node count equals ego degree") {
    Rng rng(99);
    const SocialGraph g = oracles::random_graph(14, 0.25, rng);
    GraphWorkspace ws;
    for (std::size_t v = 0; v < g.node_count(); ++v) {
        const auto sub = g.ego_alters_local(static_cast<std::int32_t>(v), ws);
        CHECK(sub.node_count() == g.degree(static_cast<std::int32_t>(v)));
    }
}
