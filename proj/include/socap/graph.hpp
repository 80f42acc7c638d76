// Social-network representation: undirected simple graph with one settlement
// attribution per node. Node/settlement ids are interned to dense indices;
// the graph is immutable after build and safe to share across threads.
#ifndef SOCAP_GRAPH_HPP
#define SOCAP_GRAPH_HPP

#include <algorithm>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace socap {

using NodeId = std::string;
using SettlementId = std::string;

// Plain CSR view consumed by the community-detection core. Valid only while
// the owning graph is alive.
struct GraphView {
    std::size_t n = 0;
    const std::size_t* off = nullptr;
    const std::int32_t* adj = nullptr;
    std::size_t m = 0;  // undirected edge count

    std::span<const std::int32_t> neighbors(std::size_t v) const {
        return {adj + off[v], adj + off[v + 1]};
    }
    std::size_t degree(std::size_t v) const { return off[v + 1] - off[v]; }
};

// Reusable per-thread buffer for subgraph extraction; keeps SocialGraph
// itself free of mutable state so concurrent reads stay safe.
struct GraphWorkspace {
    std::vector<std::int32_t> local_index;  // parent index -> local index, -1 elsewhere
};

// Induced subgraph in compact 0..n-1 indexing, keeping the map back to the
// parent graph's node indices. Hot path for per-ego work.
struct LocalSubgraph {
    std::vector<std::size_t> off;
    std::vector<std::int32_t> adj;
    std::vector<std::int32_t> parent;  // local index -> parent node index

    std::size_t node_count() const { return parent.size(); }
    std::size_t edge_count() const { return adj.size() / 2; }
    GraphView view() const { return {parent.size(), off.data(), adj.data(), adj.size() / 2}; }
};

class SocialGraph {
public:
    SocialGraph() = default;

    // Attribution must cover every node in the edge list; it may also list
    // edge-less nodes, which become isolated graph nodes. Self-loops and
    // duplicate edges are dropped. A node attributed to two different
    // settlements is an ingest error.
    static SocialGraph build(const std::vector<std::pair<NodeId, NodeId>>& edges,
                             const std::vector<std::pair<NodeId, SettlementId>>& attribution) {
        SocialGraph g;
        g.node_ids_.reserve(attribution.size());
        for (const auto& [node, settlement] : attribution) {
            auto [it, inserted] = g.node_index_.try_emplace(node, static_cast<std::int32_t>(g.node_ids_.size()));
            const std::int32_t si = g.intern_settlement(settlement);
            if (inserted) {
                g.node_ids_.push_back(node);
                g.node_settlement_.push_back(si);
            } else if (g.node_settlement_[it->second] != si) {
                throw std::runtime_error("conflicting settlement attribution for node '" + node + "'");
            }
        }
        std::vector<std::pair<std::int32_t, std::int32_t>> idx_edges;
        idx_edges.reserve(edges.size());
        for (const auto& [a, b] : edges) {
            const std::int32_t ia = g.require_node(a);
            const std::int32_t ib = g.require_node(b);
            if (ia == ib) continue;  // self-loop
            idx_edges.emplace_back(std::min(ia, ib), std::max(ia, ib));
        }
        g.finish(std::move(idx_edges));
        return g;
    }

    // Pre-interned construction used by subgraph extraction and generators.
    // Edges are given as index pairs into `node_ids`; dedup/loop-drop applies.
    static SocialGraph from_indexed(std::vector<NodeId> node_ids,
                                    std::vector<std::int32_t> node_settlement,
                                    std::vector<SettlementId> settlement_ids,
                                    std::vector<std::pair<std::int32_t, std::int32_t>> edges) {
        SocialGraph g;
        g.node_ids_ = std::move(node_ids);
        g.node_settlement_ = std::move(node_settlement);
        g.settlement_ids_ = std::move(settlement_ids);
        g.node_index_.reserve(g.node_ids_.size());
        for (std::size_t i = 0; i < g.node_ids_.size(); ++i)
            g.node_index_.emplace(g.node_ids_[i], static_cast<std::int32_t>(i));
        for (std::size_t s = 0; s < g.settlement_ids_.size(); ++s)
            g.settlement_index_.emplace(g.settlement_ids_[s], static_cast<std::int32_t>(s));
        for (auto& [a, b] : edges) {
            if (a > b) std::swap(a, b);
        }
        std::erase_if(edges, [](const auto& e) { return e.first == e.second; });
        g.finish(std::move(edges));
        return g;
    }

    std::size_t node_count() const { return node_ids_.size(); }
    std::size_t edge_count() const { return adj_.size() / 2; }
    std::size_t settlement_count() const { return settlement_ids_.size(); }

    GraphView view() const { return {node_ids_.size(), off_.data(), adj_.data(), edge_count()}; }

    const NodeId& node_id(std::int32_t v) const { return node_ids_[static_cast<std::size_t>(v)]; }

    // -1 when absent
    std::int32_t find_node(const NodeId& id) const {
        auto it = node_index_.find(id);
        return it == node_index_.end() ? -1 : it->second;
    }

    std::int32_t require_node(const NodeId& id) const {
        auto it = node_index_.find(id);
        if (it == node_index_.end())
            throw std::runtime_error("unknown node '" + id + "': missing settlement attribution");
        return it->second;
    }

    std::size_t degree(std::int32_t v) const { return off_[v + 1] - off_[v]; }
    std::size_t degree_of(const NodeId& id) const { return degree(require_node(id)); }

    std::span<const std::int32_t> neighbors(std::int32_t v) const {
        return {adj_.data() + off_[v], adj_.data() + off_[v + 1]};
    }

    std::int32_t settlement_index(std::int32_t v) const { return node_settlement_[static_cast<std::size_t>(v)]; }
    const SettlementId& settlement_of(std::int32_t v) const {
        return settlement_ids_[static_cast<std::size_t>(node_settlement_[static_cast<std::size_t>(v)])];
    }
    const SettlementId& settlement_name(std::int32_t si) const { return settlement_ids_[static_cast<std::size_t>(si)]; }

    std::int32_t find_settlement(const SettlementId& s) const {
        auto it = settlement_index_.find(s);
        return it == settlement_index_.end() ? -1 : it->second;
    }

    // Node indices attributed to settlement index si, ascending.
    const std::vector<std::int32_t>& members(std::int32_t si) const { return settlement_members_[static_cast<std::size_t>(si)]; }

    // Empty for an unknown settlement.
    std::vector<NodeId> settlement_members(const SettlementId& s) const {
        std::vector<NodeId> out;
        const std::int32_t si = find_settlement(s);
        if (si < 0) return out;
        out.reserve(members(si).size());
        for (std::int32_t v : members(si)) out.push_back(node_id(v));
        return out;
    }

    // Induced subgraph on the settlement's members; cross-settlement edges
    // removed. Unknown settlement yields an empty graph.
    SocialGraph internal_subgraph(const SettlementId& s) const {
        const std::int32_t si = find_settlement(s);
        if (si < 0) return from_indexed({}, {}, {s}, {});
        const auto& mem = members(si);
        std::vector<NodeId> ids;
        std::vector<std::int32_t> sett(mem.size(), 0);
        ids.reserve(mem.size());
        std::vector<std::int32_t> local(node_ids_.size(), -1);
        for (std::size_t i = 0; i < mem.size(); ++i) {
            local[static_cast<std::size_t>(mem[i])] = static_cast<std::int32_t>(i);
            ids.push_back(node_id(mem[i]));
        }
        std::vector<std::pair<std::int32_t, std::int32_t>> edges;
        for (std::int32_t v : mem) {
            for (std::int32_t u : neighbors(v)) {
                if (u > v && local[static_cast<std::size_t>(u)] >= 0)
                    edges.emplace_back(local[static_cast<std::size_t>(v)], local[static_cast<std::size_t>(u)]);
            }
        }
        return from_indexed(std::move(ids), std::move(sett), {s}, std::move(edges));
    }

    // The ego network without the ego: induced subgraph on the ego's
    // neighbors, keeping alters from every settlement.
    SocialGraph ego_alters_subgraph(const NodeId& ego) const {
        const std::int32_t e = require_node(ego);
        GraphWorkspace ws;
        LocalSubgraph sub = ego_alters_local(e, ws);
        std::vector<NodeId> ids;
        std::vector<std::int32_t> sett;
        ids.reserve(sub.node_count());
        sett.reserve(sub.node_count());
        for (std::int32_t p : sub.parent) {
            ids.push_back(node_id(p));
            sett.push_back(settlement_index(p));
        }
        std::vector<std::pair<std::int32_t, std::int32_t>> edges;
        edges.reserve(sub.edge_count());
        for (std::size_t v = 0; v < sub.node_count(); ++v)
            for (std::int32_t u : std::span(sub.adj.data() + sub.off[v], sub.adj.data() + sub.off[v + 1]))
                if (u > static_cast<std::int32_t>(v)) edges.emplace_back(static_cast<std::int32_t>(v), u);
        return from_indexed(std::move(ids), std::move(sett), settlement_ids_, std::move(edges));
    }

    // Compact alters subgraph keyed by parent indices. `same_settlement_only`
    // restricts alters to the ego's own settlement (internal-diversity
    // variant).
    LocalSubgraph ego_alters_local(std::int32_t ego, GraphWorkspace& ws,
                                   bool same_settlement_only = false) const {
        LocalSubgraph sub;
        const auto nb = neighbors(ego);
        sub.parent.reserve(nb.size());
        const std::int32_t ego_sett = settlement_index(ego);
        for (std::int32_t a : nb) {
            if (same_settlement_only && settlement_index(a) != ego_sett) continue;
            sub.parent.push_back(a);
        }
        const std::size_t n = sub.parent.size();
        auto& local = prepare_scratch(ws);
        for (std::size_t i = 0; i < n; ++i) local[static_cast<std::size_t>(sub.parent[i])] = static_cast<std::int32_t>(i);
        sub.off.assign(n + 1, 0);
        std::vector<std::int32_t> deg(n, 0);
        for (std::size_t i = 0; i < n; ++i)
            for (std::int32_t u : neighbors(sub.parent[i]))
                if (local[static_cast<std::size_t>(u)] >= 0) ++deg[i];
        for (std::size_t i = 0; i < n; ++i) sub.off[i + 1] = sub.off[i] + static_cast<std::size_t>(deg[i]);
        sub.adj.resize(sub.off[n]);
        std::vector<std::size_t> cursor(sub.off.begin(), sub.off.end() - 1);
        for (std::size_t i = 0; i < n; ++i)
            for (std::int32_t u : neighbors(sub.parent[i])) {
                const std::int32_t lu = local[static_cast<std::size_t>(u)];
                if (lu >= 0) sub.adj[cursor[i]++] = lu;
            }
        for (std::size_t i = 0; i < n; ++i) local[static_cast<std::size_t>(sub.parent[i])] = -1;
        return sub;
    }

    // Compact settlement-internal subgraph (fragmentation hot path).
    LocalSubgraph internal_local(std::int32_t si, GraphWorkspace& ws) const {
        LocalSubgraph sub;
        const auto& mem = members(si);
        sub.parent.assign(mem.begin(), mem.end());
        const std::size_t n = sub.parent.size();
        auto& local = prepare_scratch(ws);
        for (std::size_t i = 0; i < n; ++i) local[static_cast<std::size_t>(sub.parent[i])] = static_cast<std::int32_t>(i);
        sub.off.assign(n + 1, 0);
        for (std::size_t i = 0; i < n; ++i) {
            std::size_t d = 0;
            for (std::int32_t u : neighbors(sub.parent[i]))
                if (local[static_cast<std::size_t>(u)] >= 0) ++d;
            sub.off[i + 1] = d;
        }
        for (std::size_t i = 0; i < n; ++i) sub.off[i + 1] += sub.off[i];
        sub.adj.resize(sub.off[n]);
        std::vector<std::size_t> cursor(sub.off.begin(), sub.off.end() - 1);
        for (std::size_t i = 0; i < n; ++i)
            for (std::int32_t u : neighbors(sub.parent[i])) {
                const std::int32_t lu = local[static_cast<std::size_t>(u)];
                if (lu >= 0) sub.adj[cursor[i]++] = lu;
            }
        for (std::size_t i = 0; i < n; ++i) local[static_cast<std::size_t>(sub.parent[i])] = -1;
        return sub;
    }

    const std::vector<NodeId>& node_ids() const { return node_ids_; }
    const std::vector<SettlementId>& settlement_ids() const { return settlement_ids_; }

private:
    std::int32_t intern_settlement(const SettlementId& s) {
        auto [it, inserted] = settlement_index_.try_emplace(s, static_cast<std::int32_t>(settlement_ids_.size()));
        if (inserted) settlement_ids_.push_back(s);
        return it->second;
    }

    void finish(std::vector<std::pair<std::int32_t, std::int32_t>> edges) {
        std::sort(edges.begin(), edges.end());
        edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
        const std::size_t n = node_ids_.size();
        off_.assign(n + 1, 0);
        for (const auto& [a, b] : edges) {
            ++off_[static_cast<std::size_t>(a) + 1];
            ++off_[static_cast<std::size_t>(b) + 1];
        }
        for (std::size_t i = 0; i < n; ++i) off_[i + 1] += off_[i];
        adj_.resize(edges.size() * 2);
        std::vector<std::size_t> cursor(off_.begin(), off_.end() - 1);
        for (const auto& [a, b] : edges) {
            adj_[cursor[static_cast<std::size_t>(a)]++] = b;
            adj_[cursor[static_cast<std::size_t>(b)]++] = a;
        }
        // neighbor lists ascending (edges sorted by (a,b) already gives this
        // for both directions, but keep it explicit)
        for (std::size_t v = 0; v < n; ++v) std::sort(adj_.begin() + off_[v], adj_.begin() + off_[v + 1]);
        settlement_members_.assign(settlement_ids_.size(), {});
        for (std::size_t v = 0; v < n; ++v)
            settlement_members_[static_cast<std::size_t>(node_settlement_[v])].push_back(static_cast<std::int32_t>(v));
    }

    std::vector<std::int32_t>& prepare_scratch(GraphWorkspace& ws) const {
        if (ws.local_index.size() != node_ids_.size()) ws.local_index.assign(node_ids_.size(), -1);
        return ws.local_index;
    }

    std::vector<NodeId> node_ids_;
    std::unordered_map<NodeId, std::int32_t> node_index_;
    std::vector<std::int32_t> node_settlement_;
    std::vector<SettlementId> settlement_ids_;
    std::unordered_map<SettlementId, std::int32_t> settlement_index_;
    std::vector<std::vector<std::int32_t>> settlement_members_;
    std::vector<std::size_t> off_;
    std::vector<std::int32_t> adj_;
};

}  // namespace socap

#endif
