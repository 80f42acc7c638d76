// Command implementations behind the CLI: ingest -> measures -> score ->
// regress / compare / synth, each writing deterministic tables under the
// configured output directory. Commands throw on fatal errors; the CLI maps
// that to a nonzero exit status.
#ifndef SOCAP_PIPELINE_HPP
#define SOCAP_PIPELINE_HPP

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include "socap/config.hpp"
#include "socap/io.hpp"
#include "socap/measures.hpp"
#include "socap/report.hpp"
#include "socap/synth.hpp"

namespace socap {

namespace detail {

inline void check_malformed_rate(const std::string& what, std::size_t errors, std::size_t rows,
                                 double max_rate) {
    if (rows == 0) return;
    const double rate = static_cast<double>(errors) / static_cast<double>(rows);
    if (rate > max_rate)
        throw std::runtime_error(what + ": malformed row rate " + format_double(rate) +
                                 " exceeds limit " + format_double(max_rate));
}

inline std::string join_path(const std::string& dir, const std::string& name) {
    return (std::filesystem::path(dir) / name).string();
}

}  // namespace detail

// ---- ingest -----------------------------------------------------------------

struct IngestResult {
    SocialGraph graph;  // cleaned
    std::vector<std::pair<NodeId, NodeId>> kept_edges;
    std::vector<std::pair<NodeId, SettlementId>> kept_attribution;
    AuditLog audit;
    nlohmann::json report;
};

// Cleaning: malformed rows logged (fatal above the configured rate), users in
// foreign settlements dropped, then users with degree above max_degree
// dropped ("more than", so a node at exactly the limit stays). Each dropped
// entity gets exactly one audit entry.
inline IngestResult run_ingest(const RunConfig& cfg) {
    if (cfg.edges_path.empty() || cfg.attribution_path.empty())
        throw std::runtime_error("ingest: edges and attribution paths are required");
    IngestResult out;

    EdgeFile ef = load_edges(cfg.edges_path, cfg.delimiter, cfg.has_header);
    AttributionFile af = load_attribution(cfg.attribution_path, cfg.delimiter, cfg.has_header);
    for (const auto& e : ef.errors)
        out.audit.add("row", cfg.edges_path + ":" + std::to_string(e.line), "malformed_row", e.message);
    for (const auto& e : af.errors)
        out.audit.add("row", cfg.attribution_path + ":" + std::to_string(e.line), "malformed_row", e.message);
    detail::check_malformed_rate("ingest edges", ef.errors.size(), ef.rows_seen, cfg.max_malformed_rate);
    detail::check_malformed_rate("ingest attribution", af.errors.size(), af.rows_seen, cfg.max_malformed_rate);

    const SocialGraph raw = SocialGraph::build(ef.edges, af.attribution);

    const std::set<std::string> foreign(cfg.foreign_settlements.begin(), cfg.foreign_settlements.end());
    std::vector<bool> keep(raw.node_count(), true);
    std::size_t n_foreign = 0, n_super = 0;
    for (std::size_t v = 0; v < raw.node_count(); ++v) {
        const auto vi = static_cast<std::int32_t>(v);
        if (foreign.contains(raw.settlement_of(vi))) {
            keep[v] = false;
            ++n_foreign;
            out.audit.add("node", raw.node_id(vi), "foreign_location", raw.settlement_of(vi));
        } else if (raw.degree(vi) > static_cast<std::size_t>(cfg.max_degree)) {
            keep[v] = false;
            ++n_super;
            out.audit.add("node", raw.node_id(vi), "super_degree", std::to_string(raw.degree(vi)));
        }
    }

    std::unordered_set<std::string> seen;
    for (const auto& [node, settlement] : af.attribution) {
        const std::int32_t vi = raw.find_node(node);
        if (vi < 0 || !keep[static_cast<std::size_t>(vi)]) continue;
        if (!seen.insert(node).second) continue;
        out.kept_attribution.emplace_back(node, settlement);
    }
    for (std::size_t v = 0; v < raw.node_count(); ++v) {
        if (!keep[v]) continue;
        for (std::int32_t u : raw.neighbors(static_cast<std::int32_t>(v))) {
            if (static_cast<std::size_t>(u) <= v || !keep[static_cast<std::size_t>(u)]) continue;
            out.kept_edges.emplace_back(raw.node_id(static_cast<std::int32_t>(v)), raw.node_id(u));
        }
    }
    out.graph = SocialGraph::build(out.kept_edges, out.kept_attribution);

    out.report = {{"edge_rows_seen", ef.rows_seen},
                  {"edge_rows_malformed", ef.errors.size()},
                  {"attribution_rows_seen", af.rows_seen},
                  {"attribution_rows_malformed", af.errors.size()},
                  {"nodes_in", raw.node_count()},
                  {"edges_in_dedup", raw.edge_count()},
                  {"nodes_dropped_foreign", n_foreign},
                  {"nodes_dropped_super_degree", n_super},
                  {"nodes_kept", out.graph.node_count()},
                  {"edges_kept", out.graph.edge_count()},
                  {"settlements_kept", out.graph.settlement_count()},
                  {"max_degree", cfg.max_degree}};
    return out;
}

inline void cmd_ingest(const RunConfig& cfg) {
    IngestResult r = run_ingest(cfg);
    std::filesystem::create_directories(cfg.out_dir);
    write_edges(detail::join_path(cfg.out_dir, "cleaned_edges.csv"), r.kept_edges, cfg.delimiter);
    write_attribution(detail::join_path(cfg.out_dir, "cleaned_attribution.csv"), r.kept_attribution,
                      cfg.delimiter);
    std::ofstream rep(detail::join_path(cfg.out_dir, "cleaning_report.json"));
    rep << r.report.dump(2) << '\n';
    r.audit.write_csv(detail::join_path(cfg.out_dir, "audit_ingest.csv"), cfg.delimiter);
    r.audit.log_stderr();
    std::cerr << "INFO ingest: kept " << r.graph.node_count() << " nodes, " << r.graph.edge_count()
              << " edges\n";
}

// ---- measures ----------------------------------------------------------------

struct MeasuresResult {
    std::vector<MeasureRow> rows;  // sorted by settlement id
    AuditLog audit;
};

// Settlements measured: the eligibility-filtered set when a contract corpus
// is configured, otherwise every settlement in the graph (minus exclusions).
inline MeasuresResult run_measures(const RunConfig& cfg, const SocialGraph& g) {
    MeasuresResult out;
    std::vector<std::string> settlements;
    const std::set<std::string> excluded(cfg.excluded_settlements.begin(), cfg.excluded_settlements.end());
    if (!cfg.contracts_path.empty()) {
        ContractsFile cf = load_contracts(cfg.contracts_path, cfg.delimiter, cfg.has_header);
        for (const auto& e : cf.errors)
            out.audit.add("row", cfg.contracts_path + ":" + std::to_string(e.line), "malformed_row", e.message);
        detail::check_malformed_rate("contracts", cf.errors.size(), cf.rows_seen, cfg.max_malformed_rate);
        settlements = eligibility_filter(cf.contracts, cfg.eligibility_years, cfg.eligibility_min_rate, excluded);
    } else {
        for (const auto& s : g.settlement_ids())
            if (!excluded.contains(s)) settlements.push_back(s);
        std::sort(settlements.begin(), settlements.end());
    }

    out.rows = compute_measures(g, settlements, cfg.seed, cfg.crossing_rule, cfg.diversity_inclusion,
                                cfg.threads);
    for (const auto& r : out.rows) {
        if (g.find_settlement(r.settlement) < 0)
            out.audit.add("settlement", r.settlement, "not_in_graph");
        else if (r.frag.undefined)
            out.audit.add("settlement", r.settlement, "internal_edgeless",
                          "no internal edges; fragmentation undefined");
        else if (r.frag.degenerate)
            out.audit.add("settlement", r.settlement, "degenerate_qmax", "single community, F set to 0");
        if (!r.div.defined && g.find_settlement(r.settlement) >= 0)
            out.audit.add("settlement", r.settlement, "no_includable_egos", "diversity undefined");
    }
    return out;
}

inline void write_measures_tables(const RunConfig& cfg, const MeasuresResult& m) {
    std::filesystem::create_directories(cfg.out_dir);
    {
        CsvWriter w(detail::join_path(cfg.out_dir, "fragmentation.csv"),
                    {"settlement_id", "n_nodes", "n_edges", "K", "Q", "Q_max", "F", "degenerate_flag"},
                    cfg.delimiter);
        for (const auto& r : m.rows) {
            w.write_row({r.settlement, std::to_string(r.frag.n_nodes), std::to_string(r.frag.L),
                         std::to_string(r.frag.K), format_double(r.frag.Q), format_double(r.frag.Q_max),
                         format_double(r.frag.F), r.frag.degenerate ? "1" : "0"});
        }
        write_schema_sidecar(detail::join_path(cfg.out_dir, "fragmentation.csv"),
                             {{"settlement_id", "string"},
                              {"n_nodes", "int"},
                              {"n_edges", "int"},
                              {"K", "int"},
                              {"Q", "double"},
                              {"Q_max", "double"},
                              {"F", "double"},
                              {"degenerate_flag", "bool"}},
                             cfg.delimiter);
    }
    {
        CsvWriter w(detail::join_path(cfg.out_dir, "diversity.csv"),
                    {"settlement_id", "D", "D_internal", "n_included", "n_excluded"}, cfg.delimiter);
        for (const auto& r : m.rows) {
            w.write_row({r.settlement, format_double(r.div.d), format_double(r.div_internal.d),
                         std::to_string(r.div.n_included), std::to_string(r.div.n_excluded)});
        }
        write_schema_sidecar(detail::join_path(cfg.out_dir, "diversity.csv"),
                             {{"settlement_id", "string"},
                              {"D", "double"},
                              {"D_internal", "double"},
                              {"n_included", "int"},
                              {"n_excluded", "int"}},
                             cfg.delimiter);
    }
    {
        CsvWriter w(detail::join_path(cfg.out_dir, "measures.csv"),
                    {"settlement_id", "n_nodes", "n_edges", "K", "Q", "Q_max", "F", "degenerate_flag",
                     "D", "D_internal", "n_included", "n_excluded"},
                    cfg.delimiter);
        for (const auto& r : m.rows) {
            w.write_row({r.settlement, std::to_string(r.frag.n_nodes), std::to_string(r.frag.L),
                         std::to_string(r.frag.K), format_double(r.frag.Q), format_double(r.frag.Q_max),
                         format_double(r.frag.F), r.frag.degenerate ? "1" : "0", format_double(r.div.d),
                         format_double(r.div_internal.d), std::to_string(r.div.n_included),
                         std::to_string(r.div.n_excluded)});
        }
        write_schema_sidecar(detail::join_path(cfg.out_dir, "measures.csv"),
                             {{"settlement_id", "string"},
                              {"n_nodes", "int"},
                              {"n_edges", "int"},
                              {"K", "int"},
                              {"Q", "double"},
                              {"Q_max", "double"},
                              {"F", "double"},
                              {"degenerate_flag", "bool"},
                              {"D", "double"},
                              {"D_internal", "double"},
                              {"n_included", "int"},
                              {"n_excluded", "int"}},
                             cfg.delimiter);
    }
}

inline void cmd_measures(const RunConfig& cfg) {
    if (cfg.edges_path.empty() || cfg.attribution_path.empty())
        throw std::runtime_error("measures: edges and attribution paths are required");
    EdgeFile ef = load_edges(cfg.edges_path, cfg.delimiter, cfg.has_header);
    AttributionFile af = load_attribution(cfg.attribution_path, cfg.delimiter, cfg.has_header);
    detail::check_malformed_rate("edges", ef.errors.size(), ef.rows_seen, cfg.max_malformed_rate);
    detail::check_malformed_rate("attribution", af.errors.size(), af.rows_seen, cfg.max_malformed_rate);
    const SocialGraph g = SocialGraph::build(ef.edges, af.attribution);
    MeasuresResult m = run_measures(cfg, g);
    write_measures_tables(cfg, m);
    m.audit.write_csv(detail::join_path(cfg.out_dir, "audit_measures.csv"), cfg.delimiter);
    m.audit.log_stderr();
    std::cerr << "INFO measures: " << m.rows.size() << " settlements\n";
}

// ---- score -------------------------------------------------------------------

struct ScoreResult {
    std::vector<ScoredContract> scored;
    std::vector<SettlementRisk> risk;  // sorted by settlement id
    AuditLog audit;
};

inline ScoreResult run_score(const RunConfig& cfg, const std::vector<ContractRecord>& contracts) {
    ScoreResult out;
    ScoringRules rules;
    rules.cpv_granularity = cfg.cpv_granularity;
    const MarketStats market = market_averages(contracts, cfg.cpv_granularity);
    std::map<std::string, std::vector<ScoredContract>> by_settlement;
    for (const auto& c : contracts) {
        try {
            ScoredContract s = score_contract(c, market, rules);
            by_settlement[s.settlement_id].push_back(s);
            out.scored.push_back(std::move(s));
        } catch (const std::exception& e) {
            out.audit.add("contract", c.contract_id, "invalid_contract", e.what());
        }
    }
    for (const auto& [sid, scored] : by_settlement) out.risk.push_back(aggregate_settlement(sid, scored));
    return out;
}

inline void write_score_tables(const RunConfig& cfg, const ScoreResult& s) {
    std::filesystem::create_directories(cfg.out_dir);
    {
        std::vector<std::string> header{"contract_id", "settlement_id"};
        for (const char* n : kIndicatorNames) header.emplace_back(n);
        header.insert(header.end(), {"c_csb", "cri_impute0", "cri_strict"});
        CsvWriter w(detail::join_path(cfg.out_dir, "contracts_scored.csv"), header, cfg.delimiter);
        for (const auto& sc : s.scored) {
            std::vector<std::string> row{sc.contract_id, sc.settlement_id};
            for (std::size_t i = 0; i < kIndicatorCount; ++i)
                row.push_back(sc.indicators.present[i] ? format_double(sc.indicators.value[i]) : "");
            row.push_back(sc.csb ? format_double(*sc.csb) : "");
            row.push_back(sc.cri_impute0 ? format_double(*sc.cri_impute0) : "");
            row.push_back(sc.cri_strict ? format_double(*sc.cri_strict) : "");
            w.write_row(row);
        }
        std::vector<std::pair<std::string, std::string>> schema{{"contract_id", "string"},
                                                                {"settlement_id", "string"}};
        for (const char* n : kIndicatorNames) schema.emplace_back(n, "double");
        schema.insert(schema.end(), {{"c_csb", "double"}, {"cri_impute0", "double"}, {"cri_strict", "double"}});
        write_schema_sidecar(detail::join_path(cfg.out_dir, "contracts_scored.csv"), schema, cfg.delimiter);
    }
    {
        CsvWriter w(detail::join_path(cfg.out_dir, "settlement_risk.csv"),
                    {"settlement_id", "mean_csb", "mean_cri", "mean_cri_strict", "n_contracts", "n_csb",
                     "n_cri"},
                    cfg.delimiter);
        for (const auto& r : s.risk) {
            w.write_row({r.settlement_id, format_double(r.mean_csb), format_double(r.mean_cri),
                         format_double(r.mean_cri_strict), std::to_string(r.n_contracts),
                         std::to_string(r.n_csb), std::to_string(r.n_cri)});
        }
        write_schema_sidecar(detail::join_path(cfg.out_dir, "settlement_risk.csv"),
                             {{"settlement_id", "string"},
                              {"mean_csb", "double"},
                              {"mean_cri", "double"},
                              {"mean_cri_strict", "double"},
                              {"n_contracts", "int"},
                              {"n_csb", "int"},
                              {"n_cri", "int"}},
                             cfg.delimiter);
    }
}

inline void cmd_score(const RunConfig& cfg) {
    if (cfg.contracts_path.empty()) throw std::runtime_error("score: contracts path is required");
    ContractsFile cf = load_contracts(cfg.contracts_path, cfg.delimiter, cfg.has_header);
    AuditLog row_audit;
    for (const auto& e : cf.errors)
        row_audit.add("row", cfg.contracts_path + ":" + std::to_string(e.line), "malformed_row", e.message);
    detail::check_malformed_rate("contracts", cf.errors.size(), cf.rows_seen, cfg.max_malformed_rate);
    ScoreResult s = run_score(cfg, cf.contracts);
    for (const auto& e : row_audit.entries()) s.audit.add(e.kind, e.id, e.reason, e.detail);
    write_score_tables(cfg, s);
    s.audit.write_csv(detail::join_path(cfg.out_dir, "audit_score.csv"), cfg.delimiter);
    s.audit.log_stderr();
    std::cerr << "INFO score: " << s.scored.size() << " contracts, " << s.risk.size() << " settlements\n";
}

// ---- regress -----------------------------------------------------------------

struct MeasuresTableRow {
    std::string settlement_id;
    double f = std::numeric_limits<double>::quiet_NaN();
    double d = std::numeric_limits<double>::quiet_NaN();
    double d_internal = std::numeric_limits<double>::quiet_NaN();
};

inline std::vector<MeasuresTableRow> load_measures_table(const std::string& path, char delim = ',') {
    RawTable t = read_raw_table(path, delim, true);
    std::vector<MeasuresTableRow> out;
    for (const auto& [lineno, line] : t.lines) {
        const auto f = split_fields(line, delim);
        if (f.size() != 12) throw std::runtime_error(path + ":" + std::to_string(lineno) + ": expected 12 fields");
        MeasuresTableRow r;
        r.settlement_id = std::string(f[0]);
        if (auto v = parse_double_field(f[6])) r.f = *v;
        if (auto v = parse_double_field(f[8])) r.d = *v;
        if (auto v = parse_double_field(f[9])) r.d_internal = *v;
        out.push_back(std::move(r));
    }
    return out;
}

struct RiskTableRow {
    std::string settlement_id;
    double mean_csb = std::numeric_limits<double>::quiet_NaN();
    double mean_cri = std::numeric_limits<double>::quiet_NaN();
    double mean_cri_strict = std::numeric_limits<double>::quiet_NaN();
    std::int64_t n_contracts = 0;
};

inline std::vector<RiskTableRow> load_risk_table(const std::string& path, char delim = ',') {
    RawTable t = read_raw_table(path, delim, true);
    std::vector<RiskTableRow> out;
    for (const auto& [lineno, line] : t.lines) {
        const auto f = split_fields(line, delim);
        if (f.size() != 7) throw std::runtime_error(path + ":" + std::to_string(lineno) + ": expected 7 fields");
        RiskTableRow r;
        r.settlement_id = std::string(f[0]);
        if (auto v = parse_double_field(f[1])) r.mean_csb = *v;
        if (auto v = parse_double_field(f[2])) r.mean_cri = *v;
        if (auto v = parse_double_field(f[3])) r.mean_cri_strict = *v;
        if (auto v = parse_int_field(f[4])) r.n_contracts = *v;
        out.push_back(std::move(r));
    }
    return out;
}

struct JoinResult {
    std::vector<SettlementRow> rows;  // sorted by settlement id
    AuditLog audit;
};

// Joins measures, risk, and controls; settlements failing any source are
// dropped with a named reason. log_n_contracts derives from the risk table.
inline JoinResult join_settlement_rows(const std::vector<MeasuresTableRow>& measures,
                                       const std::vector<RiskTableRow>& risk,
                                       const std::vector<ControlRow>& controls, MissingMode mode) {
    JoinResult out;
    std::unordered_map<std::string, const RiskTableRow*> risk_by;
    for (const auto& r : risk) risk_by[r.settlement_id] = &r;
    std::unordered_map<std::string, const ControlRow*> ctl_by;
    for (const auto& c : controls) ctl_by[c.settlement_id] = &c;

    for (const auto& m : measures) {
        if (std::isnan(m.f)) {
            out.audit.add("settlement", m.settlement_id, "no_fragmentation");
            continue;
        }
        if (std::isnan(m.d)) {
            out.audit.add("settlement", m.settlement_id, "no_diversity");
            continue;
        }
        auto rit = risk_by.find(m.settlement_id);
        if (rit == risk_by.end() || rit->second->n_contracts < 1) {
            out.audit.add("settlement", m.settlement_id, "missing_risk");
            continue;
        }
        auto cit = ctl_by.find(m.settlement_id);
        if (cit == ctl_by.end()) {
            out.audit.add("settlement", m.settlement_id, "missing_controls");
            continue;
        }
        const double cri = mode == MissingMode::impute0 ? rit->second->mean_cri : rit->second->mean_cri_strict;
        if (std::isnan(rit->second->mean_csb) || std::isnan(cri)) {
            out.audit.add("settlement", m.settlement_id, "missing_risk", "composite undefined");
            continue;
        }
        SettlementRow row;
        row.settlement_id = m.settlement_id;
        row.mean_csb = rit->second->mean_csb;
        row.mean_cri = cri;
        row.fragmentation = m.f;
        row.diversity = m.d;
        const auto& cv = cit->second->values;
        row.controls = {cv[0], std::log(static_cast<double>(rit->second->n_contracts)), cv[1], cv[2],
                        cv[3], cv[4], cv[5], cv[6], cv[7], cv[8], cv[9]};
        out.rows.push_back(std::move(row));
    }
    std::sort(out.rows.begin(), out.rows.end(),
              [](const SettlementRow& a, const SettlementRow& b) { return a.settlement_id < b.settlement_id; });
    return out;
}

struct RegressResult {
    ModelSuiteResult suite_csb;
    ModelSuiteResult suite_cri;
    VifReport vif_full;
    std::vector<FeatureImportance> anova_csb;
    std::vector<FeatureImportance> anova_cri;
    std::vector<SettlementRow> rows;
    AuditLog audit;
};

inline RegressResult run_regress(const RunConfig& cfg, const std::vector<SettlementRow>& rows) {
    RegressResult out;
    out.rows = rows;
    out.suite_csb = model_suite(rows, DependentVariable::mean_csb, cfg.standardize_dv);
    out.suite_cri = model_suite(rows, DependentVariable::mean_cri, cfg.standardize_dv);

    // full-model predictor matrix, standardized as in the fits
    const Eigen::Index n = static_cast<Eigen::Index>(rows.size());
    const Eigen::Index np = 2 + static_cast<Eigen::Index>(kControlNames.size());
    Eigen::MatrixXd Z(n, np);
    Eigen::VectorXd y_csb(n), y_cri(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto& r = rows[static_cast<std::size_t>(i)];
        Z(i, 0) = r.fragmentation;
        Z(i, 1) = r.diversity;
        for (std::size_t j = 0; j < kControlNames.size(); ++j)
            Z(i, 2 + static_cast<Eigen::Index>(j)) = r.controls[j];
        y_csb[i] = r.mean_csb;
        y_cri[i] = r.mean_cri;
    }
    std::vector<std::string> znames{"fragmentation", "diversity"};
    for (const char* c : kControlNames) znames.emplace_back(c);
    standardize_columns(Z, znames);
    out.vif_full = vif(Z, znames);

    Eigen::MatrixXd X(n, np + 1);
    X.col(0).setOnes();
    X.rightCols(np) = Z;
    std::vector<std::string> xnames{"const"};
    xnames.insert(xnames.end(), znames.begin(), znames.end());
    out.anova_csb = anova_f_importance(y_csb, X, xnames);
    out.anova_cri = anova_f_importance(y_cri, X, xnames);
    return out;
}

inline void write_marginals(const RunConfig& cfg, const ModelSuiteResult& suite, const std::string& dv) {
    std::vector<double> grid;
    for (int i = -20; i <= 20; ++i) grid.push_back(static_cast<double>(i) / 10.0);
    for (const char* feature : {"fragmentation", "diversity"}) {
        const MarginalCurve c = marginal_effects(suite.models[3], feature, grid, cfg.marginal_level);
        const std::string path = detail::join_path(cfg.out_dir, "marginal_" + dv + "_" + feature + ".csv");
        CsvWriter w(path, {"grid", "predicted", "lo", "hi"}, cfg.delimiter);
        for (std::size_t i = 0; i < c.grid.size(); ++i)
            w.write_row({format_double(c.grid[i]), format_double(c.predicted[i]), format_double(c.lo[i]),
                         format_double(c.hi[i])});
        write_schema_sidecar(path, {{"grid", "double"}, {"predicted", "double"}, {"lo", "double"}, {"hi", "double"}},
                             cfg.delimiter);
    }
}

inline void write_regress_tables(const RunConfig& cfg, const RegressResult& r) {
    std::filesystem::create_directories(cfg.out_dir);
    for (const auto* suite : {&r.suite_csb, &r.suite_cri}) {
        const std::string dv = dependent_name(suite->dv);
        std::ofstream txt(detail::join_path(cfg.out_dir, "models_" + dv + ".txt"));
        txt << render_model_table(*suite);
        write_marginals(cfg, *suite, dv);
    }
    {
        CsvWriter w(detail::join_path(cfg.out_dir, "vif.csv"), {"predictor", "vif"}, cfg.delimiter);
        for (std::size_t j = 0; j < r.vif_full.names.size(); ++j)
            w.write_row({r.vif_full.names[j],
                         std::isinf(r.vif_full.vif[j]) ? "inf" : format_double(r.vif_full.vif[j])});
        write_schema_sidecar(detail::join_path(cfg.out_dir, "vif.csv"),
                             {{"predictor", "string"}, {"vif", "double"}}, cfg.delimiter);
    }
    for (const auto& [name, anova] : {std::pair{"anova_mean_csb.csv", &r.anova_csb},
                                      std::pair{"anova_mean_cri.csv", &r.anova_cri}}) {
        CsvWriter w(detail::join_path(cfg.out_dir, name), {"feature", "F", "p", "significant"}, cfg.delimiter);
        for (const auto& fi : *anova)
            w.write_row({fi.name, format_double(fi.f), format_double(fi.p), fi.significant ? "1" : "0"});
        write_schema_sidecar(detail::join_path(cfg.out_dir, name),
                             {{"feature", "string"}, {"F", "double"}, {"p", "double"}, {"significant", "bool"}},
                             cfg.delimiter);
    }
    nlohmann::json j;
    j["csb"] = suite_to_json(r.suite_csb);
    j["cri"] = suite_to_json(r.suite_cri);
    j["vif"] = nlohmann::json::array();
    for (std::size_t k = 0; k < r.vif_full.names.size(); ++k)
        j["vif"].push_back({{"predictor", r.vif_full.names[k]}, {"vif", r.vif_full.vif[k]}});
    j["n_rows"] = r.rows.size();
    std::ofstream jf(detail::join_path(cfg.out_dir, "models.json"));
    jf << j.dump(2) << '\n';
}

inline RegressResult cmd_regress(const RunConfig& cfg) {
    const std::string measures_path = cfg.measures_path.empty()
                                          ? detail::join_path(cfg.out_dir, "measures.csv")
                                          : cfg.measures_path;
    const std::string risk_path =
        cfg.risk_path.empty() ? detail::join_path(cfg.out_dir, "settlement_risk.csv") : cfg.risk_path;
    if (cfg.controls_path.empty()) throw std::runtime_error("regress: controls path is required");

    const auto measures = load_measures_table(measures_path, cfg.delimiter);
    const auto risk = load_risk_table(risk_path, cfg.delimiter);
    ControlsFile ctl = load_controls(cfg.controls_path, cfg.delimiter, cfg.has_header);
    detail::check_malformed_rate("controls", ctl.errors.size(), ctl.rows_seen, cfg.max_malformed_rate);

    JoinResult join = join_settlement_rows(measures, risk, ctl.rows, cfg.missing_mode);
    RegressResult out = run_regress(cfg, join.rows);
    for (const auto& e : join.audit.entries()) out.audit.add(e.kind, e.id, e.reason, e.detail);
    write_regress_tables(cfg, out);
    out.audit.write_csv(detail::join_path(cfg.out_dir, "audit_regress.csv"), cfg.delimiter);
    out.audit.log_stderr();
    std::cout << render_model_table(out.suite_csb) << '\n' << render_model_table(out.suite_cri);
    return out;
}

// ---- compare -----------------------------------------------------------------

struct CompareResult {
    std::string group_a, group_b;  // labels, lexicographic order
    std::size_t n_a = 0, n_b = 0;
    MwuResult csb;
    MwuResult cri;
    double mean_csb_a = 0.0, mean_csb_b = 0.0;
    double mean_cri_a = 0.0, mean_cri_b = 0.0;
};

inline CompareResult run_compare(const std::vector<RiskTableRow>& risk,
                                 const std::vector<std::pair<std::string, std::string>>& groups,
                                 MissingMode mode) {
    std::unordered_map<std::string, const RiskTableRow*> by_id;
    for (const auto& r : risk) by_id[r.settlement_id] = &r;

    std::set<std::string> labels;
    for (const auto& [sid, label] : groups) labels.insert(label);
    if (labels.size() != 2)
        throw std::runtime_error("compare: group file must contain exactly 2 labels, found " +
                                 std::to_string(labels.size()));
    CompareResult out;
    out.group_a = *labels.begin();
    out.group_b = *std::next(labels.begin());

    std::vector<double> csb_a, csb_b, cri_a, cri_b;
    for (const auto& [sid, label] : groups) {
        auto it = by_id.find(sid);
        if (it == by_id.end()) throw std::runtime_error("compare: unknown settlement '" + sid + "' in group file");
        const double cri_v = mode == MissingMode::impute0 ? it->second->mean_cri : it->second->mean_cri_strict;
        if (label == out.group_a) {
            csb_a.push_back(it->second->mean_csb);
            cri_a.push_back(cri_v);
        } else {
            csb_b.push_back(it->second->mean_csb);
            cri_b.push_back(cri_v);
        }
    }
    if (csb_a.size() < 2 || csb_b.size() < 2)
        throw std::runtime_error("compare: each group needs at least 2 members");
    out.n_a = csb_a.size();
    out.n_b = csb_b.size();
    out.csb = mann_whitney_u(csb_a, csb_b);
    out.cri = mann_whitney_u(cri_a, cri_b);
    auto mean = [](const std::vector<double>& v) {
        double s = 0.0;
        for (double x : v) s += x;
        return s / static_cast<double>(v.size());
    };
    out.mean_csb_a = mean(csb_a);
    out.mean_csb_b = mean(csb_b);
    out.mean_cri_a = mean(cri_a);
    out.mean_cri_b = mean(cri_b);
    return out;
}

inline void write_compare_tables(const RunConfig& cfg, const CompareResult& c,
                                 const std::vector<RiskTableRow>& risk,
                                 const std::vector<std::pair<std::string, std::string>>& groups) {
    std::filesystem::create_directories(cfg.out_dir);
    nlohmann::json j;
    j["group_a"] = c.group_a;
    j["group_b"] = c.group_b;
    j["n_a"] = c.n_a;
    j["n_b"] = c.n_b;
    auto mwu_json = [](const MwuResult& m) {
        return nlohmann::json{{"U", m.u},
                              {"p", m.p},
                              {"method", m.method == MwuResult::Method::exact ? "exact" : "normal_approx"},
                              {"z", m.z}};
    };
    j["mean_csb"] = {{"test", mwu_json(c.csb)}, {"mean_a", c.mean_csb_a}, {"mean_b", c.mean_csb_b}};
    j["mean_cri"] = {{"test", mwu_json(c.cri)}, {"mean_a", c.mean_cri_a}, {"mean_b", c.mean_cri_b}};
    std::ofstream out(detail::join_path(cfg.out_dir, "compare.json"));
    out << j.dump(2) << '\n';

    // histogram-ready bins per measure and group
    std::unordered_map<std::string, const RiskTableRow*> by_id;
    for (const auto& r : risk) by_id[r.settlement_id] = &r;
    CsvWriter w(detail::join_path(cfg.out_dir, "compare_bins.csv"),
                {"measure", "group", "bin_lo", "bin_hi", "count"}, cfg.delimiter);
    for (const char* measure : {"mean_csb", "mean_cri"}) {
        std::vector<std::pair<std::string, double>> vals;
        for (const auto& [sid, label] : groups) {
            const auto* r = by_id.at(sid);
            const double v = std::string(measure) == "mean_csb"
                                 ? r->mean_csb
                                 : (cfg.missing_mode == MissingMode::impute0 ? r->mean_cri : r->mean_cri_strict);
            vals.emplace_back(label, v);
        }
        double lo = vals.front().second, hi = vals.front().second;
        for (const auto& [g, v] : vals) {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        const int n_bins = 20;
        const double width = hi > lo ? (hi - lo) / n_bins : 1.0;
        for (const std::string& group : {c.group_a, c.group_b}) {
            std::vector<int> counts(n_bins, 0);
            for (const auto& [g, v] : vals) {
                if (g != group) continue;
                int b = static_cast<int>((v - lo) / width);
                b = std::clamp(b, 0, n_bins - 1);
                ++counts[static_cast<std::size_t>(b)];
            }
            for (int b = 0; b < n_bins; ++b)
                w.write_row({measure, group, format_double(lo + b * width), format_double(lo + (b + 1) * width),
                             std::to_string(counts[static_cast<std::size_t>(b)])});
        }
    }
    write_schema_sidecar(detail::join_path(cfg.out_dir, "compare_bins.csv"),
                         {{"measure", "string"},
                          {"group", "string"},
                          {"bin_lo", "double"},
                          {"bin_hi", "double"},
                          {"count", "int"}},
                         cfg.delimiter);
}

inline CompareResult cmd_compare(const RunConfig& cfg) {
    if (cfg.groups_path.empty()) throw std::runtime_error("compare: groups path is required");
    const std::string risk_path =
        cfg.risk_path.empty() ? detail::join_path(cfg.out_dir, "settlement_risk.csv") : cfg.risk_path;
    const auto risk = load_risk_table(risk_path, cfg.delimiter);
    GroupsFile gf = load_groups(cfg.groups_path, cfg.delimiter, cfg.has_header);
    if (!gf.errors.empty())
        throw std::runtime_error("compare: malformed group file row at line " +
                                 std::to_string(gf.errors.front().line));
    CompareResult c = run_compare(risk, gf.rows, cfg.missing_mode);
    write_compare_tables(cfg, c, risk, gf.rows);
    std::cout << "Mann-Whitney " << c.group_a << " (n=" << c.n_a << ") vs " << c.group_b << " (n=" << c.n_b
              << ")\n"
              << "  mean_csb: U=" << format_double(c.csb.u) << " p=" << format_double(c.csb.p) << " ("
              << format_double(c.mean_csb_a) << " vs " << format_double(c.mean_csb_b) << ")\n"
              << "  mean_cri: U=" << format_double(c.cri.u) << " p=" << format_double(c.cri.p) << " ("
              << format_double(c.mean_cri_a) << " vs " << format_double(c.mean_cri_b) << ")\n";
    return c;
}

// ---- synth -------------------------------------------------------------------

inline void write_ground_truth(const RunConfig& cfg, const CountryData& country) {
    const std::string path = detail::join_path(cfg.out_dir, "ground_truth.csv");
    CsvWriter w(path, {"settlement_id", "F", "D", "D_internal", "target_rate", "n_contracts"}, cfg.delimiter);
    for (const auto& g : country.truth)
        w.write_row({g.settlement_id, format_double(g.f), format_double(g.d), format_double(g.d_internal),
                     format_double(g.rate), std::to_string(g.n_contracts)});
    write_schema_sidecar(path,
                         {{"settlement_id", "string"},
                          {"F", "double"},
                          {"D", "double"},
                          {"D_internal", "double"},
                          {"target_rate", "double"},
                          {"n_contracts", "int"}},
                         cfg.delimiter);
    nlohmann::json j;
    j["beta_f_std"] = country.beta_f_std;
    j["beta_d_std"] = country.beta_d_std;
    j["beta_f_raw"] = country.beta_f_raw;
    j["beta_d_raw"] = country.beta_d_raw;
    j["note"] = "raw-scale betas are in dependent-rate units per one sd of the measure";
    std::ofstream out(detail::join_path(cfg.out_dir, "ground_truth.json"));
    out << j.dump(2) << '\n';
}

inline CountryData cmd_synth(const RunConfig& cfg) {
    CountrySpec spec = cfg.synth;
    spec.seed = cfg.seed;
    CountryData country = generate_country(spec, cfg.threads);
    std::filesystem::create_directories(cfg.out_dir);
    write_edges(detail::join_path(cfg.out_dir, "edges.csv"), country.edges, cfg.delimiter);
    write_attribution(detail::join_path(cfg.out_dir, "attribution.csv"), country.attribution, cfg.delimiter);
    if (!spec.graph_only) {
        write_contracts(detail::join_path(cfg.out_dir, "contracts.csv"), country.contracts, cfg.delimiter);
        write_controls(detail::join_path(cfg.out_dir, "controls.csv"), country.controls, cfg.delimiter);
        write_ground_truth(cfg, country);
    }
    std::cerr << "INFO synth: " << country.attribution.size() << " users, " << country.edges.size()
              << " edge rows, " << country.contracts.size() << " contracts\n";
    return country;
}

// ---- pipeline ----------------------------------------------------------------

// ingest -> measures -> score -> regress, staged under out_dir.
inline void cmd_pipeline(const RunConfig& cfg) {
    cmd_ingest(cfg);
    RunConfig staged = cfg;
    staged.edges_path = detail::join_path(cfg.out_dir, "cleaned_edges.csv");
    staged.attribution_path = detail::join_path(cfg.out_dir, "cleaned_attribution.csv");
    cmd_measures(staged);
    cmd_score(staged);
    cmd_regress(staged);
}

}  // namespace socap

#endif
