// socap command line: settlement social-capital measures, procurement risk
// scoring, and the regression battery, as composable subcommands.
#include <CLI11.hpp>
#include <exception>
#include <iostream>
#include <optional>
#include <string>

#include "socap/pipeline.hpp"

namespace {

struct FlagOverrides {
    std::optional<std::string> edges, attribution, contracts, controls, groups, measures, risk, out_dir;
    std::optional<std::uint64_t> seed;
    std::optional<unsigned> threads;
    std::optional<std::string> missing_mode;
    std::optional<bool> standardize_dv;
    std::optional<std::string> diversity_inclusion, crossing_rule, cpv_granularity;
    std::optional<int> max_degree;
    std::optional<double> eligibility_min_rate;
    std::optional<int> eligibility_years;
};

void add_common_flags(CLI::App* cmd, std::string& config_path, FlagOverrides& f) {
    cmd->add_option("--config", config_path, "key = value config file; flags override it");
    cmd->add_option("--edges", f.edges, "edge list file (node_id,node_id)");
    cmd->add_option("--attribution", f.attribution, "attribution file (node_id,settlement_id)");
    cmd->add_option("--contracts", f.contracts, "contract file");
    cmd->add_option("--controls", f.controls, "settlement controls file");
    cmd->add_option("--groups", f.groups, "group membership file (settlement_id,label)");
    cmd->add_option("--measures", f.measures, "measures table (defaults to <out>/measures.csv)");
    cmd->add_option("--risk", f.risk, "settlement risk table (defaults to <out>/settlement_risk.csv)");
    cmd->add_option("--out", f.out_dir, "output directory");
    cmd->add_option("--seed", f.seed, "global random seed");
    cmd->add_option("--threads", f.threads, "worker thread cap (0 = hardware)");
    cmd->add_option("--missing-mode", f.missing_mode, "impute0 | strict")
        ->check(CLI::IsMember({"impute0", "strict"}));
    cmd->add_flag("--standardize-dv", [&f](std::int64_t) { f.standardize_dv = true; },
                  "standardize the dependent variable too");
    cmd->add_option("--diversity-inclusion", f.diversity_inclusion, "exclude_degenerate | strict_all")
        ->check(CLI::IsMember({"exclude_degenerate", "strict_all"}));
    cmd->add_option("--crossing-edge-rule", f.crossing_rule, "per_group | half_per_group")
        ->check(CLI::IsMember({"per_group", "half_per_group"}));
    cmd->add_option("--cpv-granularity", f.cpv_granularity, "full_code | division")
        ->check(CLI::IsMember({"full_code", "division"}));
    cmd->add_option("--max-degree", f.max_degree, "drop users with more connections than this");
    cmd->add_option("--eligibility-min-rate", f.eligibility_min_rate, "min contracts per year on average");
    cmd->add_option("--eligibility-years", f.eligibility_years, "years spanned by the contract window");
}

socap::RunConfig build_config(const std::string& config_path, const FlagOverrides& f) {
    socap::RunConfig cfg = config_path.empty() ? socap::RunConfig{} : socap::load_config(config_path);
    auto set = [&cfg](const char* key, const auto& opt) {
        if (opt) socap::apply_config_entry(cfg, key, *opt);
    };
    set("edges", f.edges);
    set("attribution", f.attribution);
    set("contracts", f.contracts);
    set("controls", f.controls);
    set("groups", f.groups);
    set("measures", f.measures);
    set("risk", f.risk);
    set("out_dir", f.out_dir);
    if (f.seed) cfg.seed = *f.seed;
    if (f.threads) cfg.threads = *f.threads;
    set("missing_mode", f.missing_mode);
    if (f.standardize_dv) cfg.standardize_dv = *f.standardize_dv;
    set("diversity_inclusion", f.diversity_inclusion);
    set("crossing_edge_rule", f.crossing_rule);
    set("cpv_granularity", f.cpv_granularity);
    if (f.max_degree) cfg.max_degree = *f.max_degree;
    if (f.eligibility_min_rate) cfg.eligibility_min_rate = *f.eligibility_min_rate;
    if (f.eligibility_years) cfg.eligibility_years = *f.eligibility_years;
    cfg.synth.seed = cfg.seed;
    return cfg;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"settlement social-capital and procurement-risk analytics"};
    app.require_subcommand(1);

    struct Sub {
        CLI::App* cmd;
        std::string config_path;
        FlagOverrides flags;
    };
    std::map<std::string, Sub> subs;
    for (const char* name : {"ingest", "measures", "score", "regress", "compare", "synth", "pipeline"}) {
        Sub s;
        s.cmd = app.add_subcommand(name, "");
        subs.emplace(name, std::move(s));
    }
    subs["ingest"].cmd->description("clean the social network (foreign locations, super-degree users)");
    subs["measures"].cmd->description("per-settlement fragmentation and diversity");
    subs["score"].cmd->description("score contracts with the eight risk indicators");
    subs["regress"].cmd->description("model battery, VIF, ANOVA importances, marginal effects");
    subs["compare"].cmd->description("Mann-Whitney comparison of two settlement groups");
    subs["synth"].cmd->description("generate a synthetic country with known ground truth");
    subs["pipeline"].cmd->description("ingest, measures, score and regress in one run");
    for (auto& [name, s] : subs) add_common_flags(s.cmd, s.config_path, s.flags);

    CLI11_PARSE(app, argc, argv);

    try {
        for (auto& [name, s] : subs) {
            if (!s.cmd->parsed()) continue;
            const socap::RunConfig cfg = build_config(s.config_path, s.flags);
            if (name == "ingest") socap::cmd_ingest(cfg);
            else if (name == "measures") socap::cmd_measures(cfg);
            else if (name == "score") socap::cmd_score(cfg);
            else if (name == "regress") socap::cmd_regress(cfg);
            else if (name == "compare") socap::cmd_compare(cfg);
            else if (name == "synth") socap::cmd_synth(cfg);
            else if (name == "pipeline") socap::cmd_pipeline(cfg);
        }
    } catch (const std::exception& e) {
        std::cerr << "ERROR " << e.what() << '\n';
        return 1;
    }
    return 0;
}
