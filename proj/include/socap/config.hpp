// Run configuration: flat key = value text file, full command-line override
// (flags win). Committed configs make runs reproducible.
#ifndef SOCAP_CONFIG_HPP
#define SOCAP_CONFIG_HPP

#include <cstdint>
#include <fstream>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "socap/community.hpp"
#include "socap/diversity.hpp"
#include "socap/procurement.hpp"
#include "socap/synth.hpp"

namespace socap {

struct RunConfig {
    // inputs
    std::string edges_path;
    std::string attribution_path;
    std::string contracts_path;
    std::string controls_path;
    std::string groups_path;
    std::string measures_path;  // optional override for regress
    std::string risk_path;      // optional override for regress

    std::string out_dir = "out";
    char delimiter = ',';
    bool has_header = true;
    std::uint64_t seed = 1;
    unsigned threads = 0;  // 0 = hardware concurrency

    // cleaning
    int max_degree = 10000;
    std::vector<std::string> foreign_settlements;
    double max_malformed_rate = 0.01;

    // sample eligibility
    double eligibility_min_rate = 5.0;
    int eligibility_years = 9;
    std::vector<std::string> excluded_settlements;

    // measure/model switches
    MissingMode missing_mode = MissingMode::impute0;
    bool standardize_dv = false;
    DiversityInclusion diversity_inclusion = DiversityInclusion::exclude_degenerate;
    CrossingEdgeRule crossing_rule = CrossingEdgeRule::per_group;
    CpvGranularity cpv_granularity = CpvGranularity::full_code;
    double marginal_level = 0.90;

    CountrySpec synth;
};

namespace detail {

inline std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t");
    return s.substr(a, b - a + 1);
}

inline std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= s.size(); ++i) {
        if (i == s.size() || s[i] == ',') {
            const std::string item = trim(s.substr(start, i - start));
            if (!item.empty()) out.push_back(item);
            start = i + 1;
        }
    }
    return out;
}

inline bool parse_config_bool(const std::string& key, const std::string& v) {
    if (v == "1" || v == "true" || v == "yes") return true;
    if (v == "0" || v == "false" || v == "no") return false;
    throw std::runtime_error("config: bad boolean for '" + key + "': " + v);
}

}  // namespace detail

// Applies one key to the config; shared by the file parser and flag handling.
inline void apply_config_entry(RunConfig& c, const std::string& key, const std::string& value) {
    using detail::parse_config_bool;
    auto to_int = [&](const std::string& v) { return std::stoll(v); };
    auto to_double = [&](const std::string& v) { return std::stod(v); };

    if (key == "edges") c.edges_path = value;
    else if (key == "attribution") c.attribution_path = value;
    else if (key == "contracts") c.contracts_path = value;
    else if (key == "controls") c.controls_path = value;
    else if (key == "groups") c.groups_path = value;
    else if (key == "measures") c.measures_path = value;
    else if (key == "risk") c.risk_path = value;
    else if (key == "out_dir") c.out_dir = value;
    else if (key == "delimiter") {
        if (value.size() != 1) throw std::runtime_error("config: delimiter must be one character");
        c.delimiter = value[0];
    } else if (key == "has_header") c.has_header = parse_config_bool(key, value);
    else if (key == "seed") c.seed = static_cast<std::uint64_t>(std::stoull(value));
    else if (key == "threads") c.threads = static_cast<unsigned>(to_int(value));
    else if (key == "max_degree") {
        c.max_degree = static_cast<int>(to_int(value));
        if (c.max_degree <= 0) throw std::runtime_error("config: max_degree must be positive");
    } else if (key == "foreign_settlements") c.foreign_settlements = detail::split_list(value);
    else if (key == "max_malformed_rate") c.max_malformed_rate = to_double(value);
    else if (key == "eligibility_min_rate") {
        c.eligibility_min_rate = to_double(value);
        if (c.eligibility_min_rate <= 0) throw std::runtime_error("config: eligibility_min_rate must be positive");
    } else if (key == "eligibility_years") {
        c.eligibility_years = static_cast<int>(to_int(value));
        if (c.eligibility_years <= 0) throw std::runtime_error("config: eligibility_years must be positive");
    } else if (key == "excluded_settlements") c.excluded_settlements = detail::split_list(value);
    else if (key == "missing_mode") {
        if (value == "impute0") c.missing_mode = MissingMode::impute0;
        else if (value == "strict") c.missing_mode = MissingMode::strict;
        else throw std::runtime_error("config: missing_mode must be impute0 or strict");
    } else if (key == "standardize_dv") c.standardize_dv = parse_config_bool(key, value);
    else if (key == "diversity_inclusion") {
        if (value == "exclude_degenerate") c.diversity_inclusion = DiversityInclusion::exclude_degenerate;
        else if (value == "strict_all") c.diversity_inclusion = DiversityInclusion::strict_all;
        else throw std::runtime_error("config: diversity_inclusion must be exclude_degenerate or strict_all");
    } else if (key == "crossing_edge_rule") {
        if (value == "per_group") c.crossing_rule = CrossingEdgeRule::per_group;
        else if (value == "half_per_group") c.crossing_rule = CrossingEdgeRule::half_per_group;
        else throw std::runtime_error("config: crossing_edge_rule must be per_group or half_per_group");
    } else if (key == "cpv_granularity") {
        if (value == "full_code") c.cpv_granularity = CpvGranularity::full_code;
        else if (value == "division") c.cpv_granularity = CpvGranularity::division;
        else throw std::runtime_error("config: cpv_granularity must be full_code or division");
    } else if (key == "marginal_level") {
        c.marginal_level = to_double(value);
        if (c.marginal_level <= 0.0 || c.marginal_level >= 1.0)
            throw std::runtime_error("config: marginal_level must be in (0,1)");
    }
    // synthetic-country parameters
    else if (key == "synth_n_towns") c.synth.n_towns = static_cast<int>(to_int(value));
    else if (key == "synth_users_min") c.synth.users_min = static_cast<int>(to_int(value));
    else if (key == "synth_users_max") c.synth.users_max = static_cast<int>(to_int(value));
    else if (key == "synth_blocks_min") c.synth.blocks_min = static_cast<int>(to_int(value));
    else if (key == "synth_blocks_max") c.synth.blocks_max = static_cast<int>(to_int(value));
    else if (key == "synth_p_in_min") c.synth.p_in_min = to_double(value);
    else if (key == "synth_p_in_max") c.synth.p_in_max = to_double(value);
    else if (key == "synth_p_out_min") c.synth.p_out_min = to_double(value);
    else if (key == "synth_p_out_max") c.synth.p_out_max = to_double(value);
    else if (key == "synth_cross_rate_min") c.synth.cross_rate_min = to_double(value);
    else if (key == "synth_cross_rate_max") c.synth.cross_rate_max = to_double(value);
    else if (key == "synth_beta_f") c.synth.beta_f = to_double(value);
    else if (key == "synth_beta_d") c.synth.beta_d = to_double(value);
    else if (key == "synth_noise_sd") c.synth.noise_sd = to_double(value);
    else if (key == "synth_risk_scale") c.synth.risk_scale = to_double(value);
    else if (key == "synth_base_rate") c.synth.base_rate = to_double(value);
    else if (key == "synth_contracts_min") c.synth.contracts_min = static_cast<int>(to_int(value));
    else if (key == "synth_contracts_max") c.synth.contracts_max = static_cast<int>(to_int(value));
    else if (key == "synth_graph_only") c.synth.graph_only = parse_config_bool(key, value);
    else throw std::runtime_error("config: unknown key '" + key + "'");
}

inline RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config '" + path + "'");
    RunConfig c;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const std::string t = detail::trim(line);
        if (t.empty() || t[0] == '#') continue;
        const std::size_t eq = t.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error("config line " + std::to_string(lineno) + ": expected key = value");
        apply_config_entry(c, detail::trim(t.substr(0, eq)), detail::trim(t.substr(eq + 1)));
    }
    // synth seed follows the run seed unless a later override changes it
    c.synth.seed = c.seed;
    return c;
}

}  // namespace socap

#endif
