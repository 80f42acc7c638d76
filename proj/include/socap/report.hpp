// Human-readable model tables (aligned text, coefficients with significance
// stars and standard errors in parentheses) plus machine-readable JSON.
#ifndef SOCAP_REPORT_HPP
#define SOCAP_REPORT_HPP

#include <cstdio>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "socap/stats.hpp"

namespace socap {

// *p<0.1, **p<0.05, ***p<0.01
inline std::string significance_stars(double p) {
    if (p < 0.01) return "***";
    if (p < 0.05) return "**";
    if (p < 0.1) return "*";
    return "";
}

inline std::string format_coef(double v, int prec = 3) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.*f", prec, v);
    return buf;
}

class TextTable {
public:
    explicit TextTable(std::size_t n_cols) : n_cols_(n_cols) {}

    void add_row(std::vector<std::string> cells) {
        cells.resize(n_cols_);
        rows_.push_back(std::move(cells));
    }

    void add_rule() { rows_.push_back({kRule}); }

    std::string render() const {
        std::vector<std::size_t> width(n_cols_, 0);
        for (const auto& r : rows_) {
            if (r.size() == 1 && r[0] == kRule) continue;
            for (std::size_t j = 0; j < r.size(); ++j) width[j] = std::max(width[j], r[j].size());
        }
        std::size_t total = 0;
        for (std::size_t w : width) total += w + 2;
        std::ostringstream out;
        for (const auto& r : rows_) {
            if (r.size() == 1 && r[0] == kRule) {
                out << std::string(total, '-') << '\n';
                continue;
            }
            for (std::size_t j = 0; j < r.size(); ++j) {
                if (j == 0)
                    out << std::left << std::setw(static_cast<int>(width[j]) + 2) << r[j];
                else
                    out << std::right << std::setw(static_cast<int>(width[j]) + 2) << r[j];
            }
            out << '\n';
        }
        return out.str();
    }

private:
    static constexpr const char* kRule = "\x01rule";
    std::size_t n_cols_;
    std::vector<std::vector<std::string>> rows_;
};

// Four-column comparison in the usual journal layout: base model, each
// network feature alone, and the full model.
inline std::string render_model_table(const ModelSuiteResult& suite) {
    static constexpr std::array<const char*, 4> col_names = {"(1)", "(2)", "(3)", "(4)"};
    TextTable t(5);
    t.add_row({std::string("Dependent variable: ") + dependent_name(suite.dv) +
                   (suite.dv_standardized ? " (standardized)" : ""),
               "", "", "", ""});
    t.add_row({"", col_names[0], col_names[1], col_names[2], col_names[3]});
    t.add_rule();

    // coefficient rows in the full model's order
    const RegressionResult& full = suite.models[3];
    for (Eigen::Index j = 1; j < full.n_params; ++j) {
        const std::string& name = full.names[static_cast<std::size_t>(j)];
        std::vector<std::string> coef_row{name}, se_row{""};
        for (const auto& m : suite.models) {
            Eigen::Index k = -1;
            for (Eigen::Index q = 1; q < m.n_params; ++q)
                if (m.names[static_cast<std::size_t>(q)] == name) {
                    k = q;
                    break;
                }
            if (k < 0) {
                coef_row.push_back("");
                se_row.push_back("");
            } else {
                coef_row.push_back(format_coef(m.beta[k]) + significance_stars(m.p[k]));
                se_row.push_back("(" + format_coef(m.se[k]) + ")");
            }
        }
        t.add_row(coef_row);
        t.add_row(se_row);
    }
    {
        std::vector<std::string> coef_row{"Constant"}, se_row{""};
        for (const auto& m : suite.models) {
            coef_row.push_back(format_coef(m.beta[0]) + significance_stars(m.p[0]));
            se_row.push_back("(" + format_coef(m.se[0]) + ")");
        }
        t.add_row(coef_row);
        t.add_row(se_row);
    }
    t.add_rule();
    {
        std::vector<std::string> row{"Observations"};
        for (const auto& m : suite.models) row.push_back(std::to_string(m.n));
        t.add_row(row);
    }
    {
        std::vector<std::string> row{"Adjusted R2"};
        for (const auto& m : suite.models) row.push_back(format_coef(m.adj_r2));
        t.add_row(row);
    }
    {
        std::vector<std::string> row{"Adj. R2 vs base"};
        for (double d : suite.adj_r2_delta_vs_base) row.push_back(format_coef(d, 3));
        t.add_row(row);
    }
    {
        std::vector<std::string> row{"F Statistic"};
        for (const auto& m : suite.models) row.push_back(format_coef(m.f_stat) + significance_stars(m.f_p));
        t.add_row(row);
    }
    std::string out = t.render();
    out += "\nModels: (1) controls only; (2) + fragmentation; (3) + diversity; (4) full.\n";
    out += "Predictors standardized to mean 0, sd 1. Significance: *p<0.1; **p<0.05; ***p<0.01.\n";
    return out;
}

inline nlohmann::json regression_to_json(const RegressionResult& r) {
    nlohmann::json j;
    j["n"] = r.n;
    j["n_params"] = r.n_params;
    j["df_resid"] = r.df_resid;
    j["r2"] = r.r2;
    j["adj_r2"] = r.adj_r2;
    j["f_stat"] = r.f_stat;
    j["f_p"] = r.f_p;
    j["sigma2"] = r.sigma2;
    j["coefficients"] = nlohmann::json::array();
    for (Eigen::Index k = 0; k < r.n_params; ++k) {
        j["coefficients"].push_back({{"name", r.names[static_cast<std::size_t>(k)]},
                                     {"beta", r.beta[k]},
                                     {"se", r.se[k]},
                                     {"t", r.t[k]},
                                     {"p", r.p[k]}});
    }
    return j;
}

inline nlohmann::json suite_to_json(const ModelSuiteResult& suite) {
    nlohmann::json j;
    j["dependent"] = dependent_name(suite.dv);
    j["dv_standardized"] = suite.dv_standardized;
    static constexpr std::array<const char*, 4> keys = {"base", "with_fragmentation", "with_diversity", "full"};
    for (std::size_t m = 0; m < 4; ++m) {
        j["models"][keys[m]] = regression_to_json(suite.models[m]);
        j["models"][keys[m]]["adj_r2_delta_vs_base"] = suite.adj_r2_delta_vs_base[m];
    }
    return j;
}

}  // namespace socap

#endif
