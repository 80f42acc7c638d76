// Regression and test battery: standardization, OLS with classical inference,
// VIF, partial-F feature importances, Mann-Whitney U, Spearman rank
// correlation, and marginal-effect curves.
#ifndef SOCAP_STATS_HPP
#define SOCAP_STATS_HPP

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <boost/math/distributions/fisher_f.hpp>
#include <boost/math/distributions/normal.hpp>
#include <boost/math/distributions/students_t.hpp>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace socap {

inline double student_t_p_two_sided(double t, double dof) {
    if (!std::isfinite(t)) return 0.0;
    boost::math::students_t_distribution<double> dist(dof);
    return 2.0 * boost::math::cdf(boost::math::complement(dist, std::fabs(t)));
}

inline double student_t_quantile(double q, double dof) {
    boost::math::students_t_distribution<double> dist(dof);
    return boost::math::quantile(dist, q);
}

inline double f_p_upper(double f, double d1, double d2) {
    if (!std::isfinite(f)) return 0.0;
    if (f <= 0.0) return 1.0;
    boost::math::fisher_f_distribution<double> dist(d1, d2);
    return boost::math::cdf(boost::math::complement(dist, f));
}

inline double normal_cdf(double z) {
    boost::math::normal_distribution<double> dist;
    return boost::math::cdf(dist, z);
}

inline double normal_quantile(double q) {
    boost::math::normal_distribution<double> dist;
    return boost::math::quantile(dist, q);
}

struct Standardization {
    std::vector<double> mean;
    std::vector<double> sd;  // sample sd, n-1 denominator
};

// (x - mean)/sd per column, in place. Throws naming the first zero-variance
// column.
inline Standardization standardize_columns(Eigen::MatrixXd& X, const std::vector<std::string>& names) {
    const Eigen::Index n = X.rows(), p = X.cols();
    if (n < 2) throw std::invalid_argument("standardize: need at least 2 rows");
    Standardization s;
    s.mean.resize(static_cast<std::size_t>(p));
    s.sd.resize(static_cast<std::size_t>(p));
    for (Eigen::Index j = 0; j < p; ++j) {
        const double mu = X.col(j).mean();
        const double var = (X.col(j).array() - mu).square().sum() / static_cast<double>(n - 1);
        const double sd = std::sqrt(var);
        if (!(sd > 0.0)) {
            const std::string name = static_cast<std::size_t>(j) < names.size()
                                         ? names[static_cast<std::size_t>(j)]
                                         : "column " + std::to_string(j);
            throw std::runtime_error("standardize: zero-variance column '" + name + "'");
        }
        X.col(j) = (X.col(j).array() - mu) / sd;
        s.mean[static_cast<std::size_t>(j)] = mu;
        s.sd[static_cast<std::size_t>(j)] = sd;
    }
    return s;
}

struct RegressionResult {
    std::vector<std::string> names;  // column names, intercept first
    Eigen::VectorXd beta;
    Eigen::VectorXd se;
    Eigen::VectorXd t;
    Eigen::VectorXd p;
    Eigen::MatrixXd cov;  // coefficient covariance, sigma2 * (X'X)^-1
    Eigen::VectorXd residuals;
    double r2 = 0.0;
    double adj_r2 = 0.0;
    double f_stat = std::numeric_limits<double>::quiet_NaN();
    double f_p = std::numeric_limits<double>::quiet_NaN();
    double sigma2 = 0.0;  // residual variance, RSS/(n-p)
    double rss = 0.0;
    Eigen::Index n = 0;
    Eigen::Index n_params = 0;  // including intercept
    Eigen::Index df_resid = 0;
};

// OLS via column-pivoted Householder QR; classical homoskedastic standard
// errors. X must contain the intercept as its first column. Rank deficiency
// raises an error listing the dependent columns.
inline RegressionResult ols_fit(const Eigen::VectorXd& y, const Eigen::MatrixXd& X,
                                std::vector<std::string> names = {}) {
    const Eigen::Index n = X.rows(), p = X.cols();
    if (y.size() != n) throw std::invalid_argument("ols_fit: y and X row counts differ");
    if (n <= p) throw std::invalid_argument("ols_fit: need more observations than parameters");
    if (names.empty()) {
        names.reserve(static_cast<std::size_t>(p));
        for (Eigen::Index j = 0; j < p; ++j)
            names.push_back(j == 0 ? "const" : "x" + std::to_string(j));
    }
    if (static_cast<Eigen::Index>(names.size()) != p)
        throw std::invalid_argument("ols_fit: name count does not match columns");

    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(X);
    qr.setThreshold(1e-10);
    if (qr.rank() < p) {
        const auto& perm = qr.colsPermutation().indices();
        std::string dep;
        for (Eigen::Index k = qr.rank(); k < p; ++k) {
            if (!dep.empty()) dep += ", ";
            dep += names[static_cast<std::size_t>(perm[k])];
        }
        throw std::runtime_error("ols_fit: design matrix is rank deficient; dependent columns: " + dep);
    }

    RegressionResult r;
    r.names = std::move(names);
    r.n = n;
    r.n_params = p;
    r.df_resid = n - p;
    r.beta = qr.solve(y);
    r.residuals = y - X * r.beta;
    r.rss = r.residuals.squaredNorm();
    r.sigma2 = r.rss / static_cast<double>(r.df_resid);

    // (X'X)^-1 = P R^-1 R^-T P' from the pivoted factorization X P = Q R
    const Eigen::MatrixXd R = qr.matrixQR().topLeftCorner(p, p).template triangularView<Eigen::Upper>();
    const Eigen::MatrixXd Rinv =
        R.template triangularView<Eigen::Upper>().solve(Eigen::MatrixXd::Identity(p, p));
    const Eigen::MatrixXd xtx_inv_perm = Rinv * Rinv.transpose();
    const auto P = qr.colsPermutation();
    r.cov = r.sigma2 * (P * xtx_inv_perm * P.transpose());

    r.se.resize(p);
    r.t.resize(p);
    r.p.resize(p);
    for (Eigen::Index j = 0; j < p; ++j) {
        r.se[j] = std::sqrt(r.cov(j, j));
        r.t[j] = r.beta[j] / r.se[j];
        r.p[j] = student_t_p_two_sided(r.t[j], static_cast<double>(r.df_resid));
    }

    const double ybar = y.mean();
    const double tss = (y.array() - ybar).square().sum();
    r.r2 = tss > 0.0 ? 1.0 - r.rss / tss : 0.0;
    r.adj_r2 = 1.0 - (1.0 - r.r2) * static_cast<double>(n - 1) / static_cast<double>(n - p);
    if (p > 1) {
        const double k = static_cast<double>(p - 1);
        r.f_stat = ((tss - r.rss) / k) / (r.rss / static_cast<double>(r.df_resid));
        r.f_p = f_p_upper(r.f_stat, k, static_cast<double>(r.df_resid));
    }
    return r;
}

struct VifReport {
    std::vector<std::string> names;
    std::vector<double> vif;  // +inf marks perfect collinearity
};

// VIF_j = 1/(1 - R2_j) from regressing predictor j on the remaining
// predictors (plus intercept). X holds predictors only, no intercept column.
inline VifReport vif(const Eigen::MatrixXd& X, std::vector<std::string> names = {}) {
    const Eigen::Index n = X.rows(), p = X.cols();
    if (p < 2) throw std::invalid_argument("vif: need at least 2 predictors");
    if (n <= p) throw std::invalid_argument("vif: need more observations than predictors");
    if (names.empty())
        for (Eigen::Index j = 0; j < p; ++j) names.push_back("x" + std::to_string(j + 1));

    VifReport rep;
    rep.names = std::move(names);
    rep.vif.resize(static_cast<std::size_t>(p));
    Eigen::MatrixXd aux(n, p);  // [1, others]
    aux.col(0).setOnes();
    for (Eigen::Index j = 0; j < p; ++j) {
        Eigen::Index at = 1;
        for (Eigen::Index k = 0; k < p; ++k)
            if (k != j) aux.col(at++) = X.col(k);
        const Eigen::VectorXd yj = X.col(j);
        const Eigen::VectorXd beta = aux.colPivHouseholderQr().solve(yj);
        const double rss = (yj - aux * beta).squaredNorm();
        const double tss = (yj.array() - yj.mean()).square().sum();
        if (tss <= 0.0) throw std::runtime_error("vif: constant predictor '" + rep.names[static_cast<std::size_t>(j)] + "'");
        const double r2 = 1.0 - rss / tss;
        const double denom = 1.0 - r2;
        rep.vif[static_cast<std::size_t>(j)] =
            denom < 1e-12 ? std::numeric_limits<double>::infinity() : 1.0 / denom;
    }
    return rep;
}

struct FeatureImportance {
    std::string name;
    double f = 0.0;
    double p = 1.0;
    bool significant = false;  // p < 0.05
};

// Partial (Type-II-style, order-independent) F test per non-intercept column:
// full model vs the model with that column removed, ranked by F descending.
inline std::vector<FeatureImportance> anova_f_importance(const Eigen::VectorXd& y,
                                                         const Eigen::MatrixXd& X,
                                                         const std::vector<std::string>& names) {
    const RegressionResult full = ols_fit(y, X, names);
    const Eigen::Index n = X.rows(), p = X.cols();
    std::vector<FeatureImportance> out;
    Eigen::MatrixXd reduced(n, p - 1);
    for (Eigen::Index j = 1; j < p; ++j) {
        Eigen::Index at = 0;
        for (Eigen::Index k = 0; k < p; ++k)
            if (k != j) reduced.col(at++) = X.col(k);
        const Eigen::VectorXd beta = reduced.colPivHouseholderQr().solve(y);
        const double rss_reduced = (y - reduced * beta).squaredNorm();
        FeatureImportance fi;
        fi.name = names[static_cast<std::size_t>(j)];
        fi.f = (rss_reduced - full.rss) / (full.rss / static_cast<double>(full.df_resid));
        fi.p = f_p_upper(fi.f, 1.0, static_cast<double>(full.df_resid));
        fi.significant = fi.p < 0.05;
        out.push_back(std::move(fi));
    }
    std::stable_sort(out.begin(), out.end(),
                     [](const FeatureImportance& a, const FeatureImportance& b) { return a.f > b.f; });
    return out;
}

// Midranks (average rank for ties), 1-based.
inline std::vector<double> midranks(const std::vector<double>& x) {
    const std::size_t n = x.size();
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
    std::vector<double> rank(n);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && x[idx[j + 1]] == x[idx[i]]) ++j;
        const double r = 0.5 * static_cast<double>(i + j) + 1.0;
        for (std::size_t k = i; k <= j; ++k) rank[idx[k]] = r;
        i = j + 1;
    }
    return rank;
}

struct MwuResult {
    double u = 0.0;  // U statistic for the first sample
    double p = 1.0;  // two-sided
    std::size_t n1 = 0, n2 = 0;
    enum class Method { exact, normal_approx } method = Method::normal_approx;
    double z = 0.0;  // set for the normal approximation
};

namespace detail {

// Exact two-sided p by enumerating all C(N, n1) rank assignments (tie-free
// designs only): P(|U - n1 n2/2| >= |u_obs - n1 n2/2|) under the null.
inline double mwu_exact_two_sided(std::size_t n1, std::size_t n2, std::int64_t u_obs) {
    const std::size_t N = n1 + n2;
    const std::int64_t two_mu = static_cast<std::int64_t>(n1) * static_cast<std::int64_t>(n2);
    const std::int64_t d_obs = std::llabs(2 * u_obs - two_mu);
    std::vector<std::size_t> comb(n1);
    std::iota(comb.begin(), comb.end(), 0);
    std::uint64_t total = 0, extreme = 0;
    bool more = true;
    while (more) {
        std::int64_t rank_sum = 0;
        for (std::size_t c : comb) rank_sum += static_cast<std::int64_t>(c) + 1;
        const std::int64_t u = rank_sum - static_cast<std::int64_t>(n1 * (n1 + 1) / 2);
        ++total;
        if (std::llabs(2 * u - two_mu) >= d_obs) ++extreme;
        more = false;
        for (std::size_t k = n1; k-- > 0;) {
            if (comb[k] != k + N - n1) {
                ++comb[k];
                for (std::size_t j = k + 1; j < n1; ++j) comb[j] = comb[j - 1] + 1;
                more = true;
                break;
            }
        }
    }
    return static_cast<double>(extreme) / static_cast<double>(total);
}

}  // namespace detail

// Mann-Whitney U with midrank tie handling. Exact enumeration for tie-free
// designs with n1+n2 <= 12; otherwise normal approximation with tie-corrected
// variance and continuity correction.
inline MwuResult mann_whitney_u(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.empty() || b.empty()) throw std::invalid_argument("mann_whitney_u: empty sample");
    const std::size_t n1 = a.size(), n2 = b.size(), N = n1 + n2;
    std::vector<double> pooled;
    pooled.reserve(N);
    pooled.insert(pooled.end(), a.begin(), a.end());
    pooled.insert(pooled.end(), b.begin(), b.end());
    const std::vector<double> rank = midranks(pooled);
    double rank_sum_a = 0.0;
    for (std::size_t i = 0; i < n1; ++i) rank_sum_a += rank[i];
    const double u = rank_sum_a - static_cast<double>(n1 * (n1 + 1)) / 2.0;

    MwuResult r;
    r.u = u;
    r.n1 = n1;
    r.n2 = n2;

    // tie census over the pooled sample
    std::vector<double> sorted = pooled;
    std::sort(sorted.begin(), sorted.end());
    bool has_ties = false;
    double tie_term = 0.0;
    std::size_t i = 0;
    while (i < N) {
        std::size_t j = i;
        while (j + 1 < N && sorted[j + 1] == sorted[i]) ++j;
        const double t = static_cast<double>(j - i + 1);
        if (t > 1.0) {
            has_ties = true;
            tie_term += t * t * t - t;
        }
        i = j + 1;
    }

    if (N <= 12 && !has_ties) {
        r.method = MwuResult::Method::exact;
        r.p = detail::mwu_exact_two_sided(n1, n2, static_cast<std::int64_t>(std::llround(u)));
        return r;
    }

    const double mu = static_cast<double>(n1) * static_cast<double>(n2) / 2.0;
    const double var = (static_cast<double>(n1) * static_cast<double>(n2) / 12.0) *
                       (static_cast<double>(N + 1) -
                        tie_term / (static_cast<double>(N) * static_cast<double>(N - 1)));
    r.method = MwuResult::Method::normal_approx;
    if (var <= 0.0) {  // every observation tied
        r.z = 0.0;
        r.p = 1.0;
        return r;
    }
    const double d = u - mu;
    const double num = std::max(0.0, std::fabs(d) - 0.5);  // continuity correction
    r.z = d == 0.0 ? 0.0 : (d > 0 ? num : -num) / std::sqrt(var);
    r.p = std::min(1.0, 2.0 * (1.0 - normal_cdf(std::fabs(r.z))));
    return r;
}

// Pearson correlation of midranks; nullopt when either vector is constant.
inline std::optional<double> spearman_rho(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size()) throw std::invalid_argument("spearman_rho: length mismatch");
    if (x.size() < 3) throw std::invalid_argument("spearman_rho: need at least 3 observations");
    const std::vector<double> rx = midranks(x), ry = midranks(y);
    const double mx = std::accumulate(rx.begin(), rx.end(), 0.0) / static_cast<double>(rx.size());
    const double my = std::accumulate(ry.begin(), ry.end(), 0.0) / static_cast<double>(ry.size());
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < rx.size(); ++i) {
        const double dx = rx[i] - mx, dy = ry[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx <= 0.0 || syy <= 0.0) return std::nullopt;
    return sxy / std::sqrt(sxx * syy);
}

struct MarginalCurve {
    std::string feature;
    std::vector<double> grid;
    std::vector<double> predicted;
    std::vector<double> lo, hi;
    double level = 0.90;
};

// Model-predicted outcome as one standardized feature moves over the grid
// with every other feature held at 0 (its standardized mean). Pointwise
// normal-quantile bands from the coefficient covariance of the linear
// predictor.
inline MarginalCurve marginal_effects(const RegressionResult& fit, const std::string& feature,
                                      const std::vector<double>& grid, double level = 0.90) {
    Eigen::Index j = -1;
    for (Eigen::Index k = 1; k < fit.n_params; ++k)
        if (fit.names[static_cast<std::size_t>(k)] == feature) {
            j = k;
            break;
        }
    if (j < 0) throw std::invalid_argument("marginal_effects: feature '" + feature + "' not in model");
    const double zq = normal_quantile(0.5 + level / 2.0);
    MarginalCurve c;
    c.feature = feature;
    c.grid = grid;
    c.level = level;
    for (double g : grid) {
        const double pred = fit.beta[0] + g * fit.beta[j];
        const double var = fit.cov(0, 0) + g * g * fit.cov(j, j) + 2.0 * g * fit.cov(0, j);
        const double half = zq * std::sqrt(std::max(0.0, var));
        c.predicted.push_back(pred);
        c.lo.push_back(pred - half);
        c.hi.push_back(pred + half);
    }
    return c;
}

// One joined settlement observation: dependent risk means, the two network
// measures, and the control battery.
inline constexpr std::array<const char*, 11> kControlNames = {
    "income_per_capita", "log_n_contracts",     "log_population", "iwiw_use_rate",
    "mayor_victory_margin", "pct_hs_grads",     "distance_to_capital_minutes",
    "share_inactive",     "unemployment_rate",  "share_over_60",  "has_university"};

struct SettlementRow {
    std::string settlement_id;
    double mean_csb = 0.0;
    double mean_cri = 0.0;
    double fragmentation = 0.0;
    double diversity = 0.0;
    std::array<double, 11> controls{};
};

enum class DependentVariable { mean_csb, mean_cri };

inline const char* dependent_name(DependentVariable dv) {
    return dv == DependentVariable::mean_csb ? "mean_csb" : "mean_cri";
}

struct ModelSuiteResult {
    DependentVariable dv = DependentVariable::mean_csb;
    bool dv_standardized = false;
    // base (controls only), +fragmentation, +diversity, full
    std::array<RegressionResult, 4> models;
    std::array<double, 4> adj_r2{};
    std::array<double, 4> adj_r2_delta_vs_base{};
    Standardization predictor_std;           // over [fragmentation, diversity, controls...]
    std::vector<std::string> predictor_names;
    double dv_mean = 0.0, dv_sd = 1.0;       // identity transform unless dv_standardized
};

// The Table-2 battery for one dependent variable: controls-only, adding
// fragmentation, adding diversity, and the full model. Predictors are
// standardized over the sample; the dependent variable only when asked.
inline ModelSuiteResult model_suite(const std::vector<SettlementRow>& rows, DependentVariable dv,
                                    bool standardize_dv = false) {
    const Eigen::Index n = static_cast<Eigen::Index>(rows.size());
    const Eigen::Index n_controls = static_cast<Eigen::Index>(kControlNames.size());
    // full model has 1 + 2 + n_controls parameters; require n >= p + 2
    if (n < n_controls + 5) throw std::invalid_argument("model_suite: too few rows for the model battery");

    ModelSuiteResult out;
    out.dv = dv;
    out.dv_standardized = standardize_dv;
    out.predictor_names = {"fragmentation", "diversity"};
    for (const char* c : kControlNames) out.predictor_names.emplace_back(c);

    Eigen::MatrixXd Z(n, 2 + n_controls);
    Eigen::VectorXd y(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto& r = rows[static_cast<std::size_t>(i)];
        Z(i, 0) = r.fragmentation;
        Z(i, 1) = r.diversity;
        for (Eigen::Index j = 0; j < n_controls; ++j) Z(i, 2 + j) = r.controls[static_cast<std::size_t>(j)];
        y[i] = dv == DependentVariable::mean_csb ? r.mean_csb : r.mean_cri;
    }
    out.predictor_std = standardize_columns(Z, out.predictor_names);
    if (standardize_dv) {
        out.dv_mean = y.mean();
        const double var = (y.array() - out.dv_mean).square().sum() / static_cast<double>(n - 1);
        out.dv_sd = std::sqrt(var);
        if (!(out.dv_sd > 0.0)) throw std::runtime_error("model_suite: dependent variable is constant");
        y = (y.array() - out.dv_mean) / out.dv_sd;
    }

    auto assemble = [&](bool with_f, bool with_d) {
        std::vector<std::string> names{"const"};
        Eigen::Index p = 1 + n_controls + (with_f ? 1 : 0) + (with_d ? 1 : 0);
        Eigen::MatrixXd X(n, p);
        X.col(0).setOnes();
        Eigen::Index at = 1;
        if (with_f) {
            X.col(at++) = Z.col(0);
            names.emplace_back("fragmentation");
        }
        if (with_d) {
            X.col(at++) = Z.col(1);
            names.emplace_back("diversity");
        }
        for (Eigen::Index j = 0; j < n_controls; ++j) {
            X.col(at++) = Z.col(2 + j);
            names.emplace_back(kControlNames[static_cast<std::size_t>(j)]);
        }
        return ols_fit(y, X, std::move(names));
    };

    out.models[0] = assemble(false, false);
    out.models[1] = assemble(true, false);
    out.models[2] = assemble(false, true);
    out.models[3] = assemble(true, true);
    for (std::size_t m = 0; m < 4; ++m) {
        out.adj_r2[m] = out.models[m].adj_r2;
        out.adj_r2_delta_vs_base[m] = out.models[m].adj_r2 - out.models[0].adj_r2;
    }
    return out;
}

}  // namespace socap

#endif
