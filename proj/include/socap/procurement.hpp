// Contract-level corruption-risk indicators, the C_csb and CRI composites,
// CPV-market reference averages, settlement aggregation, and the
// sample-eligibility filter.
#ifndef SOCAP_PROCUREMENT_HPP
#define SOCAP_PROCUREMENT_HPP

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace socap {

// Calendar date as days since 1970-01-01.
struct Date {
    std::int32_t days = 0;

    friend auto operator<=>(const Date&, const Date&) = default;
    std::int32_t operator-(const Date& o) const { return days - o.days; }

    static Date from_ymd(int y, unsigned m, unsigned d) {
        using namespace std::chrono;
        const year_month_day ymd{year{y}, month{m}, day{d}};
        if (!ymd.ok()) throw std::runtime_error("invalid calendar date");
        return Date{static_cast<std::int32_t>(sys_days(ymd).time_since_epoch().count())};
    }

    // strict ISO-8601 YYYY-MM-DD
    static Date parse_iso(const std::string& s) {
        if (s.size() != 10 || s[4] != '-' || s[7] != '-')
            throw std::runtime_error("bad date '" + s + "' (expected YYYY-MM-DD)");
        auto num = [&](std::size_t pos, std::size_t len) {
            int v = 0;
            for (std::size_t i = pos; i < pos + len; ++i) {
                if (s[i] < '0' || s[i] > '9') throw std::runtime_error("bad date '" + s + "'");
                v = v * 10 + (s[i] - '0');
            }
            return v;
        };
        return from_ymd(num(0, 4), static_cast<unsigned>(num(5, 2)), static_cast<unsigned>(num(8, 2)));
    }

    std::string to_iso() const {
        using namespace std::chrono;
        const year_month_day ymd{sys_days{std::chrono::days{days}}};
        char buf[16];
        std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                      static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
        return buf;
    }
};

enum class ProcedureKind { open_call, direct_award, invite_only };
enum class AwardCriteria { price_only, non_price };

struct ContractRecord {
    std::string contract_id;
    std::string settlement_id;
    std::string cpv_code;
    std::optional<int> n_bidders;
    std::optional<ProcedureKind> procedure_kind;
    std::optional<bool> call_published;
    std::optional<Date> call_date;
    std::optional<Date> submission_deadline;
    std::optional<Date> decision_date;
    std::optional<int> eligibility_criteria_len;
    std::optional<AwardCriteria> award_criteria;
    std::optional<bool> call_modified;

    // call <= submission <= decision for every pair present
    bool dates_ordered() const {
        if (call_date && submission_deadline && *submission_deadline < *call_date) return false;
        if (submission_deadline && decision_date && *decision_date < *submission_deadline) return false;
        if (call_date && decision_date && *decision_date < *call_date) return false;
        return true;
    }
};

enum class Indicator : std::size_t {
    singlebid = 0,
    closedproc,
    nocall,
    eligcrit,
    decidetime,
    bidtime,
    nonprice,
    callmod
};
inline constexpr std::size_t kIndicatorCount = 8;
inline constexpr std::array<const char*, kIndicatorCount> kIndicatorNames = {
    "c_singlebid", "c_closedproc", "c_nocall", "c_eligcrit",
    "c_decidetime", "c_bidtime", "c_nonprice", "c_callmod"};

// Indicator values with per-indicator availability. Binary indicators are
// 0/1; c_bidtime also takes 0.5.
struct IndicatorVector {
    std::array<double, kIndicatorCount> value{};
    std::array<bool, kIndicatorCount> present{};

    double operator[](Indicator i) const { return value[static_cast<std::size_t>(i)]; }
    bool has(Indicator i) const { return present[static_cast<std::size_t>(i)]; }
    void set(Indicator i, double v) {
        value[static_cast<std::size_t>(i)] = v;
        present[static_cast<std::size_t>(i)] = true;
    }
};

enum class CpvGranularity { full_code, division };  // division = 2-digit prefix

// Boundaries are documented defaults, switchable for sensitivity runs:
// decision within [0, decide_fast_max] days of the deadline or strictly more
// than decide_slow_min days flags c_decidetime; bid windows shorter than
// bid_short days score 1, up to bid_medium days (inclusive) score 0.5.
struct ScoringRules {
    int decide_fast_max = 5;
    int decide_slow_min = 100;
    int bid_short = 5;
    int bid_medium = 15;
    CpvGranularity cpv_granularity = CpvGranularity::full_code;
};

inline std::string market_key(const std::string& cpv, CpvGranularity g) {
    if (g == CpvGranularity::division && cpv.size() > 2) return cpv.substr(0, 2);
    return cpv;
}

// Per-CPV-market mean of the eligibility-criteria length, over contracts with
// the field present.
struct MarketStats {
    struct Entry {
        double mean_len = 0.0;
        std::int64_t count = 0;
    };
    std::unordered_map<std::string, Entry> by_market;
    CpvGranularity granularity = CpvGranularity::full_code;

    const Entry* find(const std::string& cpv) const {
        auto it = by_market.find(market_key(cpv, granularity));
        return it == by_market.end() ? nullptr : &it->second;
    }
};

inline MarketStats market_averages(const std::vector<ContractRecord>& contracts,
                                   CpvGranularity granularity = CpvGranularity::full_code) {
    MarketStats m;
    m.granularity = granularity;
    std::unordered_map<std::string, std::pair<double, std::int64_t>> acc;
    for (const auto& c : contracts) {
        if (!c.eligibility_criteria_len) continue;
        auto& [sum, n] = acc[market_key(c.cpv_code, granularity)];
        sum += static_cast<double>(*c.eligibility_criteria_len);
        ++n;
    }
    for (auto& [k, sn] : acc) m.by_market[k] = {sn.first / static_cast<double>(sn.second), sn.second};
    return m;
}

// Scores one contract against Table-1 rules. Indicators whose inputs are
// missing stay masked. Throws on inverted dates; callers exclude and log such
// contracts.
inline IndicatorVector elementary_indicators(const ContractRecord& c, const MarketStats& m,
                                             const ScoringRules& rules = {}) {
    if (!c.dates_ordered()) throw std::runtime_error("contract '" + c.contract_id + "': inverted dates");
    IndicatorVector v;
    if (c.n_bidders) {
        if (*c.n_bidders < 0) throw std::runtime_error("contract '" + c.contract_id + "': negative bidder count");
        v.set(Indicator::singlebid, *c.n_bidders == 1 ? 1.0 : 0.0);
    }
    if (c.procedure_kind) v.set(Indicator::closedproc, *c.procedure_kind != ProcedureKind::open_call ? 1.0 : 0.0);
    if (c.call_published) v.set(Indicator::nocall, *c.call_published ? 0.0 : 1.0);
    if (c.eligibility_criteria_len) {
        const auto* e = m.find(c.cpv_code);
        if (e) v.set(Indicator::eligcrit, static_cast<double>(*c.eligibility_criteria_len) > e->mean_len ? 1.0 : 0.0);
    }
    if (c.decision_date && c.submission_deadline) {
        const int gap = *c.decision_date - *c.submission_deadline;
        v.set(Indicator::decidetime, (gap <= rules.decide_fast_max || gap > rules.decide_slow_min) ? 1.0 : 0.0);
    }
    if (c.call_date && c.submission_deadline) {
        const int window = *c.submission_deadline - *c.call_date;
        double s = 0.0;
        if (window < rules.bid_short)
            s = 1.0;
        else if (window <= rules.bid_medium)
            s = 0.5;
        v.set(Indicator::bidtime, s);
    }
    if (c.award_criteria) v.set(Indicator::nonprice, *c.award_criteria == AwardCriteria::non_price ? 1.0 : 0.0);
    if (c.call_modified) v.set(Indicator::callmod, *c.call_modified ? 1.0 : 0.0);
    return v;
}

// C_csb = max(C_singlebid, C_closedproc); masked when either input is masked.
inline std::optional<double> c_csb(const IndicatorVector& v) {
    if (!v.has(Indicator::singlebid) || !v.has(Indicator::closedproc)) return std::nullopt;
    return std::max(v[Indicator::singlebid], v[Indicator::closedproc]);
}

// impute0: masked indicators count as 0 and the denominator stays 8.
// strict: mean over unmasked indicators only.
enum class MissingMode { impute0, strict };

inline std::optional<double> cri(const IndicatorVector& v, MissingMode mode = MissingMode::impute0) {
    double sum = 0.0;
    int n_present = 0;
    for (std::size_t i = 0; i < kIndicatorCount; ++i) {
        if (v.present[i]) {
            sum += v.value[i];
            ++n_present;
        }
    }
    if (n_present == 0) return std::nullopt;
    if (mode == MissingMode::impute0) return sum / static_cast<double>(kIndicatorCount);
    return sum / static_cast<double>(n_present);
}

struct ScoredContract {
    std::string contract_id;
    std::string settlement_id;
    IndicatorVector indicators;
    std::optional<double> csb;
    std::optional<double> cri_impute0;
    std::optional<double> cri_strict;
};

inline ScoredContract score_contract(const ContractRecord& c, const MarketStats& m,
                                     const ScoringRules& rules = {}) {
    ScoredContract s;
    s.contract_id = c.contract_id;
    s.settlement_id = c.settlement_id;
    s.indicators = elementary_indicators(c, m, rules);
    s.csb = c_csb(s.indicators);
    s.cri_impute0 = cri(s.indicators, MissingMode::impute0);
    s.cri_strict = cri(s.indicators, MissingMode::strict);
    return s;
}

// Settlement means over scored contracts. Contracts whose composite is masked
// are left out of that composite's mean (counts reported).
struct SettlementRisk {
    std::string settlement_id;
    double mean_csb = 0.0;
    double mean_cri = 0.0;         // impute0 mode
    double mean_cri_strict = 0.0;  // strict mode
    std::int64_t n_contracts = 0;
    std::int64_t n_csb = 0;
    std::int64_t n_cri = 0;
};

inline SettlementRisk aggregate_settlement(const std::string& settlement_id,
                                           const std::vector<ScoredContract>& scored) {
    if (scored.empty()) throw std::invalid_argument("aggregate_settlement: no scored contracts");
    SettlementRisk r;
    r.settlement_id = settlement_id;
    double csb_sum = 0.0, cri_sum = 0.0, cri_strict_sum = 0.0;
    std::int64_t n_strict = 0;
    for (const auto& s : scored) {
        ++r.n_contracts;
        if (s.csb) {
            csb_sum += *s.csb;
            ++r.n_csb;
        }
        if (s.cri_impute0) {
            cri_sum += *s.cri_impute0;
            ++r.n_cri;
        }
        if (s.cri_strict) {
            cri_strict_sum += *s.cri_strict;
            ++n_strict;
        }
    }
    r.mean_csb = r.n_csb > 0 ? csb_sum / static_cast<double>(r.n_csb) : std::nan("");
    r.mean_cri = r.n_cri > 0 ? cri_sum / static_cast<double>(r.n_cri) : std::nan("");
    r.mean_cri_strict = n_strict > 0 ? cri_strict_sum / static_cast<double>(n_strict) : std::nan("");
    return r;
}

// Settlements with total_contracts/years >= min_rate, minus the exclusion set
// (the capital in the source setting). Sorted for deterministic iteration.
inline std::vector<std::string> eligibility_filter(const std::vector<ContractRecord>& contracts,
                                                   int years, double min_rate,
                                                   const std::set<std::string>& excluded) {
    if (years < 1) throw std::invalid_argument("eligibility_filter: years must be >= 1");
    std::unordered_map<std::string, std::int64_t> counts;
    for (const auto& c : contracts) ++counts[c.settlement_id];
    std::vector<std::string> out;
    for (const auto& [sid, n] : counts) {
        if (excluded.contains(sid)) continue;
        if (static_cast<double>(n) / static_cast<double>(years) >= min_rate) out.push_back(sid);
    }
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace socap

#endif
