// Ground-truth generators: planted-partition town networks, a whole synthetic
// country with cross-town wiring, contract corpora with known indicator
// rates, and control tables with planted regression coefficients.
#ifndef SOCAP_SYNTH_HPP
#define SOCAP_SYNTH_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "socap/graph.hpp"
#include "socap/io.hpp"
#include "socap/measures.hpp"
#include "socap/parallel.hpp"
#include "socap/procurement.hpp"
#include "socap/rng.hpp"
#include "socap/stats.hpp"

namespace socap {

struct TownSpec {
    std::string id;
    int n_users = 100;
    int k_blocks = 4;
    double p_in = 0.2;
    double p_out = 0.01;
    double cross_town_rate = 0.3;  // probability per cross-pod attempt
    std::uint64_t seed = 1;

    void validate() const {
        if (n_users < 1) throw std::invalid_argument("town spec: n_users must be >= 1");
        if (k_blocks < 1 || k_blocks > n_users) throw std::invalid_argument("town spec: invalid block count");
        if (p_in < 0.0 || p_in > 1.0 || p_out < 0.0 || p_out > 1.0 || p_out > p_in)
            throw std::invalid_argument("town spec: need 0 <= p_out <= p_in <= 1");
        if (cross_town_rate < 0.0 || cross_town_rate > 1.0)
            throw std::invalid_argument("town spec: cross_town_rate outside [0,1]");
    }
};

struct TownDraw {
    std::vector<std::pair<std::int32_t, std::int32_t>> edges;  // local user indices
    std::vector<std::int32_t> block;                           // planted label per user
};

namespace detail {

// Emits the pair indices of a G(m, p) draw via geometric skipping.
template <typename Emit>
void sample_bernoulli_indices(std::uint64_t m, double p, Rng& rng, Emit&& emit) {
    if (p <= 0.0 || m == 0) return;
    if (p >= 1.0) {
        for (std::uint64_t t = 0; t < m; ++t) emit(t);
        return;
    }
    std::uint64_t t = rng.next_geometric_skip(p);
    while (t < m) {
        emit(t);
        t += 1 + rng.next_geometric_skip(p);
    }
}

// t-th pair (i < j) of an n-set, ordered (0,1),(0,2),(1,2),(0,3),...
inline std::pair<std::int32_t, std::int32_t> decode_pair(std::uint64_t t) {
    auto j = static_cast<std::uint64_t>((1.0 + std::sqrt(1.0 + 8.0 * static_cast<double>(t))) / 2.0);
    while (j * (j - 1) / 2 > t) --j;
    while ((j + 1) * j / 2 <= t) ++j;
    return {static_cast<std::int32_t>(t - j * (j - 1) / 2), static_cast<std::int32_t>(j)};
}

}  // namespace detail

// Stochastic block model draw with contiguous equal-size blocks (remainder
// spread over the first blocks). Deterministic per spec.seed; planted labels
// retained for agreement scoring.
inline TownDraw generate_town(const TownSpec& spec) {
    spec.validate();
    TownDraw d;
    const int n = spec.n_users, k = spec.k_blocks;
    d.block.resize(static_cast<std::size_t>(n));
    std::vector<std::int32_t> start(static_cast<std::size_t>(k) + 1, 0);
    for (int b = 0; b < k; ++b) start[static_cast<std::size_t>(b) + 1] = start[static_cast<std::size_t>(b)] + n / k + (b < n % k ? 1 : 0);
    for (int b = 0; b < k; ++b)
        for (std::int32_t v = start[static_cast<std::size_t>(b)]; v < start[static_cast<std::size_t>(b) + 1]; ++v)
            d.block[static_cast<std::size_t>(v)] = b;

    Rng rng(spec.seed);
    for (int b = 0; b < k; ++b) {
        const std::int64_t s = start[static_cast<std::size_t>(b) + 1] - start[static_cast<std::size_t>(b)];
        const std::uint64_t pairs = static_cast<std::uint64_t>(s) * static_cast<std::uint64_t>(s - 1) / 2;
        detail::sample_bernoulli_indices(pairs, spec.p_in, rng, [&](std::uint64_t t) {
            auto [i, j] = detail::decode_pair(t);
            d.edges.emplace_back(start[static_cast<std::size_t>(b)] + i, start[static_cast<std::size_t>(b)] + j);
        });
    }
    for (int a = 0; a < k; ++a) {
        const std::int64_t sa = start[static_cast<std::size_t>(a) + 1] - start[static_cast<std::size_t>(a)];
        for (int b = a + 1; b < k; ++b) {
            const std::int64_t sb = start[static_cast<std::size_t>(b) + 1] - start[static_cast<std::size_t>(b)];
            detail::sample_bernoulli_indices(static_cast<std::uint64_t>(sa) * static_cast<std::uint64_t>(sb),
                                             spec.p_out, rng, [&](std::uint64_t t) {
                const auto i = static_cast<std::int32_t>(t / static_cast<std::uint64_t>(sb));
                const auto j = static_cast<std::int32_t>(t % static_cast<std::uint64_t>(sb));
                d.edges.emplace_back(start[static_cast<std::size_t>(a)] + i, start[static_cast<std::size_t>(b)] + j);
            });
        }
    }
    return d;
}

// Single-town SocialGraph with ids "<town>_u<i>".
inline SocialGraph town_graph(const TownSpec& spec, const TownDraw& draw) {
    std::vector<std::pair<NodeId, SettlementId>> attr;
    attr.reserve(static_cast<std::size_t>(spec.n_users));
    for (int i = 0; i < spec.n_users; ++i) attr.emplace_back(spec.id + "_u" + std::to_string(i), spec.id);
    std::vector<std::pair<NodeId, NodeId>> edges;
    edges.reserve(draw.edges.size());
    for (auto [a, b] : draw.edges)
        edges.emplace_back(attr[static_cast<std::size_t>(a)].first, attr[static_cast<std::size_t>(b)].first);
    return SocialGraph::build(edges, attr);
}

// Per-indicator generation rates; the contract metadata is constructed so
// that Table-1 scoring reproduces the drawn indicator values exactly.
struct ContractGenSpec {
    std::array<double, kIndicatorCount> rates{};
    bool couple_csb = true;      // singlebid and closedproc share one uniform draw
    double missing_rate = 0.0;   // chance of masking each optional field group
};

namespace detail {

inline ContractRecord draw_contract(const std::string& id, const std::string& settlement,
                                    const ContractGenSpec& gen, Rng& rng) {
    ContractRecord c;
    c.contract_id = id;
    c.settlement_id = settlement;
    static constexpr std::array<const char*, 3> cpv_pool = {"45000000", "72000000", "33600000"};
    c.cpv_code = cpv_pool[rng.next_below(cpv_pool.size())];

    auto rate = [&](Indicator i) { return gen.rates[static_cast<std::size_t>(i)]; };
    bool singlebid, closedproc;
    if (gen.couple_csb) {
        const double u = rng.next_double();
        singlebid = u < rate(Indicator::singlebid);
        closedproc = u < rate(Indicator::closedproc);
    } else {
        singlebid = rng.next_bernoulli(rate(Indicator::singlebid));
        closedproc = rng.next_bernoulli(rate(Indicator::closedproc));
    }
    const bool nocall = rng.next_bernoulli(rate(Indicator::nocall));
    const bool eligcrit = rng.next_bernoulli(rate(Indicator::eligcrit));
    const bool decidetime = rng.next_bernoulli(rate(Indicator::decidetime));
    const bool nonprice = rng.next_bernoulli(rate(Indicator::nonprice));
    const bool callmod = rng.next_bernoulli(rate(Indicator::callmod));
    // bidtime in {0, 0.5, 1} with mean r: P(1) = r(1+r)/2, P(0.5) = r(1-r)
    const double rb = rate(Indicator::bidtime);
    const double ub = rng.next_double();
    int window;
    if (ub < 0.5 * rb * (1.0 + rb))
        window = 3;  // scores 1
    else if (ub < 0.5 * rb * (1.0 + rb) + rb * (1.0 - rb))
        window = 10;  // scores 0.5
    else
        window = 20;  // scores 0

    c.n_bidders = singlebid ? 1 : 2 + static_cast<int>(rng.next_below(5));
    c.procedure_kind = closedproc
                           ? (rng.next_bernoulli(0.5) ? ProcedureKind::direct_award : ProcedureKind::invite_only)
                           : ProcedureKind::open_call;
    c.call_published = !nocall;
    c.eligibility_criteria_len = eligcrit ? 300 : 100;
    c.award_criteria = nonprice ? AwardCriteria::non_price : AwardCriteria::price_only;
    c.call_modified = callmod;
    const Date base = Date::from_ymd(2006, 1, 1);
    const auto offset = static_cast<std::int32_t>(rng.next_below(static_cast<std::uint64_t>(9 * 365 - 200)));
    c.call_date = Date{base.days + offset};
    c.submission_deadline = Date{c.call_date->days + window};
    c.decision_date = Date{c.submission_deadline->days + (decidetime ? 3 : 30)};

    if (gen.missing_rate > 0.0) {
        if (rng.next_bernoulli(gen.missing_rate)) c.n_bidders.reset();
        if (rng.next_bernoulli(gen.missing_rate)) c.procedure_kind.reset();
        if (rng.next_bernoulli(gen.missing_rate)) c.call_published.reset();
        if (rng.next_bernoulli(gen.missing_rate)) c.eligibility_criteria_len.reset();
        if (rng.next_bernoulli(gen.missing_rate)) c.award_criteria.reset();
        if (rng.next_bernoulli(gen.missing_rate)) c.call_modified.reset();
        if (rng.next_bernoulli(gen.missing_rate)) c.call_date.reset();
        if (rng.next_bernoulli(gen.missing_rate)) c.decision_date.reset();
    }
    return c;
}

}  // namespace detail

// Contracts for one settlement with the given per-indicator rates.
inline std::vector<ContractRecord> generate_contracts(const std::string& settlement, int count,
                                                      const ContractGenSpec& gen, std::uint64_t seed) {
    for (double r : gen.rates)
        if (r < 0.0 || r > 1.0) throw std::invalid_argument("contract rates must lie in [0,1]");
    Rng rng(seed);
    std::vector<ContractRecord> out;
    out.reserve(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i)
        out.push_back(detail::draw_contract(settlement + "_c" + std::to_string(i), settlement, gen, rng));
    return out;
}

struct CountrySpec {
    int n_towns = 150;
    int users_min = 150, users_max = 400;
    int blocks_min = 2, blocks_max = 6;
    double p_in_min = 0.08, p_in_max = 0.30;
    double p_out_min = 0.004, p_out_max = 0.02;
    double cross_rate_min = 0.05, cross_rate_max = 0.9;
    int cross_pod_size = 4;   // alters linked per cross-town pod
    int cross_pods_max = 4;   // pod attempts per user
    double beta_f = 0.25;     // planted, standardized scales
    double beta_d = -0.55;
    std::array<double, 11> theta{-0.15, 0.0, 0.0, 0.0, 0.20, 0.0, 0.0, -0.25, 0.15, 0.0, 0.0};
    double noise_sd = 0.6;
    double risk_scale = 0.08;  // rate units per standardized-scale unit
    double base_rate = 0.40;
    int years = 9;
    int contracts_min = 55, contracts_max = 120;
    bool graph_only = false;  // skip measurement/contracts/controls
    std::uint64_t seed = 1;
};

struct GroundTruthRow {
    std::string settlement_id;
    double f = 0.0;
    double d = 0.0;
    double d_internal = 0.0;
    double rate = 0.0;  // target mean risk in CRI units
    int n_contracts = 0;
};

struct CountryData {
    std::vector<std::pair<NodeId, NodeId>> edges;
    std::vector<std::pair<NodeId, SettlementId>> attribution;
    SocialGraph graph;
    std::vector<ContractRecord> contracts;
    std::vector<ControlRow> controls;
    std::vector<GroundTruthRow> truth;
    double beta_f_std = 0.0, beta_d_std = 0.0;
    double beta_f_raw = 0.0, beta_d_raw = 0.0;  // rate units per sd of the measure
};

// Full synthetic country: SBM towns wired with cross-town pods, per-town
// contract rates linear in the standardized *measured* fragmentation and
// diversity (plus planted control effects and gaussian noise). Every latent
// quantity is exported. The emitted files replayed through the pipeline with
// the same seed reproduce the measures exactly.
inline CountryData generate_country(const CountrySpec& spec, unsigned threads = 0) {
    if (spec.n_towns < 1) throw std::invalid_argument("country spec: need at least one town");
    if (spec.contracts_min < 1 || spec.contracts_max < spec.contracts_min)
        throw std::invalid_argument("country spec: bad contract count range");

    CountryData out;
    out.beta_f_std = spec.beta_f;
    out.beta_d_std = spec.beta_d;
    out.beta_f_raw = spec.risk_scale * spec.beta_f;
    out.beta_d_raw = spec.risk_scale * spec.beta_d;

    // per-town specs from per-town derived streams
    std::vector<TownSpec> towns(static_cast<std::size_t>(spec.n_towns));
    for (int t = 0; t < spec.n_towns; ++t) {
        Rng rng = derive_rng(spec.seed, "town-params", static_cast<std::uint64_t>(t));
        TownSpec& ts = towns[static_cast<std::size_t>(t)];
        ts.id = "T" + std::to_string(t);
        ts.n_users = static_cast<int>(rng.next_int(spec.users_min, spec.users_max));
        ts.k_blocks = static_cast<int>(rng.next_int(spec.blocks_min, spec.blocks_max));
        ts.p_in = spec.p_in_min + (spec.p_in_max - spec.p_in_min) * rng.next_double();
        ts.p_out = spec.p_out_min + (spec.p_out_max - spec.p_out_min) * rng.next_double();
        if (ts.p_out > ts.p_in) ts.p_out = ts.p_in;
        ts.cross_town_rate = spec.cross_rate_min + (spec.cross_rate_max - spec.cross_rate_min) * rng.next_double();
        ts.seed = derive_seed(spec.seed, "town-draw", static_cast<std::uint64_t>(t));
    }

    std::vector<TownDraw> draws(towns.size());
    parallel_for(towns.size(), threads, [&](std::size_t t) { draws[t] = generate_town(towns[t]); });

    std::vector<std::int32_t> town_offset(towns.size() + 1, 0);
    for (std::size_t t = 0; t < towns.size(); ++t)
        town_offset[t + 1] = town_offset[t] + towns[t].n_users;
    const std::int32_t total_users = town_offset.back();

    out.attribution.reserve(static_cast<std::size_t>(total_users));
    for (std::size_t t = 0; t < towns.size(); ++t)
        for (int i = 0; i < towns[t].n_users; ++i)
            out.attribution.emplace_back(towns[t].id + "_u" + std::to_string(i), towns[t].id);

    for (std::size_t t = 0; t < towns.size(); ++t)
        for (auto [a, b] : draws[t].edges)
            out.edges.emplace_back(out.attribution[static_cast<std::size_t>(town_offset[t] + a)].first,
                                   out.attribution[static_cast<std::size_t>(town_offset[t] + b)].first);

    // cross-town pods: per user, a seeded number of pods; each pod links the
    // user to several members of one block of another town, so bridging egos
    // see multiple dense remote clusters
    if (towns.size() > 1) {
        std::vector<std::vector<std::pair<std::int32_t, std::int32_t>>> cross(towns.size());
        parallel_for(towns.size(), threads, [&](std::size_t t) {
            for (int i = 0; i < towns[t].n_users; ++i) {
                const std::int32_t u = town_offset[t] + i;
                Rng rng = derive_rng(spec.seed, "cross", static_cast<std::uint64_t>(u));
                for (int a = 0; a < spec.cross_pods_max; ++a) {
                    if (!rng.next_bernoulli(towns[t].cross_town_rate)) continue;
                    std::size_t other = rng.next_below(towns.size() - 1);
                    if (other >= t) ++other;
                    const auto& od = draws[other];
                    const int on = towns[other].n_users;
                    const std::int32_t anchor = static_cast<std::int32_t>(rng.next_below(static_cast<std::uint64_t>(on)));
                    const std::int32_t ablock = od.block[static_cast<std::size_t>(anchor)];
                    // members of the anchor's block, scanned from the anchor
                    int linked = 0;
                    for (int step = 0; step < on && linked < spec.cross_pod_size; ++step) {
                        const std::int32_t v = (anchor + step) % on;
                        if (od.block[static_cast<std::size_t>(v)] == ablock) {
                            cross[t].emplace_back(u, town_offset[other] + v);
                            ++linked;
                        }
                    }
                }
            }
        });
        for (auto& ce : cross)
            for (auto [a, b] : ce)
                out.edges.emplace_back(out.attribution[static_cast<std::size_t>(a)].first,
                                       out.attribution[static_cast<std::size_t>(b)].first);
    }

    out.graph = SocialGraph::build(out.edges, out.attribution);
    if (spec.graph_only) return out;

    std::vector<SettlementId> ids;
    ids.reserve(towns.size());
    for (const auto& t : towns) ids.push_back(t.id);
    const std::vector<MeasureRow> measured = compute_measures(out.graph, ids, spec.seed,
                                                              CrossingEdgeRule::per_group,
                                                              DiversityInclusion::exclude_degenerate, threads);

    // controls and planted linear link on standardized scales
    const std::size_t T = towns.size();
    out.controls.resize(T);
    std::vector<int> n_contracts(T);
    for (std::size_t t = 0; t < T; ++t) {
        Rng rng = derive_rng(spec.seed, "controls", static_cast<std::uint64_t>(t));
        auto& cr = out.controls[t];
        cr.settlement_id = towns[t].id;
        cr.values[0] = std::max(100.0, 820.0 + 190.0 * rng.next_normal());       // income_per_capita
        cr.values[1] = std::log(static_cast<double>(towns[t].n_users) * 30.0);   // log_population
        cr.values[2] = 0.20 + 0.25 * rng.next_double();                          // iwiw_use_rate
        cr.values[3] = std::min(0.8, std::fabs(0.15 + 0.12 * rng.next_normal()));  // mayor_victory_margin
        cr.values[4] = 25.0 + 50.0 * rng.next_double();                          // pct_hs_grads
        cr.values[5] = 20.0 + 210.0 * rng.next_double();                         // distance_to_capital_minutes
        cr.values[6] = 0.20 + 0.20 * rng.next_double();                          // share_inactive
        cr.values[7] = 0.03 + 0.06 * rng.next_double();                          // unemployment_rate
        cr.values[8] = 0.15 + 0.20 * rng.next_double();                          // share_over_60
        cr.values[9] = rng.next_bernoulli(0.25) ? 1.0 : 0.0;                     // has_university
        n_contracts[t] = static_cast<int>(rng.next_int(spec.contracts_min, spec.contracts_max));
    }

    // standardized design identical to what the regression will compute
    Eigen::MatrixXd Z(static_cast<Eigen::Index>(T), 13);
    for (std::size_t t = 0; t < T; ++t) {
        Z(static_cast<Eigen::Index>(t), 0) = measured[t].frag.F;
        Z(static_cast<Eigen::Index>(t), 1) = measured[t].div.d;
        Z(static_cast<Eigen::Index>(t), 2) = out.controls[t].values[0];
        Z(static_cast<Eigen::Index>(t), 3) = std::log(static_cast<double>(n_contracts[t]));
        for (std::size_t j = 1; j < 10; ++j)
            Z(static_cast<Eigen::Index>(t), 4 + static_cast<Eigen::Index>(j) - 1) = out.controls[t].values[j];
    }
    std::vector<std::string> znames = {"fragmentation", "diversity"};
    for (const char* c : kControlNames) znames.emplace_back(c);
    standardize_columns(Z, znames);

    out.truth.resize(T);
    for (std::size_t t = 0; t < T; ++t) {
        Rng rng = derive_rng(spec.seed, "noise", static_cast<std::uint64_t>(t));
        double lin = spec.beta_f * Z(static_cast<Eigen::Index>(t), 0) + spec.beta_d * Z(static_cast<Eigen::Index>(t), 1);
        for (std::size_t j = 0; j < spec.theta.size(); ++j)
            lin += spec.theta[j] * Z(static_cast<Eigen::Index>(t), 2 + static_cast<Eigen::Index>(j));
        lin += spec.noise_sd * rng.next_normal();
        const double rate = std::clamp(spec.base_rate + spec.risk_scale * lin, 0.02, 0.98);

        GroundTruthRow& g = out.truth[t];
        g.settlement_id = towns[t].id;
        g.f = measured[t].frag.F;
        g.d = measured[t].div.d;
        g.d_internal = measured[t].div_internal.d;
        g.rate = rate;
        g.n_contracts = n_contracts[t];

        ContractGenSpec gen;
        gen.rates.fill(rate);
        gen.couple_csb = true;
        auto cs = generate_contracts(towns[t].id, n_contracts[t], gen,
                                     derive_seed(spec.seed, "contracts", static_cast<std::uint64_t>(t)));
        out.contracts.insert(out.contracts.end(), std::make_move_iterator(cs.begin()),
                             std::make_move_iterator(cs.end()));
    }
    return out;
}

}  // namespace socap

#endif
