#pragma once

#include <array>
#include <cstdint>
#include <cstring>
#include <functional>
#include <random>
#include <span>
#include <vector>

#include "damsim/common.hpp"
#include "damsim/pricing.hpp"
#include "damsim/rng.hpp"
#include "damsim/settlement.hpp"
#include "damsim/strategy.hpp"
#include "damsim/uc_model.hpp"
#include "damsim/uc_solve.hpp"

namespace damsim {

/// Exponentially smoothed expectation of a history: s_1 = x_1,
/// s_t = eta x_t + (1 - eta) s_{t-1}.
inline double smooth(std::span<const double> history, double eta) {
    if (history.empty()) throw ValidationError("smooth: empty history");
    double s = history[0];
    for (size_t t = 1; t < history.size(); ++t) s = eta * history[t] + (1.0 - eta) * s;
    return s;
}

struct SimConfig {
    double alpha = 0.9;          // exploit probability
    double eta = 0.05;           // smoothing weight
    int iterations = 1000;       // including the competitive first iteration
    uint64_t seed = 1;
    PricingModel model = PricingModel::FCP;
    double rel_gap = 1e-4;       // clearing MIP gap
    int jobs = 1;

    void validate() const {
        if (!(alpha > 0.0 && alpha <= 1.0)) throw ValidationError("alpha must be in (0, 1]");
        if (!(eta > 0.0 && eta <= 1.0)) throw ValidationError("eta must be in (0, 1]");
        if (iterations < 1) throw ValidationError("iterations must be at least 1");
        if (!(rel_gap >= 0.0)) throw ValidationError("rel_gap must be nonnegative");
    }
};

/// Bandit memory of one agent for one strategy.
struct StrategyStats {
    bool tried = false;
    double smoothed_profit = 0.0;
    std::vector<double> smoothed_prices;  // per period; set once first chosen
    long count = 0;
    std::vector<double> payoffs;  // full history, for significance testing
};

struct AgentState {
    std::array<StrategyStats, 3> strategies;  // indexed by StrategyTag
    std::mt19937_64 rng;

    const StrategyStats& of(StrategyTag t) const { return strategies[static_cast<int>(t)]; }
    StrategyStats& of(StrategyTag t) { return strategies[static_cast<int>(t)]; }
};

/// Greedy selection: exploit the best known strategy with probability alpha,
/// otherwise explore uniformly over all three strategies. Unknown (never
/// tried) strategies cannot win the exploit branch, and exact ties resolve
/// to the economic bid.
inline StrategyTag choose_strategy(const AgentState& agent, std::mt19937_64& rng, double alpha) {
    std::uniform_real_distribution<double> U(0.0, 1.0);
    if (U(rng) < alpha) {
        StrategyTag best = StrategyTag::Economic;
        double best_val = agent.of(StrategyTag::Economic).tried
                              ? agent.of(StrategyTag::Economic).smoothed_profit
                              : -kInf;
        for (StrategyTag t : {StrategyTag::SelfCommit, StrategyTag::SelfSchedule}) {
            const StrategyStats& st = agent.of(t);
            if (st.tried && st.smoothed_profit > best_val) {
                best = t;
                best_val = st.smoothed_profit;
            }
        }
        return best;
    }
    std::uniform_int_distribution<int> pick(0, 2);
    return static_cast<StrategyTag>(pick(rng));
}

struct IterationRecord {
    int iteration = 0;
    std::vector<StrategyTag> chosen;           // per agent
    std::vector<double> lambda;                // per period
    std::vector<SettlementRecord> settlements; // per agent
    double objective = 0.0;        // offered-cost clearing objective
    double mip_gap = 0.0;
    double consumer_cost = 0.0;    // sum lambda_t D_t + sum MWP
    double producer_true_cost = 0.0;
    double producer_profit = 0.0;  // sum of realized profits (with MWP)
    double mwp_total = 0.0;
    double loc0_total = 0.0;
    double loc_display_total = 0.0;
    double non_served_total = 0.0;
    uint64_t offers_digest = 0;
};

struct IterationLog {
    std::vector<IterationRecord> records;
};

namespace detail {

inline uint64_t digest_offers(const std::vector<OfferCurve>& offers) {
    uint64_t h = 1469598103934665603ULL;  // FNV-1a over the cost surfaces
    auto mix = [&h](double v) {
        uint64_t bits;
        static_assert(sizeof(bits) == sizeof(v));
        std::memcpy(&bits, &v, sizeof(bits));
        for (int k = 0; k < 8; ++k) {
            h ^= (bits >> (8 * k)) & 0xff;
            h *= 1099511628211ULL;
        }
    };
    for (const auto& oc : offers) {
        for (double c : oc.step_caps) mix(c);
        for (const auto& row : oc.step_costs)
            for (double c : row) mix(c);
        for (double c : oc.startup_cost) mix(c);
        for (double c : oc.no_load_cost) mix(c);
        mix(oc.mwp_eligible ? 1.0 : 0.0);
    }
    return h;
}

} // namespace detail

/// The iterated market game. The first iteration is the competitive
/// solution with every unit bidding economically; afterwards each thermal
/// agent picks a strategy greedily, strategic agents derive active periods
/// and quantities from their smoothed price stream for that strategy
/// (falling back to the economic stream until the strategy has been played),
/// the market clears, everyone settles at true costs, and only the chosen
/// strategy's statistics are updated. VRE units have nothing to distort and
/// always bid economically.
///
/// Deterministic for a fixed seed: agents draw from independent substreams
/// derived from the master seed by agent index.
inline IterationLog run_simulation(
    const MarketCase& mc, const SimConfig& cfg, SolverBackend& backend,
    const std::function<void(const IterationRecord&)>& sink = {}) {
    cfg.validate();
    const int T = mc.horizon();
    const int G = static_cast<int>(mc.generators.size());

    std::vector<AgentState> agents(G);
    for (int g = 0; g < G; ++g) agents[g].rng = make_agent_rng(cfg.seed, g);

    PreferredDispatchCache cache;
    IterationLog log;
    log.records.reserve(cfg.iterations);

    for (int iter = 0; iter < cfg.iterations; ++iter) {
        // 1. Strategy selection (iteration 0 is all-economic).
        std::vector<StrategyTag> chosen(G, StrategyTag::Economic);
        if (iter > 0) {
            for (int g = 0; g < G; ++g) {
                if (!mc.generators[g].is_thermal()) continue;
                chosen[g] = choose_strategy(agents[g], agents[g].rng, cfg.alpha);
            }
        }

        // 2. Offers: strategic agents act on their learned price stream.
        std::vector<OfferCurve> offers;
        offers.reserve(G);
        for (int g = 0; g < G; ++g) {
            const GeneratorTech& gen = mc.generators[g];
            if (chosen[g] == StrategyTag::Economic) {
                offers.push_back(economic_offer(gen, T));
                continue;
            }
            const StrategyStats& st = agents[g].of(chosen[g]);
            const StrategyStats& eco = agents[g].of(StrategyTag::Economic);
            PriceSeries expected;
            expected.model = cfg.model;
            expected.lambda = !st.smoothed_prices.empty() ? st.smoothed_prices
                                                          : eco.smoothed_prices;
            if (expected.lambda.empty())
                throw SolverError("no learned price stream available before iteration 1");
            OfferStrategy strat =
                choose_active_periods(gen, chosen[g], expected, backend, &cache, g);
            offers.push_back(make_offer(gen, strat, T));
        }

        // 3. Clear and price.
        UCProblem uc = build_uc(mc, offers);
        UCSolution sol = solve_uc_mip(uc, backend, cfg.rel_gap);
        PriceSeries prices = price(cfg.model, uc, sol, backend);

        // 4. Settle everyone at true costs.
        std::vector<bool> eligible(G);
        for (int g = 0; g < G; ++g) eligible[g] = offers[g].mwp_eligible;
        std::vector<SettlementRecord> recs =
            settle_all(mc, prices, sol, eligible, cache, backend, cfg.jobs);

        // 5. Update the chosen strategy's statistics.
        for (int g = 0; g < G; ++g) {
            AgentState& ag = agents[g];
            StrategyStats& st = ag.of(chosen[g]);
            const double payoff = recs[g].profit;
            st.payoffs.push_back(payoff);
            st.smoothed_profit = st.tried ? cfg.eta * payoff + (1.0 - cfg.eta) * st.smoothed_profit
                                          : payoff;
            if (!st.tried) {
                st.smoothed_prices = prices.lambda;
            } else {
                for (int t = 0; t < T; ++t)
                    st.smoothed_prices[t] =
                        cfg.eta * prices.lambda[t] + (1.0 - cfg.eta) * st.smoothed_prices[t];
            }
            st.tried = true;
            st.count += 1;
        }

        // 6. Log.
        IterationRecord rec;
        rec.iteration = iter;
        rec.chosen = chosen;
        rec.lambda = prices.lambda;
        rec.objective = sol.objective;
        rec.mip_gap = sol.mip_gap;
        rec.offers_digest = detail::digest_offers(offers);
        for (int t = 0; t < T; ++t) {
            rec.consumer_cost += prices.lambda[t] * mc.demand.mw[t];
            rec.non_served_total += sol.non_served[t];
        }
        for (int g = 0; g < G; ++g) {
            const SettlementRecord& r = recs[g];
            rec.consumer_cost += r.mwp;
            rec.producer_true_cost += r.true_cost;
            rec.producer_profit += r.profit;
            rec.mwp_total += r.mwp;
            rec.loc0_total += r.loc0;
            rec.loc_display_total += r.loc_display;
        }
        rec.settlements = std::move(recs);
        if (sink) sink(rec);
        log.records.push_back(std::move(rec));
    }
    return log;
}

} // namespace damsim
