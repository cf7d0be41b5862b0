#pragma once

#include <algorithm>
#include <atomic>
#include <future>
#include <numeric>
#include <string>
#include <unordered_map>
#include <vector>

#include "damsim/common.hpp"
#include "damsim/mip.hpp"
#include "damsim/pricing.hpp"
#include "damsim/uc_model.hpp"
#include "damsim/uc_solve.hpp"

namespace damsim {

/// One generator's slice of a cleared (or self-chosen) schedule.
struct GenSchedule {
    std::vector<double> dispatch;  // MW per period
    std::vector<int> commit;       // per period; all zero for VRE
    std::vector<int> startup;
};

/// Financial outcome of one generator for one clearing, all at true costs.
/// loc_display follows the perceived-profit-or-loss convention
/// (-loc0 + mwp); loc_eq6 keeps the raw additive value for transparency.
struct SettlementRecord {
    std::string gen_id;
    double revenue = 0.0;
    double true_cost = 0.0;
    double profit0 = 0.0;           // short-run profit before side payments
    double mwp = 0.0;               // make-whole payment (economic bids only)
    double profit = 0.0;            // profit0 + mwp
    double preferred_profit = 0.0;  // price-taking optimum at the same prices
    double loc0 = 0.0;              // preferred_profit - profit0 (>= 0)
    double loc_display = 0.0;       // -loc0 + mwp
    double loc_eq6 = 0.0;           // loc0 + mwp
};

/// True variable cost of producing p, filling the unit's own steps
/// cheapest-first (ties by step index).
inline double true_variable_cost(const GeneratorTech& gen, double p) {
    if (p < -1e-6 || p > gen.capacity() + 1e-6)
        throw ValidationError("dispatch " + std::to_string(p) + " outside [0, capacity] for '" +
                              gen.id + "'");
    std::vector<size_t> order(gen.step_caps.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](size_t a, size_t b) { return gen.step_costs[a] < gen.step_costs[b]; });
    double remaining = std::max(0.0, p), cost = 0.0;
    for (size_t s : order) {
        if (remaining <= 0.0) break;
        const double take = std::min(remaining, gen.step_caps[s]);
        cost += take * gen.step_costs[s];
        remaining -= take;
    }
    return cost;
}

/// Total true cost of a schedule: variable cost plus no-load and startup
/// charges implied by the commitment pattern.
inline double true_schedule_cost(const GeneratorTech& gen, const GenSchedule& sched) {
    double cost = 0.0;
    for (size_t t = 0; t < sched.dispatch.size(); ++t) {
        cost += true_variable_cost(gen, sched.dispatch[t]);
        if (gen.is_thermal()) {
            cost += gen.no_load_cost * sched.commit[t];
            cost += gen.startup_cost * sched.startup[t];
        }
    }
    return cost;
}

/// Short-run profit at true costs for the given prices and schedule.
inline double short_run_profit(const GeneratorTech& gen, const PriceSeries& prices,
                               const GenSchedule& sched) {
    double revenue = 0.0;
    for (size_t t = 0; t < sched.dispatch.size(); ++t)
        revenue += prices.lambda[t] * sched.dispatch[t];
    return revenue - true_schedule_cost(gen, sched);
}

/// Make-whole payments restore economic bidders to break-even; strategic
/// bidders forfeit them.
inline double make_whole_payment(double profit0, bool bid_was_economic) {
    return bid_was_economic ? std::max(0.0, -profit0) : 0.0;
}

struct PreferredDispatch {
    double profit = 0.0;
    GenSchedule schedule;
};

/// Profit-maximizing self-schedule of one unit against a price series,
/// optimizing over the unit's own constraint set at true costs. With
/// prefer_on set, ties are broken toward producing (a second solve
/// maximizes output among profit-optimal schedules).
inline PreferredDispatch preferred_dispatch(const GeneratorTech& gen, const PriceSeries& prices,
                                            SolverBackend& backend, bool prefer_on = false) {
    const int T = prices.horizon();
    PreferredDispatch out;
    out.schedule.dispatch.assign(T, 0.0);
    out.schedule.commit.assign(T, 0);
    out.schedule.startup.assign(T, 0);

    if (!gen.is_thermal()) {
        // Curtailable zero-cost unit: produce whenever the price is not
        // negative (ties toward producing).
        for (int t = 0; t < T; ++t) {
            const double lam = prices.lambda[t];
            if (lam > 0.0 || (prefer_on && lam == 0.0)) {
                out.schedule.dispatch[t] = gen.vre_profile[t];
                out.profit += lam * gen.vre_profile[t];
            }
        }
        return out;
    }

    LpProblem lp;
    OfferCurve truthful = economic_offer(gen, T);
    GenVars v = add_generator(lp, gen, truthful, T, nullptr);
    for (int t = 0; t < T; ++t) lp.set_obj(v.p[t], -prices.lambda[t]);

    MipSolveOptions exact;
    exact.rel_gap = 0.0;
    exact.branch_priority.assign(v.commit.begin(), v.commit.end());
    MipResult mr = backend.solve_mip(lp, exact);
    if (!mr.has_incumbent) throw SolverError("preferred dispatch solve failed for '" + gen.id + "'");
    out.profit = -mr.objective;

    if (prefer_on) {
        // Among (near-)optimal schedules, take the one with maximum output.
        LpProblem lp2;
        GenVars v2 = add_generator(lp2, gen, truthful, T, nullptr);
        for (int t = 0; t < T; ++t) lp2.set_obj(v2.p[t], -prices.lambda[t]);
        int opt_row = lp2.add_row(-kInf, mr.objective + 1e-7, "profit_floor");
        for (int j = 0; j < lp2.num_cols(); ++j) {
            if (lp2.obj(j) != 0.0) lp2.add_entry(opt_row, j, lp2.obj(j));
            lp2.set_obj(j, 0.0);
        }
        for (int t = 0; t < T; ++t) lp2.set_obj(v2.p[t], -1.0);
        MipSolveOptions exact2;
        exact2.rel_gap = 0.0;
        exact2.branch_priority.assign(v2.commit.begin(), v2.commit.end());
        MipResult mr2 = backend.solve_mip(lp2, exact2);
        if (!mr2.has_incumbent)
            throw SolverError("tie-broken preferred dispatch failed for '" + gen.id + "'");
        for (int t = 0; t < T; ++t) {
            out.schedule.dispatch[t] = mr2.x[v2.p[t]];
            out.schedule.commit[t] = static_cast<int>(std::round(mr2.x[v2.commit[t]]));
            out.schedule.startup[t] = static_cast<int>(std::round(mr2.x[v2.startup[t]]));
        }
        return out;
    }

    for (int t = 0; t < T; ++t) {
        out.schedule.dispatch[t] = mr.x[v.p[t]];
        out.schedule.commit[t] = static_cast<int>(std::round(mr.x[v.commit[t]]));
        out.schedule.startup[t] = static_cast<int>(std::round(mr.x[v.startup[t]]));
    }
    return out;
}

/// Memoizes preferred-dispatch profits per generator and price vector;
/// simulation prices repeat heavily across iterations.
class PreferredDispatchCache {
public:
    const PreferredDispatch& get(int gen_index, const GeneratorTech& gen,
                                 const PriceSeries& prices, SolverBackend& backend,
                                 bool prefer_on) {
        std::string key;
        key.reserve(16 + prices.lambda.size() * sizeof(double));
        key.append(reinterpret_cast<const char*>(&gen_index), sizeof(gen_index));
        key.push_back(prefer_on ? '1' : '0');
        for (double lam : prices.lambda) {
            const double q = std::round(lam * 1e7) / 1e7;
            key.append(reinterpret_cast<const char*>(&q), sizeof(q));
        }
        auto it = cache_.find(key);
        if (it != cache_.end()) return it->second;
        auto [ins, _] = cache_.emplace(key, preferred_dispatch(gen, prices, backend, prefer_on));
        return ins->second;
    }

    size_t size() const { return cache_.size(); }

private:
    std::unordered_map<std::string, PreferredDispatch> cache_;
};

/// Extracts one generator's slice of a cleared solution.
inline GenSchedule schedule_of(const UCSolution& sol, int g) {
    GenSchedule s;
    const int T = static_cast<int>(sol.dispatch.size());
    s.dispatch.resize(T);
    s.commit.resize(T);
    s.startup.resize(T);
    for (int t = 0; t < T; ++t) {
        s.dispatch[t] = sol.dispatch[t][g];
        s.commit[t] = sol.commit[t][g];
        s.startup[t] = sol.startup[t][g];
    }
    return s;
}

inline SettlementRecord settle_generator(const GeneratorTech& gen, const PriceSeries& prices,
                                         const GenSchedule& sched, bool mwp_eligible,
                                         double preferred_profit) {
    SettlementRecord rec;
    rec.gen_id = gen.id;
    for (size_t t = 0; t < sched.dispatch.size(); ++t)
        rec.revenue += prices.lambda[t] * sched.dispatch[t];
    rec.true_cost = true_schedule_cost(gen, sched);
    rec.profit0 = rec.revenue - rec.true_cost;
    rec.mwp = make_whole_payment(rec.profit0, mwp_eligible);
    rec.profit = rec.profit0 + rec.mwp;
    rec.preferred_profit = preferred_profit;
    rec.loc0 = preferred_profit - rec.profit0;
    const double scale = std::max(1.0, std::abs(preferred_profit));
    if (rec.loc0 < -1e-5 * scale)
        throw SolverError("negative lost opportunity cost for '" + gen.id +
                          "': " + std::to_string(rec.loc0));
    rec.loc0 = std::max(0.0, rec.loc0);
    rec.loc_display = -rec.loc0 + rec.mwp;
    rec.loc_eq6 = rec.loc0 + rec.mwp;
    return rec;
}

/// Settles every generator of a cleared market at true costs. mwp_eligible
/// flags come from the submitted offers. Runs per-generator work in
/// parallel when jobs > 1 (each worker uses its own backend session).
inline std::vector<SettlementRecord> settle_all(const MarketCase& mc, const PriceSeries& prices,
                                                const UCSolution& sol,
                                                const std::vector<bool>& mwp_eligible,
                                                PreferredDispatchCache& cache,
                                                SolverBackend& backend, int jobs = 1) {
    const int G = static_cast<int>(mc.generators.size());
    std::vector<SettlementRecord> out(G);
    auto work = [&](int g) {
        const auto& pref = cache.get(g, mc.generators[g], prices, backend, false);
        out[g] = settle_generator(mc.generators[g], prices, schedule_of(sol, g), mwp_eligible[g],
                                  pref.profit);
    };
    if (jobs <= 1) {
        for (int g = 0; g < G; ++g) work(g);
        return out;
    }
    // The shared cache is filled serially first, then records are pure.
    for (int g = 0; g < G; ++g) cache.get(g, mc.generators[g], prices, backend, false);
    std::vector<std::future<void>> futs;
    std::atomic<int> next{0};
    const int workers = std::min(jobs, G);
    for (int w = 0; w < workers; ++w)
        futs.push_back(std::async(std::launch::async, [&] {
            for (int g = next.fetch_add(1); g < G; g = next.fetch_add(1)) work(g);
        }));
    for (auto& f : futs) f.get();
    return out;
}

} // namespace damsim
