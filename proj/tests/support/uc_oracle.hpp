#pragma once

// Exhaustive unit-commitment oracle, independent of the LP/MIP solver:
// enumerates every feasible commitment sequence per thermal unit (against
// the same emitted constraint families), then dispatches each period by
// merit order over the offered step increments. Valid for cases whose ramp
// rates equal capacity (the two-period ramp rows then reduce to the
// startup/shutdown power caps the oracle applies explicitly).

#include <algorithm>
#include <limits>
#include <vector>

#include "damsim/market_data.hpp"
#include "damsim/offers.hpp"

namespace damsim::testing {

struct UcOracleResult {
    bool feasible = false;
    double objective = std::numeric_limits<double>::infinity();
};

namespace oracle_detail {

struct GenPattern {
    std::vector<int> u, z, y;
    double fixed_cost = 0.0;            // offered no-load + startup
    std::vector<double> output_cap;     // per-period limit (startup/shutdown aware)
};

inline std::vector<GenPattern> feasible_patterns(const GeneratorTech& gen, const OfferCurve& oc,
                                                 int T) {
    std::vector<GenPattern> out;
    for (unsigned mask = 0; mask < (1u << T); ++mask) {
        GenPattern pat;
        pat.u.resize(T);
        pat.z.assign(T, 0);
        pat.y.assign(T, 0);
        for (int t = 0; t < T; ++t) pat.u[t] = (mask >> t) & 1u;
        for (int t = 0; t < T; ++t) {
            const int prev = t == 0 ? gen.init_status : pat.u[t - 1];
            if (t == 0) {
                // First period startup flag: booked only from an off start.
                pat.z[0] = gen.init_status == 0 ? pat.u[0] : 0;
                continue;
            }
            if (pat.u[t] == 1 && prev == 0) pat.z[t] = 1;
            if (pat.u[t] == 0 && prev == 1) pat.y[t] = 1;
        }
        // Emitted minimum up/down windows.
        bool ok = true;
        if (gen.min_on > 1)
            for (int t = 0; t < T - 1 && ok; ++t) {
                int s = pat.z[t];
                for (int t2 = t + 1; t2 <= std::min(t + gen.min_on - 1, T - 1); ++t2)
                    s += pat.y[t2];
                ok = s <= 1;
            }
        if (gen.min_off > 1)
            for (int t = 0; t < T - 1 && ok; ++t) {
                int s = pat.y[t];
                for (int t2 = t + 1; t2 <= std::min(t + gen.min_off - 1, T - 1); ++t2)
                    s += pat.z[t2];
                ok = s <= 1;
            }
        if (!ok) continue;

        pat.output_cap.assign(T, gen.capacity());
        for (int t = 0; t < T; ++t) {
            if (pat.u[t] == 0) {
                pat.output_cap[t] = 0.0;
                continue;
            }
            // Startup hour (beyond the first period) and the hour before a
            // shutdown are capped at minimum output by the ramp rows.
            if (T >= 2) {
                if (t >= 1 && pat.z[t] == 1) pat.output_cap[t] = gen.p_min;
                if (t + 1 < T && pat.y[t + 1] == 1)
                    pat.output_cap[t] = std::min(pat.output_cap[t], gen.p_min);
            }
            pat.fixed_cost += oc.no_load_cost[t];
        }
        for (int t = 0; t < T; ++t)
            if (pat.z[t]) pat.fixed_cost += oc.startup_cost[t];
        out.push_back(std::move(pat));
    }
    return out;
}

} // namespace oracle_detail

inline UcOracleResult enumerate_uc(const MarketCase& mc, const std::vector<OfferCurve>& offers) {
    const int T = mc.horizon();
    const int G = static_cast<int>(mc.generators.size());
    std::vector<int> thermals, vres;
    for (int g = 0; g < G; ++g)
        (mc.generators[g].is_thermal() ? thermals : vres).push_back(g);

    std::vector<std::vector<oracle_detail::GenPattern>> patterns;
    for (int g : thermals)
        patterns.push_back(
            oracle_detail::feasible_patterns(mc.generators[g], offers[g], T));

    UcOracleResult best;
    std::vector<size_t> pick(patterns.size(), 0);

    auto evaluate = [&]() {
        double cost = 0.0;
        for (size_t k = 0; k < pick.size(); ++k)
            cost += patterns[k][pick[k]].fixed_cost;
        for (int t = 0; t < T; ++t) {
            double mandatory = 0.0, mand_cost = 0.0;
            std::vector<std::pair<double, double>> increments;  // (cost, cap)
            for (size_t k = 0; k < pick.size(); ++k) {
                const auto& pat = patterns[k][pick[k]];
                if (pat.u[t] == 0) continue;
                const int g = thermals[k];
                const GeneratorTech& gen = mc.generators[g];
                const OfferCurve& oc = offers[g];
                // Forced output to p_min, filled cheapest-first.
                std::vector<size_t> order(oc.step_caps.size());
                for (size_t s = 0; s < order.size(); ++s) order[s] = s;
                std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) {
                    return oc.step_costs[t][a] < oc.step_costs[t][b];
                });
                double need = gen.p_min, headroom = pat.output_cap[t] - gen.p_min;
                mandatory += gen.p_min;
                for (size_t s : order) {
                    double cap = oc.step_caps[s];
                    const double take = std::min(need, cap);
                    mand_cost += take * oc.step_costs[t][s];
                    need -= take;
                    cap -= take;
                    if (cap > 0.0 && headroom > 0.0) {
                        const double inc = std::min(cap, headroom);
                        increments.emplace_back(oc.step_costs[t][s], inc);
                        headroom -= inc;
                    }
                }
            }
            for (int g : vres) {
                const double cap = mc.generators[g].vre_profile[t];
                if (cap > 0.0) increments.emplace_back(offers[g].step_costs[t][0], cap);
            }
            if (mandatory > mc.demand.mw[t] + 1e-9) return;  // over-generation: infeasible
            double residual = mc.demand.mw[t] - mandatory;
            cost += mand_cost;
            std::sort(increments.begin(), increments.end());
            for (const auto& [c, cap] : increments) {
                if (residual <= 1e-12) break;
                if (c >= mc.voll) break;  // cheaper to shed
                const double take = std::min(residual, cap);
                cost += take * c;
                residual -= take;
            }
            cost += residual * mc.voll;  // non-served remainder
            if (cost >= best.objective) return;  // prune
        }
        best.feasible = true;
        best.objective = cost;
    };

    // Odometer over the per-generator pattern lists.
    while (true) {
        evaluate();
        size_t k = 0;
        while (k < pick.size() && ++pick[k] == patterns[k].size()) {
            pick[k] = 0;
            ++k;
        }
        if (k == pick.size()) break;
        if (pick.empty()) break;
    }
    return best;
}

} // namespace damsim::testing
