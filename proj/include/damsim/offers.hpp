#pragma once

#include <algorithm>
#include <set>
#include <vector>

#include "damsim/common.hpp"
#include "damsim/market_data.hpp"

namespace damsim {

enum class StrategyTag { Economic = 0, SelfCommit = 1, SelfSchedule = 2 };

inline const char* strategy_name(StrategyTag t) {
    switch (t) {
        case StrategyTag::Economic: return "economic";
        case StrategyTag::SelfCommit: return "self_commit";
        case StrategyTag::SelfSchedule: return "self_schedule";
    }
    return "?";
}

/// A chosen strategy together with the periods it applies to. For
/// self-schedules, quantities[k] is the desired dispatch in
/// active_periods[k]; self-commits ignore quantities.
struct OfferStrategy {
    StrategyTag tag = StrategyTag::Economic;
    std::vector<int> active_periods;
    std::vector<double> quantities;

    static OfferStrategy economic() { return {}; }
};

/// Per-period supply offer over a step partition shared by all periods.
/// Strategic offers change costs by period, never the physical quantities,
/// so the caps always sum to the unit's true capacity.
struct OfferCurve {
    std::vector<double> step_caps;                // widths, shared across periods
    std::vector<std::vector<double>> step_costs;  // [period][step] $/MWh
    std::vector<double> startup_cost;             // [period] $
    std::vector<double> no_load_cost;             // [period] $/h
    bool mwp_eligible = true;

    int horizon() const { return static_cast<int>(startup_cost.size()); }
    int num_steps() const { return static_cast<int>(step_caps.size()); }
};

namespace detail {

// Marginal cost of the true offer curve on the half-open range (lo, hi],
// where the range never straddles a true step boundary.
inline double true_rate_at(const GeneratorTech& g, double lo, double hi) {
    double top = 0.0;
    const double mid = 0.5 * (lo + hi);
    for (size_t s = 0; s < g.step_caps.size(); ++s) {
        top += g.step_caps[s];
        if (mid <= top + 1e-12) return g.step_costs[s];
    }
    return g.step_costs.back();
}

} // namespace detail

/// Builds the submitted offer for one unit under a strategy.
///
/// economic       true costs verbatim, make-whole eligible.
/// self_commit    active periods: zero startup/no-load and zero cost on
///                [0, p_min]; true costs above p_min.
/// self_schedule  active periods: zero cost on [0, p*]; where p* lands
///                strictly inside a step, the remainder of that step is
///                offered at the step's own cost; true costs above.
///
/// Strategic offers forfeit make-whole eligibility even when no period is
/// active. Offers in non-active periods stay at true costs.
inline OfferCurve make_offer(const GeneratorTech& gen, const OfferStrategy& strategy,
                             int horizon) {
    for (int t : strategy.active_periods)
        if (t < 0 || t >= horizon)
            throw ValidationError("make_offer: active period out of horizon for '" + gen.id + "'");
    if (strategy.tag == StrategyTag::SelfSchedule &&
        strategy.quantities.size() != strategy.active_periods.size())
        throw ValidationError("make_offer: self-schedule quantities missing for '" + gen.id + "'");

    const double capacity = gen.capacity();

    // Shared partition: true boundaries plus every strategic breakpoint.
    std::set<double> cuts;
    double top = 0.0;
    for (double w : gen.step_caps) {
        top += w;
        cuts.insert(top);
    }
    if (strategy.tag == StrategyTag::SelfCommit && gen.p_min > 0.0 && gen.p_min < capacity)
        cuts.insert(gen.p_min);
    if (strategy.tag == StrategyTag::SelfSchedule)
        for (double q : strategy.quantities)
            if (q > 1e-12 && q < capacity - 1e-12) cuts.insert(q);

    OfferCurve oc;
    double lo = 0.0;
    for (double hi : cuts) {
        if (hi - lo < 1e-12) continue;
        oc.step_caps.push_back(hi - lo);
        lo = hi;
    }

    std::vector<double> zero_up_to(horizon, -1.0);  // output level priced at zero
    std::vector<char> active(horizon, 0);
    for (size_t k = 0; k < strategy.active_periods.size(); ++k) {
        const int t = strategy.active_periods[k];
        active[t] = 1;
        if (strategy.tag == StrategyTag::SelfCommit) zero_up_to[t] = gen.p_min;
        if (strategy.tag == StrategyTag::SelfSchedule) zero_up_to[t] = strategy.quantities[k];
    }

    oc.step_costs.assign(horizon, {});
    oc.startup_cost.assign(horizon, gen.startup_cost);
    oc.no_load_cost.assign(horizon, gen.no_load_cost);
    for (int t = 0; t < horizon; ++t) {
        double seg_lo = 0.0;
        for (double w : oc.step_caps) {
            const double seg_hi = seg_lo + w;
            double rate = detail::true_rate_at(gen, seg_lo, seg_hi);
            if (seg_hi <= zero_up_to[t] + 1e-9) rate = 0.0;
            oc.step_costs[t].push_back(rate);
            seg_lo = seg_hi;
        }
        if (active[t]) {
            oc.startup_cost[t] = 0.0;
            oc.no_load_cost[t] = 0.0;
        }
    }
    oc.mwp_eligible = strategy.tag == StrategyTag::Economic;
    return oc;
}

inline OfferCurve economic_offer(const GeneratorTech& gen, int horizon) {
    return make_offer(gen, OfferStrategy::economic(), horizon);
}

} // namespace damsim
