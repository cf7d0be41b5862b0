#pragma once

#include <vector>

#include "damsim/common.hpp"
#include "damsim/offers.hpp"
#include "damsim/settlement.hpp"

namespace damsim {

/// Decides where a strategic bid is active: the unit solves its own
/// profit-maximization against the expected prices and self-commits or
/// self-schedules exactly in the periods its preferred schedule is online,
/// with ties at marginal prices broken toward producing. The preferred
/// dispatch quantities become the self-schedule levels p*.
inline OfferStrategy choose_active_periods(const GeneratorTech& gen, StrategyTag tag,
                                           const PriceSeries& expected_prices,
                                           SolverBackend& backend,
                                           PreferredDispatchCache* cache = nullptr,
                                           int gen_index = -1) {
    OfferStrategy strat;
    strat.tag = tag;
    if (tag == StrategyTag::Economic) return strat;
    for (double lam : expected_prices.lambda)
        if (!is_finite(lam)) throw ValidationError("expected price stream not finite");

    PreferredDispatch local;
    const PreferredDispatch* pref = nullptr;
    if (cache) {
        pref = &cache->get(gen_index, gen, expected_prices, backend, /*prefer_on=*/true);
    } else {
        local = preferred_dispatch(gen, expected_prices, backend, /*prefer_on=*/true);
        pref = &local;
    }
    const int T = expected_prices.horizon();
    for (int t = 0; t < T; ++t) {
        const bool on = gen.is_thermal() ? pref->schedule.commit[t] == 1
                                         : pref->schedule.dispatch[t] > 0.0;
        if (!on) continue;
        strat.active_periods.push_back(t);
        strat.quantities.push_back(pref->schedule.dispatch[t]);
    }
    if (tag == StrategyTag::SelfCommit) strat.quantities.assign(strat.active_periods.size(), 0.0);
    return strat;
}

/// Convenience wrapper: pick active periods against the expected prices and
/// build the submitted offer in one step.
inline OfferCurve build_strategic_offer(const GeneratorTech& gen, StrategyTag tag,
                                        const PriceSeries& expected_prices,
                                        SolverBackend& backend,
                                        PreferredDispatchCache* cache = nullptr,
                                        int gen_index = -1) {
    OfferStrategy strat =
        choose_active_periods(gen, tag, expected_prices, backend, cache, gen_index);
    return make_offer(gen, strat, expected_prices.horizon());
}

} // namespace damsim
