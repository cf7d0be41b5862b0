#pragma once

#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "damsim/common.hpp"

namespace damsim {

/// Cumulative production cost curve of one unit as found in benchmark data:
/// points (mw, cumulative $) starting at p_min and rising through each offer
/// step boundary.
struct CumulativeCostRecord {
    double p_min = 0.0;
    std::vector<std::pair<double, double>> points;  // (cumulative MW, cumulative $)
};

struct OfferStepDerivation {
    std::vector<double> step_caps;   // widths spanning [0, capacity]
    std::vector<double> step_costs;  // $/MWh
    double no_load_cost = 0.0;       // $/h
};

/// Converts cumulative costs into marginal offer steps plus a no-load cost:
/// block-loaded units carry no no-load cost; otherwise the output below
/// p_min is priced at the first step's marginal cost with the remainder of
/// the cumulative cost at p_min treated as no-load cost; if that remainder
/// would be negative, the no-load cost is zero and the below-minimum range
/// is priced at average cost.
inline OfferStepDerivation derive_offer_steps(const CumulativeCostRecord& raw) {
    if (raw.points.empty()) throw ValidationError("derive_offer_steps: no cost points");
    if (std::abs(raw.points.front().first - raw.p_min) > 1e-6)
        throw ValidationError("derive_offer_steps: first point must sit at p_min");
    for (size_t k = 1; k < raw.points.size(); ++k)
        if (raw.points[k].first <= raw.points[k - 1].first + 1e-12)
            throw ValidationError("derive_offer_steps: points must increase in MW");

    const double pmin = raw.p_min;
    const double cost_at_pmin = raw.points.front().second;
    OfferStepDerivation out;

    // Marginal cost of each segment above p_min.
    std::vector<std::pair<double, double>> segs;  // (width, $/MWh)
    for (size_t k = 1; k < raw.points.size(); ++k) {
        const double w = raw.points[k].first - raw.points[k - 1].first;
        segs.emplace_back(w, (raw.points[k].second - raw.points[k - 1].second) / w);
    }

    if (segs.empty()) {
        // Block loaded: single step over [0, p_min], no no-load cost.
        out.no_load_cost = 0.0;
        if (pmin > 0.0) {
            out.step_caps.push_back(pmin);
            out.step_costs.push_back(cost_at_pmin / pmin);
        }
        return out;
    }

    double below_cost = 0.0;
    if (pmin > 0.0) {
        const double first_marginal = segs.front().second;
        double no_load = cost_at_pmin - first_marginal * pmin;
        if (no_load >= 0.0) {
            below_cost = first_marginal;
            out.no_load_cost = no_load;
        } else {
            out.no_load_cost = 0.0;
            below_cost = cost_at_pmin / pmin;
        }
        out.step_caps.push_back(pmin);
        out.step_costs.push_back(below_cost);
    } else {
        // Nothing below minimum; any cost at zero output is pure no-load.
        out.no_load_cost = std::max(0.0, cost_at_pmin);
    }
    for (const auto& [w, c] : segs) {
        // Merge with the previous step when the rate matches (rule (b) makes
        // the below-minimum rate equal to the first marginal cost).
        if (!out.step_costs.empty() && std::abs(out.step_costs.back() - c) < 1e-12) {
            out.step_caps.back() += w;
        } else {
            out.step_caps.push_back(w);
            out.step_costs.push_back(c);
        }
    }
    return out;
}

/// Cumulative offered cost at output q for a committed unit: no-load plus
/// positional fill of the step curve. Used to round-trip the derivation.
inline double cumulative_offer_cost(const OfferStepDerivation& d, double q) {
    double cost = d.no_load_cost;
    double remaining = q;
    for (size_t s = 0; s < d.step_caps.size() && remaining > 0.0; ++s) {
        const double take = std::min(remaining, d.step_caps[s]);
        cost += take * d.step_costs[s];
        remaining -= take;
    }
    return cost;
}

} // namespace damsim
