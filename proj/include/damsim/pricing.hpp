#pragma once

#include <string>
#include <vector>

#include "damsim/common.hpp"
#include "damsim/uc_solve.hpp"

namespace damsim {

enum class PricingModel { FCP, aCHP };

inline const char* pricing_model_name(PricingModel m) {
    return m == PricingModel::FCP ? "fcp" : "achp";
}

inline PricingModel parse_pricing_model(const std::string& s) {
    if (s == "fcp" || s == "FCP") return PricingModel::FCP;
    if (s == "achp" || s == "aCHP" || s == "ACHP") return PricingModel::aCHP;
    throw ValidationError("unknown pricing model '" + s + "'");
}

struct PriceSeries {
    PricingModel model = PricingModel::FCP;
    std::vector<double> lambda;  // $/MWh per period

    int horizon() const { return static_cast<int>(lambda.size()); }
};

/// Uniform prices for a cleared market. Fixed-configuration prices pin the
/// commitment decisions of the incumbent solution; approximate convex hull
/// prices relax them and ignore the incumbent entirely. Duals pass through
/// unmodified (no flooring).
inline PriceSeries price(PricingModel model, const UCProblem& problem,
                         const UCSolution& mip_solution, SolverBackend& backend) {
    PriceSeries ps;
    ps.model = model;
    const PricedLp priced = model == PricingModel::FCP ? solve_fixed_lp(problem, mip_solution, backend)
                                                       : solve_relaxed_lp(problem, backend);
    ps.lambda = priced.lambda;
    for (double v : ps.lambda)
        if (!is_finite(v)) throw SolverError("non-finite price");
    return ps;
}

} // namespace damsim
