#pragma once

#include <cmath>
#include <vector>

#include "damsim/common.hpp"
#include "damsim/solver_backend.hpp"
#include "damsim/uc_model.hpp"

namespace damsim {

/// One cleared market: dispatch, step dispatch, commitment decisions,
/// non-served energy, and the offered-cost objective.
struct UCSolution {
    std::vector<std::vector<double>> dispatch;                   // [t][g] MW
    std::vector<std::vector<std::vector<double>>> step_dispatch; // [t][g][s] MW
    std::vector<std::vector<int>> commit, startup, shutdown;     // [t][g]; 0 for VRE
    std::vector<double> non_served;                              // [t] MW
    double objective = 0.0;
    double mip_gap = 0.0;
};

struct PricedLp {
    std::vector<double> lambda;  // balance-row duals per period
    double objective = 0.0;
};

namespace detail {

inline int round_binary(double v, const std::string& what) {
    const double r = std::round(v);
    if (std::abs(v - r) >= 1e-5)
        throw SolverError("solution value " + std::to_string(v) + " for " + what +
                          " is not integral");
    return static_cast<int>(r);
}

} // namespace detail

/// Solves the clearing MILP to the requested relative gap. The non-served
/// slack keeps the problem feasible for any offer set, so a missing
/// incumbent indicates a solver failure rather than a market condition.
inline UCSolution solve_uc_mip(const UCProblem& uc, SolverBackend& backend, double rel_gap) {
    MipSolveOptions mo;
    mo.rel_gap = rel_gap;
    for (int t = 0; t < uc.horizon; ++t)
        for (int g = 0; g < uc.n_gens; ++g)
            if (uc.commit_var[t][g] >= 0) mo.branch_priority.push_back(uc.commit_var[t][g]);
    mo.symmetry_groups = uc.symmetry_groups;
    mo.aggregates = uc.count_aggregates;
    MipResult mr = backend.solve_mip(uc.lp, mo);
    if (!mr.has_incumbent)
        throw SolverError("unit commitment solve produced no incumbent");

    const int T = uc.horizon, G = uc.n_gens;
    UCSolution sol;
    sol.objective = mr.objective;
    sol.mip_gap = mr.gap;
    sol.dispatch.assign(T, std::vector<double>(G, 0.0));
    sol.step_dispatch.assign(T, std::vector<std::vector<double>>(G));
    sol.commit.assign(T, std::vector<int>(G, 0));
    sol.startup.assign(T, std::vector<int>(G, 0));
    sol.shutdown.assign(T, std::vector<int>(G, 0));
    sol.non_served.assign(T, 0.0);
    for (int t = 0; t < T; ++t) {
        for (int g = 0; g < G; ++g) {
            sol.dispatch[t][g] = mr.x[uc.p_var[t][g]];
            sol.step_dispatch[t][g].resize(uc.rho_var[t][g].size());
            for (size_t s = 0; s < uc.rho_var[t][g].size(); ++s)
                sol.step_dispatch[t][g][s] = mr.x[uc.rho_var[t][g][s]];
            if (uc.commit_var[t][g] >= 0) {
                sol.commit[t][g] = detail::round_binary(mr.x[uc.commit_var[t][g]], "commitment");
                sol.startup[t][g] = detail::round_binary(mr.x[uc.startup_var[t][g]], "startup");
                sol.shutdown[t][g] = detail::round_binary(mr.x[uc.shutdown_var[t][g]], "shutdown");
            }
        }
        sol.non_served[t] = mr.x[uc.nse_var[t]];
    }
    return sol;
}

/// LP with the commitment decisions pinned to a solved configuration;
/// duals of the balance rows are the fixed-configuration prices.
inline PricedLp solve_fixed_lp(const UCProblem& uc, const UCSolution& fixed,
                               SolverBackend& backend) {
    std::vector<BoundFix> fixes;
    for (int t = 0; t < uc.horizon; ++t)
        for (int g = 0; g < uc.n_gens; ++g) {
            if (uc.commit_var[t][g] < 0) continue;
            const double u = fixed.commit[t][g];
            const double z = fixed.startup[t][g];
            const double y = fixed.shutdown[t][g];
            fixes.push_back({uc.commit_var[t][g], {u, u}});
            fixes.push_back({uc.startup_var[t][g], {z, z}});
            fixes.push_back({uc.shutdown_var[t][g], {y, y}});
        }
    LpResult lr = backend.solve_lp(uc.lp, fixes);
    if (lr.status != LpStatus::Optimal)
        throw SolverError("fixed-configuration LP not optimal: configuration infeasible?");
    PricedLp out;
    out.objective = lr.objective;
    out.lambda.resize(uc.horizon);
    for (int t = 0; t < uc.horizon; ++t) out.lambda[t] = lr.row_dual[uc.balance_row[t]];
    return out;
}

/// LP with every binary relaxed to [0,1]; duals of the balance rows
/// approximate convex hull prices thanks to the tightened formulation.
inline PricedLp solve_relaxed_lp(const UCProblem& uc, SolverBackend& backend) {
    LpResult lr = backend.solve_lp(uc.lp, {});
    if (lr.status != LpStatus::Optimal)
        throw SolverError("relaxed LP not optimal");
    PricedLp out;
    out.objective = lr.objective;
    out.lambda.resize(uc.horizon);
    for (int t = 0; t < uc.horizon; ++t) out.lambda[t] = lr.row_dual[uc.balance_row[t]];
    return out;
}

} // namespace damsim
