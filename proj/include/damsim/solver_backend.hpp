#pragma once

#include <cstdlib>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "damsim/common.hpp"
#include "damsim/lp.hpp"
#include "damsim/mip.hpp"
#include "damsim/simplex.hpp"

namespace damsim {

/// Bound override applied for the duration of one solve: (column, lo, up).
using BoundFix = std::pair<int, std::pair<double, double>>;

struct MipSolveOptions {
    double rel_gap = 1e-4;
    std::vector<int> branch_priority;  // optional hint: branch these first
    std::vector<std::vector<std::vector<int>>> symmetry_groups;  // interchangeable units
    std::vector<std::pair<int, std::vector<int>>> aggregates;     // count-disjunction rows
    double time_limit_sec = 0.0;
};

/// Contract required of any optimization engine plugged into the clearing
/// layer: integer solves to a relative gap, and LP solves with integrality
/// relaxed, optional bound fixes, and duals on every row. One backend
/// session must not share mutable state with another.
class SolverBackend {
public:
    virtual ~SolverBackend() = default;
    virtual std::string name() const = 0;
    virtual MipResult solve_mip(const LpProblem& lp, const MipSolveOptions& opt) = 0;
    virtual LpResult solve_lp(const LpProblem& lp, const std::vector<BoundFix>& fixes) = 0;
};

/// Built-in engine: bounded revised simplex plus branch and bound.
class BuiltinSimplexBackend final : public SolverBackend {
public:
    std::string name() const override { return "simplex"; }

    MipResult solve_mip(const LpProblem& lp, const MipSolveOptions& mo) override {
        MipOptions opt;
        opt.rel_gap = mo.rel_gap;
        opt.branch_priority = mo.branch_priority;
        opt.symmetry_groups = mo.symmetry_groups;
        opt.aggregates = mo.aggregates;
        opt.time_limit_sec = mo.time_limit_sec;
        return solve_mip_problem(lp, opt);
    }

    LpResult solve_lp(const LpProblem& lp, const std::vector<BoundFix>& fixes) override {
        SimplexSolver solver(lp);
        for (const auto& [j, b] : fixes) solver.set_col_bounds(j, b.first, b.second);
        return solver.solve();
    }
};

inline std::unique_ptr<SolverBackend> make_backend(const std::string& name) {
    if (name.empty() || name == "simplex") return std::make_unique<BuiltinSimplexBackend>();
    throw ValidationError("unknown solver backend '" + name + "'");
}

/// Backend selected by DAMSIM_BACKEND, defaulting to the built-in engine.
inline std::unique_ptr<SolverBackend> make_default_backend() {
    const char* env = std::getenv("DAMSIM_BACKEND");
    return make_backend(env ? env : "");
}

} // namespace damsim
