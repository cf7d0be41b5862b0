#pragma once

// Implementation-independent LP optimality certificate used by the solver
// tests: primal feasibility, dual sign conditions, and complementary
// slackness together certify global optimality of an LP solve, so no
// reference solver is needed.

#include <cmath>
#include <random>
#include <vector>

#include "damsim/lp.hpp"
#include "damsim/simplex.hpp"

namespace damsim::testing {

struct KktReport {
    bool ok = true;
    std::string detail;
};

inline KktReport check_lp_optimality(const LpProblem& lp, const LpResult& res,
                                     double tol = 1e-6) {
    KktReport rep;
    auto fail = [&](const std::string& what) {
        rep.ok = false;
        if (!rep.detail.empty()) rep.detail += "; ";
        rep.detail += what;
    };
    const int n = lp.num_cols(), m = lp.num_rows();

    // Recompute activities from scratch.
    std::vector<double> act(m, 0.0);
    for (int j = 0; j < n; ++j)
        for (const auto& [i, a] : lp.col(j)) act[i] += a * res.x[j];

    for (int j = 0; j < n; ++j) {
        if (res.x[j] < lp.col_lower(j) - tol || res.x[j] > lp.col_upper(j) + tol)
            fail("col " + std::to_string(j) + " bound violation");
    }
    for (int i = 0; i < m; ++i) {
        if (act[i] < lp.row_lower(i) - tol || act[i] > lp.row_upper(i) + tol)
            fail("row " + std::to_string(i) + " activity violation");
        if (std::abs(act[i] - res.row_activity[i]) > tol * 10)
            fail("row " + std::to_string(i) + " activity mismatch");
    }

    // Reduced costs from the returned duals.
    for (int j = 0; j < n; ++j) {
        double d = lp.obj(j);
        for (const auto& [i, a] : lp.col(j)) d -= a * res.row_dual[i];
        if (std::abs(d - res.col_dual[j]) > 1e-5) fail("col " + std::to_string(j) + " dual mismatch");
        const bool fixed = lp.col_lower(j) == lp.col_upper(j);
        if (fixed) continue;
        const bool at_lo = res.x[j] <= lp.col_lower(j) + tol;
        const bool at_up = res.x[j] >= lp.col_upper(j) - tol;
        if (!at_lo && !at_up && std::abs(d) > 1e-5)
            fail("col " + std::to_string(j) + " interior with nonzero reduced cost");
        if (at_lo && !at_up && d < -1e-5) fail("col " + std::to_string(j) + " lower sign");
        if (at_up && !at_lo && d > 1e-5) fail("col " + std::to_string(j) + " upper sign");
    }
    for (int i = 0; i < m; ++i) {
        if (lp.row_lower(i) == lp.row_upper(i)) continue;
        const double y = res.row_dual[i];
        const bool at_lo = lp.row_lower(i) > -kInf && act[i] <= lp.row_lower(i) + tol;
        const bool at_up = lp.row_upper(i) < kInf && act[i] >= lp.row_upper(i) - tol;
        if (!at_lo && !at_up && std::abs(y) > 1e-5)
            fail("row " + std::to_string(i) + " interior with nonzero dual");
        if (at_lo && !at_up && y < -1e-5) fail("row " + std::to_string(i) + " lower dual sign");
        if (at_up && !at_lo && y > 1e-5) fail("row " + std::to_string(i) + " upper dual sign");
    }
    return rep;
}

/// Random bounded-feasible LP built around a known interior point.
inline LpProblem random_bounded_lp(std::mt19937_64& rng) {
    std::uniform_int_distribution<int> dim(1, 8);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    const int n = dim(rng), m = dim(rng);
    LpProblem lp;
    std::vector<double> x0(n);
    for (int j = 0; j < n; ++j) {
        x0[j] = -5.0 + 10.0 * U(rng);
        const double lo = x0[j] - 4.0 * U(rng);
        const double up = x0[j] + 4.0 * U(rng);
        lp.add_col(lo, up, -10.0 + 20.0 * U(rng));
    }
    for (int i = 0; i < m; ++i) {
        double act0 = 0.0;
        std::vector<std::pair<int, double>> entries;
        for (int j = 0; j < n; ++j) {
            if (U(rng) < 0.4) continue;
            const double a = -3.0 + 6.0 * U(rng);
            entries.emplace_back(j, a);
            act0 += a * x0[j];
        }
        const double kind = U(rng);
        int row;
        if (kind < 0.25) row = lp.add_row(act0, act0);
        else if (kind < 0.5) row = lp.add_row(-kInf, act0 + 3.0 * U(rng));
        else if (kind < 0.75) row = lp.add_row(act0 - 3.0 * U(rng), kInf);
        else row = lp.add_row(act0 - 3.0 * U(rng), act0 + 3.0 * U(rng));
        for (auto& [j, a] : entries) lp.add_entry(row, j, a);
    }
    return lp;
}

} // namespace damsim::testing
