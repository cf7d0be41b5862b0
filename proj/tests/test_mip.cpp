#include <catch2/catch_amalgamated.hpp>

#include <bitset>
#include <random>

#include "damsim/lp.hpp"
#include "damsim/mip.hpp"

using namespace damsim;
using Catch::Approx;

namespace {

// Exhaustive oracle for pure-binary programs: feasibility and objective are
// evaluated directly from the matrix, independent of any LP machinery.
struct EnumResult {
    bool feasible = false;
    double objective = kInf;
};

EnumResult enumerate_binary(const LpProblem& lp) {
    const int n = lp.num_cols();
    EnumResult best;
    for (unsigned mask = 0; mask < (1u << n); ++mask) {
        std::vector<double> x(n);
        for (int j = 0; j < n; ++j) x[j] = (mask >> j) & 1u ? 1.0 : 0.0;
        bool ok = true;
        std::vector<double> act(lp.num_rows(), 0.0);
        for (int j = 0; j < n; ++j)
            for (const auto& [i, a] : lp.col(j)) act[i] += a * x[j];
        for (int i = 0; i < lp.num_rows() && ok; ++i)
            ok = act[i] >= lp.row_lower(i) - 1e-9 && act[i] <= lp.row_upper(i) + 1e-9;
        if (!ok) continue;
        double obj = 0.0;
        for (int j = 0; j < n; ++j) obj += lp.obj(j) * x[j];
        if (!best.feasible || obj < best.objective) {
            best.feasible = true;
            best.objective = obj;
        }
    }
    return best;
}

LpProblem random_binary_program(std::mt19937_64& rng) {
    std::uniform_int_distribution<int> nd(2, 10), md(1, 5);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    const int n = nd(rng), m = md(rng);
    LpProblem lp;
    for (int j = 0; j < n; ++j) {
        int c = lp.add_col(0.0, 1.0, -10.0 + 20.0 * U(rng));
        lp.set_integer(c);
    }
    for (int i = 0; i < m; ++i) {
        const double kind = U(rng);
        double lo = -kInf, up = kInf;
        const double rhs = -2.0 + U(rng) * (n + 2);
        if (kind < 0.4) up = rhs;
        else if (kind < 0.8) lo = rhs;
        else lo = rhs, up = rhs + 2.0;
        int row = lp.add_row(lo, up);
        for (int j = 0; j < n; ++j)
            if (U(rng) < 0.6) lp.add_entry(row, j, -3.0 + 6.0 * U(rng));
    }
    return lp;
}

} // namespace

TEST_CASE("knapsack optimum matches exhaustive enumeration") {
    // max 10a + 13b + 7c + 11d  s.t. 3a + 4b + 2c + 3d <= 7  (as a min problem)
    LpProblem lp;
    const double vals[] = {10, 13, 7, 11};
    const double wts[] = {3, 4, 2, 3};
    int row = lp.add_row(-kInf, 7.0);
    for (int j = 0; j < 4; ++j) {
        int c = lp.add_col(0.0, 1.0, -vals[j]);
        lp.set_integer(c);
        lp.add_entry(row, c, wts[j]);
    }
    MipResult r = solve_mip_problem(lp);
    REQUIRE(r.has_incumbent);
    EnumResult oracle = enumerate_binary(lp);
    CHECK(r.objective == Approx(oracle.objective).margin(1e-7));
    CHECK(r.gap <= 1e-4);
}

TEST_CASE("pure binary programs match the exhaustive oracle", "[property]") {
    std::mt19937_64 rng(99021);
    int feas = 0, infeas = 0;
    for (int trial = 0; trial < 120; ++trial) {
        LpProblem lp = random_binary_program(rng);
        EnumResult oracle = enumerate_binary(lp);
        MipOptions opt;
        opt.rel_gap = 1e-9;
        MipResult r = solve_mip_problem(lp, opt);
        INFO("trial " << trial);
        REQUIRE(r.has_incumbent == oracle.feasible);
        if (oracle.feasible) {
            REQUIRE(r.objective == Approx(oracle.objective).margin(1e-6));
            ++feas;
        } else {
            ++infeas;
        }
    }
    // The generator should exercise both outcomes.
    CHECK(feas > 10);
    CHECK(infeas > 2);
}

TEST_CASE("mixed problem: fixed charge forces the binary on") {
    // min 100 u + 2 p  s.t. p = 30, p <= 50 u, u binary
    LpProblem lp;
    int u = lp.add_col(0.0, 1.0, 100.0);
    lp.set_integer(u);
    int p = lp.add_col(0.0, kInf, 2.0);
    int bal = lp.add_row(30.0, 30.0);
    lp.add_entry(bal, p, 1.0);
    int cap = lp.add_row(-kInf, 0.0);  // p - 50u <= 0
    lp.add_entry(cap, p, 1.0);
    lp.add_entry(cap, u, -50.0);
    MipResult r = solve_mip_problem(lp);
    REQUIRE(r.has_incumbent);
    CHECK(r.x[u] == Approx(1.0));
    CHECK(r.objective == Approx(160.0));
}

TEST_CASE("loose gap still yields an incumbent within the proven bound") {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 20; ++trial) {
        LpProblem lp = random_binary_program(rng);
        EnumResult oracle = enumerate_binary(lp);
        if (!oracle.feasible) continue;
        MipOptions opt;
        opt.rel_gap = 0.3;
        MipResult r = solve_mip_problem(lp, opt);
        REQUIRE(r.has_incumbent);
        // Incumbent is within the reported gap of the true optimum.
        CHECK(r.objective - oracle.objective <=
              0.3 * std::max(1e-10, std::abs(r.objective)) + 1e-6);
        CHECK(r.objective >= oracle.objective - 1e-6);
    }
}

TEST_CASE("infeasible integer program reports no incumbent") {
    LpProblem lp;
    int a = lp.add_col(0.0, 1.0, 1.0);
    lp.set_integer(a);
    int row = lp.add_row(0.4, 0.6);  // a must be 0.4..0.6: no integer fits
    lp.add_entry(row, a, 1.0);
    MipResult r = solve_mip_problem(lp);
    CHECK_FALSE(r.has_incumbent);
}
