#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "damsim/lp.hpp"
#include "damsim/simplex.hpp"
#include "support/lp_check.hpp"

using namespace damsim;
using Catch::Approx;

TEST_CASE("equality row dual equals marginal cost") {
    // min 25 p  s.t.  p = 10,  p >= 0
    LpProblem lp;
    int p = lp.add_col(0.0, kInf, 25.0, "p");
    int bal = lp.add_row(10.0, 10.0, "balance");
    lp.add_entry(bal, p, 1.0);

    LpResult r = solve_lp(lp);
    REQUIRE(r.status == LpStatus::Optimal);
    CHECK(r.x[p] == Approx(10.0));
    CHECK(r.objective == Approx(250.0));
    CHECK(r.row_dual[bal] == Approx(25.0));
}

TEST_CASE("two-generator merit order with marginal unit setting the dual") {
    // min 10 a + 25 b  s.t.  a + b = 30,  a in [0, 25], b in [0, 25]
    LpProblem lp;
    int a = lp.add_col(0.0, 25.0, 10.0);
    int b = lp.add_col(0.0, 25.0, 25.0);
    int bal = lp.add_row(30.0, 30.0);
    lp.add_entry(bal, a, 1.0);
    lp.add_entry(bal, b, 1.0);

    LpResult r = solve_lp(lp);
    REQUIRE(r.status == LpStatus::Optimal);
    CHECK(r.x[a] == Approx(25.0));
    CHECK(r.x[b] == Approx(5.0));
    CHECK(r.objective == Approx(375.0));
    CHECK(r.row_dual[bal] == Approx(25.0));  // marginal unit is b
    auto rep = testing::check_lp_optimality(lp, r);
    INFO(rep.detail);
    CHECK(rep.ok);
}

TEST_CASE("binding inequality has the textbook dual sign") {
    // min -x  s.t.  x <= 5
    LpProblem lp;
    int x = lp.add_col(0.0, kInf, -1.0);
    int row = lp.add_row(-kInf, 5.0);
    lp.add_entry(row, x, 1.0);
    LpResult r = solve_lp(lp);
    REQUIRE(r.status == LpStatus::Optimal);
    CHECK(r.x[x] == Approx(5.0));
    CHECK(r.row_dual[row] == Approx(-1.0));

    // min x  s.t.  x >= 5
    LpProblem lp2;
    int x2 = lp2.add_col(-kInf, kInf, 1.0);
    int row2 = lp2.add_row(5.0, kInf);
    lp2.add_entry(row2, x2, 1.0);
    LpResult r2 = solve_lp(lp2);
    REQUIRE(r2.status == LpStatus::Optimal);
    CHECK(r2.x[x2] == Approx(5.0));
    CHECK(r2.row_dual[row2] == Approx(1.0));
}

TEST_CASE("infeasible and unbounded are reported") {
    LpProblem lp;
    int x = lp.add_col(0.0, 1.0, 1.0);
    int row = lp.add_row(2.0, kInf);  // x >= 2 with x <= 1
    lp.add_entry(row, x, 1.0);
    CHECK(solve_lp(lp).status == LpStatus::Infeasible);

    LpProblem lp2;
    lp2.add_col(-kInf, kInf, -1.0);  // min -x, x free, no rows
    CHECK(solve_lp(lp2).status == LpStatus::Unbounded);
}

TEST_CASE("fixed variables never enter the basis improperly") {
    // min x + y  s.t. x + y >= 4, x fixed at 1
    LpProblem lp;
    int x = lp.add_col(1.0, 1.0, 1.0);
    int y = lp.add_col(0.0, kInf, 1.0);
    int row = lp.add_row(4.0, kInf);
    lp.add_entry(row, x, 1.0);
    lp.add_entry(row, y, 1.0);
    LpResult r = solve_lp(lp);
    REQUIRE(r.status == LpStatus::Optimal);
    CHECK(r.x[x] == Approx(1.0));
    CHECK(r.x[y] == Approx(3.0));
    CHECK(r.objective == Approx(4.0));
}

TEST_CASE("negative lower bounds and upper-bounded entering (bound flip)") {
    // min -x - y with x in [-2, 3], y in [0, 1], x + y <= 2
    LpProblem lp;
    int x = lp.add_col(-2.0, 3.0, -1.0);
    int y = lp.add_col(0.0, 1.0, -1.0);
    int row = lp.add_row(-kInf, 2.0);
    lp.add_entry(row, x, 1.0);
    lp.add_entry(row, y, 1.0);
    LpResult r = solve_lp(lp);
    REQUIRE(r.status == LpStatus::Optimal);
    CHECK(r.objective == Approx(-2.0));
    auto rep = testing::check_lp_optimality(lp, r);
    INFO(rep.detail);
    CHECK(rep.ok);
}

TEST_CASE("degenerate LP still terminates with a valid certificate") {
    // Multiple redundant rows through the same vertex.
    LpProblem lp;
    int x = lp.add_col(0.0, 10.0, 1.0);
    int y = lp.add_col(0.0, 10.0, 2.0);
    for (int k = 0; k < 6; ++k) {
        int row = lp.add_row(4.0, kInf);
        lp.add_entry(row, x, 1.0);
        lp.add_entry(row, y, 1.0);
    }
    LpResult r = solve_lp(lp);
    REQUIRE(r.status == LpStatus::Optimal);
    CHECK(r.objective == Approx(4.0));
    auto rep = testing::check_lp_optimality(lp, r);
    INFO(rep.detail);
    CHECK(rep.ok);
}

TEST_CASE("random bounded LPs satisfy the KKT certificate", "[property]") {
    std::mt19937_64 rng(20240817);
    for (int trial = 0; trial < 300; ++trial) {
        LpProblem lp = testing::random_bounded_lp(rng);
        LpResult r = solve_lp(lp);
        REQUIRE(r.status == LpStatus::Optimal);  // built feasible and bounded
        auto rep = testing::check_lp_optimality(lp, r);
        INFO("trial " << trial << ": " << rep.detail);
        REQUIRE(rep.ok);
    }
}

TEST_CASE("warm start across a bound change reaches the new optimum") {
    LpProblem lp;
    int a = lp.add_col(0.0, 25.0, 10.0);
    int b = lp.add_col(0.0, 25.0, 25.0);
    int bal = lp.add_row(30.0, 30.0);
    lp.add_entry(bal, a, 1.0);
    lp.add_entry(bal, b, 1.0);

    SimplexSolver solver(lp);
    LpResult r1 = solver.solve();
    REQUIRE(r1.status == LpStatus::Optimal);
    SimplexBasis basis = solver.basis();

    solver.set_col_bounds(a, 0.0, 10.0);  // force the cheap unit down
    LpResult r2 = solver.solve(&basis);
    REQUIRE(r2.status == LpStatus::Optimal);
    CHECK(r2.x[a] == Approx(10.0));
    CHECK(r2.x[b] == Approx(20.0));
    CHECK(r2.objective == Approx(600.0));
}

TEST_CASE("lp dump renders a parseable model") {
    LpProblem lp;
    int x = lp.add_col(0.0, 2.0, 1.5, "x");
    lp.set_integer(x);
    int row = lp.add_row(1.0, 1.0, "r");
    lp.add_entry(row, x, 1.0);
    std::ostringstream os;
    lp.dump_lp(os);
    const std::string s = os.str();
    CHECK(s.find("Minimize") != std::string::npos);
    CHECK(s.find("Subject To") != std::string::npos);
    CHECK(s.find("x") != std::string::npos);
    CHECK(s.find("End") != std::string::npos);
}
