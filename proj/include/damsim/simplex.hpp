#pragma once

#include <Eigen/SparseCore>
#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

#include "damsim/common.hpp"
#include "damsim/lp.hpp"

namespace damsim {

enum class LpStatus { Optimal, Infeasible, Unbounded, IterationLimit };

struct LpResult {
    LpStatus status = LpStatus::Optimal;
    double objective = 0.0;
    std::vector<double> x;            // structural values
    std::vector<double> row_activity; // A x per row
    std::vector<double> row_dual;     // equality/inequality row duals (min convention)
    std::vector<double> col_dual;     // structural reduced costs
};

/// Basis snapshot for warm starts across bound changes (branch & bound).
struct SimplexBasis {
    std::vector<int> basic;      // m variable indices (structural < n, logical >= n)
    std::vector<uint8_t> vstat;  // n+m statuses
};

/// Revised primal simplex over bounded variables.
///
/// Internally the problem is solved in the form W z = 0 with W = [A | -I]:
/// each row i gets a logical column carrying the row activity, bounded by the
/// row's lower/upper limits. Basis inverses are held as an Eigen sparse LU of
/// a reference basis plus product-form eta updates; the factor is rebuilt
/// every few dozen pivots or when drift is detected.
///
/// Phase 1 minimizes the total bound violation of basic variables with the
/// usual composite costs (-1 below lower, +1 above upper), re-derived from
/// the current iterate each pass. Bland's rule engages after a run of
/// degenerate steps, so the method terminates on the degenerate LPs that
/// fixed-binary pricing produces.
struct SimplexOptions {
    double feas_tol = 1e-7;
    double dual_tol = 1e-7;
    double pivot_tol = 1e-9;
    int refactor_interval = 64;
    long iteration_limit = -1;  // -1: derived from problem size
};

class SimplexSolver {
public:
    using Options = SimplexOptions;

    explicit SimplexSolver(const LpProblem& lp, Options opt = Options()) : lp_(lp), opt_(opt) {
        n_ = lp.num_cols();
        m_ = lp.num_rows();
        nv_ = n_ + m_;
        lower_.resize(nv_);
        upper_.resize(nv_);
        cost_.assign(nv_, 0.0);
        for (int j = 0; j < n_; ++j) {
            lower_[j] = lp.col_lower(j);
            upper_[j] = lp.col_upper(j);
            cost_[j] = lp.obj(j);
        }
        for (int i = 0; i < m_; ++i) {
            lower_[n_ + i] = lp.row_lower(i);
            upper_[n_ + i] = lp.row_upper(i);
        }
        x_.assign(nv_, 0.0);
        vstat_.assign(nv_, kAtLower);
        basic_.resize(m_);
        basic_pos_.assign(nv_, -1);
        work_.resize(m_);
        work2_.resize(m_);
    }

    void set_col_bounds(int j, double lo, double up) {
        lower_[j] = lo;
        upper_[j] = up;
    }
    void set_row_bounds(int i, double lo, double up) {
        lower_[n_ + i] = lo;
        upper_[n_ + i] = up;
    }
    void set_obj(int j, double v) { cost_[j] = v; }
    void set_iteration_limit(long limit) { opt_.iteration_limit = limit; }
    double col_lower_bound(int j) const { return lower_[j]; }
    double col_upper_bound(int j) const { return upper_[j]; }
    double row_lower_bound(int i) const { return lower_[n_ + i]; }
    double row_upper_bound(int i) const { return upper_[n_ + i]; }

    LpResult solve(const SimplexBasis* warm = nullptr) {
        const bool warm_ok = warm && static_cast<int>(warm->basic.size()) == m_ &&
                             static_cast<int>(warm->vstat.size()) == nv_;
        if (warm_ok) {
            load_basis(*warm);
        } else {
            logical_basis();
        }
        reset_nonbasic_values();
        // The factor stays valid when restarting from the exact basis it
        // was built at (bounds and costs do not enter B).
        if (factor_ok_ && warm_ok && warm->basic == base_basic_) {
            etas_.clear();
        } else if (!refactorize()) {
            logical_basis();
            reset_nonbasic_values();
            if (!refactorize()) throw SolverError("simplex: singular logical basis");
        }
        compute_basic_values();

        const long itlim =
            opt_.iteration_limit > 0 ? opt_.iteration_limit : 2000 + 60L * (m_ + n_);
        LpStatus st = iterate(/*phase1=*/true, itlim);
        if (st == LpStatus::Optimal && total_infeasibility() > infeas_thresh())
            st = LpStatus::Infeasible;
        if (st == LpStatus::Optimal) st = iterate(/*phase1=*/false, itlim);

        return extract(st);
    }

    SimplexBasis basis() const {
        SimplexBasis b;
        b.basic = basic_;
        b.vstat = vstat_;
        return b;
    }

    long iterations() const { return total_iters_; }

private:
    static constexpr uint8_t kAtLower = 0, kAtUpper = 1, kBasic = 2, kFreeZero = 3;

    struct Eta {
        int r;
        double wr;
        std::vector<std::pair<int, double>> entries;  // (index, w_i), i != r
    };

    const LpProblem& lp_;
    Options opt_;
    int n_ = 0, m_ = 0, nv_ = 0;
    std::vector<double> lower_, upper_, cost_;
    std::vector<double> x_;
    std::vector<uint8_t> vstat_;
    std::vector<int> basic_;
    std::vector<int> basic_pos_;
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu_;
    bool factor_ok_ = false;
    std::vector<int> base_basic_;  // basis the factor was built at
    std::vector<Eta> etas_;
    Eigen::VectorXd work_, work2_;
    long total_iters_ = 0;

    double infeas_thresh() const { return opt_.feas_tol * 10.0; }

    // --- variable / column helpers -------------------------------------

    double preferred_bound_value(int j) const {
        if (lower_[j] > -kInf) return lower_[j];
        if (upper_[j] < kInf) return upper_[j];
        return 0.0;
    }

    void column_axpy(int j, double mult, Eigen::VectorXd& v) const {
        if (j < n_) {
            for (const auto& [i, a] : lp_.col(j)) v[i] += mult * a;
        } else {
            v[j - n_] -= mult;
        }
    }

    double column_dot(int j, const Eigen::VectorXd& y) const {
        if (j < n_) {
            double s = 0.0;
            for (const auto& [i, a] : lp_.col(j)) s += a * y[i];
            return s;
        }
        return -y[j - n_];
    }

    // --- basis management ----------------------------------------------

    void logical_basis() {
        std::fill(basic_pos_.begin(), basic_pos_.end(), -1);
        for (int i = 0; i < m_; ++i) {
            basic_[i] = n_ + i;
            basic_pos_[n_ + i] = i;
            vstat_[n_ + i] = kBasic;
        }
        for (int j = 0; j < n_; ++j) vstat_[j] = initial_nonbasic_status(j);
    }

    uint8_t initial_nonbasic_status(int j) const {
        if (lower_[j] > -kInf) return kAtLower;
        if (upper_[j] < kInf) return kAtUpper;
        return kFreeZero;
    }

    void load_basis(const SimplexBasis& b) {
        basic_ = b.basic;
        vstat_ = b.vstat;
        std::fill(basic_pos_.begin(), basic_pos_.end(), -1);
        for (int i = 0; i < m_; ++i) basic_pos_[basic_[i]] = i;
        // Repair statuses that no longer match finite bounds.
        for (int j = 0; j < nv_; ++j) {
            if (vstat_[j] == kBasic) continue;
            if (vstat_[j] == kAtLower && lower_[j] <= -kInf) vstat_[j] = initial_nonbasic_status(j);
            if (vstat_[j] == kAtUpper && upper_[j] >= kInf) vstat_[j] = initial_nonbasic_status(j);
        }
    }

    void reset_nonbasic_values() {
        for (int j = 0; j < nv_; ++j) {
            switch (vstat_[j]) {
                case kAtLower: x_[j] = lower_[j]; break;
                case kAtUpper: x_[j] = upper_[j]; break;
                case kFreeZero: x_[j] = 0.0; break;
                default: break;
            }
        }
    }

    bool refactorize() {
        if (m_ == 0) {
            etas_.clear();
            return true;
        }
        Eigen::SparseMatrix<double> B(m_, m_);
        std::vector<Eigen::Triplet<double>> trips;
        for (int k = 0; k < m_; ++k) {
            const int j = basic_[k];
            if (j < n_) {
                for (const auto& [i, a] : lp_.col(j)) trips.emplace_back(i, k, a);
            } else {
                trips.emplace_back(j - n_, k, -1.0);
            }
        }
        B.setFromTriplets(trips.begin(), trips.end());
        lu_.compute(B);
        etas_.clear();
        factor_ok_ = lu_.info() == Eigen::Success;
        if (factor_ok_) base_basic_ = basic_;
        return factor_ok_;
    }

    void ftran(Eigen::VectorXd& v) const {
        if (m_ == 0) return;
        v = lu_.solve(v);
        for (const auto& e : etas_) {
            double piv = v[e.r] / e.wr;
            if (piv != 0.0)
                for (const auto& [i, w] : e.entries) v[i] -= w * piv;
            v[e.r] = piv;
        }
    }

    void btran(Eigen::VectorXd& v) {
        if (m_ == 0) return;
        for (auto it = etas_.rbegin(); it != etas_.rend(); ++it) {
            double s = v[it->r];
            for (const auto& [i, w] : it->entries) s -= w * v[i];
            v[it->r] = s / it->wr;
        }
        v = lu_.transpose().solve(v);
    }

    void compute_basic_values() {
        work_.setZero();
        for (int j = 0; j < nv_; ++j) {
            if (vstat_[j] == kBasic || x_[j] == 0.0) continue;
            column_axpy(j, -x_[j], work_);
        }
        ftran(work_);
        for (int k = 0; k < m_; ++k) x_[basic_[k]] = work_[k];
    }

    double total_infeasibility() const {
        double s = 0.0;
        for (int k = 0; k < m_; ++k) {
            const int j = basic_[k];
            if (x_[j] < lower_[j]) s += lower_[j] - x_[j];
            if (x_[j] > upper_[j]) s += x_[j] - upper_[j];
        }
        return s;
    }

    // --- main loop -------------------------------------------------------

    LpStatus iterate(bool phase1, long itlim) {
        int degenerate_run = 0;
        bool bland = false;
        for (long it = 0; it < itlim; ++it, ++total_iters_) {
            if (static_cast<int>(etas_.size()) >= opt_.refactor_interval) {
                if (!refactorize()) return recover_singular();
                compute_basic_values();
            }
            if (phase1 && total_infeasibility() <= infeas_thresh()) return LpStatus::Optimal;

            // Dual vector for the current (possibly composite) cost.
            Eigen::VectorXd& y = work_;
            for (int k = 0; k < m_; ++k) {
                const int j = basic_[k];
                y[k] = phase1 ? phase1_cost(j) : cost_[j];
            }
            btran(y);

            const int q = price(phase1, y, bland);
            if (q < 0) return LpStatus::Optimal;  // no improving candidate

            const double dj = reduced_cost(phase1, q, y);
            const int dir = entering_direction(q, dj);

            // Pivot column in basis coordinates.
            Eigen::VectorXd& w = work2_;
            w.setZero();
            column_axpy(q, 1.0, w);
            ftran(w);

            RatioResult rr = ratio_test(phase1, q, dir, w, bland);
            if (rr.unbounded) return phase1 ? LpStatus::Infeasible : LpStatus::Unbounded;

            apply_step(q, dir, rr, w);

            if (rr.step <= opt_.pivot_tol) {
                if (++degenerate_run > 150) bland = true;
            } else {
                degenerate_run = 0;
                bland = false;
            }
        }
        return LpStatus::IterationLimit;
    }

    LpStatus recover_singular() {
        // Numerical emergency: restart from the logical basis.
        logical_basis();
        reset_nonbasic_values();
        if (!refactorize()) throw SolverError("simplex: unable to factorize logical basis");
        compute_basic_values();
        return LpStatus::IterationLimit;
    }

    double phase1_cost(int j) const {
        if (vstat_[j] != kBasic) return 0.0;
        if (x_[j] < lower_[j] - opt_.feas_tol) return -1.0;
        if (x_[j] > upper_[j] + opt_.feas_tol) return 1.0;
        return 0.0;
    }

    double reduced_cost(bool phase1, int j, const Eigen::VectorXd& y) const {
        const double c = phase1 ? 0.0 : cost_[j];
        return c - column_dot(j, y);
    }

    int price(bool phase1, const Eigen::VectorXd& y, bool bland) const {
        int best = -1;
        double best_score = opt_.dual_tol;
        for (int j = 0; j < nv_; ++j) {
            const uint8_t st = vstat_[j];
            if (st == kBasic) continue;
            if (lower_[j] == upper_[j]) continue;  // fixed: never enters
            const double d = reduced_cost(phase1, j, y);
            double score = 0.0;
            if (st == kAtLower && d < -opt_.dual_tol) score = -d;
            else if (st == kAtUpper && d > opt_.dual_tol) score = d;
            else if (st == kFreeZero && std::abs(d) > opt_.dual_tol) score = std::abs(d);
            if (score > 0.0) {
                if (bland) return j;  // first eligible index
                if (score > best_score) {
                    best_score = score;
                    best = j;
                }
            }
        }
        return best;
    }

    static int entering_direction(int, double dj) { return dj < 0.0 ? +1 : -1; }

    struct RatioResult {
        double step = 0.0;
        int leaving_pos = -1;   // -1: bound flip
        bool leaving_to_upper = false;
        bool unbounded = false;
    };

    RatioResult ratio_test(bool phase1, int q, int dir, const Eigen::VectorXd& w,
                           bool bland) const {
        RatioResult rr;
        double best = kInf;
        if (lower_[q] > -kInf && upper_[q] < kInf) best = upper_[q] - lower_[q];
        int best_pos = -1;
        bool best_to_upper = false;
        double best_piv = 0.0;

        for (int k = 0; k < m_; ++k) {
            const double wk = w[k];
            if (std::abs(wk) <= opt_.pivot_tol) continue;
            const int j = basic_[k];
            const double rate = -wk * dir;  // movement of basic j per unit step
            const double xj = x_[j], lo = lower_[j], up = upper_[j];
            double limit = kInf;
            bool to_upper = false;
            const bool below = phase1 && xj < lo - opt_.feas_tol;
            const bool above = phase1 && xj > up + opt_.feas_tol;
            if (below) {
                if (rate > 0.0) limit = (lo - xj) / rate;  // climbs back to lower
                else continue;
            } else if (above) {
                if (rate < 0.0) limit = (xj - up) / (-rate), to_upper = true;
                else continue;
            } else if (rate > 0.0) {
                if (up >= kInf) continue;
                limit = (up - xj) / rate;
                to_upper = true;
            } else {
                if (lo <= -kInf) continue;
                limit = (xj - lo) / (-rate);
            }
            if (limit < -1e-9) limit = 0.0;
            limit = std::max(limit, 0.0);
            const bool better =
                bland ? (limit < best - 1e-12 || (limit <= best + 1e-12 && best_pos >= 0 &&
                                                  j < basic_[best_pos]))
                      : (limit < best - 1e-10 ||
                         (limit <= best + 1e-10 && std::abs(wk) > std::abs(best_piv)));
            if (limit < best + (bland ? 1e-12 : 1e-10) && better) {
                best = limit;
                best_pos = k;
                best_to_upper = to_upper;
                best_piv = wk;
            }
        }

        if (best >= kInf) {
            rr.unbounded = true;
            return rr;
        }
        rr.step = best;
        rr.leaving_pos = best_pos;
        rr.leaving_to_upper = best_to_upper;
        return rr;
    }

    void apply_step(int q, int dir, const RatioResult& rr, const Eigen::VectorXd& w) {
        const double delta = rr.step;
        if (delta != 0.0) {
            for (int k = 0; k < m_; ++k) {
                if (w[k] == 0.0) continue;
                x_[basic_[k]] += -w[k] * dir * delta;
            }
        }
        x_[q] += dir * delta;

        if (rr.leaving_pos < 0) {
            // Bound flip: entering variable traverses to its other bound.
            vstat_[q] = dir > 0 ? kAtUpper : kAtLower;
            x_[q] = dir > 0 ? upper_[q] : lower_[q];
            return;
        }

        const int r = rr.leaving_pos;
        const int leaving = basic_[r];
        vstat_[leaving] = rr.leaving_to_upper ? kAtUpper : kAtLower;
        x_[leaving] = rr.leaving_to_upper ? upper_[leaving] : lower_[leaving];
        basic_pos_[leaving] = -1;
        basic_[r] = q;
        basic_pos_[q] = r;
        vstat_[q] = kBasic;

        Eta e;
        e.r = r;
        e.wr = w[r];
        for (int k = 0; k < m_; ++k) {
            if (k == r || w[k] == 0.0) continue;
            e.entries.emplace_back(k, w[k]);
        }
        etas_.push_back(std::move(e));
    }

    // --- result extraction ------------------------------------------------

    LpResult extract(LpStatus st) {
        // Fresh factorization keeps the reported values and duals tight.
        if (st == LpStatus::Optimal && !etas_.empty()) {
            if (refactorize()) compute_basic_values();
        }
        LpResult res;
        res.status = st;
        res.x.assign(n_, 0.0);
        for (int j = 0; j < n_; ++j) res.x[j] = x_[j];
        res.row_activity.assign(m_, 0.0);
        for (int i = 0; i < m_; ++i) res.row_activity[i] = x_[n_ + i];
        double obj = 0.0;
        for (int j = 0; j < n_; ++j) obj += cost_[j] * x_[j];
        res.objective = obj;

        for (int k = 0; k < m_; ++k) work_[k] = cost_[basic_[k]];
        Eigen::VectorXd y = work_;
        btran(y);
        res.row_dual.assign(m_, 0.0);
        for (int i = 0; i < m_; ++i) res.row_dual[i] = y[i];
        res.col_dual.assign(n_, 0.0);
        for (int j = 0; j < n_; ++j)
            res.col_dual[j] = vstat_[j] == kBasic ? 0.0 : cost_[j] - column_dot(j, y);
        return res;
    }
};

/// Convenience single-shot LP solve.
inline LpResult solve_lp(const LpProblem& lp, SimplexSolver::Options opt = SimplexSolver::Options()) {
    SimplexSolver s(lp, opt);
    return s.solve();
}

} // namespace damsim
