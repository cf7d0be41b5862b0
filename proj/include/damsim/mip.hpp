#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <memory>
#include <optional>
#include <queue>
#include <vector>

#include "damsim/common.hpp"
#include "damsim/lp.hpp"
#include "damsim/simplex.hpp"

namespace damsim {

struct MipOptions {
    double rel_gap = 1e-4;   // terminate when (incumbent - bound)/|incumbent| <= rel_gap
    double int_tol = 1e-6;   // integrality tolerance on integer columns
    long node_limit = 5'000'000;
    double time_limit_sec = 0.0;      // 0: none
    std::vector<int> branch_priority; // branch these columns first while fractional
    // Interchangeable-unit symmetry: groups -> units -> columns in a fixed
    // role order. Units of one group must be mutual images under permuting
    // their column lists (identical bounds, costs, and constraint pattern).
    std::vector<std::vector<std::vector<int>>> symmetry_groups;
    // Count disjunctions: (free row, integer member columns). The row must
    // carry sum(members) with unrestricted bounds; branching tightens it to
    // (<= floor) / (>= ceil) whenever the member sum is fractional, which
    // resolves interchangeable-unit counts without touching identities.
    std::vector<std::pair<int, std::vector<int>>> aggregates;
    long log_every = 0;  // > 0: progress lines to stderr
};

struct MipResult {
    bool has_incumbent = false;
    double objective = 0.0;
    double best_bound = -kInf;
    double gap = 0.0;
    long nodes = 0;
    std::vector<double> x;
};

/// Branch and bound over the simplex relaxation.
///
/// Search runs best-bound with plunging: the weakest-bound node comes off a
/// heap and is explored depth-first; both children of every branching step
/// are probed with iteration-capped LP solves, the dive follows the cheaper
/// child, and the sibling goes back to the heap carrying its probed bound
/// (or is discarded immediately when that bound already exceeds the
/// incumbent threshold). Branching prefers, in order: fractional count
/// aggregates, then priority columns, then any fractional integer, in fixed
/// index order so one region is resolved at a time. Zero-side branches of
/// binaries in a symmetric orbit zero the whole orbit (orbital branching);
/// probe results that dominate or turn infeasible fix the opposite side in
/// place.
class MipSolver {
public:
    MipSolver(const LpProblem& lp, MipOptions opt = MipOptions())
        : lp_(lp), opt_(opt), simplex_(lp), int_cols_(lp.integer_cols()) {
        is_priority_.assign(lp.num_cols(), false);
        bool any = false;
        for (int j : opt_.branch_priority)
            if (lp.is_integer(j)) {
                is_priority_[j] = true;
                any = true;
            }
        has_priority_ = any;

        col_group_.assign(lp.num_cols(), -1);
        col_unit_.assign(lp.num_cols(), -1);
        col_role_.assign(lp.num_cols(), -1);
        for (size_t g = 0; g < opt_.symmetry_groups.size(); ++g) {
            const auto& units = opt_.symmetry_groups[g];
            if (units.size() < 2) continue;
            for (size_t u = 0; u < units.size(); ++u)
                for (size_t r = 0; r < units[u].size(); ++r) {
                    const int col = units[u][r];
                    col_group_[col] = static_cast<int>(g);
                    col_unit_[col] = static_cast<int>(u);
                    col_role_[col] = static_cast<int>(r);
                }
        }
    }

    MipResult solve() {
        const auto t0 = std::chrono::steady_clock::now();
        incumbent_ = kInf;
        incumbent_x_.clear();
        nodes_ = 0;

        std::priority_queue<HeapEntry> heap;
        heap.push({kInf, next_seq_++, std::make_shared<Node>(Node{{}, nullptr, -kInf})});

        while (!heap.empty()) {
            HeapEntry top = heap.top();
            heap.pop();
            if (top.node->parent_bound >= prune_threshold()) {
                best_frontier_ = std::min(best_frontier_, top.node->parent_bound);
                break;  // everything left is at least this weak
            }
            plunge(*top.node, heap, t0);
            if (nodes_ >= opt_.node_limit || time_exceeded(t0)) break;
        }

        MipResult res;
        res.nodes = nodes_;
        res.has_incumbent = incumbent_ < kInf;
        res.objective = incumbent_;
        res.x = incumbent_x_;
        double bound = std::min(incumbent_, best_frontier_);
        while (!heap.empty()) {
            bound = std::min(bound, heap.top().node->parent_bound);
            heap.pop();
        }
        res.best_bound = bound;
        res.gap = res.has_incumbent
                      ? (res.objective - res.best_bound) / std::max(1e-10, std::abs(res.objective))
                      : kInf;
        if (nodes_ >= opt_.node_limit)
            throw SolverError("mip: node limit reached (best " +
                              (res.has_incumbent ? std::to_string(res.objective) : "none") + ")");
        if (time_exceeded(t0))
            throw SolverError("mip: time limit reached (best " +
                              (res.has_incumbent ? std::to_string(res.objective) : "none") + ")");
        return res;
    }

private:
    // A bound change targets a column (target < num_cols) or a row
    // (target - num_cols), so count disjunctions ride the same path data.
    struct BoundChange {
        int target;
        double lo, up;
    };

    struct Node {
        std::vector<BoundChange> changes;           // from root
        std::shared_ptr<const SimplexBasis> basis;  // parent basis
        double parent_bound = -kInf;
    };

    struct HeapEntry {
        double neg_bound;  // max-heap on -bound => min bound first
        long seq;
        std::shared_ptr<Node> node;
        bool operator<(const HeapEntry& o) const {
            if (neg_bound != o.neg_bound) return neg_bound < o.neg_bound;
            return seq < o.seq;  // newest first among ties
        }
    };

    const LpProblem& lp_;
    MipOptions opt_;
    SimplexSolver simplex_;
    std::vector<int> int_cols_;
    std::vector<bool> is_priority_;
    bool has_priority_ = false;
    std::vector<int> col_group_, col_unit_, col_role_;
    double incumbent_ = kInf;
    std::vector<double> incumbent_x_;
    double best_frontier_ = kInf;
    long nodes_ = 0;
    long next_seq_ = 0;

    bool time_exceeded(std::chrono::steady_clock::time_point t0) const {
        if (opt_.time_limit_sec <= 0.0) return false;
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count() >
               opt_.time_limit_sec;
    }

    double prune_threshold() const {
        if (incumbent_ >= kInf) return kInf;
        return incumbent_ - std::max(1e-9, opt_.rel_gap * std::abs(incumbent_));
    }

    void apply_changes(const std::vector<BoundChange>& changes) {
        for (int j : int_cols_) simplex_.set_col_bounds(j, lp_.col_lower(j), lp_.col_upper(j));
        for (const auto& [row, cols] : opt_.aggregates)
            simplex_.set_row_bounds(row, lp_.row_lower(row), lp_.row_upper(row));
        for (const auto& c : changes) {
            if (c.target < lp_.num_cols()) simplex_.set_col_bounds(c.target, c.lo, c.up);
            else simplex_.set_row_bounds(c.target - lp_.num_cols(), c.lo, c.up);
        }
    }

    std::vector<int> fractional_candidates(const std::vector<double>& x) const {
        std::vector<int> cand;
        for (int j : int_cols_) {
            const double f = std::abs(x[j] - std::round(x[j]));
            if (f > opt_.int_tol) cand.push_back(j);
        }
        if (has_priority_) {
            std::vector<int> prio;
            for (int j : cand)
                if (is_priority_[j]) prio.push_back(j);
            if (!prio.empty()) cand = std::move(prio);
        }
        // Fixed index order keeps the search resolving one region at a time.
        if (cand.size() > 4) cand.resize(4);
        return cand;
    }

    // First count aggregate with a fractional member sum, if any.
    int fractional_aggregate(const std::vector<double>& x) const {
        for (size_t a = 0; a < opt_.aggregates.size(); ++a) {
            double act = 0.0;
            for (int j : opt_.aggregates[a].second) act += x[j];
            if (std::abs(act - std::round(act)) > opt_.int_tol) return static_cast<int>(a);
        }
        return -1;
    }

    std::optional<double> probe_child(Node& node, const SimplexBasis& basis,
                                      const std::vector<BoundChange>& extra) {
        const size_t base = node.changes.size();
        for (const auto& c : extra) node.changes.push_back(c);
        apply_changes(node.changes);
        node.changes.resize(base);
        simplex_.set_iteration_limit(800);
        LpResult r = simplex_.solve(&basis);
        simplex_.set_iteration_limit(-1);
        if (r.status == LpStatus::Optimal) return r.objective;
        if (r.status == LpStatus::Infeasible) return kInf;
        return std::nullopt;
    }

    // Columns interchangeable with col under the subproblem's remaining
    // symmetry: same group and role, with identical per-unit bound changes.
    std::vector<int> orbit_of(int col, const std::vector<BoundChange>& changes) const {
        if (col_group_[col] < 0) return {col};
        const int g = col_group_[col], unit = col_unit_[col], role = col_role_[col];
        auto signature = [&](int u) {
            std::vector<std::tuple<int, double, double>> sig;
            for (const auto& c : changes)
                if (c.target < lp_.num_cols() && col_group_[c.target] == g &&
                    col_unit_[c.target] == u)
                    sig.emplace_back(col_role_[c.target], c.lo, c.up);
            std::sort(sig.begin(), sig.end());
            return sig;
        };
        const auto base = signature(unit);
        std::vector<int> orbit;
        const auto& units = opt_.symmetry_groups[g];
        for (size_t u = 0; u < units.size(); ++u)
            if (signature(static_cast<int>(u)) == base) orbit.push_back(units[u][role]);
        return orbit;
    }

    void note_frontier(double bound) { best_frontier_ = std::min(best_frontier_, bound); }

    /// Depth-first exploration from one heap node.
    void plunge(Node start, std::priority_queue<HeapEntry>& heap,
                std::chrono::steady_clock::time_point t0) {
        Node node = std::move(start);
        while (true) {
            if (nodes_ >= opt_.node_limit || time_exceeded(t0)) return;
            ++nodes_;
            if (opt_.log_every > 0 && nodes_ % opt_.log_every == 0)
                std::fprintf(stderr, "[mip] nodes=%ld heap=%zu inc=%.8g bound>=%.8g depth=%zu\n",
                             nodes_, heap.size(), incumbent_, node.parent_bound,
                             node.changes.size());
            if (node.parent_bound >= prune_threshold()) {
                note_frontier(node.parent_bound);
                return;
            }
            apply_changes(node.changes);
            LpResult rel = simplex_.solve(node.basis ? node.basis.get() : nullptr);
            if (rel.status == LpStatus::IterationLimit)
                throw SolverError("mip: simplex iteration limit in node relaxation");
            if (rel.status == LpStatus::Unbounded)
                throw SolverError("mip: unbounded relaxation");
            if (rel.status == LpStatus::Infeasible) return;
            if (rel.objective >= prune_threshold()) {
                note_frontier(rel.objective);
                return;
            }

            // Branching object: count aggregate first, then column.
            const int agg = fractional_aggregate(rel.x);
            std::vector<BoundChange> down_ch, up_ch;
            if (agg >= 0) {
                const auto& [row, members] = opt_.aggregates[agg];
                double act = 0.0;
                for (int j : members) act += rel.x[j];
                const double cur_lo = simplex_.row_lower_bound(row);
                const double cur_up = simplex_.row_upper_bound(row);
                down_ch = {{lp_.num_cols() + row, cur_lo, std::floor(act)}};
                up_ch = {{lp_.num_cols() + row, std::ceil(act), cur_up}};
            } else {
                auto cand = fractional_candidates(rel.x);
                if (cand.empty()) {
                    if (rel.objective < incumbent_) {
                        incumbent_ = rel.objective;
                        incumbent_x_ = rel.x;
                        for (int j : int_cols_) incumbent_x_[j] = std::round(incumbent_x_[j]);
                        if (opt_.log_every > 0)
                            std::fprintf(stderr, "[mip] incumbent %.8f at node %ld depth %zu\n",
                                         incumbent_, nodes_, node.changes.size());
                    }
                    return;
                }
                const int bvar = cand.front();
                const double fl = std::floor(rel.x[bvar]);
                const bool orbital = lp_.col_lower(bvar) == 0.0 && lp_.col_upper(bvar) == 1.0 &&
                                     fl == 0.0 && col_group_[bvar] >= 0;
                if (orbital) {
                    for (int j2 : orbit_of(bvar, node.changes)) down_ch.push_back({j2, 0.0, 0.0});
                } else {
                    down_ch = {{bvar, simplex_.col_lower_bound(bvar), fl}};
                }
                up_ch = {{bvar, std::ceil(rel.x[bvar]), simplex_.col_upper_bound(bvar)}};
            }

            auto basis = std::make_shared<const SimplexBasis>(simplex_.basis());
            std::optional<double> bdown = probe_child(node, *basis, down_ch);
            std::optional<double> bup = probe_child(node, *basis, up_ch);
            const double down_bound = bdown ? *bdown : rel.objective;
            const double up_bound = bup ? *bup : rel.objective;

            Node down{node.changes, basis, down_bound};
            for (const auto& c : down_ch) down.changes.push_back(c);
            Node up{std::move(node.changes), basis, up_bound};
            for (const auto& c : up_ch) up.changes.push_back(c);

            const bool down_first = down_bound <= up_bound;
            Node far = down_first ? std::move(up) : std::move(down);
            Node near = down_first ? std::move(down) : std::move(up);
            if (far.parent_bound < prune_threshold()) {
                heap.push({-far.parent_bound, next_seq_++,
                           std::make_shared<Node>(std::move(far))});
            } else {
                note_frontier(far.parent_bound);
            }
            if (near.parent_bound >= prune_threshold()) {
                note_frontier(near.parent_bound);
                return;
            }
            node = std::move(near);
        }
    }
};

inline MipResult solve_mip_problem(const LpProblem& lp, MipOptions opt = MipOptions()) {
    MipSolver s(lp, opt);
    return s.solve();
}

} // namespace damsim
