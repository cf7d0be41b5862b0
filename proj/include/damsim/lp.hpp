#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "damsim/common.hpp"

namespace damsim {

/// Sparse linear program in column form.
///
/// minimize    c'x
/// subject to  row_lower <= A x <= row_upper
///             col_lower <=   x <= col_upper
///
/// Equality rows have row_lower == row_upper. Columns marked integer are
/// branched on by the MIP solver; the LP path treats them as continuous.
class LpProblem {
public:
    int num_cols() const { return static_cast<int>(col_lower_.size()); }
    int num_rows() const { return static_cast<int>(row_lower_.size()); }

    int add_col(double lower, double upper, double obj, std::string name = {}) {
        col_lower_.push_back(lower);
        col_upper_.push_back(upper);
        obj_.push_back(obj);
        cols_.emplace_back();
        integer_.push_back(false);
        col_names_.push_back(std::move(name));
        return num_cols() - 1;
    }

    int add_row(double lower, double upper, std::string name = {}) {
        row_lower_.push_back(lower);
        row_upper_.push_back(upper);
        row_names_.push_back(std::move(name));
        return num_rows() - 1;
    }

    void add_entry(int row, int col, double value) {
        if (value == 0.0) return;
        cols_[col].emplace_back(row, value);
    }

    void set_integer(int col, bool flag = true) { integer_[col] = flag; }
    bool is_integer(int col) const { return integer_[col]; }

    void set_col_bounds(int col, double lower, double upper) {
        col_lower_[col] = lower;
        col_upper_[col] = upper;
    }
    void set_row_bounds(int row, double lower, double upper) {
        row_lower_[row] = lower;
        row_upper_[row] = upper;
    }
    void set_obj(int col, double value) { obj_[col] = value; }

    double col_lower(int col) const { return col_lower_[col]; }
    double col_upper(int col) const { return col_upper_[col]; }
    double obj(int col) const { return obj_[col]; }
    double row_lower(int row) const { return row_lower_[row]; }
    double row_upper(int row) const { return row_upper_[row]; }

    const std::vector<std::pair<int, double>>& col(int j) const { return cols_[j]; }

    const std::string& col_name(int j) const { return col_names_[j]; }
    const std::string& row_name(int i) const { return row_names_[i]; }

    std::vector<int> integer_cols() const {
        std::vector<int> out;
        for (int j = 0; j < num_cols(); ++j)
            if (integer_[j]) out.push_back(j);
        return out;
    }

    /// Writes the model in CPLEX LP text format (debugging aid).
    void dump_lp(std::ostream& os) const;

private:
    std::vector<double> col_lower_, col_upper_, obj_;
    std::vector<double> row_lower_, row_upper_;
    std::vector<std::vector<std::pair<int, double>>> cols_;
    std::vector<bool> integer_;
    std::vector<std::string> col_names_, row_names_;
};

namespace detail {
inline std::string lp_num(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}
} // namespace detail

inline void LpProblem::dump_lp(std::ostream& os) const {
    auto cname = [&](int j) {
        return col_names_[j].empty() ? "x" + std::to_string(j) : col_names_[j];
    };
    os << "Minimize\n obj:";
    for (int j = 0; j < num_cols(); ++j) {
        if (obj_[j] == 0.0) continue;
        os << (obj_[j] >= 0 ? " + " : " - ") << detail::lp_num(std::abs(obj_[j])) << " " << cname(j);
    }
    os << "\nSubject To\n";
    // Rebuild rows from columns for printing.
    std::vector<std::vector<std::pair<int, double>>> rows(num_rows());
    for (int j = 0; j < num_cols(); ++j)
        for (const auto& [i, v] : cols_[j]) rows[i].emplace_back(j, v);
    for (int i = 0; i < num_rows(); ++i) {
        std::string rn = row_names_[i].empty() ? "r" + std::to_string(i) : row_names_[i];
        auto body = [&] {
            for (const auto& [j, v] : rows[i])
                os << (v >= 0 ? " + " : " - ") << detail::lp_num(std::abs(v)) << " " << cname(j);
        };
        const double lo = row_lower_[i], up = row_upper_[i];
        if (lo == up) {
            os << " " << rn << ":";
            body();
            os << " = " << detail::lp_num(lo) << "\n";
        } else {
            if (lo > -kInf) {
                os << " " << rn << "_l:";
                body();
                os << " >= " << detail::lp_num(lo) << "\n";
            }
            if (up < kInf) {
                os << " " << rn << "_u:";
                body();
                os << " <= " << detail::lp_num(up) << "\n";
            }
        }
    }
    os << "Bounds\n";
    for (int j = 0; j < num_cols(); ++j) {
        const double lo = col_lower_[j], up = col_upper_[j];
        if (lo == up) {
            os << " " << cname(j) << " = " << detail::lp_num(lo) << "\n";
        } else {
            os << " " << (lo > -kInf ? detail::lp_num(lo) : "-inf") << " <= " << cname(j) << " <= "
               << (up < kInf ? detail::lp_num(up) : "+inf") << "\n";
        }
    }
    bool any_int = false;
    for (int j = 0; j < num_cols(); ++j) any_int = any_int || integer_[j];
    if (any_int) {
        os << "Generals\n";
        for (int j = 0; j < num_cols(); ++j)
            if (integer_[j]) os << " " << cname(j) << "\n";
    }
    os << "End\n";
}

} // namespace damsim
