#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace damsim {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Exit-code aligned error taxonomy: validation (1), solver (2), I/O (3).
class ValidationError : public std::runtime_error {
public:
    explicit ValidationError(const std::string& msg) : std::runtime_error(msg) {}
};

class SolverError : public std::runtime_error {
public:
    explicit SolverError(const std::string& msg) : std::runtime_error(msg) {}
};

class IoError : public std::runtime_error {
public:
    explicit IoError(const std::string& msg) : std::runtime_error(msg) {}
};

inline bool nearly_equal(double a, double b, double tol) { return std::abs(a - b) <= tol; }

inline bool is_finite(double v) { return std::isfinite(v); }

} // namespace damsim
