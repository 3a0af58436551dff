#pragma once

#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>
#include <string_view>

#include <Eigen/Dense>

namespace epsearch {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Bad arguments, malformed files, violated preconditions. Maps to CLI exit code 1.
class InputError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// A numerical cross-check failed (strategy disagreement, undefined winding, ...).
// Maps to CLI exit code 2.
class ValidationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class Family { crawl, funnel, sk, custom };

std::string_view to_string(Family family);
Family parse_family(std::string_view name);

// Wraps an angle into (-pi, pi].
double wrap_angle(double angle);

// Computational basis state |index> of dimension n.
Vector basis_state(int n, int index);

}  // namespace epsearch
