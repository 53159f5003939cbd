#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>

namespace esnrls {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using RowVector = Eigen::RowVectorXd;

/// Thrown when a filter or network state stops being finite. Callers treat
/// this as "the run diverged", not as a programming error.
class DivergenceError : public std::runtime_error {
public:
    explicit DivergenceError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace esnrls
