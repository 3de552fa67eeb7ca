#pragma once

#include <string>

#include <Eigen/Core>

namespace hlsq {

/// Shortest decimal representation that parses back to the same double.
std::string format_double(double v);

/// Entries joined by `sep`, each via format_double.
std::string format_vector(const Eigen::VectorXd& v, const std::string& sep = ",");

}  // namespace hlsq
