#pragma once

#include <span>

#include <Eigen/Dense>

#include "gridtrace/frame/wide_frame.hpp"

namespace gridtrace::frame {

/// Pearson correlation of two equal-length samples. Throws Error("zero-variance").
double pearson(std::span<const double> a, std::span<const double> b);

/// Pairwise Pearson coefficients, each pair evaluated on the timestamps where
/// both series are present. Errors: "no-overlap" (< 3 shared points),
/// "zero-variance" (a series is constant on the shared points).
Eigen::MatrixXd pearson_matrix(std::span<const SeriesView> series);

}  // namespace gridtrace::frame
