#pragma once

#include <functional>
#include <vector>

#include <Eigen/Dense>

namespace gridtrace::learners {

struct NelderMeadOptions {
  double initial_step = 0.1;
  double f_tolerance = 1e-12;
  double x_tolerance = 1e-9;
  int max_iterations = 20000;
};

struct NelderMeadResult {
  Eigen::VectorXd x;
  double value = 0.0;
  int iterations = 0;
  bool converged = false;
  /// Best objective value after each iteration; never increases.
  std::vector<double> trace;
};

NelderMeadResult nelder_mead(const std::function<double(const Eigen::VectorXd&)>& f, const Eigen::VectorXd& start,
                             const NelderMeadOptions& options = {});

}  // namespace gridtrace::learners
