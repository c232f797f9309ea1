#include "gridtrace/learners/nelder_mead.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace gridtrace::learners {

NelderMeadResult nelder_mead(const std::function<double(const Eigen::VectorXd&)>& f, const Eigen::VectorXd& start,
                             const NelderMeadOptions& opt) {
  const Eigen::Index n = start.size();
  NelderMeadResult result;
  if (n == 0) {
    result.x = start;
    result.value = f(start);
    result.converged = true;
    result.trace.push_back(result.value);
    return result;
  }
  std::vector<Eigen::VectorXd> simplex{start};
  for (Eigen::Index i = 0; i < n; ++i) {
    Eigen::VectorXd v = start;
    v[i] += v[i] != 0.0 ? opt.initial_step * std::max(1.0, std::abs(v[i])) : opt.initial_step;
    simplex.push_back(v);
  }
  std::vector<double> values;
  for (const auto& v : simplex) values.push_back(f(v));
  std::vector<std::size_t> idx(simplex.size());

  for (int iter = 0; iter < opt.max_iterations; ++iter) {
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    const std::size_t best = idx.front(), worst = idx.back(), second = idx[idx.size() - 2];
    result.trace.push_back(values[best]);
    result.iterations = iter;

    double size = 0.0;
    for (const auto& v : simplex) size = std::max(size, (v - simplex[best]).cwiseAbs().maxCoeff());
    if (std::abs(values[worst] - values[best]) <= opt.f_tolerance * (1.0 + std::abs(values[best])) &&
        size <= opt.x_tolerance * (1.0 + simplex[best].cwiseAbs().maxCoeff())) {
      result.converged = true;
      break;
    }

    Eigen::VectorXd centroid = Eigen::VectorXd::Zero(n);
    for (std::size_t i = 0; i < simplex.size(); ++i) {
      if (i != worst) centroid += simplex[i];
    }
    centroid /= static_cast<double>(n);

    const Eigen::VectorXd reflected = centroid + (centroid - simplex[worst]);
    const double fr = f(reflected);
    if (fr < values[best]) {
      const Eigen::VectorXd expanded = centroid + 2.0 * (centroid - simplex[worst]);
      const double fe = f(expanded);
      if (fe < fr) {
        simplex[worst] = expanded;
        values[worst] = fe;
      } else {
        simplex[worst] = reflected;
        values[worst] = fr;
      }
      continue;
    }
    if (fr < values[second]) {
      simplex[worst] = reflected;
      values[worst] = fr;
      continue;
    }
    const bool outside = fr < values[worst];
    const Eigen::VectorXd contracted =
        outside ? Eigen::VectorXd(centroid + 0.5 * (reflected - centroid))
                : Eigen::VectorXd(centroid + 0.5 * (simplex[worst] - centroid));
    const double fc = f(contracted);
    if (fc < (outside ? fr : values[worst])) {
      simplex[worst] = contracted;
      values[worst] = fc;
      continue;
    }
    for (std::size_t i = 0; i < simplex.size(); ++i) {
      if (i == best) continue;
      simplex[i] = simplex[best] + 0.5 * (simplex[i] - simplex[best]);
      values[i] = f(simplex[i]);
    }
  }
  const auto best = static_cast<std::size_t>(std::min_element(values.begin(), values.end()) - values.begin());
  result.x = simplex[best];
  result.value = values[best];
  return result;
}

}  // namespace gridtrace::learners
