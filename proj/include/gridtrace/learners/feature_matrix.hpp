#pragma once

#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace gridtrace::learners {

/// Rectangular table of finite reals with named columns; rows are observations.
class FeatureMatrix {
 public:
  FeatureMatrix() = default;
  /// Throws Error("bad-features") on name/column mismatch, duplicate names or non-finite values.
  FeatureMatrix(std::vector<std::string> names, Eigen::MatrixXd values);

  const std::vector<std::string>& names() const { return names_; }
  const Eigen::MatrixXd& values() const { return values_; }
  Eigen::Index rows() const { return values_.rows(); }
  Eigen::Index cols() const { return values_.cols(); }

  Eigen::Index index_of(const std::string& name) const;
  Eigen::VectorXd column(const std::string& name) const;

  FeatureMatrix select_rows(std::span<const Eigen::Index> rows) const;
  FeatureMatrix with_column(const std::string& name, const Eigen::VectorXd& column) const;

 private:
  std::vector<std::string> names_;
  Eigen::MatrixXd values_;
};

inline Eigen::Map<const Eigen::VectorXd> as_vector(std::span<const double> v) {
  return {v.data(), static_cast<Eigen::Index>(v.size())};
}

}  // namespace gridtrace::learners
