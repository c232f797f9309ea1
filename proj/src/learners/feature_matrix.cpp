#include "gridtrace/learners/feature_matrix.hpp"

#include <algorithm>
#include <set>

#include "gridtrace/error.hpp"

namespace gridtrace::learners {

FeatureMatrix::FeatureMatrix(std::vector<std::string> names, Eigen::MatrixXd values)
    : names_(std::move(names)), values_(std::move(values)) {
  if (static_cast<Eigen::Index>(names_.size()) != values_.cols()) {
    throw Error("bad-features", std::to_string(names_.size()) + " names for " + std::to_string(values_.cols()) +
                                    " columns");
  }
  if (std::set<std::string>(names_.begin(), names_.end()).size() != names_.size()) {
    throw Error("bad-features", "duplicate feature names");
  }
  if (!values_.allFinite()) throw Error("bad-features", "feature values must be finite");
}

Eigen::Index FeatureMatrix::index_of(const std::string& name) const {
  auto it = std::find(names_.begin(), names_.end(), name);
  if (it == names_.end()) throw Error("unknown-column", name);
  return static_cast<Eigen::Index>(it - names_.begin());
}

Eigen::VectorXd FeatureMatrix::column(const std::string& name) const { return values_.col(index_of(name)); }

FeatureMatrix FeatureMatrix::select_rows(std::span<const Eigen::Index> rows) const {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(rows.size()), values_.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = values_.row(rows[i]);
  return FeatureMatrix(names_, std::move(out));
}

FeatureMatrix FeatureMatrix::with_column(const std::string& name, const Eigen::VectorXd& column) const {
  if (column.size() != values_.rows()) throw Error("misaligned", "column length differs from row count");
  Eigen::MatrixXd out(values_.rows(), values_.cols() + 1);
  out << values_, column;
  auto names = names_;
  names.push_back(name);
  return FeatureMatrix(std::move(names), std::move(out));
}

}  // namespace gridtrace::learners
