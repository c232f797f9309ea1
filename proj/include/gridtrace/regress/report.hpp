#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "gridtrace/regress/ols.hpp"
#include "gridtrace/regress/tests.hpp"
#include "gridtrace/regress/var.hpp"

namespace gridtrace::regress {

nlohmann::ordered_json to_json(const TestResult& t);
nlohmann::ordered_json to_json(const OLSReport& r);
/// VAR report; IRF and FEVD arrays are included when non-empty.
nlohmann::ordered_json to_json(const VarReport& r, const std::vector<Eigen::MatrixXd>& irf = {},
                               const std::vector<Eigen::MatrixXd>& fevd = {});
nlohmann::ordered_json to_json(const RobustnessSummary& s);

/// Fixed-width coefficient table (term, coefficient, std, t, p) with fit statistics.
std::string render_text(const OLSReport& r);
std::string render_text(const VarReport& r);

}  // namespace gridtrace::regress
