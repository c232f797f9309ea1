#include "gridtrace/frame/correlation.hpp"

#include <algorithm>
#include <cmath>

#include "gridtrace/error.hpp"

namespace gridtrace::frame {

double pearson(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw Error("misaligned", "samples differ in length");
  if (a.size() < 3) throw Error("no-overlap", "need at least 3 paired values");
  const double n = static_cast<double>(a.size());
  double ma = 0.0, mb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ma += a[i];
    mb += b[i];
  }
  ma /= n;
  mb /= n;
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double da = a[i] - ma, db = b[i] - mb;
    sab += da * db;
    saa += da * da;
    sbb += db * db;
  }
  if (saa <= 0.0 || sbb <= 0.0) throw Error("zero-variance", "constant series on the overlap");
  return std::clamp(sab / std::sqrt(saa * sbb), -1.0, 1.0);
}

namespace {

void paired_present(const SeriesView& x, const SeriesView& y, std::vector<double>& a, std::vector<double>& b) {
  a.clear();
  b.clear();
  std::size_t i = 0, j = 0;
  const auto& tx = x.timestamps();
  const auto& ty = y.timestamps();
  while (i < tx.size() && j < ty.size()) {
    if (tx[i] < ty[j]) {
      ++i;
    } else if (ty[j] < tx[i]) {
      ++j;
    } else {
      if (x.values()[i] && y.values()[j]) {
        a.push_back(*x.values()[i]);
        b.push_back(*y.values()[j]);
      }
      ++i;
      ++j;
    }
  }
}

}  // namespace

Eigen::MatrixXd pearson_matrix(std::span<const SeriesView> series) {
  const auto k = static_cast<Eigen::Index>(series.size());
  if (k < 2) throw Error("bad-input", "pearson_matrix needs at least two series");
  Eigen::MatrixXd out = Eigen::MatrixXd::Identity(k, k);
  std::vector<double> a, b;
  for (Eigen::Index i = 0; i < k; ++i) {
    for (Eigen::Index j = i + 1; j < k; ++j) {
      paired_present(series[static_cast<std::size_t>(i)], series[static_cast<std::size_t>(j)], a, b);
      if (a.size() < 3) {
        throw Error("no-overlap", "series " + std::to_string(i) + " and " + std::to_string(j) + " share " +
                                      std::to_string(a.size()) + " present values");
      }
      out(i, j) = out(j, i) = pearson(a, b);
    }
  }
  return out;
}

}  // namespace gridtrace::frame
