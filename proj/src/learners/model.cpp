#include "gridtrace/learners/model.hpp"

#include <cmath>
#include <limits>
#include <numeric>

#include "gridtrace/error.hpp"
#include "gridtrace/frame/csv.hpp"

namespace gridtrace::learners {

using nlohmann::ordered_json;

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

ordered_json vec_json(const Eigen::VectorXd& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

Eigen::VectorXd json_vec(const ordered_json& j) {
  const auto v = j.get<std::vector<double>>();
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

}  // namespace

void LearnerSpec::validate() const {
  std::visit(overloaded{
                 [](const RidgeSpec& r) {
                   if (!(r.lambda >= 0.0) || !std::isfinite(r.lambda)) throw Error("bad-spec", "lambda must be >= 0");
                 },
                 [](const MlpSpec& m) {
                   if (m.hidden.empty()) throw Error("bad-spec", "at least one hidden layer required");
                   for (int h : m.hidden) {
                     if (h <= 0) throw Error("bad-spec", "hidden sizes must be positive");
                   }
                   if (m.epochs < 1) throw Error("bad-spec", "epochs must be >= 1");
                   if (!(m.learning_rate > 0.0)) throw Error("bad-spec", "learning rate must be positive");
                   if (m.batch_size < 1) throw Error("bad-spec", "batch size must be positive");
                 },
                 [](const ArmaOrder& o) {
                   if (o.p < 0 || o.d < 0 || o.q < 0) throw Error("bad-spec", "negative ARMA order");
                 },
             },
             kind);
}

std::string LearnerSpec::describe() const {
  const std::string body = std::visit(
      overloaded{
          [](const RidgeSpec& r) { return "ridge(lambda=" + frame::format_number(r.lambda) + ")"; },
          [](const MlpSpec& m) {
            std::string h;
            for (int v : m.hidden) h += (h.empty() ? "" : "x") + std::to_string(v);
            return "mlp(hidden=" + h + ",lr=" + frame::format_number(m.learning_rate) +
                   ",epochs=" + std::to_string(m.epochs) + ",seed=" + std::to_string(m.seed) + ")";
          },
          [](const ArmaOrder& o) { return "arma(" + o.describe() + ")"; },
      },
      kind);
  return body + " " + loss.describe();
}

FittedModel fit(const LearnerSpec& spec, const FeatureMatrix& x, std::span<const double> y) {
  spec.validate();
  return std::visit(overloaded{
                        [&](const RidgeSpec& r) -> FittedModel { return fit_ridge(x, y, r.lambda, spec.loss); },
                        [&](const MlpSpec& m) -> FittedModel { return fit_mlp(x, y, m, spec.loss); },
                        [&](const ArmaOrder& o) -> FittedModel { return fit_arma_css(y, o); },
                    },
                    spec.kind);
}

Eigen::VectorXd predict(const FittedModel& model, const Eigen::MatrixXd& x) {
  return std::visit(overloaded{
                        [&](const RidgeModel& m) { return m.predict(x); },
                        [&](const MlpModel& m) { return m.predict(x); },
                        [](const ArmaModel&) -> Eigen::VectorXd {
                          throw Error("bad-spec", "ARMA models forecast a series, not a feature matrix");
                        },
                    },
                    model);
}

ordered_json to_json(const LearnerSpec& spec) {
  ordered_json j;
  std::visit(overloaded{
                 [&](const RidgeSpec& r) {
                   j["kind"] = "ridge";
                   j["lambda"] = r.lambda;
                 },
                 [&](const MlpSpec& m) {
                   j["kind"] = "mlp";
                   j["hidden"] = m.hidden;
                   j["learning_rate"] = m.learning_rate;
                   j["epochs"] = m.epochs;
                   j["batch_size"] = m.batch_size;
                   j["seed"] = m.seed;
                 },
                 [&](const ArmaOrder& o) {
                   j["kind"] = "arma";
                   j["order"] = {o.p, o.d, o.q};
                 },
             },
             spec.kind);
  j["loss"] = spec.loss.describe();
  return j;
}

LearnerSpec spec_from_json(const ordered_json& j) {
  try {
    LearnerSpec s;
    const auto kind = j.at("kind").get<std::string>();
    if (kind == "ridge") {
      s.kind = RidgeSpec{j.at("lambda").get<double>()};
    } else if (kind == "mlp") {
      MlpSpec m;
      m.hidden = j.at("hidden").get<std::vector<int>>();
      m.learning_rate = j.at("learning_rate").get<double>();
      m.epochs = j.at("epochs").get<int>();
      m.batch_size = j.at("batch_size").get<int>();
      m.seed = j.at("seed").get<std::uint64_t>();
      s.kind = m;
    } else if (kind == "arma") {
      const auto o = j.at("order").get<std::vector<int>>();
      if (o.size() != 3) throw Error("bad-model", "ARMA order needs three entries");
      s.kind = ArmaOrder{o[0], o[1], o[2]};
    } else {
      throw Error("bad-model", "unknown learner kind '" + kind + "'");
    }
    s.loss = LossKind::parse(j.at("loss").get<std::string>());
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw Error("bad-model", e.what());
  }
}

ordered_json to_json(const FittedModel& model) {
  ordered_json j;
  std::visit(overloaded{
                 [&](const RidgeModel& m) {
                   j["spec"] = to_json(LearnerSpec{RidgeSpec{m.lambda}, m.loss});
                   j["features"] = m.feature_names;
                   j["intercept"] = m.intercept;
                   j["coef"] = vec_json(m.coef);
                   j["training"] = {{"iterations", m.iterations}};
                 },
                 [&](const MlpModel& m) {
                   j["spec"] = to_json(LearnerSpec{m.spec(), m.loss()});
                   j["features"] = m.feature_names;
                   j["x_mean"] = vec_json(m.x_mean());
                   j["x_scale"] = vec_json(m.x_scale());
                   j["y_mean"] = m.y_mean();
                   j["y_scale"] = m.y_scale();
                   j["parameters"] = vec_json(m.parameters());
                   j["training"] = {{"seed", m.spec().seed}, {"epochs", m.spec().epochs}, {"loss_history", m.loss_history}};
                 },
                 [&](const ArmaModel& m) {
                   j["spec"] = to_json(LearnerSpec{m.order, LossKind::squared()});
                   j["mean"] = m.mean;
                   j["ar"] = vec_json(m.ar);
                   j["ma"] = vec_json(m.ma);
                   j["sigma2"] = m.sigma2;
                   j["css"] = m.css;
                   j["history"] = m.history;
                   j["residuals"] = m.residuals;
                   j["training"] = {{"iterations", m.iterations}, {"low_sample", m.low_sample}};
                 },
             },
             model);
  return j;
}

FittedModel model_from_json(const ordered_json& j) {
  try {
    const LearnerSpec spec = spec_from_json(j.at("spec"));
    if (const auto* r = std::get_if<RidgeSpec>(&spec.kind)) {
      RidgeModel m;
      m.lambda = r->lambda;
      m.loss = spec.loss;
      m.feature_names = j.at("features").get<std::vector<std::string>>();
      m.intercept = j.at("intercept").get<double>();
      m.coef = json_vec(j.at("coef"));
      m.iterations = j.at("training").value("iterations", 0);
      if (m.coef.size() != static_cast<Eigen::Index>(m.feature_names.size())) {
        throw Error("bad-model", "coefficient count differs from feature count");
      }
      return m;
    }
    if (const auto* s = std::get_if<MlpSpec>(&spec.kind)) {
      const auto names = j.at("features").get<std::vector<std::string>>();
      MlpModel m(*s, static_cast<Eigen::Index>(names.size()), spec.loss);
      m.feature_names = names;
      const Eigen::VectorXd p = json_vec(j.at("parameters"));
      if (p.size() != m.parameters().size()) throw Error("bad-model", "parameter count mismatch");
      m.set_parameters(p);
      m.set_scaling(json_vec(j.at("x_mean")), json_vec(j.at("x_scale")), j.at("y_mean").get<double>(),
                    j.at("y_scale").get<double>());
      m.loss_history = j.at("training").value("loss_history", std::vector<double>{});
      return m;
    }
    ArmaModel m;
    m.order = std::get<ArmaOrder>(spec.kind);
    m.mean = j.at("mean").get<double>();
    m.ar = json_vec(j.at("ar"));
    m.ma = json_vec(j.at("ma"));
    m.sigma2 = j.at("sigma2").get<double>();
    m.css = j.at("css").get<double>();
    m.history = j.at("history").get<std::vector<double>>();
    m.residuals = j.at("residuals").get<std::vector<double>>();
    m.iterations = j.at("training").value("iterations", 0);
    m.low_sample = j.at("training").value("low_sample", false);
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw Error("bad-model", e.what());
  }
}

namespace {

std::vector<std::size_t> fold_edges(std::size_t n, int k) {
  std::vector<std::size_t> edges;
  for (int i = 0; i <= k; ++i) edges.push_back(n * static_cast<std::size_t>(i) / static_cast<std::size_t>(k));
  return edges;
}

double cv_loss_features(const LearnerSpec& spec, const FeatureMatrix& x, std::span<const double> y, int k) {
  const auto n = static_cast<std::size_t>(x.rows());
  const auto edges = fold_edges(n, k);
  double total = 0.0;
  std::size_t count = 0;
  for (int f = 0; f < k; ++f) {
    std::vector<Eigen::Index> train, test;
    std::vector<double> ytrain;
    for (std::size_t i = 0; i < n; ++i) {
      const bool held = i >= edges[static_cast<std::size_t>(f)] && i < edges[static_cast<std::size_t>(f) + 1];
      (held ? test : train).push_back(static_cast<Eigen::Index>(i));
      if (!held) ytrain.push_back(y[i]);
    }
    const FittedModel m = fit(spec, x.select_rows(train), ytrain);
    const Eigen::VectorXd pred = predict(m, x.select_rows(test).values());
    for (std::size_t t = 0; t < test.size(); ++t) {
      total += spec.loss(y[static_cast<std::size_t>(test[t])], pred[static_cast<Eigen::Index>(t)]);
      ++count;
    }
  }
  return total / static_cast<double>(count);
}

double cv_loss_series(const LearnerSpec& spec, std::span<const double> y, int k) {
  const auto edges = fold_edges(y.size(), k + 1);
  double total = 0.0;
  std::size_t count = 0;
  for (int f = 1; f <= k; ++f) {
    const std::size_t cut = edges[static_cast<std::size_t>(f)], end = edges[static_cast<std::size_t>(f) + 1];
    const auto model = std::get<ArmaModel>(fit(spec, FeatureMatrix{}, y.first(cut)));
    const auto pred = model.filter(y.first(end));
    for (std::size_t i = cut; i < end; ++i) {
      if (!pred[i]) continue;
      total += spec.loss(y[i], *pred[i]);
      ++count;
    }
  }
  return count ? total / static_cast<double>(count) : std::numeric_limits<double>::infinity();
}

}  // namespace

GridSearchResult grid_search(std::span<const LearnerSpec> grid, const FeatureMatrix& x, std::span<const double> y,
                             int k) {
  if (grid.empty()) throw Error("empty-grid", "grid search needs at least one spec");
  if (k < 2) throw Error("bad-folds", "k must be at least 2");
  for (const auto& s : grid) s.validate();
  GridSearchResult result;
  for (std::size_t g = 0; g < grid.size(); ++g) {
    double loss = std::numeric_limits<double>::infinity();
    if (grid[g].is_arma()) {
      if (y.size() < static_cast<std::size_t>(k + 1)) throw Error("bad-folds", "fewer points than folds");
      try {
        loss = cv_loss_series(grid[g], y, k);
      } catch (const Error&) {
      }
    } else {
      if (x.rows() < k || static_cast<std::size_t>(x.rows()) != y.size()) {
        throw Error("bad-folds", "fewer rows than folds or misaligned target");
      }
      loss = cv_loss_features(grid[g], x, y, k);
    }
    result.losses.push_back(loss);
    if (g == 0 || loss < result.losses[result.best_index]) result.best_index = g;
  }
  result.best = grid[result.best_index];
  return result;
}

}  // namespace gridtrace::learners
