#ifndef SLIM_EVAL_HPP
#define SLIM_EVAL_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <numeric>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "slim/error.hpp"
#include "slim/graph.hpp"
#include "slim/init.hpp"
#include "slim/model.hpp"
#include "slim/optim.hpp"
#include "slim/rng.hpp"

namespace slim {

using DyadFeatures = std::array<double, 4>;  // [pos, neg, log pos, log neg]

/// Rates and log-rates of each dyad under the fitted parameters.
inline std::vector<DyadFeatures> dyad_features(const Params& p, std::span<const Dyad> dyads) {
  const Geometry g = make_geometry(p);
  std::vector<DyadFeatures> out;
  out.reserve(dyads.size());
  for (const auto& d : dyads) {
    if (d.i >= p.n() || d.j >= p.n()) throw UsageError("dyad_features: node index out of range");
    const DyadRates r = dyad_rates(g, d.i, d.j);
    out.push_back({r.pos, r.neg, r.log_pos, r.log_neg});
  }
  return out;
}

struct LogisticConfig {
  double l2 = 1.0;  // inverse regularization strength, as in the usual C parameter
  double tol = 1e-6;
  std::size_t max_iter = 10000;
};

/// Standardization is part of the model so that scoring new rows uses the
/// training fold's statistics.
struct LogisticModel {
  Vector mean;
  Vector scale;
  Vector weights;  // on standardized features
  double bias = 0.0;
  std::size_t iterations = 0;
  double grad_norm = 0.0;

  double decision(std::span<const double> x) const {
    double s = bias;
    for (Eigen::Index f = 0; f < weights.size(); ++f) s += weights(f) * (x[f] - mean(f)) / scale(f);
    return s;
  }
};

namespace detail {

inline double log1p_exp(double t) { return t > 0 ? t + std::log1p(std::exp(-t)) : std::log1p(std::exp(t)); }

inline Matrix to_matrix(std::span<const DyadFeatures> rows) {
  Matrix x(static_cast<Eigen::Index>(rows.size()), 4);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (Eigen::Index f = 0; f < 4; ++f) x(static_cast<Eigen::Index>(r), f) = rows[r][f];
  }
  return x;
}

}  // namespace detail

/// L2-penalized logistic regression, objective 0.5 |w|^2 + C * sum log-loss
/// with an unpenalized bias, minimized by damped Newton steps.
inline LogisticModel logistic_fit(const Matrix& x_raw, std::span<const int> labels, const LogisticConfig& cfg = {}) {
  const Eigen::Index n = x_raw.rows();
  const Eigen::Index f = x_raw.cols();
  if (static_cast<std::size_t>(n) != labels.size()) throw UsageError("logistic_fit: label count mismatch");
  std::size_t ones = 0;
  for (int y : labels) {
    if (y != 0 && y != 1) throw UsageError("logistic_fit: labels must be 0 or 1");
    ones += static_cast<std::size_t>(y);
  }
  if (ones == 0 || ones == labels.size()) throw DataError("logistic_fit: both classes are required");

  LogisticModel m;
  m.mean = x_raw.colwise().mean().transpose();
  m.scale.resize(f);
  for (Eigen::Index c = 0; c < f; ++c) {
    const double var = (x_raw.col(c).array() - m.mean(c)).square().mean();
    m.scale(c) = var > 0.0 ? std::sqrt(var) : 1.0;
  }
  // Design matrix with a trailing column of ones for the bias.
  Matrix x(n, f + 1);
  for (Eigen::Index c = 0; c < f; ++c) x.col(c) = (x_raw.col(c).array() - m.mean(c)) / m.scale(c);
  x.col(f).setOnes();
  Vector y(n);
  for (Eigen::Index r = 0; r < n; ++r) y(r) = labels[static_cast<std::size_t>(r)];

  Vector penalty = Vector::Constant(f + 1, 1.0);
  penalty(f) = 0.0;
  auto objective = [&](const Vector& w) {
    const Vector t = x * w;
    double v = 0.5 * (penalty.array() * w.array().square()).sum();
    for (Eigen::Index r = 0; r < n; ++r) v += cfg.l2 * (detail::log1p_exp(t(r)) - y(r) * t(r));
    return v;
  };
  Vector w = Vector::Zero(f + 1);
  double obj = objective(w);
  for (m.iterations = 0; m.iterations < cfg.max_iter; ++m.iterations) {
    const Vector t = x * w;
    Vector prob(n), curv(n);
    for (Eigen::Index r = 0; r < n; ++r) {
      prob(r) = sigmoid(t(r));
      curv(r) = prob(r) * (1.0 - prob(r));
    }
    const Vector grad = penalty.cwiseProduct(w) + cfg.l2 * x.transpose() * (prob - y);
    m.grad_norm = grad.norm();
    if (m.grad_norm <= cfg.tol) break;
    Matrix hess = cfg.l2 * x.transpose() * curv.asDiagonal() * x;
    hess.diagonal() += penalty;
    hess.diagonal().array() += 1e-12;
    const Vector step = hess.ldlt().solve(grad);
    double t_step = 1.0;
    Vector next = w - step;
    double next_obj = objective(next);
    while (next_obj > obj && t_step > 1e-10) {
      t_step *= 0.5;
      next = w - t_step * step;
      next_obj = objective(next);
    }
    if (next_obj > obj) break;  // no further descent possible at machine precision
    w = next;
    obj = next_obj;
  }
  m.weights = w.head(f);
  m.bias = w(f);
  return m;
}

inline LogisticModel logistic_fit(std::span<const DyadFeatures> rows, std::span<const int> labels,
                                  const LogisticConfig& cfg = {}) {
  return logistic_fit(detail::to_matrix(rows), labels, cfg);
}

namespace detail {

inline void require_both_classes(std::span<const double> scores, std::span<const int> labels, const char* who) {
  if (scores.size() != labels.size()) throw UsageError(std::string(who) + ": score/label size mismatch");
  const auto ones = std::count(labels.begin(), labels.end(), 1);
  if (ones == 0 || ones == static_cast<std::ptrdiff_t>(labels.size())) {
    throw DataError(std::string(who) + ": both classes are required");
  }
}

inline std::vector<std::size_t> order_by_score(std::span<const double> scores) {
  std::vector<std::size_t> idx(scores.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
  return idx;
}

}  // namespace detail

/// Probability that a random positive outscores a random negative, ties
/// counting one half.
inline double auc_roc(std::span<const double> scores, std::span<const int> labels) {
  detail::require_both_classes(scores, labels, "auc_roc");
  const auto idx = detail::order_by_score(scores);
  double neg_below = 0.0;
  double wins = 0.0;
  double pos_total = 0.0;
  for (std::size_t a = 0; a < idx.size();) {
    std::size_t b = a;
    double pos = 0.0;
    double neg = 0.0;
    while (b < idx.size() && scores[idx[b]] == scores[idx[a]]) {
      (labels[idx[b]] == 1 ? pos : neg) += 1.0;
      ++b;
    }
    wins += pos * neg_below + 0.5 * pos * neg;
    neg_below += neg;
    pos_total += pos;
    a = b;
  }
  return wins / (pos_total * neg_below);
}

/// Average precision over a descending sweep, equal scores entering together.
inline double auc_pr(std::span<const double> scores, std::span<const int> labels) {
  if (scores.size() != labels.size()) throw UsageError("auc_pr: score/label size mismatch");
  const double positives = static_cast<double>(std::count(labels.begin(), labels.end(), 1));
  if (positives == 0) throw DataError("auc_pr: no positive examples");
  auto idx = detail::order_by_score(scores);
  std::reverse(idx.begin(), idx.end());
  double tp = 0.0;
  double fp = 0.0;
  double prev_recall = 0.0;
  double area = 0.0;
  for (std::size_t a = 0; a < idx.size();) {
    std::size_t b = a;
    while (b < idx.size() && scores[idx[b]] == scores[idx[a]]) {
      (labels[idx[b]] == 1 ? tp : fp) += 1.0;
      ++b;
    }
    const double recall = tp / positives;
    area += (recall - prev_recall) * (tp / (tp + fp));
    prev_recall = recall;
    a = b;
  }
  return area;
}

/// Stratified fold assignment: each class is shuffled and dealt round-robin.
inline std::vector<std::size_t> stratified_folds(std::span<const int> labels, std::size_t folds, std::uint64_t seed) {
  SplitMix64 rng(mix_key(seed, 0xf01d));
  std::vector<std::size_t> fold(labels.size());
  for (int cls : {0, 1}) {
    std::vector<std::size_t> members;
    for (std::size_t r = 0; r < labels.size(); ++r) {
      if (labels[r] == cls) members.push_back(r);
    }
    for (std::size_t k = members.size(); k > 1; --k) std::swap(members[k - 1], members[uniform_index(rng, k)]);
    for (std::size_t t = 0; t < members.size(); ++t) fold[members[t]] = t % folds;
  }
  return fold;
}

/// Out-of-fold decision scores: every row is scored by a classifier that
/// never saw it.
inline std::vector<double> cross_val_scores(std::span<const DyadFeatures> rows, std::span<const int> labels,
                                            std::size_t folds, std::uint64_t seed,
                                            const LogisticConfig& cfg = {}) {
  const auto fold = stratified_folds(labels, folds, seed);
  std::vector<double> scores(rows.size());
  for (std::size_t f = 0; f < folds; ++f) {
    std::vector<DyadFeatures> train_x;
    std::vector<int> train_y;
    for (std::size_t r = 0; r < rows.size(); ++r) {
      if (fold[r] != f) {
        train_x.push_back(rows[r]);
        train_y.push_back(labels[r]);
      }
    }
    const LogisticModel m = logistic_fit(train_x, train_y, cfg);
    for (std::size_t r = 0; r < rows.size(); ++r) {
      if (fold[r] == f) scores[r] = m.decision(rows[r]);
    }
  }
  return scores;
}

struct TaskResult {
  std::string task;
  double auc_roc = 0.0;
  double auc_pr = 0.0;
  std::size_t n_class1 = 0;  // positive sign for p@n, the edge class otherwise
  std::size_t n_class0 = 0;
};

struct EvalReport {
  std::vector<TaskResult> tasks;
  std::uint64_t split_seed = 0;
  std::string variant;
  std::size_t k = 0;
  double holdout = 0.2;

  const TaskResult& task(std::string_view name) const {
    for (const auto& t : tasks) {
      if (t.task == name) return t;
    }
    throw UsageError("no task named " + std::string(name));
  }
};

inline nlohmann::json to_json(const EvalReport& r) {
  nlohmann::json tasks = nlohmann::json::object();
  for (const auto& t : r.tasks) {
    tasks[t.task] = {{"auc_roc", t.auc_roc}, {"auc_pr", t.auc_pr}, {"n_class1", t.n_class1}, {"n_class0", t.n_class0}};
  }
  return {{"variant", r.variant}, {"k", r.k}, {"split_seed", r.split_seed}, {"holdout", r.holdout}, {"tasks", tasks}};
}

inline void write_report_csv(std::ostream& out, const EvalReport& r) {
  out << "variant,k,split_seed";
  for (const auto& t : r.tasks) out << ',' << t.task << "_auc_roc," << t.task << "_auc_pr";
  out << '\n' << r.variant << ',' << r.k << ',' << r.split_seed;
  out.precision(17);
  for (const auto& t : r.tasks) out << ',' << t.auc_roc << ',' << t.auc_pr;
  out << '\n';
}

/// One line per task with both AUCs and class counts.
inline void print_summary(std::ostream& out, const EvalReport& r) {
  out << "model " << r.variant << "  K=" << r.k << "  seed=" << r.split_seed << '\n';
  out << "task   AUC-ROC  AUC-PR   class1  class0\n";
  for (const auto& t : r.tasks) {
    char line[96];
    std::snprintf(line, sizeof line, "%-5s  %.3f    %.3f    %6zu  %6zu\n", t.task.c_str(), t.auc_roc, t.auc_pr,
                  t.n_class1, t.n_class0);
    out << line;
  }
}

inline constexpr std::size_t kEvalFolds = 5;

/// Scores one task from held-out dyads and their class labels.
inline TaskResult score_task(std::string name, std::span<const DyadFeatures> rows, std::span<const int> labels,
                             std::uint64_t seed) {
  TaskResult t;
  t.task = std::move(name);
  t.n_class1 = static_cast<std::size_t>(std::count(labels.begin(), labels.end(), 1));
  t.n_class0 = labels.size() - t.n_class1;
  if (t.n_class1 < kEvalFolds || t.n_class0 < kEvalFolds) {
    throw DataError("task " + t.task + ": needs at least " + std::to_string(kEvalFolds) +
                    " examples per class, got " + std::to_string(t.n_class1) + " and " + std::to_string(t.n_class0));
  }
  const auto scores = cross_val_scores(rows, labels, kEvalFolds, seed);
  t.auc_roc = auc_roc(scores, labels);
  t.auc_pr = auc_pr(scores, labels);
  return t;
}

/// The three link-prediction tasks for parameters fitted on `split.train`.
inline EvalReport evaluate_split(const Params& p, const HoldoutSplit& split, std::uint64_t seed) {
  std::vector<Dyad> edge_dyads;
  for (const auto& e : split.test_edges) edge_dyads.push_back({e.i, e.j});
  const auto edge_feats = dyad_features(p, edge_dyads);
  const auto zero_feats = dyad_features(p, split.test_zeros);

  EvalReport report;
  report.split_seed = split.seed;
  report.variant = to_string(p.variant);
  report.k = static_cast<std::size_t>(p.k());

  std::vector<int> sign_labels;
  for (const auto& e : split.test_edges) sign_labels.push_back(e.sign() > 0 ? 1 : 0);
  report.tasks.push_back(score_task("p@n", edge_feats, sign_labels, seed));

  for (int want : {+1, -1}) {
    std::vector<DyadFeatures> rows;
    std::vector<int> labels;
    for (std::size_t t = 0; t < split.test_edges.size(); ++t) {
      if (split.test_edges[t].sign() == want) {
        rows.push_back(edge_feats[t]);
        labels.push_back(1);
      }
    }
    for (const auto& z : zero_feats) {
      rows.push_back(z);
      labels.push_back(0);
    }
    report.tasks.push_back(score_task(want > 0 ? "p@z" : "n@z", rows, labels, seed));
  }
  return report;
}

struct BenchmarkConfig {
  TrainConfig train;
  double holdout = 0.2;
};

struct BenchmarkResult {
  EvalReport report;
  FitResult fit;
};

/// Hold out edges, fit on the residual graph, and score the three tasks.
inline BenchmarkResult run_benchmark(const SignedGraph& graph, const BenchmarkConfig& cfg, std::uint64_t seed,
                                     const std::function<void(const TraceRow&)>& on_iteration = {}) {
  const HoldoutSplit split = split_train_test(graph, cfg.holdout, seed);
  BenchmarkResult out;
  out.fit = fit(split.train, cfg.train, init_params(split.train, cfg.train), on_iteration);
  out.report = evaluate_split(out.fit.params, split, seed);
  out.report.holdout = cfg.holdout;
  return out;
}

}  // namespace slim

#endif  // SLIM_EVAL_HPP
