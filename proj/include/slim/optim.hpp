#ifndef SLIM_OPTIM_HPP
#define SLIM_OPTIM_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "slim/error.hpp"
#include "slim/graph.hpp"
#include "slim/model.hpp"
#include "slim/rng.hpp"

namespace slim {

struct AdamState {
  Params first_moment;
  Params second_moment;
  std::uint64_t step_count = 0;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;

  static AdamState for_params(const Params& p, double beta1 = 0.9, double beta2 = 0.999,
                              double eps = 1e-8) {
    return {p.zeros_like(), p.zeros_like(), 0, beta1, beta2, eps};
  }
};

/// One bias-corrected Adam update of every tensor in `params`.
inline void adam_step(Params& params, const Params& grads, AdamState& state, double lr) {
  auto p = params.tensors();
  const auto g = grads.tensors();
  auto m = state.first_moment.tensors();
  auto v = state.second_moment.tensors();
  if (p.size() != g.size() || p.size() != m.size() || p.size() != v.size()) {
    throw UsageError("adam_step: gradient and moments must be congruent to the parameters");
  }
  for (std::size_t t = 0; t < p.size(); ++t) {
    if (p[t].data.size() != g[t].data.size() || p[t].data.size() != m[t].data.size()) {
      throw UsageError("adam_step: shape mismatch in tensor '" + std::string(p[t].name) + "'");
    }
    for (double x : g[t].data) {
      if (!std::isfinite(x)) {
        throw NumericError("adam_step: non-finite gradient in tensor '" + std::string(g[t].name) + "'");
      }
    }
  }
  ++state.step_count;
  const double b1 = state.beta1;
  const double b2 = state.beta2;
  const double c1 = 1.0 - std::pow(b1, static_cast<double>(state.step_count));
  const double c2 = 1.0 - std::pow(b2, static_cast<double>(state.step_count));
  for (std::size_t t = 0; t < p.size(); ++t) {
    auto pd = p[t].data;
    const auto gd = g[t].data;
    auto md = m[t].data;
    auto vd = v[t].data;
    for (std::size_t e = 0; e < pd.size(); ++e) {
      md[e] = b1 * md[e] + (1.0 - b1) * gd[e];
      vd[e] = b2 * vd[e] + (1.0 - b2) * gd[e] * gd[e];
      const double mhat = md[e] / c1;
      const double vhat = vd[e] / c2;
      pd[e] -= lr * mhat / (std::sqrt(vhat) + state.eps);
    }
  }
}

/// `sample_size` draws with replacement, deduplicated and sorted.
template <class Engine>
std::vector<NodeId> sample_node_block(std::size_t n_nodes, std::size_t sample_size, Engine& rng) {
  if (sample_size < 1 || sample_size > n_nodes) {
    throw UsageError("sample size must lie in [1, n_nodes]");
  }
  std::vector<NodeId> block(sample_size);
  for (auto& v : block) v = static_cast<NodeId>(uniform_index(rng, n_nodes));
  std::sort(block.begin(), block.end());
  block.erase(std::unique(block.begin(), block.end()), block.end());
  return block;
}

enum class InitMethod { spectral, random };

struct TrainConfig {
  std::size_t k = 8;
  double rho = 1.0;
  double lr = 0.05;
  std::size_t iters = 5000;
  /// Nodes drawn per block; unset means min(3000, N).
  std::optional<std::size_t> sample_size;
  std::uint64_t seed = 0;
  Variant variant;
  /// Accepted for reproducibility bookkeeping; fitting is single-threaded and
  /// therefore always deterministic.
  bool deterministic = true;
  /// Scale the block data term by (N/|S|)^2.
  bool rescale_block = false;
  /// Full-graph loss is recorded every this many iterations (0 = never).
  std::size_t full_loss_every = 0;
  InitMethod init = InitMethod::spectral;

  std::size_t resolved_sample_size(std::size_t n) const {
    return std::min(sample_size.value_or(3000), n);
  }

  void validate(std::size_t n) const {
    if (k < 1) throw UsageError("k must be at least 1");
    if (rho < 0) throw UsageError("rho must be nonnegative");
    if (!(lr > 0)) throw UsageError("learning rate must be positive");
    if (sample_size && (*sample_size < 1 || *sample_size > n)) {
      throw UsageError("sample size must lie in [1, N]");
    }
  }
};

struct TraceRow {
  std::size_t iteration = 0;
  double block_loss = 0.0;
  std::optional<double> full_loss;
};

struct FitResult {
  Params params;
  std::vector<TraceRow> trace;
  std::size_t unconverged_bessel = 0;
};

inline void write_trace_csv(std::ostream& out, const std::vector<TraceRow>& trace) {
  out << "iteration,block_loss,full_loss\n";
  out.precision(17);
  for (const auto& r : trace) {
    out << r.iteration << ',' << r.block_loss << ',';
    if (r.full_loss) out << *r.full_loss;
    out << '\n';
  }
}

/// Block-stochastic MAP fit: each iteration samples a fresh node block and
/// takes one Adam step on the block loss (plus the full prior term).
inline FitResult fit(const SignedGraph& graph, const TrainConfig& cfg, Params initial,
                     const std::function<void(const TraceRow&)>& on_iteration = {}) {
  cfg.validate(graph.n_nodes());
  initial.validate();
  FitResult out;
  out.params = std::move(initial);
  if (out.params.variant.directed() != graph.directed()) {
    throw UsageError("model variant " + to_string(out.params.variant) + " does not match graph directedness");
  }
  const std::size_t n = graph.n_nodes();
  const std::size_t s = cfg.resolved_sample_size(n);
  SplitMix64 rng(mix_key(cfg.seed, 0xb10c));
  AdamState state = AdamState::for_params(out.params);
  Params grad = out.params.zeros_like();
  const auto everyone = all_nodes(n);
  for (std::size_t it = 0; it < cfg.iters; ++it) {
    const auto block = sample_node_block(n, s, rng);
    LossConfig lc{cfg.rho, 1.0};
    if (cfg.rescale_block && block.size() > 1) {
      const double f = static_cast<double>(n) / static_cast<double>(block.size());
      lc.data_scale = f * f;
    }
    const LossResult lr = loss_and_gradient(out.params, graph, block, lc, grad);
    out.unconverged_bessel += lr.unconverged_bessel;
    adam_step(out.params, grad, state, cfg.lr);
    TraceRow row{it, lr.value, std::nullopt};
    if (cfg.full_loss_every > 0 && ((it + 1) % cfg.full_loss_every == 0 || it + 1 == cfg.iters)) {
      row.full_loss = negative_log_posterior(out.params, graph, everyone, {cfg.rho, 1.0}).value;
    }
    if (on_iteration) on_iteration(row);
    out.trace.push_back(row);
  }
  return out;
}

}  // namespace slim

#endif  // SLIM_OPTIM_HPP
