#ifndef SLIM_GENERATE_HPP
#define SLIM_GENERATE_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "slim/error.hpp"
#include "slim/graph.hpp"
#include "slim/model.hpp"
#include "slim/rng.hpp"
#include "slim/skellam.hpp"

namespace slim {

/// Hyperparameters of the archetypal generative process.
struct GenerativeConfig {
  std::size_t n_nodes = 1000;
  std::size_t k = 3;
  std::vector<double> alpha;  // Dirichlet concentration, one entry per archetype
  double mu_gamma = 0.0;
  double sigma_gamma = 1.0;
  double mu_delta = 0.0;
  double sigma_delta = 1.0;
  std::vector<double> mu_A;  // archetype mean, K entries (empty = zero)
  double sigma_A = 1.0;
  std::uint64_t seed = 0;

  void validate() const {
    if (k < 1) throw UsageError("generative config: k must be at least 1");
    if (alpha.size() != k) throw UsageError("generative config: alpha needs K entries");
    for (double a : alpha) {
      if (!(a > 0.0)) throw UsageError("generative config: alpha entries must be positive");
    }
    if (!mu_A.empty() && mu_A.size() != k) throw UsageError("generative config: mu_A needs K entries");
    if (!(sigma_gamma > 0.0) || !(sigma_delta > 0.0) || !(sigma_A > 0.0)) {
      throw UsageError("generative config: standard deviations must be positive");
    }
  }
};

struct GroundTruth {
  Matrix A;  // K x K, columns are archetypes
  Matrix Z;  // K x N, columns on the simplex
  Vector gamma;
  Vector delta;
};

inline GroundTruth sample_ground_truth(const GenerativeConfig& cfg) {
  cfg.validate();
  const auto n = static_cast<Eigen::Index>(cfg.n_nodes);
  const auto k = static_cast<Eigen::Index>(cfg.k);
  SplitMix64 rng(mix_key(cfg.seed, 0x9e4));
  GroundTruth gt;
  gt.gamma.resize(n);
  gt.delta.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) gt.gamma(i) = cfg.mu_gamma + cfg.sigma_gamma * standard_normal(rng);
  for (Eigen::Index i = 0; i < n; ++i) gt.delta(i) = cfg.mu_delta + cfg.sigma_delta * standard_normal(rng);
  gt.A.resize(k, k);
  for (Eigen::Index c = 0; c < k; ++c) {
    for (Eigen::Index r = 0; r < k; ++r) {
      const double mean = cfg.mu_A.empty() ? 0.0 : cfg.mu_A[static_cast<std::size_t>(r)];
      gt.A(r, c) = mean + cfg.sigma_A * standard_normal(rng);
    }
  }
  gt.Z.resize(k, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index d = 0; d < k; ++d) gt.Z(d, i) = gamma_sample(cfg.alpha[static_cast<std::size_t>(d)], rng);
    const double s = gt.Z.col(i).sum();
    if (s > 0.0) {
      gt.Z.col(i) /= s;
    } else {
      // All gamma draws underflowed (tiny alpha): put the node on a random corner.
      gt.Z.col(i).setZero();
      gt.Z(static_cast<Eigen::Index>(uniform_index(rng, cfg.k)), i) = 1.0;
    }
  }
  return gt;
}

/// Geometry of a ground truth: positions A z_i, effects gamma/delta.
inline Geometry ground_truth_geometry(GroundTruth&&) = delete;

inline Geometry ground_truth_geometry(const GroundTruth& gt) {
  Geometry g;
  g.src = gt.A * gt.Z;
  g.dst = g.src;
  g.pos_src_effect = g.pos_dst_effect = &gt.gamma;
  g.neg_src_effect = g.neg_dst_effect = &gt.delta;
  return g;
}

enum class SamplingMethod {
  automatic,  // exact below kThinningThreshold nodes, thinning above
  exact,      // every dyad drawn from its own counter-based stream
  thinning,   // Poisson superposition with rejection against product-form bounds
};

inline constexpr std::size_t kThinningThreshold = 10000;

namespace detail {

inline SignedGraph sample_exact(const Geometry& g, std::size_t n, std::uint64_t seed) {
  std::vector<Edge> edges;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t j0 = g.directed ? 0 : i + 1;
    for (std::size_t j = j0; j < n; ++j) {
      if (i == j) continue;
      const DyadRates r = dyad_rates(g, static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
      SplitMix64 rng(mix_key(seed, i, j));
      const std::int64_t y = skellam_sample(r.rates(), rng);
      if (y != 0) edges.push_back({static_cast<NodeId>(i), static_cast<NodeId>(j), y});
    }
  }
  return SignedGraph(n, std::move(edges), g.directed);
}

/// Cumulative table for drawing an index proportional to `w`.
class WeightedIndex {
 public:
  explicit WeightedIndex(const std::vector<double>& w) : cum_(w.size()) {
    std::partial_sum(w.begin(), w.end(), cum_.begin());
  }
  double total() const { return cum_.empty() ? 0.0 : cum_.back(); }
  template <class Engine>
  std::size_t operator()(Engine& rng) const {
    const double u = uniform01(rng) * total();
    const auto it = std::upper_bound(cum_.begin(), cum_.end(), u);
    return std::min(static_cast<std::size_t>(it - cum_.begin()), cum_.size() - 1);
  }

 private:
  std::vector<double> cum_;
};

/// Adds Poisson events with per-dyad rate `exact(i, j)` <= u_src[i] * u_dst[j]
/// to `counts` by thinning a product-form Poisson process.
template <class Rate, class Engine>
void thinned_events(const std::vector<double>& u_src, const std::vector<double>& u_dst, bool directed,
                    Rate exact, std::int64_t increment,
                    std::unordered_map<std::uint64_t, std::int64_t>& counts, Engine& rng) {
  const WeightedIndex pick_src(u_src);
  const WeightedIndex pick_dst(u_dst);
  const double mean = directed ? pick_src.total() * pick_dst.total()
                               : 0.5 * pick_src.total() * pick_dst.total();
  if (!(mean > 0.0)) return;
  if (!std::isfinite(mean)) throw NumericError("thinning bound overflow");
  const std::int64_t events = poisson_sample(mean, rng);
  for (std::int64_t e = 0; e < events; ++e) {
    std::size_t i = pick_src(rng);
    std::size_t j = pick_dst(rng);
    if (i == j) continue;
    if (!directed && i > j) std::swap(i, j);
    const double bound = u_src[i] * u_dst[j];
    if (uniform01(rng) * bound < exact(i, j)) {
      counts[(static_cast<std::uint64_t>(i) << 32) | j] += increment;
    }
  }
}

inline SignedGraph sample_thinning(const Geometry& g, std::size_t n, std::uint64_t seed) {
  SplitMix64 rng(mix_key(seed, 0x7417));
  std::vector<double> a(n), b(n), c(n), d(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto ii = static_cast<Eigen::Index>(i);
    a[i] = std::exp((*g.pos_src_effect)(ii));
    b[i] = std::exp((*g.pos_dst_effect)(ii));
    c[i] = std::exp((*g.neg_src_effect)(ii));
    d[i] = std::exp((*g.neg_dst_effect)(ii));
  }
  // Any source-target distance is at most twice the radius of the joint cloud.
  double max_dist = 0.0;
  if (g.negative_sign > 0.0) {
    const Matrix& ns = g.separate_negative ? g.neg_src : g.src;
    const Vector centre = (ns.rowwise().sum() + g.dst.rowwise().sum()) / static_cast<double>(2 * n);
    double radius = 0.0;
    for (Eigen::Index i = 0; i < static_cast<Eigen::Index>(n); ++i) {
      radius = std::max({radius, (ns.col(i) - centre).norm(), (g.dst.col(i) - centre).norm()});
    }
    max_dist = 2.0 * radius;
  }
  const double lift = std::exp(0.5 * max_dist);
  for (auto& x : c) x *= lift;
  for (auto& x : d) x *= lift;

  std::unordered_map<std::uint64_t, std::int64_t> counts;
  auto pos_rate = [&](std::size_t i, std::size_t j) {
    return dyad_rates(g, static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)).pos;
  };
  auto neg_rate = [&](std::size_t i, std::size_t j) {
    return dyad_rates(g, static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)).neg;
  };
  thinned_events(a, b, g.directed, pos_rate, +1, counts, rng);
  thinned_events(c, d, g.directed, neg_rate, -1, counts, rng);
  std::vector<Edge> edges;
  for (const auto& [key, y] : counts) {
    if (y != 0) edges.push_back({static_cast<NodeId>(key >> 32), static_cast<NodeId>(key & 0xffffffffULL), y});
  }
  return SignedGraph(n, std::move(edges), g.directed);
}

}  // namespace detail

/// Draws every dyad's weight from its Skellam rates; zeros are not stored.
inline SignedGraph sample_from_geometry(const Geometry& g, std::size_t n, std::uint64_t seed,
                                        SamplingMethod method = SamplingMethod::automatic) {
  if (method == SamplingMethod::automatic) {
    method = n > kThinningThreshold ? SamplingMethod::thinning : SamplingMethod::exact;
  }
  return method == SamplingMethod::exact ? detail::sample_exact(g, n, seed)
                                         : detail::sample_thinning(g, n, seed);
}

struct GeneratedNetwork {
  SignedGraph graph;
  GroundTruth truth;
};

inline GeneratedNetwork sample_network(const GenerativeConfig& cfg,
                                       SamplingMethod method = SamplingMethod::automatic) {
  GeneratedNetwork out;
  out.truth = sample_ground_truth(cfg);
  const Geometry g = ground_truth_geometry(out.truth);
  out.graph = sample_from_geometry(g, cfg.n_nodes, mix_key(cfg.seed, 0xd1ad), method);
  return out;
}

/// Samples a network from fitted parameters of any variant.
inline SignedGraph regenerate_from_params(const Params& p, std::uint64_t seed,
                                          SamplingMethod method = SamplingMethod::automatic) {
  const Geometry g = make_geometry(p);
  return sample_from_geometry(g, static_cast<std::size_t>(p.n()), seed, method);
}

/// Expected (density, % positive, % negative) of the dyads among `nodes`.
struct ExpectedStats {
  double density = 0.0;
  double pct_pos = 0.0;
  double pct_neg = 0.0;
};

inline ExpectedStats expected_stats(const Geometry& g, std::span<const NodeId> nodes) {
  double nonzero = 0.0;
  double negative = 0.0;
  double dyads = 0.0;
  for (std::size_t a = 0; a < nodes.size(); ++a) {
    const std::size_t b0 = g.directed ? 0 : a + 1;
    for (std::size_t b = b0; b < nodes.size(); ++b) {
      if (a == b) continue;
      const DyadRates r = dyad_rates(g, nodes[a], nodes[b]);
      const SkellamRates rates = r.rates();
      // Double precision is ample for expectations and keeps calibration fast.
      const double p0 = std::exp(detail::skellam_log_pmf_in<double>(0, rates));
      double p_neg = 0.0;
      for (long long y = -1;; --y) {
        const double p = std::exp(detail::skellam_log_pmf_in<double>(y, rates));
        p_neg += p;
        if (p < 1e-16 * std::max(p_neg, 1e-300) && static_cast<double>(-y) > rates.neg) break;
        if (y < -100000) break;
      }
      nonzero += 1.0 - p0;
      negative += p_neg;
      dyads += 1.0;
    }
  }
  ExpectedStats s;
  if (dyads > 0) s.density = nonzero / dyads;
  if (nonzero > 0) {
    s.pct_neg = 100.0 * negative / nonzero;
    s.pct_pos = 100.0 - s.pct_neg;
  }
  return s;
}

/// Shifts mu_gamma and mu_delta by a common offset (their gap stays fixed)
/// until the expected density over a node subsample matches `target_density`.
/// Returns the calibrated config.
inline GenerativeConfig calibrate_density(GenerativeConfig cfg, double target_density,
                                          std::size_t subsample = 800) {
  if (!(target_density > 0.0 && target_density < 1.0)) throw UsageError("target density must lie in (0, 1)");
  const std::size_t m = std::min(subsample, cfg.n_nodes);
  std::vector<NodeId> nodes(m);
  for (std::size_t t = 0; t < m; ++t) nodes[t] = static_cast<NodeId>(t * cfg.n_nodes / m);
  const GroundTruth base = sample_ground_truth(cfg);
  auto density_at = [&](double shift) {
    GroundTruth gt = base;
    gt.gamma.array() += shift;
    gt.delta.array() += shift;
    return expected_stats(ground_truth_geometry(gt), nodes).density;
  };
  double lo = -30.0;
  double hi = 30.0;
  for (int it = 0; it < 60; ++it) {
    const double mid = 0.5 * (lo + hi);
    (density_at(mid) < target_density ? lo : hi) = mid;
  }
  const double shift = 0.5 * (lo + hi);
  cfg.mu_gamma += shift;
  cfg.mu_delta += shift;
  return cfg;
}

/// Node order grouped by dominant archetype (lowest index on ties), and by
/// decreasing membership in it within a group; node index breaks ties.
inline std::vector<NodeId> reorder_by_membership(const Matrix& Z) {
  const auto n = static_cast<std::size_t>(Z.cols());
  std::vector<Eigen::Index> top(n);
  for (std::size_t i = 0; i < n; ++i) {
    Eigen::Index arg = 0;
    for (Eigen::Index d = 1; d < Z.rows(); ++d) {
      if (Z(d, static_cast<Eigen::Index>(i)) > Z(arg, static_cast<Eigen::Index>(i))) arg = d;
    }
    top[i] = arg;
  }
  std::vector<NodeId> order(n);
  std::iota(order.begin(), order.end(), NodeId{0});
  std::stable_sort(order.begin(), order.end(), [&](NodeId a, NodeId b) {
    if (top[a] != top[b]) return top[a] < top[b];
    const double ma = Z(top[a], a);
    const double mb = Z(top[b], b);
    if (ma != mb) return ma > mb;
    return a < b;
  });
  return order;
}

/// Recipe files: every GenerativeConfig field by name; "alpha" may be a
/// scalar (symmetric Dirichlet). An optional "calibrate" object
/// {"target_density": d, "subsample": m} shifts both effect means by a common
/// offset until the expected density is d.
struct GenerativeRecipe {
  GenerativeConfig config;
  std::optional<double> target_density;
  std::size_t subsample = 1000;
};

inline GenerativeRecipe recipe_from_json(const nlohmann::json& j) {
  GenerativeRecipe r;
  GenerativeConfig& c = r.config;
  try {
    c.n_nodes = j.at("n_nodes").get<std::size_t>();
    c.k = j.at("k").get<std::size_t>();
    const auto& a = j.at("alpha");
    if (a.is_number()) {
      c.alpha.assign(c.k, a.get<double>());
    } else {
      c.alpha = a.get<std::vector<double>>();
    }
    c.mu_gamma = j.value("mu_gamma", 0.0);
    c.sigma_gamma = j.value("sigma_gamma", 1.0);
    c.mu_delta = j.value("mu_delta", 0.0);
    c.sigma_delta = j.value("sigma_delta", 1.0);
    if (j.contains("mu_A")) c.mu_A = j.at("mu_A").get<std::vector<double>>();
    c.sigma_A = j.value("sigma_A", 1.0);
    c.seed = j.value("seed", std::uint64_t{0});
    if (j.contains("calibrate")) {
      const auto& cal = j.at("calibrate");
      r.target_density = cal.at("target_density").get<double>();
      r.subsample = cal.value("subsample", r.subsample);
    }
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("generative recipe: ") + e.what());
  }
  c.validate();
  return r;
}

/// Resolved config, calibrated when the recipe asks for it.
inline GenerativeConfig resolve_recipe(const GenerativeRecipe& r) {
  return r.target_density ? calibrate_density(r.config, *r.target_density, r.subsample) : r.config;
}

inline nlohmann::json to_json(const GenerativeConfig& c) {
  return {{"n_nodes", c.n_nodes}, {"k", c.k}, {"alpha", c.alpha}, {"mu_gamma", c.mu_gamma},
          {"sigma_gamma", c.sigma_gamma}, {"mu_delta", c.mu_delta}, {"sigma_delta", c.sigma_delta},
          {"mu_A", c.mu_A}, {"sigma_A", c.sigma_A}, {"seed", c.seed}};
}

namespace detail {

inline nlohmann::json matrix_json(const Matrix& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    std::vector<double> row(static_cast<std::size_t>(m.cols()));
    for (Eigen::Index c = 0; c < m.cols(); ++c) row[static_cast<std::size_t>(c)] = m(r, c);
    rows.push_back(row);
  }
  return rows;
}

}  // namespace detail

/// Sidecar describing the latent truth behind a generated graph. Matrices
/// are stored row by row: A is K x K (columns are archetypes), Z is K x N.
inline nlohmann::json to_json(const GroundTruth& gt, const GenerativeConfig& cfg) {
  return {{"format", "slim-ground-truth"},
          {"version", 1},
          {"config", to_json(cfg)},
          {"A", detail::matrix_json(gt.A)},
          {"Z", detail::matrix_json(gt.Z)},
          {"gamma", std::vector<double>(gt.gamma.begin(), gt.gamma.end())},
          {"delta", std::vector<double>(gt.delta.begin(), gt.delta.end())}};
}

}  // namespace slim

#endif  // SLIM_GENERATE_HPP
