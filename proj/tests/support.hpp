#ifndef SLIM_TESTS_SUPPORT_HPP
#define SLIM_TESTS_SUPPORT_HPP

// Shared fixtures and independent reference implementations for the tests.
// The references deliberately avoid the library's own kernels: they rebuild
// rates from the raw parameters with plain loops and use Boost for Bessel
// functions.

#include <cmath>
#include <cstdint>
#include <vector>

#include <boost/math/special_functions/bessel.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>

#include "slim/slim.hpp"

namespace testing_support {

using slim::Matrix;
using slim::Vector;

/// Connected random graph: a random spanning path plus Bernoulli(p) extra edges.
inline slim::SignedGraph random_graph(std::size_t n, double p, std::uint64_t seed, bool directed = false,
                                      double neg_share = 0.3, int max_abs_weight = 3) {
  slim::SplitMix64 rng(seed);
  std::vector<slim::NodeId> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = static_cast<slim::NodeId>(i);
  for (std::size_t k = n; k > 1; --k) std::swap(order[k - 1], order[slim::uniform_index(rng, k)]);
  auto draw_weight = [&] {
    const auto mag = static_cast<slim::Weight>(1 + slim::uniform_index(rng, static_cast<std::uint64_t>(max_abs_weight)));
    return slim::uniform01(rng) < neg_share ? -mag : mag;
  };
  std::vector<slim::Edge> edges;
  std::vector<std::vector<bool>> used(n, std::vector<bool>(n, false));
  for (std::size_t k = 1; k < n; ++k) {
    slim::NodeId a = order[k - 1], b = order[k];
    if (!directed && a > b) std::swap(a, b);
    edges.push_back({a, b, draw_weight()});
    used[a][b] = true;
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j || (!directed && j < i) || used[i][j]) continue;
      if (slim::uniform01(rng) < p) {
        edges.push_back({static_cast<slim::NodeId>(i), static_cast<slim::NodeId>(j), draw_weight()});
        used[i][j] = true;
      }
    }
  }
  return slim::SignedGraph(n, std::move(edges), directed);
}

inline std::vector<slim::Variant> all_variants() {
  std::vector<slim::Variant> out;
  for (auto m : {slim::ModelKind::sldm, slim::ModelKind::slim}) {
    for (auto d : {slim::Direction::undirected, slim::Direction::directed, slim::Direction::expressive}) {
      out.push_back({m, d, -1.0});
    }
  }
  // The repelling form of the expressive negative rate.
  out.push_back({slim::ModelKind::sldm, slim::Direction::expressive, 1.0});
  out.push_back({slim::ModelKind::slim, slim::Direction::expressive, 1.0});
  return out;
}

inline slim::Params random_params(const slim::Variant& v, Eigen::Index k, Eigen::Index n, std::uint64_t seed,
                                  double scale = 0.5) {
  slim::Params p = slim::Params::zeros(v, k, n);
  slim::SplitMix64 rng(seed);
  for (auto& t : p.tensors()) {
    for (double& x : t.data) x = scale * slim::standard_normal(rng);
  }
  return p;
}

// ---------------------------------------------------------------------------
// Reference model

inline double ref_sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

inline Matrix ref_softmax(const Matrix& logits) {
  Matrix out = logits;
  for (Eigen::Index c = 0; c < logits.cols(); ++c) {
    double total = 0.0;
    for (Eigen::Index r = 0; r < logits.rows(); ++r) total += std::exp(logits(r, c));
    for (Eigen::Index r = 0; r < logits.rows(); ++r) out(r, c) = std::exp(logits(r, c)) / total;
  }
  return out;
}

struct RefPositions {
  Matrix src, dst, neg_src;  // K x N
  Matrix A;                  // SLIM only
};

/// Positions entering the distances, built entry by entry.
inline RefPositions ref_positions(const slim::Params& p) {
  const auto& v = p.variant;
  const Eigen::Index n = p.n(), k = p.k();
  RefPositions out;
  if (!v.archetypal()) {
    out.src = p.Z;
    out.dst = v.directed() ? p.W : p.Z;
    if (v.expressive()) out.neg_src = p.U;
    return out;
  }
  std::vector<Matrix> sets{ref_softmax(p.Z)};
  if (v.directed()) sets.push_back(ref_softmax(p.W));
  if (v.expressive()) sets.push_back(ref_softmax(p.U));
  const Eigen::Index total = n * static_cast<Eigen::Index>(sets.size());
  Matrix X(k, total);
  for (std::size_t s = 0; s < sets.size(); ++s) X.middleCols(static_cast<Eigen::Index>(s) * n, n) = sets[s];
  // C_nd = X_dn sigma(G_dn) / sum_n' X_dn' sigma(G_dn')
  Matrix C(total, k);
  for (Eigen::Index d = 0; d < k; ++d) {
    double mass = 0.0;
    for (Eigen::Index c = 0; c < total; ++c) mass += X(d, c) * ref_sigmoid(p.G(d, c));
    for (Eigen::Index c = 0; c < total; ++c) C(c, d) = X(d, c) * ref_sigmoid(p.G(d, c)) / mass;
  }
  Matrix XC = Matrix::Zero(k, k);
  for (Eigen::Index a = 0; a < k; ++a)
    for (Eigen::Index b = 0; b < k; ++b)
      for (Eigen::Index c = 0; c < total; ++c) XC(a, b) += X(a, c) * C(c, b);
  out.A = Matrix::Zero(k, k);
  for (Eigen::Index a = 0; a < k; ++a)
    for (Eigen::Index b = 0; b < k; ++b)
      for (Eigen::Index c = 0; c < k; ++c) out.A(a, b) += p.R(a, c) * XC(c, b);
  auto embed = [&](std::size_t s) {
    Matrix m = Matrix::Zero(k, n);
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index a = 0; a < k; ++a)
        for (Eigen::Index b = 0; b < k; ++b) m(a, i) += out.A(a, b) * sets[s](b, i);
    return m;
  };
  out.src = embed(0);
  out.dst = v.directed() ? embed(1) : out.src;
  if (v.expressive()) out.neg_src = embed(2);
  return out;
}

inline double ref_dist(const Matrix& a, Eigen::Index i, const Matrix& b, Eigen::Index j) {
  double s = 0.0;
  for (Eigen::Index r = 0; r < a.rows(); ++r) s += (a(r, i) - b(r, j)) * (a(r, i) - b(r, j));
  return std::sqrt(s);
}

/// Rates of dyad (i, j) straight from the model definition.
inline std::pair<double, double> ref_rates(const slim::Params& p, const RefPositions& pos, Eigen::Index i,
                                           Eigen::Index j) {
  const auto& v = p.variant;
  double lp, ln;
  if (v.directed()) {
    lp = p.beta(i) + p.gamma(j) - ref_dist(pos.src, i, pos.dst, j);
    if (v.expressive()) {
      ln = p.delta(i) + p.epsilon(j) + v.expressive_negative_sign * ref_dist(pos.neg_src, i, pos.dst, j);
    } else {
      ln = p.delta(i) + p.epsilon(j) + ref_dist(pos.src, i, pos.dst, j);
    }
  } else {
    const double d = ref_dist(pos.src, i, pos.src, j);
    lp = p.gamma(i) + p.gamma(j) - d;
    ln = p.delta(i) + p.delta(j) + d;
  }
  return {std::max(std::exp(lp), slim::kRateFloor), std::max(std::exp(ln), slim::kRateFloor)};
}

/// -log Skellam(y; a, b) through Boost's Bessel function.
inline double ref_skellam_nll(long long y, double a, double b) {
  const double x = 2.0 * std::sqrt(a * b);
  const double nu = static_cast<double>(std::llabs(y));
  // Exponentially scaled form keeps large arguments finite.
  const double log_i = std::log(boost::math::cyl_bessel_i(nu, x));
  return a + b - 0.5 * static_cast<double>(y) * std::log(a / b) - log_i;
}

/// Negative log-posterior over every dyad of the graph, with double loops.
inline double ref_negative_log_posterior(const slim::Params& p, const slim::SignedGraph& g, double rho) {
  const RefPositions pos = ref_positions(p);
  const auto n = static_cast<Eigen::Index>(g.n_nodes());
  double data = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      if (i == j || (!g.directed() && j < i)) continue;
      const auto [a, b] = ref_rates(p, pos, i, j);
      data += ref_skellam_nll(g.weight(static_cast<slim::NodeId>(i), static_cast<slim::NodeId>(j)), a, b);
    }
  }
  double reg = 0.0;
  for (const auto& t : p.tensors()) {
    const std::string name(t.name);
    const bool effect = name == "beta" || name == "gamma" || name == "delta" || name == "epsilon";
    const bool position = !p.variant.archetypal() && (name == "Z" || name == "W" || name == "U");
    if (effect || position) {
      for (double x : t.data) reg += x * x;
    }
  }
  if (p.variant.archetypal()) reg += pos.A.squaredNorm();
  return data + 0.5 * rho * reg;
}

// ---------------------------------------------------------------------------
// Extended-precision Bessel reference

using BigFloat = boost::multiprecision::cpp_bin_float_50;

/// log I_nu(x) from 200 series terms in 50-digit arithmetic.
inline double big_log_bessel(unsigned nu, double x) {
  const BigFloat half = BigFloat(x) / 2;
  BigFloat term = boost::multiprecision::pow(half, nu);
  for (unsigned f = 2; f <= nu; ++f) term /= f;
  BigFloat sum = 0;
  const BigFloat q = half * half;
  for (unsigned k = 0; k < 200; ++k) {
    sum += term;
    term *= q / (BigFloat(k + 1) * BigFloat(k + 1 + nu));
  }
  return static_cast<double>(boost::multiprecision::log(sum));
}

}  // namespace testing_support

#endif  // SLIM_TESTS_SUPPORT_HPP
