#ifndef SLIM_INIT_HPP
#define SLIM_INIT_HPP

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "slim/error.hpp"
#include "slim/graph.hpp"
#include "slim/model.hpp"
#include "slim/optim.hpp"
#include "slim/rng.hpp"

namespace slim {

using SparseMatrix = Eigen::SparseMatrix<double>;

/// Undirected view used for initialisation: directed weights are summed over
/// both directions. If that cancellation isolates a node, absolute weights
/// are summed instead.
inline SignedGraph undirected_view(const SignedGraph& g) {
  if (!g.directed()) return g;
  std::vector<EdgeRecord> recs;
  recs.reserve(g.n_edges());
  for (const auto& e : g.edges()) {
    recs.push_back({std::to_string(e.i), std::to_string(e.j), e.weight, std::nullopt});
  }
  auto build = [&](const std::vector<EdgeRecord>& in) {
    std::vector<Edge> edges;
    for (const auto& r : symmetrize(in)) {
      edges.push_back({static_cast<NodeId>(std::stoul(r.source)), static_cast<NodeId>(std::stoul(r.target)), r.weight});
    }
    return SignedGraph(g.n_nodes(), std::move(edges), false,
                       std::vector<std::string>(g.labels().begin(), g.labels().end()));
  };
  SignedGraph out = build(recs);
  for (std::size_t v = 0; v < out.n_nodes(); ++v) {
    if (out.neighbors(static_cast<NodeId>(v)).empty()) {
      for (auto& r : recs) r.weight = r.weight < 0 ? -r.weight : r.weight;
      return build(recs);
    }
  }
  return out;
}

/// L = I - D^{-1/2} A D^{-1/2} with D_ii = sum_j |A_ij|, for the signed
/// weighted adjacency A. Directed graphs are symmetrized first.
inline SparseMatrix signed_normalized_laplacian(const SignedGraph& graph) {
  const SignedGraph g = undirected_view(graph);
  const auto n = static_cast<Eigen::Index>(g.n_nodes());
  Vector inv_sqrt_deg(n);
  for (Eigen::Index v = 0; v < n; ++v) {
    double d = 0.0;
    for (const auto& nb : g.neighbors(static_cast<NodeId>(v))) d += std::abs(static_cast<double>(nb.weight));
    if (d == 0.0) throw DataError("signed Laplacian: node " + std::to_string(v) + " is isolated");
    inv_sqrt_deg(v) = 1.0 / std::sqrt(d);
  }
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(static_cast<std::size_t>(n) + 2 * g.n_edges());
  for (Eigen::Index v = 0; v < n; ++v) trip.emplace_back(v, v, 1.0);
  for (const auto& e : g.edges()) {
    const double x = -static_cast<double>(e.weight) * inv_sqrt_deg(e.i) * inv_sqrt_deg(e.j);
    trip.emplace_back(e.i, e.j, x);
    trip.emplace_back(e.j, e.i, x);
  }
  SparseMatrix L(n, n);
  L.setFromTriplets(trip.begin(), trip.end());
  return L;
}

struct SpectralEmbedding {
  Matrix coords;       // K x N, row r is the eigenvector of eigenvalues(r)
  Vector eigenvalues;  // ascending
};

/// Node count up to which the eigenproblem is solved densely.
inline constexpr std::size_t kDenseEigenLimit = 3000;

namespace detail {

/// Flip each column so that its largest-magnitude entry is positive.
inline void canonical_signs(Matrix& vectors) {
  for (Eigen::Index c = 0; c < vectors.cols(); ++c) {
    Eigen::Index arg = 0;
    vectors.col(c).cwiseAbs().maxCoeff(&arg);
    if (vectors(arg, c) < 0) vectors.col(c) *= -1.0;
  }
}

/// Lanczos with full reorthogonalisation on B = shift*I - L, returning the k
/// largest Ritz pairs of B (the k smallest of L).
inline void lanczos_smallest(const SparseMatrix& L, Eigen::Index k, double shift, double tol,
                             Vector& values, Matrix& vectors) {
  const Eigen::Index n = L.rows();
  std::vector<Vector> basis;
  std::vector<double> alpha;
  std::vector<double> beta;
  SplitMix64 rng(0x1a2c05);
  auto random_unit = [&] {
    Vector v(n);
    for (Eigen::Index i = 0; i < n; ++i) v(i) = uniform01(rng) - 0.5;
    return v;
  };
  auto orthogonalize = [&](Vector& w) {
    for (int pass = 0; pass < 2; ++pass) {
      for (const auto& q : basis) w -= q.dot(w) * q;
    }
  };
  Vector q = random_unit();
  q.normalize();
  Eigen::SelfAdjointEigenSolver<Matrix> tri;
  for (Eigen::Index j = 0; j < n; ++j) {
    basis.push_back(q);
    Vector w = shift * q - L * q;
    alpha.push_back(q.dot(w));
    orthogonalize(w);
    double b = w.norm();
    const auto m = static_cast<Eigen::Index>(basis.size());
    const bool check = m >= k && (m % 10 == 0 || m == n || b < 1e-12);
    if (check) {
      Matrix T = Matrix::Zero(m, m);
      for (Eigen::Index i = 0; i < m; ++i) {
        T(i, i) = alpha[i];
        if (i + 1 < m) T(i, i + 1) = T(i + 1, i) = beta[i];
      }
      tri.compute(T);
      bool converged = true;
      for (Eigen::Index r = 0; r < k; ++r) {
        const double resid = std::abs(b * tri.eigenvectors()(m - 1, m - 1 - r));
        if (resid > tol) converged = false;
      }
      if (converged || m == n) {
        values.resize(k);
        vectors.resize(n, k);
        for (Eigen::Index r = 0; r < k; ++r) {
          values(r) = shift - tri.eigenvalues()(m - 1 - r);
          Vector v = Vector::Zero(n);
          for (Eigen::Index i = 0; i < m; ++i) v += tri.eigenvectors()(i, m - 1 - r) * basis[i];
          vectors.col(r) = v.normalized();
        }
        return;
      }
    }
    if (b < 1e-12) {
      // Invariant subspace found before convergence; continue from a fresh direction.
      w = random_unit();
      orthogonalize(w);
      b = 0.0;
      q = w.normalized();
    } else {
      q = w / b;
    }
    beta.push_back(b);
  }
  throw NumericError("Lanczos eigensolver did not converge");
}

}  // namespace detail

/// K eigenvectors of the smallest eigenvalues of the signed normalized
/// Laplacian, unit norm, with a deterministic sign convention.
inline SpectralEmbedding spectral_embedding(const SignedGraph& graph, std::size_t k) {
  const std::size_t n = graph.n_nodes();
  if (k < 1 || k >= n) throw UsageError("spectral_embedding: need 1 <= K < N");
  const SparseMatrix L = signed_normalized_laplacian(graph);
  const auto kk = static_cast<Eigen::Index>(k);
  Vector values;
  Matrix vectors;
  if (n <= kDenseEigenLimit) {
    Eigen::SelfAdjointEigenSolver<Matrix> solver{Matrix(L)};
    if (solver.info() != Eigen::Success) throw NumericError("dense eigensolver failed");
    values = solver.eigenvalues().head(kk);
    vectors = solver.eigenvectors().leftCols(kk);
  } else {
    detail::lanczos_smallest(L, kk, 2.0, 1e-10, values, vectors);
  }
  detail::canonical_signs(vectors);
  return {vectors.transpose(), values};
}

/// Greedy furthest-sum selection of k distinct columns of `points`.
/// Starts from a seeded random point, repeatedly adds the point with the
/// largest summed distance to the selection, then swaps the starting point
/// out for the best remaining candidate.
inline std::vector<std::size_t> furthest_sum(const Matrix& points, std::size_t k, std::uint64_t seed) {
  const auto n = static_cast<std::size_t>(points.cols());
  if (k > n) throw UsageError("furthest_sum: k exceeds the number of points");
  if (k == 0) return {};
  SplitMix64 rng(mix_key(seed, 0xf5));
  std::vector<std::size_t> chosen{static_cast<std::size_t>(uniform_index(rng, n))};
  std::vector<bool> used(n, false);
  used[chosen[0]] = true;
  std::vector<double> sum_dist(n, 0.0);
  auto add_distances = [&](std::size_t from, double sign) {
    for (std::size_t v = 0; v < n; ++v) {
      sum_dist[v] += sign * (points.col(static_cast<Eigen::Index>(v)) - points.col(static_cast<Eigen::Index>(from))).norm();
    }
  };
  auto pick = [&] {
    std::size_t best = n;
    for (std::size_t v = 0; v < n; ++v) {
      if (!used[v] && (best == n || sum_dist[v] > sum_dist[best])) best = v;
    }
    used[best] = true;
    add_distances(best, 1.0);
    return best;
  };
  add_distances(chosen[0], 1.0);
  while (chosen.size() < k) chosen.push_back(pick());
  if (k < n) {
    const std::size_t start = chosen.front();
    chosen.erase(chosen.begin());
    add_distances(start, -1.0);
    used[start] = false;
    chosen.push_back(pick());
  }
  return chosen;
}

/// Gate logits for SLIM initialisation: the selected node of each archetype
/// gets +3, every other entry of that row a common value chosen so that the
/// selected node holds `share` of the gated column mass.
inline Matrix seed_gates(const Matrix& mixtures, std::span<const std::size_t> selected, double share = 0.95) {
  constexpr double kSelectedGate = 3.0;
  Matrix G(mixtures.rows(), mixtures.cols());
  for (Eigen::Index d = 0; d < mixtures.rows(); ++d) {
    const auto sel = static_cast<Eigen::Index>(selected[static_cast<std::size_t>(d)]);
    const double own = mixtures(d, sel) * sigmoid(kSelectedGate);
    const double rest = mixtures.row(d).sum() - mixtures(d, sel);
    double background = -kSelectedGate;
    if (rest > 0.0) {
      const double s = std::min(sigmoid(-kSelectedGate), own * (1.0 - share) / (share * rest));
      background = std::log(s) - std::log1p(-s);
    }
    G.row(d).setConstant(background);
    G(d, sel) = kSelectedGate;
  }
  return G;
}

/// Deterministic starting point for every variant.
inline Params init_params(const SignedGraph& graph, const TrainConfig& cfg) {
  const auto n = static_cast<Eigen::Index>(graph.n_nodes());
  const auto k = static_cast<Eigen::Index>(cfg.k);
  const Variant& v = cfg.variant;
  if (v.directed() != graph.directed()) {
    throw UsageError("model variant " + to_string(v) + " does not match graph directedness");
  }
  Params p = Params::zeros(v, k, n);
  Matrix coords;
  if (cfg.init == InitMethod::random) {
    SplitMix64 rng(mix_key(cfg.seed, 0x1417));
    coords.resize(k, n);
    for (Eigen::Index i = 0; i < coords.size(); ++i) coords(i) = 0.1 * standard_normal(rng);
  } else {
    coords = spectral_embedding(graph, cfg.k).coords;
  }
  if (!v.archetypal()) {
    p.Z = coords;
    if (v.directed()) p.W = coords;
    if (v.expressive()) p.U = coords;
    return p;
  }
  const auto selected = furthest_sum(coords, cfg.k, cfg.seed);
  for (Eigen::Index d = 0; d < k; ++d) p.R.col(d) = coords.col(static_cast<Eigen::Index>(selected[d]));
  // Mixture logits: soft assignment to the seeded archetype locations.
  Matrix sq(k, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index d = 0; d < k; ++d) sq(d, i) = (coords.col(i) - p.R.col(d)).squaredNorm();
  }
  const double scale = sq.mean();
  const Matrix logits = scale > 0.0 ? Matrix(-sq / scale) : Matrix(Matrix::Zero(k, n));
  p.Z = logits;
  if (v.directed()) p.W = logits;
  if (v.expressive()) p.U = logits;
  Matrix mixtures(k, v.position_sets() * n);
  for (Eigen::Index s = 0; s < v.position_sets(); ++s) mixtures.middleCols(s * n, n) = mixture_weights(logits);
  p.G = seed_gates(mixtures, selected);
  return p;
}

}  // namespace slim

#endif  // SLIM_INIT_HPP
