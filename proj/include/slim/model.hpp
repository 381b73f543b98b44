#ifndef SLIM_MODEL_HPP
#define SLIM_MODEL_HPP

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "slim/error.hpp"
#include "slim/graph.hpp"
#include "slim/skellam.hpp"

namespace slim {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

enum class ModelKind { sldm, slim };

enum class Direction {
  undirected,
  directed,    // source Z, target W
  expressive,  // additionally a negative-source U
};

struct Variant {
  ModelKind model = ModelKind::sldm;
  Direction direction = Direction::undirected;
  /// Expressive variant only: sign of the distance inside the negative rate.
  /// The published three-embedding form uses -||u_i - w_j||; +1 gives the
  /// repelling form used by every other variant.
  double expressive_negative_sign = -1.0;

  bool directed() const noexcept { return direction != Direction::undirected; }
  bool expressive() const noexcept { return direction == Direction::expressive; }
  bool archetypal() const noexcept { return model == ModelKind::slim; }
  /// Number of K x N position blocks (Z; Z, W; Z, U, W).
  Eigen::Index position_sets() const noexcept {
    return direction == Direction::undirected ? 1 : direction == Direction::directed ? 2 : 3;
  }

  friend bool operator==(const Variant&, const Variant&) = default;
};

inline std::string to_string(ModelKind m) { return m == ModelKind::sldm ? "sldm" : "slim"; }

inline std::string to_string(Direction d) {
  switch (d) {
    case Direction::undirected: return "undirected";
    case Direction::directed: return "directed";
    case Direction::expressive: return "expressive";
  }
  return "?";
}

inline ModelKind parse_model_kind(std::string_view s) {
  if (s == "sldm") return ModelKind::sldm;
  if (s == "slim") return ModelKind::slim;
  throw UsageError("unknown model '" + std::string(s) + "' (expected sldm or slim)");
}

inline Direction parse_direction(std::string_view s) {
  if (s == "undirected") return Direction::undirected;
  if (s == "directed") return Direction::directed;
  if (s == "expressive" || s == "directed-expressive") return Direction::expressive;
  throw UsageError("unknown variant '" + std::string(s) +
                   "' (expected undirected, directed or expressive)");
}

inline std::string to_string(const Variant& v) { return to_string(v.model) + "/" + to_string(v.direction); }

/// Mutable view of one named parameter tensor, flattened column-major.
struct TensorRef {
  std::string_view name;
  Eigen::Index rows = 0;
  Eigen::Index cols = 0;
  std::span<double> data;
};

struct ConstTensorRef {
  std::string_view name;
  Eigen::Index rows = 0;
  Eigen::Index cols = 0;
  std::span<const double> data;
};

/// Trainable state of every model variant.
///
///  - SLDM: Z (and W, U when directed) are latent positions, K x N.
///  - SLIM: Z (W, U) are pre-softmax mixture logits, K x N; R is the K x K
///    archetype location basis; G holds the pre-sigmoid gates, K x (sets * N).
///  - Undirected effects: gamma (positive), delta (negative).
///  - Directed effects: beta/gamma are the positive sender/receiver effects,
///    delta/epsilon the negative sender/receiver effects.
struct Params {
  Variant variant;
  Matrix Z, W, U, R, G;
  Vector beta, gamma, delta, epsilon;

  Eigen::Index k() const noexcept { return Z.rows(); }
  Eigen::Index n() const noexcept { return Z.cols(); }

  static Params zeros(const Variant& v, Eigen::Index k, Eigen::Index n) {
    if (k < 1) throw UsageError("latent dimension must be at least 1");
    Params p;
    p.variant = v;
    p.Z = Matrix::Zero(k, n);
    if (v.directed()) p.W = Matrix::Zero(k, n);
    if (v.expressive()) p.U = Matrix::Zero(k, n);
    if (v.archetypal()) {
      p.R = Matrix::Zero(k, k);
      p.G = Matrix::Zero(k, v.position_sets() * n);
    }
    p.gamma = Vector::Zero(n);
    p.delta = Vector::Zero(n);
    if (v.directed()) {
      p.beta = Vector::Zero(n);
      p.epsilon = Vector::Zero(n);
    }
    return p;
  }

  Params zeros_like() const { return zeros(variant, k(), n()); }

  std::vector<TensorRef> tensors() { return collect<TensorRef>(*this); }
  std::vector<ConstTensorRef> tensors() const { return collect<ConstTensorRef>(*this); }

  /// Shapes consistent with the variant, all entries finite.
  void validate() const {
    const Params ref = zeros(variant, k(), n());
    const auto want = ref.tensors();
    const auto have = tensors();
    if (want.size() != have.size()) throw DataError("parameter set does not match variant");
    for (std::size_t t = 0; t < want.size(); ++t) {
      if (want[t].rows != have[t].rows || want[t].cols != have[t].cols) {
        throw DataError("tensor '" + std::string(have[t].name) + "' has wrong shape");
      }
      for (double x : have[t].data) {
        if (!std::isfinite(x)) {
          throw NumericError("tensor '" + std::string(have[t].name) + "' has non-finite entries");
        }
      }
    }
  }

 private:
  template <class Ref, class Self>
  static std::vector<Ref> collect(Self& self) {
    std::vector<Ref> out;
    auto add = [&out](std::string_view name, auto& m) {
      out.push_back(Ref{name, m.rows(), m.cols(), {m.data(), static_cast<std::size_t>(m.size())}});
    };
    const bool arch = self.variant.archetypal();
    if (arch) add("R", self.R);
    add(arch ? "Z_logits" : "Z", self.Z);
    if (self.variant.directed()) add(arch ? "W_logits" : "W", self.W);
    if (self.variant.expressive()) add(arch ? "U_logits" : "U", self.U);
    if (arch) add("G", self.G);
    if (self.variant.directed()) add("beta", self.beta);
    add("gamma", self.gamma);
    add("delta", self.delta);
    if (self.variant.directed()) add("epsilon", self.epsilon);
    return out;
  }
};

// ---------------------------------------------------------------------------
// Simplex maps

/// Columnwise softmax, max-subtracted.
inline Matrix mixture_weights(const Matrix& logits) {
  Matrix out(logits.rows(), logits.cols());
  for (Eigen::Index c = 0; c < logits.cols(); ++c) {
    const double m = logits.col(c).maxCoeff();
    out.col(c) = (logits.col(c).array() - m).exp().matrix();
    out.col(c) /= out.col(c).sum();
  }
  return out;
}

inline double sigmoid(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

/// C (N x K) with c_nd proportional to z_dn * sigmoid(g_dn), columns on the simplex.
inline Matrix gate_matrix(const Matrix& Z, const Matrix& G) {
  if (Z.rows() != G.rows() || Z.cols() != G.cols()) throw DataError("gate_matrix: shape mismatch");
  const Matrix M = Z.cwiseProduct(G.unaryExpr([](double g) { return sigmoid(g); }));
  Matrix C = M.transpose();
  for (Eigen::Index d = 0; d < C.cols(); ++d) {
    const double s = C.col(d).sum();
    if (!(s > 0.0)) {
      throw NumericError("gate_matrix: column " + std::to_string(d) + " has no mass (underflow)");
    }
    C.col(d) /= s;
  }
  return C;
}

/// A = R Z C.
inline Matrix compose_archetypes(const Matrix& R, const Matrix& Z, const Matrix& C) {
  if (R.cols() != Z.rows() || Z.cols() != C.rows()) {
    throw DataError("compose_archetypes: shape mismatch");
  }
  return R * (Z * C);
}

// ---------------------------------------------------------------------------
// Geometry: everything the dyad kernel needs, derived from Params.

/// Rate distances are Euclidean distances between columns of `src` (or
/// `neg_src` for the negative rate of the expressive variant) and `dst`.
struct Geometry {
  Matrix src, dst, neg_src;
  const Vector* pos_src_effect = nullptr;  // gamma or beta
  const Vector* pos_dst_effect = nullptr;  // gamma
  const Vector* neg_src_effect = nullptr;  // delta
  const Vector* neg_dst_effect = nullptr;  // delta or epsilon
  bool directed = false;
  bool separate_negative = false;
  double negative_sign = 1.0;

  // SLIM intermediates.
  Matrix X;        // simplex positions of all sets, K x (sets * N)
  Matrix gates;    // sigmoid(G)
  Matrix C;        // (sets * N) x K
  Vector mass;     // column sums of X o sigmoid(G)
  Matrix A;        // archetypes, K x K
};

/// The geometry borrows the random-effect vectors of `p`, which must outlive it.
inline Geometry make_geometry(Params&&) = delete;

inline Geometry make_geometry(const Params& p) {
  Geometry g;
  const Variant& v = p.variant;
  g.directed = v.directed();
  g.separate_negative = v.expressive();
  g.negative_sign = v.expressive() ? v.expressive_negative_sign : 1.0;
  if (v.directed()) {
    g.pos_src_effect = &p.beta;
    g.pos_dst_effect = &p.gamma;
    g.neg_src_effect = &p.delta;
    g.neg_dst_effect = &p.epsilon;
  } else {
    g.pos_src_effect = g.pos_dst_effect = &p.gamma;
    g.neg_src_effect = g.neg_dst_effect = &p.delta;
  }
  const Eigen::Index n = p.n();
  if (!v.archetypal()) {
    g.src = p.Z;
    g.dst = v.directed() ? p.W : p.Z;
    if (v.expressive()) g.neg_src = p.U;
    return g;
  }
  const Eigen::Index sets = v.position_sets();
  g.X.resize(p.k(), sets * n);
  g.X.leftCols(n) = mixture_weights(p.Z);
  if (v.directed()) g.X.middleCols(n, n) = mixture_weights(p.W);
  if (v.expressive()) g.X.rightCols(n) = mixture_weights(p.U);
  g.gates = p.G.unaryExpr([](double x) { return sigmoid(x); });
  const Matrix M = g.X.cwiseProduct(g.gates);
  g.mass = M.rowwise().sum();
  g.C = M.transpose();
  for (Eigen::Index d = 0; d < g.C.cols(); ++d) {
    if (!(g.mass(d) > 0.0)) throw NumericError("gate column " + std::to_string(d) + " has no mass");
    g.C.col(d) /= g.mass(d);
  }
  g.A = compose_archetypes(p.R, g.X, g.C);
  g.src = g.A * g.X.leftCols(n);
  g.dst = v.directed() ? Matrix(g.A * g.X.middleCols(n, n)) : g.src;
  if (v.expressive()) g.neg_src = g.A * g.X.rightCols(n);
  return g;
}

/// Lower bound applied to both rates before taking logs.
inline constexpr double kRateFloor = 1e-30;

struct DyadRates {
  double log_pos = 0.0;
  double log_neg = 0.0;
  double pos = 0.0;
  double neg = 0.0;
  double dist_pos = 0.0;
  double dist_neg = 0.0;
  bool pos_clamped = false;
  bool neg_clamped = false;

  SkellamRates rates() const { return {pos, neg}; }
};

inline double column_distance(const Matrix& a, Eigen::Index i, const Matrix& b, Eigen::Index j) {
  return (a.col(i) - b.col(j)).norm();
}

inline DyadRates dyad_rates(const Geometry& g, Eigen::Index i, Eigen::Index j) {
  static const double log_floor = std::log(kRateFloor);
  DyadRates r;
  r.dist_pos = column_distance(g.src, i, g.dst, j);
  r.dist_neg = g.separate_negative ? column_distance(g.neg_src, i, g.dst, j) : r.dist_pos;
  const double eta_pos = (*g.pos_src_effect)(i) + (*g.pos_dst_effect)(j) - r.dist_pos;
  const double eta_neg = (*g.neg_src_effect)(i) + (*g.neg_dst_effect)(j) + g.negative_sign * r.dist_neg;
  r.pos_clamped = eta_pos < log_floor;
  r.neg_clamped = eta_neg < log_floor;
  r.log_pos = r.pos_clamped ? log_floor : eta_pos;
  r.log_neg = r.neg_clamped ? log_floor : eta_neg;
  r.pos = r.pos_clamped ? kRateFloor : std::exp(r.log_pos);
  r.neg = r.neg_clamped ? kRateFloor : std::exp(r.log_neg);
  return r;
}

/// Rates for a list of pairs under any variant.
inline std::vector<SkellamRates> pair_rates(const Params& p, std::span<const Dyad> pairs) {
  const Geometry g = make_geometry(p);
  std::vector<SkellamRates> out;
  out.reserve(pairs.size());
  for (const auto& d : pairs) {
    if (d.i >= p.n() || d.j >= p.n()) throw UsageError("pair index out of range");
    const DyadRates r = dyad_rates(g, d.i, d.j);
    if (!std::isfinite(r.pos) || !std::isfinite(r.neg)) {
      throw NumericError("non-finite rate at pair (" + std::to_string(d.i) + ", " + std::to_string(d.j) + ")");
    }
    out.push_back(r.rates());
  }
  return out;
}

inline void require_variant(const Params& p, ModelKind m, bool directed, const char* op) {
  if (p.variant.model != m || p.variant.directed() != directed) {
    throw UsageError(std::string(op) + ": parameters are " + to_string(p.variant));
  }
}

inline std::vector<SkellamRates> rates_sldm(const Params& p, std::span<const Dyad> pairs) {
  require_variant(p, ModelKind::sldm, false, "rates_sldm");
  return pair_rates(p, pairs);
}

inline std::vector<SkellamRates> rates_slim(const Params& p, std::span<const Dyad> pairs) {
  require_variant(p, ModelKind::slim, false, "rates_slim");
  return pair_rates(p, pairs);
}

inline std::vector<SkellamRates> rates_directed(const Params& p, std::span<const Dyad> pairs) {
  if (!p.variant.directed()) throw UsageError("rates_directed: parameters are undirected");
  return pair_rates(p, pairs);
}

// ---------------------------------------------------------------------------
// Loss and gradient

struct LossConfig {
  double rho = 1.0;
  /// Multiplies the data term, e.g. (N/|S|)^2 to estimate the full-graph loss.
  double data_scale = 1.0;
};

struct LossResult {
  double value = 0.0;
  double data_term = 0.0;
  double regularizer = 0.0;
  std::size_t dyads = 0;
  std::size_t unconverged_bessel = 0;
};

/// Per-dyad Skellam negative log-likelihood with derivatives with respect to
/// the two log-rates.
struct DyadLoss {
  double value = 0.0;
  double d_log_pos = 0.0;
  double d_log_neg = 0.0;
  bool converged = true;
};

inline DyadLoss skellam_dyad_loss(Weight y, const DyadRates& r) {
  const auto order = static_cast<std::uint64_t>(y < 0 ? -y : y);
  const double x = 2.0 * std::exp(0.5 * (r.log_pos + r.log_neg));
  const BesselSeries bessel = bessel_series(order, x);
  const double half_y = 0.5 * static_cast<double>(y);
  DyadLoss out;
  out.value = r.pos + r.neg - half_y * (r.log_pos - r.log_neg) - bessel.log_value;
  out.converged = bessel.converged;
  // d log I_v(x) / d log(lambda) = (x/2) * I_{v+1}/I_v + v/2
  const double bessel_term = 0.5 * x * bessel.ratio + 0.5 * static_cast<double>(order);
  out.d_log_pos = r.pos - half_y - bessel_term;
  out.d_log_neg = r.neg + half_y - bessel_term;
  return out;
}

namespace detail {

/// Gradient of the loss with respect to the Geometry inputs.
struct GeometryGrad {
  Matrix src, dst, neg_src;
  Vector pos_src, pos_dst, neg_src_eff, neg_dst;

  GeometryGrad(Eigen::Index k, Eigen::Index n, bool separate)
      : src(Matrix::Zero(k, n)), dst(Matrix::Zero(k, n)),
        neg_src(separate ? Matrix::Zero(k, n) : Matrix()),
        pos_src(Vector::Zero(n)), pos_dst(Vector::Zero(n)),
        neg_src_eff(Vector::Zero(n)), neg_dst(Vector::Zero(n)) {}
};

inline void accumulate_distance(const Matrix& a, Eigen::Index i, const Matrix& b, Eigen::Index j,
                                double dist, double coef, Matrix& ga, Matrix& gb) {
  if (dist <= 0.0 || coef == 0.0) return;
  const double s = coef / dist;
  for (Eigen::Index r = 0; r < a.rows(); ++r) {
    const double v = s * (a(r, i) - b(r, j));
    ga(r, i) += v;
    gb(r, j) -= v;
  }
}

template <bool WithGrad>
double dyad_contribution(const Geometry& g, Eigen::Index i, Eigen::Index j, Weight y,
                         double scale, GeometryGrad* grad, std::size_t& unconverged) {
  const DyadRates r = dyad_rates(g, i, j);
  const DyadLoss l = skellam_dyad_loss(y, r);
  if (!std::isfinite(l.value)) {
    throw NumericError("non-finite loss at dyad (" + std::to_string(i) + ", " + std::to_string(j) +
                       ") with y=" + std::to_string(y) + ", log rates " + std::to_string(r.log_pos) +
                       ", " + std::to_string(r.log_neg));
  }
  if (!l.converged) ++unconverged;
  if constexpr (WithGrad) {
    const double gp = r.pos_clamped ? 0.0 : scale * l.d_log_pos;
    const double gn = r.neg_clamped ? 0.0 : scale * l.d_log_neg;
    grad->pos_src(i) += gp;
    grad->pos_dst(j) += gp;
    grad->neg_src_eff(i) += gn;
    grad->neg_dst(j) += gn;
    // eta_pos = ... - d_pos ; eta_neg = ... + sign * d_neg
    if (g.separate_negative) {
      accumulate_distance(g.src, i, g.dst, j, r.dist_pos, -gp, grad->src, grad->dst);
      accumulate_distance(g.neg_src, i, g.dst, j, r.dist_neg, g.negative_sign * gn, grad->neg_src, grad->dst);
    } else {
      accumulate_distance(g.src, i, g.dst, j, r.dist_pos, gn * g.negative_sign - gp, grad->src, grad->dst);
    }
  }
  return scale * l.value;
}

/// Column-wise softmax backward: g_logit = z o (g - <z, g>).
inline Matrix softmax_backward(const Matrix& z, const Matrix& gz) {
  Matrix out(z.rows(), z.cols());
  for (Eigen::Index c = 0; c < z.cols(); ++c) {
    const double dot = z.col(c).dot(gz.col(c));
    out.col(c) = z.col(c).cwiseProduct((gz.col(c).array() - dot).matrix());
  }
  return out;
}

template <bool WithGrad>
LossResult evaluate(const Params& p, const SignedGraph& graph, std::span<const NodeId> block,
                    const LossConfig& cfg, Params* grad_out) {
  if (graph.n_nodes() != static_cast<std::size_t>(p.n())) {
    throw DataError("graph has " + std::to_string(graph.n_nodes()) + " nodes, parameters have " +
                    std::to_string(p.n()));
  }
  if (graph.directed() != p.variant.directed()) {
    throw UsageError("graph directedness does not match model variant " + to_string(p.variant));
  }
  for (std::size_t a = 1; a < block.size(); ++a) {
    if (block[a] <= block[a - 1]) throw UsageError("block must be sorted and duplicate-free");
  }
  const Geometry g = make_geometry(p);
  const Eigen::Index n = p.n();
  const Eigen::Index k = p.k();
  const Variant& v = p.variant;

  LossResult res;
  std::optional<GeometryGrad> gg;
  if constexpr (WithGrad) gg.emplace(k, n, g.separate_negative);
  GeometryGrad* ggp = WithGrad ? &*gg : nullptr;

  double data = 0.0;
  for (std::size_t a = 0; a < block.size(); ++a) {
    const NodeId i = block[a];
    const auto row = graph.neighbors(i);
    auto it = row.begin();
    const std::size_t first = v.directed() ? 0 : a + 1;
    for (std::size_t b = first; b < block.size(); ++b) {
      const NodeId j = block[b];
      if (j == i) continue;
      while (it != row.end() && it->node < j) ++it;
      const Weight y = (it != row.end() && it->node == j) ? it->weight : 0;
      data += dyad_contribution<WithGrad>(g, i, j, y, cfg.data_scale, ggp, res.unconverged_bessel);
      ++res.dyads;
    }
  }

  double reg = 0.0;
  auto sq = [](const auto& m) { return m.squaredNorm(); };
  reg += sq(p.gamma) + sq(p.delta);
  if (v.directed()) reg += sq(p.beta) + sq(p.epsilon);
  if (v.archetypal()) {
    reg += sq(g.A);
  } else {
    reg += sq(p.Z);
    if (v.directed()) reg += sq(p.W);
    if (v.expressive()) reg += sq(p.U);
  }
  reg *= 0.5 * cfg.rho;

  res.data_term = data;
  res.regularizer = reg;
  res.value = data + reg;
  if (!std::isfinite(res.value)) throw NumericError("non-finite loss");

  if constexpr (WithGrad) {
    Params& out = *grad_out;
    out = p.zeros_like();
    const double rho = cfg.rho;
    if (v.directed()) {
      out.beta = gg->pos_src + rho * p.beta;
      out.gamma = gg->pos_dst + rho * p.gamma;
      out.delta = gg->neg_src_eff + rho * p.delta;
      out.epsilon = gg->neg_dst + rho * p.epsilon;
    } else {
      out.gamma = gg->pos_src + gg->pos_dst + rho * p.gamma;
      out.delta = gg->neg_src_eff + gg->neg_dst + rho * p.delta;
    }
    if (!v.archetypal()) {
      if (v.directed()) {
        out.Z = gg->src + rho * p.Z;
        out.W = gg->dst + rho * p.W;
        if (v.expressive()) out.U = gg->neg_src + rho * p.U;
      } else {
        out.Z = gg->src + gg->dst + rho * p.Z;
      }
    } else {
      // Effective positions Y_s = A X_s for each set s.
      const Eigen::Index sets = v.position_sets();
      Matrix gY(k, sets * n);
      if (v.directed()) {
        gY.leftCols(n) = gg->src;
        gY.middleCols(n, n) = gg->dst;
        if (v.expressive()) gY.rightCols(n) = gg->neg_src;
      } else {
        gY = gg->src + gg->dst;
      }
      Matrix gA = gY * g.X.transpose() + rho * g.A;
      Matrix gX = g.A.transpose() * gY;
      // A = R X C
      const Matrix XC = g.X * g.C;
      out.R = gA * XC.transpose();
      gX += p.R.transpose() * gA * g.C.transpose();
      const Matrix gC = (p.R * g.X).transpose() * gA;  // (sets*N) x K
      // C_nd = M_dn / mass_d with M = X o sigmoid(G)
      Matrix gM(k, sets * n);
      for (Eigen::Index d = 0; d < k; ++d) {
        const double centre = gC.col(d).dot(g.C.col(d));
        gM.row(d) = ((gC.col(d).array() - centre) / g.mass(d)).matrix().transpose();
      }
      gX += gM.cwiseProduct(g.gates);
      out.G = gM.cwiseProduct(g.X).cwiseProduct(
          g.gates.unaryExpr([](double s) { return s * (1.0 - s); }));
      out.Z = softmax_backward(g.X.leftCols(n), gX.leftCols(n));
      if (v.directed()) out.W = softmax_backward(g.X.middleCols(n, n), gX.middleCols(n, n));
      if (v.expressive()) out.U = softmax_backward(g.X.rightCols(n), gX.rightCols(n));
    }
  }
  return res;
}

}  // namespace detail

/// Negative log-posterior over all dyads inside `block` (sorted node ids):
/// pairs i < j for undirected graphs, ordered pairs i != j for directed ones.
/// The prior term always covers the full parameter set.
inline LossResult negative_log_posterior(const Params& p, const SignedGraph& graph,
                                         std::span<const NodeId> block, const LossConfig& cfg = {}) {
  return detail::evaluate<false>(p, graph, block, cfg, nullptr);
}

/// Loss together with its exact gradient, written into `grad` (congruent to `p`).
inline LossResult loss_and_gradient(const Params& p, const SignedGraph& graph,
                                    std::span<const NodeId> block, const LossConfig& cfg,
                                    Params& grad) {
  return detail::evaluate<true>(p, graph, block, cfg, &grad);
}

inline std::vector<NodeId> all_nodes(std::size_t n) {
  std::vector<NodeId> nodes(n);
  std::iota(nodes.begin(), nodes.end(), NodeId{0});
  return nodes;
}

inline LossResult full_loss(const Params& p, const SignedGraph& graph, const LossConfig& cfg = {}) {
  const auto nodes = all_nodes(graph.n_nodes());
  return negative_log_posterior(p, graph, nodes, cfg);
}

/// Simplex-coordinate mixtures of a SLIM model (K x sets*N), the archetypes
/// A, and the latent embedding A Z used for visualisation.
struct ArchetypeView {
  Matrix mixtures;
  Matrix C;
  Matrix A;
  Matrix embedding;
};

inline ArchetypeView archetype_view(const Params& p) {
  if (!p.variant.archetypal()) throw UsageError("archetype_view requires a SLIM model");
  Geometry g = make_geometry(p);
  ArchetypeView out;
  out.embedding = g.A * g.X;
  out.mixtures = std::move(g.X);
  out.C = std::move(g.C);
  out.A = std::move(g.A);
  return out;
}

}  // namespace slim

#endif  // SLIM_MODEL_HPP
