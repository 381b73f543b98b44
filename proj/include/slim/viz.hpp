#ifndef SLIM_VIZ_HPP
#define SLIM_VIZ_HPP

#include <cmath>
#include <numbers>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <Eigen/SVD>
#include <json.hpp>

#include "slim/error.hpp"
#include "slim/graph.hpp"
#include "slim/model.hpp"

namespace slim {

enum class LayoutMode { pca, circular };

inline std::string to_string(LayoutMode m) { return m == LayoutMode::pca ? "pca" : "circular"; }

inline LayoutMode parse_layout_mode(std::string_view s) {
  if (s == "pca") return LayoutMode::pca;
  if (s == "circular") return LayoutMode::circular;
  throw UsageError("unknown layout mode '" + std::string(s) + "' (expected pca or circular)");
}

struct OverlayEdge {
  NodeId i = 0;
  NodeId j = 0;
  int sign = 0;
};

struct LayoutExport {
  LayoutMode mode = LayoutMode::pca;
  Matrix node_xy;       // N x 2
  Matrix archetype_xy;  // K x 2, may be empty
  std::vector<OverlayEdge> edges;
  Vector explained_variance;  // pca only: fraction per component
};

/// Projection onto the two leading principal directions of the centered
/// columns of `embedding` (K x N). Archetype columns, if given, are mapped
/// with the same centering and directions.
inline LayoutExport pca_project(const Matrix& embedding, const std::optional<Matrix>& archetypes = std::nullopt) {
  if (embedding.rows() < 2) throw UsageError("pca_project: needs at least two latent dimensions");
  if (embedding.cols() < 1) throw UsageError("pca_project: no points");
  const Vector centre = embedding.rowwise().mean();
  const Matrix centred = (embedding.colwise() - centre).transpose();  // N x K
  Eigen::BDCSVD<Matrix> svd(centred, Eigen::ComputeThinV);
  Matrix dirs = svd.matrixV().leftCols(2);
  for (Eigen::Index c = 0; c < 2; ++c) {
    Eigen::Index arg = 0;
    dirs.col(c).cwiseAbs().maxCoeff(&arg);
    if (dirs(arg, c) < 0) dirs.col(c) *= -1.0;
  }
  LayoutExport out;
  out.mode = LayoutMode::pca;
  out.node_xy = centred * dirs;
  const Vector sv = svd.singularValues();
  const double total = sv.squaredNorm();
  out.explained_variance = Vector::Zero(2);
  if (total > 0) {
    for (Eigen::Index c = 0; c < 2 && c < sv.size(); ++c) out.explained_variance(c) = sv(c) * sv(c) / total;
  }
  if (archetypes) out.archetype_xy = (archetypes->colwise() - centre).transpose() * dirs;
  return out;
}

/// Archetype k sits at angle 2 pi k / K on the unit circle; each node is the
/// convex combination of the anchors given by its mixture column.
inline LayoutExport circular_layout(const Matrix& mixtures) {
  const Eigen::Index k = mixtures.rows();
  if (k < 1) throw UsageError("circular_layout: needs at least one archetype");
  Matrix anchors(k, 2);
  for (Eigen::Index d = 0; d < k; ++d) {
    const double angle = 2.0 * std::numbers::pi * static_cast<double>(d) / static_cast<double>(k);
    anchors(d, 0) = std::cos(angle);
    anchors(d, 1) = std::sin(angle);
  }
  LayoutExport out;
  out.mode = LayoutMode::circular;
  out.archetype_xy = anchors;
  out.node_xy = mixtures.transpose() * anchors;
  return out;
}

enum class SignFilter { all, positive, negative };

inline SignFilter parse_sign_filter(std::string_view s) {
  if (s == "all") return SignFilter::all;
  if (s == "positive") return SignFilter::positive;
  if (s == "negative") return SignFilter::negative;
  throw UsageError("unknown edge filter '" + std::string(s) + "' (expected all, positive or negative)");
}

inline std::vector<OverlayEdge> edge_overlay(const SignedGraph& g, SignFilter filter = SignFilter::all) {
  std::vector<OverlayEdge> out;
  for (const auto& e : g.edges()) {
    const int s = e.weight > 0 ? 1 : -1;
    if (filter == SignFilter::positive && s < 0) continue;
    if (filter == SignFilter::negative && s > 0) continue;
    out.push_back({e.i, e.j, s});
  }
  return out;
}

/// Layout for a fitted model: PCA of the latent positions (A Z for SLIM), or
/// the circular sociotope plot of the mixtures (SLIM only). Directed models
/// use their source embedding.
inline LayoutExport layout_from_params(const Params& p, LayoutMode mode) {
  const auto n = p.n();
  if (mode == LayoutMode::circular) {
    if (!p.variant.archetypal()) throw UsageError("circular layout needs a SLIM model (simplex mixtures)");
    return circular_layout(archetype_view(p).mixtures.leftCols(n));
  }
  if (p.variant.archetypal()) {
    const ArchetypeView v = archetype_view(p);
    return pca_project(v.embedding.leftCols(n), v.A);
  }
  return pca_project(p.Z);
}

inline nlohmann::json to_json(const LayoutExport& layout, const std::vector<std::string>& ids = {}) {
  nlohmann::json nodes = nlohmann::json::array();
  for (Eigen::Index i = 0; i < layout.node_xy.rows(); ++i) {
    nlohmann::json id = ids.empty() ? nlohmann::json(i) : nlohmann::json(ids[static_cast<std::size_t>(i)]);
    nodes.push_back({{"id", id}, {"x", layout.node_xy(i, 0)}, {"y", layout.node_xy(i, 1)}});
  }
  nlohmann::json archetypes = nlohmann::json::array();
  for (Eigen::Index k = 0; k < layout.archetype_xy.rows(); ++k) {
    archetypes.push_back({{"k", k}, {"x", layout.archetype_xy(k, 0)}, {"y", layout.archetype_xy(k, 1)}});
  }
  nlohmann::json edges = nlohmann::json::array();
  for (const auto& e : layout.edges) edges.push_back({{"i", e.i}, {"j", e.j}, {"sign", e.sign}});
  nlohmann::json out = {{"mode", to_string(layout.mode)}, {"nodes", nodes}, {"archetypes", archetypes}, {"edges", edges}};
  if (layout.mode == LayoutMode::pca && layout.explained_variance.size() == 2) {
    out["explained_variance"] = {layout.explained_variance(0), layout.explained_variance(1)};
  }
  return out;
}

inline void write_nodes_csv(std::ostream& out, const LayoutExport& layout, const std::vector<std::string>& ids = {}) {
  out.precision(17);
  out << "id,x,y\n";
  for (Eigen::Index i = 0; i < layout.node_xy.rows(); ++i) {
    if (ids.empty()) {
      out << i;
    } else {
      out << ids[static_cast<std::size_t>(i)];
    }
    out << ',' << layout.node_xy(i, 0) << ',' << layout.node_xy(i, 1) << '\n';
  }
}

inline void write_archetypes_csv(std::ostream& out, const LayoutExport& layout) {
  out.precision(17);
  out << "k,x,y\n";
  for (Eigen::Index k = 0; k < layout.archetype_xy.rows(); ++k) {
    out << k << ',' << layout.archetype_xy(k, 0) << ',' << layout.archetype_xy(k, 1) << '\n';
  }
}

inline void write_edges_csv(std::ostream& out, const LayoutExport& layout) {
  out << "i,j,sign\n";
  for (const auto& e : layout.edges) out << e.i << ',' << e.j << ',' << e.sign << '\n';
}

}  // namespace slim

#endif  // SLIM_VIZ_HPP
