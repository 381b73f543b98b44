#ifndef SLIM_GRAPH_HPP
#define SLIM_GRAPH_HPP

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <istream>
#include <map>
#include <numeric>
#include <optional>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "slim/error.hpp"
#include "slim/rng.hpp"

namespace slim {

using NodeId = std::uint32_t;
using Weight = std::int64_t;

/// One line of an edge list, identifiers as they appear in the file.
struct EdgeRecord {
  std::string source;
  std::string target;
  Weight weight = 0;
  std::optional<std::int64_t> timestamp;

  friend bool operator==(const EdgeRecord&, const EdgeRecord&) = default;
};

/// Fields are separated by any mix of whitespace and commas.
struct EdgeListFormat {
  char comment = '#';
};

struct Edge {
  NodeId i = 0;
  NodeId j = 0;
  Weight weight = 0;

  friend bool operator==(const Edge&, const Edge&) = default;
};

struct Neighbor {
  NodeId node = 0;
  Weight weight = 0;
};

namespace detail {

inline std::optional<std::int64_t> parse_int(std::string_view s) {
  std::int64_t v = 0;
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  const auto* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc{} || ptr != end || s.empty()) return std::nullopt;
  return v;
}

/// Identifier order: numeric ids numerically, everything else after them
/// in lexicographic order.
inline bool id_less(const std::string& a, const std::string& b) {
  const auto na = parse_int(a);
  const auto nb = parse_int(b);
  if (na && nb) return *na < *nb;
  if (na != nb) return na.has_value();
  return a < b;
}

inline std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  auto is_sep = [](char c) { return c == ' ' || c == '\t' || c == ',' || c == '\r'; };
  while (pos < line.size()) {
    while (pos < line.size() && is_sep(line[pos])) ++pos;
    if (pos >= line.size()) break;
    std::size_t end = pos;
    while (end < line.size() && !is_sep(line[end])) ++end;
    out.push_back(line.substr(pos, end - pos));
    pos = end;
  }
  return out;
}

struct PairHash {
  std::size_t operator()(const std::pair<std::string, std::string>& p) const noexcept {
    const std::size_t h1 = std::hash<std::string>{}(p.first);
    const std::size_t h2 = std::hash<std::string>{}(p.second);
    return h1 ^ (h2 + 0x9e3779b97f4a7c15ULL + (h1 << 6) + (h1 >> 2));
  }
};

class DisjointSets {
 public:
  explicit DisjointSets(std::size_t n) : parent_(n), size_(n, 1) {
    std::iota(parent_.begin(), parent_.end(), std::size_t{0});
  }
  std::size_t find(std::size_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }
  bool unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    if (size_[a] < size_[b]) std::swap(a, b);
    parent_[b] = a;
    size_[a] += size_[b];
    return true;
  }
  std::size_t size_of(std::size_t x) { return size_[find(x)]; }

 private:
  std::vector<std::size_t> parent_;
  std::vector<std::size_t> size_;
};

}  // namespace detail

/// Reads `source target weight [timestamp]` records. Blank lines and lines
/// starting with the comment character are skipped. Duplicates are kept.
inline std::vector<EdgeRecord> parse_edge_list(std::istream& in, const EdgeListFormat& format = {}) {
  std::vector<EdgeRecord> records;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto fields = detail::split_fields(line);
    if (fields.empty() || fields.front().front() == format.comment) continue;
    if (fields.size() < 3 || fields.size() > 4) {
      throw DataError("edge list line " + std::to_string(line_no) +
                      ": expected 3 or 4 fields, got " + std::to_string(fields.size()));
    }
    EdgeRecord rec{std::string(fields[0]), std::string(fields[1]), 0, std::nullopt};
    const auto w = detail::parse_int(fields[2]);
    if (!w) {
      throw DataError("edge list line " + std::to_string(line_no) + ": weight '" +
                      std::string(fields[2]) + "' is not an integer");
    }
    rec.weight = *w;
    if (fields.size() == 4) {
      const auto ts = detail::parse_int(fields[3]);
      if (!ts) {
        throw DataError("edge list line " + std::to_string(line_no) + ": timestamp '" +
                        std::string(fields[3]) + "' is not an integer");
      }
      rec.timestamp = *ts;
    }
    records.push_back(std::move(rec));
  }
  if (records.empty()) throw DataError("edge list is empty");
  return records;
}

inline std::vector<EdgeRecord> parse_edge_list(std::string_view text, const EdgeListFormat& format = {}) {
  std::istringstream in{std::string(text)};
  return parse_edge_list(in, format);
}

inline void write_edge_list(std::ostream& out, std::span<const EdgeRecord> records) {
  for (const auto& r : records) {
    out << r.source << ' ' << r.target << ' ' << r.weight;
    if (r.timestamp) out << ' ' << *r.timestamp;
    out << '\n';
  }
}

/// Sums weights of repeated ordered pairs. Output keeps first-appearance
/// order; pairs summing to zero are dropped, timestamps are discarded.
inline std::vector<EdgeRecord> aggregate_temporal(std::span<const EdgeRecord> records) {
  std::unordered_map<std::pair<std::string, std::string>, std::size_t, detail::PairHash> index;
  std::vector<EdgeRecord> out;
  for (const auto& r : records) {
    auto [it, inserted] = index.try_emplace({r.source, r.target}, out.size());
    if (inserted) {
      out.push_back({r.source, r.target, r.weight, std::nullopt});
    } else {
      out[it->second].weight += r.weight;
    }
  }
  std::erase_if(out, [](const EdgeRecord& r) { return r.weight == 0; });
  return out;
}

/// Collapses directed records to undirected ones: w(a,b) = w(a->b) + w(b->a),
/// written with the smaller identifier first. Self-loops pass through
/// unchanged, zero sums are dropped.
inline std::vector<EdgeRecord> symmetrize(std::span<const EdgeRecord> records) {
  std::vector<EdgeRecord> canon;
  canon.reserve(records.size());
  for (const auto& r : records) {
    if (detail::id_less(r.target, r.source)) {
      canon.push_back({r.target, r.source, r.weight, std::nullopt});
    } else {
      canon.push_back({r.source, r.target, r.weight, std::nullopt});
    }
  }
  return aggregate_temporal(canon);
}

/// Immutable integer-weighted signed graph with dense node indices.
/// Undirected graphs store each pair once with i < j.
class SignedGraph {
 public:
  SignedGraph() = default;

  SignedGraph(std::size_t n_nodes, std::vector<Edge> edges, bool directed,
              std::vector<std::string> labels = {})
      : n_nodes_(n_nodes), directed_(directed), edges_(std::move(edges)), labels_(std::move(labels)) {
    if (!labels_.empty() && labels_.size() != n_nodes_) {
      throw DataError("node label count does not match node count");
    }
    for (auto& e : edges_) {
      if (e.i >= n_nodes_ || e.j >= n_nodes_) throw DataError("edge endpoint out of range");
      if (e.i == e.j) throw DataError("self-loop on node " + std::to_string(e.i));
      if (e.weight == 0) throw DataError("zero-weight edge stored");
      if (!directed_ && e.i > e.j) std::swap(e.i, e.j);
    }
    std::sort(edges_.begin(), edges_.end(),
              [](const Edge& a, const Edge& b) { return std::tie(a.i, a.j) < std::tie(b.i, b.j); });
    for (std::size_t k = 1; k < edges_.size(); ++k) {
      if (edges_[k].i == edges_[k - 1].i && edges_[k].j == edges_[k - 1].j) {
        throw DataError("duplicate edge (" + std::to_string(edges_[k].i) + ", " +
                        std::to_string(edges_[k].j) + ")");
      }
    }
    build_adjacency();
  }

  /// Builds a graph from already normalized records: for undirected graphs the
  /// records are symmetrized, for directed graphs repeated pairs are an error
  /// unless aggregated beforehand. Node indices follow identifier order.
  /// Self-loops are dropped.
  static SignedGraph from_records(std::span<const EdgeRecord> records, bool directed) {
    std::vector<EdgeRecord> normalized =
        directed ? std::vector<EdgeRecord>(records.begin(), records.end()) : symmetrize(records);
    std::vector<std::string> ids;
    ids.reserve(normalized.size() * 2);
    for (const auto& r : normalized) {
      ids.push_back(r.source);
      ids.push_back(r.target);
    }
    std::sort(ids.begin(), ids.end(), detail::id_less);
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    std::unordered_map<std::string, NodeId> index;
    index.reserve(ids.size());
    for (std::size_t k = 0; k < ids.size(); ++k) index.emplace(ids[k], static_cast<NodeId>(k));
    std::vector<Edge> edges;
    edges.reserve(normalized.size());
    for (const auto& r : normalized) {
      if (r.source == r.target || r.weight == 0) continue;
      edges.push_back({index.at(r.source), index.at(r.target), r.weight});
    }
    const std::size_t n = ids.size();
    return SignedGraph(n, std::move(edges), directed, std::move(ids));
  }

  std::size_t n_nodes() const noexcept { return n_nodes_; }
  std::size_t n_edges() const noexcept { return edges_.size(); }
  bool directed() const noexcept { return directed_; }
  std::span<const Edge> edges() const noexcept { return edges_; }
  std::span<const std::string> labels() const noexcept { return labels_; }

  std::string label(NodeId i) const {
    return labels_.empty() ? std::to_string(i) : labels_.at(i);
  }

  /// Outgoing neighbors (directed) or all neighbors (undirected), sorted.
  std::span<const Neighbor> neighbors(NodeId i) const {
    return std::span<const Neighbor>(adjacency_).subspan(offsets_[i], offsets_[i + 1] - offsets_[i]);
  }

  /// y(i, j), zero for non-edges. Symmetric for undirected graphs.
  Weight weight(NodeId i, NodeId j) const {
    if (i >= n_nodes_ || j >= n_nodes_) return 0;
    const auto row = neighbors(i);
    const auto it = std::lower_bound(row.begin(), row.end(), j,
                                     [](const Neighbor& nb, NodeId v) { return nb.node < v; });
    return (it != row.end() && it->node == j) ? it->weight : 0;
  }

  std::vector<EdgeRecord> to_records() const {
    std::vector<EdgeRecord> out;
    out.reserve(edges_.size());
    for (const auto& e : edges_) out.push_back({label(e.i), label(e.j), e.weight, std::nullopt});
    return out;
  }

 private:
  void build_adjacency() {
    offsets_.assign(n_nodes_ + 1, 0);
    for (const auto& e : edges_) {
      ++offsets_[e.i + 1];
      if (!directed_) ++offsets_[e.j + 1];
    }
    std::partial_sum(offsets_.begin(), offsets_.end(), offsets_.begin());
    adjacency_.resize(offsets_.back());
    std::vector<std::size_t> fill(offsets_.begin(), offsets_.end() - 1);
    for (const auto& e : edges_) {
      adjacency_[fill[e.i]++] = {e.j, e.weight};
      if (!directed_) adjacency_[fill[e.j]++] = {e.i, e.weight};
    }
    for (std::size_t v = 0; v < n_nodes_; ++v) {
      std::sort(adjacency_.begin() + static_cast<std::ptrdiff_t>(offsets_[v]),
                adjacency_.begin() + static_cast<std::ptrdiff_t>(offsets_[v + 1]),
                [](const Neighbor& a, const Neighbor& b) { return a.node < b.node; });
    }
  }

  std::size_t n_nodes_ = 0;
  bool directed_ = false;
  std::vector<Edge> edges_;
  std::vector<std::string> labels_;
  std::vector<std::size_t> offsets_{0};
  std::vector<Neighbor> adjacency_;
};

/// Subgraph induced on `nodes` (ascending order is preserved as the new index order).
inline SignedGraph induced_subgraph(const SignedGraph& g, std::vector<NodeId> nodes) {
  std::sort(nodes.begin(), nodes.end());
  nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
  std::vector<std::int64_t> remap(g.n_nodes(), -1);
  for (std::size_t k = 0; k < nodes.size(); ++k) remap[nodes[k]] = static_cast<std::int64_t>(k);
  std::vector<Edge> edges;
  for (const auto& e : g.edges()) {
    if (remap[e.i] >= 0 && remap[e.j] >= 0) {
      edges.push_back({static_cast<NodeId>(remap[e.i]), static_cast<NodeId>(remap[e.j]), e.weight});
    }
  }
  std::vector<std::string> labels;
  labels.reserve(nodes.size());
  for (NodeId v : nodes) labels.push_back(g.label(v));
  const std::size_t n = nodes.size();
  return SignedGraph(n, std::move(edges), g.directed(), std::move(labels));
}

/// Weakly connected components, signs ignored. Returns the component id of each node.
inline std::vector<std::size_t> connected_components(const SignedGraph& g, std::size_t* count = nullptr) {
  detail::DisjointSets sets(g.n_nodes());
  for (const auto& e : g.edges()) sets.unite(e.i, e.j);
  std::vector<std::size_t> comp(g.n_nodes());
  std::unordered_map<std::size_t, std::size_t> ids;
  for (std::size_t v = 0; v < g.n_nodes(); ++v) {
    comp[v] = ids.try_emplace(sets.find(v), ids.size()).first->second;
  }
  if (count) *count = ids.size();
  return comp;
}

inline bool is_connected(const SignedGraph& g) {
  std::size_t count = 0;
  connected_components(g, &count);
  return count <= 1;
}

/// Largest weakly connected component. Ties go to the component holding the
/// smallest node index.
inline SignedGraph largest_connected_component(const SignedGraph& g) {
  if (g.n_nodes() == 0) throw DataError("largest_connected_component: empty graph");
  std::size_t count = 0;
  const auto comp = connected_components(g, &count);
  std::vector<std::size_t> sizes(count, 0);
  for (auto c : comp) ++sizes[c];
  // Component ids are assigned in order of first node, so the first maximum wins ties.
  const auto best = static_cast<std::size_t>(std::max_element(sizes.begin(), sizes.end()) - sizes.begin());
  std::vector<NodeId> keep;
  keep.reserve(sizes[best]);
  for (std::size_t v = 0; v < g.n_nodes(); ++v) {
    if (comp[v] == best) keep.push_back(static_cast<NodeId>(v));
  }
  if (keep.size() == g.n_nodes()) return g;
  return induced_subgraph(g, std::move(keep));
}

/// Normalization denominators for density.
enum class DensityConvention {
  per_mode,       // N(N-1)/2 dyads for undirected graphs, N(N-1) for directed
  ordered_pairs,  // always N(N-1)
};

struct NetworkStats {
  std::size_t n_nodes = 0;
  std::size_t n_pos = 0;
  std::size_t n_neg = 0;
  double density = 0.0;
  double pct_pos = 0.0;
  double pct_neg = 0.0;
};

inline NetworkStats degree_stats(const SignedGraph& g,
                                 DensityConvention convention = DensityConvention::per_mode) {
  NetworkStats s;
  s.n_nodes = g.n_nodes();
  for (const auto& e : g.edges()) (e.weight > 0 ? s.n_pos : s.n_neg) += 1;
  const double n = static_cast<double>(g.n_nodes());
  double dyads = n * (n - 1.0);
  if (!g.directed() && convention == DensityConvention::per_mode) dyads /= 2.0;
  const double m = static_cast<double>(g.n_edges());
  s.density = dyads > 0 ? m / dyads : 0.0;
  if (m > 0) {
    s.pct_pos = 100.0 * static_cast<double>(s.n_pos) / m;
    s.pct_neg = 100.0 * static_cast<double>(s.n_neg) / m;
  }
  return s;
}

struct TestEdge {
  NodeId i = 0;
  NodeId j = 0;
  Weight weight = 0;
  int sign() const noexcept { return weight > 0 ? 1 : -1; }
};

struct Dyad {
  NodeId i = 0;
  NodeId j = 0;
  friend bool operator==(const Dyad&, const Dyad&) = default;
};

struct HoldoutSplit {
  SignedGraph train;
  std::vector<TestEdge> test_edges;
  std::vector<Dyad> test_zeros;
  std::uint64_t seed = 0;
};

/// Hides round(fraction * |E|) edges while keeping the residual graph
/// connected, and pairs them with as many uniformly drawn non-edges.
///
/// A uniformly random spanning tree (Kruskal over a shuffled edge order) is
/// protected; the held-out edges are a uniform subset of the remaining edges,
/// so the residual always contains the tree.
inline HoldoutSplit split_train_test(const SignedGraph& g, double holdout_fraction, std::uint64_t seed) {
  if (!(holdout_fraction > 0.0 && holdout_fraction < 1.0)) {
    throw UsageError("holdout fraction must lie in (0, 1)");
  }
  if (!is_connected(g)) throw DataError("split_train_test: graph is not connected");
  const auto m = static_cast<std::size_t>(std::llround(holdout_fraction * static_cast<double>(g.n_edges())));
  if (m == 0) throw DataError("split_train_test: holdout fraction selects no edges");

  SplitMix64 rng(mix_key(seed, 0x5eed));
  const auto edges = g.edges();
  std::vector<std::size_t> order(edges.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  auto shuffle = [&](std::vector<std::size_t>& v) {
    for (std::size_t k = v.size(); k > 1; --k) std::swap(v[k - 1], v[uniform_index(rng, k)]);
  };
  shuffle(order);
  std::vector<bool> in_tree(edges.size(), false);
  detail::DisjointSets sets(g.n_nodes());
  for (auto k : order) in_tree[k] = sets.unite(edges[k].i, edges[k].j);

  std::vector<std::size_t> candidates;
  for (std::size_t k = 0; k < edges.size(); ++k) {
    if (!in_tree[k]) candidates.push_back(k);
  }
  if (candidates.size() < m) {
    throw DataError("split_train_test: only " + std::to_string(candidates.size()) + " of " +
                    std::to_string(m) + " edges can be removed without disconnecting the graph");
  }
  shuffle(candidates);
  std::vector<bool> removed(edges.size(), false);
  HoldoutSplit split;
  split.seed = seed;
  for (std::size_t k = 0; k < m; ++k) {
    removed[candidates[k]] = true;
    const auto& e = edges[candidates[k]];
    split.test_edges.push_back({e.i, e.j, e.weight});
  }
  std::vector<Edge> kept;
  kept.reserve(edges.size() - m);
  for (std::size_t k = 0; k < edges.size(); ++k) {
    if (!removed[k]) kept.push_back(edges[k]);
  }
  split.train = SignedGraph(g.n_nodes(), std::move(kept), g.directed(),
                            std::vector<std::string>(g.labels().begin(), g.labels().end()));

  const double n = static_cast<double>(g.n_nodes());
  const double dyads = g.directed() ? n * (n - 1.0) : n * (n - 1.0) / 2.0;
  if (dyads - static_cast<double>(g.n_edges()) < static_cast<double>(m)) {
    throw DataError("split_train_test: not enough non-edges for zero instances");
  }
  std::unordered_set<std::uint64_t> taken;
  while (split.test_zeros.size() < m) {
    auto i = static_cast<NodeId>(uniform_index(rng, g.n_nodes()));
    auto j = static_cast<NodeId>(uniform_index(rng, g.n_nodes()));
    if (i == j) continue;
    if (!g.directed() && i > j) std::swap(i, j);
    if (g.weight(i, j) != 0) continue;
    if (!taken.insert((static_cast<std::uint64_t>(i) << 32) | j).second) continue;
    split.test_zeros.push_back({i, j});
  }
  return split;
}

}  // namespace slim

#endif  // SLIM_GRAPH_HPP
