#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "ovm/rng.hpp"

namespace ovm {

/// Vertices are 0-based inside the library. Text formats (edge lists, traces)
/// use 1-based labels and convert at the boundary.
using Vertex = std::uint32_t;

/// Largest population the dense per-vertex index tables are sized for.
inline constexpr std::size_t kMaxVertices = 8192;

/// Unordered vertex pair stored canonically with a < b.
struct EdgeKey {
  Vertex a = 0;
  Vertex b = 0;

  /// Canonicalizes {x, y}. Throws BadEdge when x == y.
  static EdgeKey of(Vertex x, Vertex y);

  friend bool operator==(const EdgeKey&, const EdgeKey&) = default;
  friend auto operator<=>(const EdgeKey&, const EdgeKey&) = default;
};

/// Number of unordered pairs on n vertices.
constexpr std::uint64_t pair_count(std::uint64_t n) { return n < 2 ? 0 : n * (n - 1) / 2; }

/// Dense index of a canonical pair in [0, pair_count(n)).
constexpr std::size_t pair_index(std::size_t n, EdgeKey e) {
  return e.a * (2 * n - e.a - 1) / 2 + (e.b - e.a - 1);
}

/// Undirected simple graph on {0, ..., n-1} whose edges can only be removed
/// after construction.
///
/// Each vertex keeps a dense neighbour list; an n*n slot table records where
/// y sits in x's list, so membership, removal (swap with the last neighbour)
/// and neighbour iteration are all O(1) per element.
class DynamicGraph {
 public:
  explicit DynamicGraph(std::size_t n = 0);

  static DynamicGraph complete(std::size_t n);
  /// Throws BadEdge for self loops, out-of-range endpoints or duplicates.
  static DynamicGraph from_edges(std::size_t n, std::span<const EdgeKey> edges);

  std::size_t vertex_count() const { return n_; }
  std::size_t edge_count() const { return edges_; }

  bool has_edge(Vertex x, Vertex y) const { return slot_[x * n_ + y] >= 0; }
  bool has_edge(EdgeKey e) const { return has_edge(e.a, e.b); }

  std::span<const Vertex> neighbors(Vertex x) const { return adj_[x]; }
  std::size_t degree(Vertex x) const { return adj_[x].size(); }

  /// Throws NoSuchEdge if e is absent.
  void remove_edge(EdgeKey e);

  /// 0 for the empty vertex set and for edgeless graphs.
  std::size_t min_degree() const;
  /// Sizes of connected components in descending order (BFS).
  std::vector<std::size_t> component_sizes() const;
  bool is_connected() const;

  /// All present edges in canonical lexicographic order.
  std::vector<EdgeKey> edges() const;

  /// Symmetry, slot-table consistency and the edge-count identity.
  bool consistent() const;

 private:
  void add_edge(EdgeKey e);
  void unlink(Vertex x, Vertex y);

  std::size_t n_ = 0;
  std::size_t edges_ = 0;
  std::vector<std::vector<Vertex>> adj_;
  std::vector<std::int32_t> slot_;
};

/// Set of edges with O(1) insert, swap-remove, membership and uniform
/// sampling. items() is dense; position_ maps a pair index back into it.
class IndexedEdgeSet {
 public:
  explicit IndexedEdgeSet(std::size_t n = 0);

  std::size_t size() const { return items_.size(); }
  bool empty() const { return items_.empty(); }

  bool contains(EdgeKey e) const { return position_[pair_index(n_, e)] >= 0; }
  /// Returns false when e was already present.
  bool insert(EdgeKey e) {
    auto& pos = position_[pair_index(n_, e)];
    if (pos >= 0) return false;
    pos = static_cast<std::int32_t>(items_.size());
    items_.push_back(e);
    return true;
  }

  /// Swap-remove. Returns false when e was absent.
  bool erase(EdgeKey e) {
    auto& pos = position_[pair_index(n_, e)];
    if (pos < 0) return false;
    const EdgeKey last = items_.back();
    items_[pos] = last;
    position_[pair_index(n_, last)] = pos;
    items_.pop_back();
    pos = -1;
    return true;
  }

  void clear();

  /// items()[u] for u uniform on [0, size()). Throws EmptySet.
  EdgeKey sample(Rng& rng) const;

  std::span<const EdgeKey> items() const { return items_; }

  /// position(items[i]) == i for all i, and no stray positions.
  bool consistent() const;

 private:
  std::size_t n_ = 0;
  std::vector<EdgeKey> items_;
  std::vector<std::int32_t> position_;
};

}  // namespace ovm
