#include "ovm/graph.hpp"

#include <algorithm>
#include <functional>
#include <string>

#include "ovm/error.hpp"

namespace ovm {

namespace {

void check_size(std::size_t n) {
  if (n > kMaxVertices) {
    fail(ErrorKind::BadParams,
         "population " + std::to_string(n) + " exceeds " + std::to_string(kMaxVertices));
  }
}

std::string edge_text(EdgeKey e) {
  return "{" + std::to_string(e.a + 1) + "," + std::to_string(e.b + 1) + "}";
}

}  // namespace

EdgeKey EdgeKey::of(Vertex x, Vertex y) {
  if (x == y) fail(ErrorKind::BadEdge, "self loop at vertex " + std::to_string(x + 1));
  return x < y ? EdgeKey{x, y} : EdgeKey{y, x};
}

DynamicGraph::DynamicGraph(std::size_t n) : n_(n), adj_(n), slot_(n * n, -1) { check_size(n); }

DynamicGraph DynamicGraph::complete(std::size_t n) {
  DynamicGraph g(n);
  for (Vertex x = 0; x < n; ++x) {
    g.adj_[x].reserve(n - 1);
    for (Vertex y = 0; y < n; ++y) {
      if (x == y) continue;
      g.slot_[x * n + y] = static_cast<std::int32_t>(g.adj_[x].size());
      g.adj_[x].push_back(y);
    }
  }
  g.edges_ = pair_count(n);
  return g;
}

DynamicGraph DynamicGraph::from_edges(std::size_t n, std::span<const EdgeKey> edges) {
  DynamicGraph g(n);
  for (const EdgeKey& e : edges) {
    if (e.a >= n || e.b >= n || e.a == e.b) {
      fail(ErrorKind::BadEdge, "edge " + edge_text(e) + " invalid for population " + std::to_string(n));
    }
    const EdgeKey c = EdgeKey::of(e.a, e.b);
    if (g.has_edge(c)) fail(ErrorKind::BadEdge, "duplicate edge " + edge_text(c));
    g.add_edge(c);
  }
  return g;
}

void DynamicGraph::add_edge(EdgeKey e) {
  slot_[e.a * n_ + e.b] = static_cast<std::int32_t>(adj_[e.a].size());
  adj_[e.a].push_back(e.b);
  slot_[e.b * n_ + e.a] = static_cast<std::int32_t>(adj_[e.b].size());
  adj_[e.b].push_back(e.a);
  ++edges_;
}

void DynamicGraph::unlink(Vertex x, Vertex y) {
  auto& list = adj_[x];
  const auto pos = static_cast<std::size_t>(slot_[x * n_ + y]);
  const Vertex last = list.back();
  list[pos] = last;
  slot_[x * n_ + last] = static_cast<std::int32_t>(pos);
  list.pop_back();
  slot_[x * n_ + y] = -1;
}

void DynamicGraph::remove_edge(EdgeKey e) {
  if (e.a >= n_ || e.b >= n_ || e.a == e.b || !has_edge(e)) {
    fail(ErrorKind::NoSuchEdge, "edge " + edge_text(e) + " is not present");
  }
  unlink(e.a, e.b);
  unlink(e.b, e.a);
  --edges_;
}

std::size_t DynamicGraph::min_degree() const {
  if (n_ == 0) return 0;
  std::size_t best = adj_[0].size();
  for (const auto& list : adj_) best = std::min(best, list.size());
  return best;
}

std::vector<std::size_t> DynamicGraph::component_sizes() const {
  std::vector<std::size_t> sizes;
  std::vector<char> seen(n_, 0);
  std::vector<Vertex> queue;
  queue.reserve(n_);
  for (Vertex root = 0; root < n_; ++root) {
    if (seen[root]) continue;
    queue.clear();
    queue.push_back(root);
    seen[root] = 1;
    for (std::size_t head = 0; head < queue.size(); ++head) {
      for (Vertex y : adj_[queue[head]]) {
        if (!seen[y]) {
          seen[y] = 1;
          queue.push_back(y);
        }
      }
    }
    sizes.push_back(queue.size());
  }
  std::sort(sizes.begin(), sizes.end(), std::greater<>());
  return sizes;
}

bool DynamicGraph::is_connected() const {
  if (n_ <= 1) return true;
  return component_sizes().front() == n_;
}

std::vector<EdgeKey> DynamicGraph::edges() const {
  std::vector<EdgeKey> out;
  out.reserve(edges_);
  for (Vertex x = 0; x < n_; ++x) {
    for (Vertex y = x + 1; y < n_; ++y) {
      if (has_edge(x, y)) out.push_back({x, y});
    }
  }
  return out;
}

bool DynamicGraph::consistent() const {
  std::size_t degree_sum = 0;
  for (Vertex x = 0; x < n_; ++x) {
    degree_sum += adj_[x].size();
    std::size_t present = 0;
    for (Vertex y = 0; y < n_; ++y) {
      const std::int32_t s = slot_[x * n_ + y];
      if (s < 0) continue;
      ++present;
      if (x == y) return false;
      if (static_cast<std::size_t>(s) >= adj_[x].size() || adj_[x][s] != y) return false;
      if (slot_[y * n_ + x] < 0) return false;
    }
    if (present != adj_[x].size()) return false;
  }
  return degree_sum == 2 * edges_;
}

IndexedEdgeSet::IndexedEdgeSet(std::size_t n) : n_(n), position_(pair_count(n), -1) { check_size(n); }

void IndexedEdgeSet::clear() {
  for (const EdgeKey& e : items_) position_[pair_index(n_, e)] = -1;
  items_.clear();
}

EdgeKey IndexedEdgeSet::sample(Rng& rng) const {
  if (items_.empty()) fail(ErrorKind::EmptySet, "cannot sample from an empty edge set");
  return items_[rng.below(items_.size())];
}

bool IndexedEdgeSet::consistent() const {
  for (std::size_t i = 0; i < items_.size(); ++i) {
    const EdgeKey e = items_[i];
    if (e.a >= e.b || e.b >= n_) return false;
    if (position_[pair_index(n_, e)] != static_cast<std::int32_t>(i)) return false;
  }
  const auto occupied = std::count_if(position_.begin(), position_.end(), [](std::int32_t p) { return p >= 0; });
  return static_cast<std::size_t>(occupied) == items_.size();
}

}  // namespace ovm
