#pragma once

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <vector>

#include "gwcp/dist.hpp"
#include "gwcp/rng.hpp"

namespace gwcp {

using VertexId = std::uint32_t;
inline constexpr VertexId kNoVertex = std::numeric_limits<VertexId>::max();

enum class TreeMode { GW, AGW };

/// Contiguous block of child ids, iterable in range-for.
struct ChildRange {
  VertexId first = 0;
  std::uint32_t count = 0;

  struct iterator {
    VertexId v;
    VertexId operator*() const { return v; }
    iterator& operator++() { ++v; return *this; }
    bool operator!=(const iterator& o) const { return v != o.v; }
  };
  iterator begin() const { return {first}; }
  iterator end() const { return {first + count}; }
  std::uint32_t size() const { return count; }
};

/// Lazily grown rooted Galton-Watson tree. Vertex 0 is the root; ids are dense
/// and stable once created. Each vertex carries a 64-bit key hashed along the
/// path from the root, and its child count is the inverse-CDF of the key's
/// mix — so the realized tree is a pure function of (seed, law, mode) no
/// matter in which order it is explored, and re-exploration is idempotent.
///
/// In AGW mode the root receives X+1 child subtrees where X ~ F_T; the last
/// one is the augmentation copy that makes the root's degree law match the
/// other vertices. Exploration mutates the store: confine one store to one
/// trial at a time.
class TreeStore {
 public:
  TreeStore(OffspringDistribution law, TreeMode mode, std::uint64_t seed);

  /// Discards every vertex and starts over with a new seed, keeping the
  /// allocation. Equivalent to constructing a fresh store; trial harnesses
  /// reuse one store per worker this way.
  void reset(std::uint64_t seed);

  VertexId root() const noexcept { return 0; }
  TreeMode mode() const noexcept { return mode_; }
  const OffspringDistribution& law() const noexcept { return law_; }
  std::uint64_t seed() const noexcept { return seed_; }

  /// Materializes v's children on first call; later calls return the same ids.
  ChildRange children(VertexId v);
  std::uint32_t child_count(VertexId v) { return children(v).count; }

  VertexId parent(VertexId v) const;
  std::uint32_t depth(VertexId v) const;
  bool explored(VertexId v) const;

  /// child_count + 1 for non-root vertices (the parent edge); in AGW mode the
  /// root's augmentation child already accounts for the missing parent.
  std::uint32_t degree(VertexId v);

  /// Neighbor i of v: 0..child_count-1 are children, child_count is the parent.
  VertexId neighbor(VertexId v, std::uint32_t i);
  VertexId uniform_neighbor(VertexId v, Rng& rng);

  /// Top vertex of the augmentation subtree (AGW only; forces the root).
  /// It plays the role of the root's parent where one is needed.
  VertexId agw_root_attachment();

  /// Number of materialized vertices (lazy contract: starts at 1).
  std::size_t size() const noexcept { return nodes_.size(); }

  /// Debug dump of explored vertices: vertex_id,parent_id,depth,child_count.
  void dump_csv(std::ostream& out) const;

  /// Hot-path view for simulation loops: one bounds check, one node read,
  /// exploration forced if needed. neighbor i of v is first_child+i for
  /// i < child_count, else the parent.
  struct NodeView {
    VertexId parent;
    VertexId first_child;
    std::uint32_t child_count;
    std::uint32_t depth;
  };
  NodeView node_view(VertexId v) {
    if (v >= nodes_.size()) raise_unknown(v);
    if (nodes_[v].child_count == kUnexplored) explore(v);
    const Node& n = nodes_[v];
    return NodeView{n.parent, n.first_child, n.child_count, n.depth};
  }

 private:
  static constexpr std::uint32_t kUnexplored = 0xFFFFFFFFu;

  struct Node {
    std::uint64_t key;
    VertexId parent;
    VertexId first_child;
    std::uint32_t child_count;  // kUnexplored until children materialize
    std::uint32_t depth;
  };

  const Node& at(VertexId v) const;
  void explore(VertexId v);
  [[noreturn]] static void raise_unknown(VertexId v);

  OffspringDistribution law_;
  TreeMode mode_;
  std::uint64_t seed_;
  std::vector<Node> nodes_;
};

}  // namespace gwcp
