#include "gwcp/tree.hpp"

#include <ostream>

#include "gwcp/error.hpp"

namespace gwcp {

namespace {
constexpr std::uint64_t kRootTag = 0x47574350'54524545ull;   // namespaces the tree stream
constexpr std::uint64_t kCountTag = 0x9AF34C1D6E8B5A23ull;
constexpr std::uint64_t kChildStep = 0xC2B2AE3D27D4EB4Full;  // odd, so i*step is injective
}  // namespace

TreeStore::TreeStore(OffspringDistribution law, TreeMode mode, std::uint64_t seed)
    : law_(std::move(law)), mode_(mode), seed_(seed) {
  if (law_.allows_zero() || law_.h_min() < 1)
    raise(Errc::ZeroMass, "tree law must have no mass on 0 offspring");
  nodes_.push_back(Node{mix64(seed ^ kRootTag), kNoVertex, 0, kUnexplored, 0});
}

void TreeStore::reset(std::uint64_t seed) {
  seed_ = seed;
  nodes_.clear();
  nodes_.push_back(Node{mix64(seed ^ kRootTag), kNoVertex, 0, kUnexplored, 0});
}

void TreeStore::raise_unknown(VertexId v) {
  raise(Errc::UnknownVertex, "vertex " + std::to_string(v));
}

const TreeStore::Node& TreeStore::at(VertexId v) const {
  if (v >= nodes_.size()) raise_unknown(v);
  return nodes_[v];
}

void TreeStore::explore(VertexId v) {
  at(v);
  Node& node = nodes_[v];
  if (node.child_count != kUnexplored) return;
  std::uint32_t count = static_cast<std::uint32_t>(
      law_.sample_from_unit(unit_from_bits(mix64(node.key ^ kCountTag))));
  if (v == 0 && mode_ == TreeMode::AGW) count += 1;  // augmentation subtree, last slot
  node.first_child = static_cast<VertexId>(nodes_.size());
  node.child_count = count;
  const std::uint64_t key = node.key;
  const std::uint32_t child_depth = node.depth + 1;
  for (std::uint32_t i = 0; i < count; ++i)
    nodes_.push_back(Node{mix64(key ^ (kChildStep * (i + 1))), v, 0, kUnexplored, child_depth});
}

ChildRange TreeStore::children(VertexId v) {
  explore(v);
  const Node& node = nodes_[v];
  return ChildRange{node.first_child, node.child_count};
}

VertexId TreeStore::parent(VertexId v) const { return at(v).parent; }

std::uint32_t TreeStore::depth(VertexId v) const { return at(v).depth; }

bool TreeStore::explored(VertexId v) const { return at(v).child_count != kUnexplored; }

std::uint32_t TreeStore::degree(VertexId v) {
  explore(v);
  const Node& node = nodes_[v];
  return node.child_count + (v == 0 ? 0 : 1);
}

VertexId TreeStore::neighbor(VertexId v, std::uint32_t i) {
  explore(v);
  const Node& node = nodes_[v];
  if (i < node.child_count) return node.first_child + i;
  if (i == node.child_count && v != 0) return node.parent;
  raise(Errc::BadInput, "neighbor index out of range");
}

VertexId TreeStore::uniform_neighbor(VertexId v, Rng& rng) {
  return neighbor(v, static_cast<std::uint32_t>(rng.below(degree(v))));
}

VertexId TreeStore::agw_root_attachment() {
  if (mode_ != TreeMode::AGW) return kNoVertex;
  ChildRange c = children(0);
  return c.first + c.count - 1;
}

void TreeStore::dump_csv(std::ostream& out) const {
  out << "vertex_id,parent_id,depth,child_count\n";
  for (VertexId v = 0; v < nodes_.size(); ++v) {
    const Node& n = nodes_[v];
    if (n.child_count == kUnexplored) continue;
    out << v << ',' << (v == 0 ? -1 : static_cast<long long>(n.parent)) << ',' << n.depth << ','
        << n.child_count << '\n';
  }
}

}  // namespace gwcp
