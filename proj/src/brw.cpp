#include "gwcp/brw.hpp"

#include "gwcp/error.hpp"
#include "gwcp/walk.hpp"

namespace gwcp {

BrwState brw_initial() {
  BrwState s;
  s.occupancy[0] = 1;
  s.total = 1;
  return s;
}

namespace {

void check_parity(const TreeStore& store, VertexId v, std::uint64_t generation) {
  if ((store.depth(v) & 1u) != (generation & 1u))
    raise(Errc::InternalInvariant, "depth parity broken at generation " +
                                       std::to_string(generation));
}

}  // namespace

BrwState brw_step(const BrwState& state, TreeStore& store, const OffspringDistribution& rep,
                  Rng& rng, std::uint64_t pop_cap) {
  if (pop_cap < 1) raise(Errc::BadInput, "pop_cap must be >= 1");
  BrwState next;
  next.generation = state.generation + 1;
  for (const auto& [v, count] : state.occupancy) {
    for (std::uint64_t i = 0; i < count; ++i) {
      const int kids = rep.sample(rng);
      for (int c = 0; c < kids; ++c) {
        VertexId w = store.uniform_neighbor(v, rng);
        check_parity(store, w, next.generation);
        ++next.occupancy[w];
        ++next.total;
      }
    }
  }
  next.capped = next.total > pop_cap;
  return next;
}

BrwRunSummary run_brw(TreeStore& store, const OffspringDistribution& rep, std::uint64_t horizon,
                      std::uint64_t pop_cap, Rng& rng) {
  if (horizon < 1) raise(Errc::BadInput, "horizon must be >= 1");
  if (pop_cap < 1) raise(Errc::BadInput, "pop_cap must be >= 1");
  BrwRunSummary out;
  out.totals.reserve(horizon + 1);
  out.root_counts.reserve(horizon + 1);
  out.totals.push_back(1);
  out.root_counts.push_back(1);

  // Flat particle list instead of the occupancy map: creation order is a
  // deterministic function of the stream, and the per-generation loop stays
  // allocation-light at populations near the cap. One node read per particle;
  // newborn depths follow arithmetically, so the parity check costs nothing.
  std::vector<VertexId> particles{0};
  std::vector<VertexId> newborns;
  for (std::uint64_t n = 1; n <= horizon; ++n) {
    newborns.clear();
    std::uint64_t at_root = 0;
    for (VertexId v : particles) {
      const TreeStore::NodeView node = store.node_view(v);
      const std::uint32_t deg = node.child_count + (v == 0 ? 0 : 1);
      const int kids = rep.sample(rng);
      for (int c = 0; c < kids; ++c) {
        const auto idx = static_cast<std::uint32_t>(rng.below(deg));
        VertexId w;
        std::uint32_t w_depth;
        if (idx < node.child_count) {
          w = node.first_child + idx;
          w_depth = node.depth + 1;
        } else {
          w = node.parent;
          w_depth = node.depth - 1;
        }
        if (((w_depth ^ n) & 1u) != 0)
          raise(Errc::InternalInvariant,
                "depth parity broken at generation " + std::to_string(n));
        newborns.push_back(w);
        if (w == 0) ++at_root;
      }
    }
    particles.swap(newborns);
    out.totals.push_back(particles.size());
    out.root_counts.push_back(at_root);
    if (at_root > 0) {
      ++out.root_returns;
      out.last_root_generation = n;
    }
    if (particles.empty()) {
      out.extinct = true;
      out.generations_survived = n - 1;
      return out;
    }
    out.generations_survived = n;
    if (particles.size() > pop_cap) {
      out.capped = true;
      return out;
    }
  }
  return out;
}

const char* phase_name(Phase p) {
  switch (p) {
    case Phase::Subcritical: return "Subcritical";
    case Phase::WeakSurvival: return "WeakSurvival";
    case Phase::StrongSurvival: return "StrongSurvival";
  }
  return "Unknown";
}

Phase brw_phase(int f_t_h_min, double mu) {
  if (f_t_h_min < 1) raise(Errc::BadInput, "h_min must be >= 1");
  if (!(mu > 0.0)) raise(Errc::BadInput, "mu must be > 0");
  if (mu <= 1.0) return Phase::Subcritical;
  if (mu * spectral_radius_formula(f_t_h_min) > 1.0) return Phase::StrongSurvival;
  return Phase::WeakSurvival;
}

OffspringDistribution continuous_brw_reduction(double lambda) {
  return OffspringDistribution::geometric_from_rate(lambda);
}

}  // namespace gwcp
