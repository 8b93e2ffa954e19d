#include "gwcp/cp.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <unordered_map>
#include <unordered_set>

#include "gwcp/error.hpp"

namespace gwcp {

namespace {

struct Event {
  double t;
  std::uint64_t seq;  // deterministic tiebreak; times are a.s. distinct anyway
  VertexId v;
  std::uint32_t epoch;
  bool death;
};

struct EventLater {
  bool operator()(const Event& a, const Event& b) const {
    if (a.t != b.t) return a.t > b.t;
    return a.seq > b.seq;
  }
};

struct Level {
  double lambda;
  std::unordered_set<VertexId> infected;
  CpSummary summary;
  bool finished = false;  // died out or frozen; bookkeeping stops here

  void finish(double t, bool as_capped) {
    if (finished) return;
    finished = true;
    summary.capped = as_capped;
    summary.died_out = infected.empty();
    summary.t_end = t;
    if (infected.count(0)) summary.last_root_time = t;
    summary.frontier_exit = summary.frontier_exits > 0;
  }
};

// Membership across live levels must always form a suffix of the lambda
// ladder; one broken vertex means the monotone coupling is broken.
void assert_suffix(const std::vector<Level>& levels, int active_top, VertexId v) {
  bool seen = false;
  for (int i = 0; i <= active_top; ++i) {
    const bool in = levels[i].infected.count(v) > 0;
    if (seen && !in)
      raise(Errc::CouplingViolation,
            "vertex " + std::to_string(v) + " infected at a smaller rate only");
    seen = seen || in;
  }
}

void assert_nested_sizes(const std::vector<Level>& levels, int active_top) {
  for (int i = 0; i + 1 <= active_top; ++i)
    if (levels[i].infected.size() > levels[i + 1].infected.size())
      raise(Errc::CouplingViolation, "infected-set sizes not monotone in lambda");
}

class Engine {
 public:
  Engine(TreeStore& store, std::vector<double> lambdas, double t_max, Rng& rng,
         const CpCaps& caps, CpTrajectory* trajectory)
      : store_(store), t_max_(t_max), rng_(rng), caps_(caps), trajectory_(trajectory) {
    if (lambdas.empty()) raise(Errc::BadInput, "need at least one lambda");
    for (std::size_t i = 0; i < lambdas.size(); ++i) {
      if (!(lambdas[i] > 0.0)) raise(Errc::BadInput, "lambda must be > 0");
      if (i > 0 && lambdas[i] < lambdas[i - 1])
        raise(Errc::BadInput, "lambdas must be ascending");
    }
    if (!(t_max > 0.0)) raise(Errc::BadInput, "t_max must be > 0");
    if (caps.max_infected < 1) raise(Errc::BadInput, "max_infected must be >= 1");
    lambda_max_ = lambdas.back();
    levels_.resize(lambdas.size());
    for (std::size_t i = 0; i < lambdas.size(); ++i) {
      levels_[i].lambda = lambdas[i];
      levels_[i].summary.lambda = lambdas[i];
    }
    active_top_ = static_cast<int>(levels_.size()) - 1;
  }

  std::vector<CpSummary> run() {
    infect_all_levels_at_start();
    while (!queue_.empty()) {
      Event e = queue_.top();
      if (e.t > t_max_) break;
      queue_.pop();
      auto it = epoch_.find(e.v);
      if (it == epoch_.end() || it->second != e.epoch) continue;  // stale clock
      if (e.death)
        handle_death(e);
      else
        handle_birth(e);
      assert_nested_sizes(levels_, active_top_);
      if (active_top_ < 0 || all_dead()) break;
    }
    const double t_stop = t_max_;
    for (int i = 0; i <= active_top_; ++i)
      levels_[i].finish(levels_[i].infected.empty() ? levels_[i].summary.t_end : t_stop,
                        /*as_capped=*/false);
    verify_full_nesting();
    std::vector<CpSummary> out;
    out.reserve(levels_.size());
    for (auto& lvl : levels_) out.push_back(lvl.summary);
    return out;
  }

 private:
  bool all_dead() const {
    for (int i = 0; i <= active_top_; ++i)
      if (!levels_[i].infected.empty()) return false;
    return true;
  }

  void infect_all_levels_at_start() {
    store_.degree(0);  // force the root so marks know its degree
    for (auto& lvl : levels_) {
      lvl.infected.insert(0);
      lvl.summary.max_infected = 1;
    }
    schedule_clocks(0, 0.0);
    if (trajectory_) trajectory_->push_back({0.0, 0, true});
  }

  void schedule_clocks(VertexId v, double now) {
    const std::uint32_t ep = ++epoch_[v];
    queue_.push(Event{now + rng_.exponential(1.0), seq_++, v, ep, true});
    queue_.push(Event{now + rng_.exponential(lambda_max_), seq_++, v, ep, false});
  }

  void handle_death(const Event& e) {
    for (int i = 0; i <= active_top_; ++i) {
      Level& lvl = levels_[i];
      if (lvl.finished) continue;
      if (lvl.infected.erase(e.v) == 0) continue;
      ++lvl.summary.deaths;
      if (e.v == 0) lvl.summary.last_root_time = e.t;
      if (i == 0 && trajectory_) trajectory_->push_back({e.t, e.v, false});
      if (lvl.infected.empty()) {
        lvl.summary.t_end = e.t;
        lvl.finish(e.t, false);
      }
    }
    ++epoch_[e.v];  // kills the pending birth clock
  }

  void handle_birth(const Event& e) {
    Level& top = levels_[active_top_];
    if (!top.infected.count(e.v)) return;  // only lives in frozen levels now

    // One shared mark: thinning label, then the uniform neighbor choice.
    const double label = rng_.uniform();
    const std::uint32_t deg = store_.degree(e.v);
    const VertexId target = store_.neighbor(e.v, static_cast<std::uint32_t>(rng_.below(deg)));
    const double threshold = label * lambda_max_;
    const bool beyond_cap = store_.depth(target) > caps_.depth_cap;
    const bool target_in_top = top.infected.count(target) > 0;

    for (int i = 0; i <= active_top_; ++i) {
      Level& lvl = levels_[i];
      if (lvl.finished) continue;
      if (lvl.lambda < threshold) continue;          // mark inactive at this rate
      if (!lvl.infected.count(e.v)) continue;        // source healthy at this rate
      if (beyond_cap) {
        ++lvl.summary.frontier_exits;
        continue;
      }
      if (!lvl.infected.insert(target).second) {
        ++lvl.summary.suppressed_births;             // exclusion: occupied, no change
        continue;
      }
      ++lvl.summary.births;
      lvl.summary.max_infected = std::max<std::uint64_t>(lvl.summary.max_infected,
                                                         lvl.infected.size());
      if (target == 0) ++lvl.summary.root_reinfections;
      if (i == 0 && trajectory_) trajectory_->push_back({e.t, target, true});
    }
    assert_suffix(levels_, active_top_, target);

    if (!target_in_top && top.infected.count(target)) schedule_clocks(target, e.t);
    // Next birth mark for the source under the same life.
    queue_.push(Event{e.t + rng_.exponential(lambda_max_), seq_++, e.v, e.epoch, false});

    while (active_top_ >= 0 &&
           levels_[active_top_].infected.size() > caps_.max_infected) {
      levels_[active_top_].finish(e.t, /*as_capped=*/true);
      --active_top_;
    }
  }

  void verify_full_nesting() const {
    // Frozen levels stopped evolving at different times, so only compare the
    // levels that ran to the common stop.
    for (int i = 0; i + 1 <= active_top_; ++i)
      for (VertexId v : levels_[i].infected)
        if (!levels_[i + 1].infected.count(v))
          raise(Errc::CouplingViolation, "final infected sets not nested");
  }

  TreeStore& store_;
  double t_max_;
  Rng& rng_;
  CpCaps caps_;
  CpTrajectory* trajectory_;
  double lambda_max_ = 0.0;
  std::vector<Level> levels_;
  int active_top_ = -1;
  std::uint64_t seq_ = 0;
  std::unordered_map<VertexId, std::uint32_t> epoch_;
  std::priority_queue<Event, std::vector<Event>, EventLater> queue_;
};

}  // namespace

CpSummary run_cp(TreeStore& store, double lambda, double t_max, Rng& rng, const CpCaps& caps,
                 CpTrajectory* trajectory) {
  Engine engine(store, {lambda}, t_max, rng, caps, trajectory);
  return engine.run().front();
}

std::vector<CpSummary> run_cp_coupled(TreeStore& store, const std::vector<double>& lambdas,
                                      double t_max, Rng& rng, const CpCaps& caps) {
  Engine engine(store, lambdas, t_max, rng, caps, nullptr);
  return engine.run();
}

LocalSurvivalStat local_survival_stat(std::span<const CpSummary> summaries) {
  LocalSurvivalStat out;
  out.last_root_times.reserve(summaries.size());
  out.reinfection_counts.reserve(summaries.size());
  double sum_t = 0.0, sum_n = 0.0;
  for (const CpSummary& s : summaries) {
    out.last_root_times.push_back(s.last_root_time);
    out.reinfection_counts.push_back(s.root_reinfections);
    sum_t += s.last_root_time;
    sum_n += static_cast<double>(s.root_reinfections);
    out.max_reinfections = std::max(out.max_reinfections, s.root_reinfections);
  }
  if (!summaries.empty()) {
    out.mean_last_root_time = sum_t / static_cast<double>(summaries.size());
    out.mean_reinfections = sum_n / static_cast<double>(summaries.size());
  }
  return out;
}

std::vector<WeightSample> weight_process(TreeStore& store, const CpTrajectory& trajectory,
                                         const Certificate& cert) {
  if (!(cert.r > 0.0 && cert.r < 1.0) || !(cert.b > 0.0 && cert.b < 1.0))
    raise(Errc::BadCertificate, "weight process needs 0 < r < 1 and 0 < b < 1");
  std::unordered_set<VertexId> infected;
  const VertexId root_parent =
      store.mode() == TreeMode::AGW ? store.agw_root_attachment() : kNoVertex;
  auto parent_of = [&](VertexId v) { return v == 0 ? root_parent : store.parent(v); };
  auto weight = [&](VertexId v) {
    const VertexId p = parent_of(v);
    const double theta1 = (p != kNoVertex && infected.count(p)) ? 1.0 : 0.0;
    return std::pow(cert.r, static_cast<double>(store.depth(v))) * (1.0 - cert.b * theta1);
  };
  std::vector<WeightSample> samples;
  samples.reserve(trajectory.size());
  for (const CpEvent& e : trajectory) {
    if (e.infection)
      infected.insert(e.v);
    else
      infected.erase(e.v);
    double w = 0.0;
    for (VertexId v : infected) w += weight(v);
    samples.push_back({e.t, w});
  }
  return samples;
}

}  // namespace gwcp
