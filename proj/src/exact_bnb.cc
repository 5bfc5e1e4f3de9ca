#include <algorithm>
#include <chrono>
#include <numeric>

#include "trolleypack/exact.h"
#include "trolleypack/heuristic.h"

namespace trolleypack {
namespace {

using Clock = std::chrono::steady_clock;

class BranchAndBound {
 public:
  BranchAndBound(const Instance& instance, const BnbOptions& options)
      : instance_(instance),
        options_(options),
        deadline_(Clock::now() + std::chrono::duration_cast<Clock::duration>(
                                     std::chrono::duration<double>(
                                         options.timeout_s))) {}

  // Returns false if some part has an empty domain.
  bool Prepare() {
    const std::size_t n = instance_.num_parts();
    domains_.resize(n);
    for (std::size_t p = 0; p < n; ++p) {
      const Part& part = instance_.parts()[p];
      for (std::size_t m = 0; m < instance_.num_modules(); ++m) {
        const ModuleSpec& module = instance_.modules()[m];
        if (module.capacity > 0 && Fits(part, module)) domains_[p].push_back(m);
      }
      if (domains_[p].empty()) return false;
      // Smallest domain value first: ascending waste, ties by module id.
      std::sort(domains_[p].begin(), domains_[p].end(),
                [&](std::size_t a, std::size_t b) {
                  const ModuleSpec& ma = instance_.modules()[a];
                  const ModuleSpec& mb = instance_.modules()[b];
                  SquareMicrometers wa = Waste(part, ma);
                  SquareMicrometers wb = Waste(part, mb);
                  return wa != wb ? wa < wb : ma.id < mb.id;
                });
    }
    // Smallest domain first, then larger parts, then id.
    order_.resize(n);
    std::iota(order_.begin(), order_.end(), 0);
    std::sort(order_.begin(), order_.end(), [&](std::size_t a, std::size_t b) {
      if (domains_[a].size() != domains_[b].size()) {
        return domains_[a].size() < domains_[b].size();
      }
      const Part& pa = instance_.parts()[a];
      const Part& pb = instance_.parts()[b];
      if (pa.area() != pb.area()) return pa.area() > pb.area();
      return pa.id < pb.id;
    });
    // tail_bound_[d] = sum of capacity-free minimum waste over order_[d..].
    tail_bound_.assign(n + 1, 0);
    for (std::size_t d = n; d-- > 0;) {
      std::size_t p = order_[d];
      tail_bound_[d] = tail_bound_[d + 1] +
                       Waste(instance_.parts()[p],
                             instance_.modules()[domains_[p].front()]);
    }
    remaining_.clear();
    for (const ModuleSpec& m : instance_.modules()) {
      remaining_.push_back(m.capacity);
    }
    current_.assign(n, std::nullopt);
    return true;
  }

  void SetIncumbent(const Solution& solution) {
    best_.assign(instance_.num_parts(), std::nullopt);
    for (std::size_t p = 0; p < instance_.num_parts(); ++p) {
      best_[p] = instance_.ModuleIndex(*solution.assignments[p].module_id);
    }
    best_cost_ = *solution.total_waste;
  }

  // Returns false on timeout.
  bool Run() { return Search(0, 0); }

  std::int64_t nodes() const { return nodes_; }
  const std::optional<SquareMicrometers>& best_cost() const {
    return best_cost_;
  }
  const std::vector<std::optional<std::size_t>>& best() const { return best_; }

 private:
  bool Search(std::size_t depth, SquareMicrometers cost) {
    const SquareMicrometers bound = cost + tail_bound_[depth];
    if (best_cost_ && bound >= *best_cost_) return true;
    ++nodes_;
    if ((nodes_ & 0xFFF) == 0 && Clock::now() > deadline_) return false;
    if (options_.on_expand) {
      options_.on_expand(SearchNode{depth, current_, remaining_, cost, bound});
    }
    if (depth == order_.size()) {
      best_cost_ = cost;
      best_ = current_;
      return true;
    }
    const std::size_t p = order_[depth];
    const Part& part = instance_.parts()[p];
    for (std::size_t m : domains_[p]) {
      if (remaining_[m] == 0) continue;
      --remaining_[m];
      current_[p] = m;
      bool ok = Search(depth + 1, cost + Waste(part, instance_.modules()[m]));
      current_[p].reset();
      ++remaining_[m];
      if (!ok) return false;
    }
    return true;
  }

  const Instance& instance_;
  const BnbOptions& options_;
  Clock::time_point deadline_;
  std::vector<std::vector<std::size_t>> domains_;
  std::vector<std::size_t> order_;
  std::vector<SquareMicrometers> tail_bound_;
  std::vector<int> remaining_;
  std::vector<std::optional<std::size_t>> current_;
  std::vector<std::optional<std::size_t>> best_;
  std::optional<SquareMicrometers> best_cost_;
  std::int64_t nodes_ = 0;
};

}  // namespace

ExactResult SolveBnb(const Instance& instance, const BnbOptions& options) {
  auto start = Clock::now();
  ExactResult result;
  BranchAndBound search(instance, options);
  if (!search.Prepare()) {
    result.status = SolveStatus::kInfeasible;
    result.runtime_s =
        std::chrono::duration<double>(Clock::now() - start).count();
    return result;
  }
  if (options.seed_with_best_fit) {
    Solution seed = BestFitPack(instance);
    if (seed.feasible) search.SetIncumbent(seed);
  }
  bool finished = search.Run();
  result.nodes_expanded = search.nodes();
  result.runtime_s = std::chrono::duration<double>(Clock::now() - start).count();
  if (search.best_cost()) {
    result.solution =
        MakeSolution(instance, search.best(), "exact-bnb", result.runtime_s);
  }
  if (!finished) {
    result.status = SolveStatus::kTimeout;
  } else {
    result.status = search.best_cost() ? SolveStatus::kOptimal
                                       : SolveStatus::kInfeasible;
  }
  return result;
}

}  // namespace trolleypack
