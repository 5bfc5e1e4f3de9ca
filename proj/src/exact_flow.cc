#include <chrono>
#include <functional>
#include <limits>
#include <queue>
#include <string>

#include "trolleypack/exact.h"
#include "trolleypack/heuristic.h"

namespace trolleypack {
namespace {

// Residual network for successive shortest paths. Arcs are stored in pairs;
// arc e ^ 1 is the reverse of arc e.
class FlowNetwork {
 public:
  explicit FlowNetwork(std::size_t nodes) : adjacency_(nodes) {}

  std::size_t AddArc(std::size_t from, std::size_t to, int capacity,
                     SquareMicrometers cost) {
    std::size_t e = arcs_.size();
    arcs_.push_back({to, capacity, cost});
    arcs_.push_back({from, 0, -cost});
    adjacency_[from].push_back(e);
    adjacency_[to].push_back(e + 1);
    return e;
  }

  int flow_on(std::size_t e) const { return arcs_[e ^ 1].capacity; }

  // Sends up to `demand` units one path at a time. Node potentials keep all
  // reduced costs non-negative, so Dijkstra applies throughout.
  int MinCostFlow(std::size_t source, std::size_t sink, int demand) {
    constexpr SquareMicrometers kInf = std::numeric_limits<SquareMicrometers>::max();
    const std::size_t n = adjacency_.size();
    std::vector<SquareMicrometers> potential(n, 0);
    std::vector<SquareMicrometers> dist(n);
    std::vector<std::size_t> via(n);
    using Entry = std::pair<SquareMicrometers, std::size_t>;
    int sent = 0;
    while (sent < demand) {
      std::fill(dist.begin(), dist.end(), kInf);
      dist[source] = 0;
      std::priority_queue<Entry, std::vector<Entry>, std::greater<>> heap;
      heap.push({0, source});
      while (!heap.empty()) {
        auto [d, u] = heap.top();
        heap.pop();
        if (d > dist[u]) continue;
        for (std::size_t e : adjacency_[u]) {
          const Arc& arc = arcs_[e];
          if (arc.capacity == 0) continue;
          SquareMicrometers nd = d + arc.cost + potential[u] - potential[arc.to];
          if (nd < dist[arc.to]) {
            dist[arc.to] = nd;
            via[arc.to] = e;
            heap.push({nd, arc.to});
          }
        }
      }
      if (dist[sink] == kInf) break;
      for (std::size_t v = 0; v < n; ++v) {
        if (dist[v] != kInf) potential[v] += dist[v];
      }
      // Every source arc has capacity 1, so each path carries one unit.
      for (std::size_t v = sink; v != source; v = arcs_[via[v] ^ 1].to) {
        --arcs_[via[v]].capacity;
        ++arcs_[via[v] ^ 1].capacity;
      }
      ++sent;
    }
    return sent;
  }

 private:
  struct Arc {
    std::size_t to;
    int capacity;
    SquareMicrometers cost;
  };

  std::vector<Arc> arcs_;
  std::vector<std::vector<std::size_t>> adjacency_;
};

}  // namespace

ExactResult SolveFlow(const Instance& instance) {
  auto start = std::chrono::steady_clock::now();
  const std::size_t num_parts = instance.num_parts();
  const std::size_t num_modules = instance.num_modules();
  const std::size_t source = 0;
  const std::size_t sink = num_parts + num_modules + 1;
  auto part_node = [](std::size_t p) { return 1 + p; };
  auto module_node = [&](std::size_t m) { return 1 + num_parts + m; };

  FlowNetwork network(sink + 1);
  struct Choice {
    std::size_t arc;
    std::size_t module;
  };
  std::vector<std::vector<Choice>> choices(num_parts);
  for (std::size_t p = 0; p < num_parts; ++p) {
    network.AddArc(source, part_node(p), 1, 0);
    const Part& part = instance.parts()[p];
    for (std::size_t m = 0; m < num_modules; ++m) {
      const ModuleSpec& module = instance.modules()[m];
      if (!Fits(part, module)) continue;
      std::size_t e =
          network.AddArc(part_node(p), module_node(m), 1, Waste(part, module));
      choices[p].push_back({e, m});
    }
  }
  for (std::size_t m = 0; m < num_modules; ++m) {
    network.AddArc(module_node(m), sink, instance.modules()[m].capacity, 0);
  }

  int sent = network.MinCostFlow(source, sink, static_cast<int>(num_parts));

  ExactResult result;
  result.nodes_expanded = sent;
  result.runtime_s = std::chrono::duration<double>(
                         std::chrono::steady_clock::now() - start)
                         .count();
  if (sent < static_cast<int>(num_parts)) {
    result.status = SolveStatus::kInfeasible;
    return result;
  }
  std::vector<std::optional<std::size_t>> chosen(num_parts);
  for (std::size_t p = 0; p < num_parts; ++p) {
    for (const Choice& c : choices[p]) {
      if (network.flow_on(c.arc) > 0) chosen[p] = c.module;
    }
  }
  result.status = SolveStatus::kOptimal;
  result.solution = MakeSolution(instance, chosen, "exact-flow", result.runtime_s);
  return result;
}

UnpackableError::UnpackableError(int part_id)
    : std::runtime_error("part " + std::to_string(part_id) +
                         " fits no module with non-zero capacity"),
      part_id_(part_id) {}

int MinTrolleys(std::span<const Part> parts,
                std::span<const ModuleSpec> modules) {
  for (const Part& part : parts) {
    bool placeable = false;
    for (const ModuleSpec& m : modules) {
      placeable = placeable || (m.capacity > 0 && Fits(part, m));
    }
    if (!placeable) throw UnpackableError(part.id);
  }
  Instance base({parts.begin(), parts.end()}, {modules.begin(), modules.end()});
  // Terminates by k = |parts|: then every fitting module alone holds them all.
  for (int k = 1;; ++k) {
    if (BestFitPack(base.WithTrolleys(k)).feasible) return k;
  }
}

}  // namespace trolleypack
