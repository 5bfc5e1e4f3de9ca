// Exact solvers for the part-to-module assignment problem.
//
// Three independent routes to the same optimum:
//   * SolveBruteforce enumerates every feasible assignment (tiny instances).
//   * SolveBnb is a depth-first branch-and-bound with smallest-domain-first
//     variable order and smallest-waste-first value order.
//   * SolveFlow treats the problem as a transportation problem and runs
//     successive shortest paths on the flow network
//       source -> part (cap 1) -> module (cap 1, cost waste) -> sink (cap c_m).

#ifndef TROLLEYPACK_EXACT_H_
#define TROLLEYPACK_EXACT_H_

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "trolleypack/core.h"

namespace trolleypack {

enum class SolveStatus { kOptimal, kInfeasible, kTimeout };

const char* ToString(SolveStatus status);

struct ExactResult {
  SolveStatus status = SolveStatus::kInfeasible;
  // Optimal solution; on timeout the best incumbent, if any.
  std::optional<Solution> solution;
  std::int64_t nodes_expanded = 0;
  double runtime_s = 0.0;

  bool proven_optimal() const { return status == SolveStatus::kOptimal; }
};

inline constexpr std::size_t kBruteforceMaxParts = 10;
inline constexpr std::size_t kBruteforceMaxModules = 8;

class SizeGuardError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Exhaustive enumeration. Throws SizeGuardError above 10 parts or 8 modules.
ExactResult SolveBruteforce(const Instance& instance);

// State of the branch-and-bound search when a node is expanded. `partial` is
// indexed by instance part position; `depth` counts assigned parts in the
// solver's own variable order.
struct SearchNode {
  std::size_t depth = 0;
  std::span<const std::optional<std::size_t>> partial;
  std::span<const int> remaining;
  SquareMicrometers partial_cost = 0;
  SquareMicrometers lower_bound = 0;
};

struct BnbOptions {
  double timeout_s = 60.0;
  bool seed_with_best_fit = true;
  // Called for every expanded node. Intended for tests.
  std::function<void(const SearchNode&)> on_expand;
};

ExactResult SolveBnb(const Instance& instance, const BnbOptions& options = {});

ExactResult SolveFlow(const Instance& instance);

class UnpackableError : public std::runtime_error {
 public:
  explicit UnpackableError(int part_id);
  int part_id() const { return part_id_; }

 private:
  int part_id_;
};

// Smallest trolley count k >= 1 for which best-fit packs `parts` into
// `modules` with capacities scaled by k. Throws UnpackableError if some part
// fits no module with non-zero capacity.
int MinTrolleys(std::span<const Part> parts,
                std::span<const ModuleSpec> modules);

}  // namespace trolleypack

#endif  // TROLLEYPACK_EXACT_H_
