// Incremental-parts experiment harness.
//
// For n = 1..max_parts the part list grows by one, the trolley count is reset
// to the smallest k for which best-fit succeeds, and every selected algorithm
// solves the scaled instance from scratch. Infeasible outcomes are kept in
// memory but omitted from the written series.

#ifndef TROLLEYPACK_BENCH_H_
#define TROLLEYPACK_BENCH_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "trolleypack/core.h"
#include "trolleypack/qnetwork.h"

namespace trolleypack {

enum class Algorithm { kBestFit, kExactBnb, kExactFlow, kDqn };

// "bestfit", "exact-bnb", "exact-flow", "dqn".
std::string_view CliName(Algorithm algorithm);
// "Best_Fit", "Exact_BnB", "Exact_Flow", "DQN"; used in series file names.
std::string_view FileLabel(Algorithm algorithm);
std::optional<Algorithm> ParseAlgorithm(std::string_view name);

struct ExperimentConfig {
  std::vector<ModuleSpec> module_set;  // one trolley
  int max_parts = 200;
  std::vector<std::uint64_t> seeds{1, 2, 3};
  std::vector<Algorithm> algorithms{Algorithm::kBestFit, Algorithm::kExactFlow};
  // When set, parts are drawn without replacement from this pool in a
  // seed-dependent shuffled order instead of being generated.
  std::optional<std::vector<Part>> real_parts;
  std::optional<QNetwork> dqn;
  double bnb_timeout_s = 60.0;
  // Points faster than this are re-measured and the median of 3 is kept.
  double repeat_below_s = 0.010;

  // Throws std::invalid_argument.
  void Validate() const;
};

struct SeriesPoint {
  int parts = 0;
  int trolleys = 0;
  bool feasible = false;
  std::optional<SquareMicrometers> wasted_space;  // nullopt: excluded
  double runtime_s = 0.0;
};

struct ResultSeries {
  Algorithm algorithm = Algorithm::kBestFit;
  std::uint64_t seed = 0;
  std::vector<SeriesPoint> points;
};

// The part sequence for one seed: generated, or a shuffled prefix of the real
// pool. `truncated` is set when the pool is smaller than max_parts.
struct PartStream {
  std::vector<Part> parts;
  bool truncated = false;
};
PartStream MakePartStream(const ExperimentConfig& config, std::uint64_t seed);

// Trolley count for every prefix length 1..parts.size().
std::vector<int> TrolleySchedule(std::span<const Part> parts,
                                 std::span<const ModuleSpec> module_set);

ResultSeries RunIncremental(const ExperimentConfig& config,
                            Algorithm algorithm, std::uint64_t seed);

// All (algorithm, seed) pairs, seeds-major. The parallel variant distributes
// pairs over OpenMP threads (0 = runtime default); results are equal to the
// serial ones except for measured runtimes.
std::vector<ResultSeries> RunGridSerial(const ExperimentConfig& config);
std::vector<ResultSeries> RunGridParallel(const ExperimentConfig& config,
                                          int threads);

// Reads TROLLEYPACK_THREADS; 0 when unset or invalid.
int ThreadsFromEnvironment();

std::string WasteFileName(Algorithm algorithm, std::uint64_t seed);
std::string RuntimeFileName(Algorithm algorithm, std::uint64_t seed);

// Writes <Label>_wasted_space_sum<seed>.csv and <Label>_run_time<seed>.csv
// with header "parts,value", one row per feasible point.
void WriteSeries(const ResultSeries& series, const std::filesystem::path& dir);

struct SeriesRow {
  int parts;
  std::string value;
};
std::vector<SeriesRow> ReadSeriesFile(const std::filesystem::path& path);

SquareMicrometers ParseSquareMillimeters(std::string_view text);

// Per-algorithm feasibility rate, mean waste gap against an exact series of
// the same seed, and runtime percentiles.
nlohmann::json Summarize(std::span<const ResultSeries> series);

// Renders a summary produced by Summarize as a fixed-width text table.
std::string FormatSummaryTable(const nlohmann::json& summary);

}  // namespace trolleypack

#endif  // TROLLEYPACK_BENCH_H_
