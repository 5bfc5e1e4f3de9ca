#include "trolleypack/cli.h"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "trolleypack/bench.h"
#include "trolleypack/dqn.h"
#include "trolleypack/exact.h"
#include "trolleypack/generator.h"
#include "trolleypack/heuristic.h"
#include "trolleypack/io.h"
#include "trolleypack/probe.h"

namespace trolleypack {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

// Raised for bad flag values detected after CLI11 parsing.
class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

void EmitError(std::ostream& err, json doc) { err << doc.dump() << '\n'; }

std::ofstream OpenForWrite(const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

// Writes to `path` when given, otherwise to `fallback`.
template <typename Fn>
void WriteTo(const std::string& path, std::ostream& fallback, Fn&& write) {
  if (path.empty()) {
    write(fallback);
    return;
  }
  std::ofstream out = OpenForWrite(path);
  write(out);
}

std::vector<std::uint64_t> ParseSeedList(const std::string& text) {
  std::vector<std::uint64_t> seeds;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    try {
      std::size_t used = 0;
      seeds.push_back(std::stoull(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw UsageError("invalid seed '" + item + "'");
    }
  }
  if (seeds.empty()) throw UsageError("empty seed list");
  return seeds;
}

std::vector<Algorithm> ParseAlgorithmList(const std::string& text) {
  std::vector<Algorithm> algos;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    std::optional<Algorithm> a = ParseAlgorithm(item);
    if (!a) throw UsageError("unknown algorithm '" + item + "'");
    if (std::find(algos.begin(), algos.end(), *a) == algos.end()) {
      algos.push_back(*a);
    }
  }
  if (algos.empty()) throw UsageError("empty algorithm list");
  return algos;
}

int RunGen(std::uint64_t seed, int count, const std::string& modules_path,
           const std::string& out_path, std::ostream& out) {
  if (count < 0) throw UsageError("--count must be >= 0");
  std::vector<ModuleSpec> modules = ReadModulesFile(modules_path);
  std::mt19937_64 rng(seed);
  std::vector<Part> parts = GenerateParts(rng, modules, count);
  WriteTo(out_path, out, [&](std::ostream& o) { WriteParts(o, parts); });
  return kExitOk;
}

struct PackFlags {
  std::string algo;
  std::string parts;
  std::string modules;
  std::string trolleys = "1";
  std::string checkpoint;
  std::string out;
  double timeout_s = 60.0;
};

int RunPack(const PackFlags& flags, std::ostream& out, std::ostream& err) {
  std::optional<Algorithm> algo = ParseAlgorithm(flags.algo);
  if (!algo) throw UsageError("unknown --algo '" + flags.algo + "'");
  if (*algo == Algorithm::kDqn && flags.checkpoint.empty()) {
    throw UsageError("--algo dqn requires --checkpoint");
  }
  std::vector<Part> parts = ReadPartsFile(flags.parts);
  std::vector<ModuleSpec> modules = ReadModulesFile(flags.modules);

  int trolleys = 1;
  if (flags.trolleys == "auto") {
    try {
      trolleys = MinTrolleys(parts, modules);
    } catch (const UnpackableError& e) {
      EmitError(err, {{"error", "unpackable"},
                      {"part_id", e.part_id()},
                      {"message", e.what()}});
      return kExitInfeasible;
    }
  } else {
    try {
      std::size_t used = 0;
      trolleys = std::stoi(flags.trolleys, &used);
      if (used != flags.trolleys.size() || trolleys < 1) throw std::exception();
    } catch (const std::exception&) {
      throw UsageError("--trolleys must be a positive integer or 'auto'");
    }
  }
  const Instance instance =
      Instance(std::move(parts), std::move(modules)).WithTrolleys(trolleys);

  std::optional<Solution> solution;
  json extra = json::object();
  switch (*algo) {
    case Algorithm::kBestFit:
      solution = BestFitPack(instance);
      break;
    case Algorithm::kExactBnb: {
      BnbOptions options;
      options.timeout_s = flags.timeout_s;
      ExactResult r = SolveBnb(instance, options);
      solution = r.solution;
      extra["status"] = ToString(r.status);
      extra["nodes_expanded"] = r.nodes_expanded;
      extra["proven_optimal"] = r.proven_optimal();
      break;
    }
    case Algorithm::kExactFlow: {
      ExactResult r = SolveFlow(instance);
      solution = r.solution;
      extra["status"] = ToString(r.status);
      break;
    }
    case Algorithm::kDqn:
      solution = ActGreedy(LoadCheckpoint(flags.checkpoint), instance);
      break;
  }

  std::vector<int> unplaceable;
  for (const Part& p : instance.parts()) {
    bool placeable = false;
    for (const ModuleSpec& m : instance.modules()) {
      placeable = placeable || (m.capacity > 0 && Fits(p, m));
    }
    if (!placeable) unplaceable.push_back(p.id);
  }

  if (!solution) {
    EmitError(err, {{"error", "infeasible"},
                    {"solver", flags.algo},
                    {"trolleys", trolleys},
                    {"unplaceable_parts", unplaceable}});
    return kExitInfeasible;
  }

  WriteTo(flags.out, out,
          [&](std::ostream& o) { WriteAssignments(o, *solution); });
  json sidecar = SolutionSidecar(*solution);
  sidecar["trolleys"] = trolleys;
  sidecar.update(extra);
  if (!flags.out.empty()) {
    std::ofstream side = OpenForWrite(flags.out + ".json");
    side << sidecar.dump(2) << '\n';
  } else {
    err << sidecar.dump() << '\n';
  }

  if (!solution->feasible) {
    EmitError(err, {{"error", "infeasible"},
                    {"solver", flags.algo},
                    {"trolleys", trolleys},
                    {"violations", ReportToJson(CheckFeasible(instance, *solution))},
                    {"unplaceable_parts", unplaceable}});
    return kExitInfeasible;
  }
  return kExitOk;
}

struct TrainFlags {
  std::string modules;
  int episodes = 0;
  std::uint64_t seed = 0;
  std::string checkpoint;
  std::string config;
  int parts_per_episode = 50;
  std::string log;
};

int RunTrain(const TrainFlags& flags, std::ostream& out, std::ostream& err) {
  EnvConfig env;
  env.modules = ReadModulesFile(flags.modules);
  env.episodes = flags.episodes;
  env.parts_per_episode = flags.parts_per_episode;
  TrainerConfig config;
  if (!flags.config.empty()) {
    std::ifstream in(flags.config);
    if (!in) throw UsageError("cannot open " + flags.config);
    try {
      config = TrainerConfig::FromJson(json::parse(in));
    } catch (const json::exception& e) {
      throw UsageError(std::string("malformed trainer config: ") + e.what());
    }
  }
  TrainResult result = Train(env, config, flags.seed);
  SaveCheckpoint(flags.checkpoint, result.network);
  WriteTo(flags.log, out,
          [&](std::ostream& o) { WriteTrainingLog(o, result.log); });
  err << "trained " << result.steps << " steps over " << result.log.size()
      << " episodes\n";
  return kExitOk;
}

struct BenchFlags {
  std::string modules;
  std::string seeds = "1,2,3";
  int max_parts = 200;
  std::string algos = "bestfit,exact-flow";
  std::string outdir;
  std::string real;
  std::string checkpoint;
  double bnb_timeout_s = 60.0;
  std::int64_t probe_trials = 0;
};

json DivergenceToJson(const Divergence& d) {
  json parts = json::array();
  for (const Part& p : d.parts) {
    parts.push_back({{"id", p.id},
                     {"length", FormatMillimeters(p.length)},
                     {"width", FormatMillimeters(p.width)}});
  }
  json modules = json::array();
  for (const ModuleSpec& m : d.modules) {
    modules.push_back({{"id", m.id},
                       {"length", FormatMillimeters(m.length)},
                       {"width", FormatMillimeters(m.width)},
                       {"capacity", m.capacity}});
  }
  return {{"seed", d.seed},
          {"trial", d.trial},
          {"kind", d.kind == DivergenceKind::kBestFitInfeasible
                       ? "bestfit_infeasible"
                       : "bestfit_suboptimal"},
          {"best_fit_waste", d.best_fit_waste
                                 ? json(ToSquareMillimeters(*d.best_fit_waste))
                                 : json(nullptr)},
          {"exact_waste", ToSquareMillimeters(d.exact_waste)},
          {"parts", parts},
          {"modules", modules}};
}

int RunBench(const BenchFlags& flags, std::ostream& out, std::ostream& err) {
  ExperimentConfig config;
  config.module_set = ReadModulesFile(flags.modules);
  config.seeds = ParseSeedList(flags.seeds);
  config.max_parts = flags.max_parts;
  config.algorithms = ParseAlgorithmList(flags.algos);
  config.bnb_timeout_s = flags.bnb_timeout_s;
  if (!flags.real.empty()) config.real_parts = ReadPartsFile(flags.real);
  if (!flags.checkpoint.empty()) config.dqn = LoadCheckpoint(flags.checkpoint);
  try {
    config.Validate();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  if (config.real_parts &&
      config.real_parts->size() < static_cast<std::size_t>(config.max_parts)) {
    err << "warning: real part pool has " << config.real_parts->size()
        << " parts; series truncated below --max-parts " << config.max_parts
        << '\n';
  }

  fs::create_directories(flags.outdir);
  std::vector<ResultSeries> series =
      RunGridParallel(config, ThreadsFromEnvironment());
  for (const ResultSeries& s : series) WriteSeries(s, flags.outdir);

  json summary = Summarize(series);
  summary["max_parts"] = config.max_parts;
  summary["part_source"] = config.real_parts ? "real" : "random";
  if (flags.probe_trials > 0) {
    ProbeConfig probe;
    probe.nested = false;
    std::vector<Divergence> found = CounterexampleProbeParallel(
        config.seeds.front(), flags.probe_trials, probe,
        ThreadsFromEnvironment());
    json list = json::array();
    for (const Divergence& d : found) list.push_back(DivergenceToJson(d));
    std::ofstream probe_out = OpenForWrite(fs::path(flags.outdir) / "counterexamples.json");
    probe_out << list.dump(2) << '\n';
    summary["probe"] = {{"trials", flags.probe_trials},
                        {"divergences", found.size()}};
  }
  std::ofstream summary_out = OpenForWrite(fs::path(flags.outdir) / "summary.json");
  summary_out << summary.dump(2) << '\n';
  out << FormatSummaryTable(summary);
  return kExitOk;
}

int RunReport(const std::string& indir, std::ostream& out) {
  std::ifstream in(fs::path(indir) / "summary.json");
  if (!in) throw UsageError("no summary.json in " + indir);
  json summary;
  try {
    summary = json::parse(in);
    out << FormatSummaryTable(summary);
  } catch (const json::exception& e) {
    throw UsageError(std::string("malformed summary.json: ") + e.what());
  }
  return kExitOk;
}

}  // namespace

int Dispatch(std::span<const std::string> args, std::ostream& out,
             std::ostream& err) {
  CLI::App app{"Trolley module packing: best-fit, exact and DQN solvers",
               "trolleypack"};
  app.require_subcommand(1);

  std::uint64_t gen_seed = 0;
  int gen_count = 0;
  std::string gen_modules;
  std::string gen_out;
  CLI::App* gen = app.add_subcommand("gen", "Generate random parts");
  gen->add_option("--seed", gen_seed)->required();
  gen->add_option("--count", gen_count)->required();
  gen->add_option("--modules", gen_modules)->required();
  gen->add_option("--out", gen_out);

  PackFlags pack_flags;
  CLI::App* pack = app.add_subcommand("pack", "Assign parts to modules");
  pack->add_option("--algo", pack_flags.algo)->required();
  pack->add_option("--parts", pack_flags.parts)->required();
  pack->add_option("--modules", pack_flags.modules)->required();
  pack->add_option("--trolleys", pack_flags.trolleys);
  pack->add_option("--checkpoint", pack_flags.checkpoint);
  pack->add_option("--out", pack_flags.out);
  pack->add_option("--timeout", pack_flags.timeout_s);

  TrainFlags train_flags;
  CLI::App* train = app.add_subcommand("train", "Train the DQN agent");
  train->add_option("--modules", train_flags.modules)->required();
  train->add_option("--episodes", train_flags.episodes)->required();
  train->add_option("--seed", train_flags.seed)->required();
  train->add_option("--checkpoint", train_flags.checkpoint)->required();
  train->add_option("--config", train_flags.config);
  train->add_option("--parts-per-episode", train_flags.parts_per_episode);
  train->add_option("--log", train_flags.log);

  BenchFlags bench_flags;
  CLI::App* bench = app.add_subcommand("bench", "Run the incremental experiment");
  bench->add_option("--modules", bench_flags.modules)->required();
  bench->add_option("--seeds", bench_flags.seeds);
  bench->add_option("--max-parts", bench_flags.max_parts);
  bench->add_option("--algos", bench_flags.algos);
  bench->add_option("--outdir", bench_flags.outdir)->required();
  bench->add_option("--real", bench_flags.real);
  bench->add_option("--checkpoint", bench_flags.checkpoint);
  bench->add_option("--bnb-timeout", bench_flags.bnb_timeout_s);
  bench->add_option("--probe-trials", bench_flags.probe_trials);

  std::string report_indir;
  CLI::App* report = app.add_subcommand("report", "Print a bench summary");
  report->add_option("--indir", report_indir)->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::Success& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitUsage;
  }

  try {
    if (*gen) return RunGen(gen_seed, gen_count, gen_modules, gen_out, out);
    if (*pack) return RunPack(pack_flags, out, err);
    if (*train) {
      if (train_flags.episodes < 0 || train_flags.parts_per_episode < 1) {
        throw UsageError("--episodes must be >= 0 and --parts-per-episode >= 1");
      }
      return RunTrain(train_flags, out, err);
    }
    if (*bench) {
      if (bench_flags.max_parts < 1) throw UsageError("--max-parts must be >= 1");
      return RunBench(bench_flags, out, err);
    }
    if (*report) return RunReport(report_indir, out);
  } catch (const UsageError& e) {
    EmitError(err, {{"error", "usage"}, {"message", e.what()}});
    return kExitUsage;
  } catch (const ParseError& e) {
    EmitError(err, {{"error", "input"}, {"message", e.what()}});
    return kExitUsage;
  } catch (const StructuralError& e) {
    EmitError(err, {{"error", "input"}, {"message", e.what()}});
    return kExitUsage;
  } catch (const ConfigError& e) {
    EmitError(err, {{"error", "config"}, {"message", e.what()}});
    return kExitUsage;
  } catch (const CheckpointError& e) {
    EmitError(err, {{"error", "checkpoint"}, {"message", e.what()}});
    return kExitUsage;
  } catch (const UnpackableError& e) {
    EmitError(err, {{"error", "unpackable"},
                    {"part_id", e.part_id()},
                    {"message", e.what()}});
    return kExitInfeasible;
  } catch (const std::exception& e) {
    EmitError(err, {{"error", "runtime"}, {"message", e.what()}});
    return kExitInfeasible;
  }
  return kExitUsage;
}

}  // namespace trolleypack
