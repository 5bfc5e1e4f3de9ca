#ifndef TROLLEYPACK_CLI_H_
#define TROLLEYPACK_CLI_H_

#include <iosfwd>
#include <span>
#include <string>

namespace trolleypack {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInfeasible = 1;
inline constexpr int kExitUsage = 2;

// Runs one `trolleypack` command. `args` excludes the program name. Data goes
// to `out`, diagnostics and machine-readable errors to `err`.
//
//   gen    --seed N --count K --modules m.csv [--out parts.csv]
//   pack   --algo A --parts p.csv --modules m.csv [--trolleys k|auto]
//          [--checkpoint c.json] [--out sol.csv] [--timeout S]
//   train  --modules m.csv --episodes N --seed S --checkpoint out.json
//          [--config train.json] [--parts-per-episode P] [--log log.csv]
//   bench  --modules m.csv --seeds LIST --max-parts N --algos LIST
//          --outdir DIR [--real parts.csv] [--checkpoint c.json]
//          [--bnb-timeout S] [--probe-trials T]
//   report --indir DIR
int Dispatch(std::span<const std::string> args, std::ostream& out,
             std::ostream& err);

}  // namespace trolleypack

#endif  // TROLLEYPACK_CLI_H_
