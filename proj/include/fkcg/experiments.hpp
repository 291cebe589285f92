#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include "fkcg/config.hpp"

// Batch experiment runner: dispatches a named experiment, writes the
// resolved configuration, JSON-lines audit records and CSV curves into an
// output directory, and re-executes recorded runs for byte-exact
// verification. Every emitted number is a deterministic function of
// (config, seed).

namespace fkcg {

const std::vector<std::string> &experiment_names();

/// Runs the named experiment. Writes under out_dir:
///   config.resolved  - canonical flat key-value form, seed included
///   records.jsonl    - one audit record per line
///   *.csv            - headerful curves, where the experiment emits curves
/// Returns 0 on pass and 2 when a checked invariant fails; throws
/// ConfigError on an unknown experiment or invalid configuration.
int run_experiment(const std::string &name, Config cfg, std::uint64_t seed,
                   const std::string &out_dir);

/// Re-executes the run recorded in artifact_dir/config.resolved into
/// artifact_dir/.reproduce and byte-compares every record and curve file
/// (record timestamps excluded). Writes a field-level diff to diag on
/// mismatch. Returns 0 on an exact match, 2 on mismatch; throws ConfigError
/// when the artifact is unreadable.
int reproduce(const std::string &artifact_dir, std::ostream &diag);

}  // namespace fkcg
