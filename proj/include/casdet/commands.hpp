#pragma once

#include <iosfwd>
#include <string>

#include "casdet/kv_config.hpp"
#include "casdet/pyramid.hpp"
#include "casdet/stats.hpp"

namespace casdet {

/// Output channels of one command. `out` carries the primary
/// machine-readable result and is byte-deterministic for a fixed config and
/// seed; `info` carries human diagnostics (timings, progress) and is exempt
/// from that guarantee.
struct command_streams {
    std::ostream& out;
    std::ostream& info;
};

/// Exit codes shared by the command layer and the CLI driver.
inline constexpr int exit_ok = 0;
inline constexpr int exit_config_error = 2;
inline constexpr int exit_check_failed = 3;

/// Builds the cascade model from config keys dim / prevalence / tpr / fpr
/// (per-level lists, finest first). Throws kv_error naming the offending
/// field.
cascade_model model_from_config(const kv_file& cfg);

/// Builds the pyramid geometry from l0_chunks_per_axis for a given level
/// count.
pyramid_spec spec_from_config(const kv_file& cfg, int dim, int levels);

/// Closed-form cascade metrics next to the single-level baseline.
int cmd_analyze(const kv_file& cfg, const std::string& format, command_streams io);

/// One CSV/JSON row per grid value of the swept parameter.
int cmd_sweep(const kv_file& cfg, const std::string& format, command_streams io);

/// Monte Carlo estimates with standard errors next to the closed-form
/// values, with a pass flag at the 4-standard-error criterion (pass/fail is
/// only claimed at >= 1000 trials). Returns exit_check_failed when any
/// metric misses its band.
int cmd_simulate(const kv_file& cfg, const std::string& format, command_streams io);

/// Synthetic end-to-end benchmark: renders a scene, calibrates threshold
/// classifiers on a sibling-seed scene, runs the single-level and cascade
/// engines, and reports accuracy, call accounting, detection scores, and the
/// model-predicted call counts. Timings go to `info` only.
int cmd_bench(const kv_file& cfg, const std::string& format, command_streams io);

/// Dispatches a mode name, mapping kv_error to exit_config_error with a
/// message on `info`.
int run_command(const std::string& mode, const kv_file& cfg, const std::string& format,
                command_streams io);

/// "%.17g" rendering used for every real in CSV and structured-text output.
std::string format_real(double v);

}  // namespace casdet
