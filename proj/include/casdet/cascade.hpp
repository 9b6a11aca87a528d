#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "casdet/chunk_store.hpp"
#include "casdet/nd_array.hpp"
#include "casdet/pyramid.hpp"

namespace casdet {

/// One chunk classifier serving a fixed pyramid level. Implementations must
/// be deterministic for a fixed chunk; stochastic behaviour belongs in the
/// Monte Carlo layer, not here.
class chunk_classifier {
public:
    virtual ~chunk_classifier() = default;
    virtual int level() const = 0;
    virtual bool classify(const nd_array<float>& chunk) const = 0;
    /// True when classify() may be invoked from several threads at once.
    virtual bool concurrent_safe() const { return false; }
};

/// Outcome of one engine run. predictions covers L0 chunks in linear order;
/// calls_per_level[k] counts classifier invocations at level k.
/// wall_clock_seconds sums the monotonic time spent inside classify() calls
/// only; chunk loading is excluded so engine comparisons reflect
/// classifier-call savings (see timing_policy).
struct run_report {
    std::vector<std::uint8_t> predictions;
    std::vector<std::int64_t> calls_per_level;
    double wall_clock_seconds = 0.0;
    std::string timing_policy;
};

inline constexpr const char* k_timing_policy =
    "monotonic clock around classify() calls only; data loading excluded";

struct engine_options {
    int threads = 1;
};

/// Baseline: classifies every L0 chunk. The classifier must serve level 0.
run_report run_single_level(const chunk_classifier& classifier, const chunk_source& source,
                            const pyramid_spec& spec, const engine_options& options = {});

/// Coarse-to-fine cascade: classifies every top-level chunk, then descends
/// one level at a time into the 2^dim children of each positive prediction.
/// An L0 chunk is predicted positive iff its own classifier and every
/// ancestor's classifier returned true; unvisited chunks are negative.
/// classifiers[k] must serve level k, one per level.
run_report run_cascade(const std::vector<const chunk_classifier*>& classifiers,
                       const chunk_source& source, const pyramid_spec& spec,
                       const engine_options& options = {});

/// Per-run accuracy against chunk-level ground truth plus cross-run
/// agreement. Sentinels stay unset when a denominator is empty (no true
/// positives / no predicted positives).
struct comparison_row {
    std::optional<double> recall_a, precision_a;
    std::optional<double> recall_b, precision_b;
    double agreement = 0.0;
    std::string calls_a, calls_b;
    double runtime_a = 0.0, runtime_b = 0.0;
};

comparison_row compare_runs(const run_report& a, const run_report& b,
                            const std::vector<std::uint8_t>& ground_truth);

/// Call counts joined top level first, e.g. "384:1088" for a two-level run.
std::string call_string(const run_report& report);

/// Display rule for agreement fractions: values in (0.99, 1) print as
/// ">0.99", mirroring how near-agreement is usually reported.
std::string format_agreement(double agreement);

}  // namespace casdet
