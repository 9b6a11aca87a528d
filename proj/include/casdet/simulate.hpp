#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "casdet/pyramid.hpp"
#include "casdet/stats.hpp"

namespace casdet {

/// Realized ground truth: Bernoulli labels over L0 chunks plus, for every
/// coarser level, the OR over descendant labels ("contains at least one
/// positive L0 chunk"). labels[level][linear index].
struct chunk_world {
    pyramid_spec spec;
    std::vector<std::vector<std::uint8_t>> labels;
};

/// OR-reduction of L0 chunk labels up the pyramid; labels[0] == l0_labels.
std::vector<std::vector<std::uint8_t>> or_reduce_labels(const pyramid_spec& spec,
                                                        std::vector<std::uint8_t> l0_labels);

/// Independent Bernoulli(p) L0 labels from a deterministic stream; repeated
/// calls with the same (spec, p, seed) return bit-identical worlds.
chunk_world sample_world(const pyramid_spec& spec, double p, std::uint64_t seed);

/// Stochastic classifier outcome for one chunk: fires with probability
/// profile.tpr when the label is positive, profile.fpr otherwise. The caller
/// supplies the uniform draw so independence across calls is explicit.
bool stochastic_detector_decision(bool label, const detector_profile& profile, double rng_draw);

/// One estimated quantity with its CLT standard error. `defined` is false
/// when the estimand never materialized (e.g. TPR in a run that produced no
/// positive chunk); mean and std_error are meaningless in that case.
struct sim_estimate {
    double mean = 0.0;
    double std_error = 0.0;
    std::uint64_t trials = 0;
    bool defined = true;
};

/// Key for the per-level call-count estimate in run_trials results.
std::string calls_metric_name(int level);

/// Monte Carlo estimate of cascade accuracy and cost. Each trial samples a
/// world and runs the cascade decision rule (top level fully evaluated,
/// descend only on positive predictions). Returns estimates keyed "tpr",
/// "fpr", "precision", and calls_metric_name(k) for every level, all call
/// counts normalized by the L0 chunk count.
///
/// TPR/FPR are pooled ratio estimators conditioned on realized labels;
/// precision is pooled TP/(TP+FP). Standard errors use trial-level CLT
/// linearization. Trials run on `threads` threads when > 1; every tally is
/// an integer accumulator, so results are bit-identical to sequential
/// execution for any thread count.
std::map<std::string, sim_estimate> run_trials(const cascade_model& model, const pyramid_spec& spec,
                                               std::uint64_t trials, std::uint64_t seed,
                                               int threads = 1);

/// Exact cascade metrics for tiny worlds (<= 16 L0 chunks), computed by
/// enumerating every L0 label pattern and marginalizing detector randomness
/// analytically. No sampling error; serves as the ground-truth oracle for
/// the closed-form model. tpr/fpr/precision are unset when their
/// conditioning event has probability zero.
struct exact_metrics {
    std::optional<double> tpr;
    std::optional<double> fpr;
    std::optional<double> precision;
    std::vector<double> expected_calls_per_l0_chunk;
};

exact_metrics exhaustive_small_world(const cascade_model& model, const pyramid_spec& spec);

}  // namespace casdet
