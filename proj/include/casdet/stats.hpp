#pragma once

#include <optional>
#include <vector>

namespace casdet {

/// Error rates of one chunk classifier, conditioned on the chunk's true label.
struct detector_profile {
    double tpr = 0.0;  ///< P(predict positive | chunk contains the object)
    double fpr = 0.0;  ///< P(predict positive | chunk does not)
};

/// Parameters of the closed-form cascade model over a d-dimensional chunk
/// grid: per-L0-chunk Bernoulli prevalence plus one detector profile per
/// pyramid level, finest level first.
struct cascade_model {
    int dim = 0;
    double prevalence = 0.0;
    std::vector<detector_profile> profiles;
};

/// Composite accuracy and normalized cost of a detector system.
///
/// expected_calls_per_l0_chunk[k] is the expected number of level-k
/// classifier calls divided by the number of L0 chunks. Every level below
/// the top lies in [0, 1]; the top level is always fully evaluated and
/// contributes exactly 2^(-dim * top).
struct cascade_metrics {
    double tpr = 0.0;
    double fpr = 0.0;
    /// Bayes precision. Unset when no true positive can exist (prevalence 0)
    /// or when the detector never predicts positive.
    std::optional<double> precision;
    std::vector<double> expected_calls_per_l0_chunk;

    double total_calls_per_l0_chunk() const;
};

/// Throws std::invalid_argument naming the offending field when the model is
/// malformed (empty profiles, probability outside [0, 1], dim < 1).
void validate_model(const cascade_model& model);

/// Baseline detector that classifies every L0 chunk.
cascade_metrics single_level_metrics(const detector_profile& profile, double prevalence);

/// Two-level cascade: composite rates and expected calls in closed form.
/// With q = 1 - prevalence and m = 2^dim:
///   tpr = tpr1 * tpr0
///   fpr = q^(m-1) * fpr1 * fpr0 + (1 - q^(m-1)) * tpr1 * fpr0
///   E[level-0 calls]/n = tpr1 + q^m * (fpr1 - tpr1)
/// Requires exactly two profiles.
cascade_metrics two_level_metrics(const cascade_model& model);

/// Cascade with >= 2 levels, computed by folding the two-level composition
/// top-down: levels (L, L-1) combine into a composite profile over
/// level-(L-1) chunks, which folds with the next level down until level 0 is
/// absorbed. Two-level input returns two_level_metrics exactly.
cascade_metrics multi_level_metrics(const cascade_model& model);

/// Probability that a level-`level` chunk contains at least one positive L0
/// chunk: 1 - (1-p)^(2^(dim*level)).
double level_prevalence(double prevalence, int dim, int level);

enum class sweep_parameter { prevalence, tpr, fpr };

struct sweep_point {
    double value = 0.0;
    cascade_metrics cascade;
    cascade_metrics single_level;
};

/// Substitutes each grid value into a copy of the model (at `level` for
/// tpr/fpr) and evaluates cascade and single-level metrics side by side.
/// Grid values must lie in [0, 1]; rows keep the given grid order.
std::vector<sweep_point> sweep(const cascade_model& model, sweep_parameter parameter, int level,
                               const std::vector<double>& grid);

}  // namespace casdet
