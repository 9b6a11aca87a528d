#include "casdet/stats.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace casdet {

double cascade_metrics::total_calls_per_l0_chunk() const {
    return std::accumulate(expected_calls_per_l0_chunk.begin(), expected_calls_per_l0_chunk.end(), 0.0);
}

static void check_probability(double v, const std::string& field) {
    if (!(v >= 0.0 && v <= 1.0)) {
        throw std::invalid_argument(field + " must be a probability in [0, 1], got " + std::to_string(v));
    }
}

void validate_model(const cascade_model& model) {
    if (model.dim < 1) {
        throw std::invalid_argument("dim must be >= 1, got " + std::to_string(model.dim));
    }
    check_probability(model.prevalence, "prevalence");
    if (model.profiles.empty()) {
        throw std::invalid_argument("profiles must be non-empty");
    }
    for (std::size_t k = 0; k < model.profiles.size(); ++k) {
        check_probability(model.profiles[k].tpr, "tpr[" + std::to_string(k) + "]");
        check_probability(model.profiles[k].fpr, "fpr[" + std::to_string(k) + "]");
    }
}

// Precision is meaningless when no positive chunk can exist, and 0/0 when the
// detector never fires; both are reported as the unset optional rather than a
// silent 0.
static std::optional<double> bayes_precision(double prevalence, double tpr, double fpr) {
    const double num = prevalence * tpr;
    const double den = prevalence * tpr + (1.0 - prevalence) * fpr;
    if (prevalence == 0.0 || den == 0.0) {
        return std::nullopt;
    }
    return num / den;
}

cascade_metrics single_level_metrics(const detector_profile& profile, double prevalence) {
    check_probability(profile.tpr, "tpr[0]");
    check_probability(profile.fpr, "fpr[0]");
    check_probability(prevalence, "prevalence");
    cascade_metrics m;
    m.tpr = profile.tpr;
    m.fpr = profile.fpr;
    m.expected_calls_per_l0_chunk = {1.0};
    m.precision = bayes_precision(prevalence, m.tpr, m.fpr);
    return m;
}

double level_prevalence(double prevalence, int dim, int level) {
    const double descendants = std::ldexp(1.0, dim * level);  // 2^(dim*level)
    return 1.0 - std::pow(1.0 - prevalence, descendants);
}

cascade_metrics two_level_metrics(const cascade_model& model) {
    validate_model(model);
    if (model.profiles.size() != 2) {
        throw std::invalid_argument("two_level_metrics requires exactly 2 profiles, got " +
                                    std::to_string(model.profiles.size()));
    }
    return multi_level_metrics(model);
}

cascade_metrics multi_level_metrics(const cascade_model& model) {
    validate_model(model);
    if (model.profiles.size() < 2) {
        throw std::invalid_argument("multi_level_metrics requires >= 2 profiles, got " +
                                    std::to_string(model.profiles.size()));
    }
    const int top = static_cast<int>(model.profiles.size()) - 1;
    const double m = std::ldexp(1.0, model.dim);  // 2^dim siblings per parent
    const double q = 1.0 - model.prevalence;

    // q_level(j) = P(a level-j chunk is negative) = q^(2^(dim*j)); sibling
    // chunks at any level are independent because they cover disjoint L0 sets
    auto q_level = [&](int j) { return std::pow(q, std::ldexp(1.0, model.dim * j)); };

    // composite profile over level-j chunks: probability that every
    // classifier from the top down to level j fires along the ancestor
    // chain, conditioned on the level-j chunk's own label
    double comp_tpr = model.profiles[top].tpr;
    double comp_fpr = model.profiles[top].fpr;

    cascade_metrics out;
    out.expected_calls_per_l0_chunk.assign(model.profiles.size(), 0.0);
    out.expected_calls_per_l0_chunk[top] = std::ldexp(1.0, -model.dim * top);  // always evaluated

    for (int j = top - 1; j >= 0; --j) {
        // level-j calls happen on every child of a flagged level-(j+1) chunk:
        // E[calls at j]/n = P(level-(j+1) chunk flagged) * 2^(-dim*j)
        const double p_above = 1.0 - q_level(j + 1);
        const double p_flag = p_above * comp_tpr + (1.0 - p_above) * comp_fpr;
        out.expected_calls_per_l0_chunk[j] = p_flag * std::ldexp(1.0, -model.dim * j);

        // fold level j into the composite: a negative level-j chunk has a
        // positive parent iff any of the m-1 sibling chunks is positive
        const double q_sib = std::pow(q_level(j), m - 1.0);
        comp_fpr = model.profiles[j].fpr * (q_sib * comp_fpr + (1.0 - q_sib) * comp_tpr);
        comp_tpr = model.profiles[j].tpr * comp_tpr;
    }

    out.tpr = comp_tpr;
    out.fpr = comp_fpr;
    out.precision = bayes_precision(model.prevalence, out.tpr, out.fpr);
    return out;
}

std::vector<sweep_point> sweep(const cascade_model& model, sweep_parameter parameter, int level,
                               const std::vector<double>& grid) {
    validate_model(model);
    if (parameter != sweep_parameter::prevalence) {
        if (level < 0 || level >= static_cast<int>(model.profiles.size())) {
            throw std::invalid_argument("sweep.level " + std::to_string(level) +
                                        " out of range for a " + std::to_string(model.profiles.size()) +
                                        "-level model");
        }
    }
    for (std::size_t i = 0; i < grid.size(); ++i) {
        check_probability(grid[i], "sweep.grid[" + std::to_string(i) + "]");
    }

    std::vector<sweep_point> out;
    out.reserve(grid.size());
    for (double value : grid) {
        cascade_model variant = model;
        switch (parameter) {
            case sweep_parameter::prevalence: variant.prevalence = value; break;
            case sweep_parameter::tpr: variant.profiles[level].tpr = value; break;
            case sweep_parameter::fpr: variant.profiles[level].fpr = value; break;
        }
        sweep_point pt;
        pt.value = value;
        pt.cascade = multi_level_metrics(variant);
        pt.single_level = single_level_metrics(variant.profiles[0], variant.prevalence);
        out.push_back(std::move(pt));
    }
    return out;
}

}  // namespace casdet
