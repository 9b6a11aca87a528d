#include "casdet/simulate.hpp"

#include <cmath>
#include <stdexcept>
#include <thread>

#include "casdet/rng.hpp"

namespace casdet {

// child linear index (level k) -> parent linear index (level k+1)
static std::vector<std::int64_t> parent_linear_map(const pyramid_spec& spec, int level) {
    const std::int64_t n = chunk_count(spec, level);
    std::vector<std::int64_t> map(static_cast<std::size_t>(n));
    for (std::int64_t c = 0; c < n; ++c) {
        map[c] = linear_index(spec, parent(spec, index_from_linear(spec, level, c)));
    }
    return map;
}

std::vector<std::vector<std::uint8_t>> or_reduce_labels(const pyramid_spec& spec,
                                                        std::vector<std::uint8_t> l0_labels) {
    if (l0_labels.size() != static_cast<std::size_t>(chunk_count(spec, 0))) {
        throw std::invalid_argument("or_reduce_labels: label count does not match L0 chunk count");
    }
    std::vector<std::vector<std::uint8_t>> labels(spec.levels);
    labels[0] = std::move(l0_labels);
    for (int k = 1; k < spec.levels; ++k) {
        labels[k].assign(static_cast<std::size_t>(chunk_count(spec, k)), 0);
        const auto parents = parent_linear_map(spec, k - 1);
        for (std::size_t c = 0; c < labels[k - 1].size(); ++c) {
            labels[k][parents[c]] |= labels[k - 1][c];
        }
    }
    return labels;
}

chunk_world sample_world(const pyramid_spec& spec, double p, std::uint64_t seed) {
    if (!(p >= 0.0 && p <= 1.0)) {
        throw std::invalid_argument("prevalence must be in [0, 1]");
    }
    rng_stream g(seed, 0);
    std::vector<std::uint8_t> l0(static_cast<std::size_t>(chunk_count(spec, 0)));
    for (auto& label : l0) {
        label = g.next_bernoulli(p) ? 1 : 0;
    }
    chunk_world world;
    world.spec = spec;
    world.labels = or_reduce_labels(spec, std::move(l0));
    return world;
}

bool stochastic_detector_decision(bool label, const detector_profile& profile, double rng_draw) {
    return rng_draw < (label ? profile.tpr : profile.fpr);
}

std::string calls_metric_name(int level) { return "calls_level" + std::to_string(level); }

namespace {

// per-thread tallies; integer throughout so merging is exact in any order
struct trial_tally {
    std::uint64_t tp = 0, pos = 0, fp = 0, neg = 0;
    std::uint64_t tp2 = 0, pos2 = 0, tp_pos = 0;
    std::uint64_t fp2 = 0, neg2 = 0, fp_neg = 0;
    std::uint64_t pred2 = 0, tp_pred = 0, pred = 0;  // pred = tp + fp per trial
    std::vector<std::uint64_t> calls, calls2;

    explicit trial_tally(int levels) : calls(levels, 0), calls2(levels, 0) {}

    void merge(const trial_tally& o) {
        tp += o.tp; pos += o.pos; fp += o.fp; neg += o.neg;
        tp2 += o.tp2; pos2 += o.pos2; tp_pos += o.tp_pos;
        fp2 += o.fp2; neg2 += o.neg2; fp_neg += o.fp_neg;
        pred2 += o.pred2; tp_pred += o.tp_pred; pred += o.pred;
        for (std::size_t k = 0; k < calls.size(); ++k) {
            calls[k] += o.calls[k];
            calls2[k] += o.calls2[k];
        }
    }
};

// Pooled ratio estimator sum(y)/sum(x) over iid per-trial pairs, with the
// first-order Taylor variance  SE^2 = sum((y_t - R x_t)^2) / (sum x)^2.
sim_estimate ratio_estimate(std::uint64_t y, std::uint64_t x, std::uint64_t y2, std::uint64_t x2,
                            std::uint64_t xy, std::uint64_t trials) {
    sim_estimate e;
    e.trials = trials;
    if (x == 0) {
        e.defined = false;
        return e;
    }
    const double yd = static_cast<double>(y), xd = static_cast<double>(x);
    const double r = yd / xd;
    const double resid2 = static_cast<double>(y2) - 2.0 * r * static_cast<double>(xy) +
                          r * r * static_cast<double>(x2);
    e.mean = r;
    e.std_error = std::sqrt(std::max(resid2, 0.0)) / xd;
    return e;
}

sim_estimate mean_estimate(std::uint64_t sum, std::uint64_t sum2, std::uint64_t trials, double scale) {
    sim_estimate e;
    e.trials = trials;
    const double t = static_cast<double>(trials);
    const double s = static_cast<double>(sum);
    const double var = (static_cast<double>(sum2) - s * s / t) / static_cast<double>(std::max<std::uint64_t>(trials - 1, 1));
    e.mean = s / t * scale;
    e.std_error = std::sqrt(std::max(var, 0.0) / t) * scale;
    return e;
}

}  // namespace

std::map<std::string, sim_estimate> run_trials(const cascade_model& model, const pyramid_spec& spec,
                                               std::uint64_t trials, std::uint64_t seed, int threads) {
    validate_model(model);
    if (trials < 1) {
        throw std::invalid_argument("trials must be >= 1");
    }
    if (spec.dim != model.dim) {
        throw std::invalid_argument("spec.dim does not match model.dim");
    }
    if (spec.levels != static_cast<int>(model.profiles.size())) {
        throw std::invalid_argument("spec.levels does not match the number of detector profiles");
    }
    if (threads < 1) {
        threads = 1;
    }

    const int levels = spec.levels;
    const int top = levels - 1;
    std::vector<std::int64_t> n_level(levels);
    for (int k = 0; k < levels; ++k) {
        n_level[k] = chunk_count(spec, k);
    }
    std::vector<std::vector<std::int64_t>> parents(levels > 1 ? levels - 1 : 0);
    for (int k = 0; k + 1 < levels; ++k) {
        parents[k] = parent_linear_map(spec, k);
    }

    auto run_range = [&](std::uint64_t begin, std::uint64_t end, trial_tally& tally) {
        std::vector<std::vector<std::uint8_t>> labels(levels);
        std::vector<std::vector<std::uint8_t>> preds(levels);
        for (int k = 0; k < levels; ++k) {
            labels[k].resize(static_cast<std::size_t>(n_level[k]));
            preds[k].resize(static_cast<std::size_t>(n_level[k]));
        }
        for (std::uint64_t t = begin; t < end; ++t) {
            rng_stream g(seed, t);
            // world: L0 Bernoulli labels, then OR up the pyramid
            for (auto& l : labels[0]) {
                l = g.next_bernoulli(model.prevalence) ? 1 : 0;
            }
            for (int k = 1; k < levels; ++k) {
                std::fill(labels[k].begin(), labels[k].end(), 0);
                for (std::size_t c = 0; c < labels[k - 1].size(); ++c) {
                    labels[k][parents[k - 1][c]] |= labels[k - 1][c];
                }
            }
            // cascade decision rule: top fully evaluated, descend on positives
            std::vector<std::uint64_t> trial_calls(levels, 0);
            trial_calls[top] = static_cast<std::uint64_t>(n_level[top]);
            for (std::size_t u = 0; u < labels[top].size(); ++u) {
                preds[top][u] =
                    stochastic_detector_decision(labels[top][u] != 0, model.profiles[top], g.next_unit());
            }
            for (int k = top - 1; k >= 0; --k) {
                for (std::size_t c = 0; c < labels[k].size(); ++c) {
                    if (preds[k + 1][parents[k][c]]) {
                        ++trial_calls[k];
                        preds[k][c] = stochastic_detector_decision(labels[k][c] != 0, model.profiles[k],
                                                                   g.next_unit());
                    } else {
                        preds[k][c] = 0;
                    }
                }
            }
            std::uint64_t tp = 0, fp = 0, pos = 0;
            for (std::size_t c = 0; c < labels[0].size(); ++c) {
                pos += labels[0][c];
                if (preds[0][c]) {
                    (labels[0][c] ? tp : fp) += 1;
                }
            }
            const std::uint64_t neg = static_cast<std::uint64_t>(n_level[0]) - pos;
            const std::uint64_t pred = tp + fp;
            tally.tp += tp; tally.pos += pos; tally.fp += fp; tally.neg += neg;
            tally.tp2 += tp * tp; tally.pos2 += pos * pos; tally.tp_pos += tp * pos;
            tally.fp2 += fp * fp; tally.neg2 += neg * neg; tally.fp_neg += fp * neg;
            tally.pred += pred; tally.pred2 += pred * pred; tally.tp_pred += tp * pred;
            for (int k = 0; k < levels; ++k) {
                tally.calls[k] += trial_calls[k];
                tally.calls2[k] += trial_calls[k] * trial_calls[k];
            }
        }
    };

    trial_tally total(levels);
    const std::uint64_t nthreads = std::min<std::uint64_t>(static_cast<std::uint64_t>(threads), trials);
    if (nthreads <= 1) {
        run_range(0, trials, total);
    } else {
        std::vector<trial_tally> partial(nthreads, trial_tally(levels));
        std::vector<std::thread> pool;
        pool.reserve(nthreads);
        const std::uint64_t chunk = (trials + nthreads - 1) / nthreads;
        for (std::uint64_t i = 0; i < nthreads; ++i) {
            const std::uint64_t begin = i * chunk;
            const std::uint64_t end = std::min(trials, begin + chunk);
            pool.emplace_back([&, begin, end, i] { run_range(begin, end, partial[i]); });
        }
        for (auto& th : pool) {
            th.join();
        }
        for (const auto& p : partial) {
            total.merge(p);
        }
    }

    std::map<std::string, sim_estimate> out;
    out["tpr"] = ratio_estimate(total.tp, total.pos, total.tp2, total.pos2, total.tp_pos, trials);
    out["fpr"] = ratio_estimate(total.fp, total.neg, total.fp2, total.neg2, total.fp_neg, trials);
    out["precision"] = ratio_estimate(total.tp, total.pred, total.tp2, total.pred2, total.tp_pred, trials);
    const double n0 = static_cast<double>(n_level[0]);
    for (int k = 0; k < levels; ++k) {
        out[calls_metric_name(k)] = mean_estimate(total.calls[k], total.calls2[k], trials, 1.0 / n0);
    }
    return out;
}

exact_metrics exhaustive_small_world(const cascade_model& model, const pyramid_spec& spec) {
    validate_model(model);
    if (spec.dim != model.dim) {
        throw std::invalid_argument("spec.dim does not match model.dim");
    }
    if (spec.levels != static_cast<int>(model.profiles.size())) {
        throw std::invalid_argument("spec.levels does not match the number of detector profiles");
    }
    const std::int64_t n0 = chunk_count(spec, 0);
    if (n0 > 16) {
        throw std::invalid_argument("exhaustive_small_world requires <= 16 L0 chunks, got " +
                                    std::to_string(n0));
    }

    const int levels = spec.levels;
    const int top = levels - 1;
    std::vector<std::int64_t> n_level(levels);
    for (int k = 0; k < levels; ++k) {
        n_level[k] = chunk_count(spec, k);
    }
    std::vector<std::vector<std::int64_t>> parents(levels > 1 ? levels - 1 : 0);
    for (int k = 0; k + 1 < levels; ++k) {
        parents[k] = parent_linear_map(spec, k);
    }

    const long double p = model.prevalence;
    const long double q = 1.0L - p;
    // pattern weight p^k q^(n0-k) via power tables (pow(0,0) must be 1)
    std::vector<long double> pk(n0 + 1, 1.0L), qk(n0 + 1, 1.0L);
    for (std::int64_t i = 1; i <= n0; ++i) {
        pk[i] = pk[i - 1] * p;
        qk[i] = qk[i - 1] * q;
    }

    long double sum_tp = 0, sum_fp = 0, sum_pos = 0, sum_neg = 0;
    std::vector<long double> sum_calls(levels, 0.0L);
    std::vector<std::vector<std::uint8_t>> labels(levels);
    // flag[k][u]: probability that every classifier from the top down to
    // level k fires along u's ancestor chain, for the current pattern
    std::vector<std::vector<long double>> flag(levels);
    for (int k = 0; k < levels; ++k) {
        labels[k].resize(static_cast<std::size_t>(n_level[k]));
        flag[k].resize(static_cast<std::size_t>(n_level[k]));
    }

    for (std::uint32_t bits = 0; bits < (1u << n0); ++bits) {
        const int npos = __builtin_popcount(bits);
        const long double w = pk[npos] * qk[n0 - npos];
        if (w == 0.0L) {
            continue;
        }
        for (std::int64_t c = 0; c < n0; ++c) {
            labels[0][c] = (bits >> c) & 1;
        }
        for (int k = 1; k < levels; ++k) {
            std::fill(labels[k].begin(), labels[k].end(), 0);
            for (std::size_t c = 0; c < labels[k - 1].size(); ++c) {
                labels[k][parents[k - 1][c]] |= labels[k - 1][c];
            }
        }
        for (std::size_t u = 0; u < flag[top].size(); ++u) {
            flag[top][u] = labels[top][u] ? model.profiles[top].tpr : model.profiles[top].fpr;
        }
        for (int k = top - 1; k >= 0; --k) {
            for (std::size_t c = 0; c < flag[k].size(); ++c) {
                const long double own =
                    labels[k][c] ? model.profiles[k].tpr : model.profiles[k].fpr;
                flag[k][c] = flag[k + 1][parents[k][c]] * own;
            }
        }
        long double tp = 0, fpv = 0;
        for (std::int64_t c = 0; c < n0; ++c) {
            if (labels[0][c]) {
                tp += flag[0][c];
            } else {
                fpv += flag[0][c];
            }
        }
        sum_tp += w * tp;
        sum_fp += w * fpv;
        sum_pos += w * npos;
        sum_neg += w * (n0 - npos);
        sum_calls[top] += w * static_cast<long double>(n_level[top]);
        const long double m = static_cast<long double>(std::int64_t{1} << spec.dim);
        for (int k = 0; k < top; ++k) {
            long double flagged = 0;
            for (std::size_t u = 0; u < flag[k + 1].size(); ++u) {
                flagged += flag[k + 1][u];
            }
            sum_calls[k] += w * m * flagged;
        }
    }

    exact_metrics out;
    if (sum_pos > 0.0L) {
        out.tpr = static_cast<double>(sum_tp / sum_pos);
    }
    if (sum_neg > 0.0L) {
        out.fpr = static_cast<double>(sum_fp / sum_neg);
    }
    if (sum_pos > 0.0L && sum_tp + sum_fp > 0.0L) {
        out.precision = static_cast<double>(sum_tp / (sum_tp + sum_fp));
    }
    out.expected_calls_per_l0_chunk.resize(levels);
    for (int k = 0; k < levels; ++k) {
        out.expected_calls_per_l0_chunk[k] = static_cast<double>(sum_calls[k] / static_cast<long double>(n0));
    }
    return out;
}

}  // namespace casdet
