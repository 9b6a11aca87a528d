#include "casdet/cascade.hpp"

#include <chrono>
#include <cstdio>
#include <stdexcept>
#include <thread>

namespace casdet {

namespace {

using steady = std::chrono::steady_clock;

// Classifies the chunks of one level selected by `visit` (nullptr = all),
// in ascending linear order. Returns per-chunk outcomes; adds the summed
// classify() durations to `seconds` and the number of calls to `calls`.
std::vector<std::uint8_t> classify_level(const chunk_classifier& cls, const chunk_source& source,
                                         const pyramid_spec& spec, int level,
                                         const std::vector<std::uint8_t>* visit, int threads,
                                         double& seconds, std::int64_t& calls) {
    const std::int64_t n = chunk_count(spec, level);
    std::vector<std::uint8_t> preds(static_cast<std::size_t>(n), 0);

    auto run_range = [&](std::int64_t begin, std::int64_t end, double& elapsed, std::int64_t& count) {
        for (std::int64_t c = begin; c < end; ++c) {
            if (visit && !(*visit)[static_cast<std::size_t>(c)]) {
                continue;
            }
            const nd_array<float> chunk = source.read_chunk(index_from_linear(spec, level, c));
            const auto t0 = steady::now();
            const bool positive = cls.classify(chunk);
            elapsed += std::chrono::duration<double>(steady::now() - t0).count();
            ++count;
            preds[static_cast<std::size_t>(c)] = positive ? 1 : 0;
        }
    };

    if (threads > 1 && cls.concurrent_safe() && n > 1) {
        const int nthreads = static_cast<int>(std::min<std::int64_t>(threads, n));
        std::vector<double> elapsed(static_cast<std::size_t>(nthreads), 0.0);
        std::vector<std::int64_t> counts(static_cast<std::size_t>(nthreads), 0);
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(nthreads));
        const std::int64_t stride = (n + nthreads - 1) / nthreads;
        for (int i = 0; i < nthreads; ++i) {
            const std::int64_t begin = i * stride;
            const std::int64_t end = std::min(n, begin + stride);
            pool.emplace_back([&, begin, end, i] {
                run_range(begin, end, elapsed[static_cast<std::size_t>(i)],
                          counts[static_cast<std::size_t>(i)]);
            });
        }
        for (auto& t : pool) {
            t.join();
        }
        for (int i = 0; i < nthreads; ++i) {
            seconds += elapsed[static_cast<std::size_t>(i)];
            calls += counts[static_cast<std::size_t>(i)];
        }
    } else {
        run_range(0, n, seconds, calls);
    }
    return preds;
}

}  // namespace

run_report run_single_level(const chunk_classifier& classifier, const chunk_source& source,
                            const pyramid_spec& spec, const engine_options& options) {
    if (classifier.level() != 0) {
        throw std::invalid_argument("run_single_level: classifier serves level " +
                                    std::to_string(classifier.level()) + ", expected 0");
    }
    run_report report;
    report.timing_policy = k_timing_policy;
    report.calls_per_level.assign(static_cast<std::size_t>(spec.levels), 0);
    report.predictions = classify_level(classifier, source, spec, 0, nullptr, options.threads,
                                        report.wall_clock_seconds, report.calls_per_level[0]);
    return report;
}

run_report run_cascade(const std::vector<const chunk_classifier*>& classifiers,
                       const chunk_source& source, const pyramid_spec& spec,
                       const engine_options& options) {
    if (static_cast<int>(classifiers.size()) != spec.levels) {
        throw std::invalid_argument("run_cascade: need one classifier per level (" +
                                    std::to_string(spec.levels) + "), got " +
                                    std::to_string(classifiers.size()));
    }
    for (int k = 0; k < spec.levels; ++k) {
        if (!classifiers[static_cast<std::size_t>(k)] ||
            classifiers[static_cast<std::size_t>(k)]->level() != k) {
            throw std::invalid_argument("run_cascade: classifier at position " + std::to_string(k) +
                                        " does not serve level " + std::to_string(k));
        }
    }

    run_report report;
    report.timing_policy = k_timing_policy;
    report.calls_per_level.assign(static_cast<std::size_t>(spec.levels), 0);

    const int top = spec.levels - 1;
    std::vector<std::uint8_t> flagged =
        classify_level(*classifiers[static_cast<std::size_t>(top)], source, spec, top, nullptr,
                       options.threads, report.wall_clock_seconds,
                       report.calls_per_level[static_cast<std::size_t>(top)]);
    for (int k = top - 1; k >= 0; --k) {
        // visit exactly the children of flagged level-(k+1) chunks
        const std::int64_t n = chunk_count(spec, k);
        std::vector<std::uint8_t> visit(static_cast<std::size_t>(n), 0);
        for (std::int64_t c = 0; c < n; ++c) {
            const auto p = parent(spec, index_from_linear(spec, k, c));
            visit[static_cast<std::size_t>(c)] = flagged[static_cast<std::size_t>(linear_index(spec, p))];
        }
        flagged = classify_level(*classifiers[static_cast<std::size_t>(k)], source, spec, k, &visit,
                                 options.threads, report.wall_clock_seconds,
                                 report.calls_per_level[static_cast<std::size_t>(k)]);
    }
    report.predictions = std::move(flagged);
    return report;
}

static std::optional<double> ratio(std::int64_t num, std::int64_t den) {
    if (den == 0) {
        return std::nullopt;
    }
    return static_cast<double>(num) / static_cast<double>(den);
}

comparison_row compare_runs(const run_report& a, const run_report& b,
                            const std::vector<std::uint8_t>& ground_truth) {
    if (a.predictions.size() != b.predictions.size() || a.predictions.size() != ground_truth.size()) {
        throw std::invalid_argument("compare_runs: prediction/ground-truth lengths differ");
    }
    std::int64_t truth_pos = 0, tp_a = 0, pred_a = 0, tp_b = 0, pred_b = 0, same = 0;
    for (std::size_t i = 0; i < ground_truth.size(); ++i) {
        const bool t = ground_truth[i] != 0;
        const bool pa = a.predictions[i] != 0;
        const bool pb = b.predictions[i] != 0;
        truth_pos += t;
        tp_a += (pa && t);
        pred_a += pa;
        tp_b += (pb && t);
        pred_b += pb;
        same += (pa == pb);
    }
    comparison_row row;
    row.recall_a = ratio(tp_a, truth_pos);
    row.precision_a = ratio(tp_a, pred_a);
    row.recall_b = ratio(tp_b, truth_pos);
    row.precision_b = ratio(tp_b, pred_b);
    row.agreement = ground_truth.empty()
                        ? 1.0
                        : static_cast<double>(same) / static_cast<double>(ground_truth.size());
    row.calls_a = call_string(a);
    row.calls_b = call_string(b);
    row.runtime_a = a.wall_clock_seconds;
    row.runtime_b = b.wall_clock_seconds;
    return row;
}

std::string call_string(const run_report& report) {
    std::string s;
    for (std::size_t k = report.calls_per_level.size(); k-- > 0;) {
        s += std::to_string(report.calls_per_level[k]);
        if (k) {
            s += ':';
        }
    }
    return s;
}

std::string format_agreement(double agreement) {
    if (agreement > 0.99 && agreement < 1.0) {
        return ">0.99";
    }
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.4g", agreement);
    return buf;
}

}  // namespace casdet
