#include <doctest.h>

#include <filesystem>
#include <functional>
#include <set>
#include <stdexcept>

#include "casdet/cascade.hpp"
#include "casdet/chunk_store.hpp"
#include "casdet/rng.hpp"

using namespace casdet;

namespace {

// test source whose chunks are filled with their own linear index, so
// classifiers can make per-chunk decisions from the data alone
memory_chunk_source indexed_source(const pyramid_spec& spec, std::int64_t ppc = 2) {
    std::vector<nd_array<float>> images;
    for (int k = 0; k < spec.levels; ++k) {
        auto shape = axis_chunks(spec, k);
        for (auto& s : shape) {
            s *= ppc;
        }
        nd_array<float> img(shape);
        for (std::int64_t c = 0; c < chunk_count(spec, k); ++c) {
            const chunk_index idx = index_from_linear(spec, k, c);
            // paint the chunk box
            std::vector<std::int64_t> lo(spec.dim);
            for (int i = 0; i < spec.dim; ++i) {
                lo[i] = idx.coords[i] * ppc;
            }
            std::vector<std::int64_t> cur = lo;
            while (true) {
                img.at(cur) = static_cast<float>(c);
                int axis = spec.dim - 1;
                while (axis >= 0 && ++cur[axis] >= lo[axis] + ppc) {
                    cur[axis] = lo[axis];
                    --axis;
                }
                if (axis < 0) {
                    break;
                }
            }
        }
        images.push_back(std::move(img));
    }
    return memory_chunk_source(spec, ppc, std::move(images));
}

class lambda_classifier final : public chunk_classifier {
public:
    lambda_classifier(int level, std::function<bool(const nd_array<float>&)> fn)
        : level_(level), fn_(std::move(fn)) {}
    int level() const override { return level_; }
    bool concurrent_safe() const override { return true; }
    bool classify(const nd_array<float>& chunk) const override { return fn_(chunk); }

private:
    int level_;
    std::function<bool(const nd_array<float>&)> fn_;
};

lambda_classifier constant_classifier(int level, bool value) {
    return lambda_classifier(level, [value](const nd_array<float>&) { return value; });
}

// flags the chunks whose linear index is in `flagged`
lambda_classifier set_classifier(int level, std::set<std::int64_t> flagged) {
    return lambda_classifier(level, [flagged = std::move(flagged)](const nd_array<float>& chunk) {
        return flagged.count(static_cast<std::int64_t>(chunk.data[0])) != 0;
    });
}

}  // namespace

TEST_SUITE("cascade") {

TEST_CASE("single level classifies every fine chunk") {
    const pyramid_spec spec(3, 2, {4, 4, 4});
    const auto source = indexed_source(spec);

    const auto all_false = constant_classifier(0, false);
    run_report report = run_single_level(all_false, source, spec);
    CHECK(report.calls_per_level == std::vector<std::int64_t>{64, 0});
    for (auto p : report.predictions) {
        CHECK(p == 0);
    }

    const auto all_true = constant_classifier(0, true);
    report = run_single_level(all_true, source, spec);
    for (auto p : report.predictions) {
        CHECK(p == 1);
    }

    const auto wrong_level = constant_classifier(1, true);
    CHECK_THROWS_AS(run_single_level(wrong_level, source, spec), std::invalid_argument);
}

TEST_CASE("single-level call string over 96 chunks reads 0:96") {
    const pyramid_spec spec(3, 2, {6, 4, 4});
    const auto source = indexed_source(spec);
    const auto cls = constant_classifier(0, false);
    const run_report report = run_single_level(cls, source, spec);
    CHECK(call_string(report) == "0:96");
}

TEST_CASE("cascade descends only into flagged parents") {
    const pyramid_spec spec(3, 2, {4, 4, 4});
    const auto source = indexed_source(spec);
    const auto l0_true = constant_classifier(0, true);

    SUBCASE("coarse level never fires") {
        const auto l1 = constant_classifier(1, false);
        const run_report report = run_cascade({&l0_true, &l1}, source, spec);
        CHECK(report.calls_per_level == std::vector<std::int64_t>{0, 8});
        for (auto p : report.predictions) {
            CHECK(p == 0);
        }
    }

    SUBCASE("coarse level always fires: degenerates to single level") {
        const auto l1 = constant_classifier(1, true);
        const auto l0 = set_classifier(0, {3, 17, 40});
        const run_report cascade_report = run_cascade({&l0, &l1}, source, spec);
        const run_report single_report = run_single_level(l0, source, spec);
        CHECK(cascade_report.calls_per_level[0] == 64);
        CHECK(cascade_report.predictions == single_report.predictions);
    }
}

TEST_CASE("call accounting matches the flagged-parent count exactly") {
    // 384 coarse chunks; flagging 136 of them costs 8 * 136 = 1088 fine calls
    const pyramid_spec spec(3, 2, {16, 16, 12});
    REQUIRE(chunk_count(spec, 0) == 3072);
    REQUIRE(chunk_count(spec, 1) == 384);
    const auto source = indexed_source(spec);
    std::set<std::int64_t> parents;
    for (std::int64_t i = 0; i < 136; ++i) {
        parents.insert(i);
    }
    const auto l1 = set_classifier(1, std::move(parents));
    const auto l0 = constant_classifier(0, true);
    const run_report report = run_cascade({&l0, &l1}, source, spec);
    CHECK(call_string(report) == "384:1088");
    CHECK(report.calls_per_level[0] == 8 * 136);
}

TEST_CASE("fine-level calls are always 2^dim times the flagged parents") {
    rng_stream g(31, 0);
    const pyramid_spec spec(2, 3, {8, 8});
    const auto source = indexed_source(spec);
    for (int round = 0; round < 10; ++round) {
        std::set<std::int64_t> l2_flags, l1_flags;
        for (std::int64_t c = 0; c < chunk_count(spec, 2); ++c) {
            if (g.next_bernoulli(0.5)) {
                l2_flags.insert(c);
            }
        }
        for (std::int64_t c = 0; c < chunk_count(spec, 1); ++c) {
            if (g.next_bernoulli(0.5)) {
                l1_flags.insert(c);
            }
        }
        const auto l2 = set_classifier(2, l2_flags);
        const auto l1 = set_classifier(1, l1_flags);
        const auto l0 = constant_classifier(0, true);
        const run_report report = run_cascade({&l0, &l1, &l2}, source, spec);
        CHECK(report.calls_per_level[1] ==
              4 * static_cast<std::int64_t>(l2_flags.size()));
        // flagged at level 1 = visited and classifier fired
        std::int64_t flagged_l1 = 0;
        for (std::int64_t c = 0; c < chunk_count(spec, 1); ++c) {
            const auto p = parent(spec, index_from_linear(spec, 1, c));
            if (l2_flags.count(linear_index(spec, p)) && l1_flags.count(c)) {
                ++flagged_l1;
            }
        }
        CHECK(report.calls_per_level[0] == 4 * flagged_l1);
    }
}

TEST_CASE("cascade positives are a subset of single-level positives") {
    rng_stream g(12, 0);
    const pyramid_spec spec(3, 2, {4, 4, 4});
    const auto source = indexed_source(spec);
    for (int round = 0; round < 5; ++round) {
        std::set<std::int64_t> fine, coarse;
        for (std::int64_t c = 0; c < chunk_count(spec, 0); ++c) {
            if (g.next_bernoulli(0.4)) {
                fine.insert(c);
            }
        }
        for (std::int64_t c = 0; c < chunk_count(spec, 1); ++c) {
            if (g.next_bernoulli(0.6)) {
                coarse.insert(c);
            }
        }
        const auto l0 = set_classifier(0, fine);
        const auto l1 = set_classifier(1, coarse);
        const run_report single_report = run_single_level(l0, source, spec);
        const run_report cascade_report = run_cascade({&l0, &l1}, source, spec);
        for (std::size_t i = 0; i < single_report.predictions.size(); ++i) {
            if (cascade_report.predictions[i]) {
                CHECK(single_report.predictions[i]);
            }
        }
    }
}

TEST_CASE("engine output is reproducible and thread-count invariant") {
    const pyramid_spec spec(2, 2, {8, 6});
    const auto source = indexed_source(spec);
    const auto l0 = set_classifier(0, {1, 5, 11, 30});
    const auto l1 = set_classifier(1, {0, 2, 7});
    const run_report a = run_cascade({&l0, &l1}, source, spec);
    const run_report b = run_cascade({&l0, &l1}, source, spec);
    CHECK(a.predictions == b.predictions);
    CHECK(a.calls_per_level == b.calls_per_level);
    engine_options parallel;
    parallel.threads = 4;
    const run_report c = run_cascade({&l0, &l1}, source, spec, parallel);
    CHECK(a.predictions == c.predictions);
    CHECK(a.calls_per_level == c.calls_per_level);
}

TEST_CASE("classifier list must match the pyramid") {
    const pyramid_spec spec(2, 2, {4, 4});
    const auto source = indexed_source(spec);
    const auto l0 = constant_classifier(0, true);
    const auto l1 = constant_classifier(1, true);
    CHECK_THROWS_AS(run_cascade({&l0}, source, spec), std::invalid_argument);
    CHECK_THROWS_AS(run_cascade({&l1, &l0}, source, spec), std::invalid_argument);
}

TEST_CASE("comparison rows carry sentinels and agreement") {
    const pyramid_spec spec(1, 2, {8});
    const auto source = indexed_source(spec);
    const auto cls = set_classifier(0, {0, 1, 2});
    const run_report a = run_single_level(cls, source, spec);

    SUBCASE("identical runs agree completely") {
        const comparison_row row = compare_runs(a, a, std::vector<std::uint8_t>(8, 1));
        CHECK(row.agreement == 1.0);
        REQUIRE(row.recall_a.has_value());
        CHECK(*row.recall_a == *row.recall_b);
    }

    SUBCASE("empty truth and empty predictions leave sentinels unset") {
        const auto never = constant_classifier(0, false);
        const run_report none = run_single_level(never, source, spec);
        const comparison_row row = compare_runs(none, none, std::vector<std::uint8_t>(8, 0));
        CHECK_FALSE(row.recall_a.has_value());
        CHECK_FALSE(row.precision_a.has_value());
        CHECK(row.agreement == 1.0);
    }

    SUBCASE("length mismatch is rejected") {
        CHECK_THROWS_AS(compare_runs(a, a, std::vector<std::uint8_t>(7, 0)), std::invalid_argument);
    }
}

TEST_CASE("near-total agreement displays as >0.99") {
    CHECK(format_agreement(0.995) == ">0.99");
    CHECK(format_agreement(0.9999) == ">0.99");
    CHECK(format_agreement(1.0) == "1");
    CHECK(format_agreement(0.5) == "0.5");
    CHECK(format_agreement(0.42) == "0.42");
}

TEST_CASE("chunk directories round trip exactly and name missing chunks") {
    const pyramid_spec spec(2, 2, {4, 2});
    const auto source = indexed_source(spec, 3);
    const auto dir = std::filesystem::temp_directory_path() / "casdet_test_store";
    std::filesystem::remove_all(dir);

    std::vector<nd_array<float>> images;
    for (int k = 0; k < spec.levels; ++k) {
        auto shape = axis_chunks(spec, k);
        for (auto& s : shape) {
            s *= 3;
        }
        nd_array<float> img(shape);
        for (std::int64_t i = 0; i < img.size(); ++i) {
            img.data[static_cast<std::size_t>(i)] = static_cast<float>(k * 1000 + i) * 0.125f;
        }
        images.push_back(std::move(img));
    }
    write_chunk_directory(dir, spec, 3, images);
    const memory_chunk_source mem(spec, 3, images);
    const directory_chunk_source disk(dir);
    CHECK(disk.spec().l0_chunks_per_axis == spec.l0_chunks_per_axis);
    CHECK(disk.pixels_per_chunk_axis() == 3);
    for (int k = 0; k < spec.levels; ++k) {
        for (std::int64_t c = 0; c < chunk_count(spec, k); ++c) {
            const chunk_index idx = index_from_linear(spec, k, c);
            CHECK(disk.read_chunk(idx).data == mem.read_chunk(idx).data);
        }
    }

    // engine surfaces missing chunk data as an i/o error naming the chunk
    std::filesystem::remove(dir / chunk_file_name(chunk_index{0, {1, 1}}));
    try {
        disk.read_chunk({0, {1, 1}});
        FAIL("expected chunk_io_error");
    } catch (const chunk_io_error& e) {
        const std::string message = e.what();
        CHECK(message.find("level 0 chunk [1,1]") != std::string::npos);
    }
    std::filesystem::remove_all(dir);
}

}  // TEST_SUITE
