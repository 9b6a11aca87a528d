#include <doctest.h>

#include <algorithm>
#include <set>
#include <stdexcept>

#include "casdet/pyramid.hpp"

using namespace casdet;

TEST_SUITE("pyramid") {

TEST_CASE("chunk counts follow n / 2^(dim*level)") {
    const pyramid_spec s3(3, 2, {4, 4, 4});
    CHECK(chunk_count(s3, 0) == 64);
    CHECK(chunk_count(s3, 1) == 8);

    const pyramid_spec s2(2, 3, {8, 8});
    CHECK(chunk_count(s2, 2) == 4);

    CHECK_THROWS_AS(chunk_count(s3, 2), std::out_of_range);
    CHECK_THROWS_AS(chunk_count(s3, -1), std::out_of_range);
}

TEST_CASE("construction rejects invalid geometry") {
    CHECK_THROWS_AS(pyramid_spec(0, 1, {}), std::invalid_argument);
    CHECK_THROWS_AS(pyramid_spec(1, 0, {4}), std::invalid_argument);
    CHECK_THROWS_AS(pyramid_spec(2, 2, {4}), std::invalid_argument);
    CHECK_THROWS_AS(pyramid_spec(1, 2, {3}), std::invalid_argument);
    // 6 splits once but not twice
    CHECK_THROWS_AS(pyramid_spec(2, 3, {6, 8}), std::invalid_argument);
    CHECK_NOTHROW(pyramid_spec(2, 2, {6, 8}));
}

TEST_CASE("children tile the parent") {
    const pyramid_spec s3(3, 2, {4, 4, 4});
    const auto kids = children(s3, {1, {0, 0, 0}});
    REQUIRE(kids.size() == 8);
    std::set<std::vector<std::int64_t>> coords;
    for (const auto& k : kids) {
        CHECK(k.level == 0);
        for (auto c : k.coords) {
            CHECK(c >= 0);
            CHECK(c <= 1);
        }
        coords.insert(k.coords);
    }
    CHECK(coords.size() == 8);

    const pyramid_spec s1(1, 2, {8});
    const auto kids1 = children(s1, {1, {2}});
    REQUIRE(kids1.size() == 2);
    CHECK(kids1[0].coords == std::vector<std::int64_t>{4});
    CHECK(kids1[1].coords == std::vector<std::int64_t>{5});

    const pyramid_spec s2(2, 3, {8, 8});
    const auto kids2 = children(s2, {2, {0, 0}});
    CHECK(kids2.size() == 4);
    for (const auto& k : kids2) {
        CHECK(k.level == 1);
    }

    CHECK_THROWS_AS(children(s3, {0, {0, 0, 0}}), std::out_of_range);
}

TEST_CASE("parent is floor division by two") {
    const pyramid_spec s3(3, 2, {4, 4, 4});
    CHECK(parent(s3, {0, {1, 1, 1}}) == chunk_index{1, {0, 0, 0}});

    const pyramid_spec s2(2, 2, {6, 4});
    CHECK(parent(s2, {0, {5, 2}}) == chunk_index{1, {2, 1}});

    CHECK_THROWS_AS(parent(s3, {1, {0, 0, 0}}), std::out_of_range);
}

TEST_CASE("children/parent round trip at every level") {
    const pyramid_spec spec(2, 3, {8, 4});
    for (int level = 1; level < spec.levels; ++level) {
        const std::int64_t n = chunk_count(spec, level);
        for (std::int64_t lin = 0; lin < n; ++lin) {
            const chunk_index p = index_from_linear(spec, level, lin);
            for (const auto& c : children(spec, p)) {
                CHECK(parent(spec, c) == p);
            }
        }
    }
}

TEST_CASE("children of distinct parents partition the finer level") {
    const pyramid_spec spec(3, 2, {4, 2, 2});
    std::set<std::int64_t> seen;
    for (std::int64_t lin = 0; lin < chunk_count(spec, 1); ++lin) {
        for (const auto& c : children(spec, index_from_linear(spec, 1, lin))) {
            const bool inserted = seen.insert(linear_index(spec, c)).second;
            CHECK(inserted);  // disjoint
        }
    }
    CHECK(static_cast<std::int64_t>(seen.size()) == chunk_count(spec, 0));  // exhaustive
}

TEST_CASE("chunk_count identity across levels") {
    const pyramid_spec spec(2, 4, {16, 8});
    for (int k = 0; k < spec.levels; ++k) {
        CHECK(chunk_count(spec, k) * (std::int64_t{1} << (spec.dim * k)) == chunk_count(spec, 0));
    }
}

TEST_CASE("linearization round trips and stays in range") {
    const pyramid_spec spec(3, 2, {4, 2, 6});
    for (int level = 0; level < spec.levels; ++level) {
        const std::int64_t n = chunk_count(spec, level);
        for (std::int64_t lin = 0; lin < n; ++lin) {
            const chunk_index idx = index_from_linear(spec, level, lin);
            CHECK(linear_index(spec, idx) == lin);
        }
        CHECK_THROWS_AS(index_from_linear(spec, level, n), std::out_of_range);
    }
    CHECK_THROWS_AS(linear_index(spec, {0, {4, 0, 0}}), std::out_of_range);
}

}  // TEST_SUITE
