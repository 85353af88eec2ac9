#include <doctest.h>

#include <set>

#include "test_support.hpp"
#include "theta/group_action.hpp"
#include "theta/verifier.hpp"

using namespace theta;
using theta::test::shipped_catalogue;

TEST_CASE("apply follows the wheel segments") {
    GroupAction plus4({WheelSegment{0, 20, 4}}, {});
    CHECK(plus4.apply(18) == 2);
    CHECK(plus4.apply(0) == 4);

    // Z_15 plus a fixed point
    GroupAction k16({WheelSegment{0, 15, 5}}, {15});
    CHECK(k16.apply(15) == 15);
    CHECK(k16.apply(14) == 4);

    // two wheels: 0..14 and 15..19
    GroupAction mixed({WheelSegment{0, 15, 1}, WheelSegment{15, 5, 1}}, {});
    CHECK(mixed.apply(19) == 15);
    CHECK(mixed.apply(14) == 0);

    CHECK_THROWS_AS(plus4.apply(20), UnknownPoint);
    CHECK_THROWS_AS(plus4.apply(-1), UnknownPoint);
}

TEST_CASE("segments and fixed points must partition the point range") {
    CHECK_THROWS_AS(GroupAction({WheelSegment{0, 5, 1}, WheelSegment{3, 5, 1}}, {}), UnknownPoint);
    CHECK_THROWS_AS(GroupAction({WheelSegment{1, 5, 1}}, {}), UnknownPoint); // misses 0
    CHECK_THROWS_AS(GroupAction({WheelSegment{0, 5, 5}}, {}), UnknownPoint); // step out of range
}

TEST_CASE("order is the lcm of the wheel orbit lengths") {
    CHECK(GroupAction({WheelSegment{0, 20, 4}}, {}).order() == 5);
    CHECK(GroupAction({WheelSegment{0, 24, 8}}, {}).order() == 3);
    CHECK(GroupAction::identity(7).order() == 1);
    CHECK(GroupAction({WheelSegment{0, 15, 1}, WheelSegment{15, 5, 1}}, {}).order() == 15);
    CHECK(GroupAction::identity(7).is_identity());
}

TEST_CASE("develop expands exactly the catalogue arithmetic") {
    const auto& cat = shipped_catalogue();

    const auto& k20 = cat.lookup(make_theta(1, 2, 7), HostGraph::complete(20)).decomposition;
    CHECK(k20.base_blocks.size() == 7);
    CHECK(k20.developed_count == 3);
    CHECK(develop(k20).size() == 19);

    const auto& k24 = cat.lookup(make_theta(4, 4, 4), HostGraph::complete(24)).decomposition;
    CHECK(k24.base_blocks.size() == 11);
    CHECK(k24.developed_count == 6);
    CHECK(develop(k24).size() == 23);

    Decomposition undeveloped = k20;
    undeveloped.developed_count = 0;
    CHECK(develop(undeveloped).size() == 7);
}

TEST_CASE("catalogue actions are bijections that permute the parts") {
    for (const auto& entry : shipped_catalogue().entries()) {
        const auto& d = entry.decomposition;
        const int n = d.host.points();
        std::set<Point> image;
        for (Point p = 0; p < n; ++p) image.insert(d.action.apply(p));
        REQUIRE(static_cast<int>(image.size()) == n);

        if (!d.host.is_complete()) {
            // the action must act on the parts as a permutation (some shipped
            // actions rotate the parts, e.g. x+1 mod 33 over residue classes),
            // which is exactly what keeps the edge universe invariant
            std::vector<int> part_image(static_cast<size_t>(d.host.part_count()), -1);
            for (Point p = 0; p < n; ++p) {
                int from = d.host.part_of(p);
                int to = d.host.part_of(d.action.apply(p));
                if (part_image[static_cast<size_t>(from)] == -1)
                    part_image[static_cast<size_t>(from)] = to;
                REQUIRE(part_image[static_cast<size_t>(from)] == to);
            }
            std::set<int> targets(part_image.begin(), part_image.end());
            REQUIRE(static_cast<int>(targets.size()) == d.host.part_count());
        }
    }
}

TEST_CASE("develop emits copy_counts blocks for every shipped entry") {
    for (const auto& entry : shipped_catalogue().entries()) {
        const auto& d = entry.decomposition;
        CHECK(expanded_count(d) == copy_counts(d.theta.edge_count(), d.host));
        CHECK(static_cast<long long>(develop(d).size()) == expanded_count(d));
    }
}

TEST_CASE("a fully developed design is invariant under its own action") {
    // holds exactly when every base block is developed; partially developed
    // entries leave the undeveloped tail as plain blocks
    int checked = 0;
    for (const auto& entry : shipped_catalogue().entries()) {
        const auto& d = entry.decomposition;
        if (d.developed_count != static_cast<int>(d.base_blocks.size())) continue;
        if (d.action.is_identity() || ++checked > 40) continue;
        auto blocks = develop(d);
        auto canon = [](const ThetaBlock& b) {
            auto edges = block_edges(b);
            std::sort(edges.begin(), edges.end());
            return edges;
        };
        std::set<std::vector<Edge>> before;
        for (const auto& b : blocks) before.insert(canon(b));
        std::set<std::vector<Edge>> after;
        for (auto b : blocks) {
            for (auto& v : b.vertices) v = d.action.apply(v);
            after.insert(canon(b));
        }
        CHECK(before == after);
    }
    CHECK(checked > 10);
}
