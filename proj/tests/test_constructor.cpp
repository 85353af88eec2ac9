#include <doctest.h>

#include "test_support.hpp"
#include "theta/constructor.hpp"

using namespace theta;

namespace {

struct Fixture {
    Catalogue cat;
    GddProvider gdds;
    Constructor ctor;

    Fixture()
        : gdds(theta::test::cache_dir() / "gdd"),
          ctor(init_cat(), gdds, theta::test::cache_dir()) {}

    Catalogue& init_cat() {
        cat.load_directory(theta::test::data_dir());
        return cat;
    }
};

Fixture& fixture() {
    static Fixture f;
    return f;
}

} // namespace

TEST_CASE("plans pick the documented routes") {
    auto& f = fixture();

    auto p76 = f.ctor.plan(make_theta(1, 2, 7), 76);
    CHECK(p76.root.kind == StepKind::PatchCase);
    CHECK(p76.root.patch_name == "15p+f'");

    auto p36 = f.ctor.plan(make_theta(2, 2, 6), 36);
    CHECK(p36.root.kind == StepKind::BipartiteTower);
    CHECK(p36.root.params.at("d") == 5);
    CHECK(p36.root.params.at("r") == 2);
    CHECK(p36.root.params.at("s") == 1);
    CHECK(p36.root.params.at("f") == 2);
    CHECK(p36.root.params.at("g") == 3);
    bool needs16 = false, needs21 = false, needs_k105 = false;
    for (const auto& c : p36.root.children) {
        if (c.goal.type == PlanGoal::Type::Design && c.goal.n == 16) needs16 = true;
        if (c.goal.type == PlanGoal::Type::Design && c.goal.n == 21) needs21 = true;
        if (c.goal.type == PlanGoal::Type::Multipartite &&
            c.goal.sizes == std::vector<int>{5, 10})
            needs_k105 = true;
    }
    CHECK(needs16);
    CHECK(needs21);
    CHECK(needs_k105);

    auto p22 = f.ctor.plan(make_theta(1, 2, 8), 22);
    CHECK(p22.root.kind == StepKind::CatalogueLeaf);

    auto p85 = f.ctor.plan(make_theta(5, 5, 5), 85);
    CHECK(p85.root.kind == StepKind::BipartiteAlt);
    CHECK(p85.root.params.at("s") == 25);
    CHECK(p85.root.params.at("e") == 0);

    CHECK_THROWS_AS(f.ctor.plan(make_theta(1, 2, 7), 5), NotInSpectrum);
    CHECK_THROWS_AS(f.ctor.plan(make_theta(1, 2, 7), 22), NotInSpectrum);
}

TEST_CASE("plans are deterministic for a fixed catalogue state") {
    auto& f = fixture();
    for (auto [g, n] : std::vector<std::pair<ThetaGraph, long long>>{
             {make_theta(1, 2, 7), 96}, {make_theta(2, 4, 6), 129}, {make_theta(5, 5, 5), 100}}) {
        auto a = f.ctor.plan(g, n).describe();
        auto b = f.ctor.plan(g, n).describe();
        CHECK(a == b);
    }
}

TEST_CASE("execute meets the forced block counts") {
    auto& f = fixture();

    auto d76 = f.ctor.construct(make_theta(1, 2, 7), 76);
    CHECK(d76.base_blocks.size() == 285);

    auto d15 = f.ctor.construct(make_theta(4, 5, 6), 15);
    CHECK(d15.base_blocks.size() == 7);

    auto d100 = f.ctor.construct(make_theta(1, 3, 6), 100);
    CHECK(d100.base_blocks.size() == 495);
}

TEST_CASE("spectrum tables") {
    auto& f = fixture();

    auto t = f.ctor.spectrum_table(make_theta(1, 2, 7), 100);
    std::vector<long long> members;
    for (auto [n, ok] : t)
        if (ok) members.push_back(n);
    CHECK(members == std::vector<long long>{0, 1, 16, 20, 21, 25, 36, 40, 41, 45,
                                            56, 60, 61, 65, 76, 80, 81, 85, 96, 100});

    auto t2 = f.ctor.spectrum_table(make_theta(1, 4, 6), 23);
    std::vector<long long> members2;
    for (auto [n, ok] : t2)
        if (ok) members2.push_back(n);
    CHECK(members2 == std::vector<long long>{0, 1, 11, 12, 22, 23});

    auto t3 = f.ctor.spectrum_table(make_theta(2, 5, 8), 1);
    std::vector<long long> members3;
    for (auto [n, ok] : t3)
        if (ok) members3.push_back(n);
    CHECK(members3 == std::vector<long long>{0, 1});
}

TEST_CASE("inflation goals name the proposition ingredients") {
    auto& f = fixture();

    // weight-11 inflation of a pairwise balanced design on 11 points
    auto pbd = f.gdds.provide_gdd({3, 4, 5}, GddType::uniform(1, 11));
    std::vector<long long> w(11, 11);
    auto goals = inflate(pbd, w, 0);
    CHECK(goals.overlay_orders == std::vector<long long>(11, 11));
    for (const auto& host : goals.block_hosts) {
        CHECK(host.size() >= 3);
        CHECK(host.size() <= 5);
        for (long long sz : host) CHECK(sz == 11);
    }

    // weight-10 inflation of a 3-GDD of type 2^3 with an extra point
    auto g23 = f.gdds.provide_gdd({3}, GddType::uniform(2, 3));
    std::vector<long long> w2(6, 10);
    auto goals2 = inflate(g23, w2, 1);
    CHECK(goals2.overlay_orders == std::vector<long long>{21, 21, 21});
    CHECK(goals2.block_hosts.size() == 4);
    for (const auto& host : goals2.block_hosts)
        CHECK(host == std::vector<long long>{10, 10, 10});

    // weight 1 keeps the blocks as complete graphs
    std::vector<long long> w3(6, 1);
    auto goals3 = inflate(g23, w3, 0);
    for (const auto& host : goals3.block_hosts) CHECK(host == std::vector<long long>{1, 1, 1});
}

TEST_CASE("missing ingredients surface as explicit errors") {
    // a provider clamped to t <= 1 cannot supply the resolvable design the
    // order-96 route needs; the constructor must report the ingredient
    Catalogue cat;
    cat.load_directory(theta::test::data_dir());
    GddBounds tight;
    tight.max_rgdd_t = 1;
    GddProvider clamped("", tight);
    Constructor ctor(cat, clamped, "");
    CHECK_THROWS_AS(ctor.construct(make_theta(1, 2, 12), 96), IngredientMissing);
}

TEST_CASE("coverage laws tile the admissible residues up to 2000") {
    auto t2a = coverage_law_table2(5, 0, 2000);
    CHECK(t2a.holds);
    CHECK(t2a.missing.empty());
    CHECK(t2a.extra.empty());
    auto t2b = coverage_law_table2(7, 1, 2000);
    CHECK(t2b.holds);
    auto t3 = coverage_law_table3(2000);
    CHECK(t3.holds);
    auto t4 = coverage_law_table4(2000);
    CHECK(t4.holds);
}

TEST_CASE("every constructed design self-verifies across a sample") {
    auto& f = fixture();
    // a deliberate spread over routes: towers, rows, patches, degenerate cases
    for (auto [g, n] : std::vector<std::pair<ThetaGraph, long long>>{
             {make_theta(2, 4, 4), 45},   // all-even tower with g=5
             {make_theta(1, 5, 5), 33},   // all-odd tower
             {make_theta(5, 5, 5), 150},  // bipartite-alt deep
             {make_theta(1, 2, 7), 145},  // two-prime degenerate 4^5 row
             {make_theta(2, 2, 10), 148}, // 14-edge table row
             {make_theta(1, 2, 8), 66},   // prime tripartite patch t=6
             {make_theta(1, 3, 7), 89},   // prime tripartite patch t=8
             {make_theta(2, 4, 6), 64},   // theta12 patch
             {make_theta(1, 2, 12), 111}, // theta15 patch with searched order 31
             {make_theta(1, 6, 8), 141},  // theta15 w=7 row
         }) {
        auto d = f.ctor.construct(g, n);
        CHECK(static_cast<long long>(d.base_blocks.size()) ==
              n * (n - 1) / (2 * g.edge_count()));
    }
}
