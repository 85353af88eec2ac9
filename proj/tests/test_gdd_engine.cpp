#include <doctest.h>

#include <fstream>

#include "test_support.hpp"
#include "theta/gdd_engine.hpp"

using namespace theta;

namespace {

GddProvider& shared_provider() {
    static GddProvider prov(theta::test::cache_dir() / "gdd");
    return prov;
}

} // namespace

TEST_CASE("degenerate and small gdds") {
    auto& prov = shared_provider();

    auto trivial = prov.provide_gdd({4}, GddType::uniform(1, 4));
    CHECK(trivial.blocks.size() == 1);
    CHECK(trivial.blocks[0].size() == 4);
    CHECK(verify_gdd_certificate(trivial).accept);

    auto g23 = prov.provide_gdd({3}, GddType::uniform(2, 3));
    CHECK(g23.points() == 6);
    CHECK(g23.blocks.size() == 4);
    CHECK(verify_gdd_certificate(g23).accept);

    CHECK_THROWS_AS(prov.provide_gdd({3, 4, 5}, GddType::uniform(1, 6)), Unprovidable);
    CHECK_THROWS_AS(prov.provide_gdd({3, 4, 5}, GddType::uniform(1, 8)), Unprovidable);
    CHECK_THROWS_AS(prov.provide_gdd({3}, GddType::uniform(2, 5)), Unprovidable); // 20 % 3 != 0
}

TEST_CASE("the pbd family used by the prime constructions") {
    auto& prov = shared_provider();
    for (int t : {3, 4, 5, 7, 9, 10, 11, 12, 13}) {
        auto g = prov.provide_gdd({3, 4, 5}, GddType::uniform(1, t));
        CHECK(g.points() == t);
        CHECK(verify_gdd_certificate(g).accept);
    }
}

TEST_CASE("resolvable families with exact class counts") {
    auto& prov = shared_provider();
    for (int t : {1, 2, 3, 4}) {
        auto r = prov.provide_rgdd(3, GddType::uniform(3, 2 * t + 1));
        CHECK(static_cast<int>(r.classes.size()) == 3 * t);
        CHECK(verify_gdd_certificate(r.gdd).accept);
        CHECK(resolution_valid(r));
    }
    for (int t : {1, 2}) {
        auto r = prov.provide_rgdd(4, GddType::uniform(4, 3 * t + 1));
        CHECK(static_cast<int>(r.classes.size()) == 4 * t);
        CHECK(verify_gdd_certificate(r.gdd).accept);
        CHECK(resolution_valid(r));
    }
    CHECK_THROWS_AS(prov.provide_rgdd(3, GddType::uniform(3, 2)), Unprovidable);
    CHECK_THROWS_AS(prov.provide_rgdd(5, GddType::uniform(5, 6)), Unprovidable);
}

TEST_CASE("extend_with_group grows one point per parallel class") {
    auto& prov = shared_provider();

    auto r33 = prov.provide_rgdd(3, GddType::uniform(3, 3));
    auto g = extend_with_group(r33, {9}, {0});
    CHECK(g.type() == GddType({{3, 3}, {1, 1}}));
    CHECK(verify_gdd_certificate(g).accept);

    auto r44 = prov.provide_rgdd(4, GddType::uniform(4, 4));
    auto g2 = extend_with_group(r44, {16, 17, 18, 19}, {0, 1, 2, 3});
    CHECK(g2.type() == GddType::uniform(4, 5));
    for (const auto& blk : g2.blocks) CHECK(blk.size() == 5);
    CHECK(verify_gdd_certificate(g2).accept);

    auto unchanged = extend_with_group(r33, {}, {});
    CHECK(unchanged.blocks == r33.gdd.blocks);
    CHECK(unchanged.groups == r33.gdd.groups);

    CHECK_THROWS_AS(extend_with_group(r33, {9, 10, 11, 12}, {0, 1, 2, 3}), TooManyNewPoints);
    CHECK_THROWS_AS(extend_with_group(r33, {9, 10}, {0, 0}), TooManyNewPoints);
}

TEST_CASE("the patch gdds for the order towers") {
    auto& prov = shared_provider();
    for (auto ty : {GddType::uniform(2, 4), GddType::uniform(4, 4), GddType{{3, 4}, {5, 1}},
                    GddType{{4, 4}, {6, 1}}, GddType{{3, 1}, {5, 4}}}) {
        auto g = prov.provide_gdd({3}, ty);
        CHECK(g.type() == ty);
        CHECK(verify_gdd_certificate(g).accept);
    }
    auto g35 = prov.provide_gdd({4}, GddType::uniform(3, 5));
    CHECK(g35.blocks.size() == 15);
    CHECK(verify_gdd_certificate(g35).accept);
}

TEST_CASE("cache round-trip and corruption rejection") {
    namespace fs = std::filesystem;
    fs::path dir = theta::test::cache_dir() / "gdd-roundtrip";
    fs::remove_all(dir);
    {
        GddProvider prov(dir);
        prov.provide_gdd({3}, GddType::uniform(2, 3));
        prov.provide_rgdd(3, GddType::uniform(3, 3));
    }
    // a fresh provider must reload from disk and re-verify
    size_t files = 0;
    for (const auto& de : fs::directory_iterator(dir))
        if (de.path().extension() == ".txt") ++files;
    CHECK(files == 2);
    {
        GddProvider prov(dir);
        auto g = prov.provide_gdd({3}, GddType::uniform(2, 3));
        CHECK(verify_gdd_certificate(g).accept);
    }
    // corrupt both files: the provider must reject and rebuild
    for (const auto& de : fs::directory_iterator(dir)) {
        std::ofstream out(de.path(), std::ios::trunc);
        out << "gdd K(3) type 2^3\nblock: 0 0 0\nend\n";
    }
    {
        GddProvider prov(dir);
        auto g = prov.provide_gdd({3}, GddType::uniform(2, 3));
        CHECK(verify_gdd_certificate(g).accept);
        auto r = prov.provide_rgdd(3, GddType::uniform(3, 3));
        CHECK(resolution_valid(r));
    }
}

TEST_CASE("gdd type parsing and canonical form") {
    CHECK(GddType::parse("3^4 5^1") == GddType({{5, 1}, {3, 4}}));
    CHECK(GddType::parse("1^7").point_count() == 7);
    CHECK(GddType({{3, 4}, {5, 1}}).to_string() == "5^1 3^4");
    CHECK(GddType::uniform(4, 7).group_count() == 7);
}
