#include <doctest.h>

#include <map>
#include <numeric>
#include <queue>
#include <set>

#include "theta/host_graph.hpp"
#include "theta/theta_graph.hpp"

using namespace theta;

TEST_CASE("make_theta validates and derives") {
    auto g = make_theta(1, 2, 7);
    CHECK(g.edge_count() == 10);
    CHECK(g.vertex_count() == 9);
    CHECK_FALSE(g.bipartite());

    auto h = make_theta(2, 4, 4);
    CHECK(h.edge_count() == 10);
    CHECK(h.bipartite());

    CHECK_THROWS_AS(make_theta(1, 1, 3), InvalidTheta);
    CHECK_THROWS_AS(make_theta(2, 1, 3), InvalidTheta);
    CHECK_THROWS_AS(make_theta(0, 2, 3), InvalidTheta);
    CHECK_THROWS_AS(make_theta(3, 3, 2), InvalidTheta);
}

TEST_CASE("enumerate_thetas matches the closed forms") {
    CHECK(enumerate_thetas(10).size() == 7);
    CHECK(enumerate_thetas(15).size() == 18);
    CHECK(enumerate_thetas(4).empty());

    auto bip = [](int e) {
        long long c = 0;
        for (const auto& g : enumerate_thetas(e))
            if (g.bipartite()) ++c;
        return c;
    };
    CHECK(bip(10) == 2);
    CHECK(bip(15) == 6);

    for (int e = 3; e <= 60; ++e) {
        auto list = enumerate_thetas(e);
        CHECK(static_cast<long long>(list.size()) == theta_count_closed_form(e));
        long long b = 0;
        for (const auto& g : list)
            if (g.bipartite()) ++b;
        CHECK(b == bipartite_count_closed_form(e));
        // lexicographic and valid
        for (size_t i = 1; i < list.size(); ++i)
            CHECK(std::tie(list[i - 1].a, list[i - 1].b, list[i - 1].c) <
                  std::tie(list[i].a, list[i].b, list[i].c));
        for (const auto& g : list) {
            CHECK(g.a + g.b + g.c == e);
            CHECK(g.a >= 1);
            CHECK(g.b >= 2);
            CHECK(g.a <= g.b);
            CHECK(g.b <= g.c);
        }
    }
}

TEST_CASE("block_edges follows the three-path layout") {
    // a = 1: direct edge between the degree-3 vertices
    ThetaBlock small{make_theta(1, 2, 2), {0, 1, 2, 3}};
    auto edges = block_edges(small);
    std::vector<Edge> want{{0, 1}, {0, 2}, {1, 2}, {0, 3}, {1, 3}};
    std::sort(edges.begin(), edges.end());
    std::sort(want.begin(), want.end());
    CHECK(edges == want);

    ThetaBlock blk{make_theta(1, 2, 7), {4, 17, 0, 9, 7, 1, 12, 15, 13}};
    auto e2 = block_edges(blk);
    std::vector<Edge> want2{{4, 17}, {0, 4},   {0, 17}, {4, 9},   {7, 9},
                            {1, 7},  {1, 12},  {12, 15}, {13, 15}, {13, 17}};
    std::sort(e2.begin(), e2.end());
    std::sort(want2.begin(), want2.end());
    CHECK(e2 == want2);

    CHECK_THROWS_AS(block_edges(ThetaBlock{make_theta(1, 2, 2), {0, 1, 2, 2}}), MalformedBlock);
    CHECK_THROWS_AS(block_edges(ThetaBlock{make_theta(1, 2, 2), {0, 1, 2}}), MalformedBlock);
}

TEST_CASE("block degree profile and 2-colorability") {
    for (int e = 5; e <= 15; ++e)
        for (const auto& g : enumerate_thetas(e)) {
            std::vector<Point> tuple(static_cast<size_t>(g.vertex_count()));
            std::iota(tuple.begin(), tuple.end(), 0);
            auto edges = block_edges(ThetaBlock{g, tuple});
            CHECK(static_cast<int>(edges.size()) == e);
            std::set<Edge> distinct(edges.begin(), edges.end());
            CHECK(static_cast<int>(distinct.size()) == e);

            std::map<Point, int> deg;
            for (auto [u, v] : edges) {
                ++deg[u];
                ++deg[v];
            }
            CHECK(deg[tuple[0]] == 3);
            CHECK(deg[tuple[1]] == 3);
            for (size_t i = 2; i < tuple.size(); ++i) CHECK(deg[tuple[i]] == 2);

            // BFS 2-coloring succeeds exactly for the bipartite ones
            std::map<Point, std::vector<Point>> adj;
            for (auto [u, v] : edges) {
                adj[u].push_back(v);
                adj[v].push_back(u);
            }
            std::map<Point, int> color;
            std::queue<Point> q;
            q.push(tuple[0]);
            color[tuple[0]] = 0;
            bool ok = true;
            while (!q.empty()) {
                Point u = q.front();
                q.pop();
                for (Point v : adj[u]) {
                    if (!color.count(v)) {
                        color[v] = color[u] ^ 1;
                        q.push(v);
                    } else if (color[v] == color[u]) {
                        ok = false;
                    }
                }
            }
            CHECK(ok == g.bipartite());
        }
}

TEST_CASE("necessary conditions") {
    auto g10 = make_theta(1, 2, 7);
    CHECK_FALSE(necessary_conditions(g10, 5)); // 5*4 = 0 mod 20 but 5 < 9
    CHECK(necessary_conditions(make_theta(2, 4, 6), 16));
    CHECK(necessary_conditions(g10, 1));
    CHECK(necessary_conditions(g10, 0));
    CHECK(necessary_conditions(g10, 16));
    CHECK_FALSE(necessary_conditions(g10, 10));
}

TEST_CASE("spectrum membership per edge count") {
    CHECK_FALSE(spectrum_membership(make_theta(4, 5, 6), 10));
    CHECK(spectrum_membership(make_theta(1, 4, 6), 22));
    CHECK(spectrum_membership(make_theta(2, 5, 7), 21));
    CHECK_FALSE(spectrum_membership(make_theta(1, 2, 7), 5));
    CHECK_FALSE(spectrum_membership(make_theta(2, 4, 6), 9));
    CHECK_FALSE(spectrum_membership(make_theta(2, 5, 7), 8));
    CHECK(spectrum_membership(make_theta(1, 2, 7), 0));
    CHECK(spectrum_membership(make_theta(1, 2, 7), 1));
    CHECK_THROWS_AS(spectrum_membership(make_theta(3, 3, 3), 10), UnsupportedEdgeCount);

    // membership implies the counting conditions
    for (int e = 10; e <= 15; ++e)
        for (const auto& g : enumerate_thetas(e)) {
            for (long long n = 0; n <= 10000; ++n)
                if (spectrum_membership(g, n)) {
                    REQUIRE(necessary_conditions(g, n));
                }
        }
}

TEST_CASE("copy counts over hosts") {
    CHECK(copy_counts(10, HostGraph::complete(20)) == 19);
    CHECK(copy_counts(15, HostGraph::multipartite_residue(3, 15)) == 5);
    {
        std::vector<std::vector<Point>> parts;
        Point off = 0;
        for (int sz : {8, 8, 8, 24}) {
            std::vector<Point> p;
            for (int i = 0; i < sz; ++i) p.push_back(off + i);
            off += sz;
            parts.push_back(p);
        }
        CHECK(copy_counts(12, HostGraph::multipartite(parts)) == 64);
    }
    CHECK_THROWS_AS(copy_counts(10, HostGraph::complete(6)), NotDivisible);
}

TEST_CASE("host graph basics") {
    auto k20 = HostGraph::complete(20);
    CHECK(k20.edge_count() == 190);
    CHECK(k20.to_string() == "K(20)");
    CHECK(k20.edge_in_universe(0, 19));
    CHECK_FALSE(k20.edge_in_universe(3, 3));

    auto m = HostGraph::multipartite_residue(3, 30);
    CHECK(m.edge_count() == 300);
    CHECK(m.to_string() == "K(10,10,10)");
    CHECK_FALSE(m.edge_in_universe(0, 3));
    CHECK(m.edge_in_universe(0, 1));
    CHECK(m.sorted_sizes() == std::vector<int>{10, 10, 10});
}
