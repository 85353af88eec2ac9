#pragma once

#include <algorithm>
#include <compare>
#include <string>
#include <vector>

#include "theta/errors.hpp"

namespace theta {

using Point = int;
using Edge = std::pair<Point, Point>; // normalized u < v

inline Edge make_edge(Point u, Point v) {
    return u < v ? Edge{u, v} : Edge{v, u};
}

// Theta(a,b,c): two degree-3 vertices joined by three internally disjoint
// paths of lengths a <= b <= c, with b >= 2. a+b+c edges, a+b+c-1 vertices.
struct ThetaGraph {
    int a = 1, b = 2, c = 2;

    int edge_count() const { return a + b + c; }
    int vertex_count() const { return a + b + c - 1; }
    // bipartite exactly when the three path lengths share a parity
    bool bipartite() const { return (a % 2) == (b % 2) && (b % 2) == (c % 2); }

    auto operator<=>(const ThetaGraph&) const = default;

    std::string to_string() const {
        return "theta(" + std::to_string(a) + "," + std::to_string(b) + "," +
               std::to_string(c) + ")";
    }
};

inline ThetaGraph make_theta(int a, int b, int c) {
    if (!(1 <= a && a <= b && b <= c && b >= 2))
        throw InvalidTheta("theta(" + std::to_string(a) + "," + std::to_string(b) + "," +
                           std::to_string(c) + "): need 1 <= a <= b <= c and b >= 2");
    return ThetaGraph{a, b, c};
}

// all (a,b,c) with a+b+c = e, in lexicographic order
inline std::vector<ThetaGraph> enumerate_thetas(int e) {
    std::vector<ThetaGraph> out;
    for (int a = 1; 3 * a <= e; ++a)
        for (int b = std::max(a, 2); 2 * b <= e - a; ++b) {
            int c = e - a - b;
            if (c >= b) out.push_back(ThetaGraph{a, b, c});
        }
    return out;
}

// closed forms for |enumerate_thetas(e)| and its bipartite sub-count;
// valid for e >= 3
inline long long theta_count_closed_form(int e) {
    return (static_cast<long long>(e) * e - 6) / 12;
}

inline long long bipartite_count_closed_form(int e) {
    // floor(e^2/48 + (e mod 2)(e-8)/8 + 1/2) over a common denominator
    long long num = static_cast<long long>(e) * e + 6LL * (e % 2) * (e - 8) + 24;
    long long q = num / 48;
    if (num % 48 != 0 && num < 0) --q;
    return q;
}

// one copy of a theta graph, encoded as the ordered (a+b+c-1)-tuple of host
// points; v1, v2 are the degree-3 vertices
struct ThetaBlock {
    ThetaGraph theta;
    std::vector<Point> vertices;
};

// the a+b+c edges of a block: three v1->v2 paths through the designated
// tuple segments
inline std::vector<Edge> block_edges(const ThetaBlock& blk) {
    const auto& g = blk.theta;
    const auto& v = blk.vertices;
    if (static_cast<int>(v.size()) != g.vertex_count())
        throw MalformedBlock(g.to_string() + " block has " + std::to_string(v.size()) +
                             " vertices, needs " + std::to_string(g.vertex_count()));
    {
        auto sorted = v;
        std::sort(sorted.begin(), sorted.end());
        if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
            throw MalformedBlock(g.to_string() + " block repeats a vertex");
    }
    std::vector<Edge> edges;
    edges.reserve(g.edge_count());
    auto at = [&](int i) { return v[i - 1]; }; // 1-based tuple positions
    auto path = [&](int first, int last) {
        // v1, v_first, ..., v_last, v2
        Point prev = at(1);
        for (int i = first; i <= last; ++i) {
            edges.push_back(make_edge(prev, at(i)));
            prev = at(i);
        }
        edges.push_back(make_edge(prev, at(2)));
    };
    if (g.a == 1)
        edges.push_back(make_edge(at(1), at(2)));
    else
        path(3, g.a + 1);
    path(g.a + 2, g.a + g.b);
    path(g.a + g.b + 1, g.a + g.b + g.c - 1);
    return edges;
}

// counting necessary conditions for a design of order n:
// n <= 1 or n >= a+b+c-1, and n(n-1) divisible by 2(a+b+c)
inline bool necessary_conditions(const ThetaGraph& g, long long n) {
    if (n < 0) return false;
    if (n > 1 && n < g.vertex_count()) return false;
    return (n * (n - 1)) % (2LL * g.edge_count()) == 0;
}

// settled spectra for 10..15 edges: residues plus the small exceptions
inline bool spectrum_membership(const ThetaGraph& g, long long n) {
    if (n < 0) return false;
    switch (g.edge_count()) {
    case 10: {
        long long r = n % 20;
        return (r == 0 || r == 1 || r == 5 || r == 16) && n != 5;
    }
    case 11:
        return n % 11 <= 1;
    case 12: {
        long long r = n % 24;
        return (r == 0 || r == 1 || r == 9 || r == 16) && n != 9;
    }
    case 13:
        return n % 13 <= 1;
    case 14: {
        long long r = n % 28;
        return (r == 0 || r == 1 || r == 8 || r == 21) && n != 8;
    }
    case 15: {
        long long r = n % 15;
        return (r == 0 || r == 1 || r == 6 || r == 10) && n != 6 && n != 10;
    }
    default:
        throw UnsupportedEdgeCount("spectrum known only for 10..15 edges, got " +
                                   std::to_string(g.edge_count()));
    }
}

} // namespace theta
