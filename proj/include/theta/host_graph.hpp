#pragma once

#include <numeric>
#include <string>
#include <vector>

#include "theta/errors.hpp"
#include "theta/theta_graph.hpp"

namespace theta {

// edge universe of a decomposition target: complete K_n or complete
// multipartite K_{g1,...,gr}; points are 0..n-1
class HostGraph {
public:
    HostGraph() = default;

    static HostGraph complete(int n) {
        HostGraph h;
        h.n_ = n;
        return h;
    }

    // explicit part lists; they must partition 0..n-1
    static HostGraph multipartite(std::vector<std::vector<Point>> parts) {
        HostGraph h;
        for (const auto& p : parts) h.n_ += static_cast<int>(p.size());
        h.part_of_.assign(h.n_, -1);
        h.parts_ = std::move(parts);
        for (int i = 0; i < static_cast<int>(h.parts_.size()); ++i)
            for (Point p : h.parts_[i]) {
                if (p < 0 || p >= h.n_ || h.part_of_[p] != -1)
                    throw UnknownPoint("part lists do not partition the point set");
                h.part_of_[p] = i;
            }
        return h;
    }

    // part i = { x : x = i (mod r) }
    static HostGraph multipartite_residue(int r, int n) {
        std::vector<std::vector<Point>> parts(r);
        for (Point x = 0; x < n; ++x) parts[x % r].push_back(x);
        HostGraph h = multipartite(std::move(parts));
        h.residue_mod_ = r;
        return h;
    }

    bool is_complete() const { return parts_.empty(); }
    int points() const { return n_; }
    int part_count() const { return is_complete() ? 1 : static_cast<int>(parts_.size()); }
    int part_of(Point p) const {
        if (p < 0 || p >= n_) throw UnknownPoint("point " + std::to_string(p));
        return is_complete() ? 0 : part_of_[p];
    }
    const std::vector<std::vector<Point>>& parts() const { return parts_; }
    int residue_mod() const { return residue_mod_; } // 0 unless residue-built

    std::vector<int> part_sizes() const {
        if (is_complete()) return {n_};
        std::vector<int> s;
        s.reserve(parts_.size());
        for (const auto& p : parts_) s.push_back(static_cast<int>(p.size()));
        return s;
    }

    // canonical identity for lookups: complete order, or sorted part sizes
    std::vector<int> sorted_sizes() const {
        auto s = part_sizes();
        std::sort(s.begin(), s.end());
        return s;
    }

    bool edge_in_universe(Point u, Point v) const {
        if (u == v) return false;
        if (is_complete()) return true;
        return part_of_[u] != part_of_[v];
    }

    long long edge_count() const {
        if (is_complete()) return static_cast<long long>(n_) * (n_ - 1) / 2;
        long long within = 0;
        for (const auto& p : parts_) {
            long long g = static_cast<long long>(p.size());
            within += g * (g - 1) / 2;
        }
        return static_cast<long long>(n_) * (n_ - 1) / 2 - within;
    }

    std::string to_string() const {
        std::string s = "K(";
        if (is_complete()) {
            s += std::to_string(n_);
        } else {
            for (size_t i = 0; i < parts_.size(); ++i) {
                if (i) s += ",";
                s += std::to_string(parts_[i].size());
            }
        }
        return s + ")";
    }

    bool operator==(const HostGraph& o) const {
        return n_ == o.n_ && parts_ == o.parts_;
    }

private:
    int n_ = 0;
    std::vector<std::vector<Point>> parts_; // empty => complete
    std::vector<int> part_of_;
    int residue_mod_ = 0;
};

// dense index of the unordered pair (u,v), u < v
inline long long edge_index(Point u, Point v) {
    if (u > v) std::swap(u, v);
    return static_cast<long long>(v) * (v - 1) / 2 + u;
}

// number of copies of an e-edge graph in a decomposition of the host
inline long long copy_counts(int e, const HostGraph& host) {
    long long edges = host.edge_count();
    if (e <= 0 || edges % e != 0)
        throw NotDivisible(host.to_string() + " has " + std::to_string(edges) +
                           " edges, not divisible by " + std::to_string(e));
    return edges / e;
}

} // namespace theta
