#pragma once

#include <numeric>
#include <string>
#include <vector>

#include "theta/errors.hpp"
#include "theta/host_graph.hpp"
#include "theta/theta_graph.hpp"

namespace theta {

// residue wheel on the contiguous range [start, start+length):
// x -> start + ((x - start + step) mod length)
struct WheelSegment {
    Point start = 0;
    int length = 1;
    int step = 0;

    bool contains(Point p) const { return p >= start && p < start + length; }
    Point map(Point p) const { return start + (p - start + step) % length; }
    long long orbit_length() const {
        int s = step % length;
        return s == 0 ? 1 : length / std::gcd(s, length);
    }

    bool operator==(const WheelSegment&) const = default;
};

// a point permutation given as disjoint residue wheels plus fixed points;
// together they must cover 0..points-1
class GroupAction {
public:
    GroupAction() = default;

    GroupAction(std::vector<WheelSegment> segments, std::vector<Point> fixed)
        : segments_(std::move(segments)), fixed_(std::move(fixed)) {
        int n = 0;
        for (const auto& s : segments_) n = std::max(n, s.start + s.length);
        for (Point p : fixed_) n = std::max(n, p + 1);
        std::vector<char> seen(n, 0);
        auto mark = [&](Point p) {
            if (p < 0 || seen[p]) throw UnknownPoint("action covers point " + std::to_string(p) + " twice");
            seen[p] = 1;
        };
        for (const auto& s : segments_) {
            if (s.length < 1 || s.step < 0 || s.step >= s.length)
                throw UnknownPoint("bad wheel segment");
            for (Point p = s.start; p < s.start + s.length; ++p) mark(p);
        }
        for (Point p : fixed_) mark(p);
        for (Point p = 0; p < n; ++p)
            if (!seen[p]) throw UnknownPoint("action misses point " + std::to_string(p));
        points_ = n;
    }

    static GroupAction identity(int n) {
        if (n == 0) return GroupAction{};
        return GroupAction({WheelSegment{0, n, 0}}, {});
    }

    int points() const { return points_; }
    const std::vector<WheelSegment>& segments() const { return segments_; }
    const std::vector<Point>& fixed_points() const { return fixed_; }

    Point apply(Point p) const {
        for (const auto& s : segments_)
            if (s.contains(p)) return s.map(p);
        for (Point f : fixed_)
            if (f == p) return p;
        throw UnknownPoint("point " + std::to_string(p) + " outside the action's point set");
    }

    // least t >= 1 with t-fold application the identity
    long long order() const {
        long long r = 1;
        for (const auto& s : segments_) r = std::lcm(r, s.orbit_length());
        return r;
    }

    bool is_identity() const { return order() == 1; }

    std::string to_string() const {
        std::string s;
        for (const auto& seg : segments_) {
            if (seg.step % seg.length == 0) continue;
            if (!s.empty()) s += ",";
            s += "(" + std::to_string(seg.start) + ".." +
                 std::to_string(seg.start + seg.length - 1) + " +" + std::to_string(seg.step) + ")";
        }
        if (s.empty()) s = "identity";
        return s;
    }

    bool operator==(const GroupAction&) const = default;

private:
    std::vector<WheelSegment> segments_;
    std::vector<Point> fixed_;
    int points_ = 0;
};

// base blocks plus the action that develops them: the first developed_count
// blocks are expanded through the full orbit, the rest appear exactly once
struct Decomposition {
    ThetaGraph theta;
    HostGraph host;
    GroupAction action;
    std::vector<ThetaBlock> base_blocks;
    int developed_count = 0;
};

inline long long expanded_count(const Decomposition& d) {
    return d.developed_count * d.action.order() +
           (static_cast<long long>(d.base_blocks.size()) - d.developed_count);
}

inline std::vector<ThetaBlock> develop(const Decomposition& d) {
    std::vector<ThetaBlock> out;
    out.reserve(static_cast<size_t>(expanded_count(d)));
    long long ord = d.action.order();
    for (int i = 0; i < static_cast<int>(d.base_blocks.size()); ++i) {
        ThetaBlock cur = d.base_blocks[i];
        if (i < d.developed_count) {
            for (long long t = 0; t < ord; ++t) {
                out.push_back(cur);
                for (auto& v : cur.vertices) v = d.action.apply(v);
            }
        } else {
            out.push_back(cur);
        }
    }
    return out;
}

} // namespace theta
