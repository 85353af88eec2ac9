#pragma once

#include <algorithm>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "theta/errors.hpp"
#include "theta/host_graph.hpp"

namespace theta {

// group type vector g1^t1 ... gr^tr, canonicalized descending by group size
struct GddType {
    std::vector<std::pair<int, int>> parts; // (group size, multiplicity)

    GddType() = default;
    GddType(std::initializer_list<std::pair<int, int>> p) : parts(p) { canonicalize(); }

    void canonicalize() {
        std::sort(parts.begin(), parts.end(),
                  [](auto& a, auto& b) { return a.first > b.first; });
        std::vector<std::pair<int, int>> merged;
        for (auto [g, t] : parts) {
            if (t == 0) continue;
            if (!merged.empty() && merged.back().first == g)
                merged.back().second += t;
            else
                merged.emplace_back(g, t);
        }
        parts = std::move(merged);
    }

    static GddType uniform(int g, int t) { return GddType{{g, t}}; }

    // "3^4 5^1"
    static GddType parse(const std::string& s) {
        GddType ty;
        std::istringstream is(s);
        std::string tok;
        while (is >> tok) {
            auto caret = tok.find('^');
            if (caret == std::string::npos) throw SyntaxError(0, "bad type token '" + tok + "'");
            ty.parts.emplace_back(std::stoi(tok.substr(0, caret)), std::stoi(tok.substr(caret + 1)));
        }
        ty.canonicalize();
        return ty;
    }

    int point_count() const {
        int n = 0;
        for (auto [g, t] : parts) n += g * t;
        return n;
    }

    int group_count() const {
        int r = 0;
        for (auto [g, t] : parts) r += t;
        return r;
    }

    // group sizes expanded in canonical order
    std::vector<int> group_sizes() const {
        std::vector<int> out;
        for (auto [g, t] : parts)
            for (int i = 0; i < t; ++i) out.push_back(g);
        return out;
    }

    std::string to_string() const {
        std::string s;
        for (auto [g, t] : parts) {
            if (!s.empty()) s += " ";
            s += std::to_string(g) + "^" + std::to_string(t);
        }
        return s;
    }

    auto operator<=>(const GddType&) const = default;
};

// K-GDD: groups partition the points; blocks (sizes in K) cover every
// cross-group pair exactly once and no within-group pair
struct GDD {
    std::vector<std::vector<Point>> groups;
    std::vector<std::vector<Point>> blocks;
    std::vector<int> K;

    int points() const {
        int n = 0;
        for (const auto& g : groups) n += static_cast<int>(g.size());
        return n;
    }

    GddType type() const {
        std::map<int, int> tally;
        for (const auto& g : groups) ++tally[static_cast<int>(g.size())];
        GddType ty;
        for (auto [g, t] : tally) ty.parts.emplace_back(g, t);
        ty.canonicalize();
        return ty;
    }

    long long cross_pair_count() const {
        long long n = points(), within = 0;
        for (const auto& g : groups) {
            long long s = static_cast<long long>(g.size());
            within += s * (s - 1) / 2;
        }
        return n * (n - 1) / 2 - within;
    }
};

// GDD whose blocks split into parallel classes, each covering every point once
struct ResolvableGDD {
    GDD gdd;
    std::vector<std::vector<int>> classes; // block indices per class
};

// Adjoin new points to a resolvable GDD, one parallel class each: every block
// of the chosen class gains that point, and the new points form a new group.
inline GDD extend_with_group(const ResolvableGDD& r, const std::vector<Point>& new_points,
                             const std::vector<int>& class_of_new) {
    if (new_points.size() != class_of_new.size())
        throw TooManyNewPoints("one class index per new point required");
    if (new_points.size() > r.classes.size())
        throw TooManyNewPoints("more new points than parallel classes");
    {
        auto sorted = class_of_new;
        std::sort(sorted.begin(), sorted.end());
        if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
            throw TooManyNewPoints("class assignment must be injective");
        for (int c : sorted)
            if (c < 0 || c >= static_cast<int>(r.classes.size()))
                throw TooManyNewPoints("class index out of range");
    }

    GDD out = r.gdd;
    for (size_t i = 0; i < new_points.size(); ++i)
        for (int bi : r.classes[static_cast<size_t>(class_of_new[i])])
            out.blocks[static_cast<size_t>(bi)].push_back(new_points[i]);
    if (!new_points.empty()) {
        out.groups.push_back(new_points);
        std::vector<int> K2;
        for (int k : out.K) {
            K2.push_back(k);
            K2.push_back(k + 1);
        }
        std::sort(K2.begin(), K2.end());
        K2.erase(std::unique(K2.begin(), K2.end()), K2.end());
        out.K = std::move(K2);
    }
    return out;
}

// --- cache text format ------------------------------------------------------
//   gdd K(3,4,5) type 1^7        (or: rgdd K(3) type 3^3)
//   group: 0 1
//   block: 0 2 4
//   class: 0 1 2                 (block indices; rgdd only)
//   end

inline void serialize_gdd(const GDD& g, std::ostream& out,
                          const std::vector<std::vector<int>>* classes = nullptr) {
    out << (classes ? "rgdd K(" : "gdd K(");
    for (size_t i = 0; i < g.K.size(); ++i) out << (i ? "," : "") << g.K[i];
    out << ") type " << g.type().to_string() << "\n";
    for (const auto& grp : g.groups) {
        out << "group:";
        for (Point p : grp) out << " " << p;
        out << "\n";
    }
    for (const auto& blk : g.blocks) {
        out << "block:";
        for (Point p : blk) out << " " << p;
        out << "\n";
    }
    if (classes)
        for (const auto& cls : *classes) {
            out << "class:";
            for (int b : cls) out << " " << b;
            out << "\n";
        }
    out << "end\n";
}

inline ResolvableGDD parse_gdd(std::istream& in) {
    ResolvableGDD r;
    std::string line;
    int lineno = 0;
    bool header = false, resolvable = false, done = false;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
        if (line.empty()) continue;
        if (!header) {
            std::istringstream is(line);
            std::string kind, kspec, word, typestr;
            if (!(is >> kind >> kspec >> word) || (kind != "gdd" && kind != "rgdd") || word != "type")
                throw SyntaxError(lineno, "expected 'gdd K(...) type ...'");
            resolvable = kind == "rgdd";
            if (kspec.rfind("K(", 0) != 0 || kspec.back() != ')')
                throw SyntaxError(lineno, "bad K spec '" + kspec + "'");
            std::istringstream ks(kspec.substr(2, kspec.size() - 3));
            std::string num;
            while (std::getline(ks, num, ',')) r.gdd.K.push_back(std::stoi(num));
            std::getline(is, typestr);
            (void)GddType::parse(typestr); // validated against groups below
            header = true;
            continue;
        }
        if (line == "end") {
            done = true;
            break;
        }
        auto nums = [&](size_t off) {
            std::vector<int> v;
            std::istringstream is(line.substr(off));
            int x;
            while (is >> x) v.push_back(x);
            return v;
        };
        if (line.rfind("group:", 0) == 0)
            r.gdd.groups.push_back(nums(6));
        else if (line.rfind("block:", 0) == 0)
            r.gdd.blocks.push_back(nums(6));
        else if (line.rfind("class:", 0) == 0)
            r.classes.push_back(nums(6));
        else
            throw SyntaxError(lineno, "unrecognized line '" + line + "'");
    }
    if (!header || !done) throw SyntaxError(lineno, "truncated design file");
    if (resolvable && r.classes.empty()) throw SyntaxError(lineno, "rgdd without classes");
    return r;
}

} // namespace theta
