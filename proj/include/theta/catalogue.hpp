#pragma once

#include <cctype>
#include <filesystem>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "theta/errors.hpp"
#include "theta/group_action.hpp"

namespace theta {

struct CatalogueEntry {
    Decomposition decomposition;
    std::string source;
};

namespace detail {

inline std::string strip(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

inline std::vector<int> parse_ints(const std::string& s, int line) {
    std::vector<int> out;
    std::istringstream is(s);
    std::string tok;
    while (is >> tok) {
        try {
            size_t used = 0;
            int v = std::stoi(tok, &used);
            if (used != tok.size()) throw std::invalid_argument(tok);
            out.push_back(v);
        } catch (const std::exception&) {
            throw SyntaxError(line, "expected integer, got '" + tok + "'");
        }
    }
    return out;
}

// "(0..19 +4),(20..24 +1)"
inline std::vector<WheelSegment> parse_segments(const std::string& s, int line) {
    std::vector<WheelSegment> segs;
    size_t pos = 0;
    while (pos < s.size()) {
        size_t open = s.find('(', pos);
        if (open == std::string::npos) break;
        size_t close = s.find(')', open);
        if (close == std::string::npos) throw SyntaxError(line, "unbalanced '(' in action");
        std::string body = s.substr(open + 1, close - open - 1);
        int lo, hi, step;
        char d1, d2, plus;
        std::istringstream is(body);
        if (!(is >> lo >> d1 >> d2 >> hi >> plus >> step) || d1 != '.' || d2 != '.' || plus != '+')
            throw SyntaxError(line, "bad segment '" + body + "', want 'lo..hi +step'");
        if (hi < lo || step < 0 || step > hi - lo)
            throw SyntaxError(line, "bad segment range '" + body + "'");
        segs.push_back(WheelSegment{lo, hi - lo + 1, step});
        pos = close + 1;
    }
    if (segs.empty()) throw SyntaxError(line, "empty action");
    return segs;
}

} // namespace detail

// Line-oriented catalogue format ('#' comments):
//   entry theta(1,2,7) host K(20)
//   act: (0..19 +4)
//   developed: 3
//   block: 4 17 0 9 7 1 12 15 13
//   end
// Multipartite hosts either append "parts residue-mod r" to the entry line
// or list every part with "part:" lines. "fix:" names fixed points of the
// action; with no "act:" line the action is the identity.
inline std::vector<CatalogueEntry> parse_catalogue(std::istream& in,
                                                   const std::string& origin = "<stream>") {
    std::vector<CatalogueEntry> entries;

    struct Pending {
        ThetaGraph theta;
        std::vector<int> host_sizes;
        int residue_mod = 0;
        std::vector<std::vector<Point>> parts;
        std::optional<std::vector<WheelSegment>> segments;
        std::vector<Point> fixed;
        std::optional<int> developed;
        std::vector<std::vector<Point>> blocks;
        std::string source;
        int header_line = 0;
    };
    std::optional<Pending> cur;

    auto finish = [&]() {
        Pending& p = *cur;
        int n = 0;
        for (int s : p.host_sizes) n += s;

        HostGraph host;
        if (p.host_sizes.size() == 1 && p.residue_mod == 0 && p.parts.empty()) {
            host = HostGraph::complete(n);
        } else if (p.residue_mod > 0) {
            if (static_cast<int>(p.host_sizes.size()) != p.residue_mod)
                throw SyntaxError(p.header_line, "residue-mod count differs from host part count");
            host = HostGraph::multipartite_residue(p.residue_mod, n);
        } else {
            if (p.parts.size() != p.host_sizes.size())
                throw SyntaxError(p.header_line, "expected " + std::to_string(p.host_sizes.size()) +
                                                     " part: lines, got " + std::to_string(p.parts.size()));
            for (size_t i = 0; i < p.parts.size(); ++i)
                if (static_cast<int>(p.parts[i].size()) != p.host_sizes[i])
                    throw SyntaxError(p.header_line, "part " + std::to_string(i) + " size mismatch");
            try {
                host = HostGraph::multipartite(p.parts);
            } catch (const UnknownPoint& e) {
                throw SyntaxError(p.header_line, e.what());
            }
        }
        if (!host.is_complete()) {
            auto sz = host.part_sizes();
            if (sz != p.host_sizes) throw SyntaxError(p.header_line, "part sizes disagree with host label");
        }

        GroupAction action;
        try {
            if (p.segments)
                action = GroupAction(*p.segments, p.fixed);
            else
                action = GroupAction::identity(n);
        } catch (const UnknownPoint& e) {
            throw SyntaxError(p.header_line, e.what());
        }
        if (action.points() != n)
            throw SyntaxError(p.header_line, "action covers " + std::to_string(action.points()) +
                                                 " points, host has " + std::to_string(n));

        std::vector<ThetaBlock> blocks;
        for (const auto& verts : p.blocks)
            blocks.push_back(ThetaBlock{p.theta, verts});
        int developed = p.developed.value_or(static_cast<int>(blocks.size()));
        if (developed < 0 || developed > static_cast<int>(blocks.size()))
            throw SyntaxError(p.header_line, "developed count out of range");

        entries.push_back(CatalogueEntry{
            Decomposition{p.theta, std::move(host), std::move(action), std::move(blocks), developed},
            p.source.empty() ? origin + ":" + std::to_string(p.header_line) : p.source});
        cur.reset();
    };

    std::string raw;
    int lineno = 0;
    while (std::getline(in, raw)) {
        ++lineno;
        if (auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
        std::string line = detail::strip(raw);
        if (line.empty()) continue;

        if (line.rfind("entry ", 0) == 0) {
            if (cur) throw SyntaxError(lineno, "entry inside entry (missing 'end')");
            Pending p;
            p.header_line = lineno;
            int a, b, c;
            char ch;
            std::istringstream is(line.substr(6));
            std::string word;
            if (!(is >> word) || word.rfind("theta(", 0) != 0)
                throw SyntaxError(lineno, "expected theta(a,b,c)");
            {
                std::istringstream ts(word.substr(6));
                if (!(ts >> a >> ch >> b >> ch >> c >> ch) || ch != ')')
                    throw SyntaxError(lineno, "bad theta '" + word + "'");
            }
            try {
                p.theta = make_theta(a, b, c);
            } catch (const InvalidTheta& e) {
                throw SyntaxError(lineno, e.what());
            }
            if (!(is >> word) || word != "host") throw SyntaxError(lineno, "expected 'host'");
            if (!(is >> word) || word.rfind("K(", 0) != 0 || word.back() != ')')
                throw SyntaxError(lineno, "expected host K(...)");
            {
                std::istringstream hs(word.substr(2, word.size() - 3));
                std::string num;
                while (std::getline(hs, num, ',')) {
                    try {
                        p.host_sizes.push_back(std::stoi(num));
                    } catch (const std::exception&) {
                        throw SyntaxError(lineno, "bad host size '" + num + "'");
                    }
                }
            }
            if (p.host_sizes.empty()) throw SyntaxError(lineno, "empty host");
            if (is >> word) {
                if (word != "parts") throw SyntaxError(lineno, "unexpected '" + word + "'");
                std::string mode;
                int r;
                if (!(is >> mode >> r) || mode != "residue-mod" || r < 1)
                    throw SyntaxError(lineno, "expected 'parts residue-mod r'");
                p.residue_mod = r;
            }
            cur = std::move(p);
            continue;
        }

        if (!cur) throw SyntaxError(lineno, "expected 'entry', got '" + line + "'");

        if (line == "end") {
            finish();
        } else if (line.rfind("part:", 0) == 0) {
            cur->parts.push_back(detail::parse_ints(line.substr(5), lineno));
        } else if (line.rfind("act:", 0) == 0) {
            cur->segments = detail::parse_segments(line.substr(4), lineno);
        } else if (line.rfind("fix:", 0) == 0) {
            auto f = detail::parse_ints(line.substr(4), lineno);
            cur->fixed.insert(cur->fixed.end(), f.begin(), f.end());
        } else if (line.rfind("developed:", 0) == 0) {
            auto v = detail::parse_ints(line.substr(10), lineno);
            if (v.size() != 1) throw SyntaxError(lineno, "developed: wants one integer");
            cur->developed = v[0];
        } else if (line.rfind("source:", 0) == 0) {
            cur->source = detail::strip(line.substr(7));
        } else if (line.rfind("block:", 0) == 0) {
            auto verts = detail::parse_ints(line.substr(6), lineno);
            int n = 0;
            for (int s : cur->host_sizes) n += s;
            for (int v : verts)
                if (v < 0 || v >= n)
                    throw PointOutOfRange(lineno, "point " + std::to_string(v) + " outside host " +
                                                      std::to_string(n));
            if (static_cast<int>(verts.size()) != cur->theta.vertex_count())
                throw ArityMismatch(lineno, cur->theta.to_string() + " block needs " +
                                                std::to_string(cur->theta.vertex_count()) +
                                                " vertices, got " + std::to_string(verts.size()));
            cur->blocks.push_back(verts);
        } else {
            throw SyntaxError(lineno, "unrecognized line '" + line + "'");
        }
    }
    if (cur) throw SyntaxError(lineno, "unterminated entry (missing 'end')");
    return entries;
}

inline std::vector<CatalogueEntry> parse_catalogue_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw SyntaxError(0, "cannot open " + path.string());
    return parse_catalogue(in, path.filename().string());
}

inline void serialize_entry(const CatalogueEntry& e, std::ostream& out) {
    {
        const auto& d = e.decomposition;
        out << "entry " << d.theta.to_string() << " host " << d.host.to_string();
        bool explicit_parts = false;
        if (!d.host.is_complete()) {
            if (d.host.residue_mod() > 0)
                out << " parts residue-mod " << d.host.residue_mod();
            else
                explicit_parts = true;
        }
        out << "\n";
        if (explicit_parts)
            for (const auto& part : d.host.parts()) {
                out << "part:";
                for (Point p : part) out << " " << p;
                out << "\n";
            }
        if (!e.source.empty()) out << "source: " << e.source << "\n";
        if (!d.action.is_identity()) {
            out << "act: " << d.action.to_string() << "\n";
            if (!d.action.fixed_points().empty()) {
                out << "fix:";
                for (Point p : d.action.fixed_points()) out << " " << p;
                out << "\n";
            }
        }
        if (d.developed_count != static_cast<int>(d.base_blocks.size()))
            out << "developed: " << d.developed_count << "\n";
        for (const auto& b : d.base_blocks) {
            out << "block:";
            for (Point v : b.vertices) out << " " << v;
            out << "\n";
        }
        out << "end\n";
    }
}

inline void serialize(const std::vector<CatalogueEntry>& entries, std::ostream& out) {
    out << "# theta-graph decomposition catalogue\n";
    for (const auto& e : entries) {
        out << "\n";
        serialize_entry(e, out);
    }
}

inline std::string serialize(const std::vector<CatalogueEntry>& entries) {
    std::ostringstream os;
    serialize(entries, os);
    return os.str();
}

// in-memory index over loaded entries, keyed by (theta, sorted part sizes)
class Catalogue {
public:
    void add(CatalogueEntry entry) {
        auto key = make_key(entry.decomposition.theta, entry.decomposition.host);
        if (index_.count(key))
            throw SyntaxError(0, "duplicate catalogue entry for " +
                                     entry.decomposition.theta.to_string() + " on " +
                                     entry.decomposition.host.to_string());
        index_[key] = entries_.size();
        entries_.push_back(std::move(entry));
    }

    void load_file(const std::filesystem::path& path) {
        for (auto& e : parse_catalogue_file(path)) add(std::move(e));
    }

    // loads every *.cat in the directory, in name order
    void load_directory(const std::filesystem::path& dir) {
        namespace fs = std::filesystem;
        if (!fs::exists(dir)) return;
        std::vector<fs::path> files;
        for (const auto& de : fs::directory_iterator(dir))
            if (de.is_regular_file() && de.path().extension() == ".cat") files.push_back(de.path());
        std::sort(files.begin(), files.end());
        for (const auto& f : files) load_file(f);
    }

    const CatalogueEntry& lookup(const ThetaGraph& theta, const HostGraph& host) const {
        auto it = index_.find(make_key(theta, host));
        if (it == index_.end())
            throw NotFound("no catalogue entry for " + theta.to_string() + " on " + host.to_string());
        return entries_[it->second];
    }

    bool contains(const ThetaGraph& theta, const HostGraph& host) const {
        return index_.count(make_key(theta, host)) != 0;
    }

    const std::vector<CatalogueEntry>& entries() const { return entries_; }

private:
    using Key = std::pair<ThetaGraph, std::vector<int>>;
    static Key make_key(const ThetaGraph& theta, const HostGraph& host) {
        return {theta, host.sorted_sizes()};
    }

    std::vector<CatalogueEntry> entries_;
    std::map<Key, size_t> index_;
};

} // namespace theta
