#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <sstream>
#include <string>
#include <vector>

#include "theta/gdd.hpp"
#include "theta/group_action.hpp"

namespace theta {

enum class ViolationKind { DuplicateEdge, MissingEdge, WithinPartEdge, MalformedBlock };

inline const char* to_string(ViolationKind k) {
    switch (k) {
    case ViolationKind::DuplicateEdge: return "duplicate-edge";
    case ViolationKind::MissingEdge: return "missing-edge";
    case ViolationKind::WithinPartEdge: return "within-part-edge";
    case ViolationKind::MalformedBlock: return "malformed-block";
    }
    return "?";
}

struct Violation {
    ViolationKind kind;
    Point u = -1, v = -1;      // offending edge, if any
    long long block_index = -1; // offending expanded block, if any
};

// the verifier's verdict with enough detail to audit a rejection
struct Certificate {
    bool accept = false;
    long long block_count = 0;
    long long edge_count = 0; // on accept: the host's edge count
    std::vector<Violation> violations;
};

namespace detail {

constexpr int kMaxViolations = 32;

inline void report(Certificate& cert, Violation v) {
    if (static_cast<int>(cert.violations.size()) < kMaxViolations)
        cert.violations.push_back(v);
}

} // namespace detail

// Accepts iff the developed blocks partition the host's edge universe:
// every host edge covered exactly once, nothing outside the universe.
// All failures land in the certificate; nothing throws.
inline Certificate verify_decomposition(const Decomposition& d) {
    Certificate cert;
    const HostGraph& host = d.host;
    const int n = host.points();
    const long long pair_count = static_cast<long long>(n) * (n - 1) / 2;
    std::vector<uint32_t> coverage(static_cast<size_t>(pair_count), 0);

    bool bad = false;
    std::vector<ThetaBlock> blocks;
    try {
        blocks = develop(d);
    } catch (const std::exception&) {
        // an image block failed structural checks during development
        cert.accept = false;
        detail::report(cert, Violation{ViolationKind::MalformedBlock, -1, -1, -1});
        return cert;
    }
    cert.block_count = static_cast<long long>(blocks.size());

    for (long long bi = 0; bi < cert.block_count; ++bi) {
        std::vector<Edge> edges;
        try {
            edges = block_edges(blocks[static_cast<size_t>(bi)]);
        } catch (const MalformedBlock&) {
            bad = true;
            detail::report(cert, Violation{ViolationKind::MalformedBlock, -1, -1, bi});
            continue;
        }
        bool in_range = true;
        for (const auto& [u, v] : edges)
            if (u < 0 || v >= n) in_range = false;
        if (!in_range) {
            bad = true;
            detail::report(cert, Violation{ViolationKind::MalformedBlock, -1, -1, bi});
            continue;
        }
        for (const auto& [u, v] : edges) {
            if (!host.edge_in_universe(u, v)) {
                bad = true;
                detail::report(cert, Violation{ViolationKind::WithinPartEdge, u, v, bi});
                continue;
            }
            uint32_t& c = coverage[static_cast<size_t>(edge_index(u, v))];
            if (++c == 2) { // first duplicate wins; further hits not re-reported
                bad = true;
                detail::report(cert, Violation{ViolationKind::DuplicateEdge, u, v, bi});
            }
        }
    }

    long long covered = 0;
    for (Point v = 0; v < n; ++v)
        for (Point u = 0; u < v; ++u) {
            uint32_t c = coverage[static_cast<size_t>(edge_index(u, v))];
            if (c > 0) ++covered;
            if (host.edge_in_universe(u, v) && c == 0) {
                bad = true;
                detail::report(cert, Violation{ViolationKind::MissingEdge, u, v, -1});
            }
        }

    cert.edge_count = bad ? covered : host.edge_count();
    cert.accept = !bad;
    return cert;
}

// Independent check of the same property by a different route: flatten the
// development into one edge-index list, sort it, and compare element-wise
// against the sorted edge universe.
inline Certificate oracle_verify(const Decomposition& d) {
    Certificate cert;
    const HostGraph& host = d.host;
    const int n = host.points();

    std::vector<ThetaBlock> blocks;
    try {
        blocks = develop(d);
    } catch (const std::exception&) {
        detail::report(cert, Violation{ViolationKind::MalformedBlock, -1, -1, -1});
        return cert;
    }
    cert.block_count = static_cast<long long>(blocks.size());

    std::vector<long long> got;
    for (long long bi = 0; bi < cert.block_count; ++bi) {
        std::vector<Edge> edges;
        try {
            edges = block_edges(blocks[static_cast<size_t>(bi)]);
        } catch (const MalformedBlock&) {
            detail::report(cert, Violation{ViolationKind::MalformedBlock, -1, -1, bi});
            return cert;
        }
        for (const auto& [u, v] : edges) {
            if (u < 0 || v >= n) {
                detail::report(cert, Violation{ViolationKind::MalformedBlock, -1, -1, bi});
                return cert;
            }
            got.push_back(edge_index(u, v));
        }
    }

    std::vector<long long> want;
    want.reserve(static_cast<size_t>(host.edge_count()));
    for (Point v = 0; v < n; ++v)
        for (Point u = 0; u < v; ++u)
            if (host.edge_in_universe(u, v)) want.push_back(edge_index(u, v));

    std::sort(got.begin(), got.end());
    // want is already sorted by construction

    auto unindex = [](long long idx) {
        Point v = static_cast<Point>((1 + static_cast<long long>(std::sqrt(1.0 + 8.0 * static_cast<double>(idx)))) / 2);
        while (static_cast<long long>(v) * (v - 1) / 2 > idx) --v;
        while (static_cast<long long>(v + 1) * v / 2 <= idx) ++v;
        Point u = static_cast<Point>(idx - static_cast<long long>(v) * (v - 1) / 2);
        return Edge{u, v};
    };

    size_t i = 0, j = 0;
    bool bad = false;
    long long covered = 0;
    while (i < got.size() || j < want.size()) {
        if (j < want.size() && (i == got.size() || want[j] < got[i])) {
            auto [u, v] = unindex(want[j]);
            detail::report(cert, Violation{ViolationKind::MissingEdge, u, v, -1});
            bad = true;
            ++j;
        } else if (i < got.size() && (j == want.size() || got[i] < want[j])) {
            auto [u, v] = unindex(got[i]);
            detail::report(cert, Violation{host.edge_in_universe(u, v) ? ViolationKind::DuplicateEdge
                                                                       : ViolationKind::WithinPartEdge,
                                           u, v, -1});
            bad = true;
            ++i;
        } else { // equal
            ++covered;
            size_t run = 1;
            while (i + run < got.size() && got[i + run] == got[i]) ++run;
            if (run > 1) {
                auto [u, v] = unindex(got[i]);
                detail::report(cert, Violation{ViolationKind::DuplicateEdge, u, v, -1});
                bad = true;
            }
            i += run;
            ++j;
        }
    }
    cert.edge_count = bad ? covered : host.edge_count();
    cert.accept = !bad;
    return cert;
}

// GDD law: cross-group pairs exactly once, within-group pairs never,
// every block size in K
inline Certificate verify_gdd_certificate(const GDD& g) {
    Certificate cert;
    const int n = g.points();
    std::vector<int> group_of(n, -1);
    for (int gi = 0; gi < static_cast<int>(g.groups.size()); ++gi)
        for (Point p : g.groups[gi]) {
            if (p < 0 || p >= n || group_of[p] != -1) {
                detail::report(cert, Violation{ViolationKind::MalformedBlock, p, -1, -1});
                return cert;
            }
            group_of[p] = gi;
        }

    const long long pair_count = static_cast<long long>(n) * (n - 1) / 2;
    std::vector<uint32_t> coverage(static_cast<size_t>(pair_count), 0);
    bool bad = false;
    cert.block_count = static_cast<long long>(g.blocks.size());

    for (long long bi = 0; bi < cert.block_count; ++bi) {
        const auto& blk = g.blocks[static_cast<size_t>(bi)];
        if (std::find(g.K.begin(), g.K.end(), static_cast<int>(blk.size())) == g.K.end()) {
            bad = true;
            detail::report(cert, Violation{ViolationKind::MalformedBlock, -1, -1, bi});
        }
        for (size_t x = 0; x < blk.size(); ++x)
            for (size_t y = x + 1; y < blk.size(); ++y) {
                Point u = blk[x], v = blk[y];
                if (u == v || u < 0 || v < 0 || u >= n || v >= n) {
                    bad = true;
                    detail::report(cert, Violation{ViolationKind::MalformedBlock, u, v, bi});
                    continue;
                }
                if (group_of[u] == group_of[v]) {
                    bad = true;
                    detail::report(cert, Violation{ViolationKind::WithinPartEdge, u, v, bi});
                    continue;
                }
                uint32_t& c = coverage[static_cast<size_t>(edge_index(u, v))];
                if (++c == 2) {
                    bad = true;
                    detail::report(cert, Violation{ViolationKind::DuplicateEdge, u, v, bi});
                }
            }
    }

    long long covered = 0;
    for (Point v = 0; v < n; ++v)
        for (Point u = 0; u < v; ++u) {
            uint32_t c = coverage[static_cast<size_t>(edge_index(u, v))];
            if (c > 0) ++covered;
            if (group_of[u] != group_of[v] && c == 0) {
                bad = true;
                detail::report(cert, Violation{ViolationKind::MissingEdge, u, v, -1});
            }
        }

    cert.edge_count = bad ? covered : g.cross_pair_count();
    cert.accept = !bad;
    return cert;
}

// machine-readable key-value rendering; the CLI mirrors these fields as JSON
inline std::string to_text(const Certificate& cert) {
    std::ostringstream os;
    os << "verdict: " << (cert.accept ? "accept" : "reject") << "\n"
       << "blocks: " << cert.block_count << "\n"
       << "edges: " << cert.edge_count << "\n"
       << "violations: " << cert.violations.size() << "\n";
    for (const auto& v : cert.violations) {
        os << "violation: " << to_string(v.kind);
        if (v.u >= 0) os << " edge " << v.u << "-" << v.v;
        if (v.block_index >= 0) os << " block " << v.block_index;
        os << "\n";
    }
    return os.str();
}

} // namespace theta
