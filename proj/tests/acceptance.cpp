// acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure
#include <chrono>
#include <cstdlib>
#include <iostream>
#include <random>

#include "theta/constructor.hpp"

using namespace theta;
using Clock = std::chrono::steady_clock;

namespace {

int failures = 0;

void report(int criterion, bool pass, const std::string& detail) {
    std::cout << "criterion " << criterion << ": " << (pass ? "PASS" : "FAIL") << " - " << detail
              << "\n"
              << std::flush;
    if (!pass) ++failures;
}

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::filesystem::path data_dir() {
#ifdef THETA_DATA_DIR
    return THETA_DATA_DIR;
#else
    return "data/catalogue";
#endif
}

std::filesystem::path cache_dir() {
    if (const char* env = std::getenv("THETA_CACHE_DIR")) return env;
    return std::filesystem::temp_directory_path() / "theta-acceptance-cache";
}

HostGraph host_of(const std::vector<int>& sizes) {
    if (sizes.size() == 1) return HostGraph::complete(sizes[0]);
    std::vector<std::vector<Point>> parts;
    Point off = 0;
    for (int sz : sizes) {
        std::vector<Point> p;
        for (int i = 0; i < sz; ++i) p.push_back(off + i);
        off += sz;
        parts.push_back(p);
    }
    return HostGraph::multipartite(parts);
}

// criterion 1: every transcribed entry verifies with exact counts, quickly
void criterion_catalogue(const Catalogue& cat) {
    auto t0 = Clock::now();
    long long checked = 0;
    std::string bad;

    // the required hosts must be present with the right per-host design counts
    struct Want {
        std::vector<int> sizes;
        int e;
        long long designs;
    };
    std::vector<Want> wants = {
        {{20}, 10, 7},   {{24}, 12, 11},  {{30}, 15, 12},  {{16}, 10, 7},   {{25}, 10, 7},
        {{36}, 10, 5},   {{40}, 10, 5},   {{41}, 10, 5},   {{45}, 10, 5},   {{56}, 10, 5},
        {{65}, 10, 5},   {{5, 10}, 10, 2}, {{10, 10, 10}, 10, 5}, {{5, 5, 5, 5}, 10, 5},
        {{20, 20, 20, 25}, 10, 5}, {{5, 5, 5, 5, 5}, 10, 5}, {{5, 5, 5, 5, 15}, 10, 5},
        {{5, 5, 5, 5, 20}, 10, 5}};
    for (const auto& w : wants) {
        HostGraph host = host_of(w.sizes);
        long long found = 0;
        for (const auto& g : enumerate_thetas(w.e))
            if (cat.contains(g, host)) ++found;
        if (found != w.designs) {
            bad = host.to_string() + " has " + std::to_string(found) + " designs, want " +
                  std::to_string(w.designs);
            break;
        }
    }

    if (bad.empty())
        for (const auto& entry : cat.entries()) {
            const auto& d = entry.decomposition;
            auto cert = verify_decomposition(d);
            long long want = copy_counts(d.theta.edge_count(), d.host);
            ++checked;
            if (!cert.accept || !cert.violations.empty() || cert.block_count != want) {
                bad = d.theta.to_string() + " on " + d.host.to_string();
                break;
            }
        }
    double secs = seconds_since(t0);
    report(1, bad.empty() && secs < 5.0,
           bad.empty() ? std::to_string(checked) + " entries verified in " +
                             std::to_string(secs) + " s"
                       : bad);
}

void criterion_enumeration() {
    const long long want_counts[6] = {7, 9, 11, 13, 15, 18};
    const long long want_bip[6] = {2, 3, 3, 4, 4, 6};
    bool ok = true;
    std::string detail;
    for (int e = 10; e <= 15; ++e) {
        auto list = enumerate_thetas(e);
        long long bip = 0;
        for (const auto& g : list)
            if (g.bipartite()) ++bip;
        long long count = static_cast<long long>(list.size());
        if (count != want_counts[e - 10] || bip != want_bip[e - 10] ||
            count != theta_count_closed_form(e) || bip != bipartite_count_closed_form(e)) {
            ok = false;
            detail = "mismatch at e=" + std::to_string(e);
            break;
        }
    }
    report(2, ok, ok ? "counts (7,9,11,13,15,18) and bipartite (2,3,3,4,4,6) match" : detail);
}

void criterion_spectrum(Constructor& ctor) {
    auto t0 = Clock::now();
    long long built = 0, refused = 0;
    std::string bad;
    for (int e = 10; e <= 15 && bad.empty(); ++e)
        for (const auto& g : enumerate_thetas(e)) {
            for (long long n = 0; n <= 150; ++n) {
                if (spectrum_membership(g, n)) {
                    try {
                        auto d = ctor.construct(g, n);
                        long long want = n <= 1 ? 0 : n * (n - 1) / (2 * e);
                        if (static_cast<long long>(d.base_blocks.size()) != want) {
                            bad = "block count off for " + g.to_string() + " n=" +
                                  std::to_string(n);
                            break;
                        }
                        ++built;
                    } catch (const std::exception& ex) {
                        bad = g.to_string() + " n=" + std::to_string(n) + ": " + ex.what();
                        break;
                    }
                } else if (n >= 2) {
                    // the refusal must be explained by counting or by the
                    // small exceptions of the settled spectra
                    bool counting = !necessary_conditions(g, n);
                    bool exception = (e == 10 && n == 5) || (e == 12 && n == 9) ||
                                     (e == 14 && n == 8) || (e == 15 && (n == 6 || n == 10));
                    if (!counting && !exception) {
                        bad = "unexplained refusal at " + g.to_string() + " n=" +
                              std::to_string(n);
                        break;
                    }
                    ++refused;
                }
            }
            if (!bad.empty()) break;
        }
    double secs = seconds_since(t0);
    report(3, bad.empty() && secs < 600.0,
           bad.empty() ? std::to_string(built) + " designs constructed+verified, " +
                             std::to_string(refused) + " refusals explained, " +
                             std::to_string(secs) + " s"
                       : bad);
}

void criterion_coverage_laws() {
    auto a = coverage_law_table2(5, 0, 2000);
    auto b = coverage_law_table2(7, 1, 2000);
    auto c = coverage_law_table3(2000);
    auto d = coverage_law_table4(2000);
    bool ok = a.holds && b.holds && c.holds && d.holds;
    report(4, ok,
           ok ? "row unions + hypotheses + patches tile the residues up to 2000"
              : "a coverage law fails");
}

void criterion_search_regression(const std::filesystem::path& cache) {
    auto t0 = Clock::now();
    std::string bad;
    long long found = 0;
    std::filesystem::remove_all(cache / "regression" / "derived");
    for (int e : {10, 11}) {
        int n = 2 * e + 1;
        for (const auto& g : enumerate_thetas(e)) {
            SearchProblem p;
            p.theta = g;
            p.host = HostGraph::complete(n);
            p.action = GroupAction({WheelSegment{0, n, 1}}, {});
            p.developed_count = 1;
            p.fixed_count = 0;
            p.seed = default_seed(p); // problem-hash seed, recorded in the file
            try {
                auto d = search(p);
                append_derived(cache / "regression", d, p.seed, p.budget);
                ++found;
            } catch (const std::exception& ex) {
                bad = g.to_string() + ": " + ex.what();
                break;
            }
        }
        if (!bad.empty()) break;
    }
    if (bad.empty()) {
        // the derived catalogue must re-verify on load
        for (int e : {10, 11}) {
            auto entries = parse_catalogue_file(cache / "regression" / "derived" /
                                                ("theta" + std::to_string(e) + "_derived.cat"));
            for (const auto& entry : entries)
                if (!verify_decomposition(entry.decomposition).accept) {
                    bad = "derived entry failed re-verification";
                    break;
                }
        }
    }
    report(5, bad.empty() && found == 16,
           bad.empty() ? "16/16 cyclic designs found and re-verified from the derived catalogue (" +
                             std::to_string(seconds_since(t0)) + " s)"
                       : bad);
}

void criterion_oracle(const Catalogue& cat) {
    auto t0 = Clock::now();
    std::string bad;
    for (const auto& entry : cat.entries()) {
        if (verify_decomposition(entry.decomposition).accept !=
            oracle_verify(entry.decomposition).accept) {
            bad = "disagreement on " + entry.source;
            break;
        }
    }
    std::mt19937_64 rng(0xACCE97);
    long long mutations = 0;
    if (bad.empty())
        for (int iter = 0; iter < 1000; ++iter) {
            const auto& base = cat.entries()[rng() % cat.entries().size()].decomposition;
            Decomposition m = base;
            auto& blk = m.base_blocks[rng() % m.base_blocks.size()];
            size_t pos = rng() % blk.vertices.size();
            for (int tries = 0; tries < 64; ++tries) {
                Point cand = static_cast<Point>(rng() % static_cast<uint64_t>(base.host.points()));
                if (std::find(blk.vertices.begin(), blk.vertices.end(), cand) ==
                    blk.vertices.end()) {
                    blk.vertices[pos] = cand;
                    break;
                }
            }
            ++mutations;
            if (verify_decomposition(m).accept != oracle_verify(m).accept) {
                bad = "disagreement on a mutation";
                break;
            }
        }
    double secs = seconds_since(t0);
    report(6, bad.empty() && secs < 30.0,
           bad.empty() ? "agreement on all entries and " + std::to_string(mutations) +
                             " mutations in " + std::to_string(secs) + " s"
                       : bad);
}

void criterion_mutation_kill(const Catalogue& cat) {
    std::mt19937_64 rng(0x5EED);
    long long killed = 0, counterexamples = 0, unexplained = 0;
    for (int sampled = 0; sampled < 500;) {
        const auto& base = cat.entries()[rng() % cat.entries().size()].decomposition;
        Decomposition m = base;
        auto& blk = m.base_blocks[rng() % m.base_blocks.size()];
        size_t pos = rng() % blk.vertices.size();
        Point old = blk.vertices[pos];
        for (int tries = 0; tries < 64; ++tries) {
            Point cand = static_cast<Point>(rng() % static_cast<uint64_t>(base.host.points()));
            if (std::find(blk.vertices.begin(), blk.vertices.end(), cand) == blk.vertices.end()) {
                blk.vertices[pos] = cand;
                break;
            }
        }
        if (blk.vertices[pos] == old) continue; // did not find a replacement this draw
        ++sampled;
        auto cert = verify_decomposition(m);
        bool named = false;
        for (const auto& v : cert.violations)
            if (v.kind == ViolationKind::DuplicateEdge || v.kind == ViolationKind::MissingEdge ||
                v.kind == ViolationKind::WithinPartEdge)
                named = true;
        if (!cert.accept && named) {
            ++killed;
        } else if (cert.accept && oracle_verify(m).accept) {
            // the mutation produced another valid design: a logged
            // counterexample, not a verifier miss (both routes accept it)
            ++counterexamples;
            std::cout << "  counterexample: " << m.theta.to_string() << " on "
                      << m.host.to_string() << ", vertex " << old << " -> "
                      << blk.vertices[pos] << " still partitions the host\n";
        } else {
            ++unexplained;
        }
    }
    report(7, unexplained == 0,
           std::to_string(killed) + "/" + std::to_string(killed + counterexamples + unexplained) +
               " mutations rejected with a named edge violation" +
               (counterexamples
                    ? ", " + std::to_string(counterexamples) +
                          " produced verified alternative designs (logged counterexamples)"
                    : "") +
               (unexplained ? ", " + std::to_string(unexplained) + " UNEXPLAINED" : ""));
}

} // namespace

int main() {
    Catalogue cat;
    cat.load_directory(data_dir());
    criterion_catalogue(cat); // shipped entries only, before any derived load

    GddProvider gdds(cache_dir() / "gdd");
    load_derived(cat, cache_dir());
    Constructor ctor(cat, gdds, cache_dir());

    criterion_enumeration();
    criterion_spectrum(ctor);
    criterion_coverage_laws();
    criterion_search_regression(cache_dir());
    criterion_oracle(cat);
    criterion_mutation_kill(cat);

    std::cout << (failures == 0 ? "all criteria PASS" : std::to_string(failures) + " criteria FAIL")
              << "\n";
    return failures == 0 ? 0 : 1;
}
