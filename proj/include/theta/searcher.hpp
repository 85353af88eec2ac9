#pragma once

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <future>
#include <optional>
#include <random>
#include <thread>
#include <vector>

#include "theta/catalogue.hpp"
#include "theta/verifier.hpp"

namespace theta {

struct SearchBudget {
    int restarts = 64;
    long long steps = 200000; // moves per restart
};

struct SearchProblem {
    ThetaGraph theta;
    HostGraph host;
    GroupAction action;
    int developed_count = 0;
    int fixed_count = 0;
    SearchBudget budget;
    uint64_t seed = 0; // 0: derive from the problem hash
    int jobs = 0;      // 0: hardware concurrency
};

// stable problem hash, used for reproducible default seeds
inline uint64_t default_seed(const SearchProblem& p) {
    std::string s = p.theta.to_string() + "|" + p.host.to_string() + "|" + p.action.to_string() +
                    "|" + std::to_string(p.developed_count) + "|" + std::to_string(p.fixed_count);
    uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h ? h : 1;
}

namespace detail {

inline uint64_t mix_seed(uint64_t seed, uint64_t stream) {
    uint64_t z = seed + 0x9e3779b97f4a7c15ull * (stream + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

// conflict-minimization state for one restart
class SearchState {
public:
    SearchState(const SearchProblem& p, std::mt19937_64& rng)
        : p_(p), rng_(rng), n_(p.host.points()),
          ord_(p.action.order()),
          coverage_(static_cast<size_t>(n_) * (n_ - 1) / 2, 0) {
        universe_.resize(coverage_.size());
        for (Point v = 0; v < n_; ++v)
            for (Point u = 0; u < v; ++u)
                universe_[static_cast<size_t>(edge_index(u, v))] = p.host.edge_in_universe(u, v);
        cost_ = 0;
        for (size_t i = 0; i < universe_.size(); ++i)
            if (universe_[i]) ++cost_; // everything uncovered
        int total = p.developed_count + p.fixed_count;
        blocks_.resize(total);
        touched_.resize(total);
    }

    void randomize_all() {
        for (int i = 0; i < static_cast<int>(blocks_.size()); ++i) assign_random(i);
    }

    void init_from(const std::vector<ThetaBlock>& warm) {
        for (int i = 0; i < static_cast<int>(blocks_.size()); ++i) {
            if (i < static_cast<int>(warm.size()))
                assign(i, warm[static_cast<size_t>(i)].vertices);
            else
                assign_random(i);
        }
    }

    long long cost() const { return cost_; }

    const std::vector<std::vector<Point>>& blocks() const { return blocks_; }

    // one biased conflict-repair move; returns true if the state changed
    bool step() {
        int bi, pos;
        if (!pick_target(bi, pos)) return false;
        auto& verts = blocks_[static_cast<size_t>(bi)];
        Point old = verts[static_cast<size_t>(pos)];
        Point neu = old;
        for (int tries = 0; tries < 32; ++tries) {
            Point cand = static_cast<Point>(rng_() % static_cast<uint64_t>(n_));
            if (std::find(verts.begin(), verts.end(), cand) == verts.end()) {
                neu = cand;
                break;
            }
        }
        if (neu == old) return false;

        long long before = cost_;
        apply_edges(bi, -1);
        verts[static_cast<size_t>(pos)] = neu;
        apply_edges(bi, +1);
        if (cost_ > before) { // strictly-improving and sideways moves only
            apply_edges(bi, -1);
            verts[static_cast<size_t>(pos)] = old;
            apply_edges(bi, +1);
            return false;
        }
        return true;
    }

private:
    // the edge slots a block contributes: orbit images for developed blocks
    struct Touch {
        long long edge = 0;
        int pos1 = 0, pos2 = 0; // tuple positions that generated it
    };

    void compute_touched(int bi, std::vector<Touch>& out) const {
        out.clear();
        const auto& verts = blocks_[static_cast<size_t>(bi)];
        ThetaBlock blk{p_.theta, verts};
        // positions per edge derived once from the path layout
        static thread_local std::vector<std::pair<int, int>> pospairs;
        pospairs.clear();
        {
            const auto& g = p_.theta;
            auto path = [&](int first, int last) {
                int prev = 1;
                for (int i = first; i <= last; ++i) {
                    pospairs.emplace_back(prev, i);
                    prev = i;
                }
                pospairs.emplace_back(prev, 2);
            };
            if (g.a == 1)
                pospairs.emplace_back(1, 2);
            else
                path(3, g.a + 1);
            path(g.a + 2, g.a + g.b);
            path(g.a + g.b + 1, g.a + g.b + g.c - 1);
        }
        bool dev = bi < p_.developed_count;
        long long reps = dev ? ord_ : 1;
        std::vector<Point> cur = verts;
        for (long long t = 0; t < reps; ++t) {
            for (auto [i, j] : pospairs)
                out.push_back(Touch{edge_index(cur[static_cast<size_t>(i - 1)],
                                               cur[static_cast<size_t>(j - 1)]),
                                    i - 1, j - 1});
            if (t + 1 < reps)
                for (auto& v : cur) v = p_.action.apply(v);
        }
    }

    void apply_edges(int bi, int delta) {
        if (delta > 0) compute_touched(bi, touched_[static_cast<size_t>(bi)]);
        for (const auto& t : touched_[static_cast<size_t>(bi)]) {
            uint32_t& c = coverage_[static_cast<size_t>(t.edge)];
            long long before, after;
            if (universe_[static_cast<size_t>(t.edge)]) {
                before = std::llabs(static_cast<long long>(c) - 1);
                c += delta;
                after = std::llabs(static_cast<long long>(c) - 1);
            } else {
                before = c;
                c += delta;
                after = c;
            }
            cost_ += after - before;
        }
    }

    void assign(int bi, const std::vector<Point>& verts) {
        if (!touched_[static_cast<size_t>(bi)].empty()) apply_edges(bi, -1);
        blocks_[static_cast<size_t>(bi)] = verts;
        apply_edges(bi, +1);
    }

    void assign_random(int bi) {
        int k = p_.theta.vertex_count();
        std::vector<Point> verts;
        verts.reserve(static_cast<size_t>(k));
        while (static_cast<int>(verts.size()) < k) {
            Point cand = static_cast<Point>(rng_() % static_cast<uint64_t>(n_));
            if (std::find(verts.begin(), verts.end(), cand) == verts.end()) verts.push_back(cand);
        }
        assign(bi, verts);
    }

    // choose the block and tuple position to mutate, biased toward blocks
    // touching over/under-covered edge slots
    bool pick_target(int& bi, int& pos) {
        if (cost_ == 0) return false;
        int total = static_cast<int>(blocks_.size());
        if ((rng_() & 3) != 0) { // 3/4 of moves repair a concrete violation
            long long m = static_cast<long long>(coverage_.size());
            long long start = static_cast<long long>(rng_() % static_cast<uint64_t>(m));
            long long bad = -1;
            for (long long k = 0; k < m; ++k) {
                long long idx = start + k >= m ? start + k - m : start + k;
                uint32_t c = coverage_[static_cast<size_t>(idx)];
                if (universe_[static_cast<size_t>(idx)] ? c != 1 : c > 0) {
                    bad = idx;
                    break;
                }
            }
            if (bad >= 0) {
                bool under = universe_[static_cast<size_t>(bad)] &&
                             coverage_[static_cast<size_t>(bad)] == 0;
                if (!under) {
                    // over-covered or outside the universe: move a block off it
                    int hits = 0;
                    for (int i = 0; i < total; ++i)
                        for (const auto& t : touched_[static_cast<size_t>(i)])
                            if (t.edge == bad) {
                                ++hits;
                                if (rng_() % static_cast<uint64_t>(hits) == 0) {
                                    bi = i;
                                    pos = (rng_() & 1) ? t.pos1 : t.pos2;
                                }
                            }
                    if (hits > 0) return true;
                }
                // under-covered: shift any block toward it; fall through to random
            }
        }
        bi = static_cast<int>(rng_() % static_cast<uint64_t>(total));
        pos = static_cast<int>(rng_() % static_cast<uint64_t>(p_.theta.vertex_count()));
        return true;
    }

    const SearchProblem& p_;
    std::mt19937_64& rng_;
    int n_;
    long long ord_;
    std::vector<uint32_t> coverage_;
    std::vector<char> universe_;
    std::vector<std::vector<Point>> blocks_;
    std::vector<std::vector<Touch>> touched_;
    long long cost_ = 0;
};

} // namespace detail

// Randomized conflict minimization for base blocks under a prescribed action.
// Deterministic for a fixed seed and budget; the returned decomposition always
// re-verifies. Restarts run in parallel; the lowest-index success wins.
inline Decomposition search_impl(const SearchProblem& p,
                                 const std::vector<ThetaBlock>* warm,
                                 long long* best_cost_out = nullptr) {
    long long want = copy_counts(p.theta.edge_count(), p.host);
    long long have = static_cast<long long>(p.developed_count) * p.action.order() + p.fixed_count;
    if (have != want)
        throw InfeasibleArity("developed*order + fixed = " + std::to_string(have) +
                              ", host needs " + std::to_string(want) + " blocks");
    if (p.theta.vertex_count() > p.host.points())
        throw InfeasibleArity("host too small for a block");
    if (p.action.points() != p.host.points())
        throw InfeasibleArity("action and host point sets differ");
    if (warm) {
        if (static_cast<int>(warm->size()) > p.developed_count + p.fixed_count)
            throw InfeasibleArity("warm start has more blocks than the problem");
        for (const auto& b : *warm)
            if (static_cast<int>(b.vertices.size()) != p.theta.vertex_count())
                throw InfeasibleArity("warm start block arity mismatch");
    }

    uint64_t seed = p.seed ? p.seed : default_seed(p);
    int jobs = p.jobs > 0 ? p.jobs : static_cast<int>(std::thread::hardware_concurrency());
    if (jobs < 1) jobs = 1;

    std::atomic<long long> best_cost{-1};

    auto run_restart = [&](int r) -> std::optional<std::vector<std::vector<Point>>> {
        std::mt19937_64 rng(detail::mix_seed(seed, static_cast<uint64_t>(r)));
        detail::SearchState state(p, rng);
        if (r == 0 && warm)
            state.init_from(*warm);
        else
            state.randomize_all();
        long long best = state.cost();
        long long last_improved = 0;
        const long long stagnation_window = std::max<long long>(2000, p.budget.steps / 8);
        for (long long s = 0; s < p.budget.steps && state.cost() != 0; ++s) {
            state.step();
            if (state.cost() < best) {
                best = state.cost();
                last_improved = s;
            }
            if (s - last_improved > stagnation_window) break; // stagnated: next restart
        }
        long long prev = best_cost.load();
        while ((prev == -1 || best < prev) && !best_cost.compare_exchange_weak(prev, best)) {
        }
        if (state.cost() == 0) return state.blocks();
        return std::nullopt;
    };

    std::optional<std::vector<std::vector<Point>>> found;
    for (int wave = 0; wave * jobs < p.budget.restarts && !found; ++wave) {
        int lo = wave * jobs;
        int hi = std::min(p.budget.restarts, lo + jobs);
        std::vector<std::future<std::optional<std::vector<std::vector<Point>>>>> futs;
        for (int r = lo + 1; r < hi; ++r)
            futs.push_back(std::async(std::launch::async, run_restart, r));
        auto first = run_restart(lo);
        if (first) {
            found = std::move(first); // lowest index in the wave wins
            for (auto& f : futs) f.wait();
        } else {
            for (auto& f : futs) {
                auto res = f.get();
                if (res && !found) found = std::move(res);
            }
        }
    }

    if (best_cost_out) *best_cost_out = best_cost.load();
    if (!found)
        throw BudgetExhausted(p.theta.to_string() + " on " + p.host.to_string() +
                                  ": budget exhausted",
                              best_cost.load() < 0 ? 0 : best_cost.load());

    Decomposition d{p.theta, p.host, p.action, {}, p.developed_count};
    for (const auto& verts : *found) d.base_blocks.push_back(ThetaBlock{p.theta, verts});
    auto cert = verify_decomposition(d);
    if (!cert.accept)
        throw VerificationFailure("search returned an unverifiable decomposition (cost bug)");
    return d;
}

inline Decomposition search(const SearchProblem& p) { return search_impl(p, nullptr); }

inline Decomposition resume(const SearchProblem& p, const std::vector<ThetaBlock>& warm_start) {
    return search_impl(p, &warm_start);
}

// load the derived catalogue from a cache dir: entries re-verify on load,
// rejects and duplicates are skipped
inline size_t load_derived(Catalogue& cat, const std::filesystem::path& cache_dir) {
    namespace fs = std::filesystem;
    fs::path dir = cache_dir / "derived";
    std::error_code ec;
    if (!fs::exists(dir, ec)) return 0;
    size_t added = 0;
    std::vector<fs::path> files;
    for (const auto& de : fs::directory_iterator(dir))
        if (de.is_regular_file() && de.path().extension() == ".cat") files.push_back(de.path());
    std::sort(files.begin(), files.end());
    for (const auto& file : files) {
        std::vector<CatalogueEntry> entries;
        try {
            entries = parse_catalogue_file(file);
        } catch (const std::exception&) {
            continue; // corrupted cache entries are never used
        }
        for (auto& e : entries) {
            if (!verify_decomposition(e.decomposition).accept) continue;
            if (cat.contains(e.decomposition.theta, e.decomposition.host)) continue;
            cat.add(std::move(e));
            ++added;
        }
    }
    return added;
}

// append a search success to the derived catalogue kept under the cache dir
inline void append_derived(const std::filesystem::path& cache_dir, const Decomposition& d,
                           uint64_t seed, const SearchBudget& budget) {
    namespace fs = std::filesystem;
    fs::path dir = cache_dir / "derived";
    fs::create_directories(dir);
    fs::path file = dir / ("theta" + std::to_string(d.theta.edge_count()) + "_derived.cat");
    bool fresh = !fs::exists(file);
    std::ofstream out(file, std::ios::app);
    if (fresh) out << "# searcher results; re-verified on load\n";
    out << "\n";
    serialize_entry(CatalogueEntry{d, "search seed=" + std::to_string(seed) + " budget=" +
                                          std::to_string(budget.restarts) + "x" +
                                          std::to_string(budget.steps)},
                    out);
}

} // namespace theta
