#pragma once

#include <map>
#include <set>
#include <sstream>

#include "theta/catalogue.hpp"
#include "theta/gdd_engine.hpp"
#include "theta/searcher.hpp"
#include "theta/verifier.hpp"

namespace theta {

enum class StepKind {
    Empty,
    CatalogueLeaf,
    SearchLeaf,
    BipartiteTower,
    BipartiteAlt,
    PrimeTripartite,
    TwoPrimeTripartite,
    Theta12Tower,
    Theta15Tower,
    PatchCase,
};

inline const char* to_string(StepKind k) {
    switch (k) {
    case StepKind::Empty: return "empty";
    case StepKind::CatalogueLeaf: return "catalogue";
    case StepKind::SearchLeaf: return "search";
    case StepKind::BipartiteTower: return "bipartite-tower";
    case StepKind::BipartiteAlt: return "bipartite-alt";
    case StepKind::PrimeTripartite: return "prime-tripartite";
    case StepKind::TwoPrimeTripartite: return "two-prime-tripartite";
    case StepKind::Theta12Tower: return "theta12-tower";
    case StepKind::Theta15Tower: return "theta15-tower";
    case StepKind::PatchCase: return "patch";
    }
    return "?";
}

// a node's goal: a complete design, a multipartite decomposition, or a
// (resolvable) group divisible design ingredient
struct PlanGoal {
    enum class Type { Design, Multipartite, Gdd, Rgdd } type = Type::Design;
    ThetaGraph theta;
    long long n = 0;            // design order
    std::vector<int> sizes;     // multipartite part sizes
    std::vector<int> K;         // gdd block sizes
    GddType gdd_type;
    int rgdd_k = 0;

    std::string to_string() const {
        switch (type) {
        case Type::Design:
            return theta.to_string() + " design of order " + std::to_string(n);
        case Type::Multipartite: {
            std::string s = theta.to_string() + " decomposition of K(";
            for (size_t i = 0; i < sizes.size(); ++i) s += (i ? "," : "") + std::to_string(sizes[i]);
            return s + ")";
        }
        case Type::Gdd: {
            std::string s = "{";
            for (size_t i = 0; i < K.size(); ++i) s += (i ? "," : "") + std::to_string(K[i]);
            return s + "}-GDD of type " + gdd_type.to_string();
        }
        case Type::Rgdd:
            return std::to_string(rgdd_k) + "-RGDD of type " + gdd_type.to_string();
        }
        return "?";
    }
};

struct PlanStep {
    StepKind kind = StepKind::Empty;
    PlanGoal goal;
    std::map<std::string, long long> params; // construction parameters, by symbol
    std::string patch_name;                  // for PatchCase
    std::vector<PlanStep> children;
};

struct ConstructionPlan {
    ThetaGraph theta;
    long long n = 0;
    PlanStep root;

    std::string describe() const {
        std::ostringstream os;
        auto rec = [&](auto&& self, const PlanStep& s, int depth) -> void {
            for (int i = 0; i < depth; ++i) os << "  ";
            os << to_string(s.kind);
            if (!s.patch_name.empty()) os << " " << s.patch_name;
            os << ": " << s.goal.to_string();
            if (!s.params.empty()) {
                os << " [";
                bool first = true;
                for (const auto& [k, v] : s.params) {
                    if (!first) os << " ";
                    first = false;
                    os << k << "=" << v;
                }
                os << "]";
            }
            os << "\n";
            for (const auto& c : s.children) self(self, c, depth + 1);
        };
        rec(rec, root, 0);
        return os.str();
    }
};

// ---------------------------------------------------------------------------
// coverage laws: the table rows plus hypothesis orders plus patches must tile
// the admissible residue classes exactly (checked without constructing)

struct CoverageLawReport {
    bool holds = true;
    std::vector<long long> missing; // admissible but not generated
    std::vector<long long> extra;   // generated but not admissible
};

namespace detail {

inline CoverageLawReport coverage_law(const std::set<long long>& generated,
                                      const std::set<long long>& admissible) {
    CoverageLawReport rep;
    for (long long n : admissible)
        if (!generated.count(n)) {
            rep.missing.push_back(n);
            rep.holds = false;
        }
    for (long long n : generated)
        if (!admissible.count(n)) {
            rep.extra.push_back(n);
            rep.holds = false;
        }
    return rep;
}

} // namespace detail

// rows of the order-12pt+4p construction for p in {5,7}
inline CoverageLawReport coverage_law_table2(int p, int f, long long n_max) {
    int fp = 1 - f;
    const int rows[12][4] = {{0, 0, 0, 0}, {0, 0, 1, 0}, {0, 0, 2, 0}, {0, 0, 0, 1},
                             {0, 0, 1, 1}, {0, 0, 2, 1}, {1, 0, 1, f},  {1, 0, 2, f},
                             {1, 0, 3, f}, {0, 1, 0, fp}, {0, 1, 1, fp}, {0, 1, 2, fp}};
    std::set<long long> gen = {0, 1};
    for (long long v :
         {(long long)3 * p + fp, (long long)4 * p, (long long)4 * p + 1, (long long)5 * p + f,
          (long long)7 * p + fp, (long long)8 * p, (long long)8 * p + 1, (long long)9 * p + f,
          (long long)11 * p + fp, (long long)13 * p + f})
        if (v <= n_max) gen.insert(v);
    for (long long v : {(long long)12 * p, (long long)12 * p + 1, (long long)15 * p + fp,
                        (long long)17 * p + f})
        if (v <= n_max) gen.insert(v);
    for (const auto& r : rows)
        for (long long t = 1;; ++t) {
            long long n = 12LL * p * t + 4 * p + (long long)p * r[0] + 3LL * p * r[1] +
                          4LL * p * r[2] + r[3];
            if (n > n_max) break;
            gen.insert(n);
        }
    std::set<long long> adm;
    for (long long n = 0; n <= n_max; ++n) {
        long long rr = n % (4 * p);
        if ((rr == 0 || rr == 1 || rr == p + f || rr == 3 * p + fp) && n != p + f) adm.insert(n);
    }
    return detail::coverage_law(gen, adm);
}

inline CoverageLawReport coverage_law_table3(long long n_max) {
    const int rows[8][3] = {{0, 0, 0}, {0, 1, 0}, {0, 0, 1}, {0, 1, 1},
                            {1, 1, 1}, {1, 2, 1}, {2, 0, 0}, {2, 1, 0}};
    std::set<long long> gen = {0, 1};
    for (long long v : {16, 24, 25, 33, 40, 49, 57, 81, 48, 64})
        if (v <= n_max) gen.insert(v);
    for (const auto& r : rows)
        for (long long t = 1;; ++t) {
            long long n = 48 * t + 24 + 8LL * r[0] + 24LL * r[1] + r[2];
            if (n > n_max) break;
            gen.insert(n);
        }
    std::set<long long> adm;
    for (long long n = 0; n <= n_max; ++n) {
        long long rr = n % 24;
        if ((rr == 0 || rr == 1 || rr == 9 || rr == 16) && n != 9) adm.insert(n);
    }
    return detail::coverage_law(gen, adm);
}

inline CoverageLawReport coverage_law_table4(long long n_max) {
    const int rows[8][3] = {{0, 0, 1}, {3, 0, 1}, {0, 1, 1}, {3, 1, 1},
                            {4, 1, 2}, {7, 1, 3}, {5, 0, 2}, {8, 0, 3}}; // (w, e, t_min)
    std::set<long long> gen = {0, 1};
    for (long long v : {15, 16, 21, 25, 30, 31, 36, 40, 51, 55, 66, 70, 81, 85, 111, 115})
        if (v <= n_max) gen.insert(v);
    for (const auto& r : rows)
        for (long long t = r[2];; ++t) {
            long long n = 30 * t + 15 + 5LL * r[0] + r[1];
            if (n > n_max) break;
            gen.insert(n);
        }
    std::set<long long> adm;
    for (long long n = 0; n <= n_max; ++n) {
        long long rr = n % 15;
        if ((rr == 0 || rr == 1 || rr == 6 || rr == 10) && n != 6 && n != 10) adm.insert(n);
    }
    return detail::coverage_law(gen, adm);
}

// ---------------------------------------------------------------------------

// the ingredient goals produced by inflating a GDD with per-point weights:
// each block becomes a complete multipartite decomposition goal, each group an
// overlay design goal of order (group weight sum + e01), with e01 = 1 meaning
// a shared extra point across all overlays
struct InflationGoals {
    std::vector<std::vector<long long>> block_hosts; // part sizes per block
    std::vector<long long> overlay_orders;           // design order per group
};

inline InflationGoals inflate(const GDD& gdd, const std::vector<long long>& weights, int e01) {
    InflationGoals goals;
    for (const auto& blk : gdd.blocks) {
        std::vector<long long> sizes;
        for (Point q : blk) sizes.push_back(weights.at(static_cast<size_t>(q)));
        goals.block_hosts.push_back(std::move(sizes));
    }
    for (const auto& grp : gdd.groups) {
        long long sum = 0;
        for (Point q : grp) sum += weights.at(static_cast<size_t>(q));
        goals.overlay_orders.push_back(sum + e01);
    }
    return goals;
}

// Plans and executes full decompositions of K_n for in-spectrum (theta, n):
// catalogue leaves, searched 2e+1 designs, the bipartite towers, and the
// GDD-inflation routes with their patch cases.
class Constructor {
public:
    Constructor(Catalogue& catalogue, GddProvider& gdds,
                std::filesystem::path cache_dir = {}, SearchBudget search_budget = {},
                int jobs = 0)
        : catalogue_(catalogue), gdds_(gdds), cache_dir_(std::move(cache_dir)),
          search_budget_(search_budget), jobs_(jobs) {}

    ConstructionPlan plan(const ThetaGraph& theta, long long n) const {
        if (!spectrum_membership(theta, n))
            throw NotInSpectrum(theta.to_string() + " has no design of order " + std::to_string(n));
        ConstructionPlan p;
        p.theta = theta;
        p.n = n;
        p.root = plan_design(theta, n);
        return p;
    }

    Decomposition execute(const ConstructionPlan& plan) {
        std::vector<ThetaBlock> blocks = execute_step(plan.root);
        Decomposition d{plan.theta, HostGraph::complete(static_cast<int>(plan.n)),
                        GroupAction::identity(static_cast<int>(plan.n)), std::move(blocks), 0};
        auto cert = verify_decomposition(d);
        if (!cert.accept)
            throw VerificationFailure("constructed design failed self-verification: " +
                                      plan.theta.to_string() + " order " + std::to_string(plan.n) +
                                      "\n" + to_text(cert));
        return d;
    }

    Decomposition construct(const ThetaGraph& theta, long long n) {
        return execute(plan(theta, n));
    }

    // (n, in-spectrum) for n <= n_max; optionally constructs every member
    std::vector<std::pair<long long, bool>> spectrum_table(const ThetaGraph& theta, long long n_max,
                                                           bool construct_members = false) {
        std::vector<std::pair<long long, bool>> out;
        for (long long n = 0; n <= n_max; ++n) {
            bool member = spectrum_membership(theta, n);
            if (member && construct_members) construct(theta, n);
            out.emplace_back(n, member);
        }
        return out;
    }

private:
    // ---- planning ----------------------------------------------------------

    PlanGoal design_goal(const ThetaGraph& theta, long long n) const {
        PlanGoal g;
        g.type = PlanGoal::Type::Design;
        g.theta = theta;
        g.n = n;
        return g;
    }

    PlanStep design_leaf(const ThetaGraph& theta, long long n) const {
        PlanStep s;
        s.goal = design_goal(theta, n);
        if (n <= 1) {
            s.kind = StepKind::Empty;
        } else if (catalogue_.contains(theta, HostGraph::complete(static_cast<int>(n)))) {
            s.kind = StepKind::CatalogueLeaf;
        } else if (n == 2 * theta.edge_count() + 1) {
            s.kind = StepKind::SearchLeaf;
        } else {
            throw PlanningFailure("no ingredient path for " + theta.to_string() + " order " +
                                  std::to_string(n));
        }
        return s;
    }

    PlanStep multipartite_leaf(const ThetaGraph& theta, std::vector<int> sizes) const {
        PlanStep s;
        s.goal.type = PlanGoal::Type::Multipartite;
        s.goal.theta = theta;
        std::sort(sizes.begin(), sizes.end());
        s.goal.sizes = std::move(sizes);
        HostGraph probe = sizes_host(s.goal.sizes);
        if (!catalogue_.contains(theta, probe))
            throw PlanningFailure("catalogue lacks " + s.goal.to_string());
        s.kind = StepKind::CatalogueLeaf;
        return s;
    }

    static HostGraph sizes_host(const std::vector<int>& sizes) {
        std::vector<std::vector<Point>> parts;
        Point off = 0;
        for (int sz : sizes) {
            std::vector<Point> part;
            for (int i = 0; i < sz; ++i) part.push_back(off + i);
            off += sz;
            parts.push_back(std::move(part));
        }
        return HostGraph::multipartite(std::move(parts));
    }

    PlanStep gdd_leaf(std::vector<int> K, GddType type) const {
        PlanStep s;
        s.kind = StepKind::SearchLeaf;
        s.goal.type = PlanGoal::Type::Gdd;
        s.goal.K = std::move(K);
        s.goal.gdd_type = std::move(type);
        return s;
    }

    PlanStep rgdd_leaf(int k, GddType type) const {
        PlanStep s;
        s.kind = StepKind::SearchLeaf;
        s.goal.type = PlanGoal::Type::Rgdd;
        s.goal.rgdd_k = k;
        s.goal.gdd_type = std::move(type);
        return s;
    }

    PlanStep plan_design(const ThetaGraph& theta, long long n) const {
        const int e = theta.edge_count();
        if (n <= 1 || catalogue_.contains(theta, HostGraph::complete(static_cast<int>(n))) ||
            n == 2 * e + 1)
            return design_leaf(theta, n);

        const bool all_even = theta.bipartite() && theta.a % 2 == 0;
        const bool all_odd = theta.bipartite() && theta.a % 2 == 1;
        switch (e) {
        case 10:
            return all_even ? plan_bipartite_tower(theta, n, 5, 2, 1, 2, {0, 3, 5})
                            : plan_two_prime(theta, n, 5, 0);
        case 11:
            return all_odd ? plan_bipartite_tower(theta, n, 11, 1, 1, 1, {0})
                           : plan_prime(theta, n, 11);
        case 12:
            return all_even ? plan_bipartite_tower(theta, n, 4, 3, 2, 1, {0, 2, 4})
                            : plan_theta12(theta, n);
        case 13:
            return all_odd ? plan_bipartite_tower(theta, n, 13, 1, 1, 1, {0})
                           : plan_prime(theta, n, 13);
        case 14:
            return all_even ? plan_bipartite_tower(theta, n, 7, 2, 1, 2, {0, 3, 5})
                            : plan_two_prime(theta, n, 7, 1);
        case 15:
            return all_odd ? plan_bipartite_alt(theta, n) : plan_theta15(theta, n);
        default:
            throw PlanningFailure("no construction route for " + std::to_string(e) + " edges");
        }
    }

    PlanStep plan_bipartite_tower(const ThetaGraph& theta, long long n, int d, int r, int s, int f,
                                  std::vector<int> gs) const {
        const long long F = static_cast<long long>(f) * d * r * s;
        for (int e01 = 0; e01 <= 1; ++e01)
            for (int g : gs) {
                long long gds = static_cast<long long>(g) * d * s;
                long long rem = n - gds - e01;
                if (rem < F || rem % F != 0) continue;
                long long t = rem / F;
                PlanStep st;
                st.kind = StepKind::BipartiteTower;
                st.goal = design_goal(theta, n);
                st.params = {{"d", d}, {"r", r}, {"s", s}, {"f", f}, {"g", g}, {"e", e01}, {"t", t}};
                st.children.push_back(design_leaf(theta, F + e01));
                if (g > 0) st.children.push_back(design_leaf(theta, gds + e01));
                st.children.push_back(multipartite_leaf(theta, {d * r, d * s}));
                return st;
            }
        throw PlanningFailure("tower parameters never cover order " + std::to_string(n));
    }

    PlanStep plan_bipartite_alt(const ThetaGraph& theta, long long n) const {
        const int combos[4][3] = {{15, 15, 0}, {15, 15, 1}, {15, 20, 1}, {15, 25, 0}};
        for (const auto& c : combos) {
            int r = c[0], s = c[1], e01 = c[2];
            long long rem = n - s - e01;
            if (rem < r || rem % r != 0) continue;
            long long t = rem / r;
            PlanStep st;
            st.kind = StepKind::BipartiteAlt;
            st.goal = design_goal(theta, n);
            st.params = {{"r", r}, {"s", s}, {"e", e01}, {"t", t}};
            st.children.push_back(design_leaf(theta, r + e01));
            if (s != r) st.children.push_back(design_leaf(theta, s + e01));
            if (t >= 2 || s == r) st.children.push_back(multipartite_leaf(theta, {r, r}));
            if (s != r) st.children.push_back(multipartite_leaf(theta, {r, s}));
            return st;
        }
        throw PlanningFailure("no (r,s,e) parameters cover order " + std::to_string(n));
    }

    PlanStep plan_prime(const ThetaGraph& theta, long long n, int p) const {
        int e01 = static_cast<int>(n % p);
        long long t = (n - e01) / p;
        PlanStep st;
        st.goal = design_goal(theta, n);
        if (t == 6 || t == 8) {
            st.kind = StepKind::PatchCase;
            st.patch_name = t == 6 ? "6p+e" : "8p+e";
            st.params = {{"p", p}, {"t", t}, {"e", e01}};
            st.children.push_back(gdd_leaf({3}, GddType::uniform(2, t == 6 ? 3 : 4)));
            st.children.push_back(design_leaf(theta, 2LL * p + e01));
            st.children.push_back(multipartite_leaf(theta, {p, p, p}));
            return st;
        }
        st.kind = StepKind::PrimeTripartite;
        st.params = {{"p", p}, {"t", t}, {"e", e01}};
        st.children.push_back(gdd_leaf({3, 4, 5}, GddType::uniform(1, static_cast<int>(t))));
        st.children.push_back(design_leaf(theta, p + e01));
        st.children.push_back(multipartite_leaf(theta, {p, p, p}));
        if (t >= 4) st.children.push_back(multipartite_leaf(theta, {p, p, p, p}));
        if (t >= 5) st.children.push_back(multipartite_leaf(theta, {p, p, p, p, p}));
        return st;
    }

    struct RowChoice {
        long long t = 0;
        int row = -1;
    };

    template <typename RowOrder>
    static RowChoice pick_row(long long n, long long base, long long period, int row_count,
                              RowOrder&& delta_and_tmin) {
        RowChoice best;
        for (int ri = 0; ri < row_count; ++ri) {
            auto [delta, tmin] = delta_and_tmin(ri);
            long long rem = n - base - delta;
            if (rem <= 0 || rem % period != 0) continue;
            long long t = rem / period;
            if (t < tmin) continue;
            if (best.row < 0 || t < best.t) {
                best.t = t;
                best.row = ri;
            }
        }
        return best;
    }

    PlanStep plan_two_prime(const ThetaGraph& theta, long long n, int p, int f) const {
        const int fp = 1 - f;
        PlanStep st;
        st.goal = design_goal(theta, n);
        if (n == 12LL * p || n == 12LL * p + 1) {
            int e01 = static_cast<int>(n - 12LL * p);
            st.kind = StepKind::PatchCase;
            st.patch_name = "12p+e";
            st.params = {{"p", p}, {"f", f}, {"e", e01}};
            st.children.push_back(gdd_leaf({3}, GddType::uniform(2, 3)));
            st.children.push_back(design_leaf(theta, 4LL * p + e01));
            st.children.push_back(multipartite_leaf(theta, {2 * p, 2 * p, 2 * p}));
            return st;
        }
        if (n == 15LL * p + fp) {
            st.kind = StepKind::PatchCase;
            st.patch_name = "15p+f'";
            st.params = {{"p", p}, {"f", f}, {"e", fp}};
            st.children.push_back(gdd_leaf({4}, GddType::uniform(3, 5)));
            st.children.push_back(design_leaf(theta, 3LL * p + fp));
            st.children.push_back(multipartite_leaf(theta, {p, p, p, p}));
            return st;
        }
        if (n == 17LL * p + f) {
            st.kind = StepKind::PatchCase;
            st.patch_name = "17p+f";
            st.params = {{"p", p}, {"f", f}, {"e", f}};
            st.children.push_back(gdd_leaf({4}, GddType::uniform(1, 4)));
            st.children.push_back(design_leaf(theta, 4LL * p + f));
            st.children.push_back(design_leaf(theta, 5LL * p + f));
            st.children.push_back(multipartite_leaf(theta, {4 * p, 4 * p, 4 * p, 5 * p}));
            return st;
        }

        const int rows[12][4] = {{0, 0, 0, 0}, {0, 0, 1, 0}, {0, 0, 2, 0}, {0, 0, 0, 1},
                                 {0, 0, 1, 1}, {0, 0, 2, 1}, {1, 0, 1, f},  {1, 0, 2, f},
                                 {1, 0, 3, f}, {0, 1, 0, fp}, {0, 1, 1, fp}, {0, 1, 2, fp}};
        auto choice = pick_row(n, 4LL * p, 12LL * p, 12, [&](int ri) {
            const auto& r = rows[ri];
            long long delta =
                static_cast<long long>(p) * r[0] + 3LL * p * r[1] + 4LL * p * r[2] + r[3];
            return std::pair<long long, long long>(delta, 1);
        });
        if (choice.row < 0)
            throw PlanningFailure("no table row covers order " + std::to_string(n));
        const auto& r = rows[choice.row];
        int x = r[0], y = r[1], z = r[2], e01 = r[3], w = x + y + z;
        long long t = choice.t;
        st.kind = StepKind::TwoPrimeTripartite;
        st.params = {{"p", p}, {"f", f}, {"x", x}, {"y", y}, {"z", z}, {"w", w}, {"t", t}, {"e", e01}};
        st.children.push_back(rgdd_leaf(4, GddType::uniform(4, static_cast<int>(3 * t + 1))));
        st.children.push_back(design_leaf(theta, 4LL * p + e01));
        if (w > 0)
            st.children.push_back(
                design_leaf(theta, static_cast<long long>(p) * x + 3LL * p * y + 4LL * p * z + e01));
        st.children.push_back(multipartite_leaf(theta, {p, p, p, p}));
        if (x > 0) st.children.push_back(multipartite_leaf(theta, {p, p, p, p, p}));
        if (y > 0) st.children.push_back(multipartite_leaf(theta, {p, p, p, p, 3 * p}));
        if (z > 0) st.children.push_back(multipartite_leaf(theta, {p, p, p, p, 4 * p}));
        return st;
    }

    PlanStep plan_theta12(const ThetaGraph& theta, long long n) const {
        PlanStep st;
        st.goal = design_goal(theta, n);
        if (n == 48 || n == 64) {
            st.kind = StepKind::PatchCase;
            st.patch_name = std::to_string(n);
            st.params = {{"e", 0}};
            st.children.push_back(gdd_leaf({3}, GddType::uniform(2, n == 48 ? 3 : 4)));
            st.children.push_back(design_leaf(theta, 16));
            st.children.push_back(multipartite_leaf(theta, {8, 8, 8}));
            return st;
        }
        const int rows[8][3] = {{0, 0, 0}, {0, 1, 0}, {0, 0, 1}, {0, 1, 1},
                                {1, 1, 1}, {1, 2, 1}, {2, 0, 0}, {2, 1, 0}};
        auto choice = pick_row(n, 24, 48, 8, [&](int ri) {
            const auto& r = rows[ri];
            return std::pair<long long, long long>(8LL * r[0] + 24LL * r[1] + r[2], 1);
        });
        if (choice.row < 0)
            throw PlanningFailure("no table row covers order " + std::to_string(n));
        const auto& r = rows[choice.row];
        int x = r[0], y = r[1], e01 = r[2];
        long long t = choice.t;
        st.kind = StepKind::Theta12Tower;
        st.params = {{"x", x}, {"y", y}, {"t", t}, {"e", e01}};
        st.children.push_back(rgdd_leaf(3, GddType::uniform(3, static_cast<int>(2 * t + 1))));
        st.children.push_back(design_leaf(theta, 24 + e01));
        if (x + y > 0) st.children.push_back(design_leaf(theta, 8LL * x + 24LL * y + e01));
        st.children.push_back(multipartite_leaf(theta, {8, 8, 8}));
        if (x > 0) st.children.push_back(multipartite_leaf(theta, {8, 8, 8, 8}));
        if (y > 0) st.children.push_back(multipartite_leaf(theta, {8, 8, 8, 24}));
        return st;
    }

    PlanStep plan_theta15(const ThetaGraph& theta, long long n) const {
        PlanStep st;
        st.goal = design_goal(theta, n);
        if (n == 81 || n == 111) {
            st.kind = StepKind::PatchCase;
            st.patch_name = std::to_string(n);
            st.params = {{"e", 1}};
            st.children.push_back(
                gdd_leaf({3}, n == 81 ? GddType::uniform(4, 4) : GddType{{4, 4}, {6, 1}}));
            st.children.push_back(design_leaf(theta, 21));
            if (n == 111) st.children.push_back(design_leaf(theta, 31));
            st.children.push_back(multipartite_leaf(theta, {5, 5, 5}));
            return st;
        }
        if (n == 85 || n == 115) {
            st.kind = StepKind::PatchCase;
            st.patch_name = std::to_string(n);
            st.params = {{"e", 0}};
            st.children.push_back(
                gdd_leaf({3}, n == 85 ? GddType{{3, 4}, {5, 1}} : GddType{{3, 1}, {5, 4}}));
            st.children.push_back(design_leaf(theta, 15));
            st.children.push_back(design_leaf(theta, 25));
            st.children.push_back(multipartite_leaf(theta, {5, 5, 5}));
            return st;
        }
        const int rows[8][3] = {{0, 0, 1}, {3, 0, 1}, {0, 1, 1}, {3, 1, 1},
                                {4, 1, 2}, {7, 1, 3}, {5, 0, 2}, {8, 0, 3}};
        auto choice = pick_row(n, 15, 30, 8, [&](int ri) {
            const auto& r = rows[ri];
            return std::pair<long long, long long>(5LL * r[0] + r[1], r[2]);
        });
        if (choice.row < 0)
            throw PlanningFailure("no table row covers order " + std::to_string(n));
        const auto& r = rows[choice.row];
        int w = r[0], e01 = r[1];
        long long t = choice.t;
        if (w > 3 * t)
            throw PlanningFailure("row violates w <= 3t for order " + std::to_string(n));
        st.kind = StepKind::Theta15Tower;
        st.params = {{"w", w}, {"t", t}, {"e", e01}};
        st.children.push_back(rgdd_leaf(3, GddType::uniform(3, static_cast<int>(2 * t + 1))));
        st.children.push_back(design_leaf(theta, 15 + e01));
        if (w > 0) st.children.push_back(design_leaf(theta, 5LL * w + e01));
        st.children.push_back(multipartite_leaf(theta, {5, 5, 5}));
        if (w > 0) st.children.push_back(multipartite_leaf(theta, {5, 5, 5, 5}));
        return st;
    }

    // ---- execution ---------------------------------------------------------

    std::vector<ThetaBlock> execute_step(const PlanStep& st) {
        const ThetaGraph theta = st.goal.theta;
        const long long n = st.goal.n;
        switch (st.kind) {
        case StepKind::Empty:
        case StepKind::CatalogueLeaf:
        case StepKind::SearchLeaf:
            return fetch_design(theta, n);
        case StepKind::BipartiteTower:
            return build_tower(theta, n, st.params);
        case StepKind::BipartiteAlt:
            return build_alt(theta, n, st.params);
        case StepKind::PrimeTripartite:
        case StepKind::TwoPrimeTripartite:
        case StepKind::Theta12Tower:
        case StepKind::Theta15Tower:
            return build_gdd_route(theta, n, st);
        case StepKind::PatchCase:
            return build_patch(theta, n, st);
        }
        throw PlanningFailure("unhandled step kind");
    }

    GDD fetch_gdd(const std::vector<int>& K, const GddType& type) {
        try {
            return gdds_.provide_gdd(K, type);
        } catch (const Unprovidable& e) {
            throw IngredientMissing(e.what());
        }
    }

    ResolvableGDD fetch_rgdd(int k, const GddType& type) {
        try {
            return gdds_.provide_rgdd(k, type);
        } catch (const Unprovidable& e) {
            throw IngredientMissing(e.what());
        }
    }

    // explicit blocks of a design of order m on points 0..m-1
    const std::vector<ThetaBlock>& fetch_design(const ThetaGraph& theta, long long m) {
        auto key = std::make_pair(theta, m);
        if (auto it = design_memo_.find(key); it != design_memo_.end()) return it->second;

        std::vector<ThetaBlock> blocks;
        HostGraph host = HostGraph::complete(static_cast<int>(m));
        if (m <= 1) {
            // trivial designs
        } else if (catalogue_.contains(theta, host)) {
            blocks = develop(catalogue_.lookup(theta, host).decomposition);
        } else if (m == 2 * theta.edge_count() + 1) {
            SearchProblem p;
            p.theta = theta;
            p.host = host;
            p.action = GroupAction({WheelSegment{0, static_cast<int>(m), 1}}, {});
            p.developed_count = 1;
            p.fixed_count = 0;
            p.budget = search_budget_;
            p.jobs = jobs_;
            p.seed = default_seed(p);
            Decomposition d;
            try {
                d = search(p);
            } catch (const BudgetExhausted& ex) {
                throw IngredientMissing(std::string("search failed: ") + ex.what());
            }
            if (!cache_dir_.empty()) append_derived(cache_dir_, d, p.seed, p.budget);
            catalogue_.add(CatalogueEntry{d, "search seed=" + std::to_string(p.seed)});
            blocks = develop(d);
        } else {
            throw IngredientMissing("no source for " + theta.to_string() + " design of order " +
                                    std::to_string(m));
        }
        return design_memo_.emplace(key, std::move(blocks)).first->second;
    }

    struct MultipartiteIngredient {
        const CatalogueEntry* entry;
        std::vector<ThetaBlock> blocks; // developed
    };

    const MultipartiteIngredient& fetch_multipartite(const ThetaGraph& theta,
                                                     std::vector<int> sizes) {
        std::sort(sizes.begin(), sizes.end());
        auto key = std::make_pair(theta, sizes);
        if (auto it = multi_memo_.find(key); it != multi_memo_.end()) return it->second;
        HostGraph probe = sizes_host(sizes);
        const CatalogueEntry* entry;
        try {
            entry = &catalogue_.lookup(theta, probe);
        } catch (const NotFound& e) {
            throw IngredientMissing(e.what());
        }
        MultipartiteIngredient ing{entry, develop(entry->decomposition)};
        return multi_memo_.emplace(key, std::move(ing)).first->second;
    }

    // remap an ingredient's blocks through a point map
    static void emit_mapped(std::vector<ThetaBlock>& out, const std::vector<ThetaBlock>& blocks,
                            const std::vector<Point>& map) {
        for (const auto& b : blocks) {
            ThetaBlock nb{b.theta, b.vertices};
            for (auto& v : nb.vertices) v = map[static_cast<size_t>(v)];
            out.push_back(std::move(nb));
        }
    }

    // copy of a multipartite decomposition onto the given part slots
    // (slot i receives entry part with the same size, matched stably)
    void emit_multipartite(std::vector<ThetaBlock>& out, const ThetaGraph& theta,
                           const std::vector<std::vector<Point>>& slots) {
        std::vector<int> sizes;
        sizes.reserve(slots.size());
        for (const auto& s : slots) sizes.push_back(static_cast<int>(s.size()));
        const auto& ing = fetch_multipartite(theta, sizes);
        const HostGraph& ehost = ing.entry->decomposition.host;

        std::vector<int> slot_order(slots.size()), part_order(slots.size());
        std::iota(slot_order.begin(), slot_order.end(), 0);
        std::iota(part_order.begin(), part_order.end(), 0);
        std::stable_sort(slot_order.begin(), slot_order.end(),
                         [&](int a, int b) { return slots[a].size() < slots[b].size(); });
        std::stable_sort(part_order.begin(), part_order.end(), [&](int a, int b) {
            return ehost.parts()[a].size() < ehost.parts()[b].size();
        });
        std::vector<Point> map(static_cast<size_t>(ehost.points()), -1);
        for (size_t i = 0; i < slot_order.size(); ++i) {
            const auto& part = ehost.parts()[static_cast<size_t>(part_order[i])];
            const auto& slot = slots[static_cast<size_t>(slot_order[i])];
            if (part.size() != slot.size())
                throw IngredientMissing("part size mismatch in multipartite embedding");
            for (size_t j = 0; j < part.size(); ++j) map[static_cast<size_t>(part[j])] = slot[j];
        }
        emit_mapped(out, ing.blocks, map);
    }

    // overlay a design of order |pts| + e01 on pts (+ the shared infinity)
    void emit_overlay(std::vector<ThetaBlock>& out, const ThetaGraph& theta,
                      const std::vector<Point>& pts, int e01, Point infinity) {
        long long m = static_cast<long long>(pts.size());
        const auto& blocks = fetch_design(theta, m + e01);
        std::vector<Point> map(static_cast<size_t>(m + e01));
        for (size_t i = 0; i < pts.size(); ++i) map[i] = pts[i];
        if (e01) map[static_cast<size_t>(m)] = infinity;
        emit_mapped(out, blocks, map);
    }

    static std::vector<Point> range_points(long long from, long long count) {
        std::vector<Point> pts(static_cast<size_t>(count));
        std::iota(pts.begin(), pts.end(), static_cast<Point>(from));
        return pts;
    }

    std::vector<ThetaBlock> build_tower(const ThetaGraph& theta, long long n,
                                        const std::map<std::string, long long>& prm) {
        const long long d = prm.at("d"), r = prm.at("r"), s = prm.at("s"), f = prm.at("f"),
                        g = prm.at("g"), e01 = prm.at("e"), t = prm.at("t");
        const long long F = f * d * r * s, gds = g * d * s;
        const Point inf = static_cast<Point>(n - 1);
        std::vector<ThetaBlock> out;

        auto layer = [&](long long j) { return range_points(gds + (j - 1) * F, F); };

        for (long long j = 1; j <= t; ++j)
            emit_overlay(out, theta, layer(j), static_cast<int>(e01), inf);
        if (g > 0) emit_overlay(out, theta, range_points(0, gds), static_cast<int>(e01), inf);

        // bipartite filler between the accumulated layers and each new layer,
        // in dr x ds chunks
        auto chunks = [&](long long from, long long count, long long width) {
            std::vector<std::vector<Point>> out_chunks;
            for (long long off = 0; off < count; off += width)
                out_chunks.push_back(range_points(from + off, width));
            return out_chunks;
        };
        for (long long j = 2; j <= t; ++j) {
            auto lhs = chunks(gds, (j - 1) * F, d * r);
            auto rhs = chunks(gds + (j - 1) * F, F, d * s);
            for (const auto& X : lhs)
                for (const auto& Y : rhs) emit_multipartite(out, theta, {X, Y});
        }
        if (g > 0) {
            auto lhs = chunks(gds, t * F, d * r);
            auto rhs = chunks(0, gds, d * s);
            for (const auto& X : lhs)
                for (const auto& Y : rhs) emit_multipartite(out, theta, {X, Y});
        }
        return out;
    }

    std::vector<ThetaBlock> build_alt(const ThetaGraph& theta, long long n,
                                      const std::map<std::string, long long>& prm) {
        const long long r = prm.at("r"), s = prm.at("s"), e01 = prm.at("e"), t = prm.at("t");
        const Point inf = static_cast<Point>(n - 1);
        std::vector<ThetaBlock> out;
        auto base = range_points(0, s);
        auto layer = [&](long long j) { return range_points(s + (j - 1) * r, r); };

        emit_overlay(out, theta, base, static_cast<int>(e01), inf);
        for (long long j = 1; j <= t; ++j)
            emit_overlay(out, theta, layer(j), static_cast<int>(e01), inf);
        for (long long j = 1; j <= t; ++j) emit_multipartite(out, theta, {layer(j), base});
        for (long long i = 1; i <= t; ++i)
            for (long long j = i + 1; j <= t; ++j)
                emit_multipartite(out, theta, {layer(i), layer(j)});
        return out;
    }

    // generic Wilson-style assembly: inflate a GDD by per-point weights,
    // overlay the groups, fill the blocks with multipartite decompositions
    std::vector<ThetaBlock> build_inflated(const ThetaGraph& theta, const GDD& gdd,
                                           const std::vector<long long>& weights, int e01) {
        const int v = gdd.points();
        std::vector<long long> offset(static_cast<size_t>(v) + 1, 0);
        for (int q = 0; q < v; ++q)
            offset[static_cast<size_t>(q) + 1] = offset[static_cast<size_t>(q)] + weights[static_cast<size_t>(q)];
        const long long n = offset[static_cast<size_t>(v)] + e01;
        const Point inf = static_cast<Point>(n - 1);
        std::vector<ThetaBlock> out;

        for (const auto& grp : gdd.groups) {
            std::vector<Point> pts;
            for (Point q : grp) {
                auto rp = range_points(offset[static_cast<size_t>(q)], weights[static_cast<size_t>(q)]);
                pts.insert(pts.end(), rp.begin(), rp.end());
            }
            emit_overlay(out, theta, pts, e01, inf);
        }
        for (const auto& blk : gdd.blocks) {
            std::vector<std::vector<Point>> slots;
            for (Point q : blk)
                slots.push_back(range_points(offset[static_cast<size_t>(q)], weights[static_cast<size_t>(q)]));
            emit_multipartite(out, theta, slots);
        }
        return out;
    }

    std::vector<ThetaBlock> build_gdd_route(const ThetaGraph& theta, long long n,
                                            const PlanStep& st) {
        const auto& prm = st.params;
        const int e01 = static_cast<int>(prm.at("e"));
        if (st.kind == StepKind::PrimeTripartite) {
            const long long p = prm.at("p"), t = prm.at("t");
            GDD gdd = fetch_gdd({3, 4, 5}, GddType::uniform(1, static_cast<int>(t)));
            std::vector<long long> weights(static_cast<size_t>(gdd.points()), p);
            auto out = build_inflated(theta, gdd, weights, e01);
            if (static_cast<long long>(gdd.points()) * p + e01 != n)
                throw PlanningFailure("order mismatch in prime tripartite assembly");
            return out;
        }
        if (st.kind == StepKind::TwoPrimeTripartite) {
            const long long p = prm.at("p"), t = prm.at("t");
            const int x = static_cast<int>(prm.at("x")), y = static_cast<int>(prm.at("y")),
                      z = static_cast<int>(prm.at("z"));
            ResolvableGDD r = fetch_rgdd(4, GddType::uniform(4, static_cast<int>(3 * t + 1)));
            int w = x + y + z;
            std::vector<Point> newpts;
            std::vector<int> classes;
            for (int i = 0; i < w; ++i) {
                newpts.push_back(r.gdd.points() + i);
                classes.push_back(i);
            }
            GDD gdd = extend_with_group(r, newpts, classes);
            std::vector<long long> weights(static_cast<size_t>(r.gdd.points()), p);
            for (int i = 0; i < x; ++i) weights.push_back(p);
            for (int i = 0; i < y; ++i) weights.push_back(3 * p);
            for (int i = 0; i < z; ++i) weights.push_back(4 * p);
            return build_inflated(theta, gdd, weights, e01);
        }
        if (st.kind == StepKind::Theta12Tower) {
            const long long t = prm.at("t");
            const int x = static_cast<int>(prm.at("x")), y = static_cast<int>(prm.at("y"));
            ResolvableGDD r = fetch_rgdd(3, GddType::uniform(3, static_cast<int>(2 * t + 1)));
            int w = x + y;
            std::vector<Point> newpts;
            std::vector<int> classes;
            for (int i = 0; i < w; ++i) {
                newpts.push_back(r.gdd.points() + i);
                classes.push_back(i);
            }
            GDD gdd = extend_with_group(r, newpts, classes);
            std::vector<long long> weights(static_cast<size_t>(r.gdd.points()), 8);
            for (int i = 0; i < x; ++i) weights.push_back(8);
            for (int i = 0; i < y; ++i) weights.push_back(24);
            return build_inflated(theta, gdd, weights, e01);
        }
        if (st.kind == StepKind::Theta15Tower) {
            const long long t = prm.at("t");
            const int w = static_cast<int>(prm.at("w"));
            ResolvableGDD r = fetch_rgdd(3, GddType::uniform(3, static_cast<int>(2 * t + 1)));
            std::vector<Point> newpts;
            std::vector<int> classes;
            for (int i = 0; i < w; ++i) {
                newpts.push_back(r.gdd.points() + i);
                classes.push_back(i);
            }
            GDD gdd = extend_with_group(r, newpts, classes);
            std::vector<long long> weights(static_cast<size_t>(gdd.points()), 5);
            return build_inflated(theta, gdd, weights, e01);
        }
        throw PlanningFailure("unhandled GDD route");
    }

    std::vector<ThetaBlock> build_patch(const ThetaGraph& theta, long long n, const PlanStep& st) {
        const int e = theta.edge_count();
        const int e01 = static_cast<int>(st.params.at("e"));
        if (st.patch_name == "6p+e" || st.patch_name == "8p+e") {
            const long long p = st.params.at("p");
            GDD gdd = fetch_gdd({3}, GddType::uniform(2, st.patch_name == "6p+e" ? 3 : 4));
            std::vector<long long> weights(static_cast<size_t>(gdd.points()), p);
            return build_inflated(theta, gdd, weights, e01);
        }
        if (st.patch_name == "12p+e") {
            const long long p = st.params.at("p");
            GDD gdd = fetch_gdd({3}, GddType::uniform(2, 3));
            std::vector<long long> weights(static_cast<size_t>(gdd.points()), 2 * p);
            return build_inflated(theta, gdd, weights, e01);
        }
        if (st.patch_name == "15p+f'") {
            const long long p = st.params.at("p");
            GDD gdd = fetch_gdd({4}, GddType::uniform(3, 5));
            std::vector<long long> weights(static_cast<size_t>(gdd.points()), p);
            return build_inflated(theta, gdd, weights, e01);
        }
        if (st.patch_name == "17p+f") {
            const long long p = st.params.at("p");
            GDD gdd = fetch_gdd({4}, GddType::uniform(1, 4));
            std::vector<long long> weights = {4 * p, 4 * p, 4 * p, 5 * p};
            return build_inflated(theta, gdd, weights, e01);
        }
        if (e == 12 && (st.patch_name == "48" || st.patch_name == "64")) {
            GDD gdd = fetch_gdd({3}, GddType::uniform(2, st.patch_name == "48" ? 3 : 4));
            std::vector<long long> weights(static_cast<size_t>(gdd.points()), 8);
            return build_inflated(theta, gdd, weights, 0);
        }
        if (e == 15 && (st.patch_name == "81" || st.patch_name == "111")) {
            GDD gdd = fetch_gdd(
                {3}, st.patch_name == "81" ? GddType::uniform(4, 4) : GddType{{4, 4}, {6, 1}});
            std::vector<long long> weights(static_cast<size_t>(gdd.points()), 5);
            return build_inflated(theta, gdd, weights, 1);
        }
        if (e == 15 && (st.patch_name == "85" || st.patch_name == "115")) {
            GDD gdd = fetch_gdd(
                {3}, st.patch_name == "85" ? GddType{{3, 4}, {5, 1}} : GddType{{3, 1}, {5, 4}});
            std::vector<long long> weights(static_cast<size_t>(gdd.points()), 5);
            return build_inflated(theta, gdd, weights, 0);
        }
        throw PlanningFailure("unknown patch " + st.patch_name + " for order " + std::to_string(n));
    }

    Catalogue& catalogue_;
    GddProvider& gdds_;
    std::filesystem::path cache_dir_;
    SearchBudget search_budget_;
    int jobs_;
    std::map<std::pair<ThetaGraph, long long>, std::vector<ThetaBlock>> design_memo_;
    std::map<std::pair<ThetaGraph, std::vector<int>>, MultipartiteIngredient> multi_memo_;
};

} // namespace theta
