// command-line front end: verify, construct, spectrum, enumerate, search,
// catalogue
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "theta/constructor.hpp"

using namespace theta;
using nlohmann::json;

namespace {

// exit codes: 0 success, 1 verification rejection, 2 parse/usage error,
// 3 order outside the spectrum, 4 missing ingredient or search budget out
constexpr int kExitOk = 0;
constexpr int kExitReject = 1;
constexpr int kExitParse = 2;
constexpr int kExitSpectrum = 3;
constexpr int kExitIngredient = 4;

std::filesystem::path default_cache_dir() {
    if (const char* env = std::getenv("THETA_CACHE_DIR")) return env;
    if (const char* xdg = std::getenv("XDG_CACHE_HOME"))
        return std::filesystem::path(xdg) / "theta-designs";
    if (const char* home = std::getenv("HOME"))
        return std::filesystem::path(home) / ".cache" / "theta-designs";
    return std::filesystem::temp_directory_path() / "theta-designs";
}

std::filesystem::path default_catalogue_dir() {
#ifdef THETA_DATA_DIR
    return THETA_DATA_DIR;
#else
    return "data/catalogue";
#endif
}

json cert_to_json(const Certificate& cert) {
    json j;
    j["schema"] = 1;
    j["verdict"] = cert.accept ? "accept" : "reject";
    j["blocks"] = cert.block_count;
    j["edges"] = cert.edge_count;
    j["violations"] = json::array();
    for (const auto& v : cert.violations) {
        json jv;
        jv["kind"] = to_string(v.kind);
        if (v.u >= 0) jv["edge"] = {v.u, v.v};
        if (v.block_index >= 0) jv["block"] = v.block_index;
        j["violations"].push_back(jv);
    }
    return j;
}

json decomposition_to_json(const Decomposition& d) {
    json j;
    j["schema"] = 1;
    j["theta"] = d.theta.to_string();
    j["host"] = d.host.to_string();
    j["action"] = d.action.to_string();
    j["developed"] = d.developed_count;
    j["blocks"] = json::array();
    for (const auto& b : d.base_blocks) j["blocks"].push_back(b.vertices);
    return j;
}

HostGraph parse_host(const std::string& spec, const std::string& parts_spec) {
    if (spec.rfind("K(", 0) != 0 || spec.back() != ')')
        throw SyntaxError(0, "host must look like K(21) or K(5,10)");
    std::vector<int> sizes;
    std::istringstream is(spec.substr(2, spec.size() - 3));
    std::string tok;
    while (std::getline(is, tok, ',')) sizes.push_back(std::stoi(tok));
    if (sizes.size() == 1) return HostGraph::complete(sizes[0]);
    int n = 0;
    for (int sz : sizes) n += sz;
    if (!parts_spec.empty()) {
        std::istringstream ps(parts_spec);
        std::string word;
        int r = 0;
        if (!(ps >> word >> r) || word != "residue-mod" || r != static_cast<int>(sizes.size()))
            throw SyntaxError(0, "--parts wants 'residue-mod R' with R matching the part count");
        return HostGraph::multipartite_residue(r, n);
    }
    // default: parts as consecutive ranges in the declared order
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

struct Tool {
    std::filesystem::path catalogue_dir = default_catalogue_dir();
    std::filesystem::path cache_dir = default_cache_dir();
    bool json_out = false;
    int jobs = 0;
    bool skip_derived = false;

    Catalogue catalogue;
    std::optional<GddProvider> gdds;
    std::optional<Constructor> ctor;

    void load(SearchBudget budget = {}) {
        catalogue.load_directory(catalogue_dir);
        if (!skip_derived) load_derived(catalogue, cache_dir);
        gdds.emplace(cache_dir / "gdd");
        ctor.emplace(catalogue, *gdds, cache_dir, budget, jobs);
    }
};

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"theta-graph design construction and verification"};
    app.require_subcommand(1);

    Tool tool;
    std::string format = "text";
    app.add_option("--catalogue", tool.catalogue_dir, "catalogue directory");
    app.add_option("--cache", tool.cache_dir, "cache directory (or $THETA_CACHE_DIR)");
    app.add_option("--format", format, "output format (text | json)")
        ->check(CLI::IsMember({"text", "json"}));
    app.add_flag("--json", tool.json_out, "shorthand for --format json");
    app.add_option("--jobs", tool.jobs, "worker cap for parallel search");
    app.add_flag("--no-derived", tool.skip_derived, "ignore the derived catalogue");

    // verify
    auto* cmd_verify = app.add_subcommand("verify", "verify catalogue files");
    cmd_verify->fallthrough();
    std::vector<std::string> verify_paths;
    bool verify_oracle = false;
    cmd_verify->add_option("files", verify_paths, "catalogue files (default: shipped catalogue)");
    cmd_verify->add_flag("--oracle", verify_oracle, "also run the independent oracle");

    // construct
    auto* cmd_construct = app.add_subcommand("construct", "construct a design of order n");
    cmd_construct->fallthrough();
    int ca = 0, cb = 0, cc = 0;
    long long cn = 0;
    bool explain = false;
    std::string out_path;
    uint64_t seed_override = 0;
    std::string budget_str;
    cmd_construct->add_option("a", ca, "path length a")->required();
    cmd_construct->add_option("b", cb, "path length b")->required();
    cmd_construct->add_option("c", cc, "path length c")->required();
    cmd_construct->add_option("--n", cn, "order of the complete graph")->required();
    cmd_construct->add_flag("--explain", explain, "print the construction plan");
    cmd_construct->add_option("--out", out_path, "write the decomposition to a file");
    cmd_construct->add_option("--seed", seed_override, "search seed override");
    cmd_construct->add_option("--budget", budget_str, "search budget RESTARTSxSTEPS");

    // spectrum
    auto* cmd_spectrum = app.add_subcommand("spectrum", "admissible orders up to a bound");
    cmd_spectrum->fallthrough();
    int sa = 0, sb = 0, sc = 0;
    long long smax = 100;
    bool sconstruct = false;
    cmd_spectrum->add_option("a", sa)->required();
    cmd_spectrum->add_option("b", sb)->required();
    cmd_spectrum->add_option("c", sc)->required();
    cmd_spectrum->add_option("--max", smax, "largest order to report");
    cmd_spectrum->add_flag("--construct", sconstruct, "construct and verify every member");

    // enumerate
    auto* cmd_enumerate = app.add_subcommand("enumerate", "list theta graphs with e edges");
    cmd_enumerate->fallthrough();
    int ee = 0;
    cmd_enumerate->add_option("e", ee, "edge count")->required();

    // search
    auto* cmd_search = app.add_subcommand("search", "search base blocks under an action");
    cmd_search->fallthrough();
    int xa = 0, xb = 0, xc = 0, developed = 0, fixed = 0;
    std::string host_spec, act_spec, fix_spec;
    cmd_search->add_option("a", xa)->required();
    cmd_search->add_option("b", xb)->required();
    cmd_search->add_option("c", xc)->required();
    std::string parts_spec;
    cmd_search->add_option("--host", host_spec, "host, e.g. K(21) or K(5,10)")->required();
    cmd_search->add_option("--parts", parts_spec,
                           "part structure 'residue-mod R' (default: consecutive ranges)");
    cmd_search->add_option("--act", act_spec, "action segments, e.g. \"(0..20 +1)\"");
    cmd_search->add_option("--fix", fix_spec, "fixed points, space separated");
    cmd_search->add_option("--developed", developed, "number of developed base blocks");
    cmd_search->add_option("--fixed-blocks", fixed, "number of undeveloped base blocks");
    cmd_search->add_option("--seed", seed_override, "seed override");
    cmd_search->add_option("--budget", budget_str, "budget RESTARTSxSTEPS");

    // catalogue
    auto* cmd_catalogue = app.add_subcommand("catalogue", "list or export catalogue entries");
    cmd_catalogue->fallthrough();
    std::string cat_mode = "list";
    cmd_catalogue->add_option("mode", cat_mode, "list | export")
        ->check(CLI::IsMember({"list", "export"}));

    CLI11_PARSE(app, argc, argv);
    if (format == "json") tool.json_out = true;

    SearchBudget budget;
    if (!budget_str.empty()) {
        auto x = budget_str.find('x');
        if (x == std::string::npos) {
            std::cerr << "budget must look like 64x200000\n";
            return kExitParse;
        }
        budget.restarts = std::stoi(budget_str.substr(0, x));
        budget.steps = std::stoll(budget_str.substr(x + 1));
    }

    try {
        if (cmd_verify->parsed()) {
            std::vector<CatalogueEntry> entries;
            try {
                if (verify_paths.empty()) {
                    Catalogue cat;
                    cat.load_directory(tool.catalogue_dir);
                    entries = cat.entries();
                } else {
                    for (const auto& path : verify_paths)
                        for (auto& e : parse_catalogue_file(path)) entries.push_back(std::move(e));
                }
            } catch (const SyntaxError& e) {
                std::cerr << "parse error: " << e.what() << "\n";
                return kExitParse;
            }
            long long accepted = 0;
            json report = json::array();
            for (const auto& entry : entries) {
                auto cert = verify_decomposition(entry.decomposition);
                bool ok = cert.accept;
                if (verify_oracle && oracle_verify(entry.decomposition).accept != cert.accept) {
                    std::cerr << "oracle disagreement on " << entry.source << "\n";
                    ok = false;
                }
                if (ok) ++accepted;
                if (tool.json_out) {
                    json j = cert_to_json(cert);
                    j["theta"] = entry.decomposition.theta.to_string();
                    j["host"] = entry.decomposition.host.to_string();
                    j["source"] = entry.source;
                    report.push_back(j);
                } else {
                    std::cout << (ok ? "accept " : "REJECT ")
                              << entry.decomposition.theta.to_string() << " on "
                              << entry.decomposition.host.to_string() << "  ["
                              << entry.source << "]\n";
                    if (!ok) std::cout << to_text(cert);
                }
            }
            if (tool.json_out)
                std::cout << report.dump(2) << "\n";
            else
                std::cout << accepted << "/" << entries.size() << " accepted\n";
            return accepted == static_cast<long long>(entries.size()) ? kExitOk : kExitReject;
        }

        if (cmd_construct->parsed()) {
            ThetaGraph g = make_theta(ca, cb, cc);
            tool.load(budget);
            ConstructionPlan plan;
            try {
                plan = tool.ctor->plan(g, cn);
            } catch (const NotInSpectrum& e) {
                std::cerr << e.what() << "\n";
                if (cn >= 2 && !necessary_conditions(g, cn))
                    std::cerr << "necessary counting conditions fail for order " << cn << "\n";
                else if (cn >= 2)
                    std::cerr << "order " << cn << " is one of the small exceptions\n";
                return kExitSpectrum;
            }
            if (explain) std::cout << plan.describe();
            Decomposition d = tool.ctor->execute(plan);
            auto cert = verify_decomposition(d);
            if (tool.json_out) {
                json j = decomposition_to_json(d);
                j["certificate"] = cert_to_json(cert);
                std::cout << j.dump(2) << "\n";
            } else {
                std::cout << g.to_string() << " design of order " << cn << ": "
                          << d.base_blocks.size() << " blocks, "
                          << (cert.accept ? "verified" : "REJECTED") << "\n";
            }
            if (!out_path.empty()) {
                std::ofstream out(out_path);
                serialize_entry(CatalogueEntry{d, "constructed order " + std::to_string(cn)}, out);
            }
            return cert.accept ? kExitOk : kExitReject;
        }

        if (cmd_spectrum->parsed()) {
            ThetaGraph g = make_theta(sa, sb, sc);
            tool.load(budget);
            auto table = tool.ctor->spectrum_table(g, smax, sconstruct);
            long long members = 0;
            if (tool.json_out) {
                json j;
                j["schema"] = 1;
                j["theta"] = g.to_string();
                j["orders"] = json::array();
                for (auto [n, ok] : table)
                    if (ok) {
                        j["orders"].push_back(n);
                        ++members;
                    }
                std::cout << j.dump(2) << "\n";
            } else {
                std::cout << g.to_string() << " admissible orders up to " << smax << ":";
                for (auto [n, ok] : table)
                    if (ok) {
                        std::cout << " " << n;
                        ++members;
                    }
                std::cout << "\n" << members << " orders"
                          << (sconstruct ? ", all constructed and verified" : "") << "\n";
            }
            return kExitOk;
        }

        if (cmd_enumerate->parsed()) {
            auto list = enumerate_thetas(ee);
            long long bip = 0;
            if (tool.json_out) {
                json j;
                j["schema"] = 1;
                j["graphs"] = json::array();
                for (const auto& g : list) {
                    j["graphs"].push_back(
                        {{"a", g.a}, {"b", g.b}, {"c", g.c}, {"bipartite", g.bipartite()}});
                    if (g.bipartite()) ++bip;
                }
                j["count"] = list.size();
                j["bipartite"] = bip;
                std::cout << j.dump(2) << "\n";
            } else {
                for (const auto& g : list) {
                    std::cout << g.to_string() << (g.bipartite() ? "  bipartite" : "") << "\n";
                    if (g.bipartite()) ++bip;
                }
                std::cout << list.size() << " theta graphs with " << ee << " edges, " << bip
                          << " bipartite\n";
            }
            return kExitOk;
        }

        if (cmd_search->parsed()) {
            ThetaGraph g = make_theta(xa, xb, xc);
            SearchProblem p;
            p.theta = g;
            try {
                p.host = parse_host(host_spec, parts_spec);
                if (!act_spec.empty()) {
                    auto segs = detail::parse_segments(act_spec, 0);
                    std::vector<Point> fixpts;
                    if (!fix_spec.empty()) fixpts = detail::parse_ints(fix_spec, 0);
                    p.action = GroupAction(segs, fixpts);
                } else {
                    p.action = GroupAction::identity(p.host.points());
                }
            } catch (const std::exception& e) {
                std::cerr << "parse error: " << e.what() << "\n";
                return kExitParse;
            }
            p.developed_count = developed;
            long long total = copy_counts(g.edge_count(), p.host);
            p.fixed_count = fixed > 0 ? fixed
                                      : static_cast<int>(total - developed * p.action.order());
            if (p.fixed_count < 0) p.fixed_count = 0;
            p.budget = budget;
            p.jobs = tool.jobs;
            p.seed = seed_override ? seed_override : default_seed(p);
            Decomposition d;
            try {
                d = search(p);
            } catch (const BudgetExhausted& e) {
                std::cerr << e.what() << "\n";
                return kExitIngredient;
            } catch (const InfeasibleArity& e) {
                std::cerr << e.what() << "\n";
                return kExitParse;
            }
            append_derived(tool.cache_dir, d, p.seed, p.budget);
            if (tool.json_out) {
                std::cout << decomposition_to_json(d).dump(2) << "\n";
            } else {
                std::cout << "found: " << d.base_blocks.size() << " base blocks, "
                          << develop(d).size() << " developed; appended to derived catalogue\n";
            }
            return kExitOk;
        }

        if (cmd_catalogue->parsed()) {
            Catalogue cat;
            try {
                cat.load_directory(tool.catalogue_dir);
            } catch (const SyntaxError& e) {
                std::cerr << "parse error: " << e.what() << "\n";
                return kExitParse;
            }
            if (cat_mode == "export") {
                serialize(cat.entries(), std::cout);
            } else if (tool.json_out) {
                json j = json::array();
                for (const auto& e : cat.entries())
                    j.push_back({{"theta", e.decomposition.theta.to_string()},
                                 {"host", e.decomposition.host.to_string()},
                                 {"blocks", e.decomposition.base_blocks.size()},
                                 {"developed", e.decomposition.developed_count},
                                 {"source", e.source}});
                std::cout << j.dump(2) << "\n";
            } else {
                for (const auto& e : cat.entries())
                    std::cout << e.decomposition.theta.to_string() << " on "
                              << e.decomposition.host.to_string() << "  ("
                              << e.decomposition.base_blocks.size() << " base blocks, "
                              << e.decomposition.developed_count << " developed)\n";
                std::cout << cat.entries().size() << " entries\n";
            }
            return kExitOk;
        }
    } catch (const IngredientMissing& e) {
        std::cerr << e.what() << "\n";
        return kExitIngredient;
    } catch (const Unprovidable& e) {
        std::cerr << e.what() << "\n";
        return kExitIngredient;
    } catch (const BudgetExhausted& e) {
        std::cerr << e.what() << "\n";
        return kExitIngredient;
    } catch (const SyntaxError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return kExitParse;
    } catch (const std::exception& e) {
        std::cerr << e.what() << "\n";
        return kExitParse;
    }
    return kExitParse;
}
