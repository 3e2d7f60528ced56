// bks: Kochen-Specker sets, bipartite-KS searches and the games they induce.
#include <chrono>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "bks/catalog.hpp"
#include "bks/games.hpp"
#include "bks/io.hpp"
#include "bks/search.hpp"
#include "bks/symmetry.hpp"
#include "bks/version.hpp"

using namespace bks;

namespace {

enum ExitCode { kOk = 0, kUsage = 1, kValidation = 2, kRejected = 3 };

struct Timer {
    std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
    double ms() const {
        return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
            .count();
    }
};

std::string echo_command(int argc, char** argv) {
    std::string out;
    for (int i = 1; i < argc; ++i) {
        if (i > 1) out += ' ';
        out += argv[i];
    }
    return out;
}

void print_report(const ordered_json& j) { std::cout << j.dump(1) << "\n"; }

std::vector<int> parse_labels(const std::string& csv) {
    std::vector<int> out;
    std::string cur;
    for (char c : csv) {
        if (c == ',') {
            if (!cur.empty()) out.push_back(std::stoi(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (!cur.empty()) out.push_back(std::stoi(cur));
    if (out.empty()) throw std::invalid_argument("empty basis list");
    return out;
}

ordered_json validation_payload(const KSDocument& doc) {
    const auto& inst = doc.instance;
    auto rep = validate(inst);
    ordered_json checks = ordered_json::array();
    for (const auto& c : rep.checks) {
        ordered_json jc;
        jc["check"] = c.name;
        jc["passed"] = c.passed;
        if (!c.detail.empty()) jc["detail"] = c.detail;
        checks.push_back(jc);
    }
    bool ok = rep.ok();
    const Expected& e = doc.expected;
    auto expect = [&](const char* what, long long got, long long want) {
        ordered_json jc;
        jc["check"] = std::string("expected ") + what;
        jc["passed"] = got == want;
        jc["got"] = got;
        jc["want"] = want;
        checks.push_back(jc);
        ok = ok && got == want;
    };
    if (e.vector_count) expect("vector count", inst.n(), *e.vector_count);
    if (e.basis_count) expect("basis count", inst.m(), *e.basis_count);
    if (e.dimension) expect("dimension", inst.dimension(), *e.dimension);
    if (e.per_vector_basis_count) {
        bool all = true;
        for (int v = 0; v < inst.n(); ++v) {
            int cnt = 0;
            for (const auto& b : inst.bases()) cnt += (b.mask >> v) & 1;
            if (cnt != *e.per_vector_basis_count) all = false;
        }
        ordered_json jc;
        jc["check"] = "expected per-vector basis membership";
        jc["passed"] = all;
        checks.push_back(jc);
        ok = ok && all;
    }
    ordered_json payload;
    payload["operation"] = "validate";
    payload["name"] = inst.name();
    payload["dimension"] = inst.dimension();
    payload["vectors"] = inst.n();
    payload["bases"] = inst.m();
    payload["coordinate_backed"] = inst.coordinate_backed();
    payload["checks"] = checks;
    payload["ok"] = ok;
    return payload;
}

ordered_json labels_json(const KSInstance& inst, Mask mask) {
    ordered_json out = ordered_json::array();
    for (int lab : inst.labels_of(mask)) out.push_back(lab);
    return out;
}

ordered_json search_payload(const KSInstance& inst, const SearchReport& rep) {
    ordered_json p;
    p["operation"] = "optimal";
    p["name"] = inst.name();
    p["strategy"] = rep.strategy;
    p["is_ks"] = rep.is_ks;
    if (!rep.is_ks) {
        ordered_json w = ordered_json::array();
        for (int v = 0; v < inst.n(); ++v)
            if (rep.ks_witness[v]) w.push_back(inst.ids()[v]);
        p["coloring_witness"] = w;
        return p;
    }
    auto [a, b] = rep.sizes();
    p["optimal"] = {{"sa_labels", labels_json(inst, rep.best_sa)},
                    {"sb_labels", labels_json(inst, rep.best_sb)},
                    {"sizes", {a, b}},
                    {"product", rep.omega}};
    p["k_min"] = rep.k_min;
    p["k_max"] = rep.k_max;
    ordered_json improvements = ordered_json::array();
    for (const auto& imp : rep.improvements)
        improvements.push_back({{"k", imp.k},
                                {"sa_labels", labels_json(inst, imp.sa)},
                                {"sb_labels", labels_json(inst, imp.sb)},
                                {"product", imp.product}});
    p["improvements"] = improvements;
    ordered_json sizes = ordered_json::array();
    for (const auto& c : rep.per_size)
        sizes.push_back({{"k", c.k},
                         {"enumerated", c.enumerated},
                         {"capability_solver_calls", c.solver_calls},
                         {"capability_pruned", c.pruned},
                         {"skipped_noncanonical", c.skipped_noncanonical},
                         {"capable", c.capable},
                         {"pair_checks", c.pair_checks},
                         {"pair_hits", c.pair_hits}});
    p["per_size"] = sizes;
    p["checks"] = {{"reverified", rep.reverified},
                   {"cardinality_bound", rep.cardinality_bound_ok},
                   {"equivalence_audited", rep.equivalence_checked},
                   {"equivalence_mismatches", rep.equivalence_mismatches}};
    return p;
}

ordered_json census_payload(const KSInstance& inst, const CensusReport& rep, bool essential,
                            bool iso) {
    ordered_json p;
    p["operation"] = "census";
    p["name"] = inst.name();
    p["range"] = {rep.min_size, rep.max_size};
    ordered_json rows = ordered_json::array();
    for (const auto& [size, count] : rep.capable_by_size) {
        ordered_json row;
        row["size"] = size;
        row["capable"] = count;
        {
            auto it = rep.essential_by_size.find(size);
            row["essential"] = it == rep.essential_by_size.end() ? 0 : it->second;
        }
        if (iso) {
            auto ic = rep.iso_capable.find(size);
            row["iso_capable"] = ic == rep.iso_capable.end() ? 0 : ic->second;
            auto ie = rep.iso_essential.find(size);
            row["iso_essential"] = ie == rep.iso_essential.end() ? 0 : ie->second;
        }
        rows.push_back(row);
    }
    p["rows"] = rows;
    p["capable_total"] = rep.capable_total();
    p["essential_total"] = rep.essential_total();
    if (essential) {
        ordered_json ess = ordered_json::array();
        for (Mask s : rep.essential) ess.push_back(labels_json(inst, s));
        p["essential_sets"] = ess;
    }
    ordered_json counters = ordered_json::array();
    for (const auto& c : rep.per_size)
        counters.push_back({{"k", c.k},
                            {"enumerated", c.enumerated},
                            {"capability_solver_calls", c.solver_calls},
                            {"capability_pruned", c.pruned}});
    p["counters"] = counters;
    return p;
}

SearchOptions make_options(int jobs, bool symmetric, bool two_phase, bool deep, bool audit,
                           bool progress) {
    SearchOptions opts;
    opts.jobs = jobs;
    opts.symmetric = symmetric;
    opts.two_phase = two_phase;
    opts.deep = deep;
    opts.audit_equivalence = audit;
    if (deep) {
        if (const char* dir = std::getenv("BKS_CACHE_DIR")) opts.checkpoint_dir = dir;
    }
    if (progress || deep)
        opts.progress = [](const nlohmann::ordered_json& ev) { std::cerr << ev.dump() << "\n"; };
    return opts;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Kochen-Specker sets, bipartite-KS searches, and their nonlocal games"};
    app.set_version_flag("--version", std::string(kToolName) + " " + kToolVersion);
    app.require_subcommand(1);
    std::string command = echo_command(argc, argv);

    std::string name, out_path, sa_csv, sb_csv, cnf_path, mode = "ks";
    int jobs = 1, min_size = 3, max_size = -1;
    bool symmetric = false, two_phase = false, deep = false, audit = false, progress = false;
    bool essential = false, iso = false;
    std::uint64_t simulate = 0, seed = 1;

    auto* c_validate = app.add_subcommand("validate", "structural checks for a set or file");
    c_validate->add_option("name", name)->required();
    c_validate->add_option("--emit-cnf", cnf_path, "write the noncolorability problem as CNF");

    auto* c_optimal = app.add_subcommand("optimal", "minimum-input-cardinality B-KS pair");
    c_optimal->add_option("name", name)->required();
    c_optimal->add_flag("--symmetric", symmetric, "store one capable set per isomorphism class");
    c_optimal->add_flag("--two-phase", two_phase, "scan |S_A| and |S_B| separately (implies symmetry)");
    c_optimal->add_flag("--deep", deep, "allow long-running instances; enables checkpoints");
    c_optimal->add_flag("--audit", audit, "double-check every capability decision");
    c_optimal->add_flag("--progress", progress, "stream progress events to stderr");
    c_optimal->add_option("--jobs", jobs, "worker threads (never changes the payload)");

    auto* c_census = app.add_subcommand("census", "enumerate B-KS capable subsets");
    c_census->add_option("name", name)->required();
    c_census->add_flag("--essential", essential, "also list the essential sets");
    c_census->add_flag("--iso", iso, "also count isomorphism classes");
    c_census->add_flag("--deep", deep);
    c_census->add_flag("--audit", audit);
    c_census->add_flag("--progress", progress);
    c_census->add_option("--jobs", jobs);
    c_census->add_option("--min", min_size, "smallest subset size (default 3)");
    c_census->add_option("--max", max_size, "largest subset size (default all)");

    auto* c_game = app.add_subcommand("game", "build and evaluate the nonlocal game of a pair");
    c_game->add_option("name", name)->required();
    c_game->add_option("--sa", sa_csv, "Alice bases (1-based labels, comma separated)")->required();
    c_game->add_option("--sb", sb_csv, "Bob bases")->required();
    c_game->add_option("--jobs", jobs, "worker threads for the classical value");
    c_game->add_option("--simulate", simulate, "Monte-Carlo trials of the quantum strategy (demo)");
    c_game->add_option("--seed", seed, "simulation seed");
    c_game->add_option("--emit-cnf", cnf_path, "write the pair feasibility problem as CNF");

    auto* c_export = app.add_subcommand("export", "write a canonical set file");
    c_export->add_option("name", name)->required();
    c_export->add_option("-o,--output", out_path)->required();

    auto* c_import = app.add_subcommand("import", "read and validate a set file");
    c_import->add_option("name", name)->required();
    c_import->add_option("-o,--output", out_path, "re-emit canonically");

    auto* c_list = app.add_subcommand("list", "bundled sets and their reference data");

    auto* c_cnf = app.add_subcommand("cnf", "emit a feasibility problem in CNF form");
    c_cnf->add_option("name", name)->required();
    c_cnf->add_option("--mode", mode, "ks | capable | bks")
        ->check(CLI::IsMember({"ks", "capable", "bks"}));
    c_cnf->add_option("--sa", sa_csv);
    c_cnf->add_option("--sb", sb_csv);
    c_cnf->add_option("-o,--output", out_path)->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kOk : kUsage;
    }

    Timer timer;
    try {
        if (*c_list) {
            ordered_json sets = ordered_json::array();
            for (const auto& nm : catalog::names()) {
                auto doc = catalog::get(nm);
                ordered_json row;
                row["name"] = nm;
                row["dimension"] = doc.instance.dimension();
                row["vectors"] = doc.instance.n();
                row["bases"] = doc.instance.m();
                row["coordinate_backed"] = doc.instance.coordinate_backed();
                if (doc.expected.optimal_sizes) {
                    row["optimal_sizes"] = {doc.expected.optimal_sizes->first,
                                            doc.expected.optimal_sizes->second};
                    if (doc.expected.optimal_conflict) row["optimal_status"] = "conflict";
                    if (doc.expected.deep) row["deep"] = true;
                }
                row["fingerprint"] = fingerprint(doc.instance);
                sets.push_back(row);
            }
            ordered_json j;
            j["tool"] = {{"name", kToolName}, {"version", kToolVersion}};
            j["command"] = command;
            j["payload"] = {{"operation", "list"}, {"sets", sets}};
            j["timing"] = {{"wall_ms", timer.ms()}};
            print_report(j);
            return kOk;
        }

        if (*c_validate) {
            auto doc = catalog::get_or_load(name);
            if (!cnf_path.empty()) {
                std::ofstream out(cnf_path);
                encode_ks(doc.instance).write_cnf(out);
            }
            auto payload = validation_payload(doc);
            bool ok = payload["ok"].get<bool>();
            print_report(make_report(command, doc.instance, payload, timer.ms()));
            return ok ? kOk : kValidation;
        }

        if (*c_import) {
            auto doc = load_ks_file(name);
            auto payload = validation_payload(doc);
            payload["operation"] = "import";
            if (!doc.checksum.empty()) {
                bool match = doc.checksum == fingerprint(doc.instance);
                payload["checksum_match"] = match;
                if (!match) payload["ok"] = false;
            }
            bool ok = payload["ok"].get<bool>();
            if (!out_path.empty() && ok) {
                std::ofstream out(out_path);
                out << serialize_ks_document(doc.instance, doc.metadata).dump(1) << "\n";
            }
            print_report(make_report(command, doc.instance, payload, timer.ms()));
            return ok ? kOk : kValidation;
        }

        if (*c_export) {
            auto doc = catalog::get_or_load(name);
            std::ofstream out(out_path);
            if (!out) throw std::invalid_argument("cannot write " + out_path);
            out << serialize_ks_document(doc.instance, doc.metadata).dump(1) << "\n";
            ordered_json payload = {{"operation", "export"},
                                    {"path", out_path},
                                    {"fingerprint", fingerprint(doc.instance)}};
            print_report(make_report(command, doc.instance, payload, timer.ms()));
            return kOk;
        }

        if (*c_cnf) {
            auto doc = catalog::get_or_load(name);
            FeasibilityProblem p;
            if (mode == "ks") {
                p = encode_ks(doc.instance);
            } else if (mode == "capable") {
                Mask sa = doc.instance.mask_of_labels(parse_labels(sa_csv));
                p = encode_bks_capable(doc.instance, sa);
            } else {
                Mask sa = doc.instance.mask_of_labels(parse_labels(sa_csv));
                Mask sb = doc.instance.mask_of_labels(parse_labels(sb_csv));
                p = encode_bks(doc.instance, sa, sb);
            }
            std::ofstream out(out_path);
            if (!out) throw std::invalid_argument("cannot write " + out_path);
            p.write_cnf(out);
            ordered_json payload = {{"operation", "cnf"},
                                    {"mode", mode},
                                    {"path", out_path},
                                    {"variables", p.num_vars()}};
            print_report(make_report(command, doc.instance, payload, timer.ms()));
            return kOk;
        }

        if (*c_optimal) {
            auto doc = catalog::get_or_load(name);
            bool needs_deep = doc.expected.deep || doc.expected.optimal_conflict;
            if (needs_deep && !deep)
                throw std::invalid_argument(doc.instance.name() +
                                            ": long-running search; re-run with --deep");
            auto opts = make_options(jobs, symmetric, two_phase, deep, audit, progress);
            auto rep = optimal_bks(doc.instance, opts);
            auto payload = search_payload(doc.instance, rep);
            if (doc.expected.optimal_sizes && rep.is_ks) {
                auto [a, b] = rep.sizes();
                ordered_json ref;
                ref["sizes"] = {doc.expected.optimal_sizes->first,
                                doc.expected.optimal_sizes->second};
                ref["match"] = std::pair(a, b) == *doc.expected.optimal_sizes;
                if (doc.expected.optimal_alt_sizes) {
                    ref["alt_sizes"] = {doc.expected.optimal_alt_sizes->first,
                                        doc.expected.optimal_alt_sizes->second};
                    ref["alt_match"] = std::pair(a, b) == *doc.expected.optimal_alt_sizes;
                    ref["status"] = "sources conflict; computed result decides";
                }
                payload["reference"] = ref;
            }
            print_report(make_report(command, doc.instance, payload, timer.ms()));
            return rep.is_ks ? kOk : kRejected;
        }

        if (*c_census) {
            auto doc = catalog::get_or_load(name);
            int max_k = max_size < 0 ? doc.instance.m() : std::min(max_size, doc.instance.m());
            if (doc.instance.m() > 20 && max_k > 20 && !deep)
                throw std::invalid_argument(doc.instance.name() +
                                            ": census over >20 bases; re-run with --deep or --max");
            if (max_k > 32 && doc.instance.m() > 32)
                throw std::invalid_argument(doc.instance.name() +
                                            ": raw census over >32 bases is unsupported; use --max");
            auto opts = make_options(jobs, false, false, deep, audit, progress);
            auto rep = census(doc.instance, opts, iso, min_size, max_k);
            auto payload = census_payload(doc.instance, rep, essential, iso);
            print_report(make_report(command, doc.instance, payload, timer.ms()));
            return kOk;
        }

        if (*c_game) {
            auto doc = catalog::get_or_load(name);
            const auto& inst = doc.instance;
            Mask sa = inst.mask_of_labels(parse_labels(sa_csv));
            Mask sb = inst.mask_of_labels(parse_labels(sb_csv));
            auto game = build_game(inst, sa, sb);
            if (!cnf_path.empty()) {
                std::ofstream out(cnf_path);
                encode_bks(inst, sa, sb).write_cnf(out);
            }
            FeasibilityProblem p;
            encode_bks_into(inst, sa, sb, p);
            bool bks = solve(p).status == Feasibility::infeasible;
            Rational cv = classical_value(game, jobs);
            auto cert = verify_quantum_perfect(game);
            ordered_json payload;
            payload["operation"] = "game";
            payload["name"] = inst.name();
            payload["sa_labels"] = labels_json(inst, sa);
            payload["sb_labels"] = labels_json(inst, sb);
            payload["inputs"] = {game.alice_inputs(), game.bob_inputs()};
            payload["pi"] = "1/" + std::to_string(game.input_pairs());
            payload["bks"] = bks;
            payload["classical_value"] = cv.str();
            payload["classical_perfect"] = cv == 1;
            payload["quantum"] = {{"verifiable", cert.verifiable},
                                  {"perfect", cert.verifiable && cert.perfect},
                                  {"support_equals_win", cert.support_equals_win},
                                  {"normalization_exact", cert.normalization_exact}};
            payload["bpqs"] = cert.verifiable && cert.perfect && cv < 1;
            if (game.input_pairs() * inst.dimension() * inst.dimension() <= 4096) {
                ordered_json table = ordered_json::array();
                for (int x : game.alice_bases)
                    for (int y : game.bob_bases) {
                        ordered_json entry;
                        entry["x"] = inst.basis(x).label;
                        entry["y"] = inst.basis(y).label;
                        ordered_json wins = ordered_json::array();
                        for (int va : inst.basis(x).members)
                            for (int vb : inst.basis(y).members)
                                if (game.win(va, vb))
                                    wins.push_back({inst.ids()[va], inst.ids()[vb]});
                        entry["winning_pairs"] = wins;
                        table.push_back(entry);
                    }
                payload["win_table"] = table;
            } else {
                payload["win_table_omitted"] = true;
            }
            if (simulate > 0) {
                double rate = simulate_quantum_strategy(game, simulate, seed);
                std::cerr << "{\"ev\":\"simulation\",\"trials\":" << simulate
                          << ",\"win_rate\":" << rate << "}\n";
            }
            print_report(make_report(command, inst, payload, timer.ms()));
            return kOk;
        }
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kValidation;
    }
    return kUsage;
}
