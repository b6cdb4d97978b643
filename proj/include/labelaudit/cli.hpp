#pragma once

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "labelaudit/auditor.hpp"
#include "labelaudit/dataset_io.hpp"
#include "labelaudit/generators.hpp"
#include "labelaudit/overlap_model.hpp"
#include "labelaudit/report_json.hpp"
#include "labelaudit/reproduce.hpp"

namespace labelaudit {

enum ExitCode : int { kExitOk = 0, kExitUsage = 1, kExitData = 2, kExitReproFail = 3 };

/// Name of the environment variable holding the default output directory.
inline constexpr const char* kOutDirEnv = "LABELAUDIT_OUT_DIR";

namespace cli {

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Globals {
    std::uint64_t seed = 0;
    unsigned threads = 1;
    std::string out_dir;
};

inline unsigned workers(const Globals& g) { return g.threads == 0 ? default_workers() : g.threads; }

inline std::string resolve_out_dir(const std::string& flag) {
    if (!flag.empty()) return flag;
    if (const char* env = std::getenv(kOutDirEnv); env && *env) return env;
    return ".";
}

// Writes to `path`, or to `fallback` when path is empty or "-".
inline void emit(const std::string& path, const std::string& text, std::ostream& fallback) {
    if (path.empty() || path == "-") {
        fallback << text;
        return;
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) throw DataError("cannot write file: " + path);
    f << text;
    if (!f) throw DataError("failed writing file: " + path);
}

inline void require_file(const std::string& path) {
    if (!std::filesystem::is_regular_file(path)) throw DataError("input file not found: " + path);
}

inline std::string dump(const Json& j) { return j.dump(2) + "\n"; }

// "a:b" or "a:b:c" into numbers.
inline std::vector<double> parse_range(const std::string& text, std::size_t parts,
                                       const char* what) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ':')) {
        auto v = parse_number(item);
        if (!v) throw UsageError(std::string("bad ") + what + " '" + text + "'");
        out.push_back(*v);
    }
    if (out.size() != parts) throw UsageError(std::string("bad ") + what + " '" + text + "'");
    return out;
}

struct LoadedInput {
    CsvTable table;
    Dataset ds;
    std::optional<Partition> labels;
    bool normalized = false;
};

inline LoadedInput load_input(const std::string& path, const std::optional<std::string>& label_col,
                              const std::vector<std::string>& excluded, bool normalize) {
    require_file(path);
    CsvTable table = read_csv_file(path);
    Dataset ds = dataset_from_table(table, label_col, excluded);
    if (normalize) ds = normalize_minmax(ds);
    std::optional<Partition> labels;
    if (ds.has_labels()) labels = label_partition(ds);
    return {std::move(table), std::move(ds), std::move(labels), normalize};
}

inline Json input_json(const std::string& path, const LoadedInput& in,
                       const std::optional<std::string>& label_col) {
    Json j;
    j["data"] = path;
    j["label_column"] = label_col ? Json(*label_col) : Json(nullptr);
    j["normalized"] = in.normalized;
    j["n"] = in.ds.size();
    j["d"] = in.ds.dim();
    j["features"] = in.ds.feature_names();
    return j;
}

inline std::string fmt17(double v) { return detail::format_double(v); }

}  // namespace cli

/// Entry point shared by the executable and the tests. `args` excludes the
/// program name.
inline int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    using namespace cli;
    CLI::App app{"Audit whether class labels can serve as clustering ground truth", "labelaudit"};
    app.require_subcommand(1);
    app.fallthrough();
    Globals g;
    app.add_option("--seed", g.seed, "Random seed (default 0)");
    app.add_option("--threads", g.threads, "Worker threads, 0 = all cores (default 1)");
    app.add_option("--out-dir", g.out_dir,
                   std::string("Output directory (default $") + kOutDirEnv + " or .)");

    // generate
    auto* gen = app.add_subcommand("generate", "Write a synthetic preset as CSV");
    std::string preset;
    std::string gen_out;
    gen->add_option("--preset", preset, "Preset name")->required()->check(CLI::IsMember(preset_names()));
    gen->add_option("--out", gen_out, "Output CSV (default stdout)");

    // metrics
    auto* met = app.add_subcommand("metrics", "Score one clustering of a CSV dataset");
    std::string data;
    std::optional<std::string> label_col;
    std::optional<std::string> cluster_col;
    std::optional<std::size_t> km_k;
    std::optional<double> db_eps;
    std::size_t min_pts = 4;
    std::string normalizer_name = "arithmetic";
    bool no_normalize = false;
    std::string json_out;
    auto add_data_opts = [&](CLI::App* sub, bool labels_required) {
        sub->add_option("--data", data, "Input CSV with a header row")->required();
        auto* lc = sub->add_option("--label-column", label_col, "Column holding class labels");
        if (labels_required) lc->required();
        sub->add_option("--normalizer", normalizer_name, "NMI/AMI normalizer")
            ->check(CLI::IsMember({"geometric", "arithmetic", "max", "min"}));
        sub->add_flag("--no-normalize", no_normalize, "Skip min-max scaling of features");
        sub->add_option("--out", json_out, "Output JSON (default stdout)");
    };
    add_data_opts(met, false);
    auto* o_cc = met->add_option("--cluster-column", cluster_col, "Column holding cluster ids (-1 or 'noise' = noise)");
    auto* o_km = met->add_option("--kmeans", km_k, "Run k-means with this k");
    auto* o_db = met->add_option("--dbscan-eps", db_eps, "Run DBSCAN with this eps");
    met->add_option("--min-pts", min_pts, "DBSCAN min_pts, point itself included (default 4)");
    o_cc->excludes(o_km)->excludes(o_db);
    o_km->excludes(o_db);

    // sweep
    auto* swp = app.add_subcommand("sweep", "Score a grid of clusterings against the labels");
    add_data_opts(swp, true);
    std::string km_range;
    std::string db_range;
    std::string sweep_csv;
    swp->add_option("--kmeans-range", km_range, "k-means cells K_MIN:K_MAX");
    swp->add_option("--dbscan-range", db_range, "DBSCAN cells FIRST:LAST:STEP");
    swp->add_option("--min-pts", min_pts, "DBSCAN min_pts (default 4)");
    swp->add_option("--csv", sweep_csv, "Also write one CSV row per cell");

    // audit
    auto* aud = app.add_subcommand("audit", "Full label-vs-structure audit");
    add_data_opts(aud, true);
    AuditConfig acfg;
    aud->add_option("--min-pts", acfg.min_pts, "DBSCAN min_pts inside each class (default 4)");
    aud->add_option("--kn", acfg.kn, "Neighbours for the mixing score (default 10)");
    aud->add_option("--minor-fraction", acfg.minor_fraction, "Smallest part that makes a split (default 0.10)");
    aud->add_option("--mixing-threshold", acfg.mixing_threshold, "Mixing score that flags overlap (default 0.20)");
    aud->add_option("--min-prominence", acfg.min_prominence, "Density peak prominence (default 0.10)");
    aud->add_option("--kmeans-range", km_range, "Sweep cells K_MIN:K_MAX (default 1:classes+2)");

    // simulate-overlap
    auto* sim = app.add_subcommand("simulate-overlap", "Probability that k random circles are disjoint");
    double r = 0.01;
    double w = 1.0;
    std::size_t k_min = 2;
    std::size_t k_max = 100;
    std::size_t trials = 10000;
    bool inset = false;
    std::string sim_out;
    std::string sim_json;
    sim->add_option("--r", r, "Circle radius (default 0.01)");
    sim->add_option("--w", w, "Box width (default 1)");
    sim->add_option("--k-min", k_min, "Smallest k (default 2)");
    sim->add_option("--k-max", k_max, "Largest k (default 100)");
    sim->add_option("--trials", trials, "Monte Carlo trials per k (default 10000)");
    sim->add_flag("--inset", inset, "Keep whole circles inside the box");
    sim->add_option("--out", sim_out, "Output CSV (default stdout)");
    sim->add_option("--json", sim_json, "Also write a JSON report");

    // reproduce
    auto* rep = app.add_subcommand("reproduce", "Re-run a published result and check it");
    std::string target;
    std::size_t seeds = 20;
    std::string rep_json;
    rep->add_option("target", target, "One of: table1, table2-analog, table3-analog, fig6")
        ->required()
        ->check(CLI::IsMember(repro_targets()));
    rep->add_option("--seeds", seeds, "Seeds per scenario (default 20)");
    rep->add_option("--json", rep_json, "Also write a JSON report");

    std::vector<std::string> argv_store{"labelaudit"};
    argv_store.insert(argv_store.end(), args.begin(), args.end());
    std::vector<char*> argv;
    for (auto& s : argv_store) argv.push_back(s.data());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        const unsigned nw = workers(g);
        const Normalizer how = *parse_normalizer(normalizer_name);

        if (gen->parsed()) {
            std::ostringstream os;
            write_dataset_csv(os, make_preset(preset, g.seed));
            emit(gen_out, os.str(), out);
            return kExitOk;
        }

        if (met->parsed()) {
            std::vector<std::string> excluded;
            if (cluster_col) excluded.push_back(*cluster_col);
            if (cluster_col && label_col && *cluster_col == *label_col) excluded.clear();
            const auto in = load_input(data, label_col, excluded, !no_normalize);
            Json clustering;
            Partition p;
            if (cluster_col) {
                p = Partition::from_ids(encode_column(in.table, *cluster_col, {"-1", "noise", "NOISE"}));
                clustering = {{"source", "column"}, {"column", *cluster_col}};
            } else if (km_k) {
                KMeansConfig c;
                c.k = *km_k;
                c.seed = g.seed;
                p = kmeans(in.ds, c, nw);
                clustering = to_json(ClustererSpec{c});
            } else if (db_eps) {
                DbscanConfig c{*db_eps, min_pts};
                p = dbscan(in.ds, c, nw);
                clustering = to_json(ClustererSpec{c});
            } else {
                throw UsageError("choose a clustering: --cluster-column, --kmeans or --dbscan-eps");
            }
            const MetricReport mr = evaluate(in.ds, p, in.labels, how, nw);
            Json j;
            j["schema_version"] = kSchemaVersion;
            j["kind"] = "metrics";
            j["input"] = input_json(data, in, label_col);
            j["clustering"] = std::move(clustering);
            j["metrics"] = to_json(mr);
            emit(json_out, dump(j), out);
            return kExitOk;
        }

        if (swp->parsed()) {
            const auto in = load_input(data, label_col, {}, !no_normalize);
            std::vector<ClustererSpec> grid;
            if (!km_range.empty()) {
                const auto v = parse_range(km_range, 2, "k-means range");
                grid = kmeans_grid(static_cast<std::size_t>(v[0]), static_cast<std::size_t>(v[1]), g.seed);
            }
            if (!db_range.empty()) {
                const auto v = parse_range(db_range, 3, "DBSCAN range");
                for (auto& c : dbscan_grid(v[0], v[1], v[2], min_pts)) grid.push_back(c);
            }
            if (grid.empty()) {
                AuditConfig c;
                c.seed = g.seed;
                grid = default_audit_grid(in.ds, *in.labels, c);
            }
            const SweepResult s = sweep(in.ds, *in.labels, grid, how, nw);
            Json j;
            j["schema_version"] = kSchemaVersion;
            j["kind"] = "sweep";
            j["input"] = input_json(data, in, label_col);
            j["sweep"] = to_json(s);
            emit(json_out, dump(j), out);
            if (!sweep_csv.empty()) {
                std::ostringstream os;
                os << "cell,clusterer,clusters,noise,dbi,sc,ri,ari,mi,nmi,ami\n";
                auto cell = [](const std::optional<double>& v) { return v ? fmt17(*v) : std::string(); };
                for (std::size_t c = 0; c < s.cells.size(); ++c) {
                    const auto& m = s.cells[c].report;
                    os << c << ',' << detail::csv_escape(describe(s.cells[c].spec)) << ',' << m.clusters
                       << ',' << m.noise << ',' << cell(m.dbi) << ',' << cell(m.sc) << ',' << cell(m.ri)
                       << ',' << cell(m.ari) << ',' << cell(m.mi) << ',' << cell(m.nmi) << ','
                       << cell(m.ami) << '\n';
                }
                emit(sweep_csv, os.str(), out);
            }
            return kExitOk;
        }

        if (aud->parsed()) {
            const auto in = load_input(data, label_col, {}, !no_normalize);
            acfg.seed = g.seed;
            acfg.workers = nw;
            acfg.normalizer = how;
            if (!km_range.empty()) {
                const auto v = parse_range(km_range, 2, "k-means range");
                acfg.grid = kmeans_grid(static_cast<std::size_t>(v[0]), static_cast<std::size_t>(v[1]),
                                        g.seed, acfg.kmeans_restarts);
            }
            const std::filesystem::path dir = resolve_out_dir(g.out_dir);
            std::error_code ec;
            std::filesystem::create_directories(dir, ec);
            if (ec) throw DataError("cannot create output directory: " + dir.string());

            const AuditReport ar = audit(in.ds, *in.labels, acfg);
            Json j = to_json(ar, acfg);
            j["input"] = input_json(data, in, label_col);
            emit((dir / "audit.json").string(), dump(j), out);
            const std::string summary = summary_text(ar);
            emit((dir / "summary.txt").string(), summary, out);

            // plot data: projection, per-class k-dist curves, per-class axis densities
            std::vector<std::size_t> axes(ar.pca.count());
            for (std::size_t a = 0; a < axes.size(); ++a) axes[a] = a;
            const Dataset proj = pca_project(in.ds, ar.pca, axes);
            {
                std::ostringstream os;
                write_dataset_csv(os, proj.with_labels(in.ds.labels()));
                emit((dir / "projection.csv").string(), os.str(), out);
            }
            const auto members = detail::class_members(*in.labels);
            std::ostringstream kd;
            std::ostringstream dens;
            kd << "class,rank,distance\n";
            dens << "class,axis,x,density\n";
            for (std::size_t c = 0; c < members.size(); ++c) {
                if (ar.splits[c].insufficient) continue;
                const Dataset sub = in.ds.subset(members[c]);
                const auto curve = k_dist_curve(sub, std::min(acfg.min_pts, sub.size() - 1));
                for (std::size_t i = 0; i < curve.size(); ++i) kd << c << ',' << i << ',' << fmt17(curve[i]) << '\n';
                for (std::size_t a = 0; a < axes.size(); ++a) {
                    std::vector<double> vals;
                    for (std::size_t m : members[c]) vals.push_back(proj.at(m, a));
                    const auto dc = density_profile(vals, silverman_bandwidth(vals));
                    for (std::size_t t = 0; t < dc.grid.size(); ++t) {
                        dens << c << ',' << a << ',' << fmt17(dc.grid[t]) << ',' << fmt17(dc.density[t]) << '\n';
                    }
                }
            }
            emit((dir / "kdist.csv").string(), kd.str(), out);
            emit((dir / "density.csv").string(), dens.str(), out);
            out << summary;
            return kExitOk;
        }

        if (sim->parsed()) {
            const auto rows = overlap_curve(k_min, k_max, r, w, trials, g.seed, inset, nw);
            std::ostringstream os;
            os << "k,exact,approx,monte_carlo,stderr\n";
            for (const auto& row : rows) {
                os << row.k << ',' << fmt17(row.exact) << ',' << fmt17(row.approx) << ','
                   << fmt17(row.monte_carlo) << ',' << fmt17(row.stderr_) << '\n';
            }
            emit(sim_out, os.str(), out);
            if (!sim_json.empty()) {
                Json j;
                j["schema_version"] = kSchemaVersion;
                j["kind"] = "simulate-overlap";
                j["config"] = {{"r", r}, {"w", w}, {"k_min", k_min}, {"k_max", k_max},
                               {"trials", trials}, {"seed", g.seed}, {"inset", inset}};
                Json arr = Json::array();
                for (const auto& row : rows) {
                    arr.push_back({{"k", row.k}, {"exact", row.exact}, {"approx", row.approx},
                                   {"monte_carlo", row.monte_carlo}, {"stderr", row.stderr_}});
                }
                j["rows"] = std::move(arr);
                emit(sim_json, dump(j), out);
            }
            return kExitOk;
        }

        if (rep->parsed()) {
            if (seeds == 0) throw UsageError("--seeds must be >= 1");
            ReproOptions opt{seeds, g.seed, nw};
            const ReproReport rr = reproduce(target, opt);
            out << format_report(rr);
            if (!rep_json.empty()) {
                Json j;
                j["schema_version"] = kSchemaVersion;
                j["kind"] = "reproduce";
                j["target"] = rr.target;
                j["seeds"] = seeds;
                Json checks = Json::array();
                for (const auto& c : rr.checks) {
                    checks.push_back({{"name", c.name}, {"measured", c.measured},
                                      {"expected", c.expected}, {"pass", c.pass}});
                }
                j["checks"] = std::move(checks);
                j["passed"] = rr.passed();
                emit(rep_json, dump(j), out);
            }
            return rr.passed() ? kExitOk : kExitReproFail;
        }
    } catch (const UsageError& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitData;
    }
    return kExitUsage;
}

inline int run_cli(int argc, char** argv, std::ostream& out = std::cout,
                   std::ostream& err = std::cerr) {
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
    return run_cli(args, out, err);
}

}  // namespace labelaudit
