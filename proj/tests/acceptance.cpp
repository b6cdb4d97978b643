// Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any failure.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>

#include "labelaudit/cli.hpp"
#include "oracles.hpp"
#include "property_suite.hpp"

using namespace labelaudit;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Result {
    bool pass = true;
    std::string detail;
};

void fail(Result& r, const std::string& why) {
    r.pass = false;
    if (!r.detail.empty()) r.detail += "; ";
    r.detail += why;
}

void absorb(Result& r, const ReproReport& rep) {
    for (const auto& c : rep.checks) {
        if (!c.pass) fail(r, c.name + " (measured " + c.measured + ", expected " + c.expected + ")");
    }
}

Result ac1() {
    Result r;
    const auto t0 = Clock::now();
    const ContingencyTable t({{800, 0}, {0, 1000}, {0, 1200}});
    const double mi = mutual_info(t), nm = nmi(t), am = ami(t), ar = rand_ari(t).ari;
    const double dt = seconds_since(t0);
    if (std::abs(mi - 0.580) > 0.002) fail(r, "MI " + std::to_string(mi));
    if (std::abs(nm - 0.697) > 0.003) fail(r, "NMI " + std::to_string(nm));
    if (std::abs(am - 0.696) > 0.004) fail(r, "AMI " + std::to_string(am));
    if (std::abs(ar - 0.501) > 0.002) fail(r, "ARI " + std::to_string(ar));
    if (dt >= 1.0) fail(r, "runtime " + std::to_string(dt) + " s");
    if (r.pass) {
        std::ostringstream os;
        os << "MI " << mi << ", NMI " << nm << ", AMI " << am << ", ARI " << ar;
        r.detail = os.str();
    }
    return r;
}

Result ac2() {
    Result r;
    const auto rep = reproduce_table1();
    absorb(r, rep);
    double worst = 0.0;
    for (double s : rep.seed_seconds) worst = std::max(worst, s);
    if (worst >= 5.0) fail(r, "slowest seed " + std::to_string(worst) + " s");
    if (r.pass) r.detail = std::to_string(rep.checks.size()) + " checks, slowest seed " + std::to_string(worst) + " s";
    return r;
}

Result ac3() {
    Result r;
    const auto t0 = Clock::now();
    const auto rep = reproduce_fig6();
    const double dt = seconds_since(t0);
    absorb(r, rep);
    if (dt >= 10.0) fail(r, "runtime " + std::to_string(dt) + " s");
    if (r.pass) r.detail = std::to_string(rep.checks.size()) + " checks in " + std::to_string(dt) + " s";
    return r;
}

Result ac4() {
    Result r;
    std::mt19937_64 rng(2024);
    double worst_ari = 0.0;
    for (int rep = 0; rep < 200; ++rep) {
        const std::size_t n = std::uniform_int_distribution<std::size_t>(2, 12)(rng);
        const int ka = std::uniform_int_distribution<int>(1, 5)(rng);
        const int kb = std::uniform_int_distribution<int>(1, 5)(rng);
        const auto a = oracle::random_labels(rng, n, ka);
        const auto b = oracle::random_labels(rng, n, kb);
        const double got = rand_ari(contingency(Partition::from_ids(a), Partition::from_ids(b))).ari;
        worst_ari = std::max(worst_ari, std::abs(got - oracle::pair_counting_ari(a, b)));
    }
    double worst_emi = 0.0;
    for (int rep = 0; rep < 50; ++rep) {
        const std::int64_t n = std::uniform_int_distribution<std::int64_t>(2, 8)(rng);
        const auto a = oracle::random_split2(rng, n);
        const auto b = oracle::random_split2(rng, n);
        worst_emi = std::max(worst_emi, std::abs(expected_mi(a, b, n) - oracle::permutation_expected_mi(a, b)));
    }
    if (worst_ari > 1e-12) fail(r, "ARI deviation " + std::to_string(worst_ari));
    if (worst_emi > 1e-10) fail(r, "EMI deviation " + std::to_string(worst_emi));
    if (r.pass) {
        std::ostringstream os;
        os << "max ARI deviation " << worst_ari << ", max EMI deviation " << worst_emi;
        r.detail = os.str();
    }
    return r;
}

Result ac5() {
    Result r;
    const auto t0 = Clock::now();
    const auto o = props::run(1000, 7);
    const double dt = seconds_since(t0);
    if (o.cases != 1000) fail(r, std::to_string(o.cases) + " cases");
    if (o.failures != 0) fail(r, std::to_string(o.failures) + " failures, first: " + o.messages.front());
    if (dt >= 30.0) fail(r, "runtime " + std::to_string(dt) + " s");
    if (r.pass) r.detail = "1000 cases in " + std::to_string(dt) + " s";
    return r;
}

Result ac6() {
    Result r;
    const auto t2 = reproduce_table2_analog();
    const auto t3 = reproduce_table3_analog();
    absorb(r, t2);
    // the six-dimensional checks belong to the next criterion
    for (const auto& c : t3.checks) {
        if (c.name.find("6-D") != std::string::npos) continue;
        if (!c.pass) fail(r, c.name + " (measured " + c.measured + ", expected " + c.expected + ")");
    }
    if (r.pass) r.detail = "overlap, split and clean-control scenarios over 20 seeds";
    return r;
}

Result ac7() {
    Result r;
    std::size_t peaks = 0, flagged = 0;
    const std::size_t n = 20;
    for (std::uint64_t seed = 0; seed < n; ++seed) {
        const Dataset ds = normalize_minmax(preset_split_6d(seed));
        AuditConfig cfg;
        cfg.seed = seed;
        const auto ev = detect_splits(ds, label_partition(ds), cfg);
        peaks += ev[1].max_peaks >= 2;
        flagged += ev[1].flagged;
    }
    if (peaks < 19) fail(r, "two peaks in " + std::to_string(peaks) + "/20");
    if (flagged < 19) fail(r, "flagged in " + std::to_string(flagged) + "/20");
    r.detail = (r.pass ? "" : r.detail + "; ") + "peaks " + std::to_string(peaks) + "/20, flagged " +
               std::to_string(flagged) + "/20";
    return r;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

// Runs one command and returns stdout plus every file in its output dir.
std::string capture(std::vector<std::string> args, const fs::path& dir) {
    fs::remove_all(dir);
    fs::create_directories(dir);
    for (auto& a : args) {
        const auto at = a.find("@DIR@");
        if (at != std::string::npos) a.replace(at, 5, dir.string());
    }
    std::ostringstream out, err;
    const int code = run_cli(args, out, err);
    std::string blob = "exit " + std::to_string(code) + "\n" + out.str();
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(dir)) files.push_back(e.path());
    std::sort(files.begin(), files.end());
    for (const auto& f : files) blob += "== " + f.filename().string() + "\n" + slurp(f);
    // paths differ per run; the content must not
    for (std::size_t at; (at = blob.find(dir.string())) != std::string::npos;) blob.replace(at, dir.string().size(), "@DIR@");
    return blob;
}

Result ac8() {
    Result r;
    const fs::path root = fs::temp_directory_path() / "labelaudit_acceptance";
    fs::create_directories(root);
    const fs::path sd2 = root / "sd2.csv";
    const fs::path split = root / "split.csv";
    {
        std::ostringstream o, e;
        run_cli({"--seed", "5", "generate", "--preset", "sd2", "--out", sd2.string()}, o, e);
        run_cli({"--seed", "5", "generate", "--preset", "split-class", "--out", split.string()}, o, e);
    }
    const std::vector<std::pair<std::string, std::vector<std::string>>> commands = {
        {"generate", {"--seed", "9", "generate", "--preset", "overlap-pair", "--out", "@DIR@/g.csv"}},
        {"metrics kmeans", {"--seed", "3", "metrics", "--data", sd2.string(), "--label-column", "label", "--kmeans", "3"}},
        {"metrics dbscan", {"metrics", "--data", sd2.string(), "--label-column", "label", "--dbscan-eps", "0.03"}},
        {"sweep", {"--seed", "3", "sweep", "--data", sd2.string(), "--label-column", "label", "--kmeans-range", "1:4",
                   "--dbscan-range", "0.01:0.04:0.01", "--csv", "@DIR@/cells.csv"}},
        {"audit", {"--seed", "2", "--out-dir", "@DIR@", "audit", "--data", split.string(), "--label-column", "label"}},
        {"simulate-overlap", {"--seed", "4", "simulate-overlap", "--trials", "2000", "--json", "@DIR@/sim.json"}},
        {"reproduce", {"--seed", "1", "reproduce", "table3-analog", "--seeds", "3", "--json", "@DIR@/rep.json"}},
        {"reproduce fig6", {"--seed", "1", "reproduce", "fig6"}},
    };
    for (const auto& [name, args] : commands) {
        auto with_threads = [&](const std::string& t) {
            std::vector<std::string> a{"--threads", t};
            a.insert(a.end(), args.begin(), args.end());
            return a;
        };
        const auto first = capture(with_threads("1"), root / "a");
        const auto second = capture(with_threads("1"), root / "b");
        const auto parallel = capture(with_threads("4"), root / "c");
        if (first.rfind("exit 0", 0) != 0) fail(r, name + " did not succeed");
        if (first != second) fail(r, name + " differs between runs");
        if (first != parallel) fail(r, name + " differs between 1 and 4 threads");
    }
    fs::remove_all(root);
    if (r.pass) r.detail = std::to_string(commands.size()) + " commands byte-identical across runs and thread counts";
    return r;
}

}  // namespace

int main() {
    const std::pair<const char*, std::function<Result()>> criteria[] = {
        {"AC1 ideal contingency external values", ac1},
        {"AC2 synthetic two-class set pattern over 20 seeds", ac2},
        {"AC3 disjoint-circle probability model", ac3},
        {"AC4 oracle equivalence (ARI, expected MI)", ac4},
        {"AC5 metric property suite", ac5},
        {"AC6 overlap and split analogs with clean control", ac6},
        {"AC7 six-dimensional split diagnostic", ac7},
        {"AC8 determinism across runs and threads", ac8},
    };
    int failed = 0;
    for (const auto& [name, fn] : criteria) {
        Result r;
        try {
            r = fn();
        } catch (const std::exception& e) {
            r.pass = false;
            r.detail = std::string("exception: ") + e.what();
        }
        std::cout << (r.pass ? "PASS " : "FAIL ") << name << ": " << r.detail << std::endl;
        failed += !r.pass;
    }
    std::cout << (failed == 0 ? "all criteria passed" : std::to_string(failed) + " criteria failed") << std::endl;
    return failed == 0 ? 0 : 1;
}
