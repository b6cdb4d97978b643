#pragma once

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <string>
#include <string_view>
#include <vector>

#include "labelaudit/auditor.hpp"
#include "labelaudit/generators.hpp"
#include "labelaudit/overlap_model.hpp"

namespace labelaudit {

// Scripted checks that regenerate the synthetic case studies and compare the
// outcome with the published tables and figure.

struct ReproCheck {
    std::string name;
    std::string measured;
    std::string expected;
    bool pass = false;
};

struct ReproReport {
    std::string target;
    std::vector<ReproCheck> checks;
    std::vector<double> seed_seconds;  // wall time per seed; never printed

    bool passed() const {
        return std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.pass; });
    }
};

struct ReproOptions {
    std::size_t seeds = 20;
    std::uint64_t base_seed = 0;
    unsigned workers = 1;
};

inline const std::vector<std::string>& repro_targets() {
    static const std::vector<std::string> t = {"table1", "table2-analog", "table3-analog", "fig6"};
    return t;
}

namespace detail {

inline std::string fmt(double v, int digits = 4) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

inline std::string fmt_count(std::size_t hits, std::size_t total) {
    return std::to_string(hits) + "/" + std::to_string(total);
}

inline ReproCheck near(std::string name, double measured, double target, double tol,
                       int digits = 4) {
    return {std::move(name), fmt(measured, digits),
            fmt(target, digits) + " +/- " + fmt(tol, digits),
            std::abs(measured - target) <= tol};
}

inline ReproCheck at_least(std::string name, std::size_t hits, std::size_t total,
                           std::size_t need) {
    return {std::move(name), fmt_count(hits, total), ">= " + fmt_count(need, total), hits >= need};
}

inline ContingencyTable ideal_sd2_table() {
    return ContingencyTable({{800, 0}, {0, 1000}, {0, 1200}});
}

inline KMeansConfig km(std::size_t k, std::uint64_t seed) {
    KMeansConfig c;
    c.k = k;
    c.seed = seed;
    return c;
}

inline bool is_split_verdict(Verdict v) {
    return v == Verdict::split_detected || v == Verdict::both;
}

}  // namespace detail

// Published Table 1 reference values, recomputed on the ideal contingency.
inline constexpr double kTable1Mi = 0.580;
inline constexpr double kTable1Nmi = 0.697;
inline constexpr double kTable1Ami = 0.696;
inline constexpr double kTable1Ari = 0.501;

inline ReproReport reproduce_table1(const ReproOptions& opt = {}) {
    using namespace detail;
    ReproReport rep{"table1", {}};
    const auto t = ideal_sd2_table();
    rep.checks.push_back(near("ideal contingency MI (nats)", mutual_info(t), kTable1Mi, 0.002));
    rep.checks.push_back(near("ideal contingency NMI", nmi(t), kTable1Nmi, 0.003));
    rep.checks.push_back(near("ideal contingency AMI", ami(t), kTable1Ami, 0.004));
    rep.checks.push_back(near("ideal contingency ARI", rand_ari(t).ari, kTable1Ari, 0.002));

    struct SeedOutcome {
        bool k2_exact = false;
        bool k3_values = false;
        bool internal_order = false;
        bool dbscan_match = false;
        bool kmeans_inconsistent = false;
        bool dbscan_sweep_shape = false;
    };
    std::vector<SeedOutcome> out(opt.seeds);
    rep.seed_seconds.assign(opt.seeds, 0.0);
    parallel_for(opt.seeds, opt.workers, [&](std::size_t s) {
        const auto start = std::chrono::steady_clock::now();
        const std::uint64_t seed = opt.base_seed + s;
        const Dataset ds = preset_sd2(seed);
        const Partition labels = label_partition(ds);
        SeedOutcome& o = out[s];

        const auto km_sweep = sweep(ds, labels, kmeans_grid(1, 3, seed));
        const auto& r2 = km_sweep.cells[1].report;
        const auto& r3 = km_sweep.cells[2].report;
        o.k2_exact = *r2.ari == 1.0 && *r2.nmi == 1.0 && *r2.ami == 1.0;
        o.k3_values = std::abs(*r3.mi - kTable1Mi) <= 0.02 && std::abs(*r3.nmi - kTable1Nmi) <= 0.02 &&
                      std::abs(*r3.ami - kTable1Ami) <= 0.02 && std::abs(*r3.ari - kTable1Ari) <= 0.02;
        o.internal_order = r2.dbi && r3.dbi && *r3.dbi < *r2.dbi && *r3.sc > *r2.sc;
        o.kmeans_inconsistent = km_sweep.inconsistent;

        const Partition db = dbscan(ds, DbscanConfig{0.025, 4});
        const double noise = static_cast<double>(db.noise_count()) / static_cast<double>(ds.size());
        o.dbscan_match = rand_ari(contingency(db, km_sweep.cells[2].partition)).ari >= 0.99 &&
                         noise <= 0.01;

        const auto db_sweep = sweep(ds, labels, dbscan_grid(0.010, 0.040, 0.005, 4));
        o.dbscan_sweep_shape = db_sweep.inconsistent && db_sweep.best_sc && db_sweep.best_ami &&
                               db_sweep.cells[*db_sweep.best_sc].report.clusters == 3 &&
                               db_sweep.cells[*db_sweep.best_ami].report.clusters == 2;
        rep.seed_seconds[s] =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    });

    auto tally = [&](bool SeedOutcome::*field) {
        return static_cast<std::size_t>(
            std::count_if(out.begin(), out.end(), [&](const SeedOutcome& o) { return o.*field; }));
    };
    const std::size_t n = opt.seeds;
    const std::size_t most = n - n / 20;  // 19 of 20
    rep.checks.push_back(at_least("SD_2 k-means k=2: ARI = NMI = AMI = 1", tally(&SeedOutcome::k2_exact), n, most));
    rep.checks.push_back(at_least("SD_2 k-means k=3: MI/NMI/AMI/ARI within 0.02 of the ideal values",
                                  tally(&SeedOutcome::k3_values), n, n));
    rep.checks.push_back(at_least("SD_2 DBI(k=3) < DBI(k=2) and SC(k=3) > SC(k=2)",
                                  tally(&SeedOutcome::internal_order), n, n));
    rep.checks.push_back(at_least("SD_2 DBSCAN(0.025,4) matches k=3 (ARI >= 0.99, noise <= 1%)",
                                  tally(&SeedOutcome::dbscan_match), n, n));
    rep.checks.push_back(at_least("SD_2 k-means sweep k=1..3 flags inconsistency",
                                  tally(&SeedOutcome::kmeans_inconsistent), n, most));
    rep.checks.push_back(at_least("SD_2 DBSCAN sweep: best SC has 3 clusters, best AMI has 2",
                                  tally(&SeedOutcome::dbscan_sweep_shape), n, most));
    return rep;
}

inline ReproReport reproduce_table2_analog(const ReproOptions& opt = {}) {
    using namespace detail;
    ReproReport rep{"table2-analog", {}};
    const std::size_t n = opt.seeds;
    const std::size_t most = n - n / 20;

    struct SeedOutcome {
        bool verdict = false;
        bool merged = false;
        bool k1_zero = false;
        bool k2_moderate = false;
    };
    std::vector<SeedOutcome> out(n);
    parallel_for(n, opt.workers, [&](std::size_t s) {
        const std::uint64_t seed = opt.base_seed + s;
        const Dataset ds = normalize_minmax(preset_overlap_pair(seed));
        const Partition labels = label_partition(ds);
        SeedOutcome& o = out[s];

        AuditConfig cfg;
        cfg.seed = seed;
        o.verdict = audit(ds, labels, cfg).verdict == Verdict::overlap_detected;

        const auto curve = k_dist_curve(ds, cfg.min_pts);
        const Partition db = dbscan(ds, DbscanConfig{suggest_eps(curve).eps, cfg.min_pts});
        const auto sizes = db.sizes();
        const std::size_t largest = sizes.empty() ? 0 : *std::max_element(sizes.begin(), sizes.end());
        o.merged = static_cast<double>(largest) >= 0.95 * static_cast<double>(ds.size());

        const auto r1 = evaluate(ds, kmeans(ds, km(1, seed)), labels);
        o.k1_zero = *r1.ari == 0.0 && *r1.mi == 0.0 && *r1.nmi == 0.0 && *r1.ami == 0.0;
        const auto r2 = evaluate(ds, kmeans(ds, km(2, seed)), labels);
        o.k2_moderate = *r2.ari > 0.0 && *r2.ari < 0.8;
    });
    auto tally = [&](bool SeedOutcome::*field) {
        return static_cast<std::size_t>(
            std::count_if(out.begin(), out.end(), [&](const SeedOutcome& o) { return o.*field; }));
    };

    rep.checks.push_back(at_least("overlap pair audits to overlap-detected", tally(&SeedOutcome::verdict), n, most));
    rep.checks.push_back(at_least("DBSCAN at suggested eps puts >= 95% in one cluster",
                                  tally(&SeedOutcome::merged), n, most));
    rep.checks.push_back(at_least("k-means k=1: ARI = MI = NMI = AMI = 0", tally(&SeedOutcome::k1_zero), n, n));
    rep.checks.push_back(at_least("k-means k=2: 0 < ARI < 0.8", tally(&SeedOutcome::k2_moderate), n, most));
    return rep;
}

inline ReproReport reproduce_table3_analog(const ReproOptions& opt = {}) {
    using namespace detail;
    ReproReport rep{"table3-analog", {}};
    const std::size_t n = opt.seeds;
    const std::size_t most = n - n / 20;

    struct SeedOutcome {
        bool split_verdict = false;
        bool class_flags = false;
        bool k2_ari_low = false;
        bool dbi_order = false;
        bool sc_order = false;
        bool label_sc_low = false;
        bool control_usable = false;
        bool six_d_peaks = false;
        bool six_d_flag = false;
        bool six_d_control = false;
    };
    std::vector<SeedOutcome> out(n);
    parallel_for(n, opt.workers, [&](std::size_t s) {
        const std::uint64_t seed = opt.base_seed + s;
        SeedOutcome& o = out[s];
        AuditConfig cfg;
        cfg.seed = seed;
        {
            const Dataset ds = normalize_minmax(preset_split_class(seed));
            const Partition labels = label_partition(ds);
            const auto rep_a = audit(ds, labels, cfg);
            o.split_verdict = is_split_verdict(rep_a.verdict);
            o.class_flags = !rep_a.splits[0].flagged && rep_a.splits[1].flagged &&
                            rep_a.splits[1].major_subclusters == 2;
            const auto k2 = evaluate(ds, kmeans(ds, km(2, seed)), labels);
            const auto& lab = rep_a.label_internal;
            o.k2_ari_low = *k2.ari < 0.1;
            o.dbi_order = k2.dbi && lab.dbi && *k2.dbi < *lab.dbi;
            o.sc_order = k2.sc && lab.sc && *k2.sc > *lab.sc;
            o.label_sc_low = lab.sc && *lab.sc < 0.1;
        }
        {
            const Dataset ds = normalize_minmax(preset_clean_blobs(seed));
            o.control_usable = audit(ds, label_partition(ds), cfg).verdict == Verdict::labels_usable;
        }
        {
            const Dataset ds = normalize_minmax(preset_split_6d(seed));
            const auto ev = detect_splits(ds, label_partition(ds), cfg);
            o.six_d_peaks = ev[1].max_peaks >= 2;
            o.six_d_flag = ev[1].flagged;
            o.six_d_control = !ev[0].flagged;
        }
    });
    auto tally = [&](bool SeedOutcome::*field) {
        return static_cast<std::size_t>(
            std::count_if(out.begin(), out.end(), [&](const SeedOutcome& o) { return o.*field; }));
    };
    rep.checks.push_back(at_least("split class audits with a split verdict", tally(&SeedOutcome::split_verdict), n, most));
    rep.checks.push_back(at_least("split class: B flagged with 2 major sub-clusters, A not flagged",
                                  tally(&SeedOutcome::class_flags), n, most));
    rep.checks.push_back(at_least("split class: k-means k=2 ARI < 0.1", tally(&SeedOutcome::k2_ari_low), n, most));
    rep.checks.push_back(at_least("split class: DBI(k=2) < DBI(labels)", tally(&SeedOutcome::dbi_order), n, n));
    rep.checks.push_back(at_least("split class: SC(k=2) > SC(labels)", tally(&SeedOutcome::sc_order), n, n));
    rep.checks.push_back(at_least("split class: SC(labels) < 0.1", tally(&SeedOutcome::label_sc_low), n, most));
    rep.checks.push_back(at_least("clean blobs audit to labels-usable", tally(&SeedOutcome::control_usable), n, most));
    rep.checks.push_back(at_least("6-D split class shows >= 2 density peaks on some PCA axis",
                                  tally(&SeedOutcome::six_d_peaks), n, most));
    rep.checks.push_back(at_least("6-D split class flagged", tally(&SeedOutcome::six_d_flag), n, most));
    rep.checks.push_back(at_least("6-D single-Gaussian class not flagged", tally(&SeedOutcome::six_d_control), n, most));
    return rep;
}

inline constexpr std::array<std::size_t, 5> kFig6MonteCarloKs = {2, 10, 30, 50, 100};

inline ReproReport reproduce_fig6(const ReproOptions& opt = {}) {
    using namespace detail;
    ReproReport rep{"fig6", {}};
    constexpr double r = 0.01;
    constexpr double w = 1.0;

    double worst = 0.0;
    bool monotone = true;
    double prev = 2.0;
    for (std::size_t k = 1; k <= 100; ++k) {
        const double exact = p_disjoint_exact(k, r, w);
        const double approx = p_disjoint_approx(k, r, w);
        worst = std::max(worst, std::abs(exact - approx));
        if (!(exact < prev)) monotone = false;
        prev = exact;
    }
    rep.checks.push_back({"max |approx - exact| over k = 1..100", fmt(worst, 6), "< 0.001000",
                          worst < 1e-3});
    rep.checks.push_back({"closed form strictly decreasing in k", monotone ? "yes" : "no", "yes",
                          monotone});
    for (std::size_t k : kFig6MonteCarloKs) {
        OverlapSimConfig cfg{k, r, w, 10000, derive_seed(opt.base_seed, k), false};
        const auto mc = monte_carlo_disjoint(cfg, opt.workers);
        rep.checks.push_back(near("Monte Carlo vs approximation, k=" + std::to_string(k),
                                  mc.estimate, p_disjoint_approx(k, r, w), 0.02));
    }
    return rep;
}

inline ReproReport reproduce(std::string_view target, const ReproOptions& opt = {}) {
    if (target == "table1") return reproduce_table1(opt);
    if (target == "table2-analog") return reproduce_table2_analog(opt);
    if (target == "table3-analog") return reproduce_table3_analog(opt);
    if (target == "fig6") return reproduce_fig6(opt);
    std::string valid;
    for (const auto& t : repro_targets()) valid += (valid.empty() ? "" : ", ") + t;
    throw std::invalid_argument("unknown reproduction target '" + std::string(target) +
                                "'; valid targets: " + valid);
}

inline std::string format_report(const ReproReport& rep) {
    std::string s = "reproduce " + rep.target + "\n";
    for (const auto& c : rep.checks) {
        s += (c.pass ? "  PASS  " : "  FAIL  ") + c.name + ": measured " + c.measured +
             ", expected " + c.expected + "\n";
    }
    s += rep.passed() ? "all checks passed\n" : "some checks FAILED\n";
    return s;
}

}  // namespace labelaudit
