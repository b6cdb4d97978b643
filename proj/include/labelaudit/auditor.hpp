#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "labelaudit/clusterers.hpp"
#include "labelaudit/core.hpp"
#include "labelaudit/metrics.hpp"
#include "labelaudit/parallel.hpp"
#include "labelaudit/reduction.hpp"

namespace labelaudit {

// ---------------------------------------------------------------------------
// Parameter sweep

using ClustererSpec = std::variant<KMeansConfig, DbscanConfig>;

inline std::string describe(const ClustererSpec& spec) {
    std::ostringstream os;
    os.imbue(std::locale::classic());
    if (const auto* km = std::get_if<KMeansConfig>(&spec)) {
        os << "kmeans(k=" << km->k << ")";
    } else {
        const auto& db = std::get<DbscanConfig>(spec);
        os.setf(std::ios::fixed);
        os.precision(4);
        os << "dbscan(eps=" << db.eps << ",min_pts=" << db.min_pts << ")";
    }
    return os.str();
}

inline Partition run_clusterer(const Dataset& ds, const ClustererSpec& spec, unsigned workers = 1) {
    if (const auto* km = std::get_if<KMeansConfig>(&spec)) return kmeans(ds, *km, workers);
    return dbscan(ds, std::get<DbscanConfig>(spec), workers);
}

struct SweepCell {
    ClustererSpec spec;
    Partition partition;
    MetricReport report;
};

struct SweepResult {
    std::vector<SweepCell> cells;
    std::optional<std::size_t> best_dbi;  // argmin
    std::optional<std::size_t> best_sc;   // argmax
    std::optional<std::size_t> best_ri;
    std::optional<std::size_t> best_ari;
    std::optional<std::size_t> best_mi;
    std::optional<std::size_t> best_nmi;
    std::optional<std::size_t> best_ami;
    /// The SC-best and AMI-best cells induce different partitions.
    bool inconsistent = false;
};

namespace detail {
// Ties go to the lowest cell index.
template <class Get>
std::optional<std::size_t> arg_best(const std::vector<SweepCell>& cells, Get get, bool maximize) {
    std::optional<std::size_t> best;
    double best_v = 0.0;
    for (std::size_t c = 0; c < cells.size(); ++c) {
        const std::optional<double> v = get(cells[c].report);
        if (!v) continue;
        if (!best || (maximize ? *v > best_v : *v < best_v)) {
            best = c;
            best_v = *v;
        }
    }
    return best;
}
}  // namespace detail

/// Runs and scores every grid cell against the reference labels.
inline SweepResult sweep(const Dataset& ds, const Partition& labels,
                         const std::vector<ClustererSpec>& grid,
                         Normalizer how = Normalizer::arithmetic, unsigned workers = 1) {
    if (grid.empty()) throw std::invalid_argument("sweep grid is empty");
    if (labels.size() != ds.size()) throw DataError("label count does not match dataset size");
    SweepResult out;
    out.cells.resize(grid.size());
    parallel_for(grid.size(), workers, [&](std::size_t c) {
        SweepCell cell;
        cell.spec = grid[c];
        cell.partition = run_clusterer(ds, grid[c]);
        cell.report = evaluate(ds, cell.partition, labels, how);
        out.cells[c] = std::move(cell);
    });
    out.best_dbi = detail::arg_best(out.cells, [](const MetricReport& r) { return r.dbi; }, false);
    out.best_sc = detail::arg_best(out.cells, [](const MetricReport& r) { return r.sc; }, true);
    out.best_ri = detail::arg_best(out.cells, [](const MetricReport& r) { return r.ri; }, true);
    out.best_ari = detail::arg_best(out.cells, [](const MetricReport& r) { return r.ari; }, true);
    out.best_mi = detail::arg_best(out.cells, [](const MetricReport& r) { return r.mi; }, true);
    out.best_nmi = detail::arg_best(out.cells, [](const MetricReport& r) { return r.nmi; }, true);
    out.best_ami = detail::arg_best(out.cells, [](const MetricReport& r) { return r.ami; }, true);
    if (out.best_sc && out.best_ami) {
        out.inconsistent = !same_partition(out.cells[*out.best_sc].partition,
                                           out.cells[*out.best_ami].partition);
    }
    return out;
}

/// K-means cells for k = k_min..k_max.
inline std::vector<ClustererSpec> kmeans_grid(std::size_t k_min, std::size_t k_max,
                                              std::uint64_t seed, std::size_t restarts = 16) {
    std::vector<ClustererSpec> grid;
    for (std::size_t k = k_min; k <= k_max; ++k) {
        KMeansConfig cfg;
        cfg.k = k;
        cfg.seed = seed;
        cfg.restarts = restarts;
        grid.emplace_back(cfg);
    }
    return grid;
}

/// DBSCAN cells for eps = first, first+step, ..., up to last (inclusive,
/// with a half-step tolerance against rounding).
inline std::vector<ClustererSpec> dbscan_grid(double first, double last, double step,
                                              std::size_t min_pts) {
    if (!(step > 0.0) || !(first > 0.0) || last < first) {
        throw std::invalid_argument("invalid eps range");
    }
    std::vector<ClustererSpec> grid;
    for (std::size_t i = 0;; ++i) {
        const double eps = first + step * static_cast<double>(i);
        if (eps > last + 0.5 * step) break;
        grid.emplace_back(DbscanConfig{eps, min_pts});
    }
    return grid;
}

// ---------------------------------------------------------------------------
// Audit configuration and evidence

struct AuditConfig {
    std::size_t min_pts = 4;           // DBSCAN density inside each class
    std::size_t kn = 10;               // neighbours for the mixing score
    double minor_fraction = 0.10;      // smallest part that makes a split
    double mixing_threshold = 0.20;    // mixing score that flags overlap
    double min_prominence = 0.10;      // peak prominence, fraction of max density
    ElbowAxis elbow = ElbowAxis::log_rank;
    std::vector<ClustererSpec> grid;   // empty: k-means for k = 1..classes+2
    std::size_t kmeans_restarts = 16;
    std::uint64_t seed = 0;
    Normalizer normalizer = Normalizer::arithmetic;
    unsigned workers = 1;
};

struct ClassSplitEvidence {
    int class_id = 0;
    std::size_t size = 0;
    bool insufficient = false;
    // DBSCAN restricted to the class
    double eps = 0.0;
    std::size_t subclusters = 0;
    std::size_t major_subclusters = 0;  // sub-clusters holding >= minor_fraction of the class
    std::vector<std::size_t> subcluster_sizes;  // descending
    std::size_t subcluster_noise = 0;
    double subcluster_minor = 0.0;  // second-largest sub-cluster / class size
    // density scan along every principal axis
    std::vector<std::size_t> axis_peaks;
    std::vector<double> axis_minor;  // second-largest peak region / class size
    std::size_t max_peaks = 0;
    std::optional<std::size_t> best_axis;
    bool split_by_dbscan = false;
    bool split_by_density = false;
    bool flagged = false;
};

struct OverlapEvidence {
    std::size_t kn = 0;
    std::vector<std::vector<double>> mixing;  // symmetric, zero diagonal
    std::vector<std::pair<int, int>> flagged_pairs;
    bool flagged = false;
};

enum class Verdict { labels_usable, split_detected, overlap_detected, both, sweep_inconsistent };

inline std::string_view to_string(Verdict v) {
    switch (v) {
        case Verdict::labels_usable: return "labels-usable";
        case Verdict::split_detected: return "split-detected";
        case Verdict::overlap_detected: return "overlap-detected";
        case Verdict::both: return "both";
        case Verdict::sweep_inconsistent: return "sweep-inconsistent";
    }
    return "labels-usable";
}

struct AuditReport {
    std::size_t n = 0;
    std::size_t d = 0;
    std::size_t classes = 0;
    std::vector<std::size_t> class_sizes;
    MetricReport label_internal;
    std::vector<ClassSplitEvidence> splits;
    OverlapEvidence overlap;
    SweepResult sweep;
    PcaModel pca;
    Verdict verdict = Verdict::labels_usable;
};

inline Verdict decide_verdict(bool split, bool overlap, bool inconsistent) {
    if (split && overlap) return Verdict::both;
    if (split) return Verdict::split_detected;
    if (overlap) return Verdict::overlap_detected;
    if (inconsistent) return Verdict::sweep_inconsistent;
    return Verdict::labels_usable;
}

namespace detail {
inline std::vector<std::vector<std::size_t>> class_members(const Partition& labels) {
    std::vector<std::vector<std::size_t>> members(labels.num_clusters());
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] != Partition::kNoise) {
            members[static_cast<std::size_t>(labels[i])].push_back(i);
        }
    }
    return members;
}
}  // namespace detail

/// Per-class evidence that one class occupies several dense regions.
inline std::vector<ClassSplitEvidence> detect_splits(const Dataset& ds, const Partition& labels,
                                                     const AuditConfig& cfg,
                                                     const PcaModel* model = nullptr) {
    if (labels.size() != ds.size()) throw DataError("label count does not match dataset size");
    const auto members = detail::class_members(labels);
    PcaModel fitted;
    if (!model && ds.size() >= 2) {
        fitted = pca_fit(ds);
        model = &fitted;
    }
    std::vector<ClassSplitEvidence> out(members.size());
    parallel_for(members.size(), cfg.workers, [&](std::size_t c) {
        ClassSplitEvidence ev;
        ev.class_id = static_cast<int>(c);
        ev.size = members[c].size();
        if (ev.size < std::max<std::size_t>(cfg.min_pts, 3)) {
            ev.insufficient = true;
            out[c] = std::move(ev);
            return;
        }
        const Dataset sub = ds.subset(members[c]);
        const double size = static_cast<double>(ev.size);

        const std::size_t k = std::min(cfg.min_pts, ev.size - 1);
        const auto curve = k_dist_curve(sub, k);
        ev.eps = suggest_eps(curve, cfg.elbow).eps;
        if (ev.eps > 0.0) {
            const Partition p = dbscan(sub, DbscanConfig{ev.eps, cfg.min_pts});
            ev.subclusters = p.num_clusters();
            ev.subcluster_sizes = p.sizes();
            std::sort(ev.subcluster_sizes.begin(), ev.subcluster_sizes.end(), std::greater<>());
            ev.subcluster_noise = p.noise_count();
            if (ev.subcluster_sizes.size() >= 2) {
                ev.subcluster_minor = static_cast<double>(ev.subcluster_sizes[1]) / size;
            }
            for (std::size_t c_size : ev.subcluster_sizes) {
                if (static_cast<double>(c_size) >= cfg.minor_fraction * size) ++ev.major_subclusters;
            }
        } else {
            // all k-th neighbours coincide: the class is one point mass
            ev.subclusters = 1;
            ev.major_subclusters = 1;
            ev.subcluster_sizes = {ev.size};
        }
        ev.split_by_dbscan = ev.subclusters >= 2 && ev.subcluster_minor >= cfg.minor_fraction;

        if (model) {
            for (std::size_t axis = 0; axis < model->count(); ++axis) {
                const auto& comp = model->components[axis];
                std::vector<double> values(ev.size);
                for (std::size_t m = 0; m < ev.size; ++m) {
                    double s = 0.0;
                    for (std::size_t j = 0; j < ds.dim(); ++j) {
                        s += (sub.at(m, j) - model->mean[j]) * comp[j];
                    }
                    values[m] = s;
                }
                const auto curve_d = density_profile(values, silverman_bandwidth(values));
                const auto peaks = find_peaks(curve_d, cfg.min_prominence);
                double minor = 0.0;
                if (peaks.size() >= 2) {
                    auto mass = peak_masses(curve_d, peaks, values);
                    std::sort(mass.begin(), mass.end(), std::greater<>());
                    minor = static_cast<double>(mass[1]) / size;
                }
                ev.axis_peaks.push_back(peaks.size());
                ev.axis_minor.push_back(minor);
                const bool significant = peaks.size() >= 2 && minor >= cfg.minor_fraction;
                ev.split_by_density = ev.split_by_density || significant;
                if (!ev.best_axis || peaks.size() > ev.max_peaks) {
                    ev.max_peaks = peaks.size();
                    ev.best_axis = axis;
                }
            }
        }
        ev.flagged = ev.split_by_dbscan || ev.split_by_density;
        out[c] = std::move(ev);
    });
    return out;
}

/// mixing(A,B): share of class-A points whose kn nearest neighbours contain
/// at least ceil(kn/2) points of class B; symmetrized by max.
inline OverlapEvidence detect_overlap(const Dataset& ds, const Partition& labels, std::size_t kn,
                                      double threshold = 0.2, unsigned workers = 1) {
    const std::size_t n = ds.size();
    if (labels.size() != n) throw DataError("label count does not match dataset size");
    if (kn == 0 || kn >= n) {
        throw std::invalid_argument("neighbour count must satisfy 1 <= kn < n (kn=" +
                                    std::to_string(kn) + ", n=" + std::to_string(n) + ")");
    }
    const std::size_t classes = labels.num_clusters();
    const std::size_t majority = (kn + 1) / 2;

    // per point: the other class holding a neighbourhood majority, if any
    std::vector<int> dominant(n, -1);
    parallel_for(n, workers, [&](std::size_t i) {
        if (labels[i] == Partition::kNoise) return;
        std::vector<std::pair<double, std::size_t>> d;
        d.reserve(n - 1);
        const auto xi = ds.point(i);
        for (std::size_t m = 0; m < n; ++m) {
            if (m != i) d.emplace_back(squared_distance(xi, ds.point(m)), m);
        }
        std::partial_sort(d.begin(), d.begin() + static_cast<std::ptrdiff_t>(kn), d.end());
        std::vector<std::size_t> votes(classes, 0);
        for (std::size_t t = 0; t < kn; ++t) {
            const int l = labels[d[t].second];
            if (l != Partition::kNoise) ++votes[static_cast<std::size_t>(l)];
        }
        for (std::size_t b = 0; b < classes; ++b) {
            if (static_cast<int>(b) != labels[i] && votes[b] >= majority) {
                dominant[i] = static_cast<int>(b);
                break;
            }
        }
    });

    std::vector<std::vector<double>> frac(classes, std::vector<double>(classes, 0.0));
    std::vector<std::size_t> sizes(classes, 0);
    for (std::size_t i = 0; i < n; ++i) {
        if (labels[i] == Partition::kNoise) continue;
        const auto a = static_cast<std::size_t>(labels[i]);
        ++sizes[a];
        if (dominant[i] >= 0) frac[a][static_cast<std::size_t>(dominant[i])] += 1.0;
    }
    OverlapEvidence ev;
    ev.kn = kn;
    ev.mixing.assign(classes, std::vector<double>(classes, 0.0));
    for (std::size_t a = 0; a < classes; ++a) {
        for (std::size_t b = 0; b < classes; ++b) {
            if (sizes[a]) frac[a][b] /= static_cast<double>(sizes[a]);
        }
    }
    for (std::size_t a = 0; a < classes; ++a) {
        for (std::size_t b = 0; b < classes; ++b) {
            if (a != b) ev.mixing[a][b] = std::max(frac[a][b], frac[b][a]);
        }
    }
    for (std::size_t a = 0; a < classes; ++a) {
        for (std::size_t b = a + 1; b < classes; ++b) {
            if (ev.mixing[a][b] >= threshold) {
                ev.flagged_pairs.emplace_back(static_cast<int>(a), static_cast<int>(b));
            }
        }
    }
    ev.flagged = !ev.flagged_pairs.empty();
    return ev;
}

inline std::vector<ClustererSpec> default_audit_grid(const Dataset& ds, const Partition& labels,
                                                     const AuditConfig& cfg) {
    const std::size_t k_max = std::min(ds.size(), std::max<std::size_t>(labels.num_clusters() + 2, 2));
    return kmeans_grid(1, k_max, cfg.seed, cfg.kmeans_restarts);
}

/// Full label-vs-structure audit.
inline AuditReport audit(const Dataset& ds, const Partition& labels, const AuditConfig& cfg = {}) {
    if (labels.size() != ds.size()) throw DataError("label count does not match dataset size");
    if (labels.num_clusters() == 0) throw DataError("no labeled points");
    AuditReport rep;
    rep.n = ds.size();
    rep.d = ds.dim();
    rep.classes = labels.num_clusters();
    rep.class_sizes = labels.sizes();
    rep.label_internal = internal_report(ds, labels, cfg.workers);
    rep.pca = pca_fit(ds);
    rep.splits = detect_splits(ds, labels, cfg, &rep.pca);
    if (ds.size() > 1) {
        rep.overlap = detect_overlap(ds, labels, std::min(cfg.kn, ds.size() - 1),
                                     cfg.mixing_threshold, cfg.workers);
    }
    const auto grid = cfg.grid.empty() ? default_audit_grid(ds, labels, cfg) : cfg.grid;
    rep.sweep = sweep(ds, labels, grid, cfg.normalizer, cfg.workers);

    bool split = false;
    for (const auto& s : rep.splits) split = split || s.flagged;
    rep.verdict = decide_verdict(split, rep.overlap.flagged, rep.sweep.inconsistent);
    return rep;
}

}  // namespace labelaudit
