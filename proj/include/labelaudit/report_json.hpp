#pragma once

#include <cmath>
#include <optional>
#include <sstream>
#include <string>

#include <json.hpp>

#include "labelaudit/auditor.hpp"
#include "labelaudit/metrics.hpp"

namespace labelaudit {

using Json = nlohmann::ordered_json;

/// Bumped whenever a field is renamed, removed or changes meaning.
inline constexpr int kSchemaVersion = 1;

namespace detail {
inline Json opt(const std::optional<double>& v) {
    if (!v || !std::isfinite(*v)) return nullptr;
    return *v;
}
inline Json opt_index(const std::optional<std::size_t>& v) {
    if (!v) return nullptr;
    return *v;
}
}  // namespace detail

inline Json to_json(const MetricReport& r) {
    Json j;
    j["n"] = r.n;
    j["clusters"] = r.clusters;
    j["noise"] = r.noise;
    j["dbi"] = detail::opt(r.dbi);
    j["sc"] = detail::opt(r.sc);
    j["internal_note"] = r.internal_note.empty() ? Json(nullptr) : Json(r.internal_note);
    j["ri"] = detail::opt(r.ri);
    j["ari"] = detail::opt(r.ari);
    j["mi"] = detail::opt(r.mi);
    j["nmi"] = detail::opt(r.nmi);
    j["ami"] = detail::opt(r.ami);
    j["normalizer"] = std::string(to_string(r.normalizer));
    return j;
}

inline Json to_json(const ClustererSpec& spec) {
    Json j;
    if (const auto* km = std::get_if<KMeansConfig>(&spec)) {
        j["algorithm"] = "kmeans";
        j["k"] = km->k;
        j["restarts"] = km->restarts;
        j["max_iters"] = km->max_iters;
        j["tol"] = km->tol;
        j["seed"] = km->seed;
    } else {
        const auto& db = std::get<DbscanConfig>(spec);
        j["algorithm"] = "dbscan";
        j["eps"] = db.eps;
        j["min_pts"] = db.min_pts;
    }
    j["label"] = describe(spec);
    return j;
}

inline Json to_json(const SweepResult& s) {
    Json j;
    Json cells = Json::array();
    for (const auto& c : s.cells) {
        Json cell;
        cell["clusterer"] = to_json(c.spec);
        cell["metrics"] = to_json(c.report);
        cells.push_back(std::move(cell));
    }
    j["cells"] = std::move(cells);
    j["best_by_internal"] = {{"dbi", detail::opt_index(s.best_dbi)},
                             {"sc", detail::opt_index(s.best_sc)}};
    j["best_by_external"] = {{"ri", detail::opt_index(s.best_ri)},
                             {"ari", detail::opt_index(s.best_ari)},
                             {"mi", detail::opt_index(s.best_mi)},
                             {"nmi", detail::opt_index(s.best_nmi)},
                             {"ami", detail::opt_index(s.best_ami)}};
    j["designated"] = {{"internal", "sc"}, {"external", "ami"}};
    j["inconsistent"] = s.inconsistent;
    return j;
}

inline Json to_json(const ClassSplitEvidence& e) {
    Json j;
    j["class"] = e.class_id;
    j["size"] = e.size;
    j["insufficient_data"] = e.insufficient;
    j["eps"] = e.insufficient ? Json(nullptr) : Json(e.eps);
    j["subclusters"] = e.subclusters;
    j["major_subclusters"] = e.major_subclusters;
    j["subcluster_sizes"] = e.subcluster_sizes;
    j["subcluster_noise"] = e.subcluster_noise;
    j["subcluster_minor_fraction"] = e.subcluster_minor;
    j["axis_peaks"] = e.axis_peaks;
    j["axis_minor_fraction"] = e.axis_minor;
    j["max_peaks"] = e.max_peaks;
    j["best_axis"] = detail::opt_index(e.best_axis);
    j["split_by_dbscan"] = e.split_by_dbscan;
    j["split_by_density"] = e.split_by_density;
    j["flagged"] = e.flagged;
    return j;
}

inline Json to_json(const OverlapEvidence& o) {
    Json j;
    j["kn"] = o.kn;
    j["mixing"] = o.mixing;
    Json pairs = Json::array();
    for (const auto& [a, b] : o.flagged_pairs) pairs.push_back({a, b});
    j["flagged_pairs"] = std::move(pairs);
    j["flagged"] = o.flagged;
    return j;
}

inline Json to_json(const AuditConfig& c) {
    Json j;
    j["min_pts"] = c.min_pts;
    j["kn"] = c.kn;
    j["minor_fraction"] = c.minor_fraction;
    j["mixing_threshold"] = c.mixing_threshold;
    j["min_prominence"] = c.min_prominence;
    j["elbow_axis"] = c.elbow == ElbowAxis::rank ? "rank" : "log_rank";
    j["kmeans_restarts"] = c.kmeans_restarts;
    j["seed"] = c.seed;
    j["normalizer"] = std::string(to_string(c.normalizer));
    return j;
}

inline Json to_json(const AuditReport& r, const AuditConfig& cfg) {
    Json j;
    j["schema_version"] = kSchemaVersion;
    j["kind"] = "audit";
    j["n"] = r.n;
    j["d"] = r.d;
    j["classes"] = r.classes;
    j["class_sizes"] = r.class_sizes;
    j["config"] = to_json(cfg);
    j["label_internal"] = to_json(r.label_internal);
    Json splits = Json::array();
    for (const auto& s : r.splits) splits.push_back(to_json(s));
    j["splits"] = std::move(splits);
    j["overlap"] = to_json(r.overlap);
    j["sweep"] = to_json(r.sweep);
    j["pca_eigenvalues"] = r.pca.eigenvalues;
    j["verdict"] = std::string(to_string(r.verdict));
    return j;
}

/// Human-readable summary of an audit.
inline std::string summary_text(const AuditReport& r) {
    std::ostringstream os;
    os.imbue(std::locale::classic());
    os.setf(std::ios::fixed);
    os.precision(3);
    os << "points: " << r.n << "  features: " << r.d << "  classes: " << r.classes << "\n";
    os << "label partition: ";
    if (r.label_internal.dbi) os << "DBI " << *r.label_internal.dbi << "  ";
    if (r.label_internal.sc) os << "SC " << *r.label_internal.sc;
    if (!r.label_internal.internal_note.empty()) os << "(" << r.label_internal.internal_note << ")";
    os << "\n\nsplit evidence:\n";
    for (const auto& s : r.splits) {
        os << "  class " << s.class_id << " (" << s.size << " points): ";
        if (s.insufficient) {
            os << "insufficient data\n";
            continue;
        }
        os << s.major_subclusters << " major / " << s.subclusters << " dense sub-cluster(s) at eps " << s.eps << ", max "
           << s.max_peaks << " density peak(s)";
        if (s.best_axis) os << " on PC" << (*s.best_axis + 1);
        os << (s.flagged ? "  -> SPLIT" : "") << "\n";
    }
    os << "\noverlap evidence (kn=" << r.overlap.kn << "):\n";
    for (std::size_t a = 0; a < r.overlap.mixing.size(); ++a) {
        for (std::size_t b = a + 1; b < r.overlap.mixing.size(); ++b) {
            os << "  classes " << a << "/" << b << ": mixing " << r.overlap.mixing[a][b]
               << (r.overlap.mixing[a][b] >= 0 && std::find(r.overlap.flagged_pairs.begin(),
                                                            r.overlap.flagged_pairs.end(),
                                                            std::pair<int, int>(a, b)) !=
                                                      r.overlap.flagged_pairs.end()
                       ? "  -> OVERLAP"
                       : "")
               << "\n";
        }
    }
    os << "\nsweep:\n";
    for (std::size_t c = 0; c < r.sweep.cells.size(); ++c) {
        const auto& cell = r.sweep.cells[c];
        os << "  " << describe(cell.spec) << ": clusters " << cell.report.clusters;
        if (cell.report.sc) os << "  SC " << *cell.report.sc;
        if (cell.report.ami) os << "  AMI " << *cell.report.ami;
        if (r.sweep.best_sc == c) os << "  [best SC]";
        if (r.sweep.best_ami == c) os << "  [best AMI]";
        os << "\n";
    }
    os << "  inconsistent: " << (r.sweep.inconsistent ? "yes" : "no") << "\n";
    os << "\nverdict: " << to_string(r.verdict) << "\n";
    return os.str();
}

}  // namespace labelaudit
