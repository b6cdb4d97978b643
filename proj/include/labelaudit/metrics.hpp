#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "labelaudit/core.hpp"
#include "labelaudit/parallel.hpp"

namespace labelaudit {

/// Mean of the two entropies used to normalize NMI and AMI.
enum class Normalizer { geometric, arithmetic, max, min };

inline std::string_view to_string(Normalizer n) {
    switch (n) {
        case Normalizer::geometric: return "geometric";
        case Normalizer::arithmetic: return "arithmetic";
        case Normalizer::max: return "max";
        case Normalizer::min: return "min";
    }
    return "arithmetic";
}

inline std::optional<Normalizer> parse_normalizer(std::string_view s) {
    if (s == "geometric") return Normalizer::geometric;
    if (s == "arithmetic") return Normalizer::arithmetic;
    if (s == "max") return Normalizer::max;
    if (s == "min") return Normalizer::min;
    return std::nullopt;
}

inline double normalize_entropies(double hu, double hv, Normalizer how) {
    switch (how) {
        case Normalizer::geometric: return std::sqrt(hu * hv);
        case Normalizer::arithmetic: return 0.5 * (hu + hv);
        case Normalizer::max: return std::max(hu, hv);
        case Normalizer::min: return std::min(hu, hv);
    }
    return 0.5 * (hu + hv);
}

// ---------------------------------------------------------------------------
// Entropy and information measures (natural log, nats)

/// Entropy of a distribution given by non-negative counts.
inline double entropy_of_counts(std::span<const std::int64_t> counts) {
    std::int64_t n = 0;
    for (auto c : counts) n += c;
    if (n <= 0) throw DataError("entropy of an empty distribution");
    const double nd = static_cast<double>(n);
    double h = 0.0;
    for (auto c : counts) {
        if (c > 0) {
            const double p = static_cast<double>(c) / nd;
            h -= p * std::log(p);
        }
    }
    return h;
}

/// Entropy of a partition; noise points count as one extra cluster.
inline double entropy(const Partition& p) {
    if (p.size() == 0) throw DataError("entropy of an empty partition");
    const Partition q = p.noise_as_cluster();
    std::vector<std::int64_t> counts(q.sizes().begin(), q.sizes().end());
    return entropy_of_counts(counts);
}

inline double mutual_info(const ContingencyTable& t) {
    if (t.total() <= 0) throw DataError("mutual information of an empty table");
    const double n = static_cast<double>(t.total());
    double mi = 0.0;
    for (std::size_t i = 0; i < t.rows(); ++i) {
        for (std::size_t j = 0; j < t.cols(); ++j) {
            const auto nij = t(i, j);
            if (nij == 0) continue;
            const double a = static_cast<double>(t.row_margins()[i]);
            const double b = static_cast<double>(t.col_margins()[j]);
            const double c = static_cast<double>(nij);
            mi += (c / n) * std::log(n * c / (a * b));
        }
    }
    // Rounding can leave a tiny negative value for independent tables.
    return std::max(mi, 0.0);
}

/// Expected mutual information between two random partitions with the given
/// cluster sizes under the hypergeometric (permutation) model.
inline double expected_mi(std::span<const std::int64_t> row_margins,
                          std::span<const std::int64_t> col_margins, std::int64_t n) {
    std::int64_t ra = 0, cb = 0;
    for (auto a : row_margins) {
        if (a < 0) throw DataError("negative margin");
        ra += a;
    }
    for (auto b : col_margins) {
        if (b < 0) throw DataError("negative margin");
        cb += b;
    }
    if (ra != n || cb != n) {
        throw DataError("margins do not sum to n (" + std::to_string(ra) + ", " +
                        std::to_string(cb) + " vs " + std::to_string(n) + ")");
    }
    if (n <= 0) throw DataError("expected mutual information needs n >= 1");

    const double nd = static_cast<double>(n);
    const double lg_n = std::lgamma(nd + 1.0);
    double emi = 0.0;
    for (auto a : row_margins) {
        if (a == 0) continue;
        const double ad = static_cast<double>(a);
        for (auto b : col_margins) {
            if (b == 0) continue;
            const double bd = static_cast<double>(b);
            const double lg_const = std::lgamma(ad + 1.0) + std::lgamma(bd + 1.0) +
                                    std::lgamma(nd - ad + 1.0) + std::lgamma(nd - bd + 1.0) -
                                    lg_n;
            const std::int64_t lo = std::max<std::int64_t>(1, a + b - n);
            const std::int64_t hi = std::min(a, b);
            for (std::int64_t nij = lo; nij <= hi; ++nij) {
                const double c = static_cast<double>(nij);
                const double log_p = lg_const - std::lgamma(c + 1.0) - std::lgamma(ad - c + 1.0) -
                                     std::lgamma(bd - c + 1.0) -
                                     std::lgamma(nd - ad - bd + c + 1.0);
                emi += (c / nd) * std::log(nd * c / (ad * bd)) * std::exp(log_p);
            }
        }
    }
    return std::max(emi, 0.0);
}

inline double expected_mi(const ContingencyTable& t) {
    return expected_mi(t.row_margins(), t.col_margins(), t.total());
}

/// MI divided by the chosen mean of the two marginal entropies.
inline double nmi(const ContingencyTable& t, Normalizer how = Normalizer::arithmetic) {
    const double hu = entropy_of_counts(t.row_margins());
    const double hv = entropy_of_counts(t.col_margins());
    if (hu == 0.0 && hv == 0.0) {
        // Both partitions are a single cluster, hence identical.
        return 1.0;
    }
    if (t.is_matching()) return 1.0;
    const double mi = mutual_info(t);
    const double denom = normalize_entropies(hu, hv, how);
    if (denom <= 0.0) return 0.0;  // one side trivial: MI is 0
    return mi / denom;
}

/// Chance-corrected MI: (MI - E[MI]) / (N - E[MI]), 0 when the denominator
/// is not positive.
inline double ami(const ContingencyTable& t, Normalizer how = Normalizer::arithmetic) {
    const double hu = entropy_of_counts(t.row_margins());
    const double hv = entropy_of_counts(t.col_margins());
    if (hu > 0.0 && hv > 0.0 && t.is_matching()) return 1.0;
    const double mi = mutual_info(t);
    const double emi = expected_mi(t);
    const double denom = normalize_entropies(hu, hv, how) - emi;
    if (denom <= 0.0) return 0.0;
    return (mi - emi) / denom;
}

// ---------------------------------------------------------------------------
// Pair counting

struct RandScores {
    double ri = 0.0;
    double ari = 0.0;
};

inline RandScores rand_ari(const ContingencyTable& t) {
    const std::int64_t n = t.total();
    if (n < 2) throw DataError("Rand index needs at least two points");
    auto choose2 = [](std::int64_t x) { return x * (x - 1) / 2; };
    std::int64_t sum_cells = 0, sum_rows = 0, sum_cols = 0;
    for (std::size_t i = 0; i < t.rows(); ++i) {
        for (std::size_t j = 0; j < t.cols(); ++j) sum_cells += choose2(t(i, j));
    }
    for (auto a : t.row_margins()) sum_rows += choose2(a);
    for (auto b : t.col_margins()) sum_cols += choose2(b);
    const std::int64_t pairs = choose2(n);

    // agreements: same/same plus different/different
    const std::int64_t agree = pairs + 2 * sum_cells - sum_rows - sum_cols;
    RandScores s;
    s.ri = static_cast<double>(agree) / static_cast<double>(pairs);

    const double expected =
        static_cast<double>(sum_rows) * static_cast<double>(sum_cols) / static_cast<double>(pairs);
    const double max_index = 0.5 * static_cast<double>(sum_rows + sum_cols);
    const double denom = max_index - expected;
    if (denom == 0.0) {
        s.ari = t.is_matching() ? 1.0 : 0.0;
    } else {
        s.ari = (static_cast<double>(sum_cells) - expected) / denom;
    }
    return s;
}

// ---------------------------------------------------------------------------
// Internal indices (noise points excluded)

namespace detail {

struct ClusterGeometry {
    std::size_t k = 0;
    std::vector<double> centroids;  // k x d
    std::vector<double> spread;     // mean distance to own centroid
};

inline ClusterGeometry cluster_geometry(const Dataset& ds, const Partition& p) {
    const std::size_t d = ds.dim();
    ClusterGeometry g;
    g.k = p.num_clusters();
    g.centroids.assign(g.k * d, 0.0);
    g.spread.assign(g.k, 0.0);
    for (std::size_t i = 0; i < ds.size(); ++i) {
        if (p[i] == Partition::kNoise) continue;
        const auto c = static_cast<std::size_t>(p[i]);
        for (std::size_t j = 0; j < d; ++j) g.centroids[c * d + j] += ds.at(i, j);
    }
    for (std::size_t c = 0; c < g.k; ++c) {
        for (std::size_t j = 0; j < d; ++j) {
            g.centroids[c * d + j] /= static_cast<double>(p.sizes()[c]);
        }
    }
    for (std::size_t i = 0; i < ds.size(); ++i) {
        if (p[i] == Partition::kNoise) continue;
        const auto c = static_cast<std::size_t>(p[i]);
        g.spread[c] += distance(ds.point(i), {g.centroids.data() + c * d, d});
    }
    for (std::size_t c = 0; c < g.k; ++c) g.spread[c] /= static_cast<double>(p.sizes()[c]);
    return g;
}

inline void require_two_clusters(const Dataset& ds, const Partition& p, const char* what) {
    if (p.size() != ds.size()) throw DataError("partition length does not match dataset");
    if (p.num_clusters() < 2) {
        throw UndefinedMetric(std::string(what) +
                              " is only defined for at least two clusters (got " +
                              std::to_string(p.num_clusters()) + ")");
    }
}

}  // namespace detail

/// Davies-Bouldin index: mean over clusters of the worst (s_i+s_j)/d(c_i,c_j).
inline double dbi(const Dataset& ds, const Partition& p) {
    detail::require_two_clusters(ds, p, "DBI");
    const auto g = detail::cluster_geometry(ds, p);
    const std::size_t d = ds.dim();
    double total = 0.0;
    for (std::size_t i = 0; i < g.k; ++i) {
        double worst = 0.0;
        for (std::size_t j = 0; j < g.k; ++j) {
            if (i == j) continue;
            const double sep = distance({g.centroids.data() + i * d, d},
                                        {g.centroids.data() + j * d, d});
            if (sep == 0.0) {
                throw UndefinedMetric("DBI undefined: clusters " + std::to_string(i) + " and " +
                                      std::to_string(j) + " have coincident centroids");
            }
            worst = std::max(worst, (g.spread[i] + g.spread[j]) / sep);
        }
        total += worst;
    }
    return total / static_cast<double>(g.k);
}

/// Per-point silhouette values; noise points get NaN. A point alone in its
/// cluster scores 0.
inline std::vector<double> silhouette_samples(const Dataset& ds, const Partition& p,
                                              unsigned workers = 1) {
    detail::require_two_clusters(ds, p, "Silhouette");
    const std::size_t n = ds.size();
    const std::size_t k = p.num_clusters();
    std::vector<double> out(n, std::nan(""));
    parallel_for(n, workers, [&](std::size_t i) {
        if (p[i] == Partition::kNoise) return;
        const auto own = static_cast<std::size_t>(p[i]);
        if (p.sizes()[own] == 1) {
            out[i] = 0.0;
            return;
        }
        std::vector<double> sums(k, 0.0);
        const auto xi = ds.point(i);
        for (std::size_t m = 0; m < n; ++m) {
            if (m == i || p[m] == Partition::kNoise) continue;
            sums[static_cast<std::size_t>(p[m])] += distance(xi, ds.point(m));
        }
        const double a = sums[own] / static_cast<double>(p.sizes()[own] - 1);
        double b = std::numeric_limits<double>::infinity();
        for (std::size_t c = 0; c < k; ++c) {
            if (c == own) continue;
            b = std::min(b, sums[c] / static_cast<double>(p.sizes()[c]));
        }
        const double denom = std::max(a, b);
        out[i] = denom > 0.0 ? (b - a) / denom : 0.0;
    });
    return out;
}

/// Mean silhouette width over non-noise points.
inline double silhouette(const Dataset& ds, const Partition& p, unsigned workers = 1) {
    const auto s = silhouette_samples(ds, p, workers);
    double total = 0.0;
    std::size_t count = 0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (p[i] == Partition::kNoise) continue;
        total += s[i];
        ++count;
    }
    return total / static_cast<double>(count);
}

// ---------------------------------------------------------------------------
// Full metric row

struct MetricReport {
    std::size_t n = 0;
    std::size_t clusters = 0;
    std::size_t noise = 0;
    std::optional<double> dbi;
    std::optional<double> sc;
    std::string internal_note;  // why dbi/sc are absent, if they are
    std::optional<double> ri;
    std::optional<double> ari;
    std::optional<double> mi;
    std::optional<double> nmi;
    std::optional<double> ami;
    Normalizer normalizer = Normalizer::arithmetic;
};

/// Internal indices only.
inline MetricReport internal_report(const Dataset& ds, const Partition& p, unsigned workers = 1) {
    MetricReport r;
    r.n = p.size();
    r.clusters = p.num_clusters();
    r.noise = p.noise_count();
    if (p.num_clusters() < 2) {
        r.internal_note = "internal indices need at least two clusters";
        return r;
    }
    try {
        r.dbi = dbi(ds, p);
    } catch (const UndefinedMetric& e) {
        r.internal_note = e.what();
    }
    r.sc = silhouette(ds, p, workers);
    return r;
}

/// External indices of `clustering` against `reference`.
inline void add_external(MetricReport& r, const Partition& clustering, const Partition& reference,
                         Normalizer how) {
    const auto t = contingency(clustering, reference);
    const auto rs = rand_ari(t);
    r.ri = rs.ri;
    r.ari = rs.ari;
    r.mi = mutual_info(t);
    r.nmi = nmi(t, how);
    r.ami = ami(t, how);
    r.normalizer = how;
}

inline MetricReport evaluate(const Dataset& ds, const Partition& clustering,
                             const std::optional<Partition>& reference,
                             Normalizer how = Normalizer::arithmetic, unsigned workers = 1) {
    MetricReport r = internal_report(ds, clustering, workers);
    r.normalizer = how;
    if (reference) add_external(r, clustering, *reference, how);
    return r;
}

}  // namespace labelaudit
