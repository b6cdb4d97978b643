#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "labelaudit/core.hpp"
#include "labelaudit/parallel.hpp"

namespace labelaudit {

// ---------------------------------------------------------------------------
// K-means

struct KMeansConfig {
    std::size_t k = 2;
    std::size_t restarts = 16;
    std::size_t max_iters = 300;
    double tol = 1e-6;  // max centroid movement that counts as converged
    std::uint64_t seed = 0;
};

struct KMeansResult {
    Partition partition;
    std::vector<double> centroids;  // k x d
    double inertia = 0.0;
    std::size_t iterations = 0;
    std::vector<double> inertia_trace;  // inertia after each assignment step
};

namespace detail {

// Lowest index wins ties.
inline std::size_t nearest_centroid(std::span<const double> x, const std::vector<double>& centroids,
                                    std::size_t k, double* best_d2 = nullptr) {
    const std::size_t d = x.size();
    std::size_t best = 0;
    double bd = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < k; ++c) {
        const double d2 = squared_distance(x, {centroids.data() + c * d, d});
        if (d2 < bd) {
            bd = d2;
            best = c;
        }
    }
    if (best_d2) *best_d2 = bd;
    return best;
}

inline std::vector<double> kmeanspp_init(const Dataset& ds, std::size_t k, SplitMix64& rng) {
    const std::size_t n = ds.size();
    const std::size_t d = ds.dim();
    std::vector<double> centroids;
    centroids.reserve(k * d);
    auto push = [&](std::size_t i) {
        auto p = ds.point(i);
        centroids.insert(centroids.end(), p.begin(), p.end());
    };
    push(static_cast<std::size_t>(rng.uniform() * static_cast<double>(n)));
    std::vector<double> d2(n);
    for (std::size_t i = 0; i < n; ++i) d2[i] = squared_distance(ds.point(i), {centroids.data(), d});
    for (std::size_t c = 1; c < k; ++c) {
        const double total = std::accumulate(d2.begin(), d2.end(), 0.0);
        std::size_t pick = n;
        if (total > 0.0) {
            const double target = rng.uniform() * total;
            double acc = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                acc += d2[i];
                if (acc > target && d2[i] > 0.0) {
                    pick = i;
                    break;
                }
            }
            if (pick == n) {
                // rounding at the top end: last point with positive weight
                for (std::size_t i = n; i-- > 0;) {
                    if (d2[i] > 0.0) {
                        pick = i;
                        break;
                    }
                }
            }
        } else {
            pick = static_cast<std::size_t>(rng.uniform() * static_cast<double>(n));
        }
        push(pick);
        for (std::size_t i = 0; i < n; ++i) {
            d2[i] = std::min(d2[i], squared_distance(ds.point(i), {centroids.data() + c * d, d}));
        }
    }
    return centroids;
}

inline KMeansResult lloyd(const Dataset& ds, std::size_t k, std::size_t max_iters, double tol,
                          std::uint64_t seed) {
    const std::size_t n = ds.size();
    const std::size_t d = ds.dim();
    SplitMix64 rng(seed);
    KMeansResult res;
    res.centroids = kmeanspp_init(ds, k, rng);
    std::vector<int> assign(n, -1);
    std::vector<double> dist2(n);

    auto assign_all = [&] {
        double inertia = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            assign[i] = static_cast<int>(nearest_centroid(ds.point(i), res.centroids, k, &dist2[i]));
            inertia += dist2[i];
        }
        return inertia;
    };

    double inertia = assign_all();
    res.inertia_trace.push_back(inertia);
    for (std::size_t it = 0; it < max_iters; ++it) {
        res.iterations = it + 1;
        std::vector<double> next(k * d, 0.0);
        std::vector<std::size_t> counts(k, 0);
        for (std::size_t i = 0; i < n; ++i) {
            const auto c = static_cast<std::size_t>(assign[i]);
            ++counts[c];
            for (std::size_t j = 0; j < d; ++j) next[c * d + j] += ds.at(i, j);
        }
        for (std::size_t c = 0; c < k; ++c) {
            if (counts[c] == 0) {
                // Re-seed an empty cluster at the point farthest from its centroid.
                std::size_t far = 0;
                for (std::size_t i = 1; i < n; ++i) {
                    if (dist2[i] > dist2[far]) far = i;
                }
                const auto donor = static_cast<std::size_t>(assign[far]);
                for (std::size_t j = 0; j < d; ++j) {
                    next[c * d + j] = ds.at(far, j);
                    next[donor * d + j] -= ds.at(far, j);
                }
                --counts[donor];
                counts[c] = 1;
                assign[far] = static_cast<int>(c);
                dist2[far] = 0.0;
            }
        }
        double shift = 0.0;
        for (std::size_t c = 0; c < k; ++c) {
            double s2 = 0.0;
            for (std::size_t j = 0; j < d; ++j) {
                const double v = counts[c] ? next[c * d + j] / static_cast<double>(counts[c])
                                           : res.centroids[c * d + j];
                const double delta = v - res.centroids[c * d + j];
                s2 += delta * delta;
                res.centroids[c * d + j] = v;
            }
            shift = std::max(shift, std::sqrt(s2));
        }
        const std::vector<int> before = assign;
        inertia = assign_all();
        res.inertia_trace.push_back(inertia);
        if (shift <= tol || assign == before) break;
    }
    res.inertia = inertia;
    res.partition = Partition::from_ids(assign);
    return res;
}

// Lexicographic order of the points; duplicates are interchangeable so the
// order of equal rows does not matter.
inline std::vector<std::size_t> canonical_order(const Dataset& ds) {
    std::vector<std::size_t> order(ds.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        auto pa = ds.point(a);
        auto pb = ds.point(b);
        return std::lexicographical_compare(pa.begin(), pa.end(), pb.begin(), pb.end());
    });
    return order;
}

}  // namespace detail

/// Lloyd iterations from k-means++ seeding, best of `restarts` runs by
/// inertia. Points are processed in a canonical (sorted) order, so the result
/// does not depend on input row order. Cluster ids follow first appearance in
/// the input order.
inline KMeansResult kmeans_detailed(const Dataset& ds, const KMeansConfig& cfg,
                                    unsigned workers = 1) {
    if (cfg.k == 0) throw std::invalid_argument("k-means needs k >= 1");
    if (cfg.k > ds.size()) {
        throw std::invalid_argument("k-means needs k <= n (k=" + std::to_string(cfg.k) +
                                    ", n=" + std::to_string(ds.size()) + ")");
    }
    if (cfg.restarts == 0 || cfg.max_iters == 0) {
        throw std::invalid_argument("k-means needs restarts >= 1 and max_iters >= 1");
    }
    if (!(cfg.tol >= 0.0)) throw std::invalid_argument("k-means tolerance must be >= 0");

    const auto order = detail::canonical_order(ds);
    const Dataset sorted = ds.subset(order);
    std::vector<KMeansResult> runs(cfg.restarts);
    parallel_for(cfg.restarts, workers, [&](std::size_t r) {
        runs[r] = detail::lloyd(sorted, cfg.k, cfg.max_iters, cfg.tol, derive_seed(cfg.seed, r));
    });
    std::size_t best = 0;
    for (std::size_t r = 1; r < runs.size(); ++r) {
        if (runs[r].inertia < runs[best].inertia) best = r;
    }
    KMeansResult out = std::move(runs[best]);
    std::vector<int> ids(ds.size());
    for (std::size_t s = 0; s < order.size(); ++s) ids[order[s]] = out.partition[s];
    out.partition = Partition::from_ids(ids);
    // centroids re-indexed to the new ids
    const std::size_t d = ds.dim();
    std::vector<double> centroids(out.centroids.size());
    std::vector<bool> seen(cfg.k, false);
    for (std::size_t i = 0; i < ds.size(); ++i) {
        const auto fresh = static_cast<std::size_t>(out.partition[i]);
        const auto old = static_cast<std::size_t>(ids[i]);
        if (seen[fresh]) continue;
        seen[fresh] = true;
        std::copy_n(out.centroids.begin() + static_cast<std::ptrdiff_t>(old * d), d,
                    centroids.begin() + static_cast<std::ptrdiff_t>(fresh * d));
    }
    out.centroids = std::move(centroids);
    return out;
}

inline Partition kmeans(const Dataset& ds, const KMeansConfig& cfg, unsigned workers = 1) {
    return kmeans_detailed(ds, cfg, workers).partition;
}

// ---------------------------------------------------------------------------
// DBSCAN

struct DbscanConfig {
    double eps = 0.025;
    std::size_t min_pts = 4;
};

/// All indices within eps of point i (inclusive), including i itself.
inline std::vector<std::size_t> region_query(const Dataset& ds, std::size_t i, double eps) {
    std::vector<std::size_t> out;
    const double eps2 = eps * eps;
    const auto xi = ds.point(i);
    for (std::size_t m = 0; m < ds.size(); ++m) {
        if (squared_distance(xi, ds.point(m)) <= eps2) out.push_back(m);
    }
    return out;
}

/// Classic DBSCAN. A core point has at least min_pts points (itself
/// included) within eps. Border points reachable from several clusters go to
/// the first cluster that reaches them, scanning points in index order.
inline Partition dbscan(const Dataset& ds, const DbscanConfig& cfg, unsigned workers = 1) {
    if (!(cfg.eps > 0.0)) throw std::invalid_argument("DBSCAN eps must be positive");
    if (cfg.min_pts == 0) throw std::invalid_argument("DBSCAN min_pts must be >= 1");
    const std::size_t n = ds.size();

    std::vector<std::vector<std::size_t>> neighbors(n);
    parallel_for(n, workers, [&](std::size_t i) { neighbors[i] = region_query(ds, i, cfg.eps); });

    std::vector<int> label(n, Partition::kNoise);
    std::vector<bool> visited(n, false);
    int next_id = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (visited[i]) continue;
        if (neighbors[i].size() < cfg.min_pts) continue;  // maybe border later
        const int id = next_id++;
        std::deque<std::size_t> queue{i};
        visited[i] = true;
        label[i] = id;
        while (!queue.empty()) {
            const std::size_t q = queue.front();
            queue.pop_front();
            if (neighbors[q].size() < cfg.min_pts) continue;  // border: no expansion
            for (std::size_t m : neighbors[q]) {
                if (label[m] == Partition::kNoise) label[m] = id;
                if (!visited[m]) {
                    visited[m] = true;
                    queue.push_back(m);
                }
            }
        }
    }
    return Partition(std::move(label));
}

// ---------------------------------------------------------------------------
// k-distance graph and elbow selection

/// Distance from every point to its k-th nearest other point, sorted
/// descending.
inline std::vector<double> k_dist_curve(const Dataset& ds, std::size_t k, unsigned workers = 1) {
    const std::size_t n = ds.size();
    if (k == 0 || k >= n) {
        throw std::invalid_argument("k-dist needs 1 <= k < n (k=" + std::to_string(k) +
                                    ", n=" + std::to_string(n) + ")");
    }
    std::vector<double> kd(n);
    parallel_for(n, workers, [&](std::size_t i) {
        std::vector<double> d2;
        d2.reserve(n - 1);
        const auto xi = ds.point(i);
        for (std::size_t m = 0; m < n; ++m) {
            if (m != i) d2.push_back(squared_distance(xi, ds.point(m)));
        }
        std::nth_element(d2.begin(), d2.begin() + static_cast<std::ptrdiff_t>(k - 1), d2.end());
        kd[i] = std::sqrt(d2[k - 1]);
    });
    std::sort(kd.begin(), kd.end(), std::greater<>());
    return kd;
}

/// Horizontal axis used when locating the elbow of a k-dist curve.
enum class ElbowAxis {
    rank,      // position in the sorted curve
    log_rank,  // log(1 + position); resolves the sparse head of the curve
};

struct EpsSuggestion {
    double eps = 0.0;
    std::size_t index = 0;
    std::vector<double> curve;
};

/// Elbow of a descending curve: the sample farthest from the chord joining
/// the first and last samples. A curve with no bend (all samples on the
/// chord) yields its midpoint. Ties go to the lowest index.
inline EpsSuggestion suggest_eps(std::span<const double> curve,
                                 ElbowAxis axis = ElbowAxis::log_rank) {
    const std::size_t n = curve.size();
    if (n < 3) throw std::invalid_argument("elbow search needs a curve of length >= 3");
    auto x_of = [axis](std::size_t i) {
        return axis == ElbowAxis::rank ? static_cast<double>(i)
                                       : std::log1p(static_cast<double>(i));
    };
    const double x0 = x_of(0), y0 = curve[0];
    const double x1 = x_of(n - 1), y1 = curve[n - 1];
    const double dx = x1 - x0, dy = y1 - y0;
    const double len = std::hypot(dx, dy);
    double scale = 0.0;
    for (double v : curve) scale = std::max(scale, std::abs(v));

    std::size_t best = 0;
    double best_dist = -1.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dist = std::abs(dy * x_of(i) - dx * curve[i] + x1 * y0 - y1 * x0) / len;
        if (dist > best_dist) {
            best_dist = dist;
            best = i;
        }
    }
    // no bend: every sample lies on the chord up to rounding
    if (best_dist <= 1e-12 * std::max(scale, 1.0) * std::max(1.0, std::abs(dx))) {
        best = (n - 1) / 2;
    }
    EpsSuggestion s;
    s.eps = curve[best];
    s.index = best;
    s.curve.assign(curve.begin(), curve.end());
    return s;
}

}  // namespace labelaudit
