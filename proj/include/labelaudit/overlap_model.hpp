#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "labelaudit/parallel.hpp"

namespace labelaudit {

// Probability that k equal circles of radius r, with centers placed uniformly
// in a w x w box, are pairwise disjoint.

struct OverlapSimConfig {
    std::size_t k = 2;
    double r = 0.01;
    double w = 1.0;
    std::size_t trials = 10000;
    std::uint64_t seed = 0;
    bool inset = false;  // sample centers in [r, w-r]^2 so circles stay inside
};

namespace detail {
inline void check_geometry(double r, double w) {
    if (!(r > 0.0) || !(w > 0.0)) throw std::invalid_argument("r and w must be positive");
    if (!(2.0 * r < w)) {
        throw std::invalid_argument("circle diameter must be smaller than the box width (2r < w)");
    }
}
}  // namespace detail

/// Non-overlap probability of one pair, ignoring boundary effects.
inline double p_pair(double r, double w) {
    detail::check_geometry(r, w);
    const double p = 1.0 - 4.0 * std::numbers::pi * r * r / (w * w);
    return p > 0.0 ? p : 0.0;
}

/// p_pair raised to the number of pairs, treating pairs as independent.
inline double p_disjoint_exact(std::size_t k, double r, double w) {
    if (k == 0) throw std::invalid_argument("k must be >= 1");
    const double pp = p_pair(r, w);
    if (k == 1) return 1.0;
    const double pairs = 0.5 * static_cast<double>(k) * static_cast<double>(k - 1);
    return std::pow(pp, pairs);
}

/// First-order exponential form exp(-2 pi r^2 k(k-1) / w^2), valid for r << w.
inline double p_disjoint_approx(std::size_t k, double r, double w) {
    if (k == 0) throw std::invalid_argument("k must be >= 1");
    detail::check_geometry(r, w);
    const double x = 4.0 * std::numbers::pi * r * r / (w * w);
    if (!(x < 0.1)) {
        throw std::invalid_argument("exponential approximation needs 4*pi*r^2/w^2 < 0.1 (got " +
                                    std::to_string(x) + "); use p_disjoint_exact");
    }
    const double kk = static_cast<double>(k);
    return std::exp(-2.0 * std::numbers::pi * r * r * kk * (kk - 1.0) / (w * w));
}

struct MonteCarloEstimate {
    double estimate = 0.0;
    double stderr_ = 0.0;
    std::size_t disjoint = 0;
    std::size_t trials = 0;
};

/// Fraction of trials in which all center distances exceed 2r. Trial t draws
/// from its own stream derived from (seed, t), so the result does not depend
/// on the worker count.
inline MonteCarloEstimate monte_carlo_disjoint(const OverlapSimConfig& cfg, unsigned workers = 1) {
    detail::check_geometry(cfg.r, cfg.w);
    if (cfg.k == 0) throw std::invalid_argument("k must be >= 1");
    if (cfg.trials == 0) throw std::invalid_argument("trials must be >= 1");

    const double lo = cfg.inset ? cfg.r : 0.0;
    const double span = cfg.inset ? cfg.w - 2.0 * cfg.r : cfg.w;
    const double min_d2 = 4.0 * cfg.r * cfg.r;

    std::vector<unsigned char> ok(cfg.trials, 0);
    parallel_for(cfg.trials, workers, [&](std::size_t t) {
        SplitMix64 rng(derive_seed(cfg.seed, t));
        std::vector<double> xs(cfg.k), ys(cfg.k);
        for (std::size_t i = 0; i < cfg.k; ++i) {
            xs[i] = lo + span * rng.uniform();
            ys[i] = lo + span * rng.uniform();
        }
        for (std::size_t i = 0; i < cfg.k; ++i) {
            for (std::size_t j = i + 1; j < cfg.k; ++j) {
                const double dx = xs[i] - xs[j];
                const double dy = ys[i] - ys[j];
                if (!(dx * dx + dy * dy > min_d2)) return;
            }
        }
        ok[t] = 1;
    });

    MonteCarloEstimate m;
    m.trials = cfg.trials;
    for (auto v : ok) m.disjoint += v;
    m.estimate = static_cast<double>(m.disjoint) / static_cast<double>(cfg.trials);
    m.stderr_ = std::sqrt(m.estimate * (1.0 - m.estimate) / static_cast<double>(cfg.trials));
    return m;
}

struct OverlapCurveRow {
    std::size_t k = 0;
    double exact = 0.0;
    double approx = 0.0;
    double monte_carlo = 0.0;
    double stderr_ = 0.0;
};

/// One row per k in [k_min, k_max]; each k uses its own seed derived from
/// base_seed.
inline std::vector<OverlapCurveRow> overlap_curve(std::size_t k_min, std::size_t k_max, double r,
                                                  double w, std::size_t trials,
                                                  std::uint64_t base_seed, bool inset = false,
                                                  unsigned workers = 1) {
    if (k_min == 0 || k_max < k_min) throw std::invalid_argument("need 1 <= k_min <= k_max");
    std::vector<OverlapCurveRow> rows;
    for (std::size_t k = k_min; k <= k_max; ++k) {
        OverlapSimConfig cfg{k, r, w, trials, derive_seed(base_seed, k), inset};
        const auto mc = monte_carlo_disjoint(cfg, workers);
        rows.push_back({k, p_disjoint_exact(k, r, w), p_disjoint_approx(k, r, w), mc.estimate,
                        mc.stderr_});
    }
    return rows;
}

}  // namespace labelaudit
