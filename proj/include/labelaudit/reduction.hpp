#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "labelaudit/core.hpp"

namespace labelaudit {

// ---------------------------------------------------------------------------
// Symmetric eigen-decomposition

struct SymmetricEigen {
    std::vector<double> values;   // descending
    std::vector<double> vectors;  // row c holds eigenvector c (d x d, row-major)
    std::size_t sweeps = 0;
};

/// Cyclic Jacobi rotations on a symmetric d x d matrix (row-major). Stops
/// once the off-diagonal Frobenius norm falls below `tol`.
inline SymmetricEigen jacobi_eigen(std::vector<double> a, std::size_t d, double tol = 1e-10,
                                   std::size_t max_sweeps = 100) {
    if (a.size() != d * d) throw std::invalid_argument("jacobi_eigen: matrix is not d x d");
    std::vector<double> v(d * d, 0.0);
    for (std::size_t i = 0; i < d; ++i) v[i * d + i] = 1.0;
    auto A = [&](std::size_t i, std::size_t j) -> double& { return a[i * d + j]; };

    auto off_norm = [&] {
        double s = 0.0;
        for (std::size_t i = 0; i < d; ++i) {
            for (std::size_t j = 0; j < d; ++j) {
                if (i != j) s += A(i, j) * A(i, j);
            }
        }
        return std::sqrt(s);
    };

    SymmetricEigen out;
    for (; out.sweeps < max_sweeps && off_norm() >= tol; ++out.sweeps) {
        for (std::size_t p = 0; p + 1 < d; ++p) {
            for (std::size_t q = p + 1; q < d; ++q) {
                const double apq = A(p, q);
                if (apq == 0.0) continue;
                const double theta = (A(q, q) - A(p, p)) / (2.0 * apq);
                const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (std::size_t k = 0; k < d; ++k) {
                    const double akp = A(k, p), akq = A(k, q);
                    A(k, p) = c * akp - s * akq;
                    A(k, q) = s * akp + c * akq;
                }
                for (std::size_t k = 0; k < d; ++k) {
                    const double apk = A(p, k), aqk = A(q, k);
                    A(p, k) = c * apk - s * aqk;
                    A(q, k) = s * apk + c * aqk;
                }
                for (std::size_t k = 0; k < d; ++k) {
                    const double vkp = v[k * d + p], vkq = v[k * d + q];
                    v[k * d + p] = c * vkp - s * vkq;
                    v[k * d + q] = s * vkp + c * vkq;
                }
            }
        }
    }

    std::vector<std::size_t> order(d);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t x, std::size_t y) { return A(x, x) > A(y, y); });
    out.values.resize(d);
    out.vectors.resize(d * d);
    for (std::size_t c = 0; c < d; ++c) {
        out.values[c] = A(order[c], order[c]);
        for (std::size_t k = 0; k < d; ++k) out.vectors[c * d + k] = v[k * d + order[c]];
    }
    return out;
}

// ---------------------------------------------------------------------------
// PCA

struct PcaModel {
    std::vector<double> mean;
    std::vector<std::vector<double>> components;  // orthonormal, by eigenvalue
    std::vector<double> eigenvalues;              // descending, >= 0

    std::size_t dim() const noexcept { return mean.size(); }
    std::size_t count() const noexcept { return components.size(); }

    double total_variance() const {
        return std::accumulate(eigenvalues.begin(), eigenvalues.end(), 0.0);
    }
};

inline std::vector<double> sample_covariance(const Dataset& ds, std::vector<double>& mean) {
    const std::size_t n = ds.size();
    const std::size_t d = ds.dim();
    mean.assign(d, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < d; ++j) mean[j] += ds.at(i, j);
    }
    for (auto& m : mean) m /= static_cast<double>(n);
    std::vector<double> cov(d * d, 0.0);
    std::vector<double> centered(d);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < d; ++j) centered[j] = ds.at(i, j) - mean[j];
        for (std::size_t a = 0; a < d; ++a) {
            for (std::size_t b = a; b < d; ++b) cov[a * d + b] += centered[a] * centered[b];
        }
    }
    for (std::size_t a = 0; a < d; ++a) {
        for (std::size_t b = a; b < d; ++b) {
            cov[a * d + b] /= static_cast<double>(n - 1);
            cov[b * d + a] = cov[a * d + b];
        }
    }
    return cov;
}

/// Principal axes of the sample covariance (divisor n-1). Each component is
/// signed so that its largest-magnitude entry is positive.
inline PcaModel pca_fit(const Dataset& ds) {
    if (ds.size() < 2) throw std::invalid_argument("PCA needs at least two points");
    const std::size_t d = ds.dim();
    PcaModel model;
    auto cov = sample_covariance(ds, model.mean);
    const auto eig = jacobi_eigen(std::move(cov), d);
    for (std::size_t c = 0; c < d; ++c) {
        std::vector<double> comp(eig.vectors.begin() + static_cast<std::ptrdiff_t>(c * d),
                                 eig.vectors.begin() + static_cast<std::ptrdiff_t>((c + 1) * d));
        std::size_t big = 0;
        for (std::size_t k = 1; k < d; ++k) {
            if (std::abs(comp[k]) > std::abs(comp[big]) + 1e-12) big = k;
        }
        if (comp[big] < 0.0) {
            for (auto& x : comp) x = -x;
        }
        model.components.push_back(std::move(comp));
        model.eigenvalues.push_back(std::max(eig.values[c], 0.0));
    }
    return model;
}

/// Coordinates of the centered data along the chosen components, in the
/// order given.
inline Dataset pca_project(const Dataset& ds, const PcaModel& model,
                           std::span<const std::size_t> component_indices) {
    if (component_indices.empty()) throw std::invalid_argument("no components selected");
    if (ds.dim() != model.dim()) throw std::invalid_argument("dataset/model dimension mismatch");
    for (auto c : component_indices) {
        if (c >= model.count()) {
            throw std::out_of_range("component index " + std::to_string(c) + " out of range (" +
                                    std::to_string(model.count()) + " components)");
        }
    }
    const std::size_t n = ds.size();
    const std::size_t m = component_indices.size();
    std::vector<double> out(n * m);
    std::vector<std::string> names;
    for (auto c : component_indices) names.push_back("pc" + std::to_string(c + 1));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t a = 0; a < m; ++a) {
            const auto& comp = model.components[component_indices[a]];
            double s = 0.0;
            for (std::size_t j = 0; j < ds.dim(); ++j) s += (ds.at(i, j) - model.mean[j]) * comp[j];
            out[i * m + a] = s;
        }
    }
    return Dataset(n, m, std::move(out), std::move(names), ds.labels());
}

inline Dataset pca_project(const Dataset& ds, const PcaModel& model,
                           std::initializer_list<std::size_t> component_indices) {
    const std::vector<std::size_t> idx(component_indices);
    return pca_project(ds, model, std::span<const std::size_t>(idx));
}

/// Inverse of a full projection: mean + sum of coordinates times components.
inline Dataset pca_reconstruct(const Dataset& projected, const PcaModel& model,
                               std::span<const std::size_t> component_indices) {
    const std::size_t n = projected.size();
    const std::size_t d = model.dim();
    std::vector<double> out(n * d);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < d; ++j) {
            double s = model.mean[j];
            for (std::size_t a = 0; a < component_indices.size(); ++a) {
                s += projected.at(i, a) * model.components[component_indices[a]][j];
            }
            out[i * d + j] = s;
        }
    }
    return Dataset(n, d, std::move(out), {}, projected.labels());
}

// ---------------------------------------------------------------------------
// 1-D kernel density and peaks

struct DensityCurve {
    std::vector<double> grid;
    std::vector<double> density;
    double bandwidth = 0.0;
};

inline constexpr std::size_t kDensityGridSize = 256;

/// 1.06 * sd * n^(-1/5); falls back to a small positive width when the
/// sample has no spread.
inline double silverman_bandwidth(std::span<const double> values) {
    const std::size_t n = values.size();
    if (n < 2) throw std::invalid_argument("bandwidth needs at least two values");
    const double mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(n);
    double ss = 0.0;
    double scale = 0.0;
    for (double v : values) {
        ss += (v - mean) * (v - mean);
        scale = std::max(scale, std::abs(v));
    }
    const double sd = std::sqrt(ss / static_cast<double>(n - 1));
    if (sd > 0.0) return 1.06 * sd * std::pow(static_cast<double>(n), -0.2);
    return 1e-3 * std::max(scale, 1.0);
}

/// Gaussian KDE on a 256-point grid over [min-3h, max+3h], rescaled so the
/// trapezoid integral is exactly 1.
inline DensityCurve density_profile(std::span<const double> values, double bandwidth) {
    if (values.size() < 2) throw std::invalid_argument("density profile needs at least two values");
    if (!(bandwidth > 0.0)) throw std::invalid_argument("bandwidth must be positive");
    const auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
    const double lo = *lo_it - 3.0 * bandwidth;
    const double hi = *hi_it + 3.0 * bandwidth;
    DensityCurve c;
    c.bandwidth = bandwidth;
    c.grid.resize(kDensityGridSize);
    c.density.assign(kDensityGridSize, 0.0);
    const double step = (hi - lo) / static_cast<double>(kDensityGridSize - 1);
    const double norm =
        1.0 / (static_cast<double>(values.size()) * bandwidth * std::sqrt(2.0 * std::numbers::pi));
    for (std::size_t g = 0; g < kDensityGridSize; ++g) {
        c.grid[g] = lo + step * static_cast<double>(g);
        double s = 0.0;
        for (double v : values) {
            const double z = (c.grid[g] - v) / bandwidth;
            s += std::exp(-0.5 * z * z);
        }
        c.density[g] = s * norm;
    }
    double integral = 0.0;
    for (std::size_t g = 1; g < kDensityGridSize; ++g) {
        integral += 0.5 * step * (c.density[g - 1] + c.density[g]);
    }
    if (integral > 0.0) {
        for (auto& y : c.density) y /= integral;
    }
    return c;
}

inline double trapezoid_integral(const DensityCurve& c) {
    double s = 0.0;
    for (std::size_t g = 1; g < c.grid.size(); ++g) {
        s += 0.5 * (c.grid[g] - c.grid[g - 1]) * (c.density[g - 1] + c.density[g]);
    }
    return s;
}

struct Peak {
    std::size_t index = 0;  // grid index (left end of a plateau)
    double height = 0.0;
    double prominence = 0.0;
};

/// Local maxima (plateaus count once; maxima at either end count) whose
/// prominence is at least min_prominence * max(density). Prominence is the
/// height above the higher of the two lowest points separating the peak from
/// taller terrain (or from the curve's end) on each side.
inline std::vector<Peak> find_peaks(const DensityCurve& curve, double min_prominence) {
    const auto& y = curve.density;
    const std::size_t n = y.size();
    std::vector<Peak> peaks;
    if (n == 0) return peaks;
    const double top = *std::max_element(y.begin(), y.end());

    std::size_t i = 0;
    while (i < n) {
        std::size_t r = i;
        while (r + 1 < n && y[r + 1] == y[i]) ++r;
        const bool left_ok = i == 0 || y[i - 1] < y[i];
        const bool right_ok = r + 1 == n || y[r + 1] < y[i];
        if (left_ok && right_ok) {
            const double h = y[i];
            // walk outwards until terrain rises above h
            double left_min = h;
            bool left_bounded = false;
            for (std::size_t m = i; m-- > 0;) {
                if (y[m] > h) break;
                left_min = std::min(left_min, y[m]);
                left_bounded = true;
            }
            double right_min = h;
            bool right_bounded = false;
            for (std::size_t m = r + 1; m < n; ++m) {
                if (y[m] > h) break;
                right_min = std::min(right_min, y[m]);
                right_bounded = true;
            }
            double base;
            if (left_bounded && right_bounded) {
                base = std::max(left_min, right_min);
            } else if (left_bounded) {
                base = left_min;
            } else if (right_bounded) {
                base = right_min;
            } else {
                base = 0.0;
            }
            const double prom = h - base;
            if (prom >= min_prominence * top) peaks.push_back({i, h, prom});
        }
        i = r + 1;
    }
    return peaks;
}

inline std::size_t count_peaks(const DensityCurve& curve, double min_prominence = 0.1) {
    return find_peaks(curve, min_prominence).size();
}

/// Number of sample values in each region between consecutive peaks, the
/// regions being split at the density minimum between the two peaks.
inline std::vector<std::size_t> peak_masses(const DensityCurve& curve,
                                            const std::vector<Peak>& peaks,
                                            std::span<const double> values) {
    std::vector<double> cuts;
    for (std::size_t p = 0; p + 1 < peaks.size(); ++p) {
        std::size_t lo = peaks[p].index;
        for (std::size_t g = peaks[p].index; g <= peaks[p + 1].index; ++g) {
            if (curve.density[g] < curve.density[lo]) lo = g;
        }
        cuts.push_back(curve.grid[lo]);
    }
    std::vector<std::size_t> mass(peaks.size(), 0);
    if (peaks.empty()) return mass;
    for (double v : values) {
        const auto seg = static_cast<std::size_t>(std::upper_bound(cuts.begin(), cuts.end(), v) -
                                                  cuts.begin());
        ++mass[seg];
    }
    return mass;
}

}  // namespace labelaudit
