#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "labelaudit/core.hpp"

namespace labelaudit {

/// One axis-aligned Gaussian blob.
struct BlobSpec {
    std::vector<double> center;
    std::vector<double> stddev;
    std::size_t count = 0;
    int class_label = 0;
};

/// Samples every blob in order and clips coordinates to [0,1]. Blobs that
/// share a class_label form one class.
inline Dataset gen_blobs(const std::vector<BlobSpec>& specs, std::uint64_t seed) {
    if (specs.empty()) throw std::invalid_argument("gen_blobs needs at least one blob");
    const std::size_t d = specs.front().center.size();
    std::size_t n = 0;
    for (const auto& s : specs) {
        if (s.center.size() != d || s.stddev.size() != d || d == 0) {
            throw std::invalid_argument("blob center/stddev dimensions disagree");
        }
        if (s.count == 0) throw std::invalid_argument("blob count must be >= 1");
        for (double sd : s.stddev) {
            if (!(sd > 0.0)) throw std::invalid_argument("blob stddev must be positive");
        }
        n += s.count;
    }
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<double> values;
    values.reserve(n * d);
    std::vector<int> labels;
    labels.reserve(n);
    for (const auto& s : specs) {
        for (std::size_t i = 0; i < s.count; ++i) {
            for (std::size_t j = 0; j < d; ++j) {
                values.push_back(std::clamp(s.center[j] + s.stddev[j] * normal(rng), 0.0, 1.0));
            }
            labels.push_back(s.class_label);
        }
    }
    return Dataset(n, d, std::move(values), {}, std::move(labels));
}

/// Two-class set with three blobs: class 0 is one blob (800 points), class 1
/// is two neighbouring blobs (1000 + 1200 points) 0.078 apart.
inline std::vector<BlobSpec> sd2_blobs() {
    return {
        {{0.50, 0.55}, {0.008, 0.002}, 800, 0},
        {{0.461, 0.40}, {0.007, 0.003}, 1000, 1},
        {{0.539, 0.40}, {0.007, 0.004}, 1200, 1},
    };
}

inline Dataset preset_sd2(std::uint64_t seed) { return gen_blobs(sd2_blobs(), seed); }

/// Two 200-point classes drawn from the same elongated Gaussian shape, with
/// centers one standard deviation apart along the major axis.
inline Dataset preset_overlap_pair(std::uint64_t seed) {
    constexpr double major = 0.10;  // pooled sd along the separation axis
    constexpr double minor = 0.02;
    constexpr std::size_t per_class = 200;
    const double u[2] = {1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0)};
    const double v[2] = {-1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0)};

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<double> values;
    std::vector<int> labels;
    for (int cls = 0; cls < 2; ++cls) {
        const double offset = (cls == 0 ? -0.5 : 0.5) * major;
        for (std::size_t i = 0; i < per_class; ++i) {
            const double a = offset + major * normal(rng);
            const double b = minor * normal(rng);
            for (int j = 0; j < 2; ++j) {
                values.push_back(std::clamp(0.5 + a * u[j] + b * v[j], 0.0, 1.0));
            }
            labels.push_back(cls);
        }
    }
    return Dataset(2 * per_class, 2, std::move(values), {}, std::move(labels));
}

/// Class 0: one blob of 270 points. Class 1: 300 points sharing class 0's
/// blob plus a separate elongated blob of 294 points.
inline Dataset preset_split_class(std::uint64_t seed) {
    return gen_blobs(
        {
            {{0.35, 0.35}, {0.04, 0.04}, 270, 0},
            {{0.35, 0.35}, {0.04, 0.04}, 300, 1},
            {{0.35, 0.65}, {0.08, 0.03}, 294, 1},
        },
        seed);
}

/// Control: three well separated blobs, one class each.
inline Dataset preset_clean_blobs(std::uint64_t seed) {
    return gen_blobs(
        {
            {{0.20, 0.25}, {0.03, 0.03}, 200, 0},
            {{0.75, 0.30}, {0.03, 0.03}, 250, 1},
            {{0.45, 0.75}, {0.03, 0.03}, 300, 2},
        },
        seed);
}

/// Six features, two classes: class 0 is a single Gaussian (100 points),
/// class 1 is two Gaussians (150 + 60 points) far apart from each other.
inline Dataset preset_split_6d(std::uint64_t seed) {
    return gen_blobs(
        {
            {{0.50, 0.50, 0.50, 0.50, 0.50, 0.50}, {0.05, 0.05, 0.05, 0.05, 0.05, 0.05}, 100, 0},
            {{0.35, 0.60, 0.45, 0.55, 0.40, 0.50}, {0.05, 0.05, 0.05, 0.05, 0.05, 0.05}, 150, 1},
            {{0.70, 0.35, 0.65, 0.30, 0.60, 0.55}, {0.04, 0.04, 0.04, 0.04, 0.04, 0.04}, 60, 1},
        },
        seed);
}

inline const std::vector<std::string>& preset_names() {
    static const std::vector<std::string> names = {"sd2", "overlap-pair", "split-class",
                                                   "clean-blobs", "split-6d"};
    return names;
}

inline Dataset make_preset(std::string_view name, std::uint64_t seed) {
    if (name == "sd2") return preset_sd2(seed);
    if (name == "overlap-pair") return preset_overlap_pair(seed);
    if (name == "split-class") return preset_split_class(seed);
    if (name == "clean-blobs") return preset_clean_blobs(seed);
    if (name == "split-6d") return preset_split_6d(seed);
    throw std::invalid_argument("unknown preset: " + std::string(name));
}

}  // namespace labelaudit
