#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace labelaudit {

/// Input data that cannot be used (bad CSV, inconsistent sizes, ...).
class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A quantity that is mathematically undefined for the given input,
/// e.g. an internal index on a single-cluster partition.
class UndefinedMetric : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Row-major n x d matrix of finite features with optional class labels.
class Dataset {
public:
    Dataset() = default;

    Dataset(std::size_t n, std::size_t d, std::vector<double> values,
            std::vector<std::string> feature_names = {},
            std::optional<std::vector<int>> labels = std::nullopt)
        : n_(n), d_(d), values_(std::move(values)), names_(std::move(feature_names)),
          labels_(std::move(labels)) {
        if (n_ == 0 || d_ == 0) {
            throw DataError("dataset needs at least one point and one feature");
        }
        if (values_.size() != n_ * d_) {
            throw DataError("dataset value count does not match n*d");
        }
        for (double v : values_) {
            if (!std::isfinite(v)) throw DataError("dataset contains a non-finite value");
        }
        if (names_.empty()) {
            for (std::size_t j = 0; j < d_; ++j) names_.push_back("x" + std::to_string(j));
        } else if (names_.size() != d_) {
            throw DataError("feature name count does not match d");
        }
        if (labels_ && labels_->size() != n_) {
            throw DataError("label count does not match number of points");
        }
    }

    /// Builds a dataset from a list of equally sized points.
    static Dataset from_points(const std::vector<std::vector<double>>& points,
                               std::optional<std::vector<int>> labels = std::nullopt) {
        if (points.empty()) throw DataError("dataset needs at least one point");
        const std::size_t d = points.front().size();
        std::vector<double> values;
        values.reserve(points.size() * d);
        for (const auto& p : points) {
            if (p.size() != d) throw DataError("points have differing dimensionality");
            values.insert(values.end(), p.begin(), p.end());
        }
        return Dataset(points.size(), d, std::move(values), {}, std::move(labels));
    }

    std::size_t size() const noexcept { return n_; }
    std::size_t dim() const noexcept { return d_; }

    std::span<const double> point(std::size_t i) const noexcept {
        return {values_.data() + i * d_, d_};
    }
    double at(std::size_t i, std::size_t j) const noexcept { return values_[i * d_ + j]; }

    const std::vector<double>& values() const noexcept { return values_; }
    const std::vector<std::string>& feature_names() const noexcept { return names_; }
    const std::optional<std::vector<int>>& labels() const noexcept { return labels_; }
    bool has_labels() const noexcept { return labels_.has_value(); }

    Dataset with_labels(std::optional<std::vector<int>> labels) const {
        return Dataset(n_, d_, values_, names_, std::move(labels));
    }

    /// Rows listed in `rows`, in that order. Labels are carried over.
    Dataset subset(std::span<const std::size_t> rows) const {
        std::vector<double> values;
        values.reserve(rows.size() * d_);
        std::optional<std::vector<int>> labels;
        if (labels_) labels.emplace();
        for (std::size_t r : rows) {
            auto p = point(r);
            values.insert(values.end(), p.begin(), p.end());
            if (labels_) labels->push_back((*labels_)[r]);
        }
        return Dataset(rows.size(), d_, std::move(values), names_, std::move(labels));
    }

private:
    std::size_t n_ = 0;
    std::size_t d_ = 0;
    std::vector<double> values_;
    std::vector<std::string> names_;
    std::optional<std::vector<int>> labels_;
};

inline double squared_distance(std::span<const double> a, std::span<const double> b) noexcept {
    double s = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j) {
        const double t = a[j] - b[j];
        s += t * t;
    }
    return s;
}

inline double distance(std::span<const double> a, std::span<const double> b) noexcept {
    return std::sqrt(squared_distance(a, b));
}

/// Assignment of points to clusters 0..k-1, with kNoise marking noise points.
class Partition {
public:
    static constexpr int kNoise = -1;

    Partition() = default;

    /// Validating constructor: ids must be kNoise or in 0..k-1 with every
    /// cluster non-empty.
    explicit Partition(std::vector<int> assignment) : assignment_(std::move(assignment)) {
        int max_id = -1;
        for (int id : assignment_) {
            if (id < kNoise) throw DataError("cluster id below noise marker");
            max_id = std::max(max_id, id);
        }
        sizes_.assign(static_cast<std::size_t>(max_id + 1), 0);
        for (int id : assignment_) {
            if (id == kNoise) {
                ++noise_;
            } else {
                ++sizes_[static_cast<std::size_t>(id)];
            }
        }
        for (std::size_t c = 0; c < sizes_.size(); ++c) {
            if (sizes_[c] == 0) {
                throw DataError("cluster ids are not contiguous: cluster " + std::to_string(c) +
                                " is empty");
            }
        }
    }

    /// Densely re-encodes arbitrary ids by order of first appearance.
    /// Negative ids are treated as noise.
    static Partition from_ids(std::span<const int> ids) {
        std::unordered_map<int, int> remap;
        std::vector<int> out;
        out.reserve(ids.size());
        for (int id : ids) {
            if (id < 0) {
                out.push_back(kNoise);
                continue;
            }
            auto [it, inserted] = remap.try_emplace(id, static_cast<int>(remap.size()));
            out.push_back(it->second);
        }
        return Partition(std::move(out));
    }

    static Partition from_ids(const std::vector<int>& ids) {
        return from_ids(std::span<const int>(ids));
    }

    std::size_t size() const noexcept { return assignment_.size(); }
    std::size_t num_clusters() const noexcept { return sizes_.size(); }
    std::size_t noise_count() const noexcept { return noise_; }
    const std::vector<int>& assignment() const noexcept { return assignment_; }
    const std::vector<std::size_t>& sizes() const noexcept { return sizes_; }
    int operator[](std::size_t i) const noexcept { return assignment_[i]; }

    /// Noise points collected into one extra cluster with id k.
    Partition noise_as_cluster() const {
        if (noise_ == 0) return *this;
        std::vector<int> out = assignment_;
        const int extra = static_cast<int>(sizes_.size());
        for (int& id : out) {
            if (id == kNoise) id = extra;
        }
        return Partition(std::move(out));
    }

    friend bool operator==(const Partition&, const Partition&) = default;

private:
    std::vector<int> assignment_;
    std::vector<std::size_t> sizes_;
    std::size_t noise_ = 0;
};

/// k_U x k_V cross-tabulation of two partitions.
class ContingencyTable {
public:
    ContingencyTable() = default;

    /// Builds a table from explicit counts; all rows must have equal length.
    explicit ContingencyTable(const std::vector<std::vector<std::int64_t>>& counts) {
        if (counts.empty() || counts.front().empty()) {
            throw DataError("contingency table must be non-empty");
        }
        rows_ = counts.size();
        cols_ = counts.front().size();
        counts_.reserve(rows_ * cols_);
        for (const auto& row : counts) {
            if (row.size() != cols_) throw DataError("ragged contingency table");
            for (auto c : row) {
                if (c < 0) throw DataError("negative contingency count");
                counts_.push_back(c);
            }
        }
        compute_margins();
    }

    ContingencyTable(std::size_t rows, std::size_t cols, std::vector<std::int64_t> counts)
        : rows_(rows), cols_(cols), counts_(std::move(counts)) {
        if (counts_.size() != rows_ * cols_) throw DataError("contingency size mismatch");
        compute_margins();
    }

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    std::int64_t operator()(std::size_t i, std::size_t j) const noexcept {
        return counts_[i * cols_ + j];
    }
    const std::vector<std::int64_t>& row_margins() const noexcept { return row_margins_; }
    const std::vector<std::int64_t>& col_margins() const noexcept { return col_margins_; }
    std::int64_t total() const noexcept { return total_; }

    ContingencyTable transposed() const {
        std::vector<std::int64_t> t(counts_.size());
        for (std::size_t i = 0; i < rows_; ++i) {
            for (std::size_t j = 0; j < cols_; ++j) t[j * rows_ + i] = counts_[i * cols_ + j];
        }
        return ContingencyTable(cols_, rows_, std::move(t));
    }

    /// True when the two partitions are identical up to relabeling, i.e. every
    /// non-empty row and column holds exactly one non-zero cell.
    bool is_matching() const noexcept {
        std::vector<int> row_hits(rows_, 0), col_hits(cols_, 0);
        for (std::size_t i = 0; i < rows_; ++i) {
            for (std::size_t j = 0; j < cols_; ++j) {
                if ((*this)(i, j) != 0) {
                    ++row_hits[i];
                    ++col_hits[j];
                }
            }
        }
        for (std::size_t i = 0; i < rows_; ++i) {
            if (row_hits[i] > 1 || (row_hits[i] == 0 && row_margins_[i] != 0)) return false;
        }
        for (std::size_t j = 0; j < cols_; ++j) {
            if (col_hits[j] > 1) return false;
        }
        return true;
    }

    friend bool operator==(const ContingencyTable&, const ContingencyTable&) = default;

private:
    void compute_margins() {
        row_margins_.assign(rows_, 0);
        col_margins_.assign(cols_, 0);
        total_ = 0;
        for (std::size_t i = 0; i < rows_; ++i) {
            for (std::size_t j = 0; j < cols_; ++j) {
                const auto c = counts_[i * cols_ + j];
                row_margins_[i] += c;
                col_margins_[j] += c;
                total_ += c;
            }
        }
    }

    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<std::int64_t> counts_;
    std::vector<std::int64_t> row_margins_;
    std::vector<std::int64_t> col_margins_;
    std::int64_t total_ = 0;
};

/// Cross-tabulates u (rows) against v (columns). Noise points of either side
/// form one extra cluster so that n is preserved.
inline ContingencyTable contingency(const Partition& u, const Partition& v) {
    if (u.size() != v.size()) {
        throw DataError("partition lengths differ: " + std::to_string(u.size()) + " vs " +
                        std::to_string(v.size()));
    }
    const Partition uu = u.noise_as_cluster();
    const Partition vv = v.noise_as_cluster();
    const std::size_t rows = std::max<std::size_t>(uu.num_clusters(), 1);
    const std::size_t cols = std::max<std::size_t>(vv.num_clusters(), 1);
    std::vector<std::int64_t> counts(rows * cols, 0);
    for (std::size_t i = 0; i < uu.size(); ++i) {
        ++counts[static_cast<std::size_t>(uu[i]) * cols + static_cast<std::size_t>(vv[i])];
    }
    return ContingencyTable(rows, cols, std::move(counts));
}

/// True when u and v induce the same grouping (noise treated as one group).
inline bool same_partition(const Partition& u, const Partition& v) {
    if (u.size() != v.size()) return false;
    return contingency(u, v).is_matching();
}

/// Partition induced by the dataset's class labels.
inline Partition label_partition(const Dataset& ds) {
    if (!ds.has_labels()) throw DataError("dataset has no class labels");
    return Partition::from_ids(*ds.labels());
}

/// Each feature mapped affinely onto [0,1]; constant features become 0.
inline Dataset normalize_minmax(const Dataset& ds) {
    const std::size_t n = ds.size();
    const std::size_t d = ds.dim();
    std::vector<double> lo(d, std::numeric_limits<double>::infinity());
    std::vector<double> hi(d, -std::numeric_limits<double>::infinity());
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < d; ++j) {
            lo[j] = std::min(lo[j], ds.at(i, j));
            hi[j] = std::max(hi[j], ds.at(i, j));
        }
    }
    std::vector<double> out(n * d);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < d; ++j) {
            const double range = hi[j] - lo[j];
            out[i * d + j] = range > 0.0 ? (ds.at(i, j) - lo[j]) / range : 0.0;
        }
    }
    return Dataset(n, d, std::move(out), ds.feature_names(), ds.labels());
}

}  // namespace labelaudit
