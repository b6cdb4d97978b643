#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <random>

#include "labelaudit/clusterers.hpp"
#include "labelaudit/generators.hpp"
#include "labelaudit/metrics.hpp"
#include "oracles.hpp"

using namespace labelaudit;

namespace {

Dataset two_blobs(std::uint64_t seed, std::size_t per, double sd) {
    return gen_blobs({{{0.0, 0.0}, {sd, sd}, per, 0}, {{1.0, 1.0}, {sd, sd}, per, 1}}, seed);
}

KMeansConfig km(std::size_t k, std::uint64_t seed = 0) {
    KMeansConfig c;
    c.k = k;
    c.seed = seed;
    return c;
}

}  // namespace

TEST(KMeans, SingleClusterCentroidIsMean) {
    const auto ds = Dataset::from_points({{0, 0}, {2, 0}, {4, 6}});
    const auto r = kmeans_detailed(ds, km(1));
    EXPECT_EQ(r.partition.num_clusters(), 1u);
    EXPECT_NEAR(r.centroids[0], 2.0, 1e-12);
    EXPECT_NEAR(r.centroids[1], 2.0, 1e-12);
}

TEST(KMeans, KEqualsNGivesZeroInertia) {
    const auto ds = Dataset::from_points({{0, 0}, {2, 0}, {4, 6}, {1, 1}});
    const auto r = kmeans_detailed(ds, km(4));
    EXPECT_EQ(r.partition.num_clusters(), 4u);
    EXPECT_NEAR(r.inertia, 0.0, 1e-15);
}

TEST(KMeans, Errors) {
    const auto ds = Dataset::from_points({{0}, {1}});
    EXPECT_THROW(kmeans(ds, km(0)), std::invalid_argument);
    EXPECT_THROW(kmeans(ds, km(3)), std::invalid_argument);
}

TEST(KMeans, SeparatedBlobsRecovered) {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const auto ds = two_blobs(seed, 50, 0.01);
        const auto p = kmeans(ds, km(2, seed));
        EXPECT_TRUE(same_partition(p, label_partition(ds))) << "seed " << seed;
    }
}

TEST(KMeans, MatchesExhaustiveTwoPartitionSearch) {
    std::mt19937_64 rng(41);
    std::normal_distribution<double> g;
    for (int rep = 0; rep < 10; ++rep) {
        std::vector<std::vector<double>> pts;
        for (int i = 0; i < 12; ++i) {
            const double shift = i < 6 ? 0.0 : 3.0;
            pts.push_back({shift + g(rng), g(rng)});
        }
        const auto best = oracle::exhaustive_two_means(pts);
        const auto r = kmeans_detailed(Dataset::from_points(pts), km(2, static_cast<std::uint64_t>(rep)));
        EXPECT_NEAR(r.inertia, best.inertia, 1e-9);
        EXPECT_TRUE(same_partition(r.partition, Partition::from_ids(best.assignment)));
    }
}

TEST(KMeans, InertiaTraceNonIncreasingAndFixedPoint) {
    const auto ds = preset_clean_blobs(4);
    const auto r = kmeans_detailed(ds, km(3, 4));
    for (std::size_t i = 1; i < r.inertia_trace.size(); ++i) {
        EXPECT_LE(r.inertia_trace[i], r.inertia_trace[i - 1] + 1e-12);
    }
    // reassignment to the final centroids changes nothing
    std::vector<int> again(ds.size());
    for (std::size_t i = 0; i < ds.size(); ++i) {
        again[i] = static_cast<int>(detail::nearest_centroid(ds.point(i), r.centroids, 3));
    }
    EXPECT_TRUE(same_partition(Partition::from_ids(again), r.partition));
}

TEST(KMeans, InvariantToRowOrder) {
    const auto ds = preset_clean_blobs(9);
    std::vector<std::size_t> perm(ds.size());
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), std::mt19937_64(1));
    const auto shuffled = ds.subset(perm);
    const auto a = kmeans(ds, km(4, 3));
    const auto b = kmeans(shuffled, km(4, 3));
    std::vector<int> back(ds.size());
    for (std::size_t i = 0; i < perm.size(); ++i) back[perm[i]] = b[i];
    EXPECT_TRUE(same_partition(a, Partition::from_ids(back)));
}

TEST(KMeans, WorkerCountDoesNotMatter) {
    const auto ds = preset_sd2(2);
    const auto a = kmeans_detailed(ds, km(3, 5), 1);
    const auto b = kmeans_detailed(ds, km(3, 5), 4);
    EXPECT_EQ(a.partition, b.partition);
    EXPECT_EQ(a.inertia, b.inertia);
}

TEST(Dbscan, TightPairs) {
    const auto ds = Dataset::from_points({{0, 0}, {0, 0.01}, {1, 1}, {1, 1.01}});
    const auto p = dbscan(ds, {0.05, 2});
    EXPECT_EQ(p.num_clusters(), 2u);
    EXPECT_EQ(p.noise_count(), 0u);
}

TEST(Dbscan, AllNoiseAndOneCluster) {
    const auto ds = Dataset::from_points({{0, 0}, {0, 1}, {1, 0}, {5, 5}});
    const auto none = dbscan(ds, {0.5, 2});
    EXPECT_EQ(none.num_clusters(), 0u);
    EXPECT_EQ(none.noise_count(), 4u);
    const auto all = dbscan(ds, {100.0, 2});
    EXPECT_EQ(all.num_clusters(), 1u);
    EXPECT_EQ(all.noise_count(), 0u);
}

TEST(Dbscan, MinPtsCountsThePointItself) {
    // two points 0.5 apart: with min_pts = 2 each has itself + 1 neighbour
    const auto ds = Dataset::from_points({{0}, {0.5}});
    EXPECT_EQ(dbscan(ds, {0.6, 2}).num_clusters(), 1u);
    EXPECT_EQ(dbscan(ds, {0.6, 3}).num_clusters(), 0u);
}

TEST(Dbscan, BorderPointGoesToFirstCluster) {
    // cores near 0 and 2 (min_pts 4), border point at 1 reachable from both
    const auto ds = Dataset::from_points({{-0.1}, {0}, {0.1}, {1.0}, {1.9}, {2.0}, {2.1}});
    const auto p = dbscan(ds, {0.95, 4});
    EXPECT_EQ(p.num_clusters(), 2u);
    EXPECT_EQ(p[3], p[0]);
}

TEST(Dbscan, NoiseMonotoneInEps) {
    const auto ds = preset_overlap_pair(3);
    std::size_t prev = ds.size() + 1;
    for (double eps = 0.005; eps < 0.2; eps += 0.005) {
        const auto p = dbscan(ds, {eps, 4});
        EXPECT_LE(p.noise_count(), prev);
        prev = p.noise_count();
    }
}

TEST(Dbscan, ClusterCountAndNoiseIndependentOfOrder) {
    const auto ds = preset_split_class(6);
    std::vector<std::size_t> perm(ds.size());
    std::iota(perm.begin(), perm.end(), 0);
    std::reverse(perm.begin(), perm.end());
    const auto a = dbscan(ds, {0.03, 4});
    const auto b = dbscan(ds.subset(perm), {0.03, 4});
    EXPECT_EQ(a.num_clusters(), b.num_clusters());
    EXPECT_EQ(a.noise_count(), b.noise_count());
    for (std::size_t i = 0; i < perm.size(); ++i) {
        EXPECT_EQ(a[perm[i]] == Partition::kNoise, b[i] == Partition::kNoise);
    }
}

TEST(KDist, CollinearExample) {
    const auto ds = Dataset::from_points({{0}, {1}, {3}});
    EXPECT_EQ(k_dist_curve(ds, 1), (std::vector<double>{2, 1, 1}));
    EXPECT_THROW(k_dist_curve(ds, 3), std::invalid_argument);
    EXPECT_THROW(k_dist_curve(ds, 0), std::invalid_argument);
}

TEST(KDist, GridIsNearlyFlat) {
    std::vector<std::vector<double>> pts;
    for (int i = 0; i < 20; ++i) {
        for (int j = 0; j < 20; ++j) pts.push_back({i * 0.1, j * 0.1});
    }
    const auto c = k_dist_curve(Dataset::from_points(pts), 4);
    // interior points only: drop the edge-affected head of the curve
    const double hi = c[100];
    const double lo = c.back();
    EXPECT_LT(hi / lo, 1.5);
}

TEST(KDist, DuplicatesGiveZeroTail) {
    const auto c = k_dist_curve(Dataset::from_points({{0}, {0}, {5}}), 1);
    EXPECT_DOUBLE_EQ(c.back(), 0.0);
    EXPECT_DOUBLE_EQ(c.front(), 5.0);
}

TEST(SuggestEps, SharpKneeOnRankAxis) {
    // steep drop over the first 10 values, then flat
    std::vector<double> curve;
    for (int i = 0; i <= 10; ++i) curve.push_back(1.0 - 0.09 * i);
    for (int i = 11; i < 100; ++i) curve.push_back(0.1 - 0.0001 * (i - 10));
    const auto s = suggest_eps(curve, ElbowAxis::rank);
    EXPECT_EQ(s.index, 10u);
    EXPECT_DOUBLE_EQ(s.eps, curve[10]);
    EXPECT_EQ(s.curve, curve);
}

TEST(SuggestEps, LinearCurveGivesMidpoint) {
    std::vector<double> curve;
    for (int i = 0; i < 11; ++i) curve.push_back(10.0 - i);
    EXPECT_EQ(suggest_eps(curve, ElbowAxis::rank).index, 5u);
    EXPECT_DOUBLE_EQ(suggest_eps(curve, ElbowAxis::rank).eps, 5.0);
}

TEST(SuggestEps, TooShort) {
    const std::vector<double> c{1.0, 0.5};
    EXPECT_THROW(suggest_eps(c), std::invalid_argument);
}

TEST(SuggestEps, SyntheticSetRecoversBlobs) {
    // the log-rank elbow on the three-blob set stays below the inter-blob gap
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const auto ds = preset_sd2(seed);
        const auto s = suggest_eps(k_dist_curve(ds, 4));
        EXPECT_GT(s.eps, 0.0);
        EXPECT_LT(s.eps, 0.04);
        const auto p = dbscan(ds, {s.eps, 4});
        EXPECT_LE(p.noise_count(), ds.size() / 50) << "seed " << seed;
        EXPECT_GE(p.num_clusters(), 3u);
    }
}
