#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "labelaudit/core.hpp"
#include "labelaudit/dataset_io.hpp"

using namespace labelaudit;

namespace {

std::string temp_file(const std::string& name, const std::string& contents) {
    const auto path = std::filesystem::temp_directory_path() / ("labelaudit_core_" + name);
    std::ofstream(path, std::ios::binary) << contents;
    return path.string();
}

}  // namespace

TEST(Dataset, RejectsNonFiniteAndBadShapes) {
    EXPECT_THROW(Dataset(0, 2, {}), DataError);
    EXPECT_THROW(Dataset(1, 2, {1.0}), DataError);
    EXPECT_THROW(Dataset(1, 1, {std::nan("")}), DataError);
    EXPECT_THROW(Dataset(2, 1, {1.0, 2.0}, {}, std::vector<int>{0}), DataError);
    const Dataset ds(2, 2, {1, 2, 3, 4});
    EXPECT_EQ(ds.feature_names(), (std::vector<std::string>{"x0", "x1"}));
    EXPECT_DOUBLE_EQ(ds.at(1, 0), 3.0);
}

TEST(Dataset, SubsetKeepsLabels) {
    const auto ds = Dataset::from_points({{0}, {1}, {2}}, std::vector<int>{5, 6, 7});
    const std::vector<std::size_t> rows{2, 0};
    const auto sub = ds.subset(rows);
    EXPECT_EQ(sub.size(), 2u);
    EXPECT_DOUBLE_EQ(sub.at(0, 0), 2.0);
    EXPECT_EQ(*sub.labels(), (std::vector<int>{7, 5}));
}

TEST(Partition, InvariantsAndNoise) {
    const Partition p({0, 1, Partition::kNoise, 1});
    EXPECT_EQ(p.num_clusters(), 2u);
    EXPECT_EQ(p.noise_count(), 1u);
    EXPECT_EQ(p.sizes(), (std::vector<std::size_t>{1, 2}));
    EXPECT_THROW(Partition({0, 2}), DataError);  // id 1 empty
    const auto q = Partition::from_ids(std::vector<int>{9, 4, 9, -3});
    EXPECT_EQ(q.assignment(), (std::vector<int>{0, 1, 0, Partition::kNoise}));
    const auto withn = p.noise_as_cluster();
    EXPECT_EQ(withn.num_clusters(), 3u);
    EXPECT_EQ(withn.noise_count(), 0u);
}

TEST(Contingency, IdentityIsDiagonal) {
    const Partition u({0, 0, 1, 1});
    const auto t = contingency(u, u);
    EXPECT_EQ(t, ContingencyTable({{2, 0}, {0, 2}}));
}

TEST(Contingency, CrossedPartitions) {
    const auto t = contingency(Partition({0, 0, 1, 1}), Partition({0, 1, 0, 1}));
    EXPECT_EQ(t, ContingencyTable({{1, 1}, {1, 1}}));
    EXPECT_EQ(t.total(), 4);
}

TEST(Contingency, IdealThreeBlobsVersusTwoClasses) {
    std::vector<int> blobs, classes;
    for (int i = 0; i < 800; ++i) blobs.push_back(0), classes.push_back(0);
    for (int i = 0; i < 1000; ++i) blobs.push_back(1), classes.push_back(1);
    for (int i = 0; i < 1200; ++i) blobs.push_back(2), classes.push_back(1);
    const auto t = contingency(Partition(blobs), Partition(classes));
    EXPECT_EQ(t, ContingencyTable({{800, 0}, {0, 1000}, {0, 1200}}));
    EXPECT_EQ(t.row_margins(), (std::vector<std::int64_t>{800, 1000, 1200}));
    EXPECT_EQ(t.col_margins(), (std::vector<std::int64_t>{800, 2200}));
}

TEST(Contingency, NoiseBecomesOneExtraCluster) {
    const Partition u({0, 0, Partition::kNoise, Partition::kNoise});
    const Partition v({0, 0, 0, 0});
    const auto t = contingency(u, v);
    EXPECT_EQ(t, ContingencyTable({{2}, {2}}));
}

TEST(Contingency, LengthMismatch) {
    EXPECT_THROW(contingency(Partition({0, 0}), Partition({0, 0, 0})), DataError);
}

TEST(Contingency, TransposeAndRelabel) {
    std::mt19937_64 rng(3);
    std::uniform_int_distribution<int> pick(0, 3);
    for (int rep = 0; rep < 50; ++rep) {
        std::vector<int> a(20), b(20);
        for (auto& x : a) x = pick(rng);
        for (auto& x : b) x = pick(rng);
        const auto u = Partition::from_ids(a), v = Partition::from_ids(b);
        EXPECT_EQ(contingency(u, v).transposed(), contingency(v, u));
        // relabel u by reversing first-appearance order: rows get permuted only
        std::vector<int> r(20);
        for (int i = 0; i < 20; ++i) r[i] = 100 - u[i];
        const auto t1 = contingency(u, v);
        const auto t2 = contingency(Partition::from_ids(r), v);
        auto rows = [](const ContingencyTable& t) {
            std::vector<std::vector<std::int64_t>> out;
            for (std::size_t i = 0; i < t.rows(); ++i) {
                std::vector<std::int64_t> row;
                for (std::size_t j = 0; j < t.cols(); ++j) row.push_back(t(i, j));
                out.push_back(row);
            }
            std::sort(out.begin(), out.end());
            return out;
        };
        EXPECT_EQ(rows(t1), rows(t2));
    }
}

TEST(Normalize, MinMaxRules) {
    const auto ds = Dataset::from_points({{0, 7, 0.0}, {5, 7, 0.5}, {10, 7, 1.0}});
    const auto nd = normalize_minmax(ds);
    EXPECT_DOUBLE_EQ(nd.at(1, 0), 0.5);
    EXPECT_DOUBLE_EQ(nd.at(2, 0), 1.0);
    for (std::size_t i = 0; i < 3; ++i) EXPECT_DOUBLE_EQ(nd.at(i, 1), 0.0);
    for (std::size_t i = 0; i < 3; ++i) EXPECT_DOUBLE_EQ(nd.at(i, 2), ds.at(i, 2));
    EXPECT_EQ(normalize_minmax(nd).values(), nd.values());
}

TEST(Csv, LoadsLabelsByFirstAppearance) {
    const auto path = temp_file("ok.csv", "x,y,cls\n1,2,a\n3,4,a\n5,6,b\n");
    const auto ds = load_dataset(path, "cls");
    EXPECT_EQ(ds.size(), 3u);
    EXPECT_EQ(ds.dim(), 2u);
    EXPECT_EQ(*ds.labels(), (std::vector<int>{0, 0, 1}));
    EXPECT_EQ(ds.feature_names(), (std::vector<std::string>{"x", "y"}));
}

TEST(Csv, MissingLabelColumnIsNamed) {
    const auto path = temp_file("nolabel.csv", "x,y\n1,2\n");
    try {
        load_dataset(path, "cls");
        FAIL() << "expected DataError";
    } catch (const DataError& e) {
        EXPECT_NE(std::string(e.what()).find("cls"), std::string::npos);
    }
}

TEST(Csv, NanCellReportsCoordinates) {
    const auto path = temp_file("nan.csv", "x,y\n1,2\n3,NaN\n");
    try {
        load_dataset(path);
        FAIL() << "expected DataError";
    } catch (const DataError& e) {
        const std::string msg = e.what();
        EXPECT_NE(msg.find("row 2"), std::string::npos) << msg;
        EXPECT_NE(msg.find("'y'"), std::string::npos) << msg;
    }
}

TEST(Csv, EmptyAndMissingFiles) {
    EXPECT_THROW(load_dataset(temp_file("empty.csv", "")), DataError);
    EXPECT_THROW(load_dataset(temp_file("header.csv", "x,y\n")), DataError);
    EXPECT_THROW(load_dataset("/nonexistent/labelaudit.csv"), DataError);
}

TEST(Csv, QuotedFieldsAndRoundTrip) {
    std::istringstream in("\"a,b\",y\n\"1\",2\r\n3,4\n");
    const auto t = read_csv(in);
    EXPECT_EQ(t.header[0], "a,b");
    EXPECT_EQ(t.rows.size(), 2u);

    const auto ds = Dataset::from_points({{0.1, 1.0 / 3.0}, {2.5, -1e-9}}, std::vector<int>{0, 1});
    std::stringstream buf;
    write_dataset_csv(buf, ds);
    const auto back = dataset_from_table(read_csv(buf), std::string("label"));
    EXPECT_EQ(back.values(), ds.values());
    EXPECT_EQ(*back.labels(), *ds.labels());
}
