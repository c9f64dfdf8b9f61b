#include <gtest/gtest.h>

#include <set>
#include <sstream>

#include "lus/dataset.hpp"
#include "lus/features.hpp"
#include "lus/image_io.hpp"
#include "test_util.hpp"

using namespace lus;
using lus::test::TempDir;

namespace {

std::size_t index_of(const std::vector<std::string>& names, const std::string& n) {
    const auto it = std::find(names.begin(), names.end(), n);
    return it == names.end() ? names.size() : static_cast<std::size_t>(it - names.begin());
}

// Manifest of `n` random PGM images in `dir`, two subjects per class.
std::filesystem::path make_manifest(const TempDir& dir, std::size_t n, std::size_t size = 40) {
    std::ostringstream m;
    m << "image_path,subject_id,video_id,label,ga_weeks,cgats_weeks,dol_days\n";
    for (std::size_t i = 0; i < n; ++i) {
        const std::string name = "img" + std::to_string(i) + ".pgm";
        write_pgm(dir / name, test::random_image(size, size + 8, i));
        const auto label = kLabelNames[i % kLabelCount];
        m << name << ",s" << (i % 12) << ",v" << i << ',' << label << ",30," << (30 + i % 5) << ',' << i << '\n';
    }
    const auto path = dir / "manifest.csv";
    test::write_file(path, m.str());
    return path;
}

} // namespace

// ---------------------------------------------------------------------------
// Feature vector layout

TEST(FeatureConfig, CountingRule) {
    FeatureConfig cfg;
    EXPECT_EQ(cfg.features_per_half(), 89u);
    EXPECT_EQ(cfg.feature_count(), 1246u);
    cfg.include_lowpass = false;
    EXPECT_EQ(cfg.feature_count(), 1068u);
    cfg.include_lowpass = true;
    cfg.levels = 2;
    EXPECT_EQ(cfg.feature_count(), 2492u);
}

TEST(FeatureConfig, LengthIsPureFunctionOfToggles) {
    for (int mask = 1; mask < 64; ++mask) {
        FeatureConfig cfg;
        cfg.stat = mask & 1;
        cfg.glcm = mask & 2;
        cfg.glrlm = mask & 4;
        cfg.lbp = mask & 8;
        cfg.include_lowpass = mask & 16;
        cfg.levels = mask & 32 ? 2 : 1;
        if (cfg.features_per_half() == 0) continue;
        const std::size_t per_half = (cfg.stat ? 5 : 0) + (cfg.glcm ? 30 : 0) + (cfg.glrlm ? 44 : 0) + (cfg.lbp ? 10 : 0);
        const std::size_t expect = per_half * 2 * (cfg.include_lowpass ? 7 : 6) * static_cast<std::size_t>(cfg.levels);
        EXPECT_EQ(cfg.feature_count(), expect);
        EXPECT_EQ(feature_names(cfg).size(), expect);
        EXPECT_EQ(extract_features(test::random_image(48, 40, 1), cfg).values.size(), expect);
    }
}

TEST(FeatureNames, UniqueAndPatterned) {
    FeatureConfig cfg;
    cfg.levels = 2;
    const auto names = feature_names(cfg);
    EXPECT_EQ(std::set<std::string>(names.begin(), names.end()).size(), names.size());
    EXPECT_EQ(names.front(), "L1_lp_top_stat_mean");
    EXPECT_EQ(names[89], "L1_lp_bot_stat_mean");
    EXPECT_EQ(names.back(), "L2_m15_bot_lbp_bin9");
    EXPECT_LT(index_of(names, "L1_p75_top_glcm_d22_entropy"), names.size());
    EXPECT_LT(index_of(names, "L2_m45_bot_glrlm_a135_lrhge"), names.size());
    EXPECT_EQ(names, feature_names(cfg));
}

TEST(ExtractFeatures, DefaultLengthAndDeterminism) {
    const auto img = test::random_image(500, 400, 4);
    const auto a = extract_features(img);
    const auto b = extract_features(img);
    EXPECT_EQ(a.values.size(), 1246u);
    EXPECT_EQ(a.names.size(), 1246u);
    EXPECT_EQ(a.values, b.values);
    for (double v : a.values) ASSERT_TRUE(std::isfinite(v));
}

TEST(ExtractFeatures, NoLowpassLength) {
    FeatureConfig cfg;
    cfg.include_lowpass = false;
    EXPECT_EQ(extract_features(test::random_image(64, 64, 4), cfg).values.size(), 1068u);
}

TEST(ExtractFeatures, ConstantImageZeroDispersionInDirectionalBands) {
    const auto fv = extract_features(GrayImage(64, 64, 0.37));
    for (std::size_t i = 0; i < fv.names.size(); ++i) {
        const auto& n = fv.names[i];
        if (n.find("_lp_") != std::string::npos) continue;
        const bool dispersion = n.ends_with("stat_sd") || n.ends_with("stat_skewness") || n.ends_with("stat_kurtosis") ||
                                n.ends_with("_contrast") || (n.find("glcm") != std::string::npos && n.ends_with("_entropy"));
        if (dispersion) {
            EXPECT_EQ(fv.values[i], 0.0) << n;
        }
    }
}

TEST(ExtractFeatures, RejectsImagesTooSmallForTexture) {
    EXPECT_THROW(extract_features(GrayImage(8, 8, 0.1)), InputError);
    FeatureConfig none;
    none.stat = none.glcm = none.glrlm = none.lbp = false;
    EXPECT_THROW(extract_features(GrayImage(64, 64, 0.1), none), InputError);
}

// ---------------------------------------------------------------------------
// Labels, clinical fields, CSV helpers

TEST(Labels, RoundTrip) {
    for (std::size_t i = 0; i < kLabelCount; ++i) EXPECT_EQ(parse_label(kLabelNames[i]), static_cast<Label>(i));
    EXPECT_FALSE(parse_label("ARDS").has_value());
}

TEST(Csv, SplitHonoursQuotes) {
    const auto f = csv::split("a,\"b,c\",\"d\"\"e\",");
    ASSERT_EQ(f.size(), 4u);
    EXPECT_EQ(f[1], "b,c");
    EXPECT_EQ(f[2], "d\"e");
    EXPECT_EQ(f[3], "");
}

TEST(Csv, DoubleRoundTripIsExact) {
    for (double v : {0.1, 1.0 / 3.0, 1e-300, 123456.789, 0.0})
        EXPECT_EQ(csv::parse_double(csv::format_double(v)), v);
    EXPECT_FALSE(csv::parse_double("1.5x").has_value());
    EXPECT_FALSE(csv::parse_double("").has_value());
}

// ---------------------------------------------------------------------------
// Manifest and dataset

TEST(Manifest, ParsesRowsAndResolvesPaths) {
    TempDir dir("man");
    test::write_file(dir / "m.csv",
                     "\xEF\xBB\xBFimage_path,subject_id,video_id,label,ga_weeks,cgats_weeks,dol_days,roi_top,roi_left,roi_bottom,roi_right\r\n"
                     "a.png,s1,v1,RDS,28.5,29,3,1,2,30,40\r\n"
                     "/abs/b.png,s2,v2,CLD,26,36,70,,,,\r\n");
    const auto rows = read_manifest(dir / "m.csv");
    ASSERT_EQ(rows.size(), 2u);
    EXPECT_EQ(rows[0].image_path, dir / "a.png");
    EXPECT_EQ(rows[0].label, Label::RDS);
    EXPECT_EQ(rows[0].clinical.ga, 28.5);
    ASSERT_TRUE(rows[0].roi.has_value());
    EXPECT_EQ(*rows[0].roi, (RoiRect{1, 2, 30, 40}));
    EXPECT_EQ(rows[1].image_path, std::filesystem::path("/abs/b.png"));
    EXPECT_FALSE(rows[1].roi.has_value());
    EXPECT_EQ(rows[1].clinical.dol, 70.0);
}

TEST(Manifest, EmptyManifestHasNoRecords) {
    TempDir dir("man");
    test::write_file(dir / "m.csv", "image_path,subject_id,video_id,label,ga_weeks,cgats_weeks,dol_days\n");
    try {
        read_manifest(dir / "m.csv");
        FAIL();
    } catch (const InputError& e) {
        EXPECT_NE(std::string(e.what()).find("no records"), std::string::npos);
    }
}

TEST(Manifest, MissingFileNamesPath) {
    try {
        read_manifest("/no/such/manifest.csv");
        FAIL();
    } catch (const InputError& e) {
        EXPECT_NE(std::string(e.what()).find("/no/such/manifest.csv"), std::string::npos);
    }
}

TEST(Manifest, AllMalformedRowsReported) {
    TempDir dir("man");
    test::write_file(dir / "m.csv",
                     "image_path,subject_id,video_id,label,ga_weeks,cgats_weeks,dol_days\n"
                     "a.png,s1,v1,Normal,30,31,2\n"
                     "b.png,s1,v1,Flu,30,31,2\n"
                     "c.png,s1,v1,CON,abc,31,2\n"
                     "d.png,,v1,CON,30,31,2\n");
    try {
        read_manifest(dir / "m.csv");
        FAIL();
    } catch (const InputError& e) {
        const std::string msg = e.what();
        EXPECT_NE(msg.find("3 malformed"), std::string::npos);
        EXPECT_NE(msg.find("row 2: unknown label 'Flu'"), std::string::npos);
        EXPECT_NE(msg.find("row 3: invalid ga_weeks"), std::string::npos);
        EXPECT_NE(msg.find("row 4: empty subject_id"), std::string::npos);
        EXPECT_EQ(msg.find("row 1:"), std::string::npos);
    }
}

TEST(Manifest, MissingColumnRejected) {
    TempDir dir("man");
    test::write_file(dir / "m.csv", "image_path,subject_id,label,ga_weeks,cgats_weeks,dol_days\nx,s,Normal,1,1,1\n");
    EXPECT_THROW(read_manifest(dir / "m.csv"), InputError);
}

TEST(BuildDataset, PreservesOrderAndParallelMatchesSequential) {
    TempDir dir("ds");
    const auto manifest = make_manifest(dir, 8);
    FeatureConfig cfg;
    const auto seq = build_dataset(manifest, cfg, 1);
    const auto par = build_dataset(manifest, cfg, 4);
    ASSERT_EQ(seq.size(), 8u);
    EXPECT_EQ(seq.feature_names.size(), 1246u);
    for (std::size_t i = 0; i < 8; ++i) {
        EXPECT_EQ(seq.records[i].features, par.records[i].features);
        EXPECT_EQ(seq.records[i].video_id, "v" + std::to_string(i));
        EXPECT_EQ(seq.records[i].label, static_cast<Label>(i % kLabelCount));
        EXPECT_EQ(seq.records[i].clinical.dol, static_cast<double>(i));
    }
    const auto direct = extract_features(normalize_size(load_image(dir / "img3.pgm")), cfg);
    EXPECT_EQ(seq.records[3].features, direct.values);
}

TEST(BuildDataset, OneBadPathAmongTenReportsThatRow) {
    TempDir dir("ds");
    const auto manifest = make_manifest(dir, 10, 24);
    std::filesystem::remove(dir / "img6.pgm");
    try {
        build_dataset(manifest, {}, 2);
        FAIL();
    } catch (const InputError& e) {
        const std::string msg = e.what();
        EXPECT_NE(msg.find("1 row(s) failed"), std::string::npos);
        EXPECT_NE(msg.find("row 7:"), std::string::npos);
        EXPECT_NE(msg.find("img6.pgm"), std::string::npos);
    }
}

TEST(BuildDataset, RoiAppliesArtifactRemoval) {
    TempDir dir("ds");
    GrayImage img(60, 50, 0.2);
    img(30, 25) = 1.0;
    write_pgm(dir / "a.pgm", img);
    test::write_file(dir / "m.csv",
                     "image_path,subject_id,video_id,label,ga_weeks,cgats_weeks,dol_days,roi_top,roi_left,roi_bottom,roi_right\n"
                     "a.pgm,s1,v1,Normal,30,31,2,20,20,40,40\n");
    const auto rows = read_manifest(dir / "m.csv");
    const auto cleaned = preprocess_row(rows[0]);
    for (double p : cleaned.pixels()) ASSERT_NEAR(p, 51.0 / 255.0, 1e-12);
}

TEST(FeatureCsv, RoundTrip) {
    TempDir dir("csv");
    FeatureTable t;
    t.feature_names = {"f_a", "f,b"};
    t.records.push_back({{0.1, 1.0 / 3.0}, {30, 31.5, 2}, Label::PTX, "subj \"one\"", "v"});
    t.records.push_back({{-2.5e-7, 4.0}, {25, 35, 70}, Label::CLD, "s2", "v"});
    write_feature_csv(dir / "f.csv", t);
    const auto back = read_feature_csv(dir / "f.csv");
    EXPECT_EQ(back.feature_names, t.feature_names);
    ASSERT_EQ(back.size(), 2u);
    for (std::size_t i = 0; i < 2; ++i) {
        EXPECT_EQ(back.records[i].features, t.records[i].features);
        EXPECT_EQ(back.records[i].clinical.values(), t.records[i].clinical.values());
        EXPECT_EQ(back.records[i].label, t.records[i].label);
        EXPECT_EQ(back.records[i].subject_id, t.records[i].subject_id);
    }
}

TEST(FeatureCsv, RejectsNonFeatureFile) {
    TempDir dir("csv");
    test::write_file(dir / "x.csv", "a,b,c\n1,2,3\n");
    EXPECT_THROW(read_feature_csv(dir / "x.csv"), InputError);
}

TEST(FeatureTable, ValidateCatchesRaggedRows) {
    FeatureTable t;
    t.feature_names = {"a", "b"};
    t.records.push_back({{1.0}, {1, 1, 1}, Label::Normal, "s", "v"});
    EXPECT_THROW(validate_table(t), InputError);
}
