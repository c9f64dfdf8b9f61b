#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>

#include "lus/lus.hpp"
#include "test_util.hpp"

namespace fs = std::filesystem;
using lus::test::TempDir;
using lus::test::read_file;

namespace {

struct Outcome {
    int code = -1;
    std::string output;
};

Outcome run_cli(const std::string& args, const TempDir& scratch) {
    const auto log = scratch / "cli.log";
    const std::string cmd = std::string("\"") + LUS_CLI_PATH + "\" " + args + " > \"" + log.string() + "\" 2>&1";
    const int status = std::system(cmd.c_str());
    Outcome o;
    o.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    o.output = read_file(log);
    return o;
}

std::size_t count_lines(const std::string& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

// One tiny synthetic dataset shared by the tests in this file.
class CliData : public ::testing::Test {
protected:
    static void SetUpTestSuite() {
        dir_ = new TempDir("cli_data");
        const auto o = run_cli("synth --out-dir \"" + (*dir_ / "data").string() +
                                   "\" --subjects-per-class 2 --images-per-subject 2 --seed 7",
                               *dir_);
        ASSERT_EQ(o.code, 0) << o.output;
        const auto e = run_cli("extract --manifest \"" + (*dir_ / "data" / "manifest.csv").string() + "\" --out \"" +
                                   (*dir_ / "features.csv").string() + "\"",
                               *dir_);
        ASSERT_EQ(e.code, 0) << e.output;
    }
    static void TearDownTestSuite() {
        delete dir_;
        dir_ = nullptr;
    }
    static fs::path features() { return *dir_ / "features.csv"; }
    static fs::path manifest() { return *dir_ / "data" / "manifest.csv"; }

    static TempDir* dir_;
};

TempDir* CliData::dir_ = nullptr;

} // namespace

TEST(Cli, MissingManifestExitsTwoAndNamesPath) {
    TempDir t("cli_missing");
    const auto o = run_cli("extract --manifest /nonexistent/m.csv --out \"" + (t / "f.csv").string() + "\"", t);
    EXPECT_EQ(o.code, 2);
    EXPECT_NE(o.output.find("/nonexistent/m.csv"), std::string::npos) << o.output;
}

TEST(Cli, BadFlagsExitTwo) {
    TempDir t("cli_flags");
    EXPECT_EQ(run_cli("run --input x.csv --cv kfold", t).code, 2);
    EXPECT_EQ(run_cli("frobnicate", t).code, 2);
    EXPECT_EQ(run_cli("--help", t).code, 0);
}

TEST(Cli, SynthIsDeterministicPerSeed) {
    TempDir t("cli_synth");
    const std::string common = " --subjects-per-class 2 --images-per-subject 1";
    ASSERT_EQ(run_cli("synth --out-dir \"" + (t / "a").string() + "\" --seed 11" + common, t).code, 0);
    ASSERT_EQ(run_cli("synth --out-dir \"" + (t / "b").string() + "\" --seed 11" + common, t).code, 0);
    ASSERT_EQ(run_cli("synth --out-dir \"" + (t / "c").string() + "\" --seed 12" + common, t).code, 0);
    const auto rows = lus::read_manifest(t / "a" / "manifest.csv");
    ASSERT_EQ(rows.size(), 12u);
    std::size_t differing = 0;
    for (const auto& entry : fs::directory_iterator(t / "a" / "images")) {
        const auto name = entry.path().filename();
        EXPECT_EQ(read_file(entry.path()), read_file(t / "b" / "images" / name)) << name;
        differing += read_file(entry.path()) != read_file(t / "c" / "images" / name);
    }
    EXPECT_EQ(differing, 12u);
    const auto header = [](const fs::path& p) {
        const auto s = read_file(p);
        return s.substr(0, s.find('\n'));
    };
    EXPECT_EQ(header(t / "a" / "manifest.csv"), header(t / "c" / "manifest.csv"));
}

TEST(Cli, SynthBalancedShape) {
    lus::SynthSpec spec;
    EXPECT_EQ(spec.image_count(), 720u);
    EXPECT_EQ(spec.subjects_per_class * lus::kLabelCount, 24u);
}

TEST_F(CliData, ExtractWritesOneRowPerImage) {
    const auto table = lus::read_feature_csv(features());
    EXPECT_EQ(table.size(), 24u);
    EXPECT_EQ(table.feature_count(), lus::feature_names(lus::FeatureConfig{}).size());
}

TEST_F(CliData, ExtractTenRowsAndLevelsTwo) {
    TempDir t("cli_extract");
    const auto lines = lus::csv::read_lines(manifest());
    std::string ten;
    for (std::size_t i = 0; i <= 10; ++i) ten += lines[i] + "\n";
    // Image paths are relative to the manifest directory.
    lus::test::write_file(manifest().parent_path() / "ten.csv", ten);
    const auto m = (manifest().parent_path() / "ten.csv").string();
    auto o = run_cli("extract --manifest \"" + m + "\" --out \"" + (t / "l1.csv").string() + "\"", t);
    ASSERT_EQ(o.code, 0) << o.output;
    o = run_cli("extract --levels 2 --manifest \"" + m + "\" --out \"" + (t / "l2.csv").string() + "\"", t);
    ASSERT_EQ(o.code, 0) << o.output;
    const auto one = lus::read_feature_csv(t / "l1.csv");
    const auto two = lus::read_feature_csv(t / "l2.csv");
    EXPECT_EQ(one.size(), 10u);
    EXPECT_EQ(two.size(), 10u);
    EXPECT_EQ(two.feature_count(), 2 * one.feature_count());
    for (std::size_t i = 0; i < one.feature_count(); ++i) EXPECT_EQ(one.feature_names[i], two.feature_names[i]);
    EXPECT_EQ(two.feature_names[one.feature_count()].substr(0, 3), "L2_");
}

TEST_F(CliData, RunWritesReportsAndIsDeterministic) {
    TempDir t("cli_run");
    const std::string args = "run --input \"" + features().string() + "\" --cv loo --k 5 --priors equal";
    auto a = run_cli(args + " --out-dir \"" + (t / "a").string() + "\"", t);
    ASSERT_EQ(a.code, 0) << a.output;
    EXPECT_NE(a.output.find("loo k=5 priors=equal folds=24 accuracy="), std::string::npos) << a.output;
    auto b = run_cli(args + " --threads 3 --out-dir \"" + (t / "b").string() + "\"", t);
    ASSERT_EQ(b.code, 0) << b.output;
    for (const char* f : {"confusion_loo.csv", "confusion_loo.txt"}) {
        ASSERT_TRUE(fs::exists(t / "a" / f));
        EXPECT_EQ(read_file(t / "a" / f), read_file(t / "b" / f)) << f;
    }
    EXPECT_EQ(count_lines(read_file(t / "a" / "confusion_loo.csv")), 7u);
}

TEST_F(CliData, RunFromManifestMatchesFeatureCsv) {
    TempDir t("cli_manifest");
    auto a = run_cli("run --input \"" + features().string() + "\" --cv loso --k 4 --out-dir \"" + (t / "a").string() + "\"", t);
    auto b = run_cli("run --input \"" + manifest().string() + "\" --cv loso --k 4 --out-dir \"" + (t / "b").string() + "\"", t);
    ASSERT_EQ(a.code, 0) << a.output;
    ASSERT_EQ(b.code, 0) << b.output;
    EXPECT_EQ(read_file(t / "a" / "confusion_loso.csv"), read_file(t / "b" / "confusion_loso.csv"));
}

TEST_F(CliData, ModelOutRoundTrips) {
    TempDir t("cli_model");
    auto o = run_cli("run --input \"" + features().string() + "\" --k 3 --out-dir \"" + t.path().string() +
                         "\" --model-out \"" + (t / "m.lda").string() + "\"",
                     t);
    ASSERT_EQ(o.code, 0) << o.output;
    EXPECT_EQ(lus::load_lda(t / "m.lda").dim(), 6u);
}

TEST_F(CliData, SweepWritesKMaxRows) {
    TempDir t("cli_sweep");
    auto o = run_cli("sweep --input \"" + features().string() + "\" --k-max 5 --cv loo --out-dir \"" +
                         t.path().string() + "\"",
                     t);
    ASSERT_EQ(o.code, 0) << o.output;
    const auto csv = read_file(t / "sweep_loo.csv");
    EXPECT_EQ(count_lines(csv), 6u);
    EXPECT_EQ(csv.substr(0, 11), "k,accuracy\n");
    EXPECT_NE(o.output.find("best k="), std::string::npos);
}

TEST_F(CliData, LosoWithSingleSubjectClassExitsOne) {
    TempDir t("cli_loso");
    auto table = lus::read_feature_csv(features());
    for (auto& r : table.records)
        if (r.label == lus::Label::TTN) r.subject_id = "TTN_only";
    lus::write_feature_csv(t / "f.csv", table);
    auto o = run_cli("run --input \"" + (t / "f.csv").string() + "\" --cv loso --k 3 --out-dir \"" +
                         t.path().string() + "\"",
                     t);
    EXPECT_EQ(o.code, 1);
    EXPECT_NE(o.output.find("class TTN"), std::string::npos) << o.output;
}

TEST_F(CliData, KTooLargeIsInputError) {
    TempDir t("cli_k");
    auto o = run_cli("run --input \"" + features().string() + "\" --k 100000 --out-dir \"" + t.path().string() + "\"", t);
    EXPECT_EQ(o.code, 2);
}

TEST_F(CliData, ConfigFileWithFlagOverride) {
    TempDir t("cli_config");
    lus::test::write_file(t / "run.cfg", "cv=loso\nk=4\npriors=proportional\nout-dir=" + (t / "from_cfg").string() + "\n");
    auto o = run_cli("run --config \"" + (t / "run.cfg").string() + "\" --input \"" + features().string() + "\"", t);
    ASSERT_EQ(o.code, 0) << o.output;
    EXPECT_NE(o.output.find("loso k=4 priors=proportional"), std::string::npos) << o.output;
    EXPECT_TRUE(fs::exists(t / "from_cfg" / "confusion_loso.csv"));
    o = run_cli("run --config \"" + (t / "run.cfg").string() + "\" --k 2 --input \"" + features().string() + "\"", t);
    ASSERT_EQ(o.code, 0) << o.output;
    EXPECT_NE(o.output.find("loso k=2 priors=proportional"), std::string::npos) << o.output;
}

TEST(Cli, ConfigErrorsAndSynthConfig) {
    TempDir t("cli_config_errors");
    lus::test::write_file(t / "bad.cfg", "colour=blue\n");
    auto o = run_cli("synth --config \"" + (t / "bad.cfg").string() + "\" --out-dir \"" + (t / "x").string() + "\"", t);
    EXPECT_EQ(o.code, 2);
    EXPECT_NE(o.output.find("unknown key 'colour'"), std::string::npos) << o.output;
    EXPECT_EQ(run_cli("synth --config \"" + (t / "none.cfg").string() + "\" --out-dir x", t).code, 2);
    EXPECT_EQ(run_cli("run --k 3", t).code, 2);

    lus::test::write_file(t / "synth.cfg", "# tiny dataset\nsubjects-per-class = 2\nimages-per-subject=1\nseed=\"5\"\nout-dir=" +
                                               (t / "s").string() + "\n");
    o = run_cli("synth --config \"" + (t / "synth.cfg").string() + "\"", t);
    ASSERT_EQ(o.code, 0) << o.output;
    EXPECT_EQ(lus::read_manifest(t / "s" / "manifest.csv").size(), 12u);
}
