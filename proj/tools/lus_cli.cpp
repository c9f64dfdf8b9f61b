// lus: lung-ultrasound texture classification from the command line.
//
//   lus synth   --out-dir DIR [--seed N] [--subjects-per-class N] [--images-per-subject N] [--noise X]
//   lus extract --manifest FILE --out FILE [--levels N] [--dump-dir DIR]
//   lus run     --input FILE --cv loo|loso --k N --priors equal|proportional --out-dir DIR
//   lus sweep   --input FILE --k-max N --cv loo|loso --priors equal|proportional --out-dir DIR
//
// Every subcommand takes --config FILE with key=value lines; flags win.
// Exit codes: 0 success, 1 evaluation error, 2 input error.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <numeric>
#include <string>

#include <CLI11.hpp>

#include "lus/lus.hpp"

namespace fs = std::filesystem;

namespace {

struct ExtractArgs {
    std::string manifest, out, dump_dir;
};

struct EvalArgs {
    std::string input, out_dir = ".", cv = "loo", priors = "equal", model_out;
    std::size_t k = 15, k_max = 43;
};

struct CommonArgs {
    int levels = 1;
    bool no_lowpass = false;
    unsigned threads = 0;

    lus::FeatureConfig feature_config() const {
        if (levels < 1 || levels > 6) throw lus::InputError("--levels must be in 1..6");
        lus::FeatureConfig cfg;
        cfg.levels = levels;
        cfg.include_lowpass = !no_lowpass;
        return cfg;
    }
};

// CLI11 only reads config files for the top-level app, so each subcommand
// gets a plain --config option and the file is applied after parsing.
std::map<const CLI::App*, std::string> config_files;

void add_config(CLI::App* cmd) {
    cmd->add_option("--config", config_files[cmd], "key=value configuration file; flags win");
}

std::string unquote(std::string v) {
    if (v.size() >= 2 && (v.front() == '"' || v.front() == '\'') && v.back() == v.front()) v = v.substr(1, v.size() - 2);
    return v;
}

void apply_config(CLI::App* cmd, const fs::path& path) {
    if (!fs::is_regular_file(path)) throw lus::InputError("config file not found: " + path.string());
    std::size_t line_no = 0;
    for (const auto& raw : lus::csv::read_lines(path)) {
        ++line_no;
        const auto line = lus::csv::trim(raw);
        if (line.empty() || line.front() == '#' || line.front() == ';') continue;
        const auto eq = line.find('=');
        const auto where = path.string() + " line " + std::to_string(line_no);
        if (eq == std::string::npos) throw lus::InputError(where + ": expected key=value");
        const auto key = std::string(lus::csv::trim(line.substr(0, eq)));
        const auto value = unquote(std::string(lus::csv::trim(line.substr(eq + 1))));
        if (key == "config") throw lus::InputError(where + ": config files cannot nest");
        auto* opt = cmd->get_option_no_throw("--" + key);
        if (opt == nullptr) throw lus::InputError(where + ": unknown key '" + key + "'");
        if (opt->count() > 0) continue;
        try {
            opt->add_result(value);
            opt->run_callback();
        } catch (const CLI::Error& e) {
            throw lus::InputError(where + ": " + e.what());
        }
    }
}

void require(const std::string& value, const char* flag) {
    if (value.empty()) throw lus::InputError(std::string(flag) + " is required");
}

void add_common(CLI::App* cmd, CommonArgs& common) {
    add_config(cmd);
    cmd->add_option("--levels", common.levels, "DTCWT levels used for features")->capture_default_str();
    cmd->add_flag("--no-lowpass", common.no_lowpass, "drop the lowpass subimage from the feature vector");
    cmd->add_option("--threads", common.threads, "worker threads, 0 = all cores")->capture_default_str();
}

void add_eval(CLI::App* cmd, EvalArgs& a) {
    cmd->add_option("--input", a.input, "manifest CSV or feature CSV (required)");
    cmd->add_option("--cv", a.cv, "cross-validation scheme")
        ->check(CLI::IsMember({"loo", "loso"}))
        ->capture_default_str();
    cmd->add_option("--priors", a.priors, "LDA class priors")
        ->check(CLI::IsMember({"equal", "proportional"}))
        ->capture_default_str();
    cmd->add_option("--out-dir", a.out_dir, "directory for reports")->capture_default_str();
}

bool is_manifest(const fs::path& path) {
    const auto lines = lus::csv::read_lines(path);
    if (lines.empty()) throw lus::InputError(path.string() + ": empty file");
    const auto header = lus::csv::split(lines.front());
    for (const auto& h : header)
        if (lus::csv::trim(h) == "image_path") return true;
    return false;
}

lus::FeatureTable load_table(const std::string& input, const CommonArgs& common) {
    const fs::path path(input);
    if (!fs::is_regular_file(path)) throw lus::InputError("input not found: " + path.string());
    if (is_manifest(path)) return lus::build_dataset(path, common.feature_config(), common.threads);
    return lus::read_feature_csv(path);
}

lus::CvMode cv_mode(const std::string& s) {
    return s == "loso" ? lus::CvMode::LeaveOneSubjectOut : lus::CvMode::LeaveOneOut;
}

lus::Priors priors_mode(const std::string& s) { return s == "proportional" ? lus::Priors::Proportional : lus::Priors::Equal; }

void ensure_dir(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir)) throw lus::InputError("cannot create directory " + dir.string());
}

void dump_subimages(const fs::path& manifest, const fs::path& dir, const lus::FeatureConfig& cfg) {
    ensure_dir(dir);
    const auto rows = lus::read_manifest(manifest);
    for (const auto& row : rows) {
        const auto pyr = lus::dtcwt_forward(lus::preprocess_row(row), cfg.levels);
        for (int level = 1; level <= cfg.levels; ++level) {
            const auto subs = lus::magnitude_subimages(pyr, level);
            for (std::size_t b = 0; b < subs.size(); ++b)
                lus::write_pgm(dir / ("row" + std::to_string(row.row) + "_L" + std::to_string(level) + "_" +
                                      lus::detail::kBandTags[b] + ".pgm"),
                               subs[b]);
        }
    }
}

int cmd_extract(const ExtractArgs& a, const CommonArgs& common) {
    const auto cfg = common.feature_config();
    if (!fs::is_regular_file(a.manifest)) throw lus::InputError("manifest not found: " + a.manifest);
    const auto table = lus::build_dataset(a.manifest, cfg, common.threads);
    lus::write_feature_csv(a.out, table);
    if (!a.dump_dir.empty()) dump_subimages(a.manifest, a.dump_dir, cfg);
    std::cout << "extracted " << table.size() << " rows x " << table.feature_count() << " features -> " << a.out
              << '\n';
    return 0;
}

int cmd_run(const EvalArgs& a, const CommonArgs& common) {
    const auto table = load_table(a.input, common);
    lus::CvOptions opt;
    opt.k = a.k;
    opt.priors = priors_mode(a.priors);
    opt.threads = common.threads;
    const auto mode = cv_mode(a.cv);
    const auto res = lus::cross_validate(table, mode, opt);

    ensure_dir(a.out_dir);
    const std::string base = std::string("confusion_") + lus::cv_name(mode);
    const std::string title = std::string(mode == lus::CvMode::LeaveOneOut ? "Leave-one-out" : "Leave-one-subject-out") +
                              " cross-validation, top " + std::to_string(a.k) + " DTCWT features + 3 clinical, " +
                              a.priors + " priors";
    lus::report(res.matrix, fs::path(a.out_dir) / base, title);

    if (!a.model_out.empty()) {
        std::vector<std::size_t> all(table.size()), candidates(table.feature_count());
        std::iota(all.begin(), all.end(), 0);
        std::iota(candidates.begin(), candidates.end(), 0);
        const auto ranking = lus::chi2_rank(table, all, candidates);
        const std::span<const std::size_t> top(ranking.order.data(), a.k);
        lus::save_lda(fs::path(a.model_out), lus::lda_train(table, all, top, true, opt.priors));
    }
    std::cout << lus::cv_name(mode) << " k=" << a.k << " priors=" << a.priors << " folds=" << res.folds
              << " accuracy=" << lus::detail::fixed2(res.accuracy) << "% (" << res.matrix.correct() << '/'
              << res.matrix.total() << ")\n";
    return 0;
}

int cmd_sweep(const EvalArgs& a, const CommonArgs& common) {
    const auto table = load_table(a.input, common);
    lus::CvOptions opt;
    opt.priors = priors_mode(a.priors);
    opt.threads = common.threads;
    const auto mode = cv_mode(a.cv);
    const auto curve = lus::sweep_feature_count(table, a.k_max, mode, opt);
    ensure_dir(a.out_dir);
    const auto path = fs::path(a.out_dir) / (std::string("sweep_") + lus::cv_name(mode) + ".csv");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw lus::InputError("cannot write " + path.string());
    lus::write_sweep_csv(out, curve);
    std::cout << lus::cv_name(mode) << " sweep k=1.." << a.k_max << " best k=" << curve.best_k
              << " accuracy=" << lus::detail::fixed2(curve.best_accuracy) << "%\n";
    return 0;
}

int cmd_synth(const lus::SynthSpec& spec, const std::string& out_dir) {
    const auto out = lus::synthesize(spec, out_dir);
    std::cout << "wrote " << out.images << " images, manifest " << out.manifest.string() << '\n';
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Lung-ultrasound DTCWT texture classification"};
    app.require_subcommand(1);
    CommonArgs common;

    ExtractArgs ex;
    auto* extract = app.add_subcommand("extract", "manifest -> feature CSV");
    add_common(extract, common);
    extract->add_option("--manifest", ex.manifest, "dataset manifest CSV (required)");
    extract->add_option("--out", ex.out, "feature CSV to write (required)");
    extract->add_option("--dump-dir", ex.dump_dir, "also write every magnitude subimage as PGM");

    EvalArgs run_args;
    auto* run = app.add_subcommand("run", "cross-validated classification");
    add_common(run, common);
    add_eval(run, run_args);
    run->add_option("--k", run_args.k, "top-ranked DTCWT features")->capture_default_str();
    run->add_option("--model-out", run_args.model_out, "also fit on all rows and save the LDA model");

    EvalArgs sweep_args;
    auto* sweep = app.add_subcommand("sweep", "accuracy for k = 1..k-max");
    add_common(sweep, common);
    add_eval(sweep, sweep_args);
    sweep->add_option("--k-max", sweep_args.k_max, "largest feature count")->capture_default_str();

    lus::SynthSpec spec;
    std::string synth_dir;
    auto* synth = app.add_subcommand("synth", "write a synthetic dataset");
    add_config(synth);
    synth->add_option("--out-dir", synth_dir, "output directory (required)");
    synth->add_option("--seed", spec.seed, "generator seed")->capture_default_str();
    synth->add_option("--subjects-per-class", spec.subjects_per_class)->capture_default_str();
    synth->add_option("--images-per-subject", spec.images_per_subject)->capture_default_str();
    synth->add_option("--noise", spec.noise, "additive noise sigma")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        for (auto* cmd : {extract, run, sweep, synth})
            if (*cmd && !config_files[cmd].empty()) apply_config(cmd, config_files[cmd]);
        if (*extract) {
            require(ex.manifest, "--manifest");
            require(ex.out, "--out");
            return cmd_extract(ex, common);
        }
        if (*run) {
            require(run_args.input, "--input");
            return cmd_run(run_args, common);
        }
        if (*sweep) {
            require(sweep_args.input, "--input");
            return cmd_sweep(sweep_args, common);
        }
        require(synth_dir, "--out-dir");
        return cmd_synth(spec, synth_dir);
    } catch (const lus::EvaluationError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const lus::InputError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
}
