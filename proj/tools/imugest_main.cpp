// imugest command-line front end.
//
// Subcommands cover the full pipeline: synth (generate sessions), extract
// (windows -> feature matrix), train (feature matrix -> serialized model),
// eval (model + feature matrix -> accuracy report), sweep (learning curves)
// and reproduce (the whole experiment in one shot).
//
// Conventions: all log text goes to stderr, machine-readable results go to
// stdout or into files; every run is deterministic given --seed; exit code 0
// on success, 1 on usage errors, 2 on data/model errors.

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "imugest/imugest.hpp"

namespace {

using namespace imugest;

Modality parse_modality(const std::string& name) {
    if (name == "accel") return Modality::accelerometer;
    if (name == "gyro") return Modality::gyroscope;
    if (name == "both") return Modality::both;
    throw std::runtime_error("unknown modality '" + name + "' (accel, gyro or both)");
}

KnnWeighting parse_weighting(const std::string& name) {
    if (name == "uniform") return KnnWeighting::uniform;
    if (name == "inverse") return KnnWeighting::inverse_distance;
    throw std::runtime_error("unknown weighting '" + name + "' (uniform or inverse)");
}

std::vector<long long> parse_grid(const std::string& csv_list) {
    std::vector<long long> out;
    for (const std::string_view tok : split(csv_list, ','))
        out.push_back(parse_ll(trim(tok), "grid value"));
    if (out.empty()) throw std::runtime_error("empty sweep grid");
    return out;
}

// Applies a flat key=value config file to a subcommand by expanding it into
// ordinary command-line tokens, so the parser's validators and required-option
// checks see config values exactly like real flags.  Keys name long options
// without the leading dashes; values passed as real flags win over file
// values.  Returns argv (minus the program name) with the expansion appended;
// throws on unreadable files, malformed lines and unknown keys.
std::vector<std::string> expand_config_tokens(const std::vector<CLI::App*>& commands,
                                              int argc, char** argv) {
    std::vector<std::string> tokens(argv + 1, argv + argc);
    if (tokens.empty()) return tokens;

    CLI::App* command = nullptr;
    for (CLI::App* candidate : commands)
        if (candidate->get_name() == tokens.front()) { command = candidate; break; }
    if (command == nullptr) return tokens;  // no subcommand given: nothing to expand

    std::string config_path;
    std::set<std::string> given_flags;
    for (std::size_t i = 1; i < tokens.size(); ++i) {
        const std::string& tok = tokens[i];
        if (tok.rfind("--", 0) != 0) continue;
        const std::string flag = tok.substr(0, tok.find('='));
        given_flags.insert(flag);
        if (flag != "--config") continue;
        if (tok.size() > flag.size()) config_path = tok.substr(flag.size() + 1);
        else if (i + 1 < tokens.size()) config_path = tokens[i + 1];
    }
    if (config_path.empty()) return tokens;

    std::ifstream in(config_path);
    if (!in) throw std::runtime_error("cannot open config file '" + config_path + "'");
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string_view entry = trim(line);
        if (entry.empty() || entry.front() == '#') continue;
        const std::string at = config_path + ":" + std::to_string(line_no) + ": ";
        const std::size_t eq = entry.find('=');
        if (eq == std::string_view::npos) throw std::runtime_error(at + "expected key=value");
        const std::string key(trim(entry.substr(0, eq)));
        const std::string value(trim(entry.substr(eq + 1)));
        if (key.empty()) throw std::runtime_error(at + "empty key");
        if (key == "config") throw std::runtime_error(at + "config files cannot nest");
        const std::string flag = "--" + key;
        if (command->get_option_no_throw(flag) == nullptr)
            throw std::runtime_error(at + "unknown key '" + key + "' for command '" +
                                     command->get_name() + "'");
        if (given_flags.count(flag) != 0) continue;  // real flags override file values
        tokens.push_back(flag + "=" + value);
    }
    return tokens;
}

std::string format_eval_report(const EvalReport& report) {
    std::string text;
    text += "accuracy " + format_double(report.accuracy) + "\n";
    text += "n_test " + std::to_string(report.n_test) + "\n";
    for (std::size_t c = 0; c < report.per_class_recall.size(); ++c)
        text += "recall_" + std::to_string(c) + " " + format_double(report.per_class_recall[c]) + "\n";
    for (std::size_t r = 0; r < report.confusion.size(); ++r) {
        text += "confusion_" + std::to_string(r);
        for (const std::size_t v : report.confusion[r]) text += " " + std::to_string(v);
        text += "\n";
    }
    return text;
}

// --- synth ---------------------------------------------------------------

struct SynthArgs {
    std::string out_dir;
    int subjects = 1;
    std::size_t classes = 6;
    double rate = 148.15;
    double noise = 0.3;  // relative to the motif bank's pooled RMS
    double jitter = 0.1;
    std::uint64_t seed = 42;
};

int run_synth(const SynthArgs& args) {
    SynthSpec spec;
    spec.n_classes = args.classes;
    spec.sample_rate = args.rate;
    spec.jitter = args.jitter;
    spec.seed = args.seed;
    const std::vector<Mat> motifs = build_motifs(spec);
    spec.noise_sigma = args.noise * motif_rms(motifs);

    std::filesystem::create_directories(args.out_dir);
    const auto out = [&](const std::string& name) {
        return (std::filesystem::path(args.out_dir) / name).string();
    };

    std::cout << "subjects " << args.subjects << "\n";
    std::cout << "noise_sigma " << format_double(spec.noise_sigma) << "\n";
    for (int s = 0; s < args.subjects; ++s) {
        std::string subject = "s" + std::string(s + 1 < 10 ? "0" : "") + std::to_string(s + 1);
        const SynthRecording session = generate_recording(spec, subject, motifs);
        const std::string rec_path = out("recording_" + subject + ".csv");
        const std::string lab_path = out("labels_" + subject + ".csv");
        save_recording(rec_path, session.recording);
        save_labels(lab_path, session.labels);
        std::cerr << "[synth] wrote " << rec_path << " and " << lab_path << "\n";
        std::cout << subject << ".samples " << session.recording.samples.rows() << "\n";
        std::cout << subject << ".channels " << session.recording.samples.cols() << "\n";
        std::cout << subject << ".windows " << session.labels.size() << "\n";
    }
    return 0;
}

// --- extract -------------------------------------------------------------

struct ExtractArgs {
    std::vector<std::string> recordings;
    std::vector<std::string> labels;
    std::string modality = "both";
    int ar_order = kDefaultArOrder;
    double rate = 148.15;
    std::string out_path = "features.csv";
};

int run_extract(const ExtractArgs& args) {
    if (args.recordings.size() != args.labels.size())
        throw std::runtime_error("need one label file per recording (" +
                                 std::to_string(args.recordings.size()) + " recordings, " +
                                 std::to_string(args.labels.size()) + " label files)");
    const Modality mod = parse_modality(args.modality);
    const Protocol protocol;

    FeatureMatrix all;
    for (std::size_t i = 0; i < args.recordings.size(); ++i) {
        Recording rec = load_recording(args.recordings[i], {}, args.rate);
        const std::vector<int> labels = load_labels(args.labels[i]);
        rec = select_modality(rec, mod);
        const std::vector<Segment> segments = segment_recording(rec, protocol, labels);
        FeatureMatrix fm = extract_features(segments, rec.channels, args.ar_order);
        fm.labels = labels;
        std::cerr << "[extract] " << args.recordings[i] << ": " << segments.size()
                  << " windows, " << fm.values.cols() << " features\n";
        if (all.values.rows() == 0) {
            all = std::move(fm);
        } else {
            if (fm.column_names != all.column_names)
                throw std::runtime_error("feature columns differ between recordings");
            Mat merged(all.values.rows() + fm.values.rows(), all.values.cols());
            for (std::size_t r = 0; r < all.values.rows(); ++r)
                for (std::size_t c = 0; c < all.values.cols(); ++c)
                    merged(r, c) = all.values(r, c);
            for (std::size_t r = 0; r < fm.values.rows(); ++r)
                for (std::size_t c = 0; c < fm.values.cols(); ++c)
                    merged(all.values.rows() + r, c) = fm.values(r, c);
            all.values = std::move(merged);
            all.labels.insert(all.labels.end(), fm.labels.begin(), fm.labels.end());
        }
    }
    save_feature_matrix(args.out_path, all);
    std::cerr << "[extract] wrote " << args.out_path << "\n";
    std::cout << "rows " << all.values.rows() << "\n";
    std::cout << "columns " << all.values.cols() << "\n";
    return 0;
}

// --- train ---------------------------------------------------------------

struct TrainArgs {
    std::string features_path;
    std::string model = "dnn";
    std::size_t pca = 10;
    int iterations = 150;
    double alpha = 0.3;
    double lambda = 0.0;
    int k = 5;
    std::string weighting = "uniform";
    double svm_lambda = 0.01;
    int epochs = 200;
    std::uint64_t seed = 42;
    std::string out_path = "model.txt";
};

int run_train(const TrainArgs& args) {
    const FeatureMatrix fm = load_feature_matrix(args.features_path);

    TrainOptions opt;
    opt.classifier = parse_classifier_kind(args.model);
    opt.n_components = args.pca;
    opt.dnn.iterations = args.iterations;
    opt.dnn.learning_rate = args.alpha;
    opt.dnn.l2 = args.lambda;
    opt.knn_k = args.k;
    opt.knn_weighting = parse_weighting(args.weighting);
    opt.svm.lambda = args.svm_lambda;
    opt.svm.epochs = args.epochs;
    opt.svm.seed = args.seed;
    opt.seed = args.seed;

    const auto [model, trace] = train_pipeline(fm, opt);
    save_pipeline_file(args.out_path, model);
    std::cerr << "[train] wrote " << args.out_path << "\n";

    if (opt.classifier == ClassifierKind::dnn) {
        std::filesystem::path trace_path(args.out_path);
        trace_path.replace_extension();
        trace_path += "_trace.csv";
        Mat m(trace.cost_per_iteration.size(), 2);
        for (std::size_t i = 0; i < trace.cost_per_iteration.size(); ++i) {
            m(i, 0) = static_cast<double>(i + 1);
            m(i, 1) = trace.cost_per_iteration[i];
        }
        write_numeric_csv(trace_path.string(), {"iteration", "cost"}, m);
        std::cerr << "[train] wrote " << trace_path.string() << "\n";
        if (!trace.cost_per_iteration.empty())
            std::cout << "final_cost " << format_double(trace.cost_per_iteration.back()) << "\n";
    }
    std::cout << "model " << args.out_path << "\n";
    return 0;
}

// --- eval ----------------------------------------------------------------

struct EvalArgs {
    std::string model_path;
    std::string features_path;
    std::string out_path;  // optional
};

int run_eval(const EvalArgs& args) {
    const PipelineModel model = load_pipeline_file(args.model_path);
    const FeatureMatrix fm = load_feature_matrix(args.features_path);
    const EvalReport report = evaluate_pipeline(model, fm);
    const std::string text = format_eval_report(report);
    std::cout << text;
    if (!args.out_path.empty()) {
        std::ofstream os(args.out_path);
        if (!os) throw std::runtime_error("cannot write '" + args.out_path + "'");
        os << text;
        os.flush();
        if (!os) throw std::runtime_error("write failed for '" + args.out_path + "'");
        std::cerr << "[eval] wrote " << args.out_path << "\n";
    }
    return 0;
}

// --- sweep ---------------------------------------------------------------

struct SweepArgs {
    std::string features_path;
    std::string grid = "iterations";
    std::string values;  // comma-separated; empty selects the stock grid
    std::size_t pca = 10;
    int iterations = 150;
    double alpha = 0.3;
    double lambda = 0.0;
    double test_fraction = 0.2;
    std::uint64_t seed = 42;
    std::string out_path = "curve.csv";
};

int run_sweep(const SweepArgs& args) {
    const FeatureMatrix fm = load_feature_matrix(args.features_path);
    const SplitDataset split = split_stratified(fm, args.test_fraction, args.seed);

    DnnHyper hyper;
    hyper.learning_rate = args.alpha;
    hyper.l2 = args.lambda;
    hyper.iterations = args.iterations;

    std::vector<std::pair<double, double>> points;
    std::string x_name;
    if (args.grid == "iterations") {
        std::vector<int> grid = {10, 25, 50, 75, 100, 150, 200, 300};
        if (!args.values.empty()) {
            grid.clear();
            for (const long long v : parse_grid(args.values)) grid.push_back(static_cast<int>(v));
        }
        for (const auto& [t, acc] : sweep_iterations(split, grid, args.pca, hyper, args.seed))
            points.emplace_back(static_cast<double>(t), acc);
        x_name = "iterations";
    } else if (args.grid == "features") {
        std::vector<std::size_t> grid = {1, 2, 4, 6, 8, 10};
        if (!args.values.empty()) {
            grid.clear();
            for (const long long v : parse_grid(args.values)) {
                if (v < 1) throw std::runtime_error("component counts must be >= 1");
                grid.push_back(static_cast<std::size_t>(v));
            }
        }
        for (const auto& [l, acc] : sweep_features(split, grid, args.iterations, hyper, args.seed))
            points.emplace_back(static_cast<double>(l), acc);
        x_name = "components";
    } else {
        throw std::runtime_error("unknown grid '" + args.grid + "' (iterations or features)");
    }

    Mat m(points.size(), 2);
    for (std::size_t i = 0; i < points.size(); ++i) {
        m(i, 0) = points[i].first;
        m(i, 1) = points[i].second;
    }
    write_numeric_csv(args.out_path, {x_name, "accuracy"}, m);
    std::cerr << "[sweep] wrote " << args.out_path << "\n";
    for (const auto& [x, acc] : points)
        std::cout << x_name << "_" << x << " " << format_double(acc) << "\n";
    return 0;
}

// --- reproduce -----------------------------------------------------------

struct ReproduceArgs {
    std::string out_dir;
    std::uint64_t seed = 42;
    int subjects = 4;
    std::size_t classes = 6;
    double noise = 0.3;
    double jitter = 0.1;
    std::size_t pca = 10;
    int iterations = 150;
    double alpha = 0.3;
    double lambda = 0.0;
    int k = 5;
    std::string weighting = "uniform";
    double test_fraction = 0.2;
};

int run_reproduce_cmd(const ReproduceArgs& args) {
    ReproduceConfig cfg;
    cfg.out_dir = args.out_dir;
    cfg.seed = args.seed;
    cfg.n_subjects = args.subjects;
    cfg.n_classes = args.classes;
    cfg.noise_rel = args.noise;
    cfg.jitter = args.jitter;
    cfg.n_components = args.pca;
    cfg.dnn.iterations = args.iterations;
    cfg.dnn.learning_rate = args.alpha;
    cfg.dnn.l2 = args.lambda;
    cfg.knn_k = args.k;
    cfg.knn_weighting = parse_weighting(args.weighting);
    cfg.test_fraction = args.test_fraction;

    const ReproduceResult result = run_reproduce(cfg, &std::cerr);

    std::cout << "noise_sigma " << format_double(result.noise_sigma) << "\n";
    for (const ModalityResult& m : result.modalities) {
        std::cout << m.name << ".dnn.test_accuracy " << format_double(m.dnn_accuracy) << "\n";
        std::cout << m.name << ".knn.test_accuracy " << format_double(m.knn_accuracy) << "\n";
        std::cout << m.name << ".svm.test_accuracy " << format_double(m.svm_accuracy) << "\n";
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"wearable-IMU gesture pipeline: synthesize, extract, train, evaluate"};
    app.require_subcommand(1);
    std::string config_file;  // consumed here; expand_config_tokens does the real work

    SynthArgs synth_args;
    CLI::App* synth = app.add_subcommand("synth", "generate synthetic gesture sessions");
    synth->add_option("--config", config_file, "flat key=value config file; flags override");
    synth->add_option("--out", synth_args.out_dir, "output directory")->required();
    synth->add_option("--subjects", synth_args.subjects, "number of subjects")
        ->check(CLI::PositiveNumber);
    synth->add_option("--classes", synth_args.classes, "number of gesture classes")
        ->check(CLI::Range(static_cast<std::size_t>(2), static_cast<std::size_t>(64)));
    synth->add_option("--rate", synth_args.rate, "sample rate in Hz")->check(CLI::PositiveNumber);
    synth->add_option("--noise", synth_args.noise, "white-noise level relative to motif RMS")
        ->check(CLI::NonNegativeNumber);
    synth->add_option("--jitter", synth_args.jitter, "per-window amplitude jitter")
        ->check(CLI::Range(0.0, 0.999));
    synth->add_option("--seed", synth_args.seed, "random seed");

    ExtractArgs extract_args;
    CLI::App* extract = app.add_subcommand("extract", "compute the feature matrix from sessions");
    extract->add_option("--config", config_file, "flat key=value config file; flags override");
    extract->add_option("--recording", extract_args.recordings, "recording CSV (repeatable)")
        ->required();
    extract->add_option("--labels", extract_args.labels, "label CSV (repeatable, one per recording)")
        ->required();
    extract->add_option("--modality", extract_args.modality, "accel, gyro or both");
    extract->add_option("--ar-order", extract_args.ar_order, "autoregressive model order")
        ->check(CLI::PositiveNumber);
    extract->add_option("--rate", extract_args.rate, "sample rate in Hz")
        ->check(CLI::PositiveNumber);
    extract->add_option("--out", extract_args.out_path, "output feature CSV");

    TrainArgs train_args;
    CLI::App* train = app.add_subcommand("train", "fit a classifier on a feature matrix");
    train->add_option("--config", config_file, "flat key=value config file; flags override");
    train->add_option("--features", train_args.features_path, "feature matrix CSV")->required();
    train->add_option("--model", train_args.model, "dnn, knn or svm");
    train->add_option("--pca", train_args.pca, "retained principal components")
        ->check(CLI::PositiveNumber);
    train->add_option("--iterations", train_args.iterations, "gradient-descent steps")
        ->check(CLI::NonNegativeNumber);
    train->add_option("--alpha", train_args.alpha, "learning rate")->check(CLI::PositiveNumber);
    train->add_option("--lambda", train_args.lambda, "L2 penalty")->check(CLI::NonNegativeNumber);
    train->add_option("--k", train_args.k, "neighbor count")->check(CLI::PositiveNumber);
    train->add_option("--weighting", train_args.weighting, "uniform or inverse neighbor weighting");
    train->add_option("--svm-lambda", train_args.svm_lambda, "margin regularization")
        ->check(CLI::PositiveNumber);
    train->add_option("--epochs", train_args.epochs, "margin-classifier epochs")
        ->check(CLI::PositiveNumber);
    train->add_option("--seed", train_args.seed, "random seed");
    train->add_option("--out", train_args.out_path, "output model file");

    EvalArgs eval_args;
    CLI::App* eval = app.add_subcommand("eval", "evaluate a model on a feature matrix");
    eval->add_option("--config", config_file, "flat key=value config file; flags override");
    eval->add_option("--model", eval_args.model_path, "model file")->required();
    eval->add_option("--features", eval_args.features_path, "feature matrix CSV")->required();
    eval->add_option("--out", eval_args.out_path, "also write the report to this file");

    SweepArgs sweep_args;
    CLI::App* sweep = app.add_subcommand("sweep", "accuracy curves over iterations or components");
    sweep->add_option("--config", config_file, "flat key=value config file; flags override");
    sweep->add_option("--features", sweep_args.features_path, "feature matrix CSV")->required();
    sweep->add_option("--grid", sweep_args.grid, "iterations or features");
    sweep->add_option("--values", sweep_args.values, "comma-separated grid values");
    sweep->add_option("--pca", sweep_args.pca, "retained principal components")
        ->check(CLI::PositiveNumber);
    sweep->add_option("--iterations", sweep_args.iterations, "budget for the component sweep")
        ->check(CLI::NonNegativeNumber);
    sweep->add_option("--alpha", sweep_args.alpha, "learning rate")->check(CLI::PositiveNumber);
    sweep->add_option("--lambda", sweep_args.lambda, "L2 penalty")->check(CLI::NonNegativeNumber);
    sweep->add_option("--test-fraction", sweep_args.test_fraction, "held-out fraction")
        ->check(CLI::Range(0.001, 0.999));
    sweep->add_option("--seed", sweep_args.seed, "random seed");
    sweep->add_option("--out", sweep_args.out_path, "output curve CSV");

    ReproduceArgs repro_args;
    CLI::App* repro = app.add_subcommand("reproduce", "full synthetic experiment in one shot");
    repro->add_option("--config", config_file, "flat key=value config file; flags override");
    repro->add_option("--out", repro_args.out_dir, "output directory")->required();
    repro->add_option("--seed", repro_args.seed, "random seed");
    repro->add_option("--subjects", repro_args.subjects, "number of subjects")
        ->check(CLI::PositiveNumber);
    repro->add_option("--classes", repro_args.classes, "number of gesture classes")
        ->check(CLI::Range(static_cast<std::size_t>(2), static_cast<std::size_t>(64)));
    repro->add_option("--noise", repro_args.noise, "white-noise level relative to motif RMS")
        ->check(CLI::NonNegativeNumber);
    repro->add_option("--jitter", repro_args.jitter, "per-window amplitude jitter")
        ->check(CLI::Range(0.0, 0.999));
    repro->add_option("--pca", repro_args.pca, "retained principal components")
        ->check(CLI::PositiveNumber);
    repro->add_option("--iterations", repro_args.iterations, "gradient-descent steps")
        ->check(CLI::NonNegativeNumber);
    repro->add_option("--alpha", repro_args.alpha, "learning rate")->check(CLI::PositiveNumber);
    repro->add_option("--lambda", repro_args.lambda, "L2 penalty")->check(CLI::NonNegativeNumber);
    repro->add_option("--k", repro_args.k, "neighbor count")->check(CLI::PositiveNumber);
    repro->add_option("--weighting", repro_args.weighting, "uniform or inverse neighbor weighting");
    repro->add_option("--test-fraction", repro_args.test_fraction, "held-out fraction")
        ->check(CLI::Range(0.001, 0.999));

    std::vector<std::string> tokens;
    try {
        tokens = expand_config_tokens({synth, extract, train, eval, sweep, repro}, argc, argv);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    std::reverse(tokens.begin(), tokens.end());  // the vector overload parses back to front

    try {
        app.parse(tokens);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    try {
        if (synth->parsed()) return run_synth(synth_args);
        if (extract->parsed()) return run_extract(extract_args);
        if (train->parsed()) return run_train(train_args);
        if (eval->parsed()) return run_eval(eval_args);
        if (sweep->parsed()) return run_sweep(sweep_args);
        if (repro->parsed()) return run_reproduce_cmd(repro_args);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 1;
}
