// snmf: command-line front end for Skellam-SNMF.
//
// Exit status: 0 when every fit converged, 2 when a fit stopped at its
// iteration cap, 1 on any error.

#include "snmf/data.hpp"
#include "snmf/divergence.hpp"
#include "snmf/em.hpp"
#include "snmf/eval.hpp"
#include "snmf/hyperlearn.hpp"
#include "snmf/serialize.hpp"
#include "snmf/vbem.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace snmf;

namespace {

constexpr int kExitConverged = 0;
constexpr int kExitError = 1;
constexpr int kExitMaxIters = 2;

std::string default_output_dir() {
    const char* env = std::getenv("SNMF_OUTPUT_DIR");
    return env && *env ? env : "snmf-output";
}

fs::path prepare_output(std::string dir) {
    if (dir.empty()) {
        dir = default_output_dir();
    }
    fs::create_directories(dir);
    return fs::path(dir);
}

struct InputOptions {
    std::string path;
    bool header = false;
    std::optional<int> label_column;
    std::string orientation = "rows";
    std::string mode;
    bool zscore = false;

    void add_to(CLI::App* cmd, bool labels_default) {
        cmd->add_option("input", path, "CSV file")->required()->check(CLI::ExistingFile);
        cmd->add_flag("--header", header, "First line is a header");
        auto* opt = cmd->add_option("--label-column", label_column,
                                    "Column with class labels (-1 = last)");
        if (labels_default) {
            label_column = -1;
            opt->capture_default_str();
        }
        cmd->add_option("--orientation", orientation, "rows: one instance per line; cols: one per column")
            ->check(CLI::IsMember({"rows", "cols"}))
            ->capture_default_str();
        cmd->add_option("--mode", mode, "int or real (default: inferred from the data)")
            ->check(CLI::IsMember({"int", "real"}));
        cmd->add_flag("--zscore", zscore, "Standardize every attribute");
    }

    LabeledDataset load() const {
        CsvOptions o;
        o.has_header = header;
        o.label_column = label_column;
        o.orientation = orientation == "rows" ? Orientation::InstancesAsRows : Orientation::InstancesAsColumns;
        if (!mode.empty()) {
            o.mode = mode_from_string(mode);
        }
        o.zscore = zscore;
        return load_csv(path, o);
    }

    Json describe() const {
        return Json{{"path", path},
                    {"header", header},
                    {"label_column", label_column ? Json(*label_column) : Json()},
                    {"orientation", orientation},
                    {"mode", mode.empty() ? Json() : Json(mode)},
                    {"zscore", zscore}};
    }
};

struct FitOptions {
    std::string algo = "em";
    int k = 0;
    double alpha_act = 1.0;
    double beta_act = 0.001;
    double alpha_atoms = 1.0;
    int max_iters = 10000;
    double tol = 1e-8;
    std::uint64_t seed = 0;
    int restarts = 1;
    double mask_fraction = 0.0;
    std::string fixed_atoms;
    std::string hyper_config;
    std::string init;

    void add_to(CLI::App* cmd, const std::vector<std::string>& algos) {
        cmd->add_option("--algo", algo, "Inference algorithm")->check(CLI::IsMember(algos))->capture_default_str();
        cmd->add_option("--k", k, "Number of components")->check(CLI::PositiveNumber);
        cmd->add_option("--alpha-act", alpha_act, "Shared activation shape")->capture_default_str();
        cmd->add_option("--beta-act", beta_act, "Shared activation rate")->capture_default_str();
        cmd->add_option("--alpha-atoms", alpha_atoms, "Shared atom shape")->capture_default_str();
        cmd->add_option("--max-iters", max_iters, "Iteration cap per fit")->capture_default_str();
        cmd->add_option("--tol", tol, "Relative objective change that stops a fit")->capture_default_str();
        cmd->add_option("--seed", seed, "Base seed; run r uses seed + r")->capture_default_str();
        cmd->add_option("--mask-fraction", mask_fraction, "Fraction of cells hidden from the fit")
            ->check(CLI::Range(0.0, 1.0))
            ->capture_default_str();
        cmd->add_option("--hyper-config", hyper_config, "HyperParams JSON (overrides the shared shortcuts)")
            ->check(CLI::ExistingFile);
        cmd->add_option("--init", init, "random | prior (em); prior | jitter (vbem)")
            ->check(CLI::IsMember({"random", "prior", "jitter"}));
    }

    Json describe() const {
        return Json{{"algo", algo},
                    {"k", k},
                    {"alpha_act", alpha_act},
                    {"beta_act", beta_act},
                    {"alpha_atoms", alpha_atoms},
                    {"max_iters", max_iters},
                    {"tol", tol},
                    {"seed", seed},
                    {"restarts", restarts},
                    {"mask_fraction", mask_fraction},
                    {"fixed_atoms", fixed_atoms.empty() ? Json() : Json(fixed_atoms)},
                    {"hyper_config", hyper_config.empty() ? Json() : Json(hyper_config)},
                    {"init", init.empty() ? Json() : Json(init)}};
    }

    HyperParams hyper_for(const Dataset& data, Index components) const {
        if (!hyper_config.empty()) {
            return hyper_from_json(load_json(hyper_config));
        }
        return HyperParams::shared(data.attributes(), components, data.instances(), alpha_atoms,
                                   alpha_act, beta_act);
    }
};

/// Result of one seeded fit, whatever the algorithm.
struct RunOutcome {
    std::uint64_t seed = 0;
    FactorModel model;
    std::optional<PosteriorApprox> posterior;
    FitTrace trace;
    int iterations = 0;
    bool converged = false;
    double seconds = 0.0;

    double final_objective() const { return trace.objective.back(); }
};

RunOutcome run_fit(const FitOptions& opt, const Dataset& data, const HyperParams& hyper,
                   const std::optional<Atoms>& fixed_atoms, std::uint64_t seed,
                   const std::string& default_vb_init) {
    const auto start = std::chrono::steady_clock::now();
    RunOutcome out;
    out.seed = seed;
    if (opt.algo == "em") {
        EmConfig cfg;
        cfg.max_iters = opt.max_iters;
        cfg.rel_tol = opt.tol;
        cfg.seed = seed;
        cfg.init = opt.init == "prior" ? InitStrategy::Prior : InitStrategy::Random;
        std::optional<FactorModel> init;
        if (fixed_atoms) {
            cfg.update_atoms = false;
            FactorModel m = initial_model(data, hyper, hyper.components(), cfg.init, seed);
            m.atoms = *fixed_atoms;
            init = std::move(m);
        }
        auto fit = em_fit(data, hyper, cfg, init);
        out.model = std::move(fit.model);
        out.trace = std::move(fit.trace);
        out.iterations = fit.iterations;
        out.converged = fit.converged;
    } else {
        if (fixed_atoms) {
            throw std::invalid_argument("--fixed-atoms is only supported with --algo em");
        }
        VbemConfig cfg;
        cfg.max_iters = opt.max_iters;
        cfg.rel_tol = opt.tol;
        cfg.seed = seed;
        const std::string init = opt.init.empty() ? default_vb_init : opt.init;
        cfg.init = init == "jitter" ? PosteriorInit::Jitter : PosteriorInit::Prior;
        auto fit = vbem_fit(data, hyper, cfg);
        out.model = posterior_mean(fit.posterior);
        out.posterior = std::move(fit.posterior);
        out.trace = std::move(fit.trace);
        out.iterations = fit.iterations;
        out.converged = fit.converged;
    }
    out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return out;
}

Json run_summary(const RunOutcome& r) {
    return Json{{"seed", r.seed},
                {"final_objective", r.final_objective()},
                {"iterations", r.iterations},
                {"converged", r.converged}};
}

int cmd_factorize(const InputOptions& in, FitOptions opt, const std::string& out_dir) {
    auto labeled = in.load();
    Dataset data = labeled.dataset;
    if (opt.mask_fraction > 0.0) {
        data = mask_random(data, opt.mask_fraction, opt.seed);
    }
    std::optional<Atoms> fixed;
    if (!opt.fixed_atoms.empty()) {
        fixed = atoms_from_json(load_json(opt.fixed_atoms));
    }
    if (opt.k <= 0) {
        if (!fixed) {
            throw std::invalid_argument("--k is required");
        }
        opt.k = static_cast<int>(fixed->components());
    }
    const HyperParams hyper = opt.hyper_for(data, opt.k);

    std::vector<RunOutcome> runs;
    for (int r = 0; r < opt.restarts; ++r) {
        runs.push_back(run_fit(opt, data, hyper, fixed, opt.seed + static_cast<std::uint64_t>(r), "prior"));
    }
    std::size_t best = 0;
    for (std::size_t r = 1; r < runs.size(); ++r) {
        if (runs[r].final_objective() > runs[best].final_objective()) {
            best = r;
        }
    }
    const RunOutcome& winner = runs[best];

    const fs::path dir = prepare_output(out_dir);
    save_json((dir / "model.json").string(), to_json(winner.model));
    if (winner.posterior) {
        save_json((dir / "posterior.json").string(), to_json(*winner.posterior));
    }
    write_trace_csv((dir / "trace.csv").string(), winner.trace);

    Json record{{"schema_version", kSchemaVersion},
                {"kind", "run"},
                {"command", "factorize"},
                {"input", in.describe()},
                {"config", opt.describe()},
                {"mode", to_string(data.mode)},
                {"observed_cells", data.mask.count()},
                {"best_restart", best},
                {"restarts", Json::array()}};
    Json timing{{"schema_version", kSchemaVersion}, {"kind", "timing"}, {"seconds", Json::array()}};
    for (const auto& r : runs) {
        record["restarts"].push_back(run_summary(r));
        timing["seconds"].push_back(r.seconds);
    }
    save_json((dir / "run.json").string(), record);
    save_json((dir / "timing.json").string(), timing);

    std::cout << opt.algo << " on " << labeled.name << " (" << data.attributes() << " x "
              << data.instances() << ", K=" << opt.k << ", mode " << to_string(data.mode) << ")\n"
              << "best restart " << best << " of " << runs.size() << ": objective "
              << winner.final_objective() << " after " << winner.iterations << " iterations"
              << (winner.converged ? "" : " (iteration cap reached)") << "\n"
              << "artifacts in " << dir.string() << "\n";
    return winner.converged ? kExitConverged : kExitMaxIters;
}

int cmd_cluster(const InputOptions& in, FitOptions opt, int runs, const std::string& out_dir) {
    const auto labeled = in.load();
    if (!labeled.labels) {
        throw std::invalid_argument("clustering needs a label column");
    }
    const Dataset& data = labeled.dataset;
    const int classes = labeled.classes();
    if (opt.k <= 0) {
        opt.k = classes;
    }
    opt.restarts = 1;
    std::vector<double> accuracies;
    Json per_run = Json::array();
    Json timing{{"schema_version", kSchemaVersion}, {"kind", "timing"}, {"seconds", Json::array()}};
    bool all_converged = true;

    if (opt.algo == "dummy") {
        const std::vector<int> pred(labeled.labels->size(), 0);
        const double acc = clustering_accuracy(pred, *labeled.labels, std::max(classes, opt.k));
        accuracies.assign(static_cast<std::size_t>(std::max(runs, 1)), acc);
        for (int r = 0; r < std::max(runs, 1); ++r) {
            per_run.push_back(Json{{"seed", opt.seed + static_cast<std::uint64_t>(r)}, {"accuracy", acc}});
        }
    } else {
        const HyperParams hyper = opt.hyper_for(data, opt.k);
        for (int r = 0; r < runs; ++r) {
            const auto seed = opt.seed + static_cast<std::uint64_t>(r);
            const auto outcome = run_fit(opt, data, hyper, std::nullopt, seed, "jitter");
            const auto pred = assign_clusters(outcome.model.activations);
            const double acc = clustering_accuracy(pred, *labeled.labels, std::max(classes, opt.k));
            accuracies.push_back(acc);
            all_converged = all_converged && outcome.converged;
            Json summary = run_summary(outcome);
            summary["accuracy"] = acc;
            per_run.push_back(std::move(summary));
            timing["seconds"].push_back(outcome.seconds);
        }
    }

    const Summary s = summarize(accuracies);
    MetricRecord rec{"clustering_accuracy", s.mean, s.std, s.runs, labeled.name, opt.algo};
    const fs::path dir = prepare_output(out_dir);
    save_json((dir / "metrics.json").string(), metrics_document({rec}));
    save_json((dir / "run.json").string(), Json{{"schema_version", kSchemaVersion},
                                               {"kind", "run"},
                                               {"command", "cluster"},
                                               {"input", in.describe()},
                                               {"config", opt.describe()},
                                               {"runs", per_run}});
    save_json((dir / "timing.json").string(), timing);

    char line[128];
    std::snprintf(line, sizeof line, "%.1f | %.1f", s.mean, s.std);
    std::cout << labeled.name << " " << opt.algo << " accuracy over " << s.runs << " runs: " << line
              << "\n";
    return all_converged ? kExitConverged : kExitMaxIters;
}

int cmd_waveform(Index instances, std::uint64_t seed, const std::string& out_dir) {
    const auto wave = generate_waveform(instances, seed);
    const fs::path dir = prepare_output(out_dir);
    save_csv((dir / "data.csv").string(), wave);
    save_json((dir / "run.json").string(), Json{{"schema_version", kSchemaVersion},
                                               {"kind", "run"},
                                               {"command", "synth"},
                                               {"config", {{"waveform", true}, {"j", instances}, {"seed", seed}}}});
    std::cout << "wrote waveform data (21 x " << instances << ") to " << dir.string() << "\n";
    return kExitConverged;
}

int cmd_synth(const Scenario& scenario, const std::string& out_dir) {
    const auto bundle = generate_synthetic(scenario);
    const fs::path dir = prepare_output(out_dir);
    save_csv((dir / "data.csv").string(), bundle.data);
    save_json((dir / "truth.json").string(), to_json(bundle.truth));
    save_json((dir / "hyper.json").string(), to_json(bundle.hyper));
    save_json((dir / "run.json").string(),
              Json{{"schema_version", kSchemaVersion},
                   {"kind", "run"},
                   {"command", "synth"},
                   {"config",
                    {{"uncertainty", scenario.uncertainty == Uncertainty::Low ? "low" : "high"},
                     {"low_variance", scenario.low_variance},
                     {"i", scenario.attributes},
                     {"k", scenario.components},
                     {"j", scenario.instances},
                     {"activation_mean", scenario.activation_mean},
                     {"seed", scenario.seed}}}});
    std::cout << "wrote " << bundle.data.name << " (" << scenario.attributes << " x "
              << scenario.instances << ") to " << dir.string() << "\n";
    return kExitConverged;
}

struct LearnOptions {
    std::vector<std::string> inputs;
    int k = 0;
    std::optional<double> learning_rate;
    bool decay = false;
    double alpha0 = 1.0;
    double beta0 = 0.001;
    std::string hyper_config;
    std::string mode = "int";
    int max_iters = 10000;
    double tol = 1e-8;
    std::uint64_t seed = 0;
};

int cmd_learn_hypers(const LearnOptions& opt, const std::string& out_dir) {
    std::vector<std::string> files;
    for (const auto& p : opt.inputs) {
        if (fs::is_directory(p)) {
            for (const auto& e : fs::directory_iterator(p)) {
                if (e.path().extension() == ".csv") {
                    files.push_back(e.path().string());
                }
            }
        } else {
            files.push_back(p);
        }
    }
    std::sort(files.begin(), files.end());
    if (files.empty()) {
        throw std::invalid_argument("no input datasets");
    }
    std::vector<Dataset> stream;
    for (const auto& f : files) {
        CsvOptions o;
        o.mode = mode_from_string(opt.mode);
        stream.push_back(load_csv(f, o).dataset);
    }
    const Dataset& first = stream.front();
    HyperParams hyper0;
    if (!opt.hyper_config.empty()) {
        hyper0 = hyper_from_json(load_json(opt.hyper_config));
    } else {
        if (opt.k <= 0) {
            throw std::invalid_argument("--k is required without --hyper-config");
        }
        const Index I = first.attributes();
        const Index K = opt.k;
        hyper0 = HyperParams::per_coordinate({Matrix::Constant(I, K, opt.alpha0), Matrix::Constant(I, K, opt.alpha0)},
                                             Vector::Constant(K, opt.alpha0), Vector::Constant(K, opt.beta0),
                                             first.instances());
    }
    VbemConfig cfg;
    cfg.max_iters = opt.max_iters;
    cfg.rel_tol = opt.tol;
    cfg.seed = opt.seed;
    const std::optional<double> c = opt.decay ? std::nullopt : opt.learning_rate;
    const auto result = online_learn(stream, hyper0, c, cfg);

    const fs::path dir = prepare_output(out_dir);
    std::ofstream log(dir / "hyper_trace.jsonl");
    for (const auto& snap : result.snapshots) {
        log << Json{{"T", snap.step},
                    {"alpha", std::vector<double>(snap.alpha.data(), snap.alpha.data() + snap.alpha.size())},
                    {"beta", std::vector<double>(snap.beta.data(), snap.beta.data() + snap.beta.size())},
                    {"elapsed", snap.elapsed}}
                   .dump()
            << '\n';
    }
    save_json((dir / "hyper.json").string(), to_json(result.hyper));
    save_json((dir / "run.json").string(),
              Json{{"schema_version", kSchemaVersion},
                   {"kind", "run"},
                   {"command", "learn-hypers"},
                   {"inputs", files},
                   {"config",
                    {{"k", opt.k},
                     {"learning_rate", c ? Json(*c) : Json()},
                     {"alpha0", opt.alpha0},
                     {"beta0", opt.beta0},
                     {"mode", opt.mode},
                     {"max_iters", opt.max_iters},
                     {"tol", opt.tol},
                     {"seed", opt.seed}}}});
    std::cout << "processed " << stream.size() << " datasets; trace in "
              << (dir / "hyper_trace.jsonl").string() << "\n";
    return kExitConverged;
}

std::vector<double> parse_range(const std::string& spec) {
    // lo:hi:n, or a single value
    const auto a = spec.find(':');
    if (a == std::string::npos) {
        return {std::stod(spec)};
    }
    const auto b = spec.find(':', a + 1);
    if (b == std::string::npos) {
        throw std::invalid_argument("range must be lo:hi:n, got " + spec);
    }
    const double lo = std::stod(spec.substr(0, a));
    const double hi = std::stod(spec.substr(a + 1, b - a - 1));
    const int n = std::stoi(spec.substr(b + 1));
    if (n < 1) {
        throw std::invalid_argument("range needs at least one point");
    }
    std::vector<double> out;
    for (int t = 0; t < n; ++t) {
        out.push_back(n == 1 ? lo : lo + (hi - lo) * t / (n - 1));
    }
    return out;
}

int cmd_divergence(const std::string& x, const std::string& l0, const std::string& l1, bool gradient) {
    const auto xs = parse_range(x);
    const auto l0s = parse_range(l0);
    const auto l1s = parse_range(l1);
    std::cout.precision(17);
    const bool table = xs.size() > 1 || l0s.size() > 1 || l1s.size() > 1;
    if (table) {
        std::cout << "x,lambda0,lambda1,D" << (gradient ? ",dD_dlambda0,dD_dlambda1" : "") << "\n";
    }
    for (double xv : xs) {
        for (double a : l0s) {
            for (double b : l1s) {
                const DivergenceInput in{xv, a, b};
                const double d = skellam_divergence(in);
                if (table) {
                    std::cout << xv << ',' << a << ',' << b << ',' << d;
                } else {
                    std::cout << d;
                }
                if (gradient) {
                    const auto g = divergence_gradient(in);
                    std::cout << (table ? "," : " ") << g.first << (table ? "," : " ") << g.second;
                }
                std::cout << "\n";
            }
        }
    }
    return kExitConverged;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Skellam semi-nonnegative matrix factorization"};
    app.require_subcommand(1);

    std::string out_dir;

    auto* factorize = app.add_subcommand("factorize", "Fit a factor model to a CSV dataset");
    InputOptions fact_in;
    FitOptions fact_opt;
    fact_in.add_to(factorize, false);
    factorize->add_option("output", out_dir, "Output directory (default: $SNMF_OUTPUT_DIR)");
    fact_opt.add_to(factorize, {"em", "vbem"});
    factorize->add_option("--restarts", fact_opt.restarts, "Independent restarts; the best objective is kept")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    factorize->add_option("--fixed-atoms", fact_opt.fixed_atoms, "JSON with fixed atoms ('theta' or 'w')")
        ->check(CLI::ExistingFile);

    auto* cluster = app.add_subcommand("cluster", "Cluster labeled data and report accuracy");
    InputOptions clus_in;
    FitOptions clus_opt;
    int clus_runs = 1;
    clus_in.add_to(cluster, true);
    cluster->add_option("output", out_dir, "Output directory (default: $SNMF_OUTPUT_DIR)");
    clus_opt.add_to(cluster, {"em", "vbem", "dummy"});
    clus_opt.mask_fraction = 0.0;
    cluster->add_option("--runs", clus_runs, "Seeded runs to average")->check(CLI::PositiveNumber)->capture_default_str();

    auto* synth = app.add_subcommand("synth", "Generate a synthetic dataset from the prior");
    Scenario scenario;
    std::string uncertainty = "low";
    synth->add_option("output", out_dir, "Output directory (default: $SNMF_OUTPUT_DIR)");
    synth->add_option("--uncertainty", uncertainty, "Prior uncertainty level")
        ->check(CLI::IsMember({"low", "high"}))
        ->capture_default_str();
    synth->add_flag("--low-variance", scenario.low_variance, "Push one sign of every atom coordinate to 0.02");
    synth->add_option("--i", scenario.attributes, "Attributes")->capture_default_str();
    synth->add_option("--k", scenario.components, "Components")->capture_default_str();
    synth->add_option("--j", scenario.instances, "Instances")->capture_default_str();
    synth->add_option("--activation-mean", scenario.activation_mean, "Prior mean of the activations")
        ->capture_default_str();
    synth->add_option("--seed", scenario.seed, "Seed")->capture_default_str();
    bool waveform = false;
    synth->add_flag("--waveform", waveform, "Emit labeled waveform data (uses --j and --seed) instead");

    auto* learn = app.add_subcommand("learn-hypers", "Online hyperparameter estimation over a dataset stream");
    LearnOptions learn_opt;
    learn->add_option("inputs", learn_opt.inputs, "CSV files or directories (read in sorted order)")->required();
    learn->add_option("--output", out_dir, "Output directory (default: $SNMF_OUTPUT_DIR)");
    learn->add_option("--k", learn_opt.k, "Number of components");
    auto* lr = learn->add_option("--learning-rate", learn_opt.learning_rate, "Fixed forgetting factor c");
    auto* decay = learn->add_flag("--decay", learn_opt.decay, "Use c = 1/(T+1)");
    lr->excludes(decay);
    learn->add_option("--alpha0", learn_opt.alpha0, "Initial shape of every slot")->capture_default_str();
    learn->add_option("--beta0", learn_opt.beta0, "Initial activation rate")->capture_default_str();
    learn->add_option("--hyper-config", learn_opt.hyper_config, "Initial HyperParams JSON")->check(CLI::ExistingFile);
    learn->add_option("--mode", learn_opt.mode, "int or real")->check(CLI::IsMember({"int", "real"}))->capture_default_str();
    learn->add_option("--max-iters", learn_opt.max_iters, "VBEM iteration cap")->capture_default_str();
    learn->add_option("--tol", learn_opt.tol, "VBEM relative tolerance")->capture_default_str();
    learn->add_option("--seed", learn_opt.seed, "Seed")->capture_default_str();

    auto* div = app.add_subcommand("divergence", "Evaluate D(x | lambda0, lambda1)");
    std::string dx = "0", dl0 = "1", dl1 = "1";
    bool dgrad = false;
    div->add_option("--x", dx, "Value or lo:hi:n grid")->capture_default_str();
    div->add_option("--l0", dl0, "Value or lo:hi:n grid")->capture_default_str();
    div->add_option("--l1", dl1, "Value or lo:hi:n grid")->capture_default_str();
    div->add_flag("--gradient", dgrad, "Also print the gradient in the rates");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitConverged : kExitError;
    }

    try {
        if (factorize->parsed()) {
            return cmd_factorize(fact_in, fact_opt, out_dir);
        }
        if (cluster->parsed()) {
            return cmd_cluster(clus_in, clus_opt, clus_runs, out_dir);
        }
        if (synth->parsed()) {
            if (waveform) {
                return cmd_waveform(scenario.instances, scenario.seed, out_dir);
            }
            scenario.uncertainty = uncertainty == "low" ? Uncertainty::Low : Uncertainty::High;
            return cmd_synth(scenario, out_dir);
        }
        if (learn->parsed()) {
            if (!learn_opt.decay && !learn_opt.learning_rate) {
                learn_opt.decay = true;
            }
            return cmd_learn_hypers(learn_opt, out_dir);
        }
        if (div->parsed()) {
            return cmd_divergence(dx, dl0, dl1, dgrad);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitError;
    }
    return kExitError;
}
