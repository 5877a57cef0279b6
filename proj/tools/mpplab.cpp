#include <CLI11.hpp>
#include <json.hpp>
#include <mpplab/experiment.hpp>
#include <mpplab/merge.hpp>
#include <mpplab/serialization.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

namespace {

using mpplab::ExperimentConfig;
using mpplab::ExperimentKind;

enum ExitCode { kPass = 0, kFail = 1, kUsage = 2, kIo = 3 };

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string slurp(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read '" + path + "'");
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

// Flags shared by the experiment subcommands; copied into an ExperimentConfig after parsing.
struct Flags {
    std::string model_file;
    std::string config_file;
    std::size_t reps = 0;
    std::uint64_t seed = 0;
    double tol = 1e-6;
    double sigmas = 4.0;
    double horizon = 0.0;
    double t = -1.0;
    std::size_t checkpoints = 0;
    unsigned threads = 1;
    std::string marks;
    std::string payoff = "linear";
    std::size_t intervals = 1000;
    std::string solver = "uniformization";
    std::string out;
    std::string format = "json";
    bool quiet = false;
};

void add_output(CLI::App* sub, Flags& f)
{
    sub->add_option("--out,-o", f.out, "Write the report here; bare names go to $MPPLAB_OUTPUT_DIR");
    sub->add_option("--format", f.format, "Report file format")->check(CLI::IsMember({"json", "csv"}))->capture_default_str();
    sub->add_option("--threads", f.threads, "Worker threads (0 = all cores); never changes results")->capture_default_str();
    sub->add_flag("--quiet,-q", f.quiet, "Do not print the report on stdout");
}

void add_model(CLI::App* sub, Flags& f)
{
    sub->add_option("--model,-m", f.model_file, "Model file (JSON)")->required()->check(CLI::ExistingFile);
    sub->add_option("--seed", f.seed, "Master seed")->capture_default_str();
    sub->add_option("--horizon", f.horizon, "Override the model horizon");
}

ExperimentConfig config_from(ExperimentKind kind, const Flags& f)
{
    ExperimentConfig c;
    c.kind = kind;
    if (!f.model_file.empty()) c.models.push_back(mpplab::parse_model_spec(slurp(f.model_file)));
    if (f.horizon > 0.0) c.horizon = f.horizon;
    if (f.reps > 0) c.replications = f.reps;
    c.seed = f.seed;
    c.tolerance = f.tol;
    c.sigmas = f.sigmas;
    if (f.checkpoints > 0) c.checkpoints = f.checkpoints;
    c.threads = f.threads;
    c.payoff = f.payoff;
    c.grid_intervals = f.intervals;
    c.solver = f.solver;
    if (f.t >= 0.0) c.time = f.t;
    if (!f.marks.empty()) {
        const auto comma = f.marks.find(',');
        // tuple marks contain commas themselves: "(a,0),(0,b)"
        const auto split = f.marks.front() == '(' ? f.marks.find("),") + 1 : comma;
        if (split == std::string::npos || split == 0 || split + 1 >= f.marks.size()) {
            throw std::invalid_argument("--marks expects two marks separated by a comma");
        }
        c.marks = {f.marks.substr(0, split), f.marks.substr(split + 1)};
    }
    if (!f.out.empty()) {
        c.output_path = mpplab::resolve_output_path(f.out);
        c.output_format = mpplab::parse_report_format(f.format);
    }
    return c;
}

int emit(const mpplab::ExperimentReport& report, const Flags& f)
{
    if (!report.config.output_path.empty()) {
        mpplab::export_report(report, report.config.output_path, report.config.output_format);
    }
    if (!f.quiet) std::cout << mpplab::report_to_json(report);
    std::size_t failed = 0;
    for (const auto& c : report.checks) failed += !c.pass;
    std::cerr << (report.pass() ? "PASS" : "FAIL") << ' ' << mpplab::to_string(report.config.kind) << ": "
              << report.checks.size() - failed << '/' << report.checks.size() << " checks passed\n";
    return report.pass() ? kPass : kFail;
}

int run_merge(const std::vector<std::string>& inputs, const std::string& out)
{
    std::vector<mpplab::Trajectory> trajs;
    for (const auto& path : inputs) {
        std::istringstream in(slurp(path));
        auto file = mpplab::read_trajectory(in);
        if (file.merged) throw std::invalid_argument("'" + path + "' is already a merged trajectory");
        trajs.push_back(std::move(file.trajectory));
    }
    const auto merged = mpplab::merge(trajs);
    std::size_t simultaneous = 0;
    for (const auto& e : merged.trajectory.events()) {
        std::size_t nonzero = 0;
        for (const auto& c : merged.trajectory.mark_space().label(e.mark)) nonzero += c != mpplab::kZeroSymbol;
        simultaneous += nonzero > 1;
    }
    const auto target = mpplab::resolve_output_path(out);
    std::ofstream file(target, std::ios::binary);
    if (!file) throw IoError("cannot open '" + target + "' for writing");
    mpplab::write_trajectory(file, merged);
    file.flush();
    if (!file) throw IoError("failed writing '" + target + "'");
    nlohmann::json summary = {{"output", target},
                              {"components", trajs.size()},
                              {"events", merged.trajectory.events().size()},
                              {"simultaneous_events", simultaneous},
                              {"marks", merged.trajectory.mark_space().size()}};
    std::cout << summary.dump(2) << '\n';
    return kPass;
}

nlohmann::json describe(const CLI::App& app)
{
    nlohmann::json options = nlohmann::json::array();
    for (const auto* opt : app.get_options()) {
        if (opt->get_name() == "--help,-h" || opt->get_lnames() == std::vector<std::string>{"help"}) continue;
        nlohmann::json o;
        o["name"] = opt->get_positional() ? opt->get_name() : "--" + opt->get_lnames().front();
        o["description"] = opt->get_description();
        o["required"] = opt->get_required();
        o["positional"] = opt->get_positional();
        o["type"] = opt->get_items_expected_max() == 0 ? std::string("FLAG") : opt->get_type_name();
        o["multiple"] = opt->get_items_expected_max() > 1;
        if (!opt->get_default_str().empty()) o["default"] = opt->get_default_str();
        options.push_back(std::move(o));
    }
    return {{"command", app.get_parent() ? "mpplab " + app.get_name() : "mpplab"},
            {"description", app.get_description()},
            {"options", options},
            {"exit_codes", {{"0", "all checks passed"}, {"1", "a check failed"}, {"2", "usage or config error"},
                            {"3", "I/O error"}}},
            {"environment", {{"MPPLAB_OUTPUT_DIR", "directory for output files given without a directory"}}}};
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Marked point process toolkit: simulate, merge, and verify martingale representations"};
    app.set_version_flag("--version", std::string(mpplab::version()));
    app.require_subcommand(1);
    Flags f;

    auto* simulate = app.add_subcommand("simulate", "Simulate a model; with --out also writes replication 0 as "
                                                    "<stem>.trajectory.jsonl and <stem>.compensator.json");
    add_model(simulate, f);
    simulate->add_option("--reps", f.reps, "Replications (default 1)");
    add_output(simulate, f);

    std::vector<std::string> merge_inputs;
    std::string merge_out;
    auto* merge = app.add_subcommand("merge", "Merge d trajectory files into one merged trajectory file");
    merge->add_option("inputs", merge_inputs, "Component trajectory files")->required()->check(CLI::ExistingFile);
    merge->add_option("--out,-o", merge_out, "Merged trajectory file")->required();

    auto* representation = app.add_subcommand("verify-representation",
                                              "Check the martingale representation residual on a CTMC model");
    add_model(representation, f);
    representation->add_option("--payoff", f.payoff, "const:<c> | indicator:<state> | linear | values:<v0>,...")
        ->capture_default_str();
    representation->add_option("--T", f.t, "Terminal time (default: horizon)");
    representation->add_option("--reps", f.reps, "Paths (default 1000)");
    representation->add_option("--tol", f.tol, "Residual tolerance")->capture_default_str();
    representation->add_option("--intervals", f.intervals, "Value-function grid intervals (>= 1000)")->capture_default_str();
    representation->add_option("--solver", f.solver, "Value-function solver")
        ->check(CLI::IsMember({"uniformization", "poisson-linear"}))
        ->capture_default_str();
    representation->add_option("--checkpoints", f.checkpoints, "Uniform checkpoints per path");
    add_output(representation, f);

    auto* orthogonality = app.add_subcommand("verify-orthogonality",
                                             "Check NOPJT, zero brackets and E[M^h M^k] = 0 for mark pairs");
    auto* counterexample = app.add_subcommand("counterexample",
                                              "Demonstrate a nonzero bracket at a shared predictable atom");
    for (auto* sub : {orthogonality, counterexample}) {
        add_model(sub, f);
        sub->add_option("--marks", f.marks, "Mark pair h,k (default: every pair)");
        sub->add_option("--t", f.t, "Evaluation time (default: horizon)");
        sub->add_option("--reps", f.reps, "Monte Carlo replications, at least 1000 (default 10000)");
        sub->add_option("--sigmas", f.sigmas, "Band width in standard errors")->capture_default_str();
        add_output(sub, f);
    }

    auto* martingale = app.add_subcommand("martingale-test", "Monte Carlo test that every M^h has mean zero");
    add_model(martingale, f);
    martingale->add_option("--reps", f.reps, "Replications (default 10000)");
    martingale->add_option("--checkpoints", f.checkpoints, "Number of checkpoints t_j = horizon * j / C (default 5)");
    martingale->add_option("--sigmas", f.sigmas, "Band width in standard errors")->capture_default_str();
    add_output(martingale, f);

    auto* run = app.add_subcommand("run", "Run an experiment described by a config file");
    run->add_option("config", f.config_file, "Config file (JSON, see `mpplab schema`)")->required()->check(CLI::ExistingFile);
    run->add_option("--threads", f.threads, "Override the config thread count");
    run->add_flag("--quiet,-q", f.quiet, "Do not print the report on stdout");

    app.add_subcommand("schema", "Print the JSON Schema of config files");

    app.add_flag("--help-json", "Print a machine-readable description of every command");
    for (auto* sub : app.get_subcommands({})) sub->add_flag("--help-json", "Print a machine-readable description of this command");

    // machine-readable help, handled before validation so required flags may be absent
    for (int i = 1; i < argc; ++i) {
        if (std::string(argv[i]) != "--help-json") continue;
        const CLI::App* target = &app;
        if (i > 1) {
            for (const auto* sub : app.get_subcommands({})) {
                if (sub->get_name() == argv[1]) target = sub;
            }
        }
        auto doc = describe(*target);
        if (target == &app) {
            doc["subcommands"] = nlohmann::json::array();
            for (const auto* sub : app.get_subcommands({})) doc["subcommands"].push_back(describe(*sub));
        }
        std::cout << doc.dump(2) << '\n';
        return kPass;
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kPass : kUsage;
    }

    try {
        if (app.got_subcommand("schema")) {
            std::cout << mpplab::experiment_config_schema();
            return kPass;
        }
        if (merge->parsed()) return run_merge(merge_inputs, merge_out);
        if (run->parsed()) {
            auto config = mpplab::parse_experiment_config(slurp(f.config_file));
            if (run->count("--threads") > 0) config.threads = f.threads;
            if (!config.output_path.empty()) config.output_path = mpplab::resolve_output_path(config.output_path);
            return emit(mpplab::run(config), f);
        }
        const std::pair<CLI::App*, ExperimentKind> kinds[] = {
            {simulate, ExperimentKind::simulate},
            {representation, ExperimentKind::verify_representation},
            {orthogonality, ExperimentKind::verify_orthogonality},
            {counterexample, ExperimentKind::counterexample},
            {martingale, ExperimentKind::martingale_test},
        };
        for (const auto& [sub, kind] : kinds) {
            if (!sub->parsed()) continue;
            Flags flags = f;
            // experiment defaults that differ from the single-path simulate default
            if (flags.reps == 0 && (kind == ExperimentKind::verify_orthogonality || kind == ExperimentKind::counterexample ||
                                    kind == ExperimentKind::martingale_test)) {
                flags.reps = 10000;
            }
            if (flags.reps == 0 && kind == ExperimentKind::verify_representation) flags.reps = 1000;
            return emit(mpplab::run(config_from(kind, flags)), flags);
        }
    } catch (const IoError& e) {
        std::cerr << "mpplab: " << e.what() << '\n';
        return kIo;
    } catch (const std::ios_base::failure& e) {
        std::cerr << "mpplab: " << e.what() << '\n';
        return kIo;
    } catch (const std::exception& e) {
        std::cerr << "mpplab: " << e.what() << '\n';
        return kUsage;
    }
    return kUsage;
}
