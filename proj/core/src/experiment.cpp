#include "mpplab/experiment.hpp"

#include "json_util.hpp"
#include "model_json.hpp"
#include "mpplab/calculus.hpp"
#include "mpplab/errors.hpp"
#include "mpplab/merge.hpp"
#include "mpplab/orthogonality.hpp"
#include "mpplab/representation.hpp"
#include "mpplab/serialization.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <stdexcept>

namespace mpplab {

using detail::FieldError;
using detail::json;

namespace {

constexpr std::pair<ExperimentKind, const char*> kKindNames[] = {
    {ExperimentKind::simulate, "simulate"},
    {ExperimentKind::merge, "merge"},
    {ExperimentKind::verify_representation, "verify-representation"},
    {ExperimentKind::verify_orthogonality, "verify-orthogonality"},
    {ExperimentKind::counterexample, "counterexample"},
    {ExperimentKind::martingale_test, "martingale-test"},
};

} // namespace

std::string to_string(ExperimentKind kind)
{
    for (const auto& [k, name] : kKindNames) {
        if (k == kind) return name;
    }
    throw std::invalid_argument("unknown experiment kind");
}

ExperimentKind parse_experiment_kind(const std::string& name)
{
    for (const auto& [k, n] : kKindNames) {
        if (name == n) return k;
    }
    throw std::invalid_argument("unknown experiment kind '" + name + "'");
}

std::string to_string(ReportFormat format)
{
    return format == ReportFormat::json ? "json" : "csv";
}

ReportFormat parse_report_format(const std::string& name)
{
    if (name == "json") return ReportFormat::json;
    if (name == "csv") return ReportFormat::csv;
    throw std::invalid_argument("unknown report format '" + name + "' (json or csv)");
}

// ---------------------------------------------------------------- config

void ExperimentConfig::validate() const
{
    if (models.empty()) throw std::invalid_argument("config needs at least one model");
    if (kind != ExperimentKind::merge && models.size() != 1) {
        throw std::invalid_argument(to_string(kind) + " takes exactly one model");
    }
    if (kind == ExperimentKind::merge && models.size() > 1) {
        for (const auto& m : models) {
            if (std::holds_alternative<CommonShockSpec>(m) || std::holds_alternative<ProductSpec>(m)) {
                throw std::invalid_argument("merge components must be poisson, ctmc or grid_bernoulli models");
            }
        }
    }
    if (horizon && !(*horizon > 0.0 && std::isfinite(*horizon))) {
        throw std::invalid_argument("horizon must be positive and finite");
    }
    if (replications < 1) throw std::invalid_argument("replications must be at least 1");
    if (!(tolerance > 0.0)) throw std::invalid_argument("tolerance must be positive");
    if (!(sigmas > 0.0)) throw std::invalid_argument("sigmas must be positive");
    if (checkpoints < 1) throw std::invalid_argument("checkpoints must be at least 1");
    if (grid_intervals < ValueFunction::kMinIntervals) {
        throw std::invalid_argument("grid_intervals must be at least " + std::to_string(ValueFunction::kMinIntervals));
    }
    if (solver != "uniformization" && solver != "poisson-linear") {
        throw std::invalid_argument("solver must be 'uniformization' or 'poisson-linear'");
    }
    if ((kind == ExperimentKind::verify_orthogonality || kind == ExperimentKind::counterexample) &&
        replications < 1000) {
        throw std::invalid_argument(to_string(kind) + " needs at least 1000 replications");
    }
    if (time && !(*time >= 0.0)) throw std::invalid_argument("time must be nonnegative");
    for (const auto& m : resolved_models()) {
        std::visit([](const auto& s) { s.validate(); }, m);
    }
}

namespace {

void set_horizon(LeafSpec& spec, double h)
{
    std::visit([h](auto& s) { s.horizon = h; }, spec);
}

} // namespace

std::vector<ModelSpec> ExperimentConfig::resolved_models() const
{
    auto out = models;
    if (!horizon) return out;
    for (auto& m : out) {
        if (auto* product = std::get_if<ProductSpec>(&m)) {
            for (auto& c : product->components) set_horizon(c, *horizon);
        } else {
            std::visit(
                [this](auto& s) {
                    if constexpr (!std::is_same_v<std::decay_t<decltype(s)>, ProductSpec>) s.horizon = *horizon;
                },
                m);
        }
    }
    return out;
}

namespace {

const std::set<std::string> kConfigKeys = {"kind",   "model",   "models",      "horizon",        "replications",
                                           "seed",   "tolerance", "sigmas",    "checkpoints",    "threads",
                                           "output", "representation", "orthogonality"};

void reject_unknown(const json& j, const std::set<std::string>& known, const std::string& path)
{
    for (auto it = j.begin(); it != j.end(); ++it) {
        if (!known.count(it.key())) throw FieldError(path + "." + it.key(), "unknown field");
    }
}

} // namespace

ExperimentConfig parse_experiment_config(const std::string& json_text)
{
    const json doc = detail::parse_document(json_text, "config");
    if (!doc.is_object()) throw FieldError("config", "expected an object");
    reject_unknown(doc, kConfigKeys, "config");

    ExperimentConfig c;
    try {
        c.kind = parse_experiment_kind(detail::string(detail::field(doc, "kind", "config"), "config.kind"));
    } catch (const FieldError&) {
        throw;
    } catch (const std::invalid_argument& e) {
        throw FieldError("config.kind", e.what());
    }

    const bool has_model = doc.contains("model");
    const bool has_models = doc.contains("models");
    if (has_model == has_models) throw FieldError("config", "exactly one of 'model' or 'models' is required");
    if (has_model) {
        c.models.push_back(detail::model_from_json(doc["model"], "config.model"));
    } else {
        const auto& arr = doc["models"];
        if (!arr.is_array() || arr.empty()) throw FieldError("config.models", "expected a non-empty array");
        for (std::size_t i = 0; i < arr.size(); ++i) {
            c.models.push_back(detail::model_from_json(arr[i], "config.models[" + std::to_string(i) + "]"));
        }
    }
    if (doc.contains("horizon")) c.horizon = detail::number(doc["horizon"], "config.horizon");
    if (doc.contains("replications")) c.replications = detail::unsigned_integer(doc["replications"], "config.replications");
    if (doc.contains("seed")) c.seed = detail::unsigned_integer(doc["seed"], "config.seed");
    if (doc.contains("tolerance")) c.tolerance = detail::number(doc["tolerance"], "config.tolerance");
    if (doc.contains("sigmas")) c.sigmas = detail::number(doc["sigmas"], "config.sigmas");
    if (doc.contains("checkpoints")) c.checkpoints = detail::unsigned_integer(doc["checkpoints"], "config.checkpoints");
    if (doc.contains("threads")) {
        c.threads = static_cast<unsigned>(detail::unsigned_integer(doc["threads"], "config.threads"));
    }
    if (doc.contains("output")) {
        const auto& o = doc["output"];
        if (!o.is_object()) throw FieldError("config.output", "expected an object");
        reject_unknown(o, {"path", "format"}, "config.output");
        if (o.contains("path")) c.output_path = detail::string(o["path"], "config.output.path");
        if (o.contains("format")) {
            try {
                c.output_format = parse_report_format(detail::string(o["format"], "config.output.format"));
            } catch (const FieldError&) {
                throw;
            } catch (const std::invalid_argument& e) {
                throw FieldError("config.output.format", e.what());
            }
        }
    }
    if (doc.contains("representation")) {
        const auto& r = doc["representation"];
        if (!r.is_object()) throw FieldError("config.representation", "expected an object");
        reject_unknown(r, {"payoff", "intervals", "solver"}, "config.representation");
        if (r.contains("payoff")) c.payoff = detail::string(r["payoff"], "config.representation.payoff");
        if (r.contains("intervals")) {
            c.grid_intervals = detail::unsigned_integer(r["intervals"], "config.representation.intervals");
        }
        if (r.contains("solver")) c.solver = detail::string(r["solver"], "config.representation.solver");
    }
    if (doc.contains("orthogonality")) {
        const auto& o = doc["orthogonality"];
        if (!o.is_object()) throw FieldError("config.orthogonality", "expected an object");
        reject_unknown(o, {"marks", "t"}, "config.orthogonality");
        if (o.contains("marks")) {
            const auto& m = o["marks"];
            if (!m.is_array() || m.size() != 2) throw FieldError("config.orthogonality.marks", "expected two mark names");
            c.marks = std::make_pair(detail::string(m[0], "config.orthogonality.marks[0]"),
                                     detail::string(m[1], "config.orthogonality.marks[1]"));
        }
        if (o.contains("t")) c.time = detail::number(o["t"], "config.orthogonality.t");
    }
    try {
        c.validate();
    } catch (const FieldError&) {
        throw;
    } catch (const std::invalid_argument& e) {
        throw FieldError("config", e.what());
    }
    return c;
}

namespace {

json config_to_json_value(const ExperimentConfig& c)
{
    json j;
    j["kind"] = to_string(c.kind);
    if (c.models.size() == 1 && c.kind != ExperimentKind::merge) {
        j["model"] = detail::model_to_json(c.models.front());
    } else {
        j["models"] = json::array();
        for (const auto& m : c.models) j["models"].push_back(detail::model_to_json(m));
    }
    if (c.horizon) j["horizon"] = *c.horizon;
    j["replications"] = c.replications;
    j["seed"] = c.seed;
    j["tolerance"] = c.tolerance;
    j["sigmas"] = c.sigmas;
    j["checkpoints"] = c.checkpoints;
    j["threads"] = c.threads;
    j["output"] = {{"path", c.output_path}, {"format", to_string(c.output_format)}};
    j["representation"] = {{"payoff", c.payoff}, {"intervals", c.grid_intervals}, {"solver", c.solver}};
    json o = json::object();
    if (c.marks) o["marks"] = {c.marks->first, c.marks->second};
    if (c.time) o["t"] = *c.time;
    j["orthogonality"] = o;
    return j;
}

} // namespace

std::string experiment_config_to_json(const ExperimentConfig& config)
{
    return config_to_json_value(config).dump(2) + "\n";
}

// ---------------------------------------------------------------- helpers

bool ExperimentReport::pass() const noexcept
{
    return !checks.empty() && std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.pass; });
}

const char* version() noexcept
{
    return MPPLAB_VERSION_STRING;
}

std::string default_output_dir()
{
    const char* env = std::getenv("MPPLAB_OUTPUT_DIR");
    return env != nullptr && *env != '\0' ? std::string(env) : std::string(".");
}

std::string resolve_output_path(const std::string& path)
{
    const std::filesystem::path p(path);
    if (p.has_parent_path() || p.is_absolute()) return path;
    return (std::filesystem::path(default_output_dir()) / p).string();
}

MarkId resolve_mark(const MarkSpace& space, const std::string& text)
{
    for (std::size_t h = 0; h < space.size(); ++h) {
        const std::string shown = space.display(MarkId{h});
        if (shown == text || (shown.size() > 2 && shown.substr(1, shown.size() - 2) == text)) return MarkId{h};
    }
    throw std::domain_error("no mark named '" + text + "'");
}

namespace {

std::vector<NamedQuantile> quantiles_of(const std::string& name, std::vector<double> values)
{
    std::vector<NamedQuantile> out;
    if (values.empty()) return out;
    std::sort(values.begin(), values.end());
    for (double q : {0.0, 0.5, 0.9, 0.99, 1.0}) {
        const auto n = static_cast<double>(values.size());
        std::size_t idx = q == 0.0 ? 0 : static_cast<std::size_t>(std::ceil(q * n)) - 1;
        idx = std::min(idx, values.size() - 1);
        out.push_back({name, q, values[idx]});
    }
    return out;
}

NamedEstimate named(const std::string& name, const MonteCarloEstimate& e)
{
    return {name, e.mean, e.standard_error, e.replications};
}

std::vector<double> uniform_times(double horizon, std::size_t count, bool include_zero)
{
    std::vector<double> t;
    if (include_zero) {
        for (std::size_t j = 0; j < count; ++j) {
            t.push_back(count == 1 ? horizon : horizon * static_cast<double>(j) / static_cast<double>(count - 1));
        }
    } else {
        for (std::size_t j = 1; j <= count; ++j) {
            t.push_back(horizon * static_cast<double>(j) / static_cast<double>(count));
        }
    }
    return t;
}

std::uint64_t component_seed(std::uint64_t seed, std::size_t i)
{
    return mix64(seed ^ (0x9e3779b97f4a7c15ULL * (i + 1)));
}

std::string artifact_path(const ExperimentConfig& c, const std::string& suffix)
{
    std::filesystem::path p(resolve_output_path(c.output_path));
    p.replace_extension();
    return p.string() + suffix;
}

// ---------------------------------------------------------------- simulate

void run_simulate(const ExperimentConfig& c, ExperimentReport& rep)
{
    const Model model(c.resolved_models().front());
    std::vector<double> counts(c.replications);
    parallel_for(c.replications, c.threads, [&](std::size_t r) {
        StreamRng rng(c.seed, r);
        counts[r] = static_cast<double>(model.simulate(rng).trajectory.size());
    });
    const double max_events = *std::max_element(counts.begin(), counts.end());
    rep.checks.push_back({"explosion_guard", max_events, static_cast<double>(kExplosionGuard),
                          max_events <= static_cast<double>(kExplosionGuard), "max events on one path"});
    rep.estimates.push_back(named("event_count", summarize(counts)));
    auto q = quantiles_of("event_count", counts);
    rep.quantiles.insert(rep.quantiles.end(), q.begin(), q.end());

    if (!c.output_path.empty()) {
        StreamRng rng(c.seed, 0);
        const auto path = model.simulate(rng);
        const std::string traj_file = artifact_path(c, ".trajectory.jsonl");
        const std::string comp_file = artifact_path(c, ".compensator.json");
        std::ofstream traj_out(traj_file);
        std::ofstream comp_out(comp_file);
        if (!traj_out || !comp_out) throw std::ios_base::failure("cannot write simulation artifacts next to " + c.output_path);
        if (model.is_merged()) {
            write_trajectory(traj_out, MergedTrajectory{path.trajectory, std::vector<MarkSpacePtr>(model.component_spaces().begin(), model.component_spaces().end())});
        } else {
            write_trajectory(traj_out, path.trajectory);
        }
        write_compensator(comp_out, path.compensator);
        rep.artifacts = {traj_file, comp_file};
    }
}

// ---------------------------------------------------------------- merge

struct MergeCase {
    bool defined = true;
    std::string error;
    std::size_t projection_mismatches = 0;
    std::size_t measure_mismatches = 0;
    std::size_t measure_queries = 0;
    bool numeric = true;
    std::size_t indist_mismatches = 0;
    std::size_t indist_comparisons = 0;
    double merged_events = 0.0;
};

constexpr std::size_t kCylinderQueries = 50;

void run_merge(const ExperimentConfig& c, ExperimentReport& rep)
{
    const auto specs = c.resolved_models();
    std::vector<Model> models;
    for (const auto& s : specs) models.emplace_back(s);
    const bool single_merged = models.size() == 1 && models.front().is_merged();
    const double horizon = models.front().horizon();
    const auto grid = uniform_times(horizon, c.checkpoints, true);

    std::vector<MergeCase> cases(c.replications);
    parallel_for(c.replications, c.threads, [&](std::size_t r) {
        auto& out = cases[r];
        std::vector<Trajectory> trajs;
        if (single_merged) {
            StreamRng rng(c.seed, r);
            trajs = models.front().simulate(rng).components;
        } else {
            for (std::size_t i = 0; i < models.size(); ++i) {
                StreamRng rng(component_seed(c.seed, i), r);
                trajs.push_back(models[i].simulate(rng).trajectory);
            }
        }
        std::optional<MergedTrajectory> merged;
        try {
            merged = merge(trajs);
        } catch (const std::invalid_argument& e) {
            out.defined = false;
            out.error = e.what();
            return;
        }
        out.merged_events = static_cast<double>(merged->trajectory.size());
        for (std::size_t i = 0; i < trajs.size(); ++i) {
            if (!(project(*merged, i) == trajs[i])) ++out.projection_mismatches;
        }

        StreamRng query_rng(c.seed ^ 0x5bd1e9955bd1e995ULL, r);
        const auto events = merged->trajectory.events();
        for (std::size_t q = 0; q < kCylinderQueries; ++q) {
            const auto i = static_cast<std::size_t>(query_rng.uniform() * static_cast<double>(trajs.size()));
            const auto& space = trajs[i].mark_space();
            std::vector<MarkId> subset;
            for (std::size_t m = 0; m < space.size(); ++m) {
                if (query_rng.uniform() < 0.5) subset.push_back(MarkId{m});
            }
            double s = query_rng.uniform() * horizon;
            // hit event times exactly now and then: the boundary case of (0, s]
            if (!events.empty() && query_rng.uniform() < 0.25) {
                s = events[static_cast<std::size_t>(query_rng.uniform() * static_cast<double>(events.size()))].time;
            }
            const auto direct = measure_eval(trajs[i], s, subset);
            const auto via_merge = measure_eval(merged->trajectory, s, cylinder(*merged, i, subset));
            ++out.measure_queries;
            if (direct != via_merge) ++out.measure_mismatches;
        }

        try {
            const auto ind = merged_semimartingale_check(*merged, trajs, grid);
            out.indist_mismatches = ind.mismatches;
            out.indist_comparisons = ind.comparisons;
        } catch (const UnsupportedPayload&) {
            out.numeric = false;
        }
    });

    std::size_t undefined = 0, proj = 0, meas = 0, queries = 0, indist = 0, comparisons = 0;
    bool numeric = true;
    std::string first_error;
    std::vector<double> sizes;
    for (const auto& k : cases) {
        if (!k.defined) {
            if (undefined++ == 0) first_error = k.error;
            continue;
        }
        proj += k.projection_mismatches;
        meas += k.measure_mismatches;
        queries += k.measure_queries;
        numeric = numeric && k.numeric;
        indist += k.indist_mismatches;
        comparisons += k.indist_comparisons;
        sizes.push_back(k.merged_events);
    }
    rep.checks.push_back({"merge_defined", static_cast<double>(undefined), 0.0, undefined == 0,
                          undefined == 0 ? "merge succeeded on every case" : first_error});
    rep.checks.push_back({"projection_identity", static_cast<double>(proj), 0.0, proj == 0,
                          "components differing from project(merge(.))"});
    rep.checks.push_back({"measure_recovery", static_cast<double>(meas), 0.0, meas == 0,
                          std::to_string(queries) + " cylinder queries"});
    if (numeric) {
        rep.checks.push_back({"indistinguishability", static_cast<double>(indist), 0.0, indist == 0,
                              std::to_string(comparisons) + " grid comparisons"});
    }
    if (!sizes.empty()) {
        rep.estimates.push_back(named("merged_event_count", summarize(sizes)));
        auto q = quantiles_of("merged_event_count", sizes);
        rep.quantiles.insert(rep.quantiles.end(), q.begin(), q.end());
    }
}

// ---------------------------------------------------------------- martingale test

void run_martingale_test(const ExperimentConfig& c, ExperimentReport& rep)
{
    const Model model(c.resolved_models().front());
    const auto times = uniform_times(model.horizon(), c.checkpoints, false);
    const std::size_t marks = model.mark_space()->size();
    const std::size_t width = marks * times.size();
    std::vector<double> values(width * c.replications);
    parallel_for(c.replications, c.threads, [&](std::size_t r) {
        StreamRng rng(c.seed, r);
        const auto path = model.simulate(rng);
        martingale_values(path.trajectory, path.compensator, times,
                          std::span<double>(values.data() + r * width, width));
    });
    std::vector<double> column(c.replications);
    for (std::size_t h = 0; h < marks; ++h) {
        for (std::size_t j = 0; j < times.size(); ++j) {
            for (std::size_t r = 0; r < c.replications; ++r) column[r] = values[r * width + h * times.size() + j];
            const auto est = summarize(column);
            const std::string name =
                "martingale[" + model.mark_space()->display(MarkId{h}) + "@" + format_double(times[j]) + "]";
            rep.checks.push_back({name, std::abs(est.mean), c.sigmas * est.standard_error, est.covers(0.0, c.sigmas),
                                  "|mean| against sigmas * standard error"});
            rep.estimates.push_back(named(name, est));
        }
    }
}

// ---------------------------------------------------------------- representation

void run_representation(const ExperimentConfig& c, ExperimentReport& rep)
{
    const Model model(c.resolved_models().front());
    const CtmcModel* chain = model.ctmc();
    if (chain == nullptr) throw std::invalid_argument("verify-representation needs a ctmc model");
    const auto& spec = chain->spec();
    const auto payoff = parse_payoff(c.payoff, spec);
    const double T = c.time.value_or(spec.horizon);
    if (!(T > 0.0 && T <= spec.horizon)) throw std::invalid_argument("terminal time must lie in (0, horizon]");

    ValueFunction u = [&] {
        if (c.solver == "uniformization") return ValueFunction::solve(spec, payoff, T, c.grid_intervals);
        // closed form n + lambda (T - t) for the linear payoff of a constant-rate birth chain
        const std::size_t n = spec.states.size();
        const double lambda = n > 1 ? spec.generator[0][1] : 0.0;
        for (std::size_t i = 0; i + 1 < n; ++i) {
            if (spec.generator[i][i + 1] != lambda || -spec.generator[i][i] != lambda) {
                throw std::invalid_argument("poisson-linear solver needs a constant-rate birth chain");
            }
        }
        if (c.payoff != "linear") throw std::invalid_argument("poisson-linear solver needs the linear payoff");
        return ValueFunction::tabulate(n, T, c.grid_intervals,
                                       [&](double t, std::size_t s) { return payoff[s] + lambda * (T - t); });
    }();

    std::vector<RepresentationPathReport> reports(c.replications);
    parallel_for(c.replications, c.threads, [&](std::size_t r) {
        StreamRng rng(c.seed, r);
        reports[r] = verify_representation_path(u, *chain, model.simulate(rng), c.checkpoints);
    });
    std::vector<double> residuals;
    double worst = 0.0, jump = 0.0, off = 0.0;
    for (const auto& p : reports) {
        residuals.push_back(p.residual);
        worst = std::max(worst, p.residual);
        jump = std::max(jump, p.jump_mismatch);
        off = std::max(off, p.off_event_jump);
    }
    rep.checks.push_back({"max_residual", worst, c.tolerance, worst <= c.tolerance,
                          "max |Z_t - Z_0 - sum_h int W dM^h| over paths and checkpoints"});
    rep.checks.push_back({"jump_matching", jump, c.tolerance, jump <= c.tolerance, "dZ against represented jumps at events"});
    rep.checks.push_back({"no_jumps_between_events", off, c.tolerance, off <= c.tolerance, ""});
    auto q = quantiles_of("residual", residuals);
    rep.quantiles.insert(rep.quantiles.end(), q.begin(), q.end());
}

// ---------------------------------------------------------------- orthogonality

std::vector<std::pair<MarkId, MarkId>> mark_pairs(const ExperimentConfig& c, const MarkSpace& space)
{
    if (c.marks) {
        const MarkId h = resolve_mark(space, c.marks->first);
        const MarkId k = resolve_mark(space, c.marks->second);
        return {{h, k}};
    }
    std::vector<std::pair<MarkId, MarkId>> pairs;
    for (std::size_t h = 0; h < space.size(); ++h) {
        for (std::size_t k = h + 1; k < space.size(); ++k) pairs.emplace_back(MarkId{h}, MarkId{k});
    }
    return pairs;
}

std::string pair_name(const MarkSpace& space, MarkId h, MarkId k)
{
    return space.display(h) + "," + space.display(k);
}

struct PairPathResult {
    std::size_t shared_atoms = 0;
    double max_bracket = 0.0;
    double cross = 0.0;
    double product = 0.0;
};

void run_orthogonality(const ExperimentConfig& c, ExperimentReport& rep)
{
    const Model model(c.resolved_models().front());
    const auto& space = *model.mark_space();
    const auto pairs = mark_pairs(c, space);
    const double t = c.time.value_or(model.horizon());
    if (t > model.horizon()) throw std::invalid_argument("evaluation time beyond the horizon");

    std::vector<PairPathResult> results(c.replications * pairs.size());
    parallel_for(c.replications, c.threads, [&](std::size_t r) {
        StreamRng rng(c.seed, r);
        const auto path = model.simulate(rng);
        const auto atoms = predictable_atoms(path.compensator);
        std::vector<std::optional<PiecewisePath>> n(space.size()), m(space.size());
        auto ensure = [&](MarkId h) {
            if (!m[h.index]) {
                n[h.index] = counting_path(path.trajectory, h);
                m[h.index] = compensated_martingale(*n[h.index], path.compensator, h);
            }
        };
        for (std::size_t p = 0; p < pairs.size(); ++p) {
            const auto [h, k] = pairs[p];
            ensure(h);
            ensure(k);
            auto& out = results[r * pairs.size() + p];
            const bool nopjt = nopjt_check(atoms.of(h), atoms.of(k));
            if (!nopjt) {
                std::vector<double> shared;
                std::set_intersection(atoms.of(h).begin(), atoms.of(h).end(), atoms.of(k).begin(), atoms.of(k).end(),
                                      std::back_inserter(shared));
                out.shared_atoms = shared.size();
            }
            const auto bracket = basis_bracket_check(*m[h.index], h, *m[k.index], k, nopjt);
            out.max_bracket = bracket.max_abs_jump;
            out.cross = cross_jump_products(*n[h.index], path.compensator, h, *n[k.index], path.compensator, k);
            out.product = martingale_at(path.trajectory, path.compensator, h, t) *
                          martingale_at(path.trajectory, path.compensator, k, t);
        }
    });

    std::vector<double> samples(c.replications);
    for (std::size_t p = 0; p < pairs.size(); ++p) {
        const auto [h, k] = pairs[p];
        const std::string name = pair_name(space, h, k);
        std::size_t shared = 0;
        double bracket = 0.0, cross = 0.0;
        for (std::size_t r = 0; r < c.replications; ++r) {
            const auto& x = results[r * pairs.size() + p];
            shared = std::max(shared, x.shared_atoms);
            bracket = std::max(bracket, x.max_bracket);
            cross = std::max(cross, x.cross);
            samples[r] = x.product;
        }
        const auto est = summarize(samples);
        rep.checks.push_back({"nopjt[" + name + "]", static_cast<double>(shared), 0.0, shared == 0, kNopjtScope});
        rep.checks.push_back({"bracket_zero[" + name + "]", bracket, 0.0, bracket == 0.0, "max |d[M^h,M^k]| over paths"});
        rep.checks.push_back({"cross_jumps_zero[" + name + "]", cross, 0.0, cross == 0.0, ""});
        const std::string mc = "mc_orthogonality[" + name + "@" + format_double(t) + "]";
        rep.checks.push_back({mc, std::abs(est.mean), c.sigmas * est.standard_error, est.covers(0.0, c.sigmas),
                              "|mean| against sigmas * standard error"});
        rep.estimates.push_back(named(mc, est));
    }
}

// ---------------------------------------------------------------- counterexample

/// E[M^h_t M^k_t] for a grid model by enumerating the firing outcomes at each
/// grid time; increments at different grid times are independent and centred.
double grid_cross_moment(const GridBernoulliSpec& spec, const std::vector<std::string>& names, MarkId h, MarkId k,
                         double t)
{
    const auto& ph = spec.probs.at(names[h.index]);
    const auto& pk = spec.probs.at(names[k.index]);
    double total = 0.0;
    for (std::size_t g = 0; g < spec.grid.size() && spec.grid[g] <= t; ++g) {
        const double a = ph[g], b = pk[g];
        // h fires, k fires, neither fires
        total += a * (1.0 - a) * (-b) + b * (-a) * (1.0 - b) + (1.0 - a - b) * (a * b);
    }
    return total;
}

void run_counterexample(const ExperimentConfig& c, ExperimentReport& rep)
{
    const Model model(c.resolved_models().front());
    const auto& space = *model.mark_space();
    const double t = c.time.value_or(model.horizon());
    if (t > model.horizon()) throw std::invalid_argument("evaluation time beyond the horizon");

    // atoms of every built-in grid component are path-independent
    StreamRng probe_rng(c.seed, 0);
    const auto probe = model.simulate(probe_rng);
    const auto atoms = predictable_atoms(probe.compensator);
    MarkId h{0}, k{0};
    double sigma = 0.0;
    bool found = false;
    auto first_shared = [&](MarkId a, MarkId b) -> std::optional<double> {
        std::vector<double> shared;
        std::set_intersection(atoms.of(a).begin(), atoms.of(a).end(), atoms.of(b).begin(), atoms.of(b).end(),
                              std::back_inserter(shared));
        for (double s : shared) {
            if (s <= t) return s;
        }
        return std::nullopt;
    };
    for (const auto& [a, b] : mark_pairs(c, space)) {
        if (auto s = first_shared(a, b)) {
            h = a;
            k = b;
            sigma = *s;
            found = true;
            break;
        }
    }
    if (!found) {
        rep.checks.push_back({"shared_atom", 0.0, 0.0, false, "no mark pair shares a predictable atom before t"});
        return;
    }
    const std::string name = pair_name(space, h, k);

    struct PathResult {
        bool eligible = false;
        double bracket_jump = 0.0;
        double product = 0.0;
    };
    std::vector<PathResult> paths(c.replications);
    parallel_for(c.replications, c.threads, [&](std::size_t r) {
        StreamRng rng(c.seed, r);
        const auto path = model.simulate(rng);
        const auto m_h = compensated_martingale(path.trajectory, path.compensator, h);
        const auto m_k = compensated_martingale(path.trajectory, path.compensator, k);
        const auto bracket = basis_bracket_check(m_h, h, m_k, k, false);
        auto& out = paths[r];
        std::size_t fired = 0;
        for (const auto& e : path.trajectory.events()) {
            if (e.time == sigma && (e.mark == h || e.mark == k)) ++fired;
        }
        out.eligible = fired <= 1;
        out.bracket_jump = bracket.bracket.jump_at(sigma);
        out.product = martingale_at(path.trajectory, path.compensator, h, t) *
                      martingale_at(path.trajectory, path.compensator, k, t);
    });

    const double product = compensator_jump_product(probe.compensator, h, probe.compensator, k, sigma);
    std::size_t eligible = 0, zero_brackets = 0;
    std::vector<double> samples(c.replications);
    for (std::size_t r = 0; r < c.replications; ++r) {
        samples[r] = paths[r].product;
        if (!paths[r].eligible) continue;
        ++eligible;
        if (paths[r].bracket_jump == 0.0) ++zero_brackets;
    }
    const auto est = summarize(samples);

    rep.checks.push_back({"nopjt_violated[" + name + "]", sigma, 0.0, true,
                          "shared atom at t=" + format_double(sigma) + "; " + kNopjtScope});
    rep.checks.push_back({"compensator_jump_product[" + name + "]", product, 0.0, product > 0.0,
                          "dnu^h * dnu^k at the shared atom"});
    rep.checks.push_back({"bracket_nonzero[" + name + "]", static_cast<double>(zero_brackets), 0.0,
                          zero_brackets == 0 && eligible > 0,
                          std::to_string(eligible) + " paths with at most one of the marks firing"});
    const std::string mc = "mc_orthogonality[" + name + "@" + format_double(t) + "]";
    rep.checks.push_back({"rejects_zero:" + mc, std::abs(est.mean), c.sigmas * est.standard_error,
                          std::abs(est.mean) > c.sigmas * est.standard_error, "|mean| beyond sigmas * standard error"});
    rep.estimates.push_back(named(mc, est));

    const auto specs = c.resolved_models();
    if (const auto* grid = std::get_if<GridBernoulliSpec>(&specs.front())) {
        std::vector<std::string> names;
        for (const auto& [mark, p] : grid->probs) names.push_back(mark);
        const double exact = grid_cross_moment(*grid, names, h, k, t);
        rep.checks.push_back({"matches_enumeration:" + mc, std::abs(est.mean - exact), c.sigmas * est.standard_error,
                              est.covers(exact, c.sigmas), "exact value " + format_double(exact)});
    }
}

} // namespace

ExperimentReport run(const ExperimentConfig& config)
{
    config.validate();
    ExperimentReport rep;
    rep.config = config;
    rep.version = version();
    const auto start = std::chrono::steady_clock::now();
    try {
        switch (config.kind) {
        case ExperimentKind::simulate: run_simulate(config, rep); break;
        case ExperimentKind::merge: run_merge(config, rep); break;
        case ExperimentKind::verify_representation: run_representation(config, rep); break;
        case ExperimentKind::verify_orthogonality: run_orthogonality(config, rep); break;
        case ExperimentKind::counterexample: run_counterexample(config, rep); break;
        case ExperimentKind::martingale_test: run_martingale_test(config, rep); break;
        }
    } catch (const ExplosionError& e) {
        rep.checks.clear();
        rep.estimates.clear();
        rep.quantiles.clear();
        rep.checks.push_back({"explosion_guard", static_cast<double>(kExplosionGuard), static_cast<double>(kExplosionGuard),
                              false, e.what()});
    }
    rep.duration_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return rep;
}

} // namespace mpplab
