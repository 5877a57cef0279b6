#include <doctest.h>
#include <json.hpp>
#include <mpplab/experiment.hpp>

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace mpplab;
namespace fs = std::filesystem;

namespace {

const std::string kPoisson = R"({"kind": "poisson", "horizon": 1, "rates": {"a": 1}})";

ExperimentConfig config(const std::string& text)
{
    return parse_experiment_config(text);
}

std::string read_file(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
}

std::string error_of(const std::string& text)
{
    try {
        parse_experiment_config(text);
    } catch (const std::invalid_argument& e) {
        return e.what();
    }
    return "no error";
}

fs::path scratch(const std::string& name)
{
    auto dir = fs::temp_directory_path() / ("mpplab_test_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

} // namespace

TEST_CASE("configs round-trip through parse and serialize")
{
    const auto c = config(R"({"kind": "verify-orthogonality", "model": )" + kPoisson +
                          R"(, "replications": 2000, "seed": 18446744073709551615, "tolerance": 1e-9, "threads": 2,
                          "orthogonality": {"marks": ["a", "a"], "t": 0.5}, "output": {"path": "r.csv", "format": "csv"}})");
    CHECK(c.seed == 18446744073709551615ULL);
    CHECK(c.output_format == ReportFormat::csv);
    const auto text = experiment_config_to_json(c);
    const auto again = parse_experiment_config(text);
    CHECK(experiment_config_to_json(again) == text);
    CHECK(again.marks->first == "a");
    CHECK(*again.time == 0.5);
}

TEST_CASE("config diagnostics name fields and positions")
{
    CHECK(error_of("{\n \"kind\": \"simulate\",\n \"model\": [1,\n}").find("line 4") != std::string::npos);
    CHECK(error_of(R"({"kind": "simulate", "model": )" + kPoisson + R"(, "replicas": 3})").find("config.replicas") !=
          std::string::npos);
    CHECK(error_of(R"({"model": )" + kPoisson + "}").find("config.kind") != std::string::npos);
    CHECK(error_of(R"({"kind": "dance", "model": )" + kPoisson + "}").find("config.kind") != std::string::npos);
    CHECK(error_of(R"({"kind": "simulate", "model": )" + kPoisson + R"(, "tolerance": 0})").find("tolerance") !=
          std::string::npos);
    CHECK(error_of(R"({"kind": "simulate", "model": )" + kPoisson + R"(, "replications": 0})").find("replications") !=
          std::string::npos);
    CHECK(error_of(R"({"kind": "simulate", "model": )" + kPoisson + R"(, "horizon": -1})").find("horizon") !=
          std::string::npos);
    CHECK(error_of(R"({"kind": "simulate", "model": {"kind": "poisson", "horizon": 1, "rates": {"a": "x"}}})")
              .find("config.model.rates.a") != std::string::npos);
}

TEST_CASE("simulate writes a reproducible trajectory")
{
    const auto dir = scratch("simulate");
    auto c = config(R"({"kind": "simulate", "model": )" + kPoisson + R"(, "seed": 7})");
    c.output_path = (dir / "run.json").string();
    const auto first = run(c);
    CHECK(first.pass());
    REQUIRE(first.artifacts.size() == 2);
    const auto traj1 = read_file(first.artifacts[0]);
    const auto second = run(c);
    CHECK(read_file(second.artifacts[0]) == traj1);
    CHECK(traj1.find("mpplab.trajectory") != std::string::npos);
}

TEST_CASE("verify-representation on the Poisson linear benchmark")
{
    const auto c = config(R"({"kind": "verify-representation",
        "model": {"kind": "poisson_birth", "rate": 1, "levels": 40, "horizon": 2},
        "replications": 100, "seed": 3, "tolerance": 1e-9, "checkpoints": 50,
        "representation": {"payoff": "linear", "solver": "poisson-linear"}})");
    const auto rep = run(c);
    CHECK(rep.pass());
    for (const auto& check : rep.checks) CHECK(check.statistic <= 1e-12);
    CHECK(rep.quantiles.size() == 5);
}

TEST_CASE("verify-representation rejects non-chain models")
{
    const auto c = config(R"({"kind": "verify-representation", "model": )" + kPoisson + "}");
    CHECK_THROWS_AS(run(c), std::invalid_argument);
}

TEST_CASE("martingale test reports an estimate per mark and checkpoint")
{
    const auto c = config(R"({"kind": "martingale-test",
        "model": {"kind": "poisson", "horizon": 2, "rates": {"a": 1, "b": 0.5}}, "replications": 10000, "seed": 1})");
    const auto rep = run(c);
    CHECK(rep.checks.size() == 10);
    CHECK(rep.estimates.size() == 10);
    for (const auto& e : rep.estimates) CHECK(e.replications == 10000);
}

TEST_CASE("orthogonality and counterexample experiments")
{
    const auto ortho = run(config(R"({"kind": "verify-orthogonality",
        "model": {"kind": "poisson", "horizon": 2, "rates": {"a": 1, "b": 0.5}}, "replications": 2000, "seed": 1})"));
    CHECK(ortho.pass());
    const auto counter = run(config(R"({"kind": "counterexample",
        "model": {"kind": "grid_bernoulli", "horizon": 2, "grid": [1.0], "probs": {"h": 0.5, "k": 0.5}},
        "replications": 20000, "seed": 1})"));
    CHECK(counter.pass());
    bool saw_product = false;
    for (const auto& c : counter.checks) {
        if (c.name.rfind("compensator_jump_product", 0) == 0) {
            saw_product = true;
            CHECK(c.statistic == 0.25);
        }
    }
    CHECK(saw_product);
}

TEST_CASE("merge experiment on numeric components")
{
    const auto rep = run(config(R"({"kind": "merge", "models": [
        {"kind": "poisson", "horizon": 3, "rates": {"1": 1, "2": 2}},
        {"kind": "grid_bernoulli", "horizon": 3, "grid": [1, 2], "probs": {"5": 0.5}}],
        "replications": 200, "seed": 2, "checkpoints": 100})"));
    CHECK(rep.pass());
    bool indist = false;
    for (const auto& c : rep.checks) indist = indist || c.name == "indistinguishability";
    CHECK(indist);
}

TEST_CASE("explosion surfaces as a failed check")
{
    const auto rep = run(config(R"({"kind": "simulate",
        "model": {"kind": "poisson", "horizon": 1, "rates": {"a": 5e6}}})"));
    CHECK_FALSE(rep.pass());
    REQUIRE(rep.checks.size() == 1);
    CHECK(rep.checks[0].name == "explosion_guard");
}

TEST_CASE("reports round-trip and export CSV with five columns")
{
    const auto rep = run(config(R"({"kind": "martingale-test",
        "model": {"kind": "grid_bernoulli", "horizon": 2, "grid": [0.5, 1.5], "probs": {"a,b": 0.2, "c": 0.3}},
        "replications": 1000, "seed": 4})"));
    const auto back = report_from_json(report_to_json(rep));
    CHECK(back.checks == rep.checks);
    CHECK(back.estimates == rep.estimates);
    CHECK(back.quantiles == rep.quantiles);
    CHECK(back.duration_seconds == rep.duration_seconds);
    CHECK(report_to_json(back) == report_to_json(rep));

    const auto csv = report_to_csv(rep);
    std::istringstream lines(csv);
    std::string line;
    while (std::getline(lines, line)) {
        std::size_t fields = 1;
        bool quoted = false;
        for (char ch : line) {
            if (ch == '"') quoted = !quoted;
            if (ch == ',' && !quoted) ++fields;
        }
        CHECK(fields == kReportCsvColumns);
    }
}

TEST_CASE("large reports export quickly")
{
    ExperimentReport rep;
    rep.config = config(R"({"kind": "simulate", "model": )" + kPoisson + "}");
    for (int i = 0; i < 1000; ++i) rep.checks.push_back({"check" + std::to_string(i), i * 0.1, 1.0, true, ""});
    const auto dir = scratch("export");
    const auto start = std::chrono::steady_clock::now();
    export_report(rep, (dir / "r.csv").string(), ReportFormat::csv);
    export_report(rep, (dir / "r.json").string(), ReportFormat::json);
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    WARN(seconds < 1.0);
    CHECK_THROWS_AS(export_report(rep, (dir / "missing" / "r.csv").string(), ReportFormat::csv), std::ios_base::failure);
}

TEST_CASE("numerics do not depend on the thread count")
{
    const std::string kinds[] = {
        R"({"kind": "martingale-test", "model": {"kind": "ctmc", "horizon": 2, "states": ["x", "y"],
            "generator": [[-1, 1], [2, -2]]}, "replications": 3000, "seed": 9})",
        R"({"kind": "verify-orthogonality", "model": {"kind": "grid_bernoulli", "horizon": 2, "grid": [0.5, 1.5],
            "probs": {"a": [0.3, 0], "b": [0, 0.6]}}, "replications": 2000, "seed": 9})",
        R"({"kind": "merge", "models": [{"kind": "poisson", "horizon": 2, "rates": {"1": 1}},
            {"kind": "poisson", "horizon": 2, "rates": {"2": 3}}], "replications": 500, "seed": 9})"};
    for (const auto& text : kinds) {
        auto c = config(text);
        c.threads = 1;
        const auto one = report_numerics(run(c));
        c.threads = 4;
        CHECK(report_numerics(run(c)) == one);
    }
}

TEST_CASE("mark names resolve in display or bare tuple form")
{
    const MarkSpace space({{"a", "0"}, {"0", "b"}, {"a", "b"}});
    CHECK(resolve_mark(space, "(a,b)") == MarkId{2});
    CHECK(resolve_mark(space, "0,b") == MarkId{1});
    CHECK_THROWS_AS(resolve_mark(space, "b"), std::domain_error);
}

TEST_CASE("bare output names go to the default output directory")
{
    const auto dir = scratch("outdir");
    setenv("MPPLAB_OUTPUT_DIR", dir.c_str(), 1);
    CHECK(resolve_output_path("r.json") == (dir / "r.json").string());
    CHECK(resolve_output_path("sub/r.json") == "sub/r.json");
    unsetenv("MPPLAB_OUTPUT_DIR");
    CHECK(default_output_dir() == ".");
}

TEST_CASE("the config schema covers every serialized field")
{
    const auto schema = nlohmann::json::parse(experiment_config_schema());
    auto c = config(R"({"kind": "counterexample", "model": )" + kPoisson +
                    R"(, "horizon": 1, "replications": 1000, "orthogonality": {"marks": ["a", "a"], "t": 0.5}})");
    const auto doc = nlohmann::json::parse(experiment_config_to_json(c));
    const auto& props = schema.at("properties");
    for (const auto& [key, value] : doc.items()) {
        INFO(key);
        REQUIRE(props.contains(key));
        if (value.is_object() && key != "model") {
            for (const auto& [sub, unused] : value.items()) CHECK(props[key]["properties"].contains(sub));
        }
    }
    const auto kinds = props.at("kind").at("enum");
    for (auto kind : {ExperimentKind::simulate, ExperimentKind::merge, ExperimentKind::verify_representation,
                      ExperimentKind::verify_orthogonality, ExperimentKind::counterexample,
                      ExperimentKind::martingale_test}) {
        CHECK(std::find(kinds.begin(), kinds.end(), to_string(kind)) != kinds.end());
    }
}

TEST_CASE("unknown model fields are rejected with their path")
{
    CHECK(error_of(R"({"kind": "simulate", "model": {"kind": "poisson", "horizon": 1, "rates": {"a": 1}, "rate": 2}})")
              .find("config.model.rate") != std::string::npos);
    CHECK(error_of(R"({"kind": "simulate", "model": {"kind": "common_shock", "horizon": 1, "components": [{"a": 1}, {"b": 1}],
                   "shock": {"rate": 1, "marks": ["a", "b"], "extra": 0}}})")
              .find("config.model.shock.extra") != std::string::npos);
}
