#include "model_json.hpp"

#include <algorithm>

namespace mpplab {

namespace detail {

namespace {

std::size_t state_index(const std::vector<std::string>& states, const json& j, const std::string& path)
{
    const auto name = string(j, path);
    auto it = std::find(states.begin(), states.end(), name);
    if (it == states.end()) {
        throw FieldError(path, "unknown state '" + name + "'");
    }
    return static_cast<std::size_t>(it - states.begin());
}

std::map<std::string, double> rate_map(const json& j, const std::string& path)
{
    if (!j.is_object()) {
        throw FieldError(path, "expected an object of mark -> rate");
    }
    std::map<std::string, double> out;
    for (const auto& [k, v] : j.items()) out[k] = number(v, path + "." + k);
    return out;
}

PoissonSpec poisson_from(const json& j, const std::string& path)
{
    PoissonSpec s;
    s.horizon = number(field(j, "horizon", path), path + ".horizon");
    s.rates = rate_map(field(j, "rates", path), path + ".rates");
    return s;
}

CtmcSpec ctmc_from(const json& j, const std::string& path)
{
    CtmcSpec s;
    s.horizon = number(field(j, "horizon", path), path + ".horizon");
    const auto& states = field(j, "states", path);
    if (!states.is_array()) throw FieldError(path + ".states", "expected an array of state names");
    for (std::size_t i = 0; i < states.size(); ++i) {
        s.states.push_back(string(states[i], path + ".states[" + std::to_string(i) + "]"));
    }
    const auto& q = field(j, "generator", path);
    if (!q.is_array()) throw FieldError(path + ".generator", "expected a matrix");
    for (std::size_t i = 0; i < q.size(); ++i) {
        const auto row_path = path + ".generator[" + std::to_string(i) + "]";
        if (!q[i].is_array()) throw FieldError(row_path, "expected a row");
        std::vector<double> row;
        for (std::size_t k = 0; k < q[i].size(); ++k) {
            row.push_back(number(q[i][k], row_path + "[" + std::to_string(k) + "]"));
        }
        s.generator.push_back(std::move(row));
    }
    s.initial = j.contains("initial") ? state_index(s.states, j["initial"], path + ".initial") : 0;
    if (j.contains("marks")) {
        const auto& marks = j["marks"];
        if (!marks.is_array()) throw FieldError(path + ".marks", "expected an array");
        for (std::size_t n = 0; n < marks.size(); ++n) {
            const auto p = path + ".marks[" + std::to_string(n) + "]";
            const auto from = state_index(s.states, field(marks[n], "from", p), p + ".from");
            const auto to = state_index(s.states, field(marks[n], "to", p), p + ".to");
            s.mark_map[{from, to}] = string(field(marks[n], "mark", p), p + ".mark");
        }
    }
    return s;
}

GridBernoulliSpec grid_from(const json& j, const std::string& path)
{
    GridBernoulliSpec s;
    s.horizon = number(field(j, "horizon", path), path + ".horizon");
    const auto& grid = field(j, "grid", path);
    if (!grid.is_array()) throw FieldError(path + ".grid", "expected an array of times");
    for (std::size_t k = 0; k < grid.size(); ++k) {
        s.grid.push_back(number(grid[k], path + ".grid[" + std::to_string(k) + "]"));
    }
    const auto& probs = field(j, "probs", path);
    if (!probs.is_object()) throw FieldError(path + ".probs", "expected an object of mark -> probability");
    for (const auto& [mark, v] : probs.items()) {
        const auto p = path + ".probs." + mark;
        if (v.is_number()) {
            s.probs[mark] = std::vector<double>(s.grid.size(), v.get<double>());
        } else if (v.is_array()) {
            std::vector<double> per_time;
            for (std::size_t k = 0; k < v.size(); ++k) per_time.push_back(number(v[k], p + "[" + std::to_string(k) + "]"));
            s.probs[mark] = std::move(per_time);
        } else {
            throw FieldError(p, "expected a probability or an array of probabilities");
        }
    }
    return s;
}

CommonShockSpec shock_from(const json& j, const std::string& path)
{
    CommonShockSpec s;
    s.horizon = number(field(j, "horizon", path), path + ".horizon");
    const auto& comps = field(j, "components", path);
    if (!comps.is_array()) throw FieldError(path + ".components", "expected an array");
    for (std::size_t i = 0; i < comps.size(); ++i) {
        s.components.push_back(rate_map(comps[i], path + ".components[" + std::to_string(i) + "]"));
    }
    const auto& shock = field(j, "shock", path);
    const auto sp = path + ".shock";
    if (!shock.is_object()) throw FieldError(sp, "expected an object");
    for (const auto& [key, value] : shock.items()) {
        if (key != "rate" && key != "components" && key != "marks") throw FieldError(sp + "." + key, "unknown field");
    }
    s.shock_rate = number(field(shock, "rate", sp), sp + ".rate");
    if (shock.contains("components")) {
        const auto& c = shock["components"];
        if (!c.is_array() || c.size() != 2) throw FieldError(sp + ".components", "expected two component indices");
        s.shock_components = {unsigned_integer(c[0], sp + ".components[0]"), unsigned_integer(c[1], sp + ".components[1]")};
    }
    const auto& m = field(shock, "marks", sp);
    if (!m.is_array() || m.size() != 2) throw FieldError(sp + ".marks", "expected two mark labels");
    s.shock_marks = {string(m[0], sp + ".marks[0]"), string(m[1], sp + ".marks[1]")};
    return s;
}

LeafSpec leaf_from(const json& j, const std::string& path)
{
    const auto spec = model_from_json(j, path);
    return std::visit(
        [&](const auto& s) -> LeafSpec {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, PoissonSpec> || std::is_same_v<T, CtmcSpec> ||
                          std::is_same_v<T, GridBernoulliSpec>) {
                return s;
            } else {
                throw FieldError(path + ".kind", "product components must be poisson, ctmc or grid_bernoulli");
            }
        },
        spec);
}

json leaf_to_json(const LeafSpec& leaf)
{
    return std::visit([](const auto& s) { return model_to_json(ModelSpec(s)); }, leaf);
}

} // namespace

namespace {

void reject_unknown_keys(const json& j, const std::string& kind, const std::string& path)
{
    static const std::map<std::string, std::vector<std::string>> allowed = {
        {"poisson", {"kind", "horizon", "rates"}},
        {"ctmc", {"kind", "horizon", "states", "generator", "initial", "marks"}},
        {"poisson_birth", {"kind", "rate", "levels", "horizon"}},
        {"grid_bernoulli", {"kind", "horizon", "grid", "probs"}},
        {"common_shock", {"kind", "horizon", "components", "shock"}},
        {"product", {"kind", "components"}},
    };
    const auto it = allowed.find(kind);
    if (it == allowed.end()) return;
    for (const auto& [key, value] : j.items()) {
        if (std::find(it->second.begin(), it->second.end(), key) == it->second.end()) {
            throw FieldError(path + "." + key, "unknown field for a " + kind + " model");
        }
    }
}

} // namespace

ModelSpec model_from_json(const json& j, const std::string& path)
{
    if (!j.is_object()) throw FieldError(path, "expected a model object");
    const auto kind = string(field(j, "kind", path), path + ".kind");
    reject_unknown_keys(j, kind, path);
    ModelSpec spec;
    if (kind == "poisson") {
        spec = poisson_from(j, path);
    } else if (kind == "ctmc") {
        spec = ctmc_from(j, path);
    } else if (kind == "poisson_birth") {
        const double rate = number(field(j, "rate", path), path + ".rate");
        const auto levels = unsigned_integer(field(j, "levels", path), path + ".levels");
        const double horizon = number(field(j, "horizon", path), path + ".horizon");
        try {
            spec = CtmcSpec::birth_chain(rate, levels, horizon);
        } catch (const std::invalid_argument& e) {
            throw FieldError(path, e.what());
        }
    } else if (kind == "grid_bernoulli") {
        spec = grid_from(j, path);
    } else if (kind == "common_shock") {
        spec = shock_from(j, path);
    } else if (kind == "product") {
        ProductSpec p;
        const auto& comps = field(j, "components", path);
        if (!comps.is_array()) throw FieldError(path + ".components", "expected an array of models");
        for (std::size_t i = 0; i < comps.size(); ++i) {
            p.components.push_back(leaf_from(comps[i], path + ".components[" + std::to_string(i) + "]"));
        }
        spec = std::move(p);
    } else {
        throw FieldError(path + ".kind", "unknown model kind '" + kind + "'");
    }
    try {
        std::visit([](const auto& s) { s.validate(); }, spec);
    } catch (const FieldError&) {
        throw;
    } catch (const std::invalid_argument& e) {
        throw FieldError(path, e.what());
    }
    return spec;
}

json model_to_json(const ModelSpec& spec)
{
    return std::visit(
        [](const auto& s) -> json {
            using T = std::decay_t<decltype(s)>;
            json j;
            if constexpr (std::is_same_v<T, PoissonSpec>) {
                j["kind"] = "poisson";
                j["horizon"] = s.horizon;
                j["rates"] = s.rates;
            } else if constexpr (std::is_same_v<T, CtmcSpec>) {
                j["kind"] = "ctmc";
                j["horizon"] = s.horizon;
                j["states"] = s.states;
                j["generator"] = s.generator;
                j["initial"] = s.states.at(s.initial);
                if (!s.mark_map.empty()) {
                    json marks = json::array();
                    for (const auto& [ft, m] : s.mark_map) {
                        marks.push_back({{"from", s.states[ft.first]}, {"to", s.states[ft.second]}, {"mark", m}});
                    }
                    j["marks"] = marks;
                }
            } else if constexpr (std::is_same_v<T, GridBernoulliSpec>) {
                j["kind"] = "grid_bernoulli";
                j["horizon"] = s.horizon;
                j["grid"] = s.grid;
                j["probs"] = s.probs;
            } else if constexpr (std::is_same_v<T, CommonShockSpec>) {
                j["kind"] = "common_shock";
                j["horizon"] = s.horizon;
                j["components"] = s.components;
                j["shock"] = {{"rate", s.shock_rate},
                              {"components", {s.shock_components[0], s.shock_components[1]}},
                              {"marks", {s.shock_marks[0], s.shock_marks[1]}}};
            } else {
                j["kind"] = "product";
                j["components"] = json::array();
                for (const auto& c : s.components) j["components"].push_back(leaf_to_json(c));
            }
            return j;
        },
        spec);
}

} // namespace detail

ModelSpec parse_model_spec(const std::string& json_text)
{
    return detail::model_from_json(detail::parse_document(json_text, "model"), "model");
}

std::string model_spec_to_json(const ModelSpec& spec)
{
    return detail::model_to_json(spec).dump(2);
}

} // namespace mpplab
