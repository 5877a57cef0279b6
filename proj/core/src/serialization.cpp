#include "mpplab/serialization.hpp"

#include "json_util.hpp"

#include <algorithm>
#include <charconv>
#include <istream>
#include <ostream>
#include <set>
#include <stdexcept>

namespace mpplab {

using detail::json;

std::string format_double(double x)
{
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
    if (ec != std::errc()) {
        throw std::runtime_error("format_double failed");
    }
    return std::string(buf, ptr);
}

namespace {

json label_json(const MarkLabel& label)
{
    if (label.size() == 1) return label.front();
    return json(label);
}

MarkLabel label_from(const json& j, const std::string& where)
{
    if (j.is_string()) return MarkLabel{j.get<std::string>()};
    if (j.is_array() && !j.empty()) {
        MarkLabel out;
        for (const auto& c : j) {
            if (!c.is_string()) throw std::invalid_argument(where + ": mark coordinates must be strings");
            out.push_back(c.get<std::string>());
        }
        return out;
    }
    throw std::invalid_argument(where + ": mark must be a string or an array of strings");
}

json space_json(const MarkSpace& space)
{
    json marks = json::array();
    for (const auto& l : space.labels()) marks.push_back(label_json(l));
    return marks;
}

MarkSpacePtr space_from(const json& j, const std::string& where)
{
    if (!j.is_array()) throw std::invalid_argument(where + ": expected an array of marks");
    std::vector<MarkLabel> labels;
    for (const auto& m : j) labels.push_back(label_from(m, where));
    return std::make_shared<const MarkSpace>(std::move(labels));
}

void write_events(std::ostream& out, const Trajectory& traj)
{
    for (const auto& e : traj.events()) {
        json line = {{"t", e.time}, {"mark", label_json(traj.mark_space().label(e.mark))}};
        out << line.dump() << '\n';
    }
}

void check_header(const json& j, const std::string& schema, const std::string& where)
{
    if (!j.is_object() || j.value("schema", "") != schema) {
        throw std::invalid_argument(where + ": expected schema '" + schema + "'");
    }
    if (j.value("version", "") != kFormatVersion) {
        throw std::invalid_argument(where + ": unsupported version (expected v1)");
    }
}

} // namespace

void write_trajectory(std::ostream& out, const Trajectory& traj)
{
    json header = {{"schema", "mpplab.trajectory"},
                   {"version", kFormatVersion},
                   {"horizon", traj.horizon()},
                   {"marks", space_json(traj.mark_space())}};
    out << header.dump() << '\n';
    write_events(out, traj);
}

void write_trajectory(std::ostream& out, const MergedTrajectory& merged)
{
    json comps = json::array();
    for (const auto& c : merged.components) comps.push_back(space_json(*c));
    json header = {{"schema", "mpplab.trajectory"},
                   {"version", kFormatVersion},
                   {"horizon", merged.trajectory.horizon()},
                   {"marks", space_json(merged.trajectory.mark_space())},
                   {"components", comps}};
    out << header.dump() << '\n';
    write_events(out, merged.trajectory);
}

TrajectoryFile read_trajectory(std::istream& in)
{
    std::string line;
    std::size_t line_no = 0;
    json header;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            header = json::parse(line);
        } catch (const json::parse_error&) {
            throw std::invalid_argument("trajectory line " + std::to_string(line_no) + ": malformed JSON");
        }
        break;
    }
    if (line_no == 0) throw std::invalid_argument("trajectory line 1: empty file");
    const std::string where = "trajectory line " + std::to_string(line_no);
    check_header(header, "mpplab.trajectory", where);
    if (!header.contains("horizon") || !header["horizon"].is_number()) {
        throw std::invalid_argument(where + ": missing numeric horizon");
    }
    const double horizon = header["horizon"].get<double>();
    auto space = space_from(header.value("marks", json()), where);

    std::vector<Event> events;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        const std::string at = "trajectory line " + std::to_string(line_no);
        json rec;
        try {
            rec = json::parse(line);
        } catch (const json::parse_error&) {
            throw std::invalid_argument(at + ": malformed JSON");
        }
        if (!rec.is_object() || !rec.contains("t") || !rec["t"].is_number() || !rec.contains("mark")) {
            throw std::invalid_argument(at + ": expected {\"t\": number, \"mark\": ...}");
        }
        const double t = rec["t"].get<double>();
        if (!events.empty() && !(events.back().time <= t)) {
            throw std::invalid_argument(at + ": event times must be non-decreasing");
        }
        const auto label = label_from(rec["mark"], at);
        const auto id = space->find(label);
        if (!id) throw std::invalid_argument(at + ": mark not in the declared mark space");
        events.push_back({t, *id});
    }
    Trajectory traj(space, std::move(events), horizon);
    TrajectoryFile file{traj, std::nullopt};
    if (header.contains("components")) {
        const auto& comps = header["components"];
        if (!comps.is_array() || comps.size() != space->arity()) {
            throw std::invalid_argument(where + ": components must list one mark space per coordinate");
        }
        std::vector<MarkSpacePtr> spaces;
        for (const auto& c : comps) spaces.push_back(space_from(c, where));
        file.merged = MergedTrajectory{std::move(traj), std::move(spaces)};
    }
    return file;
}

void write_compensator(std::ostream& out, const Compensator& comp)
{
    json parts = json::array();
    for (const auto& part : comp.parts()) {
        json bp = json::array();
        const auto starts = part.continuous.starts();
        const auto values = part.continuous.values();
        for (std::size_t k = 0; k < starts.size(); ++k) bp.push_back({starts[k], values[k]});
        json atoms = json::array();
        for (const auto& a : part.atoms) atoms.push_back({a.time, a.mass});
        const auto slopes = part.continuous.slopes();
        parts.push_back({{"breakpoints", bp}, {"slopes", std::vector<double>(slopes.begin(), slopes.end())}, {"atoms", atoms}});
    }
    json doc = {{"schema", "mpplab.compensator"},
                {"version", kFormatVersion},
                {"horizon", comp.horizon()},
                {"marks", space_json(comp.mark_space())},
                {"parts", parts}};
    out << doc.dump() << '\n';
}

Compensator read_compensator(std::istream& in)
{
    const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    const json doc = detail::parse_document(text, "compensator");
    check_header(doc, "mpplab.compensator", "compensator");
    auto space = space_from(doc.value("marks", json()), "compensator");
    const double horizon = detail::number(detail::field(doc, "horizon", "compensator"), "compensator.horizon");
    const auto& parts_json = detail::field(doc, "parts", "compensator");
    if (!parts_json.is_array()) throw std::invalid_argument("compensator.parts: expected an array");
    std::vector<Compensator::MarkPart> parts;
    for (std::size_t m = 0; m < parts_json.size(); ++m) {
        const auto path = "compensator.parts[" + std::to_string(m) + "]";
        const auto& p = parts_json[m];
        std::vector<std::pair<double, double>> bp;
        for (const auto& x : detail::field(p, "breakpoints", path)) bp.emplace_back(x.at(0).get<double>(), x.at(1).get<double>());
        Compensator::MarkPart part;
        if (p.contains("slopes")) {
            const auto slopes = p["slopes"].get<std::vector<double>>();
            if (slopes.size() != bp.size()) throw std::invalid_argument(path + ": one slope per breakpoint required");
            std::vector<CumulativeCurve::Piece> pieces;
            for (std::size_t k = 0; k < bp.size(); ++k) pieces.push_back({bp[k].first, slopes[k]});
            part.continuous = CumulativeCurve::from_slopes(std::move(pieces));
        } else {
            part.continuous = CumulativeCurve::from_breakpoints(bp);
        }
        for (const auto& a : p.value("atoms", json::array())) part.atoms.push_back({a.at(0).get<double>(), a.at(1).get<double>()});
        parts.push_back(std::move(part));
    }
    return Compensator(std::move(space), std::move(parts), horizon);
}

void write_path_csv(std::ostream& out, const PiecewisePath& path)
{
    std::set<double> times{0.0, path.horizon()};
    for (const auto& p : path.drift()) times.insert(p.start);
    for (const auto& j : path.jumps()) times.insert(j.time);
    out << "time,value,jump\n";
    for (double t : times) {
        out << format_double(t) << ',' << format_double(path.value(t)) << ',' << format_double(path.jump_at(t)) << '\n';
    }
}

void write_path_json(std::ostream& out, const PiecewisePath& path)
{
    json drift = json::array();
    for (const auto& p : path.drift()) {
        json row = {p.start};
        for (double c : p.rate) row.push_back(c);
        drift.push_back(row);
    }
    json jumps = json::array();
    for (const auto& j : path.jumps()) jumps.push_back({j.time, j.size});
    json doc = {{"schema", "mpplab.path"},
                {"version", kFormatVersion},
                {"horizon", path.horizon()},
                {"initial", path.initial()},
                {"drift", drift},
                {"jumps", jumps}};
    out << doc.dump() << '\n';
}

PiecewisePath read_path_json(std::istream& in)
{
    const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    const json doc = detail::parse_document(text, "path");
    check_header(doc, "mpplab.path", "path");
    std::vector<DriftPiece> drift;
    for (const auto& row : doc.at("drift")) {
        DriftPiece p;
        p.start = row.at(0).get<double>();
        for (std::size_t i = 0; i < p.rate.size(); ++i) p.rate[i] = row.at(i + 1).get<double>();
        drift.push_back(p);
    }
    std::vector<Jump> jumps;
    for (const auto& j : doc.at("jumps")) jumps.push_back({j.at(0).get<double>(), j.at(1).get<double>()});
    return PiecewisePath(doc.at("initial").get<double>(), std::move(drift), std::move(jumps), doc.at("horizon").get<double>());
}

} // namespace mpplab
