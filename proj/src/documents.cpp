#include "rootcross/documents.hpp"

#include <cmath>

namespace rootcross {

namespace {

const json& require(const json& j, const char* key)
{
    if (!j.is_object() || !j.contains(key))
        throw DocumentError(std::string("missing field '") + key + "'");
    return j.at(key);
}

double number(const json& j, const char* what)
{
    if (!j.is_number())
        throw DocumentError(std::string(what) + " must be a number");
    return j.get<double>();
}

CrossingKind kind_from_string(const std::string& s)
{
    if (s == "up") return CrossingKind::Up;
    if (s == "down") return CrossingKind::Down;
    if (s == "tangent") return CrossingKind::Tangent;
    throw DocumentError("unknown crossing kind '" + s + "'");
}

Heading heading_from_string(const std::string& s)
{
    if (s == "rightward") return Heading::Rightward;
    if (s == "leftward") return Heading::Leftward;
    throw DocumentError("unknown heading '" + s + "'");
}

SolveMode mode_from_string(const std::string& s)
{
    if (s == "parallel") return SolveMode::Parallel;
    if (s == "deflation") return SolveMode::Deflation;
    throw DocumentError("unknown mode '" + s + "'");
}

}  // namespace

json complex_to_json(Complex z)
{
    return json::array({z.real(), z.imag()});
}

Complex complex_from_json(const json& j)
{
    if (!j.is_array() || j.size() != 2)
        throw DocumentError("complex values are [re, im] pairs");
    return {number(j[0], "real part"), number(j[1], "imaginary part")};
}

PolynomialDocument parse_polynomial_document(const json& j)
{
    PolynomialDocument doc;
    const json* coeffs = &j;
    if (j.is_object()) {
        coeffs = &require(j, "coeffs");
        if (j.contains("label")) {
            if (!j["label"].is_string())
                throw DocumentError("label must be a string");
            doc.label = j["label"].get<std::string>();
        }
    }
    if (!coeffs->is_array() || coeffs->empty())
        throw DocumentError("coeffs must be a nonempty list of [re, im] pairs");
    for (const json& c : *coeffs)
        doc.coeffs.push_back(complex_from_json(c));
    return doc;
}

json to_json(const PolynomialDocument& doc)
{
    json c = json::array();
    for (const Complex& a : doc.coeffs)
        c.push_back(complex_to_json(a));
    json j{{"coeffs", c}};
    if (!doc.label.empty())
        j["label"] = doc.label;
    return j;
}

json to_json(const Crossing& c)
{
    return {{"r", c.r}, {"theta", c.theta}, {"x", c.x}, {"kind", to_string(c.kind)}};
}

Crossing crossing_from_json(const json& j)
{
    return Crossing{number(require(j, "r"), "r"), number(require(j, "theta"), "theta"),
                    number(require(j, "x"), "x"), kind_from_string(require(j, "kind").get<std::string>())};
}

json to_json(const TrackEvent& e)
{
    return std::visit(
        [](const auto& ev) -> json {
            using T = std::decay_t<decltype(ev)>;
            if constexpr (std::is_same_v<T, RootFound>)
                return {{"kind", "RootFound"},
                        {"root", complex_to_json(ev.root)},
                        {"located", complex_to_json(ev.located)},
                        {"residual", ev.residual}};
            else if constexpr (std::is_same_v<T, CriticalPointHit>)
                return {{"kind", "CriticalPoint"}, {"location", complex_to_json(ev.location)}};
            else if constexpr (std::is_same_v<T, BoundaryReached>)
                return {{"kind", "BoundaryReached"}, {"r_limit", ev.r_limit}};
            else
                return {{"kind", "StepLimit"}, {"steps", ev.steps}};
        },
        e);
}

TrackEvent event_from_json(const json& j)
{
    const std::string kind = require(j, "kind").get<std::string>();
    if (kind == "RootFound")
        return RootFound{complex_from_json(require(j, "root")), complex_from_json(require(j, "located")),
                         number(require(j, "residual"), "residual")};
    if (kind == "CriticalPoint")
        return CriticalPointHit{complex_from_json(require(j, "location"))};
    if (kind == "BoundaryReached")
        return BoundaryReached{number(require(j, "r_limit"), "r_limit")};
    if (kind == "StepLimit")
        return StepLimit{require(j, "steps").get<int>()};
    throw DocumentError("unknown event kind '" + kind + "'");
}

json to_json(const SolverReport& rep)
{
    json roots = json::array();
    for (const RootEntry& e : rep.roots)
        roots.push_back({{"root", complex_to_json(e.root)}, {"residual", e.residual}, {"multiplicity", e.multiplicity}});
    json tracks = json::array();
    for (const TrackRecord& t : rep.tracks)
        tracks.push_back({{"start", to_json(t.start)},
                          {"heading", to_string(t.heading)},
                          {"steps", t.steps},
                          {"event", to_json(t.event)}});
    return {{"version", kDocumentVersion},
            {"mode", to_string(rep.mode)},
            {"degree", rep.degree},
            {"complete", rep.complete},
            {"fallback_used", rep.fallback_used},
            {"roots", roots},
            {"tracks", tracks},
            {"vieta", {{"sum_error", rep.vieta.sum_error}, {"product_error", rep.vieta.product_error}}}};
}

SolverReport report_from_json(const json& j)
{
    try {
        if (require(j, "version").get<int>() != kDocumentVersion)
            throw DocumentError("unsupported report version");
        SolverReport rep;
        rep.mode = mode_from_string(require(j, "mode").get<std::string>());
        rep.degree = require(j, "degree").get<int>();
        rep.complete = require(j, "complete").get<bool>();
        rep.fallback_used = require(j, "fallback_used").get<bool>();
        for (const json& e : require(j, "roots"))
            rep.roots.push_back(RootEntry{complex_from_json(require(e, "root")), number(require(e, "residual"), "residual"),
                                          require(e, "multiplicity").get<int>()});
        for (const json& t : require(j, "tracks"))
            rep.tracks.push_back(TrackRecord{crossing_from_json(require(t, "start")),
                                             heading_from_string(require(t, "heading").get<std::string>()),
                                             event_from_json(require(t, "event")), require(t, "steps").get<int>()});
        const json& v = require(j, "vieta");
        rep.vieta = VietaCheck{number(require(v, "sum_error"), "sum_error"),
                               number(require(v, "product_error"), "product_error")};
        return rep;
    } catch (const json::exception& e) {
        throw DocumentError(e.what());
    }
}

json to_json(const SingleRoot& s)
{
    json failed = json::array();
    for (const TrackEvent& e : s.failed)
        failed.push_back(to_json(e));
    return {{"version", kDocumentVersion},
            {"mode", "single"},
            {"root", complex_to_json(s.root)},
            {"residual", s.residual},
            {"rotations", s.rotations},
            {"nu", s.nu},
            {"failed_attempts", failed},
            {"steps", s.trajectory.states.size()}};
}

TrackerOptions tracker_options_from_json(const json& j, TrackerOptions base)
{
    if (j.is_null())
        return base;
    if (!j.is_object())
        throw DocumentError("options must be an object");
    auto real = [&](const char* key, double& field) {
        if (j.contains(key))
            field = number(j[key], key);
    };
    auto integer = [&](const char* key, int& field) {
        if (j.contains(key)) {
            if (!j[key].is_number_integer())
                throw DocumentError(std::string(key) + " must be an integer");
            field = j[key].get<int>();
        }
    };
    real("c", base.c);
    real("hysteresis", base.hysteresis);
    real("initial_step", base.initial_step);
    real("min_step", base.min_step);
    real("max_step", base.max_step);
    real("rtol", base.rtol);
    real("atol", base.atol);
    integer("max_steps", base.max_steps);
    real("root_tol", base.root_tol);
    real("residual_tol", base.residual_tol);
    real("critical_tol", base.critical_tol);
    real("r_min", base.r_min);
    real("r_max_factor", base.r_max_factor);
    real("nu", base.nu);
    integer("max_rotations", base.max_rotations);
    return base;
}

json curve_document(const Polynomial& p, double r, int samples)
{
    json points = json::array();
    for (const Complex& z : sample_curve(p, r, samples))
        points.push_back(complex_to_json(z));
    json crossings = json::array();
    for (const Crossing& c : find_crossings(p, r, std::max(samples, default_crossing_samples(p))))
        crossings.push_back(to_json(c));
    return {{"version", kDocumentVersion}, {"r", r}, {"points", points}, {"crossings", crossings}};
}

json state_record(const Polynomial& p, const TrackState& s, std::size_t index)
{
    return {{"type", "state"},
            {"index", index},
            {"r", s.r},
            {"theta", s.theta},
            {"x", s.x},
            {"param", to_string(s.param)},
            {"abs_f", std::abs(p.eval(s.point()))}};
}

json event_record(const TrackEvent& e)
{
    json j = to_json(e);
    j["type"] = "event";
    return j;
}

void write_trajectory_records(std::ostream& out, const Polynomial& p, const Trajectory& t, int track_id)
{
    for (std::size_t i = 0; i < t.states.size(); ++i) {
        json rec = state_record(p, t.states[i], i);
        if (track_id >= 0)
            rec["track"] = track_id;
        out << rec.dump() << '\n';
    }
    json ev = event_record(t.event);
    if (track_id >= 0)
        ev["track"] = track_id;
    out << ev.dump() << '\n';
}

}  // namespace rootcross
