#include "hazsynth/scenario.hpp"

#include <cmath>
#include <fstream>
#include <set>

#include <nlohmann/json.hpp>

#include "hazsynth/error.hpp"

namespace hazsynth {

using nlohmann::json;

double distance(Vec2 a, Vec2 b) noexcept { return std::hypot(a.x - b.x, a.y - b.y); }

namespace {

double cross(Vec2 o, Vec2 a, Vec2 b) { return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x); }

double polygon_area(const std::vector<Vec2>& p) {
    double acc = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        const auto& a = p[i];
        const auto& b = p[(i + 1) % p.size()];
        acc += a.x * b.y - b.x * a.y;
    }
    return acc / 2.0;
}

Vec2 centroid(const Region& r) {
    if (r.shape == Region::Shape::Disc || r.polygon.empty()) return r.center;
    Vec2 c;
    for (auto v : r.polygon) {
        c.x += v.x;
        c.y += v.y;
    }
    c.x /= static_cast<double>(r.polygon.size());
    c.y /= static_cast<double>(r.polygon.size());
    return c;
}

}  // namespace

bool Region::contains(Vec2 p) const noexcept {
    if (shape == Shape::Disc) return distance(p, center) <= radius;
    if (polygon.size() < 3) return false;
    bool pos = false, neg = false;
    for (std::size_t i = 0; i < polygon.size(); ++i) {
        double c = cross(polygon[i], polygon[(i + 1) % polygon.size()], p);
        if (c > 0) pos = true;
        if (c < 0) neg = true;
        if (pos && neg) return false;
    }
    return true;
}

bool Region::degenerate() const noexcept {
    if (shape == Shape::Disc) return !(radius > 0.0) || !std::isfinite(radius);
    return polygon.size() < 3 || std::abs(polygon_area(polygon)) < 1e-12;
}

const char* to_string(RobotMode m) noexcept {
    switch (m) {
        case RobotMode::Idle: return "idle";
        case RobotMode::Working: return "working";
        case RobotMode::Override: return "override";
        case RobotMode::Stopping: return "stopping";
        case RobotMode::Stopped: return "stopped";
    }
    return "?";
}

const Area& Scenario::area(std::string_view n) const {
    auto it = areas.find(n);
    if (it == areas.end()) throw ConfigError("scenario: unknown area '" + std::string(n) + "'");
    return it->second;
}

void validate_scenario(const Scenario& s, const std::vector<EventDecl>* proactive) {
    auto require_area = [&](const std::string& n, const std::string& ctx) {
        if (!s.areas.count(n)) throw ConfigError("scenario: " + ctx + " references unknown area '" + n + "'");
    };
    for (const auto& [n, a] : s.areas)
        if (a.region.degenerate()) throw ConfigError("scenario: area '" + n + "' is degenerate");

    const auto& h = s.human;
    if (!(h.walk_speed_min > 0.0) || h.walk_speed_max < h.walk_speed_min)
        throw ConfigError("scenario: walk speed range must be positive and ordered");
    if (!(h.reach_speed > 0.0) || !(h.handling_duration > 0.0) || !(h.button_duration > 0.0))
        throw ConfigError("scenario: human speeds and durations must be positive");
    if (h.jitter < 0.0) throw ConfigError("scenario: jitter must be non-negative");
    require_area(h.start_area, "human start");

    const auto& r = s.robot;
    if (!(r.nominal_speed > 0.0)) throw ConfigError("scenario: robot speed must be positive");
    if (r.detection_latency < 0.0 || r.braking_time < 0.0)
        throw ConfigError("scenario: latency and braking time must be non-negative");
    if (r.working_path.empty()) throw ConfigError("scenario: robot working path is empty");

    require_area(s.safety.laser_zone, "laser zone");
    require_area(s.safety.workspace, "workspace");
    require_area(s.part_start, "part start");
    for (const auto& [n, code] : s.part_codes) {
        require_area(n, "part code");
        if (code == s.hands_code) throw ConfigError("scenario: part code of '" + n + "' equals the hands code");
    }
    if (!(s.time_step > 0.0) || !(s.timeout > 0.0))
        throw ConfigError("scenario: time step and timeout must be positive");
    validate(s.risk);

    for (const auto& [ev, b] : s.bindings) {
        const std::string ctx = "binding of '" + ev + "'";
        switch (b.kind) {
            case PrimitiveKind::Walk:
                if (b.areas.size() != 2) throw ConfigError("scenario: " + ctx + " needs two areas");
                break;
            case PrimitiveKind::Pick:
            case PrimitiveKind::Place:
                if (b.areas.size() != 1) throw ConfigError("scenario: " + ctx + " needs one area");
                break;
            case PrimitiveKind::Retract:
                if (b.home.empty()) throw ConfigError("scenario: " + ctx + " needs a home area");
                require_area(b.home, ctx);
                break;
            case PrimitiveKind::Press:
                if (b.panel.empty()) throw ConfigError("scenario: " + ctx + " needs a panel area");
                require_area(b.panel, ctx);
                if (b.command != RobotMode::Idle && b.command != RobotMode::Working &&
                    b.command != RobotMode::Override)
                    throw ConfigError("scenario: " + ctx + " commands an invalid mode");
                break;
        }
        for (const auto& a : b.areas) require_area(a, ctx);
    }

    if (proactive) {
        for (const auto& e : *proactive)
            if (e.proactive && !s.bindings.count(e.name))
                throw ConfigError("scenario: proactive event '" + e.name + "' has no binding");
    }
}

namespace {

Vec2 vec_from(const json& j) {
    if (!j.is_array() || j.size() != 2) throw ConfigError("scenario: expected [x, y], got " + j.dump());
    return {j[0].get<double>(), j[1].get<double>()};
}

json vec_to(Vec2 v) { return json::array({v.x, v.y}); }

std::vector<Vec2> path_from(const json& j) {
    std::vector<Vec2> out;
    for (const auto& p : j) out.push_back(vec_from(p));
    return out;
}

json path_to(const std::vector<Vec2>& p) {
    json out = json::array();
    for (auto v : p) out.push_back(vec_to(v));
    return out;
}

RobotMode mode_from(const std::string& s) {
    if (s == "idle") return RobotMode::Idle;
    if (s == "working") return RobotMode::Working;
    if (s == "override") return RobotMode::Override;
    throw ConfigError("scenario: unknown robot mode '" + s + "'");
}

PrimitiveKind primitive_from(const std::string& s) {
    if (s == "walk") return PrimitiveKind::Walk;
    if (s == "pick") return PrimitiveKind::Pick;
    if (s == "place") return PrimitiveKind::Place;
    if (s == "retract") return PrimitiveKind::Retract;
    if (s == "press") return PrimitiveKind::Press;
    throw ConfigError("scenario: unknown primitive '" + s + "'");
}

const char* primitive_name(PrimitiveKind k) {
    switch (k) {
        case PrimitiveKind::Walk: return "walk";
        case PrimitiveKind::Pick: return "pick";
        case PrimitiveKind::Place: return "place";
        case PrimitiveKind::Retract: return "retract";
        case PrimitiveKind::Press: return "press";
    }
    return "?";
}

Area area_from(const std::string& name, const json& j) {
    Area a;
    a.name = name;
    const auto shape = j.value("shape", std::string("disc"));
    if (shape == "disc") {
        a.region.shape = Region::Shape::Disc;
        a.region.center = vec_from(j.at("center"));
        a.region.radius = j.at("radius").get<double>();
    } else if (shape == "polygon") {
        a.region.shape = Region::Shape::Polygon;
        a.region.polygon = path_from(j.at("vertices"));
    } else {
        throw ConfigError("scenario: area '" + name + "' has unknown shape '" + shape + "'");
    }
    const Vec2 c = centroid(a.region);
    if (a.region.shape == Region::Shape::Polygon) a.region.center = c;
    a.stand = j.contains("stand") ? vec_from(j["stand"]) : c;
    a.work = j.contains("work") ? vec_from(j["work"]) : c;
    return a;
}

json area_to(const Area& a) {
    json j;
    if (a.region.shape == Region::Shape::Disc) {
        j["shape"] = "disc";
        j["center"] = vec_to(a.region.center);
        j["radius"] = a.region.radius;
    } else {
        j["shape"] = "polygon";
        j["vertices"] = path_to(a.region.polygon);
    }
    j["stand"] = vec_to(a.stand);
    j["work"] = vec_to(a.work);
    return j;
}

Binding binding_from(const json& j) {
    Binding b;
    b.kind = primitive_from(j.at("primitive").get<std::string>());
    if (j.contains("areas")) b.areas = j["areas"].get<std::vector<std::string>>();
    if (j.contains("area")) b.areas.push_back(j["area"].get<std::string>());
    b.panel = j.value("panel", std::string());
    b.home = j.value("home", std::string());
    if (j.contains("mode")) b.command = mode_from(j["mode"].get<std::string>());
    return b;
}

json binding_to(const Binding& b) {
    json j;
    j["primitive"] = primitive_name(b.kind);
    if (!b.areas.empty()) j["areas"] = b.areas;
    if (!b.panel.empty()) j["panel"] = b.panel;
    if (!b.home.empty()) j["home"] = b.home;
    if (b.kind == PrimitiveKind::Press) j["mode"] = to_string(b.command);
    return j;
}

}  // namespace

RiskParams risk_params_from_json(const json& j, RiskParams p) {
    p.v_crit = j.value("v_crit", p.v_crit);
    p.f_max = j.value("f_max", p.f_max);
    p.stiffness = j.value("stiffness", p.stiffness);
    p.robot_mass = j.value("robot_mass", p.robot_mass);
    p.human_mass = j.value("human_mass", p.human_mass);
    p.distance_scale = j.value("distance_scale", p.distance_scale);
    p.contact_distance = j.value("contact_distance", p.contact_distance);
    return p;
}

json risk_params_to_json(const RiskParams& p) {
    json j;
    j["v_crit"] = p.v_crit;
    j["f_max"] = p.f_max;
    j["stiffness"] = p.stiffness;
    j["robot_mass"] = p.robot_mass;
    j["human_mass"] = p.human_mass;
    j["distance_scale"] = p.distance_scale;
    j["contact_distance"] = p.contact_distance;
    return j;
}

Scenario scenario_from_json(const json& j) {
    try {
        Scenario s;
        s.name = j.value("name", std::string("scenario"));
        s.time_step = j.value("time_step", s.time_step);
        s.timeout = j.value("timeout", s.timeout);
        for (const auto& [n, a] : j.at("areas").items()) s.areas.emplace(n, area_from(n, a));

        if (j.contains("human")) {
            const auto& h = j["human"];
            auto& o = s.human;
            o.walk_speed_min = h.value("walk_speed_min", o.walk_speed_min);
            o.walk_speed_max = h.value("walk_speed_max", o.walk_speed_max);
            o.reach_speed = h.value("reach_speed", o.reach_speed);
            o.handling_duration = h.value("handling_duration", o.handling_duration);
            o.button_duration = h.value("button_duration", o.button_duration);
            o.jitter = h.value("jitter", o.jitter);
            o.start_area = h.value("start_area", o.start_area);
        }
        if (j.contains("robot")) {
            const auto& r = j["robot"];
            auto& o = s.robot;
            o.nominal_speed = r.value("nominal_speed", o.nominal_speed);
            o.detection_latency = r.value("detection_latency", o.detection_latency);
            o.braking_time = r.value("braking_time", o.braking_time);
            if (r.contains("working_path")) o.working_path = path_from(r["working_path"]);
            if (r.contains("override_path")) o.override_path = path_from(r["override_path"]);
        }
        if (j.contains("safety")) {
            const auto& f = j["safety"];
            s.safety.laser_zone = f.value("laser_zone", s.safety.laser_zone);
            s.safety.workspace = f.value("workspace", s.safety.workspace);
            s.safety.override_disables_stop = f.value("override_disables_stop", s.safety.override_disables_stop);
        }
        if (j.contains("risk")) s.risk = risk_params_from_json(j["risk"], s.risk);
        if (j.contains("part")) {
            const auto& p = j["part"];
            s.part_start = p.value("start", s.part_start);
            s.hands_code = p.value("hands_code", s.hands_code);
            if (p.contains("codes")) s.part_codes = p["codes"].get<std::map<std::string, int, std::less<>>>();
        }
        for (const auto& [ev, b] : j.at("bindings").items()) s.bindings.emplace(ev, binding_from(b));
        validate_scenario(s);
        return s;
    } catch (const json::exception& e) {
        throw ConfigError(std::string("scenario: ") + e.what());
    }
}

json scenario_to_json(const Scenario& s) {
    json j;
    j["name"] = s.name;
    j["time_step"] = s.time_step;
    j["timeout"] = s.timeout;
    j["areas"] = json::object();
    for (const auto& [n, a] : s.areas) j["areas"][n] = area_to(a);
    j["human"] = {{"walk_speed_min", s.human.walk_speed_min},
                  {"walk_speed_max", s.human.walk_speed_max},
                  {"reach_speed", s.human.reach_speed},
                  {"handling_duration", s.human.handling_duration},
                  {"button_duration", s.human.button_duration},
                  {"jitter", s.human.jitter},
                  {"start_area", s.human.start_area}};
    j["robot"] = {{"nominal_speed", s.robot.nominal_speed},
                  {"detection_latency", s.robot.detection_latency},
                  {"braking_time", s.robot.braking_time},
                  {"working_path", path_to(s.robot.working_path)}};
    if (!s.robot.override_path.empty()) j["robot"]["override_path"] = path_to(s.robot.override_path);
    j["safety"] = {{"laser_zone", s.safety.laser_zone},
                   {"workspace", s.safety.workspace},
                   {"override_disables_stop", s.safety.override_disables_stop}};
    j["risk"] = risk_params_to_json(s.risk);
    j["part"] = {{"start", s.part_start}, {"hands_code", s.hands_code}, {"codes", s.part_codes}};
    j["bindings"] = json::object();
    for (const auto& [ev, b] : s.bindings) j["bindings"][ev] = binding_to(b);
    return j;
}

Scenario load_scenario_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open scenario file '" + path.string() + "'");
    json j;
    try {
        j = json::parse(in, nullptr, true, true);
    } catch (const json::parse_error& e) {
        throw ConfigError("scenario file '" + path.string() + "': " + e.what());
    }
    return scenario_from_json(j);
}

Scenario scenario_a_defaults() {
    Scenario s;
    s.name = "scenario_a";
    auto disc = [](std::string n, Vec2 c, double r, Vec2 stand, Vec2 work) {
        Area a;
        a.name = std::move(n);
        a.region.shape = Region::Shape::Disc;
        a.region.center = c;
        a.region.radius = r;
        a.stand = stand;
        a.work = work;
        return a;
    };
    for (auto a : {disc("A", {0, 0}, 0.5, {0, 0}, {0, 0}),
                   disc("B", {-3, 0}, 0.6, {-2.6, 0}, {-3, 0}),
                   disc("C", {3, 0}, 1.0, {2.1, 0}, {3, 0}),
                   disc("D", {0, -1}, 0.3, {0, -0.7}, {0, -1}),
                   disc("E", {3.5, 0}, 1.5, {3.5, 0}, {3.5, 0}),
                   disc("W", {3, 0}, 0.8, {3, 0}, {3, 0})})
        s.areas.emplace(a.name, a);
    s.robot.working_path = {{3, -0.3}, {3, 0.3}};
    s.part_codes = {{"B", 0}, {"C", 2}};

    auto walk = [](std::string a, std::string b) {
        Binding x;
        x.kind = PrimitiveKind::Walk;
        x.areas = {std::move(a), std::move(b)};
        return x;
    };
    auto at = [](PrimitiveKind k, std::string a) {
        Binding x;
        x.kind = k;
        x.areas = {std::move(a)};
        return x;
    };
    auto press = [](RobotMode m) {
        Binding x;
        x.kind = PrimitiveKind::Press;
        x.panel = "D";
        x.home = "A";
        x.command = m;
        return x;
    };
    Binding retract;
    retract.kind = PrimitiveKind::Retract;
    retract.home = "A";

    s.bindings = {{"t1", walk("A", "B")},
                  {"t2", walk("A", "C")},
                  {"u_S", at(PrimitiveKind::Pick, "B")},
                  {"d_S", at(PrimitiveKind::Place, "B")},
                  {"u_R", at(PrimitiveKind::Pick, "C")},
                  {"d_R", at(PrimitiveKind::Place, "C")},
                  {"r", retract},
                  {"b0", press(RobotMode::Idle)},
                  {"b1", press(RobotMode::Working)},
                  {"b2", press(RobotMode::Override)}};
    return s;
}

}  // namespace hazsynth
