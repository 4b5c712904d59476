#pragma once

// Geometric and timing binding of proactive events to motion primitives.
// Scenario files (`.scn`) are JSON; see docs/formats.md.

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "hazsynth/efa.hpp"
#include "hazsynth/risk.hpp"

namespace hazsynth {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    bool operator==(const Vec2&) const = default;
};

double distance(Vec2 a, Vec2 b) noexcept;

struct Region {
    enum class Shape { Disc, Polygon };

    Shape shape = Shape::Disc;
    Vec2 center;
    double radius = 0.0;
    std::vector<Vec2> polygon;  // convex, either winding

    bool contains(Vec2 p) const noexcept;
    bool degenerate() const noexcept;
};

struct Area {
    std::string name;
    Region region;
    Vec2 stand;  // where the human stands
    Vec2 work;   // where the hands go when handling or pressing
};

enum class RobotMode { Idle, Working, Override, Stopping, Stopped };

const char* to_string(RobotMode m) noexcept;

enum class PrimitiveKind { Walk, Pick, Place, Retract, Press };

struct Binding {
    PrimitiveKind kind = PrimitiveKind::Walk;
    std::vector<std::string> areas;  // walk: two endpoints; pick/place: one area
    std::string panel;               // press: panel area
    std::string home;                // press: area the human presses from and returns to
    RobotMode command = RobotMode::Idle;  // press: resulting robot mode
};

struct HumanParams {
    double walk_speed_min = 0.8;  // m/s
    double walk_speed_max = 2.0;  // m/s
    double reach_speed = 1.0;     // m/s, hand motion
    double handling_duration = 1.5;  // s
    double button_duration = 0.5;    // s
    double jitter = 0.05;            // m, uniform +- per waypoint coordinate
    std::string start_area = "A";
};

struct RobotParams {
    double nominal_speed = 500.0;     // mm/s
    double detection_latency = 0.1;   // s
    double braking_time = 0.3;        // s, linear ramp to standstill
    std::vector<Vec2> working_path;   // closed loop the TCP follows in working mode
    std::vector<Vec2> override_path;  // loop in override mode; empty = working_path
};

struct SafetyParams {
    std::string laser_zone = "E";
    std::string workspace = "W";
    bool override_disables_stop = true;
};

struct Scenario {
    std::string name;
    std::map<std::string, Area, std::less<>> areas;
    HumanParams human;
    RobotParams robot;
    SafetyParams safety;
    RiskParams risk;
    std::string part_start = "B";  // area holding the part initially
    std::map<std::string, int, std::less<>> part_codes;  // area -> value of P when the part lies there
    int hands_code = 1;                                   // value of P while the part is carried
    std::map<std::string, Binding, std::less<>> bindings;  // proactive event -> primitive
    double time_step = 0.05;  // s
    double timeout = 120.0;   // s

    const Area& area(std::string_view name) const;  // throws ConfigError
};

/// Checks internal consistency (positive timings, known areas, non-degenerate regions) and,
/// when `proactive` is given, that each listed event has exactly one binding.
void validate_scenario(const Scenario& s, const std::vector<EventDecl>* proactive = nullptr);

RiskParams risk_params_from_json(const nlohmann::json& j, RiskParams defaults = {});
nlohmann::json risk_params_to_json(const RiskParams& p);

Scenario scenario_from_json(const nlohmann::json& j);
nlohmann::json scenario_to_json(const Scenario& s);
Scenario load_scenario_file(const std::filesystem::path& path);

/// The bundled scenario-A layout: areas A-E around a robot station, workspace W.
Scenario scenario_a_defaults();

}  // namespace hazsynth
