#include "hazsynth/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <ostream>
#include <set>

#include <nlohmann/json.hpp>

#include "hazsynth/error.hpp"
#include "hazsynth/rng.hpp"

namespace hazsynth {

const char* to_string(TerminalCause c) noexcept {
    switch (c) {
        case TerminalCause::SequenceExhausted: return "sequence_exhausted";
        case TerminalCause::Contact: return "contact";
        case TerminalCause::Timeout: return "timeout";
        case TerminalCause::Infeasible: return "infeasible";
    }
    return "?";
}

const char* to_string(Safety s) noexcept { return s == Safety::Safe ? "safe" : "unsafe"; }

Safety classify_trace(const RiskTrace& trace, double threshold) noexcept {
    return trace.r_max >= threshold ? Safety::Unsafe : Safety::Safe;
}

namespace {

// Moves `p` toward `target` by at most `step`; returns the distance actually covered.
double advance_toward(Vec2& p, Vec2 target, double step) {
    const double d = distance(p, target);
    if (d <= step) {
        p = target;
        return d;
    }
    p.x += (target.x - p.x) * step / d;
    p.y += (target.y - p.y) * step / d;
    return step;
}

struct Action {
    enum class Kind { MoveBody, MoveHand, RetractHand, Hold, SetMode, SetPart, SetArea };
    Kind kind;
    Vec2 target{};
    double amount = 0.0;  // speed (m/s) for moves, remaining time (s) for holds
    RobotMode mode = RobotMode::Idle;
    std::string name;  // area name for SetPart / SetArea; empty part = carried
};

class Episode {
public:
    Episode(const Scenario& sc, std::uint64_t seed, const SimOptions& opts)
        : sc_(sc), opts_(opts), rng_(seed) {
        for (const auto& [ev, b] : sc.bindings)
            if (b.kind == PrimitiveKind::Press) panels_.insert(b.panel);
        laser_ = &sc.area(sc.safety.laser_zone).region;
        workspace_ = &sc.area(sc.safety.workspace).region;
        trace_.walk_speed = rng_.uniform(sc.human.walk_speed_min, sc.human.walk_speed_max);
        const auto& start = sc.area(sc.human.start_area);
        st_.body = st_.hand = start.stand;
        st_.area = start.name;
        st_.part = sc.part_start;
        st_.p = part_code(st_.part);
        st_.tcp = sc.robot.working_path.front();
    }

    RiskTrace run(const std::vector<std::string>& events) {
        events_ = &events;
        update_flags();
        sample();
        const double dt = sc_.time_step;
        for (std::uint64_t step = 1;; ++step) {
            const double t = static_cast<double>(step) * dt;
            const bool more = advance_human(dt);
            if (aborted_) {
                trace_.cause = TerminalCause::Infeasible;
                break;
            }
            st_.time = t;
            update_flags();
            update_safety(t);
            advance_robot(dt, t);
            const auto& s = sample();
            if (s.contact && s.v_r >= sc_.risk.v_crit) {
                trace_.cause = TerminalCause::Contact;
                break;
            }
            if (!more) {
                trace_.cause = TerminalCause::SequenceExhausted;
                break;
            }
            if (t >= sc_.timeout - 1e-9) {
                trace_.cause = TerminalCause::Timeout;
                break;
            }
        }
        return std::move(trace_);
    }

private:
    int part_code(const std::string& where) const {
        if (where.empty()) return sc_.hands_code;
        auto it = sc_.part_codes.find(where);
        return it == sc_.part_codes.end() ? -1 : it->second;
    }

    Vec2 jitter(Vec2 p) {
        const double j = sc_.human.jitter;
        if (j <= 0.0) return p;
        p.x += rng_.uniform(-j, j);
        p.y += rng_.uniform(-j, j);
        return p;
    }

    void push(Action::Kind k, Vec2 target = {}, double amount = 0.0) {
        Action a{k, target, amount, RobotMode::Idle, {}};
        queue_.push_back(std::move(a));
    }
    void push_named(Action::Kind k, std::string name) {
        Action a{k, {}, 0.0, RobotMode::Idle, std::move(name)};
        queue_.push_back(std::move(a));
    }

    // Expands the binding of `ev` into actions; false if infeasible in the current state.
    bool start(const std::string& ev) {
        const Binding& b = sc_.bindings.find(ev)->second;
        const double walk = trace_.walk_speed, reach = sc_.human.reach_speed;
        const bool carrying = st_.part.empty();
        switch (b.kind) {
            case PrimitiveKind::Walk: {
                std::string dest;
                if (st_.area == b.areas[0]) dest = b.areas[1];
                else if (st_.area == b.areas[1]) dest = b.areas[0];
                else return false;
                if (st_.hand_extended) push(Action::Kind::RetractHand, {}, reach);
                push(Action::Kind::MoveBody, jitter(sc_.area(dest).stand), walk);
                push_named(Action::Kind::SetArea, dest);
                return true;
            }
            case PrimitiveKind::Pick:
            case PrimitiveKind::Place: {
                const auto& a = sc_.area(b.areas[0]);
                if (st_.area != a.name) return false;
                const bool pick = b.kind == PrimitiveKind::Pick;
                if (pick ? st_.part != a.name : !carrying) return false;
                push(Action::Kind::MoveHand, jitter(a.work), reach);
                push(Action::Kind::Hold, {}, sc_.human.handling_duration);
                push_named(Action::Kind::SetPart, pick ? std::string() : a.name);
                return true;
            }
            case PrimitiveKind::Retract: {
                if (st_.hand_extended) {
                    push(Action::Kind::RetractHand, {}, reach);
                    return true;
                }
                if (panels_.count(st_.area) && st_.area != b.home) {
                    push(Action::Kind::MoveBody, jitter(sc_.area(b.home).stand), walk);
                    push_named(Action::Kind::SetArea, b.home);
                    return true;
                }
                return false;
            }
            case PrimitiveKind::Press: {
                if (carrying) return false;
                const auto& panel = sc_.area(b.panel);
                if (st_.hand_extended) push(Action::Kind::RetractHand, {}, reach);
                if (st_.area != panel.name) {
                    push(Action::Kind::MoveBody, jitter(panel.stand), walk);
                    push_named(Action::Kind::SetArea, panel.name);
                }
                push(Action::Kind::MoveHand, jitter(panel.work), reach);
                push(Action::Kind::Hold, {}, sc_.human.button_duration);
                Action m{Action::Kind::SetMode, {}, 0.0, b.command, {}};
                queue_.push_back(std::move(m));
                push(Action::Kind::RetractHand, {}, reach);
                return true;
            }
        }
        return false;
    }

    // Runs the front action for at most `budget` seconds; returns the time used.
    double apply(Action& a, double budget) {
        switch (a.kind) {
            case Action::Kind::MoveBody: {
                const double used = advance_toward(st_.body, a.target, a.amount * budget) / a.amount;
                if (!st_.hand_extended) st_.hand = st_.body;
                return st_.body == a.target ? used : budget;
            }
            case Action::Kind::MoveHand: {
                st_.hand_extended = true;
                const double used = advance_toward(st_.hand, a.target, a.amount * budget) / a.amount;
                return st_.hand == a.target ? used : budget;
            }
            case Action::Kind::RetractHand: {
                const double used = advance_toward(st_.hand, st_.body, a.amount * budget) / a.amount;
                if (st_.hand == st_.body) {
                    st_.hand_extended = false;
                    return used;
                }
                return budget;
            }
            case Action::Kind::Hold: {
                const double used = std::min(a.amount, budget);
                a.amount -= used;
                return a.amount <= 1e-12 ? used : budget;
            }
            case Action::Kind::SetMode:
                set_mode(a.mode);
                return 0.0;
            case Action::Kind::SetPart:
                st_.part = a.name;
                st_.p = part_code(a.name);
                return 0.0;
            case Action::Kind::SetArea:
                st_.area = a.name;
                return 0.0;
        }
        return budget;
    }

    bool action_done(const Action& a) const {
        switch (a.kind) {
            case Action::Kind::MoveBody: return st_.body == a.target;
            case Action::Kind::MoveHand: return st_.hand == a.target;
            case Action::Kind::RetractHand: return !st_.hand_extended;
            case Action::Kind::Hold: return a.amount <= 1e-12;
            default: return true;
        }
    }

    // Advances the human by dt. Returns false once every event has completed.
    bool advance_human(double dt) {
        double remaining = dt;
        while (true) {
            if (queue_.empty()) {
                st_.primitive.clear();
                if (next_ >= events_->size()) return false;
                const auto& ev = (*events_)[next_++];
                if (!start(ev)) {
                    trace_.infeasible = true;
                    queue_.clear();
                    if (opts_.infeasible == InfeasiblePolicy::Abort) {
                        aborted_ = true;
                        return false;
                    }
                    trace_.skipped.push_back(ev);
                    continue;
                }
                st_.primitive = ev;
                trace_.executed.push_back(ev);
            }
            if (remaining <= 1e-12) return true;
            auto& a = queue_.front();
            remaining -= apply(a, remaining);
            if (action_done(a)) queue_.pop_front();
            else return true;
            if (queue_.empty() && next_ >= events_->size()) {
                st_.primitive.clear();
                return false;
            }
        }
    }

    void set_mode(RobotMode m) {
        mode_ = m;
        stop_pending_ = false;
        st_.mode = m;
        st_.v_r = (m == RobotMode::Working || m == RobotMode::Override) ? sc_.robot.nominal_speed : 0.0;
    }

    void update_flags() {
        st_.s = laser_->contains(st_.body) || laser_->contains(st_.hand);
        st_.w = workspace_->contains(st_.body) || workspace_->contains(st_.hand);
    }

    void update_safety(double t) {
        const bool guarded = mode_ == RobotMode::Working ||
                             (mode_ == RobotMode::Override && !sc_.safety.override_disables_stop);
        if (guarded && st_.s && !stop_pending_) {
            stop_pending_ = true;
            stop_begin_ = t + sc_.robot.detection_latency;
        }
    }

    // TCP speed at time t under the current mode and any pending stop.
    double speed_at(double t) {
        if (mode_ == RobotMode::Idle || mode_ == RobotMode::Stopped) return 0.0;
        const double v0 = sc_.robot.nominal_speed;
        if (!stop_pending_ || t < stop_begin_) return v0;
        const double brake = sc_.robot.braking_time;
        const double into = t - stop_begin_;
        if (brake <= 0.0 || into >= brake) {
            mode_ = RobotMode::Stopped;
            stop_pending_ = false;
            return 0.0;
        }
        mode_ = RobotMode::Stopping;
        return v0 * (1.0 - into / brake);
    }

    void advance_robot(double dt, double t) {
        const double v = speed_at(t);
        st_.v_r = v;
        st_.mode = mode_;
        const auto& path = (mode_ == RobotMode::Override && !sc_.robot.override_path.empty())
                               ? sc_.robot.override_path
                               : sc_.robot.working_path;
        if (v <= 0.0 || path.size() < 2) return;
        double step = v / 1000.0 * dt;
        for (int guard = 0; step > 1e-12 && guard < 1000; ++guard) {
            const Vec2 target = path[waypoint_ % path.size()];
            step -= advance_toward(st_.tcp, target, step);
            if (st_.tcp == target) waypoint_ = (waypoint_ + 1) % path.size();
        }
    }

    const RiskSample& sample() {
        RiskSample s;
        s.time = st_.time;
        double d = std::min(distance(st_.body, st_.tcp), distance(st_.hand, st_.tcp));
        st_.contact = d <= sc_.risk.contact_distance;
        if (st_.contact) d = 0.0;
        s.d_hr = d;
        s.v_r = st_.v_r;
        s.contact = st_.contact;
        s.f_c = st_.contact ? contact_force(st_.v_r, sc_.risk) : 0.0;
        s.r = risk(s.d_hr, s.v_r, s.contact, s.f_c, sc_.risk);
        s.s = st_.s;
        s.w = st_.w;
        s.p = st_.p;
        s.mode = st_.mode;
        trace_.r_max = std::max(trace_.r_max, s.r);
        last_ = s;
        if (opts_.record_samples) trace_.samples.push_back(s);
        return last_;
    }

    const Scenario& sc_;
    const SimOptions& opts_;
    Rng rng_;
    SimState st_;
    RobotMode mode_ = RobotMode::Idle;
    bool stop_pending_ = false;
    double stop_begin_ = 0.0;
    std::size_t waypoint_ = 1;
    const Region* laser_ = nullptr;
    const Region* workspace_ = nullptr;
    std::set<std::string> panels_;
    std::deque<Action> queue_;
    const std::vector<std::string>* events_ = nullptr;
    std::size_t next_ = 0;
    bool aborted_ = false;
    RiskSample last_;
    RiskTrace trace_;
};

}  // namespace

RiskTrace run_episode(const Scenario& scenario, const std::vector<std::string>& events,
                      std::uint64_t seed, const SimOptions& opts) {
    if (events.empty()) throw ConfigError("run_episode: empty event sequence");
    for (const auto& e : events)
        if (!scenario.bindings.count(e)) throw ConfigError("run_episode: event '" + e + "' has no binding");
    return Episode(scenario, seed, opts).run(events);
}

void write_trace_csv(std::ostream& os, const RiskTrace& trace) {
    os << "time,d_hr,v_r,contact,f_c,r,S,W,P,mode\n";
    const auto prec = os.precision(10);
    for (const auto& s : trace.samples)
        os << s.time << ',' << s.d_hr << ',' << s.v_r << ',' << (s.contact ? 1 : 0) << ',' << s.f_c << ','
           << s.r << ',' << (s.s ? 1 : 0) << ',' << (s.w ? 1 : 0) << ',' << s.p << ',' << to_string(s.mode)
           << '\n';
    os.precision(prec);
}

nlohmann::json trace_summary_json(const RiskTrace& trace) {
    nlohmann::ordered_json j;
    j["r_max"] = trace.r_max;
    j["cause"] = to_string(trace.cause);
    j["infeasible"] = trace.infeasible;
    j["steps"] = trace.samples.size();
    j["duration"] = trace.samples.empty() ? 0.0 : trace.samples.back().time;
    j["walk_speed"] = trace.walk_speed;
    j["executed"] = trace.executed;
    j["skipped"] = trace.skipped;
    return nlohmann::json(j);
}

}  // namespace hazsynth
