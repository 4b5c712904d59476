#include "hazsynth/risk.hpp"

#include <cmath>

#include "hazsynth/error.hpp"

namespace hazsynth {

double risk(double d_hr, double v_r, bool contact, double f_c, const RiskParams& p) {
    if (d_hr < 0.0 || v_r < 0.0 || f_c < 0.0) throw ConfigError("risk: negative input");
    if (contact && d_hr != 0.0) throw ConfigError("risk: contact requires zero distance");
    if (v_r < p.v_crit) return 0.0;
    if (!contact && d_hr > 0.0) return std::exp(-d_hr * p.distance_scale);
    return f_c / p.f_max + 1.0;
}

double contact_force(double v_r, const RiskParams& p) {
    if (v_r < 0.0) throw ConfigError("contact_force: negative speed");
    const double mu = p.robot_mass * p.human_mass / (p.robot_mass + p.human_mass);
    return (v_r / 1000.0) * std::sqrt(p.stiffness * mu);
}

void validate(const RiskParams& p) {
    if (!(p.robot_mass > 0.0) || !(p.human_mass > 0.0))
        throw ConfigError("risk parameters: masses must be positive");
    if (!(p.stiffness > 0.0)) throw ConfigError("risk parameters: stiffness must be positive");
    if (!(p.f_max > 0.0)) throw ConfigError("risk parameters: force limit must be positive");
    if (p.v_crit < 0.0 || p.distance_scale < 0.0 || p.contact_distance < 0.0)
        throw ConfigError("risk parameters: thresholds must be non-negative");
}

}  // namespace hazsynth
