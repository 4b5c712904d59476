#pragma once

namespace hazsynth {

struct RiskParams {
    double v_crit = 250.0;         // mm/s
    double f_max = 140.0;          // N, permissible transient contact force
    double stiffness = 75'000.0;   // N/m, effective spring constant of the body region
    double robot_mass = 30.0;      // kg, effective moving mass
    double human_mass = 4.4;       // kg, effective body-region mass (hand/arm)
    double distance_scale = 1.0;   // multiplies d_HR (metres) inside the exponential
    double contact_distance = 0.1; // m; closer than this counts as contact

    bool operator==(const RiskParams&) const = default;
};

/// Piecewise risk score. Below v_crit the score is 0; above it, e^(-d) when apart and
/// F_c / F_max + 1 on contact. Throws ConfigError on negative inputs or contact with d > 0.
double risk(double d_hr, double v_r, bool contact, double f_c, const RiskParams& p);

/// Transient two-mass contact force: v_R (converted to m/s) * sqrt(k * mu) with
/// mu = m_R m_H / (m_R + m_H).
double contact_force(double v_r, const RiskParams& p);

/// Rejects non-positive masses, stiffness, force limit, and negative thresholds.
void validate(const RiskParams& p);

}  // namespace hazsynth
