#pragma once

// Random small model sets for property tests.

#include <cstdint>

#include "hazsynth/model_dsl.hpp"

namespace gen {

struct Limits {
    int max_efas = 3;       // including the specification
    int max_locations = 4;
    int max_vars = 2;
    int max_domain = 3;     // values per variable
    int events = 4;
    int max_transitions = 7;  // per EFA
};

/// A valid model set whose last EFA is the specification (role `spec`, at least one marked
/// location). Deterministic in `seed`.
hazsynth::ModelSet random_model(std::uint64_t seed, const Limits& lim = {});

}  // namespace gen
