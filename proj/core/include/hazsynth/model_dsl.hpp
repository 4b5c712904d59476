#pragma once

// Text format for model sets (`.des` files). See docs/dsl.md for the grammar.

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "hazsynth/efa.hpp"

namespace hazsynth {

struct ModelSet {
    std::string name;
    std::string description;
    std::vector<EventDecl> events;
    std::vector<VarDecl> variables;
    std::vector<Efa> efas;

    const Efa* find_efa(std::string_view efa_name) const;
    const EventDecl* find_event(std::string_view event_name) const;

    bool operator==(const ModelSet&) const = default;
};

/// Derives each EFA's alphabet and variable list from the shared declarations (events and
/// variables referenced by its transitions, in declaration order), then validates.
/// Throws ValidationError when any diagnostic is produced.
ModelSet make_model_set(std::string name, std::string description, std::vector<EventDecl> events,
                        std::vector<VarDecl> variables, std::vector<Efa> efas);

/// All diagnostics for a model set: per-EFA and cross-EFA checks plus references to
/// undeclared events or variables.
std::vector<Diagnostic> validate_model_set(const ModelSet& model);

/// Throws ParseError (lexical or syntax category) or ValidationError.
ModelSet parse_model(std::string_view text);

std::string serialize_model(const ModelSet& model);

ModelSet load_model_file(const std::filesystem::path& path);

/// Splits a model set into plant EFAs and specification EFAs. When no EFA carries the
/// `spec` role, the EFAs with a nonempty marked set form the specification.
struct PlantSpecSplit {
    std::vector<Efa> plant;
    std::vector<Efa> spec;
};
PlantSpecSplit split_plant_spec(const ModelSet& model);

}  // namespace hazsynth
