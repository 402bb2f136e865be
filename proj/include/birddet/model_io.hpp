#pragma once

#include <filesystem>

#include <json.hpp>

#include "birddet/trainer.hpp"

namespace birddet {

inline constexpr int kModelSchemaVersion = 1;

// Versioned JSON model files. Doubles are written in shortest round-trip
// form, so read(write(m)) reproduces every numeric field exactly.
nlohmann::ordered_json model_to_json(const SpeciesModel& model);
SpeciesModel model_from_json(const nlohmann::ordered_json& j);

void save_model(const std::filesystem::path& path, const SpeciesModel& model);
SpeciesModel load_model(const std::filesystem::path& path);

// Structural invariants: weight simplex, SPD covariances, k within the swept
// range and at the MDL minimum, dimensions consistent with the feature set.
void validate_model(const SpeciesModel& model);

}  // namespace birddet
