#pragma once

#include "helium/ensemble.hpp"

#include <json.hpp>

#include <filesystem>

namespace helium {

/// Applies a flat key/value JSON object on top of `cfg`. Unknown keys and
/// wrongly typed values throw std::invalid_argument. Range bounds (e_min,
/// e_max, m_min, m_max) may be null to request the data bounding box.
void apply_config_json(EnsembleConfig& cfg, const nlohmann::json& j);

/// Flat JSON with every knob, the inverse of apply_config_json. `workers` is
/// included; it does not affect results.
nlohmann::json config_to_json(const EnsembleConfig& cfg);

/// Defaults overridden by the file's values.
EnsembleConfig load_config_file(const std::filesystem::path& path);

/// Run manifest: resolved config, code version and output formats.
nlohmann::json make_manifest(const EnsembleConfig& cfg);

/// True when two manifests describe the same computation (workers ignored).
bool manifests_compatible(const nlohmann::json& a, const nlohmann::json& b);

} // namespace helium
