#pragma once

#include <map>
#include <stdexcept>
#include <string>

#include "bdisac/scene.hpp"

namespace bdisac {

/// Parse or validation failure with file/line/key context.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Table-of-defaults scene. Every key absent from a config file takes the
/// value this returns.
SceneConfig default_config();

/// Loads a flat key = value text file (# comments, blank lines allowed).
/// Unknown keys, unparsable values, and invariant violations raise
/// ConfigError naming the line and key. An empty file yields the defaults.
SceneConfig load_config(const std::string& path);

/// Same parser over an in-memory string; `origin` labels diagnostics.
SceneConfig parse_config(const std::string& text, const std::string& origin = "<string>");

/// Serializes a config using the schema key names, suitable for reloading.
std::string format_config(const SceneConfig& config);

/// One row per schema key: name, unit, default, description.
std::string config_schema_text();

}  // namespace bdisac
