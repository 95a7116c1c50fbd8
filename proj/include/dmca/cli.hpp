#pragma once

#include <json.hpp>

#include "dmca/detector.hpp"

namespace dmca {

// Resolved detect configuration as recorded in run manifests.
nlohmann::json detect_config_to_json(const DetectConfig& cfg);
DetectConfig detect_config_from_json(const nlohmann::json& j);

// Entry point of the `dmca` tool. Returns the process exit status: 0 on
// success, 2 on usage errors, 1 on any other failure. Errors are printed to
// stderr as a single line "error: <kind>: <message>".
int run_cli(int argc, char** argv);

}  // namespace dmca
