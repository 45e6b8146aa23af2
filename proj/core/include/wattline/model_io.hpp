#pragma once

#include <string>
#include <string_view>

#include "wattline/model_builder.hpp"
#include "wattline/types.hpp"

namespace wattline {

inline constexpr std::string_view kModelSchema = "wattline-model/v1";

// Canonical model document: stable key order, doubles as %.6e, trailing
// newline. Emitting the same model twice is byte-identical, and
// save -> load -> save is a fixpoint.
std::string model_to_json(const RooflineModel& model);
void save_model(const RooflineModel& model, const std::string& path);

// Strict by default: unknown keys are rejected with their path; lenient
// mode ignores them. Model invariants are re-validated on load.
RooflineModel model_from_json_text(std::string_view text, bool lenient = false);
RooflineModel load_model(const std::string& path, bool lenient = false);

// Platform document: {"name": ..., "p_peak_w": ..., "notes": optional}.
PlatformSpec platform_from_json_text(std::string_view text, bool lenient = false);
PlatformSpec load_platform(const std::string& path, bool lenient = false);

} // namespace wattline
