#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "qkd/mc_sim.hpp"
#include "qkd/profile.hpp"

namespace qkd {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidationFailed = 2;
inline constexpr int kExitUsage = 64;

bool is_preset_name(std::string_view name);

/// Largest polarization mismatch with a positive raw key rate under the
/// profile's parameters, located by scan plus bisection (degrees). Returns
/// 0 when already non-positive at Phi = 0 and 90 when positive everywhere.
double find_phi_star_deg(const RunProfile& profile);

/// The pinned Monte Carlo validation points (distance / mismatch / mean
/// photon number variations; e_d = 0 since misalignment is not a simulated
/// mechanism). Rounds and base seed come from the profile.
std::vector<SimConfig> mc_validation_points(const RunProfile& profile);

struct PresetOutcome {
    std::vector<std::string> files;
    int exit_code = kExitOk;
};

/// Writes <out_dir>/<preset>.csv (or mc_validation.txt) and logs one line
/// per file. jobs <= 0 means use all available workers.
PresetOutcome run_preset(const std::string& preset, const RunProfile& profile,
                         const std::string& out_dir, int jobs, std::ostream& log);

/// Sweep run defined by the profile's sweep block.
PresetOutcome run_custom(const RunProfile& profile, const std::string& out_dir, int jobs,
                         std::ostream& log);

}  // namespace qkd
