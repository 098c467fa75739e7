#pragma once

#include "frontlab/field.hpp"
#include "frontlab/profile.hpp"

#include "json.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace frontlab {

/// Shortest text that round-trips the double.
std::string format_double(double v);

/// Columns t, x_half, x_<level> for the other tracked levels, window_left,
/// window_right. Missing crossings are written as nan.
void write_track_csv(const std::filesystem::path& path, const Trajectory& traj);

/// Long CSV with columns t, x, u for snapshots at least `every` time units apart.
void write_snapshots_csv(const std::filesystem::path& path, const Trajectory& traj, double every);

/// One line per snapshot: t origin dx n u_0 ... u_{n-1}.
void write_snapshots_text(const std::filesystem::path& path, const Trajectory& traj, double every);
/// Reads the format written by write_snapshots_text.
std::vector<FieldState> read_snapshots_text(const std::filesystem::path& path);

/// Window shifts as JSON lines {"t":..,"cells":..,"origin_after":..}.
void write_shifts_jsonl(const std::filesystem::path& path, const Trajectory& traj);

/// Two columns xi, phi.
void write_profile(const std::filesystem::path& path, const FrontProfile& p);

void write_json(const std::filesystem::path& path, const nlohmann::json& j);

} // namespace frontlab
