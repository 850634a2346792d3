#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include "modeplan/task.hpp"
#include "modeplan/trajectory.hpp"

namespace modeplan {

/// 64-bit FNV-1a.
std::uint64_t fnv1a64(std::string_view bytes);
std::string format_hash(std::uint64_t hash);

/// Throws ParseError naming the file when it cannot be read.
std::string read_file(const std::string& path);

/// Strict JSON task parsing: unknown keys, missing fields and invariant
/// violations raise ParseError with a JSON-pointer field path.
Task parse_task(const std::string& text);
Task load_task(const std::string& path);
std::string emit_task(const Task& task);

Trajectory parse_trajectory(const std::string& text);
std::string emit_trajectory(const Trajectory& trajectory);

}  // namespace modeplan
