#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

#include "uwbaoa/correction.hpp"

namespace uwbaoa {

inline constexpr std::uint32_t kModelFormatVersion = 1;

/// Versioned little-endian container, layout in docs/model_format.md.
std::string serialize_model(const CorrectionModel& model);
/// Throws ModelLoadError on bad magic, unsupported version, checksum
/// mismatch, truncation or inconsistent contents.
CorrectionModel deserialize_model(std::string_view bytes);

/// Returns the number of bytes written.
std::size_t save_model(const CorrectionModel& model, const std::filesystem::path& path);
CorrectionModel load_model(const std::filesystem::path& path);

/// 64-bit FNV-1a.
std::uint64_t fnv1a64(std::string_view bytes);

}  // namespace uwbaoa
