#pragma once

#include <filesystem>
#include <string>
#include <string_view>

namespace signcrowd {

/// Whole-file read; throws E_IO.
std::string read_file_bytes(const std::filesystem::path& path);

/// Creates parent directories and replaces the file; throws E_IO.
void write_file_bytes(const std::filesystem::path& path, std::string_view bytes);

}  // namespace signcrowd
