#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>

namespace sphesn {

/// Lower-case hex SHA-256 of a byte range.
std::string sha256_hex(const void* data, std::size_t size);

inline std::string sha256_hex(std::string_view bytes) { return sha256_hex(bytes.data(), bytes.size()); }

/// SHA-256 of a file's contents.
std::string file_sha256(const std::filesystem::path& path);

}  // namespace sphesn
