#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>

namespace sarlab {

/// SHA-256 of a byte buffer, lowercase hex.
std::string sha256_hex(std::span<const std::byte> bytes);
std::string sha256_hex(std::string_view text);
std::string sha256_file(const std::filesystem::path& path);

/// First 32 bytes of a hex digest packed into four little-endian i64 words.
std::array<std::int64_t, 4> digest_words(const std::string& hex);
std::string digest_from_words(const std::array<std::int64_t, 4>& words);

}  // namespace sarlab
