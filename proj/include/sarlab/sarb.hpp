#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace sarlab::sarb {

enum class DType { f64, c128, i64 };

std::string to_string(DType t);
DType dtype_from_string(const std::string& s);
std::size_t element_size(DType t);

/// A named N-d array in C order.
struct Array {
    std::string name;
    std::vector<std::int64_t> shape;
    std::variant<std::vector<double>, std::vector<std::complex<double>>, std::vector<std::int64_t>> data;

    DType dtype() const { return static_cast<DType>(data.index()); }
    std::size_t size() const;

    template <typename T>
    const std::vector<T>& as() const { return std::get<std::vector<T>>(data); }
    template <typename T>
    std::vector<T>& as() { return std::get<std::vector<T>>(data); }
};

/// Index entry of a container; `byte_offset` is relative to the start of the
/// data section that follows the JSON header.
struct Entry {
    std::string name;
    DType dtype = DType::f64;
    std::vector<std::int64_t> shape;
    std::uint64_t byte_offset = 0;
    std::uint64_t byte_size = 0;
};

inline constexpr char kMagic[] = "SARB1\n";
inline constexpr std::size_t kMagicSize = 6;
inline constexpr std::size_t kPreambleSize = kMagicSize + 8;  // magic + u64 header length

/// Serialises arrays to the container layout: magic "SARB1\n", little-endian
/// u64 header length, UTF-8 JSON index, packed payloads in listed order.
std::vector<std::byte> encode(const std::vector<Array>& arrays);
std::vector<Array> decode(std::span<const std::byte> bytes);

void write_file(const std::filesystem::path& path, std::span<const std::byte> bytes);
std::vector<std::byte> read_file(const std::filesystem::path& path);

void write_sarb(const std::filesystem::path& path, const std::vector<Array>& arrays);
std::vector<Array> read_sarb(const std::filesystem::path& path);

/// Parses the preamble and index; returns the entries and the data-section offset.
std::vector<Entry> parse_index(std::span<const std::byte> bytes, std::uint64_t file_size, std::uint64_t& data_start);

/// Reads the index eagerly and payloads on demand.
class Reader {
public:
    explicit Reader(const std::filesystem::path& path);

    const std::vector<Entry>& entries() const { return entries_; }
    bool contains(const std::string& name) const;
    Array load(const std::string& name);

private:
    std::ifstream in_;
    std::filesystem::path path_;
    std::vector<Entry> entries_;
    std::uint64_t data_start_ = 0;
};

const Array& find(const std::vector<Array>& arrays, const std::string& name);
const Array* find_if(const std::vector<Array>& arrays, const std::string& name);

}  // namespace sarlab::sarb
