#include "sarlab/sarb.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <limits>
#include <set>

#include <json.hpp>

#include "sarlab/error.hpp"

namespace sarlab::sarb {

namespace {

std::uint64_t checked_count(const std::vector<std::int64_t>& shape, const std::string& name) {
    std::uint64_t n = 1;
    for (auto d : shape) {
        if (d < 0) throw ValidationError("negative dimension in shape of '" + name + "'", "sarb");
        if (d != 0 && n > std::numeric_limits<std::uint64_t>::max() / static_cast<std::uint64_t>(d))
            throw ValidationError("shape of '" + name + "' overflows", "sarb");
        n *= static_cast<std::uint64_t>(d);
    }
    return n;
}

const void* raw(const Array& a) {
    return std::visit([](const auto& v) -> const void* { return v.data(); }, a.data);
}

void fill(Array& a, DType t, const std::byte* src, std::size_t count) {
    switch (t) {
        case DType::f64: a.data = std::vector<double>(count); break;
        case DType::c128: a.data = std::vector<std::complex<double>>(count); break;
        case DType::i64: a.data = std::vector<std::int64_t>(count); break;
    }
    if (count) std::visit([&](auto& v) { std::memcpy(v.data(), src, count * element_size(t)); }, a.data);
}

}  // namespace

std::string to_string(DType t) {
    switch (t) {
        case DType::f64: return "f64";
        case DType::c128: return "c128";
        case DType::i64: return "i64";
    }
    return "?";
}

DType dtype_from_string(const std::string& s) {
    if (s == "f64") return DType::f64;
    if (s == "c128") return DType::c128;
    if (s == "i64") return DType::i64;
    throw ValidationError("unknown dtype '" + s + "'", "sarb.dtype");
}

std::size_t element_size(DType t) { return t == DType::c128 ? 16 : 8; }

std::size_t Array::size() const {
    return std::visit([](const auto& v) { return v.size(); }, data);
}

std::vector<std::byte> encode(const std::vector<Array>& arrays) {
    nlohmann::json index = nlohmann::json::array();
    std::set<std::string> names;
    std::uint64_t offset = 0;
    for (const auto& a : arrays) {
        if (a.name.empty()) throw ValidationError("array name must not be empty", "sarb");
        if (!names.insert(a.name).second) throw ValidationError("duplicate array name '" + a.name + "'", "sarb");
        if (checked_count(a.shape, a.name) != a.size())
            throw ValidationError("shape of '" + a.name + "' does not match its element count", "sarb");
        index.push_back({{"name", a.name}, {"dtype", to_string(a.dtype())}, {"shape", a.shape}, {"byte_offset", offset}});
        offset += a.size() * element_size(a.dtype());
    }
    const std::string header = nlohmann::json{{"arrays", index}}.dump();
    const std::uint64_t hlen = header.size();

    std::vector<std::byte> out(kPreambleSize + header.size() + offset);
    std::memcpy(out.data(), kMagic, kMagicSize);
    std::memcpy(out.data() + kMagicSize, &hlen, 8);
    std::memcpy(out.data() + kPreambleSize, header.data(), header.size());
    std::byte* p = out.data() + kPreambleSize + header.size();
    for (const auto& a : arrays) {
        const std::size_t n = a.size() * element_size(a.dtype());
        if (n) std::memcpy(p, raw(a), n);
        p += n;
    }
    return out;
}

std::vector<Entry> parse_index(std::span<const std::byte> bytes, std::uint64_t file_size, std::uint64_t& data_start) {
    if (bytes.size() < kMagicSize || std::memcmp(bytes.data(), kMagic, kMagicSize) != 0)
        throw ParseError("bad magic: expected bytes 53 41 52 42 31 0a (\"SARB1\\n\")", 0);
    if (bytes.size() < kPreambleSize) throw ParseError("truncated header length field", bytes.size());
    std::uint64_t hlen = 0;
    std::memcpy(&hlen, bytes.data() + kMagicSize, 8);
    if (hlen > file_size - kPreambleSize || hlen > bytes.size() - kPreambleSize)
        throw ParseError("header length " + std::to_string(hlen) + " exceeds file size", kMagicSize);
    data_start = kPreambleSize + hlen;

    const char* text = reinterpret_cast<const char*>(bytes.data() + kPreambleSize);
    nlohmann::json header;
    try {
        header = nlohmann::json::parse(text, text + hlen);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(std::string("malformed JSON header: ") + e.what(), kPreambleSize + (e.byte > 0 ? e.byte - 1 : 0));
    }
    if (!header.is_object() || !header.contains("arrays") || !header["arrays"].is_array())
        throw ParseError("header must be an object with an \"arrays\" list", kPreambleSize);

    const std::uint64_t data_size = file_size - data_start;
    std::vector<Entry> entries;
    std::set<std::string> names;
    for (const auto& item : header["arrays"]) {
        Entry e;
        try {
            e.name = item.at("name").get<std::string>();
            e.dtype = dtype_from_string(item.at("dtype").get<std::string>());
            e.shape = item.at("shape").get<std::vector<std::int64_t>>();
            e.byte_offset = item.at("byte_offset").get<std::uint64_t>();
        } catch (const nlohmann::json::exception& ex) {
            throw ParseError(std::string("malformed array entry: ") + ex.what(), kPreambleSize);
        } catch (const ValidationError& ex) {
            throw ParseError(ex.what(), kPreambleSize);
        }
        if (!names.insert(e.name).second) throw ParseError("duplicate array name '" + e.name + "'", kPreambleSize);
        std::uint64_t count = 0;
        try {
            count = checked_count(e.shape, e.name);
        } catch (const ValidationError& ex) {
            throw ParseError(ex.what(), kPreambleSize);
        }
        if (count > std::numeric_limits<std::uint64_t>::max() / element_size(e.dtype))
            throw ParseError("array '" + e.name + "' is too large", kPreambleSize);
        e.byte_size = count * element_size(e.dtype);
        if (e.byte_offset > data_size || e.byte_size > data_size - e.byte_offset)
            throw ParseError("payload of '" + e.name + "' (" + std::to_string(e.byte_size) + " bytes at data offset " +
                                 std::to_string(e.byte_offset) + ") runs past end of file",
                             data_start + std::min(e.byte_offset, data_size));
        entries.push_back(std::move(e));
    }

    std::vector<const Entry*> sorted;
    for (const auto& e : entries) sorted.push_back(&e);
    std::sort(sorted.begin(), sorted.end(), [](auto* a, auto* b) { return a->byte_offset < b->byte_offset; });
    std::uint64_t end = 0;
    for (const auto* e : sorted) {
        if (e->byte_offset < end && e->byte_size > 0)
            throw ParseError("payload of '" + e->name + "' overlaps a previous array", data_start + e->byte_offset);
        end = std::max(end, e->byte_offset + e->byte_size);
    }
    if (end != data_size)
        throw ParseError("data section holds " + std::to_string(data_size) + " bytes but the header describes " +
                             std::to_string(end),
                         data_start + std::min(end, data_size));
    return entries;
}

std::vector<Array> decode(std::span<const std::byte> bytes) {
    std::uint64_t data_start = 0;
    const auto entries = parse_index(bytes, bytes.size(), data_start);
    std::vector<Array> out;
    out.reserve(entries.size());
    for (const auto& e : entries) {
        Array a;
        a.name = e.name;
        a.shape = e.shape;
        fill(a, e.dtype, bytes.data() + data_start + e.byte_offset, e.byte_size / element_size(e.dtype));
        out.push_back(std::move(a));
    }
    return out;
}

void write_file(const std::filesystem::path& path, std::span<const std::byte> bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IoError("write to '" + path.string() + "' failed");
}

std::vector<std::byte> read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary | std::ios::ate);
    if (!in) throw IoError("cannot open '" + path.string() + "'");
    const auto size = static_cast<std::size_t>(in.tellg());
    std::vector<std::byte> bytes(size);
    in.seekg(0);
    in.read(reinterpret_cast<char*>(bytes.data()), static_cast<std::streamsize>(size));
    if (!in) throw IoError("read of '" + path.string() + "' failed");
    return bytes;
}

void write_sarb(const std::filesystem::path& path, const std::vector<Array>& arrays) {
    write_file(path, encode(arrays));
}

std::vector<Array> read_sarb(const std::filesystem::path& path) { return decode(read_file(path)); }

Reader::Reader(const std::filesystem::path& path) : in_(path, std::ios::binary | std::ios::ate), path_(path) {
    if (!in_) throw IoError("cannot open '" + path.string() + "'");
    const auto size = static_cast<std::uint64_t>(in_.tellg());
    in_.seekg(0);
    std::vector<std::byte> pre(std::min<std::uint64_t>(size, kPreambleSize));
    in_.read(reinterpret_cast<char*>(pre.data()), static_cast<std::streamsize>(pre.size()));
    std::uint64_t hlen = 0;
    if (pre.size() == kPreambleSize) std::memcpy(&hlen, pre.data() + kMagicSize, 8);
    const std::uint64_t head = kPreambleSize + std::min(hlen, size - std::min<std::uint64_t>(size, kPreambleSize));
    std::vector<std::byte> bytes(std::min(head, size));
    in_.seekg(0);
    in_.read(reinterpret_cast<char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    entries_ = parse_index(bytes, size, data_start_);
}

bool Reader::contains(const std::string& name) const {
    return std::any_of(entries_.begin(), entries_.end(), [&](const Entry& e) { return e.name == name; });
}

Array Reader::load(const std::string& name) {
    const auto it = std::find_if(entries_.begin(), entries_.end(), [&](const Entry& e) { return e.name == name; });
    if (it == entries_.end()) throw ValidationError("no array named '" + name + "' in " + path_.string(), "sarb");
    std::vector<std::byte> buf(it->byte_size);
    in_.clear();
    in_.seekg(static_cast<std::streamoff>(data_start_ + it->byte_offset));
    in_.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
    if (!in_) throw IoError("read of '" + name + "' from " + path_.string() + " failed");
    Array a;
    a.name = it->name;
    a.shape = it->shape;
    fill(a, it->dtype, buf.data(), it->byte_size / element_size(it->dtype));
    return a;
}

const Array* find_if(const std::vector<Array>& arrays, const std::string& name) {
    for (const auto& a : arrays)
        if (a.name == name) return &a;
    return nullptr;
}

const Array& find(const std::vector<Array>& arrays, const std::string& name) {
    if (const auto* a = find_if(arrays, name)) return *a;
    throw ValidationError("missing array '" + name + "'", "sarb");
}

}  // namespace sarlab::sarb
