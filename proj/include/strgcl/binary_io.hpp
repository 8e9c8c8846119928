// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <string>
#include <string_view>
#include <type_traits>
#include <vector>

#include <zlib.h>

#include "strgcl/error.hpp"

namespace strgcl::io {

inline std::uint32_t crc32_of(const std::uint8_t* data, std::size_t len) {
    uLong crc = ::crc32(0L, Z_NULL, 0);
    // zlib takes uInt lengths; feed in chunks for files above 4 GiB.
    while (len > 0) {
        const auto chunk = static_cast<uInt>(std::min<std::size_t>(len, 1u << 30));
        crc = ::crc32(crc, data, chunk);
        data += chunk;
        len -= chunk;
    }
    return static_cast<std::uint32_t>(crc);
}

inline std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    require(static_cast<bool>(in), ErrorKind::io, "cannot open " + path.string());
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline void write_file(const std::filesystem::path& path, const std::vector<std::uint8_t>& bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    require(static_cast<bool>(out), ErrorKind::io, "cannot open " + path.string() + " for writing");
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    require(static_cast<bool>(out), ErrorKind::io, "write failed for " + path.string());
}

/// Little-endian byte sink.
class ByteWriter {
public:
    template <class T>
    void put(T v) {
        static_assert(std::is_trivially_copyable_v<T>);
        std::uint8_t raw[sizeof(T)];
        std::memcpy(raw, &v, sizeof(T));
        if constexpr (std::endian::native == std::endian::big) std::reverse(raw, raw + sizeof(T));
        bytes_.insert(bytes_.end(), raw, raw + sizeof(T));
    }
    void put_bytes(std::string_view s) { bytes_.insert(bytes_.end(), s.begin(), s.end()); }
    template <class T>
    void put_array(const T* p, std::size_t n) {
        if constexpr (std::endian::native == std::endian::little) {
            const auto* raw = reinterpret_cast<const std::uint8_t*>(p);
            bytes_.insert(bytes_.end(), raw, raw + n * sizeof(T));
        } else {
            for (std::size_t i = 0; i < n; ++i) put(p[i]);
        }
    }
    void put_crc() { put(crc32_of(bytes_.data(), bytes_.size())); }

    const std::vector<std::uint8_t>& bytes() const noexcept { return bytes_; }

    void write_file(const std::filesystem::path& path) const { io::write_file(path, bytes_); }

private:
    std::vector<std::uint8_t> bytes_;
};

/// Bounds-checked little-endian reader; failures report the byte offset.
class ByteReader {
public:
    explicit ByteReader(std::vector<std::uint8_t> bytes) : bytes_(std::move(bytes)) {}

    static ByteReader from_file(const std::filesystem::path& path) { return ByteReader(read_file(path)); }

    std::size_t offset() const noexcept { return pos_; }
    std::size_t size() const noexcept { return bytes_.size(); }
    std::size_t remaining() const noexcept { return bytes_.size() - pos_; }

    void need(std::size_t n, const char* what) const {
        if (remaining() < n) throw FormatError(std::string("truncated file while reading ") + what, pos_);
    }

    template <class T>
    T get(const char* what) {
        need(sizeof(T), what);
        std::uint8_t raw[sizeof(T)];
        std::memcpy(raw, bytes_.data() + pos_, sizeof(T));
        if constexpr (std::endian::native == std::endian::big) std::reverse(raw, raw + sizeof(T));
        pos_ += sizeof(T);
        T v;
        std::memcpy(&v, raw, sizeof(T));
        return v;
    }

    std::string get_bytes(std::size_t n, const char* what) {
        need(n, what);
        std::string s(reinterpret_cast<const char*>(bytes_.data() + pos_), n);
        pos_ += n;
        return s;
    }

    template <class T>
    std::vector<T> get_array(std::size_t n, const char* what) {
        if (n > remaining() / sizeof(T)) throw FormatError(std::string("truncated file while reading ") + what, pos_);
        std::vector<T> out(n);
        if constexpr (std::endian::native == std::endian::little) {
            std::memcpy(out.data(), bytes_.data() + pos_, n * sizeof(T));
            pos_ += n * sizeof(T);
        } else {
            for (auto& v : out) v = get<T>(what);
        }
        return out;
    }

    /// Verifies a trailing CRC32 over everything before the last four bytes.
    void verify_trailing_crc() const {
        if (bytes_.size() < 4) throw FormatError("file too short for CRC32 trailer", bytes_.size());
        const std::size_t body = bytes_.size() - 4;
        std::uint32_t stored = 0;
        for (int k = 3; k >= 0; --k) stored = (stored << 8) | bytes_[body + static_cast<std::size_t>(k)];
        if (stored != crc32_of(bytes_.data(), body)) throw FormatError("CRC32 mismatch", body);
    }

private:
    std::vector<std::uint8_t> bytes_;
    std::size_t pos_ = 0;
};

} // namespace strgcl::io
