// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "strgcl/binary_io.hpp"
#include "strgcl/linalg/matrix.hpp"

namespace strgcl {

// "SGE1" | rows u64 | cols u64 | f64 row-major data | fingerprint u64 | CRC32
struct EmbeddingFile {
    DenseMatrix h;
    std::uint64_t fingerprint = 0;
};

inline std::vector<std::uint8_t> encode_embeddings(const DenseMatrix& h, std::uint64_t fingerprint) {
    io::ByteWriter w;
    w.put_bytes("SGE1");
    w.put(static_cast<std::uint64_t>(h.rows()));
    w.put(static_cast<std::uint64_t>(h.cols()));
    w.put_array(h.data(), h.size());
    w.put(fingerprint);
    w.put_crc();
    return w.bytes();
}

inline EmbeddingFile decode_embeddings(std::vector<std::uint8_t> bytes) {
    io::ByteReader r(std::move(bytes));
    if (r.get_bytes(4, "magic") != "SGE1") throw FormatError("bad magic, expected SGE1", 0);
    r.verify_trailing_crc();
    const auto rows = r.get<std::uint64_t>("rows");
    const auto cols = r.get<std::uint64_t>("cols");
    if (rows != 0 && cols > (r.remaining() / 8) / rows) throw FormatError("embedding matrix exceeds file size", r.offset());
    EmbeddingFile f;
    f.h = DenseMatrix(rows, cols, r.get_array<double>(static_cast<std::size_t>(rows * cols), "embedding data"));
    f.fingerprint = r.get<std::uint64_t>("fingerprint");
    if (r.remaining() != 4) throw FormatError("trailing bytes before CRC32", r.offset());
    return f;
}

inline void save_embeddings(const DenseMatrix& h, std::uint64_t fingerprint, const std::filesystem::path& path) {
    io::write_file(path, encode_embeddings(h, fingerprint));
}

inline EmbeddingFile load_embeddings(const std::filesystem::path& path) { return decode_embeddings(io::read_file(path)); }

} // namespace strgcl
