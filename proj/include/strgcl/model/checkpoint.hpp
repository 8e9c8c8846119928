// SPDX-License-Identifier: Apache-2.0
#pragma once

// Checkpoint file, little-endian:
//   "SGC1" | u32 version | u32 flags | u32 count
//   | count x (u32 name_len | name | u64 rows | u64 cols)
//   | f64 data of every matrix in table order | u64 config fingerprint | u32 crc32
// flags bit 0: rule branch present.

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "strgcl/binary_io.hpp"
#include "strgcl/model/model.hpp"

namespace strgcl {

inline constexpr std::uint32_t kCheckpointVersion = 1;

struct Checkpoint {
    ModelParams params;
    std::uint64_t fingerprint = 0;
};

inline std::vector<std::uint8_t> encode_checkpoint(const ModelParams& p, std::uint64_t fingerprint) {
    io::ByteWriter w;
    w.put_bytes("SGC1");
    w.put(kCheckpointVersion);
    w.put(static_cast<std::uint32_t>(p.rule_branch ? 1 : 0));
    std::vector<std::pair<std::string, const DenseMatrix*>> mats;
    p.visit([&](const std::string& name, const DenseMatrix& m) { mats.emplace_back(name, &m); });
    w.put(static_cast<std::uint32_t>(mats.size()));
    for (const auto& [name, m] : mats) {
        w.put(static_cast<std::uint32_t>(name.size()));
        w.put_bytes(name);
        w.put(static_cast<std::uint64_t>(m->rows()));
        w.put(static_cast<std::uint64_t>(m->cols()));
    }
    for (const auto& [name, m] : mats) w.put_array(m->data(), m->size());
    w.put(fingerprint);
    w.put_crc();
    return w.bytes();
}

inline void save_checkpoint(const ModelParams& p, std::uint64_t fingerprint, const std::filesystem::path& path) {
    io::write_file(path, encode_checkpoint(p, fingerprint));
}

inline Checkpoint decode_checkpoint(std::vector<std::uint8_t> bytes) {
    io::ByteReader r(std::move(bytes));
    if (r.get_bytes(4, "magic") != "SGC1") throw FormatError("bad magic, expected SGC1", 0);
    r.verify_trailing_crc();
    const auto version = r.get<std::uint32_t>("version");
    if (version != kCheckpointVersion) throw FormatError("unsupported checkpoint version " + std::to_string(version), 4);
    const auto flags = r.get<std::uint32_t>("flags");
    const auto count = r.get<std::uint32_t>("matrix count");

    struct Entry {
        std::string name;
        std::uint64_t rows, cols;
    };
    std::vector<Entry> table;
    for (std::uint32_t i = 0; i < count; ++i) {
        const auto len = r.get<std::uint32_t>("name length");
        Entry e;
        e.name = r.get_bytes(len, "matrix name");
        e.rows = r.get<std::uint64_t>("rows");
        e.cols = r.get<std::uint64_t>("cols");
        table.push_back(std::move(e));
    }

    Checkpoint ck;
    ck.params.rule_branch = (flags & 1u) != 0;
    std::size_t layers = 0;
    for (const auto& e : table)
        if (e.name.rfind("encoder.", 0) == 0) ++layers;
    ck.params.encoder.resize(layers / 2);

    std::size_t k = 0;
    std::size_t expected = 0;
    ck.params.visit([&](const std::string&, DenseMatrix&) { ++expected; });
    if (expected != table.size()) throw FormatError("matrix table does not match the model layout", 16);
    ck.params.visit([&](const std::string& name, DenseMatrix& m) {
        const Entry& e = table[k++];
        if (e.name != name) throw FormatError("unexpected matrix '" + e.name + "', wanted '" + name + "'", r.offset());
        if (e.rows != 0 && e.cols > (r.remaining() / 8) / e.rows)
            throw FormatError("matrix '" + name + "' exceeds file size", r.offset());
        auto data = r.get_array<double>(static_cast<std::size_t>(e.rows * e.cols), "matrix data");
        m = DenseMatrix(static_cast<std::size_t>(e.rows), static_cast<std::size_t>(e.cols), std::move(data));
    });
    ck.fingerprint = r.get<std::uint64_t>("fingerprint");
    if (r.remaining() != 4) throw FormatError("trailing bytes before CRC32", r.offset());
    return ck;
}

inline Checkpoint load_checkpoint(const std::filesystem::path& path) {
    return decode_checkpoint(io::read_file(path));
}

} // namespace strgcl
