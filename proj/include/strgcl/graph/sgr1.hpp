// SPDX-License-Identifier: Apache-2.0
#pragma once

// SGR1 native graph file, little-endian:
//   "SGR1" | u32 n | u64 E | u32 F | u32 num_classes | u64 row_ptr[n+1]
//   | u32 col_idx[E] | f32 features[n*F] | i32 labels[n] | u32 crc32
// The CRC covers every byte before it. E counts both directions of each edge.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "strgcl/binary_io.hpp"
#include "strgcl/graph/graph.hpp"

namespace strgcl {

inline constexpr char kSgr1Magic[4] = {'S', 'G', 'R', '1'};

inline std::vector<std::uint8_t> encode_sgr1(const Graph& g) {
    require(g.n() <= UINT32_MAX && g.num_features() <= UINT32_MAX, ErrorKind::format, "graph too large for SGR1");
    io::ByteWriter w;
    w.put_bytes(std::string_view(kSgr1Magic, 4));
    w.put(static_cast<std::uint32_t>(g.n()));
    w.put(static_cast<std::uint64_t>(g.num_directed_edges()));
    w.put(static_cast<std::uint32_t>(g.num_features()));
    w.put(static_cast<std::uint32_t>(g.num_classes()));
    const auto& a = g.adjacency();
    w.put_array(a.row_ptr().data(), a.row_ptr().size());
    w.put_array(a.col_idx().data(), a.col_idx().size());
    w.put_array(g.features().data(), g.features().size());
    w.put_array(g.labels().data(), g.labels().size());
    w.put_crc();
    return w.bytes();
}

inline void save_graph(const Graph& g, const std::filesystem::path& path) {
    io::write_file(path, encode_sgr1(g));
}

inline Graph decode_sgr1(std::vector<std::uint8_t> bytes, std::string name = {}) {
    io::ByteReader r(std::move(bytes));
    if (r.get_bytes(4, "magic") != std::string(kSgr1Magic, 4)) throw FormatError("bad magic, expected SGR1", 0);
    const auto n = r.get<std::uint32_t>("node count");
    const auto e = r.get<std::uint64_t>("edge count");
    const auto f = r.get<std::uint32_t>("feature count");
    const auto classes = r.get<std::uint32_t>("class count");

    const std::uint64_t expected = 24ull + 8ull * (n + 1ull) + 4ull * e + 4ull * n * static_cast<std::uint64_t>(f) +
                                   4ull * n + 4ull;
    if (r.size() < expected) throw FormatError("truncated file: header promises " + std::to_string(expected) + " bytes", r.size());
    if (r.size() > expected) throw FormatError("trailing bytes after CRC32", expected);
    r.verify_trailing_crc();

    const std::size_t rp_off = r.offset();
    auto row_ptr = r.get_array<std::uint64_t>(n + 1ull, "row_ptr");
    const std::size_t ci_off = r.offset();
    auto col_idx = r.get_array<std::uint32_t>(e, "col_idx");
    const std::size_t feat_off = r.offset();
    auto feats = r.get_array<float>(static_cast<std::size_t>(n) * f, "features");
    const std::size_t lab_off = r.offset();
    auto labels = r.get_array<std::int32_t>(n, "labels");

    if (row_ptr[0] != 0) throw FormatError("row_ptr[0] must be 0", rp_off);
    for (std::size_t i = 0; i < n; ++i) {
        if (row_ptr[i + 1] < row_ptr[i]) throw FormatError("row_ptr decreases at row " + std::to_string(i), rp_off + 8 * (i + 1));
    }
    if (row_ptr[n] != e) throw FormatError("row_ptr[n] != edge count", rp_off + 8ull * n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::uint64_t p = row_ptr[i]; p < row_ptr[i + 1]; ++p) {
            const std::size_t off = ci_off + 4 * p;
            if (col_idx[p] >= n) throw FormatError("column index out of range", off);
            if (col_idx[p] == i) throw FormatError("self-loop at node " + std::to_string(i), off);
            if (p > row_ptr[i] && col_idx[p - 1] >= col_idx[p]) throw FormatError("column indices not strictly increasing", off);
        }
    }
    // Symmetry: every (i, j) must have its mirror; binary search row j.
    for (std::size_t i = 0; i < n; ++i) {
        for (std::uint64_t p = row_ptr[i]; p < row_ptr[i + 1]; ++p) {
            const std::uint32_t j = col_idx[p];
            auto b = col_idx.begin() + static_cast<std::ptrdiff_t>(row_ptr[j]);
            auto en = col_idx.begin() + static_cast<std::ptrdiff_t>(row_ptr[j + 1]);
            if (!std::binary_search(b, en, static_cast<std::uint32_t>(i)))
                throw FormatError("adjacency not symmetric at (" + std::to_string(i) + "," + std::to_string(j) + ")", ci_off + 4 * p);
        }
    }
    for (std::size_t k = 0; k < feats.size(); ++k) {
        if (!std::isfinite(feats[k])) throw FormatError("non-finite feature value", feat_off + 4 * k);
    }
    for (std::size_t i = 0; i < n; ++i) {
        const auto l = labels[i];
        if (l < -1 || (l >= 0 && static_cast<std::uint32_t>(l) >= classes))
            throw FormatError("label out of range at node " + std::to_string(i), lab_off + 4 * i);
    }

    std::vector<double> vals(e, 1.0);
    SparseCSR adj(n, n, std::move(row_ptr), std::move(col_idx), std::move(vals));
    return Graph(std::move(name), std::move(adj), FeatureMatrix(n, f, std::move(feats)), std::move(labels), classes);
}

inline Graph load_graph(const std::filesystem::path& path) {
    return decode_sgr1(io::read_file(path), path.stem().string());
}

} // namespace strgcl
