// SPDX-License-Identifier: Apache-2.0
#include <cstring>
#include <filesystem>

#include <unistd.h>
#include <zlib.h>

#include "support/testing.hpp"
#include "strgcl/binary_io.hpp"
#include "strgcl/graph/sgr1.hpp"
#include "strgcl/graph/synthetic.hpp"
#include "strgcl/model/checkpoint.hpp"
#include "strgcl/model/embeddings.hpp"

using namespace strgcl;
using strgcl::testing::format_offset;

namespace {

Graph toy() {
    SbmOptions o;
    o.nodes = 12;
    o.classes = 3;
    o.features = 5;
    o.p_in = 0.5;
    return make_sbm(o, "toy");
}

// Rewrites the trailing CRC so a deliberately corrupted body reaches the
// structural checks.
void reseal(std::vector<std::uint8_t>& b) {
    const std::uint32_t crc = io::crc32_of(b.data(), b.size() - 4);
    for (int k = 0; k < 4; ++k) b[b.size() - 4 + k] = static_cast<std::uint8_t>(crc >> (8 * k));
}

template <class T>
void poke(std::vector<std::uint8_t>& b, std::size_t off, T v) {
    std::memcpy(b.data() + off, &v, sizeof v);
}

// Byte offsets of the SGR1 body sections.
struct Layout {
    std::size_t row_ptr, col_idx, features, labels;
};
Layout layout(const Graph& g) {
    Layout l;
    l.row_ptr = 24;
    l.col_idx = l.row_ptr + 8 * (g.n() + 1);
    l.features = l.col_idx + 4 * g.num_directed_edges();
    l.labels = l.features + 4 * g.n() * g.num_features();
    return l;
}

} // namespace

TEST(Crc32, MatchesZlib) {
    const char* s = "123456789";
    EXPECT_EQ(io::crc32_of(reinterpret_cast<const std::uint8_t*>(s), 9), 0xCBF43926u);
    EXPECT_EQ(io::crc32_of(reinterpret_cast<const std::uint8_t*>(s), 9),
              ::crc32(0, reinterpret_cast<const Bytef*>(s), 9));
}

TEST(Sgr1, RoundTripIsExact) {
    const Graph g = toy();
    const auto bytes = encode_sgr1(g);
    EXPECT_EQ(bytes.size(), layout(g).labels + 4 * g.n() + 4);
    const Graph h = decode_sgr1(bytes, "toy");
    EXPECT_EQ(h.adjacency(), g.adjacency());
    EXPECT_EQ(h.features(), g.features());
    EXPECT_EQ(h.labels(), g.labels());
    EXPECT_EQ(h.num_classes(), g.num_classes());
    EXPECT_EQ(encode_sgr1(h), bytes);
}

TEST(Sgr1, BadMagicAtOffsetZero) {
    auto b = encode_sgr1(toy());
    b[0] = 'X';
    EXPECT_EQ(format_offset([&] { decode_sgr1(b); }), 0);
}

TEST(Sgr1, TruncationAndTrailingBytes) {
    const auto good = encode_sgr1(toy());
    for (std::size_t cut : {2ul, 10ul, good.size() - 1}) {
        auto b = good;
        b.resize(cut);
        EXPECT_GE(format_offset([&] { decode_sgr1(b); }), 0) << cut;
    }
    auto longer = good;
    longer.push_back(0);
    EXPECT_EQ(format_offset([&] { decode_sgr1(longer); }), static_cast<long long>(good.size()));
}

TEST(Sgr1, CrcMismatchReportsTrailerOffset) {
    auto b = encode_sgr1(toy());
    b[30] ^= 1;
    EXPECT_EQ(format_offset([&] { decode_sgr1(b); }), static_cast<long long>(b.size() - 4));
}

TEST(Sgr1, CsrViolationsReportEntryOffsets) {
    const Graph g = toy();
    const Layout l = layout(g);
    const auto good = encode_sgr1(g);
    ASSERT_GE(g.degree(0), 1u);

    auto self = good; // first neighbour of node 0 becomes node 0
    poke<std::uint32_t>(self, l.col_idx, 0);
    reseal(self);
    EXPECT_EQ(format_offset([&] { decode_sgr1(self); }), static_cast<long long>(l.col_idx));

    auto range = good;
    poke<std::uint32_t>(range, l.col_idx, static_cast<std::uint32_t>(g.n()));
    reseal(range);
    EXPECT_EQ(format_offset([&] { decode_sgr1(range); }), static_cast<long long>(l.col_idx));

    auto rp = good;
    poke<std::uint64_t>(rp, l.row_ptr, 1);
    reseal(rp);
    EXPECT_EQ(format_offset([&] { decode_sgr1(rp); }), static_cast<long long>(l.row_ptr));

    auto label = good;
    poke<std::int32_t>(label, l.labels + 4 * 3, 7);
    reseal(label);
    EXPECT_EQ(format_offset([&] { decode_sgr1(label); }), static_cast<long long>(l.labels + 12));

    auto feat = good;
    poke<float>(feat, l.features + 8, NAN);
    reseal(feat);
    EXPECT_EQ(format_offset([&] { decode_sgr1(feat); }), static_cast<long long>(l.features + 8));
}

TEST(Sgr1, AsymmetryIsFormatError) {
    // Path 0-1-2; node 0's only neighbour is rewritten from 1 to 2, which has no 2->0 mirror.
    const Graph g = Graph::from_edges("g", 3, {{0, 1}, {1, 2}}, FeatureMatrix(3, 1));
    auto b = encode_sgr1(g);
    const Layout l = layout(g);
    poke<std::uint32_t>(b, l.col_idx, 2);
    reseal(b);
    EXPECT_EQ(format_offset([&] { decode_sgr1(b); }), static_cast<long long>(l.col_idx));
}

TEST(Sgr1, MissingFileIsIoError) {
    EXPECT_ERROR_KIND(load_graph("/nonexistent/dir/x.sgr1"), ErrorKind::io);
}

TEST(Checkpoint, RoundTripAndCorruption) {
    ModelDims d;
    d.input_dim = 5;
    d.hidden_dim = 4;
    d.mlp_hidden_dim = 3;
    d.rule_dim = 2;
    const ModelParams p = init_params(d, 9);
    const auto bytes = encode_checkpoint(p, 0xabcdef);
    const Checkpoint ck = decode_checkpoint(bytes);
    EXPECT_TRUE(ck.params == p);
    EXPECT_EQ(ck.fingerprint, 0xabcdefu);

    auto flipped = bytes;
    flipped[bytes.size() / 2] ^= 0x10;
    EXPECT_ERROR_KIND(decode_checkpoint(flipped), ErrorKind::format);
    auto cut = bytes;
    cut.resize(bytes.size() - 9);
    EXPECT_ERROR_KIND(decode_checkpoint(cut), ErrorKind::format);
    auto magic = bytes;
    magic[3] = '2';
    EXPECT_EQ(format_offset([&] { decode_checkpoint(magic); }), 0);
    auto version = bytes;
    poke<std::uint32_t>(version, 4, 99);
    reseal(version);
    EXPECT_EQ(format_offset([&] { decode_checkpoint(version); }), 4);
}

TEST(Checkpoint, GraceLayoutHasNoRuleBranch) {
    ModelDims d;
    d.input_dim = 5;
    d.hidden_dim = 4;
    d.mlp_hidden_dim = 3;
    d.num_layers = 1;
    d.rule_branch = false;
    const ModelParams p = init_params(d, 1);
    const Checkpoint ck = decode_checkpoint(encode_checkpoint(p, 1));
    EXPECT_FALSE(ck.params.rule_branch);
    EXPECT_EQ(ck.params.encoder.size(), 1u);
    EXPECT_TRUE(ck.params == p);
}

TEST(Embeddings, RoundTripAndCorruption) {
    DenseMatrix h(3, 2);
    for (std::size_t i = 0; i < h.size(); ++i) h.data()[i] = 0.25 * static_cast<double>(i) - 0.3;
    const auto bytes = encode_embeddings(h, 77);
    const EmbeddingFile e = decode_embeddings(bytes);
    EXPECT_EQ(e.h, h);
    EXPECT_EQ(e.fingerprint, 77u);
    auto bad = bytes;
    bad[10] ^= 4;
    EXPECT_ERROR_KIND(decode_embeddings(bad), ErrorKind::format);
}

TEST(Files, WriteThenReadFile) {
    const auto path = std::filesystem::temp_directory_path() / ("strgcl_io_" + std::to_string(::getpid()) + ".bin");
    const std::vector<std::uint8_t> bytes{1, 2, 3, 250};
    io::write_file(path, bytes);
    EXPECT_EQ(io::read_file(path), bytes);
    std::filesystem::remove(path);
}
