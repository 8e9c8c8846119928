// SPDX-License-Identifier: Apache-2.0
#include <fstream>

#include "support/cli_examples.hpp"
#include "support/testing.hpp"

using namespace strgcl;
using hand::CliFixture;
using hand::quoted;

namespace {

const std::filesystem::path kCli = STRGCL_CLI_PATH;

std::string common(const CliFixture& fx) { return " --config " + quoted(fx.config) + " --data " + quoted(fx.data); }

} // namespace

TEST(CliExamples, All) {
    for (const auto& e : hand::cli_examples(kCli)) EXPECT_EQ(e.deviation(), 0.0) << e.name;
}

TEST(Cli, BadConfigExitsTwo) {
    const CliFixture fx(kCli, "badcfg");
    std::ofstream(fx.dir / "bad.json") << R"({"tau": -1})";
    EXPECT_EQ(fx.run("train --config " + quoted(fx.dir / "bad.json") + " --data " + quoted(fx.data) + " --out " +
                     quoted(fx.dir / "o")),
              2);
    std::ofstream(fx.dir / "unknown.json") << R"({"hidden": 8})";
    EXPECT_EQ(fx.run("train --config " + quoted(fx.dir / "unknown.json") + " --data " + quoted(fx.data) + " --out " +
                     quoted(fx.dir / "o")),
              2);
    EXPECT_FALSE(std::filesystem::exists(fx.dir / "o"));
}

TEST(Cli, CorruptGraphExitsThree) {
    const CliFixture fx(kCli, "corrupt");
    auto bytes = io::read_file(fx.data);
    bytes[bytes.size() / 2] ^= 0xff;
    io::write_file(fx.dir / "bad.sgr1", bytes);
    EXPECT_EQ(fx.run("train --config " + quoted(fx.config) + " --data " + quoted(fx.dir / "bad.sgr1") + " --out " +
                     quoted(fx.dir / "o")),
              3);
    EXPECT_EQ(fx.run("rules-dump --data " + quoted(fx.dir / "missing.sgr1") + " --out " + quoted(fx.dir / "r")), 3);
}

TEST(Cli, ExistingOutputNeedsForce) {
    const CliFixture fx(kCli, "force");
    const auto out = fx.dir / "run";
    ASSERT_EQ(fx.run("train" + common(fx) + " --out " + quoted(out)), 0);
    EXPECT_EQ(fx.run("train" + common(fx) + " --out " + quoted(out)), 2);
    EXPECT_EQ(fx.run("train" + common(fx) + " --out " + quoted(out) + " --force"), 0);
    for (const auto& entry : std::filesystem::directory_iterator(fx.dir))
        EXPECT_EQ(entry.path().filename().string().find(".partial"), std::string::npos) << entry.path();
}

TEST(Cli, EmbedFromCheckpointMatchesLibrary) {
    const CliFixture fx(kCli, "embed");
    ASSERT_EQ(fx.run("train" + common(fx) + " --out " + quoted(fx.dir / "run")), 0);
    ASSERT_EQ(fx.run("embed --checkpoint " + quoted(fx.dir / "run/checkpoint.sgc1") + " --data " + quoted(fx.data) +
                     " --out " + quoted(fx.dir / "emb")),
              0);
    const EmbeddingFile e = load_embeddings(fx.dir / "emb/embeddings.sge1");
    const Checkpoint ck = load_checkpoint(fx.dir / "run/checkpoint.sgc1");
    EXPECT_EQ(e.fingerprint, ck.fingerprint);
    EXPECT_EQ(e.h, embed(load_graph(fx.data), ck.params));
}

TEST(Cli, EvalCommandsWriteReports) {
    const CliFixture fx(kCli, "eval");
    ASSERT_EQ(fx.run("eval-classify --probe-seeds 3" + common(fx) + " --out " + quoted(fx.dir / "cls")), 0);
    const auto cls = nlohmann::json::parse(std::ifstream(fx.dir / "cls/eval_classify.json"));
    EXPECT_TRUE(cls.dump().find("accuracy_mean") != std::string::npos) << cls.dump();
    ASSERT_EQ(fx.run("eval-cluster" + common(fx) + " --out " + quoted(fx.dir / "clu")), 0);
    const auto clu = nlohmann::json::parse(std::ifstream(fx.dir / "clu/eval_cluster.json"));
    EXPECT_TRUE(clu.dump().find("nmi") != std::string::npos) << clu.dump();
}

TEST(Cli, RulesDumpWritesPerNodeCsv) {
    const CliFixture fx(kCli, "rules");
    ASSERT_EQ(fx.run("rules-dump --pca-dim 8 --data " + quoted(fx.data) + " --out " + quoted(fx.dir / "r")), 0);
    std::ifstream csv(fx.dir / "r/rules.csv");
    std::size_t lines = 0;
    for (std::string l; std::getline(csv, l);) ++lines;
    EXPECT_EQ(lines, 61u);
}

TEST(Cli, SelfcheckPasses) {
    const CliFixture fx(kCli, "self");
    EXPECT_EQ(fx.run("selfcheck --out " + quoted(fx.dir / "s")), 0);
    const auto j = nlohmann::json::parse(std::ifstream(fx.dir / "s/selfcheck.json"));
    EXPECT_FALSE(j.empty());
}

TEST(Cli, EvalFromCheckpointSkipsTraining) {
    const CliFixture fx(kCli, "evalck");
    ASSERT_EQ(fx.run("train" + common(fx) + " --out " + quoted(fx.dir / "run")), 0);
    const auto ck = fx.dir / "run/checkpoint.sgc1";
    ASSERT_EQ(fx.run("eval-classify --probe-seeds 2 --checkpoint " + quoted(ck) + common(fx) + " --out " + quoted(fx.dir / "a")), 0);
    ASSERT_EQ(fx.run("eval-classify --probe-seeds 2 --checkpoint " + quoted(ck) + common(fx) + " --out " + quoted(fx.dir / "b")), 0);
    const auto a = nlohmann::json::parse(std::ifstream(fx.dir / "a/eval_classify.json"));
    const auto b = nlohmann::json::parse(std::ifstream(fx.dir / "b/eval_classify.json"));
    EXPECT_EQ(a["fingerprint"], hex64(load_checkpoint(ck).fingerprint));
    EXPECT_EQ(a, b);
}
