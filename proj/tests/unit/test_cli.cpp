#include "triage/serialize.hpp"
#include "triage/store.hpp"
#include "triage/synth.hpp"
#include "triage/text.hpp"

#include "test_support.hpp"

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include <array>
#include <cstdio>
#include <sys/wait.h>

using namespace triage;
using testing_support::TempDir;

namespace {

struct Run {
    int code;
    std::string out;
};

/// Runs the CLI with `args` (shell syntax), capturing stdout.
Run cli(const std::string& args, const std::filesystem::path& cwd = std::filesystem::current_path()) {
    const std::string cmd = "cd '" + cwd.string() + "' && '" + std::string(TRIAGE_CLI) + "' " + args + " 2>/dev/null";
    FILE* pipe = popen(cmd.c_str(), "r");
    if (!pipe) return {-1, ""};
    std::string out;
    std::array<char, 4096> buf;
    while (auto n = fread(buf.data(), 1, buf.size(), pipe)) out.append(buf.data(), n);
    const int status = pclose(pipe);
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

std::string synth_csv() { return TRIAGE_SYNTH_CSV; }

}  // namespace

TEST(Cli, HelpMatchesGoldenFiles) {
    const auto golden = testing_support::golden_dir() / "help";
    const auto top = cli("--help");
    EXPECT_EQ(top.code, 0);
    EXPECT_EQ(top.out, read_file(golden / "triage.txt"));
    for (const char* sub : {"probe", "extract", "train", "tune", "evaluate", "classify", "replay", "serve", "synth"}) {
        const auto r = cli(std::string(sub) + " --help");
        EXPECT_EQ(r.code, 0) << sub;
        EXPECT_EQ(r.out, read_file(golden / (std::string(sub) + ".txt"))) << sub;
    }
}

TEST(Cli, ExitCodes) {
    TempDir dir;
    EXPECT_EQ(cli("").code, 2);
    EXPECT_EQ(cli("frobnicate").code, 2);
    EXPECT_EQ(cli("train").code, 2);
    EXPECT_EQ(cli("train /nonexistent.csv").code, 2);
    EXPECT_EQ(cli("evaluate '" + synth_csv() + "' --k 1").code, 2);
    EXPECT_EQ(cli("train '" + synth_csv() + "' --feature-set colors").code, 2);
    EXPECT_EQ(cli("probe example.com --now yesterday").code, 2);

    std::ofstream(dir / "bad.csv") << "domain,label\nx.com,news\n";
    EXPECT_EQ(cli("train '" + (dir / "bad.csv").string() + "'").code, 3);
    std::ofstream(dir / "config.json") << R"({"surprise": true})";
    EXPECT_EQ(cli("replay --config '" + (dir / "config.json").string() + "'").code, 3);
}

TEST(Cli, SynthFixtureMatchesGenerator) {
    const auto expected = synth_dataset(SynthOptions{}, testing_support::corpus_resources().context());
    EXPECT_EQ(dataset_load(synth_csv()), expected);
}

TEST(Cli, ProbeAndClassifyWithFixtures) {
    TempDir dir;
    const auto sites = (testing_support::corpus_dir() / "sites").string();
    const auto probe = cli("probe channel24news.com --fixtures '" + sites + "' --now 2019-02-01");
    ASSERT_EQ(probe.code, 0);
    const auto record = probe_record_from_json(nlohmann::json::parse(probe.out));
    EXPECT_TRUE(record.cert.available);

    model_save(testing_support::synth_model(), dir / "model.json");
    const auto model = (dir / "model.json").string();
    const auto missing = cli("classify --domain nonexistent.invalid --fixtures '" + sites + "' --model '" + model + "'");
    EXPECT_EQ(missing.code, 0);
    EXPECT_EQ(nlohmann::json::parse(missing.out).at("domain"), "nonexistent.invalid");

    std::ofstream(dir / "list.txt") << "channel24news.com\nspringfieldherald.com\n";
    const auto both = cli("classify '" + (dir / "list.txt").string() + "' --fixtures '" + sites + "' --model '" + model +
                          "' --now 2019-02-01");
    ASSERT_EQ(both.code, 0);
    const auto lines = split(trim(both.out), '\n');
    ASSERT_EQ(lines.size(), 2u);
    EXPECT_EQ(nlohmann::json::parse(lines[0]).at("predicted_class"), "disinformation");
    EXPECT_EQ(nlohmann::json::parse(lines[1]).at("predicted_class"), "news");
}

TEST(Cli, TrainWithDomainFeatureSetStaysInMask) {
    TempDir dir;
    ASSERT_EQ(cli("train '" + synth_csv() + "' --feature-set domain --seed 3 --out m.json", dir.path()).code, 0);
    const auto model = model_load(dir / "m.json");
    EXPECT_EQ(model.feature_set, FeatureSet::domain);
    const auto mask = category_mask(FeatureSet::domain);
    const auto source = model.source_of();
    for (const auto& tree : model.forest.trees) {
        for (const auto& node : tree.nodes) {
            if (!node.is_leaf()) {
                EXPECT_TRUE(mask[source[static_cast<std::size_t>(node.feature)]]);
            }
        }
    }
}

TEST(Cli, SeededRunsAreBitReproducible) {
    TempDir a, b;
    for (const auto* dir : {&a, &b}) {
        const auto csv = "'" + synth_csv() + "'";
        ASSERT_EQ(cli("tune --dataset " + csv + " --iters 3 --k 3 --seed 7 --out params.json", dir->path()).code, 0);
        ASSERT_EQ(cli("train " + csv + " --params params.json --seed 7 --out model.json", dir->path()).code, 0);
        ASSERT_EQ(cli("evaluate --dataset " + csv + " --params params.json --k 3 --seed 7 --out report", dir->path()).code,
                  0);
        const auto config = testing_support::write_replay_config(dir->path());
        ASSERT_EQ(cli("replay --config '" + config.string() + "'", dir->path()).code, 0);
    }
    for (const char* f : {"params.json", "model.json", "report/report.json", "report/roc_news.csv", "archive.jsonl",
                          "moderation.jsonl", "dedup_state.tsv"}) {
        EXPECT_EQ(content_version(read_file(a / f)), content_version(read_file(b / f))) << f;
    }
}
