#include <gtest/gtest.h>

#include <fstream>
#include <string>

#include "condlogic/dataset_io.hpp"
#include "test_util.hpp"

namespace condlogic {
namespace {

using testing::run;
using testing::ScratchDir;

const std::string kCli = CONDLOGIC_CLI_PATH;
const std::string kSamples = CONDLOGIC_SAMPLES_DIR;

std::string q(const std::string& s) { return "'" + s + "'"; }

std::size_t count_lines(const std::string& text, const std::string& needle = "") {
  std::size_t n = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string::npos) end = text.size();
    if (text.compare(pos, needle.size(), needle) == 0) ++n;
    pos = end + 1;
  }
  return n;
}

json read_json(const std::string& path) {
  std::ifstream in(path);
  return json::parse(in);
}

TEST(CliSolve, TwoGroupTemplate) {
  const auto r = run(kCli + " solve --file " + q(kSamples + "/two_groups.dsl"));
  EXPECT_EQ(r.exit_code, 0);
  EXPECT_EQ(r.output, "entailed, if C1\n");
}

TEST(CliSolve, Stdin) {
  const auto r = run("printf 'If all (A), then U.\\nFacts: not a.\\nQuestion: Is u correct?\\nLabel: entailed' | " + kCli +
                     " solve --stdin");
  EXPECT_EQ(r.exit_code, 0);
  EXPECT_EQ(r.output, "neutral\n");
}

TEST(CliSolve, AssignmentTable) {
  auto r = run(kCli + " solve --assignments any:3");
  EXPECT_EQ(r.exit_code, 0);
  EXPECT_EQ(count_lines(r.output) - count_lines(r.output, "#"), 27u);
  r = run(kCli + " solve --assignments all:2");
  EXPECT_EQ(count_lines(r.output) - count_lines(r.output, "#"), 9u);
  EXPECT_EQ(run(kCli + " solve --assignments required:2").exit_code, 1);
  EXPECT_EQ(run(kCli + " solve --assignments some:2").exit_code, 1);
}

TEST(CliSolve, MalformedInputReportsLocation) {
  ScratchDir dir("cli");
  testing::write_text(dir.file("bad.dsl"), "If all (A), then U.\nIf both (B, C), then V.\nFacts: a.\nQuestion: Is u correct?");
  const auto r = run(kCli + " solve --file " + q(dir.file("bad.dsl")), true);
  EXPECT_EQ(r.exit_code, 1);
  EXPECT_NE(r.output.find("at line 2, column 4:"), std::string::npos) << r.output;
}

TEST(CliGenerate, MissingSeedIsUsageError) {
  ScratchDir dir("cli");
  const auto r = run(kCli + " generate --bank " + q(kSamples + "/nli_bank.jsonl") + " --out " + q(dir.file("out")));
  EXPECT_EQ(r.exit_code, 1);
}

TEST(CliGenerate, MissingBankIsIoError) {
  ScratchDir dir("cli");
  const auto r = run(kCli + " generate --bank " + q(dir.file("nope.jsonl")) + " --out " + q(dir.file("out")) +
                     " --seed 1");
  EXPECT_EQ(r.exit_code, 2);
}

TEST(CliGenerate, DefaultsThenResolve) {
  ScratchDir dir("cli");
  const auto out = dir.file("out");
  const auto r = run(kCli + " generate --bank " + q(kSamples + "/nli_bank.jsonl") + " --out " + q(out) + " --seed 7");
  ASSERT_EQ(r.exit_code, 0) << r.output;
  EXPECT_NE(r.output.find("templates: 65"), std::string::npos) << r.output;

  const auto dev = read_split(out + "/dev.jsonl");
  const auto test = read_split(out + "/test.jsonl");
  EXPECT_EQ(dev.examples.size(), 5000u);
  EXPECT_EQ(test.examples.size(), 5000u);
  ASSERT_TRUE(dev.manifest && test.manifest);
  EXPECT_EQ(dev.manifest->count, 5000u);
  EXPECT_EQ(dev.manifest->master_seed, 7u);
  EXPECT_EQ(dev.manifest->config_hash, test.manifest->config_hash);

  ReadReport report;
  EXPECT_EQ(read_templates(out + "/templates.jsonl", report).size(), 65u);

  const auto solved = run(kCli + " solve --file " + q(out + "/dev.jsonl"));
  EXPECT_EQ(solved.exit_code, 0);
  EXPECT_NE(solved.output.find("consistent with gold: 5000/5000"), std::string::npos);

  // same flags, same bytes
  const auto again = dir.file("again");
  run(kCli + " generate --bank " + q(kSamples + "/nli_bank.jsonl") + " --out " + q(again) + " --seed 7");
  std::ifstream a(out + "/dev.jsonl");
  std::ifstream b(again + "/dev.jsonl");
  EXPECT_EQ(std::string(std::istreambuf_iterator<char>(a), {}), std::string(std::istreambuf_iterator<char>(b), {}));
}

TEST(CliGenerate, TwentyConditions) {
  ScratchDir dir("cli");
  const auto out = dir.file("out");
  const auto r = run(kCli + " generate --bank " + q(kSamples + "/nli_bank.jsonl") + " --out " + q(out) +
                     " --seed 3 --max-conditions 20 --templates 10 --dev 50 --test 50 --train 20");
  ASSERT_EQ(r.exit_code, 0);
  EXPECT_EQ(read_split(out + "/train.jsonl").examples.size(), 20u);
  const auto solved = run(kCli + " solve --file " + q(out + "/dev.jsonl"));
  EXPECT_EQ(solved.exit_code, 0);
  const auto templates = run(kCli + " solve --file " + q(out + "/templates.jsonl"));
  EXPECT_EQ(templates.exit_code, 0);
  EXPECT_EQ(count_lines(templates.output, "T0"), 10u);
}

TEST(CliGenerate, BadConfigIsUsageError) {
  ScratchDir dir("cli");
  const auto r = run(kCli + " generate --bank " + q(kSamples + "/nli_bank.jsonl") + " --out " + q(dir.file("out")) +
                     " --seed 3 --max-conditions 0");
  EXPECT_EQ(r.exit_code, 1);
}

TEST(CliParseContext, FuneralPage) {
  ScratchDir dir("cli");
  const auto r = run(kCli + " parse-context --in " + q(kSamples + "/funeral_page.jsonl") + " --out " +
                     q(dir.file("groups.jsonl")) + " --stats");
  ASSERT_EQ(r.exit_code, 0);
  EXPECT_NE(r.output.find("groups: 1  conditions: 2"), std::string::npos) << r.output;
  EXPECT_NE(r.output.find("leaf depth histogram"), std::string::npos);
  std::ifstream in(dir.file("groups.jsonl"));
  std::string line;
  ASSERT_TRUE(std::getline(in, line));
  const auto g = group_from_json(json::parse(line));
  EXPECT_EQ(g.conditions.size(), 2u);
  EXPECT_NE(g.result_text.find("up to $1200"), std::string::npos);
}

TEST(CliParseContext, FlatParagraphs) {
  ScratchDir dir("cli");
  testing::write_text(dir.file("flat.jsonl"),
                      "{\"tag\":\"p\",\"text\":\"one\"}\n{\"tag\":\"p\",\"text\":\"two\"}\n{\"tag\":\"p\",\"text\":\"three\"}\n");
  const auto r = run(kCli + " parse-context --in " + q(dir.file("flat.jsonl")) + " --out " + q(dir.file("g.jsonl")));
  EXPECT_EQ(r.exit_code, 0);
  EXPECT_NE(r.output.find("groups: 3  conditions: 3"), std::string::npos);
}

TEST(CliParseContext, EduFormat) {
  ScratchDir dir("cli");
  const auto r = run(kCli + " parse-context --format edu --in " + q(kSamples + "/edu_units.jsonl") + " --out " +
                     q(dir.file("g.jsonl")));
  EXPECT_EQ(r.exit_code, 0);
  EXPECT_NE(r.output.find("groups: 1  conditions: 3"), std::string::npos) << r.output;
}

TEST(CliParseContext, EmptyOrMissingInput) {
  ScratchDir dir("cli");
  testing::write_text(dir.file("empty.jsonl"), "");
  EXPECT_EQ(run(kCli + " parse-context --in " + q(dir.file("empty.jsonl")) + " --out " + q(dir.file("g.jsonl"))).exit_code,
            2);
  EXPECT_EQ(run(kCli + " parse-context --in " + q(dir.file("missing.jsonl")) + " --out " + q(dir.file("g.jsonl"))).exit_code,
            2);
}

// A small gold file in the example schema with optional reference answers
// and follow-up questions.
std::string gold_lines() {
  return "{\"id\":\"a\",\"answer_label\":\"yes\",\"unsatisfied\":[],\"answers\":[\"up to $1200\"],"
         "\"followup_question\":\"Are you the partner of the deceased ?\"}\n"
         "{\"id\":\"b\",\"answer_label\":\"no\",\"unsatisfied\":[\"C1\"],"
         "\"followup_question\":\"Do you claim other benefits ?\"}\n"
         "{\"id\":\"c\",\"answer_label\":\"inquire\",\"unsatisfied\":[\"C0\",\"C2\"],"
         "\"followup_question\":\"Do you live in England ?\"}\n";
}

TEST(CliEvaluate, SelfEvaluationAllProfiles) {
  ScratchDir dir("cli");
  const auto gold = dir.file("gold.jsonl");
  testing::write_text(gold, gold_lines());
  for (const std::string profile : {"condnli", "conditionalqa", "sharc"}) {
    const auto report = dir.file(profile + ".json");
    const auto r = run(kCli + " evaluate --pred " + q(gold) + " --gold " + q(gold) + " --profile " + profile +
                       " --out " + q(report));
    ASSERT_EQ(r.exit_code, 0) << profile;
    const auto j = read_json(report);
    for (const char* key : {"em", "f1", "conditional_em", "conditional_f1", "condition_p", "condition_r",
                            "condition_f1", "micro_acc", "macro_acc", "bleu1", "bleu4"}) {
      EXPECT_EQ(j.at(key).get<double>(), 1.0) << profile << " " << key;
    }
    EXPECT_EQ(j.at("n_examples").get<int>(), 3);
  }
}

TEST(CliEvaluate, ColumnsPerProfile) {
  ScratchDir dir("cli");
  const auto gold = dir.file("gold.jsonl");
  testing::write_text(gold, gold_lines());
  auto r = run(kCli + " evaluate --pred " + q(gold) + " --gold " + q(gold) + " --profile conditionalqa");
  EXPECT_NE(r.output.find("EM w/ conds"), std::string::npos);
  EXPECT_NE(r.output.find("F1 w/ conds"), std::string::npos);
  EXPECT_EQ(r.output.find("BLEU"), std::string::npos);
  r = run(kCli + " evaluate --pred " + q(gold) + " --gold " + q(gold) + " --profile sharc");
  EXPECT_NE(r.output.find("micro acc"), std::string::npos);
  EXPECT_NE(r.output.find("macro acc"), std::string::npos);
  EXPECT_NE(r.output.find("BLEU-1"), std::string::npos);
  EXPECT_NE(r.output.find("BLEU-4"), std::string::npos);
}

TEST(CliEvaluate, PoorScoresStillExitZero) {
  ScratchDir dir("cli");
  const auto gold = dir.file("gold.jsonl");
  testing::write_text(gold, gold_lines());
  testing::write_text(dir.file("pred.jsonl"), "{\"id\":\"a\",\"answer\":\"nothing\",\"conditions\":[\"C9\"]}\n");
  const auto per = dir.file("per.jsonl");
  const auto r = run(kCli + " evaluate --pred " + q(dir.file("pred.jsonl")) + " --gold " + q(gold) +
                     " --profile conditionalqa --per-example " + q(per));
  EXPECT_EQ(r.exit_code, 0);
  std::ifstream in(per);
  std::size_t n = 0;
  for (std::string line; std::getline(in, line);) ++n;
  EXPECT_EQ(n, 3u);
}

TEST(CliEvaluate, DuplicateIdsAndBadInputs) {
  ScratchDir dir("cli");
  const auto gold = dir.file("gold.jsonl");
  testing::write_text(gold, gold_lines());
  testing::write_text(dir.file("dup.jsonl"), "{\"id\":\"a\",\"answer\":\"yes\",\"conditions\":[]}\n"
                                             "{\"id\":\"a\",\"answer\":\"no\",\"conditions\":[]}\n");
  EXPECT_EQ(run(kCli + " evaluate --pred " + q(dir.file("dup.jsonl")) + " --gold " + q(gold) + " --profile sharc")
                .exit_code,
            1);
  EXPECT_EQ(run(kCli + " evaluate --pred " + q(gold) + " --gold " + q(gold) + " --profile squad").exit_code, 1);
  EXPECT_EQ(run(kCli + " evaluate --pred " + q(dir.file("none.jsonl")) + " --gold " + q(gold) + " --profile sharc")
                .exit_code,
            2);
}

TEST(Cli, NoSubcommandIsUsageError) { EXPECT_EQ(run(kCli).exit_code, 1); }

}  // namespace
}  // namespace condlogic
