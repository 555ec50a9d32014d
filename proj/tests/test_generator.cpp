#include <gtest/gtest.h>

#include <map>
#include <set>
#include <sstream>
#include <string>

#include "condlogic/dataset_io.hpp"
#include "condlogic/generator.hpp"
#include "test_util.hpp"

namespace condlogic {
namespace {

TEST(GenerateTemplate, StructurallyValid) {
  GenConfig config;
  config.seed = 1234;
  config.max_conditions = 4;
  const auto t = generate_template(config, 0);
  EXPECT_NO_THROW(validate(t, 4));
  EXPECT_GE(condition_count(t), 1u);
  EXPECT_LE(condition_count(t), 4u);
  EXPECT_FALSE(t.facts.empty());
  ASSERT_TRUE(t.target.has_value());
  EXPECT_EQ(relevant_group(t).has_value(), *t.target != TargetRelation::Irrelevant);
}

TEST(GenerateTemplate, DeterministicForSeedAndIndex) {
  GenConfig config;
  config.seed = 42;
  EXPECT_EQ(generate_template(config, 10), generate_template(config, 10));
  EXPECT_EQ(generate_template(config, 10), generate_templates(config)[10]);
  config.seed = 43;
  EXPECT_NE(generate_templates(config), [] {
    GenConfig c;
    c.seed = 42;
    return generate_templates(c);
  }());
}

TEST(GenerateTemplate, SixtyFiveDistinct) {
  GenConfig config;
  config.seed = 7;
  const auto templates = generate_templates(config);
  ASSERT_EQ(templates.size(), 65u);
  std::set<std::string> canonical;
  for (const auto& t : templates) {
    EXPECT_LE(condition_count(t), 6u);
    EXPECT_NO_THROW(validate(t, 6));
    canonical.insert(render_template_dsl(t));
  }
  EXPECT_EQ(canonical.size(), 65u);
}

TEST(GenerateTemplate, TwentyConditions) {
  GenConfig config;
  config.seed = 3;
  config.max_conditions = 20;
  config.min_conditions = 20;
  config.n_templates = 10;
  for (const auto& t : generate_templates(config)) {
    EXPECT_EQ(condition_count(t), 20u);
    EXPECT_NO_THROW(solve_template(t));
  }
}

TEST(GenerateTemplate, ExhaustionIsReported) {
  GenConfig config;
  config.max_conditions = 1;
  config.max_attempts = 200;
  // one condition admits only a handful of distinct templates
  EXPECT_THROW(generate_templates(config), GenerationExhausted);
}

TEST(GenerateTemplate, IndexOutOfRange) {
  GenConfig config;
  config.n_templates = 3;
  EXPECT_THROW(generate_template(config, 3), InvariantError);
}

TEST(GenConfig, Validation) {
  GenConfig c;
  c.max_conditions = 0;
  EXPECT_THROW(c.validate(), InvariantError);
  c = {};
  c.fact_probability = 1.5;
  EXPECT_THROW(c.validate(), InvariantError);
  c = {};
  c.min_conditions = 7;
  EXPECT_THROW(c.validate(), InvariantError);
}

TEST(SolveTemplate, TwoGroupTemplate) {
  const auto t = parse_template_dsl(
      "If all (A, B), then U.\nIf any (not C, D), then V.\nFacts: a, c, not d.\nQuestion: Is u correct?\n"
      "Label: entailed");
  EXPECT_EQ(solve_template(t), (Verdict{AnswerLabel::Entailed, {"B"}}));
}

TEST(SolveTemplate, QuestionMatchingNoGroup) {
  const auto t =
      parse_template_dsl("If all (A, B), then U.\nFacts: a.\nQuestion: Is v correct?\nLabel: irrelevant");
  EXPECT_EQ(solve_template(t), (Verdict{AnswerLabel::Irrelevant, {}}));
}

TEST(SolveTemplate, FullySupportedAllGroup) {
  const auto t =
      parse_template_dsl("If all (A, B, C), then U.\nFacts: a, b, c.\nQuestion: Is u correct?\nLabel: contradicted");
  // the oracle table has exactly this row satisfied
  bool satisfied = false;
  for (const auto& row : enumerate_assignments(LogicalType::All, 3)) {
    if (row.assignment == std::vector<EvidenceState>(3, EvidenceState::Entailed)) {
      satisfied = row.status == GroupStatus::Satisfied;
    }
  }
  ASSERT_TRUE(satisfied);
  EXPECT_EQ(solve_template(t), (Verdict{AnswerLabel::Contradicted, {}}));
}

TEST(SolveTemplate, MissingLabelIsAnError) {
  const auto t = parse_template_dsl("If all (A), then U.\nFacts: a.\nQuestion: Is u correct?");
  EXPECT_THROW(solve_template(t), InvariantError);
}

// ---------------------------------------------------------------------------
// Bank

TEST(LoadNliBank, OneRecordPerLabel) {
  std::istringstream in(
      R"({"premise": "p1", "hypothesis": "h1", "label": "entailment"})"
      "\n"
      R"({"premise": "p2", "hypothesis": "h2", "label": "contradiction"})"
      "\n"
      R"({"premise": "p3", "hypothesis": "h3", "label": "neutral"})"
      "\n");
  const auto bank = load_nli_bank(in);
  EXPECT_EQ(bank.count(NliLabel::Entailment), 1u);
  EXPECT_EQ(bank.count(NliLabel::Contradiction), 1u);
  EXPECT_EQ(bank.count(NliLabel::Neutral), 1u);
  EXPECT_TRUE(bank.rejected.empty());
}

TEST(LoadNliBank, UnknownLabelRejected) {
  std::istringstream in(
      R"({"premise": "p1", "hypothesis": "h1", "label": "entailment"})"
      "\n"
      R"({"premise": "p2", "hypothesis": "h2", "label": "maybe"})"
      "\n"
      "not json\n");
  const auto bank = load_nli_bank(in);
  EXPECT_EQ(bank.size(), 1u);
  ASSERT_EQ(bank.rejected.size(), 2u);
  EXPECT_EQ(bank.rejected[0].line, 2u);
  EXPECT_EQ(bank.rejected[1].line, 3u);
}

TEST(LoadNliBank, EmptyAndMissing) {
  std::istringstream empty("");
  EXPECT_THROW(load_nli_bank(empty), InvariantError);
  EXPECT_THROW(load_nli_bank(std::string("/nonexistent/bank.jsonl")), IoError);
}

// ---------------------------------------------------------------------------
// Instantiation

NliBank two_group_template_bank() {
  NliBank bank;
  bank.add({"Aged 59 1/2 or older.", "Tom is 65 years old.", NliLabel::Entailment});
  bank.add({"Has not applied before.", "Rejected last year.", NliLabel::Contradiction});
  bank.add({"Get at least $60 a week", "Eligible for $60 a week.", NliLabel::Neutral});
  return bank;
}

TEST(Instantiate, ConditionAndFactFromOneRecord) {
  const auto t = parse_template_dsl("If all (A, B), then U.\nFacts: a.\nQuestion: Is u correct?\nLabel: neutral");
  const auto ex = instantiate(t, "T000", two_group_template_bank(), 5);
  ASSERT_EQ(ex.context.size(), 1u);
  EXPECT_EQ(ex.context[0].conditions[0].id, "C0");
  EXPECT_EQ(ex.context[0].conditions[0].text, "Aged 59 1/2 or older.");
  EXPECT_EQ(ex.facts, std::vector<std::string>{"Tom is 65 years old."});
  EXPECT_EQ(ex.context[0].result_text, "Get at least $60 a week");
  EXPECT_EQ(ex.question, "Eligible for $60 a week.");
  EXPECT_EQ(ex.gold, (Verdict{AnswerLabel::Neutral, {"C1"}}));
}

TEST(Instantiate, ContradictingFactUsesContradictionRecord) {
  const auto t =
      parse_template_dsl("If any (not C, D), then V.\nFacts: c, not d.\nQuestion: Is v correct?\nLabel: entailed");
  const auto bank = testing::synthetic_bank(50);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto ex = instantiate(t, "T001", bank, seed);
    ASSERT_EQ(ex.facts.size(), 2u);
    EXPECT_NE(ex.facts[0].find("entailment"), std::string::npos);
    EXPECT_NE(ex.facts[1].find("contradiction"), std::string::npos);
    EXPECT_EQ(ex.context[0].conditions[0].text.rfind("not ", 0), 0u);
    // the result/question pair carries the target relation
    EXPECT_NE(ex.question.find("entailment"), std::string::npos);
    EXPECT_EQ(ex.gold, (Verdict{AnswerLabel::Neutral, {}}));
  }
}

TEST(Instantiate, ByteIdenticalForSameInputs) {
  GenConfig config;
  config.seed = 11;
  const auto templates = generate_templates(config);
  const auto bank = testing::synthetic_bank(100);
  for (std::size_t i = 0; i < templates.size(); ++i) {
    const auto a = example_to_json(instantiate(templates[i], template_id(i), bank, 77)).dump();
    const auto b = example_to_json(instantiate(templates[i], template_id(i), bank, 77)).dump();
    EXPECT_EQ(a, b);
  }
}

TEST(Instantiate, InsufficientBank) {
  NliBank bank;
  bank.add({"p", "h", NliLabel::Entailment});
  const auto t = parse_template_dsl("If all (A), then U.\nFacts: not a.\nQuestion: Is u correct?\nLabel: entailed");
  EXPECT_THROW(instantiate(t, "T000", bank, 1), InsufficientBank);
}

TEST(Instantiate, BankDiscipline) {
  GenConfig config;
  config.seed = 21;
  const auto bank = testing::synthetic_bank(200);
  const ExampleGenerator gen(config, bank);
  for (std::size_t i = 0; i < 300; ++i) {
    const auto ex = gen.make(Split::Dev, i);
    const auto k = std::stoul(ex.template_id.substr(1));
    const auto& t = gen.templates()[k];
    ASSERT_EQ(ex.facts.size(), t.facts.size());
    for (std::size_t f = 0; f < t.facts.size(); ++f) {
      const char* want = t.facts[f].negated ? "contradiction" : "entailment";
      EXPECT_NE(ex.facts[f].find(want), std::string::npos) << ex.facts[f];
    }
    if (t.target != TargetRelation::Irrelevant) {
      EXPECT_NE(ex.question.find(to_string(nli_label_for(*t.target))), std::string::npos);
    }
  }
}

// ---------------------------------------------------------------------------
// Datasets

TEST(GenerateDataset, DefaultSplitSizes) {
  GenConfig config;
  config.seed = 2024;
  const auto bank = testing::synthetic_bank(300);
  const ExampleGenerator gen(config, bank);
  const auto dev = collect(gen, Split::Dev);
  EXPECT_EQ(dev.size(), 5000u);

  std::map<AnswerLabel, std::size_t> histogram;
  std::set<std::uint64_t> dev_seeds;
  for (const auto& ex : dev) {
    ++histogram[ex.gold.label];
    dev_seeds.insert(ex.seed);
  }
  for (auto l : label_space(TaskProfile::CondNli)) EXPECT_GT(histogram[l], 0u) << to_string(l);

  for (const auto& ex : collect(gen, Split::Test, 500)) EXPECT_EQ(dev_seeds.count(ex.seed), 0u);
}

TEST(GenerateDataset, SameSeedSameSequence) {
  GenConfig config;
  config.seed = 8;
  config.n_dev = 200;
  const auto bank = testing::synthetic_bank(50);
  const ExampleGenerator a(config, bank);
  const ExampleGenerator b(config, bank);
  EXPECT_EQ(collect(a, Split::Dev), collect(b, Split::Dev));
}

TEST(GenerateDataset, TrainStreamIsUnbounded) {
  GenConfig config;
  config.n_dev = 1;
  const auto bank = testing::synthetic_bank(20);
  const ExampleGenerator gen(config, bank);
  auto stream = generate_dataset(gen, Split::Train);
  for (int i = 0; i < 7000; ++i) ASSERT_TRUE(stream.next().has_value());
  auto dev = generate_dataset(gen, Split::Dev);
  EXPECT_TRUE(dev.next().has_value());
  EXPECT_FALSE(dev.next().has_value());
}

TEST(GenerateDataset, GoldMatchesTemplateOracle) {
  GenConfig config;
  config.seed = 77;
  config.n_dev = 1000;
  const auto bank = testing::synthetic_bank(100);
  const ExampleGenerator gen(config, bank);
  for (const auto& ex : collect(gen, Split::Dev)) {
    const auto& t = gen.templates()[std::stoul(ex.template_id.substr(1))];
    auto v = solve_template(t);
    const auto ids = condition_ids(t);
    for (auto& id : v.unsatisfied) id = ids.at(id);
    EXPECT_EQ(v, ex.gold);
  }
}

}  // namespace
}  // namespace condlogic
