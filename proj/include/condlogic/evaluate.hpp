#pragma once

// Scoring prediction files against gold files.
//
// Prediction records: {"id", "answer", "conditions": [...], "label"?, "question"?}.
// Gold records use the example schema ("id", "answer_label", "unsatisfied")
// and may add "answers" (reference answer strings, defaulting to the label)
// and "followup_question" (reference for generated questions). A gold-shaped
// record is also accepted as a prediction, so a gold file can be scored
// against itself.

#include <cstddef>
#include <iomanip>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "condlogic/dataset_io.hpp"
#include "condlogic/error.hpp"
#include "condlogic/logic.hpp"
#include "condlogic/metrics.hpp"

namespace condlogic {

struct Prediction {
  std::string example_id;
  std::string answer_text;
  std::set<std::string> unsatisfied;
  std::optional<std::string> label;
  std::optional<std::string> generated_question;
};

struct GoldRecord {
  std::string example_id;
  std::vector<std::string> answers;
  std::set<std::string> unsatisfied;
  std::optional<std::string> label;
  std::optional<std::string> reference_question;
};

inline Prediction prediction_from_json(const json& j) {
  Prediction p;
  p.example_id = j.at("id").get<std::string>();
  if (j.contains("answer")) {
    p.answer_text = j.at("answer").get<std::string>();
    for (const auto& c : j.value("conditions", json::array())) p.unsatisfied.insert(c.get<std::string>());
    if (j.contains("label")) p.label = j.at("label").get<std::string>();
    if (j.contains("question")) p.generated_question = j.at("question").get<std::string>();
  } else {
    // gold-shaped record
    const auto label = j.at("answer_label").get<std::string>();
    const auto answers = j.value("answers", std::vector<std::string>{});
    p.answer_text = answers.empty() ? label : answers.front();
    for (const auto& c : j.at("unsatisfied")) p.unsatisfied.insert(c.get<std::string>());
    p.label = label;
    if (j.contains("followup_question")) p.generated_question = j.at("followup_question").get<std::string>();
  }
  return p;
}

inline GoldRecord gold_from_json(const json& j) {
  GoldRecord g;
  g.example_id = j.at("id").get<std::string>();
  const auto label = j.at("answer_label").get<std::string>();
  g.label = label;
  g.answers = j.value("answers", std::vector<std::string>{});
  if (g.answers.empty()) g.answers.push_back(label);
  for (const auto& c : j.at("unsatisfied")) g.unsatisfied.insert(c.get<std::string>());
  if (j.contains("followup_question")) g.reference_question = j.at("followup_question").get<std::string>();
  return g;
}

struct ExampleScore {
  std::string example_id;
  bool predicted = false;
  double em = 0.0;
  double f1 = 0.0;
  double condition_p = 0.0;
  double condition_r = 0.0;
  double condition_f1 = 0.0;
  double conditional_em = 0.0;
  double conditional_f1 = 0.0;
  bool label_correct = false;
  std::optional<double> bleu1;
  std::optional<double> bleu4;
};

inline ConditionalScore conditional_em_f1(const Prediction& pred, const GoldRecord& gold) {
  const auto answer = answer_em_f1(pred.answer_text, gold.answers);
  return conditional_em_f1(answer, condition_prf(pred.unsatisfied, gold.unsatisfied).f1);
}

// A missing prediction scores as an empty answer with no conditions.
inline ExampleScore score_example(const Prediction* pred, const GoldRecord& gold) {
  static const Prediction kEmpty{};
  const Prediction& p = pred ? *pred : kEmpty;
  ExampleScore s;
  s.example_id = gold.example_id;
  s.predicted = pred != nullptr;
  const auto answer = pred ? answer_em_f1(p.answer_text, gold.answers) : AnswerScore{};
  const auto cond = condition_prf(p.unsatisfied, gold.unsatisfied);
  const auto conditional = conditional_em_f1(answer, cond.f1);
  s.em = answer.em;
  s.f1 = answer.f1;
  s.condition_p = cond.precision;
  s.condition_r = cond.recall;
  s.condition_f1 = cond.f1;
  s.conditional_em = conditional.em;
  s.conditional_f1 = conditional.f1;
  s.label_correct = pred && gold.label && p.label.value_or(p.answer_text) == *gold.label;
  if (gold.reference_question) {
    const auto q = p.generated_question.value_or("");
    s.bleu1 = bleu(q, *gold.reference_question, 1);
    s.bleu4 = bleu(q, *gold.reference_question, 4);
  }
  return s;
}

struct EvalReport {
  TaskProfile profile = TaskProfile::CondNli;
  double em = 0.0;
  double f1 = 0.0;
  double conditional_em = 0.0;
  double conditional_f1 = 0.0;
  double condition_p = 0.0;
  double condition_r = 0.0;
  double condition_f1 = 0.0;
  double micro_acc = 0.0;
  double macro_acc = 0.0;
  double bleu1 = 0.0;
  double bleu4 = 0.0;
  std::size_t n_examples = 0;
  std::size_t n_missing = 0;     // gold ids without a prediction
  std::size_t n_unmatched = 0;   // predictions without a gold id
  std::size_t n_labeled = 0;     // gold records with a label
  std::size_t n_questions = 0;   // gold records with a reference question
};

inline json report_to_json(const EvalReport& r) {
  return {{"profile", std::string(to_string(r.profile))},
          {"em", r.em},
          {"f1", r.f1},
          {"conditional_em", r.conditional_em},
          {"conditional_f1", r.conditional_f1},
          {"condition_p", r.condition_p},
          {"condition_r", r.condition_r},
          {"condition_f1", r.condition_f1},
          {"micro_acc", r.micro_acc},
          {"macro_acc", r.macro_acc},
          {"bleu1", r.bleu1},
          {"bleu4", r.bleu4},
          {"n_examples", r.n_examples},
          {"n_missing", r.n_missing},
          {"n_unmatched", r.n_unmatched},
          {"n_labeled", r.n_labeled},
          {"n_questions", r.n_questions}};
}

inline json score_to_json(const ExampleScore& s) {
  json j = {{"id", s.example_id},       {"predicted", s.predicted},         {"em", s.em},
            {"f1", s.f1},               {"condition_p", s.condition_p},     {"condition_r", s.condition_r},
            {"condition_f1", s.condition_f1}, {"conditional_em", s.conditional_em},
            {"conditional_f1", s.conditional_f1}, {"label_correct", s.label_correct}};
  if (s.bleu1) j["bleu1"] = *s.bleu1;
  if (s.bleu4) j["bleu4"] = *s.bleu4;
  return j;
}

// Means over gold examples; label accuracy over labeled golds; corpus BLEU
// over golds with a reference question.
inline EvalReport evaluate(const std::vector<Prediction>& preds, const std::vector<GoldRecord>& golds,
                           TaskProfile profile, std::vector<ExampleScore>* per_example = nullptr) {
  std::map<std::string, const Prediction*> by_id;
  for (const auto& p : preds) {
    if (!by_id.emplace(p.example_id, &p).second) throw InvariantError("duplicate prediction id '" + p.example_id + "'");
  }
  std::set<std::string> gold_ids;
  for (const auto& g : golds) {
    if (!gold_ids.insert(g.example_id).second) throw InvariantError("duplicate gold id '" + g.example_id + "'");
  }

  EvalReport r;
  r.profile = profile;
  r.n_examples = golds.size();
  for (const auto& p : preds) r.n_unmatched += gold_ids.count(p.example_id) ? 0 : 1;

  std::vector<std::string> pred_labels;
  std::vector<std::string> gold_labels;
  BleuStats b1(1);
  BleuStats b4(4);
  for (const auto& g : golds) {
    const auto it = by_id.find(g.example_id);
    const Prediction* p = it == by_id.end() ? nullptr : it->second;
    if (!p) ++r.n_missing;
    const auto s = score_example(p, g);
    r.em += s.em;
    r.f1 += s.f1;
    r.conditional_em += s.conditional_em;
    r.conditional_f1 += s.conditional_f1;
    r.condition_p += s.condition_p;
    r.condition_r += s.condition_r;
    r.condition_f1 += s.condition_f1;
    if (g.label) {
      gold_labels.push_back(*g.label);
      pred_labels.push_back(p ? p->label.value_or(p->answer_text) : std::string());
    }
    if (g.reference_question) {
      const auto q = p ? p->generated_question.value_or("") : std::string();
      b1 += bleu_stats(q, *g.reference_question, 1);
      b4 += bleu_stats(q, *g.reference_question, 4);
      ++r.n_questions;
    }
    if (per_example) per_example->push_back(s);
  }
  if (!golds.empty()) {
    const double n = static_cast<double>(golds.size());
    for (double* v : {&r.em, &r.f1, &r.conditional_em, &r.conditional_f1, &r.condition_p, &r.condition_r,
                      &r.condition_f1}) {
      *v /= n;
    }
  }
  r.n_labeled = gold_labels.size();
  const auto acc = label_accuracy(pred_labels, gold_labels);
  r.micro_acc = acc.micro;
  r.macro_acc = acc.macro;
  r.bleu1 = b1.score();
  r.bleu4 = b4.score();
  return r;
}

template <typename T>
std::vector<T> read_records(const std::string& path, T (*convert)(const json&)) {
  auto in = open_input(path);
  ReadReport report;
  std::vector<T> out;
  for_each_record(in, [&](const json& j, std::size_t) { out.push_back(convert(j)); }, report);
  if (!report.errors.empty()) {
    const auto& e = report.errors.front();
    throw ParseError("invalid record in '" + path + "': " + e.message, e.line, 1);
  }
  return out;
}

inline EvalReport evaluate_files(const std::string& pred_path, const std::string& gold_path, TaskProfile profile,
                                 std::vector<ExampleScore>* per_example = nullptr) {
  const auto golds = read_records<GoldRecord>(gold_path, gold_from_json);
  const auto preds = read_records<Prediction>(pred_path, prediction_from_json);
  return evaluate(preds, golds, profile, per_example);
}

// Column names shown for each profile, paired with report values.
inline std::vector<std::pair<std::string, double>> report_columns(const EvalReport& r) {
  std::vector<std::pair<std::string, double>> cols;
  switch (r.profile) {
    case TaskProfile::YesNo:
      cols = {{"EM", r.em}, {"F1", r.f1}, {"EM w/ conds", r.conditional_em}, {"F1 w/ conds", r.conditional_f1}};
      break;
    case TaskProfile::CondNli:
      cols = {{"label acc (micro)", r.micro_acc}, {"label acc (macro)", r.macro_acc}, {"EM", r.em}, {"F1", r.f1},
              {"EM w/ conds", r.conditional_em}, {"F1 w/ conds", r.conditional_f1}};
      break;
    case TaskProfile::Sharc:
      cols = {{"micro acc", r.micro_acc}, {"macro acc", r.macro_acc}};
      if (r.n_questions > 0) {
        cols.emplace_back("BLEU-1", r.bleu1);
        cols.emplace_back("BLEU-4", r.bleu4);
      }
      break;
  }
  cols.emplace_back("condition P", r.condition_p);
  cols.emplace_back("condition R", r.condition_r);
  cols.emplace_back("condition F1", r.condition_f1);
  return cols;
}

inline void print_report(std::ostream& os, const EvalReport& r) {
  os << "profile: " << to_string(r.profile) << "  examples: " << r.n_examples << "  missing: " << r.n_missing
     << "  unmatched: " << r.n_unmatched << '\n';
  const auto cols = report_columns(r);
  std::size_t width = 0;
  for (const auto& [name, value] : cols) width = std::max(width, name.size());
  for (const auto& [name, value] : cols) {
    os << "  " << std::left << std::setw(static_cast<int>(width)) << name << "  " << std::right << std::fixed
       << std::setprecision(4) << value << '\n';
  }
  if (r.profile == TaskProfile::Sharc && r.n_questions == 0) os << "  (BLEU: no reference questions)\n";
}

}  // namespace condlogic
