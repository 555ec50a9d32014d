#pragma once

// Three-valued evaluation of condition groups.
//
// A condition group is a result statement guarded by a list of conditions
// combined under a logical type. Each condition carries an evidence state
// (entailed / contradicted / not mentioned) resolved from the question and
// the known facts. Evaluating a group yields its status plus one derived
// label per condition; deriving an answer maps the relevant group's status
// and its intrinsic relation to the question into a task-specific label and
// the list of conditions that still need to be checked.

#include <algorithm>
#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "condlogic/error.hpp"

namespace condlogic {

// Unknown marks groups recovered from raw documents where the combinator has
// not been resolved; it cannot be evaluated.
enum class LogicalType { All, Any, Required, Optional, Unknown };

enum class EvidenceState { Entailed, Contradicted, NotMentioned };

enum class ConditionLabel { Entailed, Contradicted, NotMentioned, Implied, ToCheck };

enum class GroupStatus { Satisfied, Contradicted, Undetermined };

// NLI relation between a result statement and the question.
enum class Relation { Entailed, Contradicted, Neutral };

// How a known fact bears on the positive reading of its condition.
enum class FactRelation { Supports, Contradicts };

enum class AnswerLabel { Entailed, Contradicted, Neutral, Irrelevant, Yes, No, Inquire };

enum class TaskProfile { CondNli, YesNo, Sharc };

struct Condition {
  std::string id;
  std::string text;
  bool negated = false;
  EvidenceState evidence = EvidenceState::NotMentioned;

  bool operator==(const Condition&) const = default;
};

struct ConditionGroup {
  std::string result_text;
  std::string result_id;
  LogicalType logical_type = LogicalType::All;
  std::vector<Condition> conditions;
  std::optional<Relation> intrinsic_relation;

  bool operator==(const ConditionGroup&) const = default;
};

struct GroupEvaluation {
  GroupStatus status = GroupStatus::Satisfied;
  std::vector<ConditionLabel> labels;

  bool operator==(const GroupEvaluation&) const = default;
};

// Unsatisfied ids are kept in document order.
struct Verdict {
  AnswerLabel label = AnswerLabel::Irrelevant;
  std::vector<std::string> unsatisfied;

  bool operator==(const Verdict&) const = default;
};

// ---------------------------------------------------------------------------
// Names

inline std::string_view to_string(LogicalType t) {
  switch (t) {
    case LogicalType::All: return "all";
    case LogicalType::Any: return "any";
    case LogicalType::Required: return "required";
    case LogicalType::Optional: return "optional";
    case LogicalType::Unknown: return "unknown";
  }
  return "unknown";
}

inline std::string_view to_string(EvidenceState s) {
  switch (s) {
    case EvidenceState::Entailed: return "entailed";
    case EvidenceState::Contradicted: return "contradicted";
    case EvidenceState::NotMentioned: return "not_mentioned";
  }
  return "not_mentioned";
}

inline std::string_view to_string(ConditionLabel l) {
  switch (l) {
    case ConditionLabel::Entailed: return "entailed";
    case ConditionLabel::Contradicted: return "contradicted";
    case ConditionLabel::NotMentioned: return "not_mentioned";
    case ConditionLabel::Implied: return "implied";
    case ConditionLabel::ToCheck: return "to_check";
  }
  return "not_mentioned";
}

inline std::string_view to_string(GroupStatus s) {
  switch (s) {
    case GroupStatus::Satisfied: return "satisfied";
    case GroupStatus::Contradicted: return "contradicted";
    case GroupStatus::Undetermined: return "undetermined";
  }
  return "undetermined";
}

inline std::string_view to_string(Relation r) {
  switch (r) {
    case Relation::Entailed: return "entailed";
    case Relation::Contradicted: return "contradicted";
    case Relation::Neutral: return "neutral";
  }
  return "neutral";
}

inline std::string_view to_string(AnswerLabel l) {
  switch (l) {
    case AnswerLabel::Entailed: return "entailed";
    case AnswerLabel::Contradicted: return "contradicted";
    case AnswerLabel::Neutral: return "neutral";
    case AnswerLabel::Irrelevant: return "irrelevant";
    case AnswerLabel::Yes: return "yes";
    case AnswerLabel::No: return "no";
    case AnswerLabel::Inquire: return "inquire";
  }
  return "irrelevant";
}

inline std::string_view to_string(TaskProfile p) {
  switch (p) {
    case TaskProfile::CondNli: return "condnli";
    case TaskProfile::YesNo: return "conditionalqa";
    case TaskProfile::Sharc: return "sharc";
  }
  return "condnli";
}

inline std::optional<LogicalType> logical_type_from_string(std::string_view s) {
  for (auto t : {LogicalType::All, LogicalType::Any, LogicalType::Required, LogicalType::Optional,
                 LogicalType::Unknown}) {
    if (to_string(t) == s) return t;
  }
  return std::nullopt;
}

inline std::optional<AnswerLabel> answer_label_from_string(std::string_view s) {
  for (auto l : {AnswerLabel::Entailed, AnswerLabel::Contradicted, AnswerLabel::Neutral,
                 AnswerLabel::Irrelevant, AnswerLabel::Yes, AnswerLabel::No, AnswerLabel::Inquire}) {
    if (to_string(l) == s) return l;
  }
  return std::nullopt;
}

// Accepts "conditionalqa" and "yesno" for the yes/no profile.
inline std::optional<TaskProfile> task_profile_from_string(std::string_view s) {
  if (s == "condnli") return TaskProfile::CondNli;
  if (s == "conditionalqa" || s == "yesno") return TaskProfile::YesNo;
  if (s == "sharc") return TaskProfile::Sharc;
  return std::nullopt;
}

inline std::vector<AnswerLabel> label_space(TaskProfile p) {
  switch (p) {
    case TaskProfile::CondNli:
      return {AnswerLabel::Entailed, AnswerLabel::Contradicted, AnswerLabel::Neutral,
              AnswerLabel::Irrelevant};
    case TaskProfile::YesNo:
      return {AnswerLabel::Yes, AnswerLabel::No, AnswerLabel::Irrelevant};
    case TaskProfile::Sharc:
      return {AnswerLabel::Yes, AnswerLabel::No, AnswerLabel::Inquire, AnswerLabel::Irrelevant};
  }
  return {};
}

inline bool in_label_space(TaskProfile p, AnswerLabel l) {
  const auto space = label_space(p);
  return std::find(space.begin(), space.end(), l) != space.end();
}

// ---------------------------------------------------------------------------
// Evaluation

// A negated condition ("not C") reads its fact the other way round.
inline EvidenceState resolve_state(bool negated, std::optional<FactRelation> fact) {
  if (!fact) return EvidenceState::NotMentioned;
  const bool supports = (*fact == FactRelation::Supports);
  return supports != negated ? EvidenceState::Entailed : EvidenceState::Contradicted;
}

inline ConditionLabel raw_label(EvidenceState s) {
  switch (s) {
    case EvidenceState::Entailed: return ConditionLabel::Entailed;
    case EvidenceState::Contradicted: return ConditionLabel::Contradicted;
    case EvidenceState::NotMentioned: return ConditionLabel::NotMentioned;
  }
  return ConditionLabel::NotMentioned;
}

inline GroupEvaluation evaluate_group(LogicalType type, std::span<const EvidenceState> states) {
  if (type == LogicalType::Unknown) {
    throw InvariantError("cannot evaluate a group whose logical type is unknown");
  }
  if (type == LogicalType::Required && states.size() != 1) {
    throw InvariantError("a required group must hold exactly one condition, got " +
                         std::to_string(states.size()));
  }

  GroupEvaluation out;
  out.labels.reserve(states.size());
  if (states.empty()) return out;  // unconditional result

  const auto n = states.size();
  const auto entailed = static_cast<std::size_t>(
      std::count(states.begin(), states.end(), EvidenceState::Entailed));
  const auto contradicted = static_cast<std::size_t>(
      std::count(states.begin(), states.end(), EvidenceState::Contradicted));

  auto fill = [&](auto&& map) {
    for (auto s : states) out.labels.push_back(map(s));
  };

  switch (type) {
    case LogicalType::Optional:
      out.status = GroupStatus::Satisfied;
      fill(raw_label);
      break;

    case LogicalType::All:
    case LogicalType::Required:
      if (contradicted > 0) {
        out.status = GroupStatus::Contradicted;
        fill(raw_label);
      } else if (entailed == n) {
        out.status = GroupStatus::Satisfied;
        fill(raw_label);
      } else {
        out.status = GroupStatus::Undetermined;
        fill([](EvidenceState s) {
          return s == EvidenceState::NotMentioned ? ConditionLabel::ToCheck : raw_label(s);
        });
      }
      break;

    case LogicalType::Any:
      if (entailed > 0) {
        out.status = GroupStatus::Satisfied;
        fill([](EvidenceState s) {
          return s == EvidenceState::Entailed ? ConditionLabel::Entailed : ConditionLabel::Implied;
        });
      } else if (contradicted == n) {
        out.status = GroupStatus::Contradicted;
        fill(raw_label);
      } else {
        out.status = GroupStatus::Undetermined;
        fill([](EvidenceState s) {
          return s == EvidenceState::NotMentioned ? ConditionLabel::ToCheck : raw_label(s);
        });
      }
      break;

    case LogicalType::Unknown:
      break;
  }
  return out;
}

inline GroupEvaluation evaluate_group(const ConditionGroup& group) {
  std::vector<EvidenceState> states;
  states.reserve(group.conditions.size());
  for (const auto& c : group.conditions) states.push_back(c.evidence);
  return evaluate_group(group.logical_type, states);
}

// Maps the relevant group's outcome to an answer. An absent `relevant` means
// the question matches none of the results.
inline Verdict derive_answer(std::span<const ConditionGroup> groups,
                             std::optional<std::size_t> relevant, TaskProfile profile) {
  if (!relevant) return {AnswerLabel::Irrelevant, {}};
  if (*relevant >= groups.size()) {
    throw InvariantError("relevant group index " + std::to_string(*relevant) +
                         " is out of range for " + std::to_string(groups.size()) + " groups");
  }
  const auto& group = groups[*relevant];
  const auto eval = evaluate_group(group);

  if (eval.status == GroupStatus::Contradicted) {
    return {profile == TaskProfile::CondNli ? AnswerLabel::Neutral : AnswerLabel::Irrelevant, {}};
  }

  Verdict v;
  if (profile == TaskProfile::Sharc && eval.status == GroupStatus::Undetermined) {
    v.label = AnswerLabel::Inquire;
  } else {
    if (!group.intrinsic_relation && profile != TaskProfile::Sharc) {
      throw InvariantError("relevant group '" + group.result_id +
                           "' has no intrinsic relation to the question");
    }
    const Relation rel = group.intrinsic_relation.value_or(Relation::Entailed);
    if (profile == TaskProfile::CondNli) {
      v.label = rel == Relation::Entailed       ? AnswerLabel::Entailed
                : rel == Relation::Contradicted ? AnswerLabel::Contradicted
                                                : AnswerLabel::Neutral;
    } else {
      v.label = rel == Relation::Entailed       ? AnswerLabel::Yes
                : rel == Relation::Contradicted ? AnswerLabel::No
                                                : AnswerLabel::Irrelevant;
    }
  }

  if (eval.status == GroupStatus::Undetermined) {
    for (std::size_t i = 0; i < eval.labels.size(); ++i) {
      if (eval.labels[i] == ConditionLabel::ToCheck) v.unsatisfied.push_back(group.conditions[i].id);
    }
  }
  return v;
}

// ---------------------------------------------------------------------------
// Brute-force reference
//
// Evaluates a group by folding Kleene truth values, then reads each
// condition's label straight off the definitions of the logical types. Kept
// separate from evaluate_group so the two can be checked against each other.

namespace reference {

enum class Truth { False = 0, Unknown = 1, True = 2 };

inline Truth truth_of(EvidenceState s) {
  switch (s) {
    case EvidenceState::Entailed: return Truth::True;
    case EvidenceState::Contradicted: return Truth::False;
    case EvidenceState::NotMentioned: return Truth::Unknown;
  }
  return Truth::Unknown;
}

inline Truth kleene_and(Truth a, Truth b) { return std::min(a, b); }
inline Truth kleene_or(Truth a, Truth b) { return std::max(a, b); }

inline GroupEvaluation evaluate(LogicalType type, std::span<const EvidenceState> states) {
  if (type == LogicalType::Unknown) throw InvariantError("reference: unknown logical type");
  if (type == LogicalType::Required && states.size() != 1) {
    throw InvariantError("reference: required group needs exactly one condition");
  }
  GroupEvaluation out;
  if (states.empty()) return out;

  if (type == LogicalType::Optional) {
    for (auto s : states) {
      out.labels.push_back(s == EvidenceState::Entailed       ? ConditionLabel::Entailed
                           : s == EvidenceState::Contradicted ? ConditionLabel::Contradicted
                                                              : ConditionLabel::NotMentioned);
    }
    out.status = GroupStatus::Satisfied;
    return out;
  }

  const bool disjunction = (type == LogicalType::Any);
  Truth value = disjunction ? Truth::False : Truth::True;
  for (auto s : states) {
    value = disjunction ? kleene_or(value, truth_of(s)) : kleene_and(value, truth_of(s));
  }
  out.status = value == Truth::True    ? GroupStatus::Satisfied
               : value == Truth::False ? GroupStatus::Contradicted
                                       : GroupStatus::Undetermined;

  for (auto s : states) {
    const Truth t = truth_of(s);
    ConditionLabel label{};
    if (disjunction && value == Truth::True) {
      label = t == Truth::True ? ConditionLabel::Entailed : ConditionLabel::Implied;
    } else if (value == Truth::Unknown && t == Truth::Unknown) {
      label = ConditionLabel::ToCheck;
    } else {
      label = t == Truth::True    ? ConditionLabel::Entailed
              : t == Truth::False ? ConditionLabel::Contradicted
                                  : ConditionLabel::NotMentioned;
    }
    out.labels.push_back(label);
  }
  return out;
}

}  // namespace reference

struct AssignmentRow {
  std::vector<EvidenceState> assignment;
  GroupStatus status = GroupStatus::Satisfied;
  std::vector<ConditionLabel> labels;
};

inline constexpr std::size_t kDefaultAssignmentBound = 12;

// All 3^k evidence assignments in base-3 counting order (first condition
// varies slowest), each evaluated by the reference evaluator.
inline std::vector<AssignmentRow> enumerate_assignments(LogicalType type, std::size_t k,
                                                        std::size_t bound = kDefaultAssignmentBound) {
  if (k == 0) throw InvariantError("enumerate_assignments needs at least one condition");
  if (k > bound) {
    throw SizeError("enumerate_assignments: k=" + std::to_string(k) + " exceeds bound " +
                    std::to_string(bound));
  }
  if (type == LogicalType::Required && k != 1) {
    throw InvariantError("a required group must hold exactly one condition");
  }
  static constexpr std::array<EvidenceState, 3> kStates = {
      EvidenceState::Entailed, EvidenceState::Contradicted, EvidenceState::NotMentioned};

  std::size_t rows = 1;
  for (std::size_t i = 0; i < k; ++i) rows *= 3;

  std::vector<AssignmentRow> table;
  table.reserve(rows);
  for (std::size_t r = 0; r < rows; ++r) {
    AssignmentRow row;
    row.assignment.resize(k);
    std::size_t code = r;
    for (std::size_t i = k; i-- > 0;) {
      row.assignment[i] = kStates[code % 3];
      code /= 3;
    }
    auto eval = reference::evaluate(type, row.assignment);
    row.status = eval.status;
    row.labels = std::move(eval.labels);
    table.push_back(std::move(row));
  }
  return table;
}

}  // namespace condlogic
