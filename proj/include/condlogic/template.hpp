#pragma once

// Symbolic reasoning templates.
//
// A template is the variable-level skeleton of a synthetic example:
//
//   If all (A, B), then U.
//   If any (not C, D), then V.
//   Facts: a, c, not d.
//   Question: Is u correct?
//
// Upper-case variables name conditions (A, B, ...) and results (U, V, ...);
// the lower-case twin of a variable names the hypothesis paired with it. A
// fact "not d" states that d contradicts D.

#include <algorithm>
#include <cctype>
#include <cstddef>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "condlogic/error.hpp"
#include "condlogic/logic.hpp"

namespace condlogic {

enum class TargetRelation { Entailed, Contradicted, Neutral, Irrelevant };

enum class GroupOperator { All, Any };

struct TemplateCondition {
  std::string var;
  bool negated = false;

  bool operator==(const TemplateCondition&) const = default;
};

struct TemplateGroup {
  GroupOperator op = GroupOperator::All;
  std::vector<TemplateCondition> conditions;
  std::string consequent;

  bool operator==(const TemplateGroup&) const = default;
};

struct TemplateFact {
  std::string var;
  bool negated = false;

  bool operator==(const TemplateFact&) const = default;
};

struct Template {
  std::vector<TemplateGroup> groups;
  std::vector<TemplateFact> facts;
  std::string question_var;
  std::optional<TargetRelation> target;

  bool operator==(const Template&) const = default;
};

inline std::string_view to_string(TargetRelation r) {
  switch (r) {
    case TargetRelation::Entailed: return "entailed";
    case TargetRelation::Contradicted: return "contradicted";
    case TargetRelation::Neutral: return "neutral";
    case TargetRelation::Irrelevant: return "irrelevant";
  }
  return "irrelevant";
}

inline std::optional<TargetRelation> target_relation_from_string(std::string_view s) {
  for (auto r : {TargetRelation::Entailed, TargetRelation::Contradicted, TargetRelation::Neutral,
                 TargetRelation::Irrelevant}) {
    if (to_string(r) == s) return r;
  }
  return std::nullopt;
}

inline std::string_view to_string(GroupOperator op) { return op == GroupOperator::All ? "all" : "any"; }

// Single-condition groups are reported as Required.
inline LogicalType logical_type_of(const TemplateGroup& g) {
  if (g.conditions.size() == 1) return LogicalType::Required;
  return g.op == GroupOperator::All ? LogicalType::All : LogicalType::Any;
}

// A variable is one letter optionally followed by decimal digits (A, B, A1).
inline bool is_variable(std::string_view s, bool upper) {
  if (s.empty()) return false;
  const auto c = static_cast<unsigned char>(s.front());
  if (upper ? !std::isupper(c) : !std::islower(c)) return false;
  return std::all_of(s.begin() + 1, s.end(),
                     [](char d) { return std::isdigit(static_cast<unsigned char>(d)) != 0; });
}

inline std::string lower_var(std::string_view upper) {
  std::string out(upper);
  if (!out.empty()) out.front() = static_cast<char>(std::tolower(static_cast<unsigned char>(out.front())));
  return out;
}

inline std::string upper_var(std::string_view lower) {
  std::string out(lower);
  if (!out.empty()) out.front() = static_cast<char>(std::toupper(static_cast<unsigned char>(out.front())));
  return out;
}

inline std::size_t condition_count(const Template& t) {
  std::size_t n = 0;
  for (const auto& g : t.groups) n += g.conditions.size();
  return n;
}

// Index of the group whose result the question asks about.
inline std::optional<std::size_t> relevant_group(const Template& t) {
  const auto upper = upper_var(t.question_var);
  for (std::size_t i = 0; i < t.groups.size(); ++i) {
    if (t.groups[i].consequent == upper) return i;
  }
  return std::nullopt;
}

// Condition variable -> "Ck" id, numbered in document order.
inline std::map<std::string, std::string> condition_ids(const Template& t) {
  std::map<std::string, std::string> ids;
  std::size_t k = 0;
  for (const auto& g : t.groups) {
    for (const auto& c : g.conditions) ids.emplace(c.var, "C" + std::to_string(k++));
  }
  return ids;
}

inline void validate(const Template& t,
                     std::size_t max_conditions = std::numeric_limits<std::size_t>::max()) {
  if (t.groups.empty()) throw InvariantError("template has no groups");
  std::set<std::string> seen;
  std::set<std::string> condition_vars;
  for (const auto& g : t.groups) {
    if (g.conditions.empty()) throw InvariantError("group '" + g.consequent + "' has no conditions");
    if (!is_variable(g.consequent, true)) {
      throw InvariantError("'" + g.consequent + "' is not an upper-case variable");
    }
    if (!seen.insert(g.consequent).second) {
      throw InvariantError("variable '" + g.consequent + "' is used more than once");
    }
    for (const auto& c : g.conditions) {
      if (!is_variable(c.var, true)) throw InvariantError("'" + c.var + "' is not an upper-case variable");
      if (!seen.insert(c.var).second) {
        throw InvariantError("variable '" + c.var + "' is used more than once");
      }
      condition_vars.insert(c.var);
    }
  }
  if (condition_count(t) > max_conditions) {
    throw InvariantError("template has " + std::to_string(condition_count(t)) +
                         " conditions, limit is " + std::to_string(max_conditions));
  }

  std::set<std::string> fact_vars;
  for (const auto& f : t.facts) {
    if (!is_variable(f.var, false)) throw InvariantError("'" + f.var + "' is not a lower-case variable");
    if (!condition_vars.count(upper_var(f.var))) {
      throw InvariantError("fact '" + f.var + "' does not correspond to any condition");
    }
    if (!fact_vars.insert(f.var).second) throw InvariantError("fact '" + f.var + "' is listed twice");
  }

  if (!is_variable(t.question_var, false)) {
    throw InvariantError("'" + t.question_var + "' is not a lower-case variable");
  }
  const auto relevant = relevant_group(t);
  if (t.target == TargetRelation::Irrelevant) {
    if (relevant) throw InvariantError("irrelevant template asks about result '" + upper_var(t.question_var) + "'");
    if (condition_vars.count(upper_var(t.question_var))) {
      throw InvariantError("question '" + t.question_var + "' names a condition");
    }
  } else if (!relevant) {
    throw InvariantError("question '" + t.question_var + "' matches no result");
  }
}

// Lowers a template to evaluable groups. Condition ids are the template
// variables; evidence is resolved from the fact list.
inline std::vector<ConditionGroup> symbolic_groups(const Template& t) {
  std::map<std::string, FactRelation> facts;
  for (const auto& f : t.facts) {
    facts[upper_var(f.var)] = f.negated ? FactRelation::Contradicts : FactRelation::Supports;
  }
  const auto relevant = relevant_group(t);

  std::vector<ConditionGroup> out;
  out.reserve(t.groups.size());
  for (std::size_t i = 0; i < t.groups.size(); ++i) {
    const auto& g = t.groups[i];
    ConditionGroup cg;
    cg.result_id = g.consequent;
    cg.result_text = g.consequent;
    cg.logical_type = logical_type_of(g);
    for (const auto& c : g.conditions) {
      std::optional<FactRelation> fact;
      if (auto it = facts.find(c.var); it != facts.end()) fact = it->second;
      cg.conditions.push_back({c.var, c.negated ? "not " + c.var : c.var, c.negated,
                               resolve_state(c.negated, fact)});
    }
    if (relevant == i && t.target && *t.target != TargetRelation::Irrelevant) {
      cg.intrinsic_relation = *t.target == TargetRelation::Entailed       ? Relation::Entailed
                              : *t.target == TargetRelation::Contradicted ? Relation::Contradicted
                                                                          : Relation::Neutral;
    }
    out.push_back(std::move(cg));
  }
  return out;
}

// Oracle label for a template under the CondNLI profile. Unsatisfied
// conditions are reported by variable name.
inline Verdict solve_template(const Template& t) {
  validate(t);
  if (!t.target) throw InvariantError("template has no label line; target relation unknown");
  if (*t.target == TargetRelation::Irrelevant) return {AnswerLabel::Irrelevant, {}};
  const auto groups = symbolic_groups(t);
  return derive_answer(groups, relevant_group(t), TaskProfile::CondNli);
}

}  // namespace condlogic
