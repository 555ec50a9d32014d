#pragma once

// Synthetic conditional-NLI data.
//
// Templates are drawn at random from a master seed, deduplicated on their
// canonical text, and then instantiated with records from an NLI bank. The
// gold label of every example comes from solving its template, so the data
// is correct by construction.

#include <cstddef>
#include <cstdint>
#include <iomanip>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "condlogic/dsl.hpp"
#include "condlogic/error.hpp"
#include "condlogic/logic.hpp"
#include "condlogic/nli_bank.hpp"
#include "condlogic/seed.hpp"
#include "condlogic/template.hpp"

namespace condlogic {

struct GenConfig {
  std::size_t max_conditions = 6;
  // Raise to max_conditions to force every template to the full size.
  std::size_t min_conditions = 1;
  std::size_t n_templates = 65;
  std::size_t n_dev = 5000;
  std::size_t n_test = 5000;
  double weight_all = 1.0;
  double weight_any = 1.0;
  // Groups besides the one the question is about.
  std::size_t min_distractors = 0;
  std::size_t max_distractors = 2;
  double fact_probability = 0.5;
  double negation_probability = 0.3;
  std::uint64_t seed = 0;
  std::size_t max_attempts = 1000;

  void validate() const {
    if (max_conditions < 1) throw InvariantError("max_conditions must be at least 1");
    if (min_conditions < 1 || min_conditions > max_conditions) {
      throw InvariantError("min_conditions must lie in [1, max_conditions]");
    }
    if (min_distractors > max_distractors) throw InvariantError("min_distractors exceeds max_distractors");
    if (weight_all < 0 || weight_any < 0 || weight_all + weight_any <= 0) {
      throw InvariantError("operator weights must be non-negative and not both zero");
    }
    for (double p : {fact_probability, negation_probability}) {
      if (!(p >= 0.0 && p <= 1.0)) throw InvariantError("probabilities must lie in [0, 1]");
    }
    if (max_attempts < 1) throw InvariantError("max_attempts must be at least 1");
  }
};

NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(GenConfig, max_conditions, min_conditions, n_templates, n_dev,
                                   n_test, weight_all, weight_any, min_distractors, max_distractors,
                                   fact_probability, negation_probability, seed, max_attempts)

// Hash of the settings that shape generated data, for manifests.
inline std::string config_hash(const GenConfig& config) {
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << fnv1a(nlohmann::json(config).dump());
  return os.str();
}

// Condition variables cycle through A..T and result variables through U..Z;
// a numeric suffix disambiguates past the first lap.
inline std::string condition_variable(std::size_t i) {
  std::string v(1, static_cast<char>('A' + i % 20));
  if (i >= 20) v += std::to_string(i / 20);
  return v;
}

inline std::string result_variable(std::size_t i) {
  std::string v(1, static_cast<char>('U' + i % 6));
  if (i >= 6) v += std::to_string(i / 6);
  return v;
}

inline std::string template_id(std::size_t index) {
  std::ostringstream os;
  os << 'T' << std::setw(3) << std::setfill('0') << index;
  return os.str();
}

// One random template; no distinctness check.
inline Template sample_template(const GenConfig& config, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  auto uniform = [&](std::size_t lo, std::size_t hi) {
    return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
  };
  std::bernoulli_distribution negate(config.negation_probability);
  std::bernoulli_distribution has_fact(config.fact_probability);
  std::discrete_distribution<int> op({config.weight_all, config.weight_any});

  const std::size_t total = uniform(config.min_conditions, config.max_conditions);
  const std::size_t n_groups = std::min(total, 1 + uniform(config.min_distractors, config.max_distractors));

  Template t;
  std::size_t remaining = total;
  std::size_t next_condition = 0;
  for (std::size_t g = 0; g < n_groups; ++g) {
    const std::size_t groups_left = n_groups - g - 1;
    const std::size_t size = groups_left == 0 ? remaining : uniform(1, remaining - groups_left);
    remaining -= size;

    TemplateGroup group;
    group.op = op(rng) == 0 ? GroupOperator::All : GroupOperator::Any;
    for (std::size_t k = 0; k < size; ++k) {
      group.conditions.push_back({condition_variable(next_condition++), negate(rng)});
    }
    group.consequent = result_variable(g);
    t.groups.push_back(std::move(group));
  }

  for (const auto& g : t.groups) {
    for (const auto& c : g.conditions) {
      if (has_fact(rng)) t.facts.push_back({lower_var(c.var), negate(rng)});
    }
  }
  if (t.facts.empty()) {
    const std::size_t pick = uniform(0, total - 1);
    t.facts.push_back({lower_var(condition_variable(pick)), negate(rng)});
  }

  t.target = static_cast<TargetRelation>(uniform(0, 3));
  if (*t.target == TargetRelation::Irrelevant) {
    t.question_var = lower_var(result_variable(n_groups));
  } else {
    t.question_var = lower_var(t.groups[uniform(0, n_groups - 1)].consequent);
  }
  return t;
}

// The first `count` distinct templates for this configuration. Template i
// depends only on the master seed and the templates before it.
inline std::vector<Template> generate_templates(const GenConfig& config, std::size_t count) {
  config.validate();
  std::vector<Template> out;
  std::set<std::string> seen;
  out.reserve(count);
  for (std::size_t index = 0; index < count; ++index) {
    bool placed = false;
    for (std::size_t attempt = 0; attempt < config.max_attempts && !placed; ++attempt) {
      auto t = sample_template(config, derive_seed(config.seed, {fnv1a("template"), index, attempt}));
      if (seen.insert(render_template_dsl(t)).second) {
        out.push_back(std::move(t));
        placed = true;
      }
    }
    if (!placed) {
      throw GenerationExhausted("no new distinct template for index " + std::to_string(index) + " after " +
                                std::to_string(config.max_attempts) + " attempts");
    }
  }
  return out;
}

inline std::vector<Template> generate_templates(const GenConfig& config) {
  return generate_templates(config, config.n_templates);
}

inline Template generate_template(const GenConfig& config, std::size_t index) {
  if (index >= config.n_templates) {
    throw InvariantError("template index " + std::to_string(index) + " is not below n_templates");
  }
  return generate_templates(config, index + 1).back();
}

// ---------------------------------------------------------------------------
// Instantiation

struct Example {
  std::string id;
  std::string template_id;
  std::uint64_t seed = 0;
  std::vector<ConditionGroup> context;
  std::vector<std::string> facts;
  std::string question;
  Verdict gold;

  bool operator==(const Example&) const = default;
};

inline NliLabel nli_label_for(TargetRelation r) {
  switch (r) {
    case TargetRelation::Entailed: return NliLabel::Entailment;
    case TargetRelation::Contradicted: return NliLabel::Contradiction;
    default: return NliLabel::Neutral;
  }
}

// Fills the template's variables with bank records. A condition with a
// supporting fact takes an entailment record (premise -> condition,
// hypothesis -> fact); a contradicting fact takes a contradiction record.
// The asked-about result and the question share one record whose label is
// the target relation. Negated conditions are rendered with a leading "not ".
inline Example instantiate(const Template& t, std::string_view tid, const NliBank& bank, std::uint64_t seed) {
  validate(t);
  if (!t.target) throw InvariantError("template " + std::string(tid) + " has no target relation");

  std::map<std::string, bool> fact_negated;
  for (const auto& f : t.facts) fact_negated[upper_var(f.var)] = f.negated;

  const auto relevant = relevant_group(t);
  auto require = [&](NliLabel l) {
    if (bank.count(l) == 0) {
      throw InsufficientBank("NLI bank has no '" + std::string(to_string(l)) + "' records");
    }
  };
  for (const auto& [var, negated] : fact_negated) {
    require(negated ? NliLabel::Contradiction : NliLabel::Entailment);
  }
  if (relevant) require(nli_label_for(*t.target));
  if (bank.size() == 0) throw InsufficientBank("NLI bank is empty");

  std::mt19937_64 rng(derive_seed(seed, {fnv1a(tid)}));
  auto pick = [&](NliLabel l) -> const NliRecord& {
    const auto& b = bank.bucket(l);
    return b[std::uniform_int_distribution<std::size_t>(0, b.size() - 1)(rng)];
  };
  auto pick_any = [&]() -> const NliRecord& {
    return bank.at(std::uniform_int_distribution<std::size_t>(0, bank.size() - 1)(rng));
  };

  const auto ids = condition_ids(t);
  Example ex;
  ex.template_id = std::string(tid);
  ex.seed = seed;
  std::map<std::string, std::string> fact_text;

  for (std::size_t gi = 0; gi < t.groups.size(); ++gi) {
    const auto& g = t.groups[gi];
    ConditionGroup cg;
    cg.result_id = "R" + std::to_string(gi);
    cg.logical_type = logical_type_of(g);
    for (const auto& c : g.conditions) {
      std::string premise;
      if (auto it = fact_negated.find(c.var); it != fact_negated.end()) {
        const auto& rec = pick(it->second ? NliLabel::Contradiction : NliLabel::Entailment);
        premise = rec.premise;
        fact_text[c.var] = rec.hypothesis;
      } else {
        premise = pick_any().premise;
      }
      Condition cond;
      cond.id = ids.at(c.var);
      cond.text = c.negated ? "not " + premise : premise;
      cg.conditions.push_back(std::move(cond));
    }
    if (relevant == gi) {
      const auto& rec = pick(nli_label_for(*t.target));
      cg.result_text = rec.premise;
      ex.question = rec.hypothesis;
    } else {
      cg.result_text = pick_any().premise;
    }
    ex.context.push_back(std::move(cg));
  }
  if (!relevant) ex.question = pick_any().hypothesis;

  for (const auto& f : t.facts) ex.facts.push_back(fact_text.at(upper_var(f.var)));

  ex.gold = solve_template(t);
  for (auto& v : ex.gold.unsatisfied) v = ids.at(v);
  return ex;
}

// ---------------------------------------------------------------------------
// Datasets

enum class Split { Dev, Test, Train };

inline std::string_view to_string(Split s) {
  switch (s) {
    case Split::Dev: return "dev";
    case Split::Test: return "test";
    case Split::Train: return "train";
  }
  return "train";
}

inline std::optional<Split> split_from_string(std::string_view s) {
  if (s == "dev") return Split::Dev;
  if (s == "test") return Split::Test;
  if (s == "train") return Split::Train;
  return std::nullopt;
}

class ExampleGenerator {
 public:
  ExampleGenerator(GenConfig config, const NliBank& bank)
      : config_(std::move(config)), templates_(generate_templates(config_)), bank_(&bank) {}

  const GenConfig& config() const { return config_; }
  const std::vector<Template>& templates() const { return templates_; }

  // Example `index` of `split`; independent of every other example.
  Example make(Split split, std::size_t index) const {
    const auto seed = derive_seed(config_.seed, to_string(split), index);
    std::mt19937_64 rng(seed);
    const auto k = std::uniform_int_distribution<std::size_t>(0, templates_.size() - 1)(rng);
    Example ex = instantiate(templates_[k], template_id(k), *bank_, seed);
    std::ostringstream id;
    id << to_string(split) << '-' << std::setw(5) << std::setfill('0') << index;
    ex.id = id.str();
    return ex;
  }

  // nullopt for the unbounded train split.
  std::optional<std::size_t> split_size(Split split) const {
    switch (split) {
      case Split::Dev: return config_.n_dev;
      case Split::Test: return config_.n_test;
      case Split::Train: return std::nullopt;
    }
    return std::nullopt;
  }

 private:
  GenConfig config_;
  std::vector<Template> templates_;
  const NliBank* bank_;
};

// Pull-style stream over one split. Dev and test end after their configured
// size; train never ends.
class ExampleStream {
 public:
  ExampleStream(const ExampleGenerator& gen, Split split) : gen_(&gen), split_(split), limit_(gen.split_size(split)) {}

  std::optional<Example> next() {
    if (limit_ && index_ >= *limit_) return std::nullopt;
    return gen_->make(split_, index_++);
  }

  std::size_t produced() const { return index_; }

 private:
  const ExampleGenerator* gen_;
  Split split_;
  std::optional<std::size_t> limit_;
  std::size_t index_ = 0;
};

inline ExampleStream generate_dataset(const ExampleGenerator& gen, Split split) { return {gen, split}; }

// First `limit` examples of a split (all of a bounded split by default).
inline std::vector<Example> collect(const ExampleGenerator& gen, Split split,
                                    std::optional<std::size_t> limit = std::nullopt) {
  auto stream = generate_dataset(gen, split);
  std::vector<Example> out;
  while (!limit || out.size() < *limit) {
    auto ex = stream.next();
    if (!ex) break;
    out.push_back(std::move(*ex));
  }
  return out;
}

}  // namespace condlogic
