#pragma once

// Store of (premise, hypothesis, label) records used to instantiate
// template variables. Input is one JSON object per line:
//   {"premise": "...", "hypothesis": "...", "label": "entailment"}

#include <array>
#include <cstddef>
#include <fstream>
#include <istream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "condlogic/error.hpp"

namespace condlogic {

enum class NliLabel { Entailment = 0, Contradiction = 1, Neutral = 2 };

inline std::string_view to_string(NliLabel l) {
  switch (l) {
    case NliLabel::Entailment: return "entailment";
    case NliLabel::Contradiction: return "contradiction";
    case NliLabel::Neutral: return "neutral";
  }
  return "neutral";
}

inline std::optional<NliLabel> nli_label_from_string(std::string_view s) {
  if (s == "entailment") return NliLabel::Entailment;
  if (s == "contradiction") return NliLabel::Contradiction;
  if (s == "neutral") return NliLabel::Neutral;
  return std::nullopt;
}

struct NliRecord {
  std::string premise;
  std::string hypothesis;
  NliLabel label = NliLabel::Neutral;

  bool operator==(const NliRecord&) const = default;
};

class NliBank {
 public:
  NliBank() = default;

  void add(NliRecord r) { buckets_[index(r.label)].push_back(std::move(r)); }

  const std::vector<NliRecord>& bucket(NliLabel l) const { return buckets_[index(l)]; }
  std::size_t count(NliLabel l) const { return bucket(l).size(); }
  std::size_t size() const { return buckets_[0].size() + buckets_[1].size() + buckets_[2].size(); }

  // Record number i over the concatenation of all buckets.
  const NliRecord& at(std::size_t i) const {
    for (const auto& b : buckets_) {
      if (i < b.size()) return b[i];
      i -= b.size();
    }
    throw InvariantError("NLI bank index out of range");
  }

  std::string source;
  std::vector<Diagnostic> rejected;

 private:
  static std::size_t index(NliLabel l) { return static_cast<std::size_t>(l); }

  std::array<std::vector<NliRecord>, 3> buckets_;
};

inline NliBank load_nli_bank(std::istream& in, std::string source = "<stream>") {
  NliBank bank;
  bank.source = std::move(source);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      const auto label = nli_label_from_string(j.at("label").get<std::string>());
      if (!label) {
        bank.rejected.push_back({lineno, "unknown label '" + j.at("label").get<std::string>() + "'"});
        continue;
      }
      bank.add({j.at("premise").get<std::string>(), j.at("hypothesis").get<std::string>(), *label});
    } catch (const nlohmann::json::exception& e) {
      bank.rejected.push_back({lineno, e.what()});
    }
  }
  if (bank.size() == 0) throw InvariantError("NLI bank '" + bank.source + "' has no valid records");
  return bank;
}

inline NliBank load_nli_bank(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open NLI bank '" + path + "'");
  return load_nli_bank(in, path);
}

}  // namespace condlogic
