#pragma once

// Answer and condition scoring.
//
// Answer spans are compared after QA-style normalization (lowercase, drop
// punctuation and the articles a/an/the). Unsatisfied conditions are scored
// as sets; an empty prediction against an empty gold set is perfect. The
// conditional scores multiply answer EM/F1 by condition F1, so they reach
// 1.0 only when both the answer and every unsatisfied condition are right.

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstddef>
#include <map>
#include <set>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "condlogic/error.hpp"

namespace condlogic {

inline std::vector<std::string> normalize_text(std::string_view s) {
  std::string cleaned;
  cleaned.reserve(s.size());
  for (char c : s) {
    const auto u = static_cast<unsigned char>(c);
    if (std::ispunct(u)) continue;
    cleaned += static_cast<char>(std::tolower(u));
  }
  std::istringstream in(cleaned);
  std::vector<std::string> tokens;
  for (std::string tok; in >> tok;) {
    if (tok == "a" || tok == "an" || tok == "the") continue;
    tokens.push_back(std::move(tok));
  }
  return tokens;
}

struct AnswerScore {
  double em = 0.0;
  double f1 = 0.0;
};

inline double token_f1(const std::vector<std::string>& pred, const std::vector<std::string>& ref) {
  if (pred.empty() || ref.empty()) return pred == ref ? 1.0 : 0.0;
  std::map<std::string, long> counts;
  for (const auto& t : ref) ++counts[t];
  long overlap = 0;
  for (const auto& t : pred) {
    if (auto it = counts.find(t); it != counts.end() && it->second > 0) {
      --it->second;
      ++overlap;
    }
  }
  if (overlap == 0) return 0.0;
  const double p = static_cast<double>(overlap) / static_cast<double>(pred.size());
  const double r = static_cast<double>(overlap) / static_cast<double>(ref.size());
  return 2.0 * p * r / (p + r);
}

// Best EM and best F1 over the references (taken independently).
inline AnswerScore answer_em_f1(std::string_view pred, std::span<const std::string> refs) {
  if (refs.empty()) throw InvariantError("answer_em_f1 needs at least one reference");
  const auto p = normalize_text(pred);
  AnswerScore best;
  for (const auto& ref : refs) {
    const auto r = normalize_text(ref);
    best.em = std::max(best.em, p == r ? 1.0 : 0.0);
    best.f1 = std::max(best.f1, token_f1(p, r));
  }
  return best;
}

struct PrfScore {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

inline PrfScore condition_prf(const std::set<std::string>& pred, const std::set<std::string>& gold) {
  if (pred.empty() && gold.empty()) return {1.0, 1.0, 1.0};
  if (pred.empty() || gold.empty()) return {0.0, 0.0, 0.0};
  std::size_t hit = 0;
  for (const auto& id : pred) hit += gold.count(id);
  if (hit == 0) return {0.0, 0.0, 0.0};
  const double p = static_cast<double>(hit) / static_cast<double>(pred.size());
  const double r = static_cast<double>(hit) / static_cast<double>(gold.size());
  return {p, r, 2.0 * p * r / (p + r)};
}

struct ConditionalScore {
  double em = 0.0;
  double f1 = 0.0;
};

inline ConditionalScore conditional_em_f1(const AnswerScore& answer, double condition_f1) {
  return {answer.em * condition_f1, answer.f1 * condition_f1};
}

struct LabelAccuracy {
  double micro = 0.0;
  double macro = 0.0;
};

// Macro accuracy is the mean recall over classes present in `golds`.
// Both lists empty scores zero.
inline LabelAccuracy label_accuracy(std::span<const std::string> preds, std::span<const std::string> golds) {
  if (preds.size() != golds.size()) {
    throw InvariantError("label_accuracy: " + std::to_string(preds.size()) + " predictions for " +
                         std::to_string(golds.size()) + " gold labels");
  }
  if (golds.empty()) return {};
  std::map<std::string, std::pair<std::size_t, std::size_t>> per_class;  // correct, total
  std::size_t correct = 0;
  for (std::size_t i = 0; i < golds.size(); ++i) {
    auto& c = per_class[golds[i]];
    ++c.second;
    if (preds[i] == golds[i]) {
      ++c.first;
      ++correct;
    }
  }
  double recall_sum = 0.0;
  for (const auto& [label, c] : per_class) recall_sum += static_cast<double>(c.first) / static_cast<double>(c.second);
  return {static_cast<double>(correct) / static_cast<double>(golds.size()),
          recall_sum / static_cast<double>(per_class.size())};
}

// ---------------------------------------------------------------------------
// BLEU
//
// Uniform weights up to max_n, brevity penalty exp(1 - r/c) when the
// candidate is shorter than the reference, no smoothing: any order with zero
// matched n-grams (including orders longer than the candidate) scores 0.

inline std::vector<std::string> bleu_tokens(std::string_view s) {
  std::string lower(s);
  for (auto& c : lower) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  std::istringstream in(lower);
  std::vector<std::string> out;
  for (std::string tok; in >> tok;) out.push_back(std::move(tok));
  return out;
}

// Sufficient statistics; sums over sentences give corpus BLEU.
struct BleuStats {
  std::vector<std::size_t> matches;
  std::vector<std::size_t> totals;
  std::size_t candidate_length = 0;
  std::size_t reference_length = 0;

  explicit BleuStats(std::size_t max_n = 4) : matches(max_n, 0), totals(max_n, 0) {}

  BleuStats& operator+=(const BleuStats& o) {
    for (std::size_t n = 0; n < matches.size(); ++n) {
      matches[n] += o.matches[n];
      totals[n] += o.totals[n];
    }
    candidate_length += o.candidate_length;
    reference_length += o.reference_length;
    return *this;
  }

  double score() const {
    if (candidate_length == 0) return 0.0;
    double log_sum = 0.0;
    for (std::size_t n = 0; n < matches.size(); ++n) {
      if (matches[n] == 0 || totals[n] == 0) return 0.0;
      log_sum += std::log(static_cast<double>(matches[n]) / static_cast<double>(totals[n]));
    }
    const double c = static_cast<double>(candidate_length);
    const double r = static_cast<double>(reference_length);
    const double bp = c < r ? std::exp(1.0 - r / c) : 1.0;
    return bp * std::exp(log_sum / static_cast<double>(matches.size()));
  }
};

inline BleuStats bleu_stats(std::string_view pred, std::string_view ref, std::size_t max_n) {
  if (max_n < 1) throw InvariantError("BLEU order must be at least 1");
  const auto cand = bleu_tokens(pred);
  const auto refs = bleu_tokens(ref);
  BleuStats st(max_n);
  st.candidate_length = cand.size();
  st.reference_length = refs.size();
  auto ngrams = [](const std::vector<std::string>& toks, std::size_t n) {
    std::map<std::vector<std::string>, std::size_t> counts;
    for (std::size_t i = 0; i + n <= toks.size(); ++i) {
      ++counts[std::vector<std::string>(toks.begin() + static_cast<long>(i), toks.begin() + static_cast<long>(i + n))];
    }
    return counts;
  };
  for (std::size_t n = 1; n <= max_n; ++n) {
    const auto c = ngrams(cand, n);
    const auto r = ngrams(refs, n);
    for (const auto& [gram, count] : c) {
      st.totals[n - 1] += count;
      if (auto it = r.find(gram); it != r.end()) st.matches[n - 1] += std::min(count, it->second);
    }
  }
  return st;
}

inline double bleu(std::string_view pred, std::string_view ref, std::size_t max_n) {
  return bleu_stats(pred, ref, max_n).score();
}

}  // namespace condlogic
