#pragma once

// Structuring raw contexts into condition groups.
//
// Documents arrive as a flat, ordered stream of HTML elements. We rebuild a
// tree from it (headings nest by level, list items hang off the sentence
// that introduces them), then read every leaf as a condition and the chain
// of its ancestors as the result it guards. Pre-segmented discourse units
// are accepted as one unordered-type group per context.

#include <algorithm>
#include <cctype>
#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "condlogic/error.hpp"
#include "condlogic/logic.hpp"

namespace condlogic {

enum class HtmlTag { H1, H2, H3, H4, P, Li, Tr, Other };

inline std::string_view to_string(HtmlTag t) {
  switch (t) {
    case HtmlTag::H1: return "h1";
    case HtmlTag::H2: return "h2";
    case HtmlTag::H3: return "h3";
    case HtmlTag::H4: return "h4";
    case HtmlTag::P: return "p";
    case HtmlTag::Li: return "li";
    case HtmlTag::Tr: return "tr";
    case HtmlTag::Other: return "other";
  }
  return "other";
}

inline HtmlTag html_tag_from_string(std::string_view s) {
  std::string lower(s);
  for (auto& c : lower) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  for (auto t : {HtmlTag::H1, HtmlTag::H2, HtmlTag::H3, HtmlTag::H4, HtmlTag::P, HtmlTag::Li, HtmlTag::Tr}) {
    if (to_string(t) == lower) return t;
  }
  if (lower == "td" || lower == "th") return HtmlTag::Tr;
  return HtmlTag::Other;
}

// 1..4 for headings, 0 otherwise.
inline int heading_level(HtmlTag t) {
  switch (t) {
    case HtmlTag::H1: return 1;
    case HtmlTag::H2: return 2;
    case HtmlTag::H3: return 3;
    case HtmlTag::H4: return 4;
    default: return 0;
  }
}

struct HtmlElement {
  HtmlTag tag = HtmlTag::P;
  std::string text;
  std::size_t index = 0;

  bool operator==(const HtmlElement&) const = default;
};

// The synthetic root has no element.
struct DomNode {
  std::optional<HtmlElement> element;
  std::vector<DomNode> children;

  bool is_root() const { return !element.has_value(); }
  bool is_leaf() const { return children.empty(); }
  bool operator==(const DomNode&) const = default;
};

inline std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n\f\v");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n\f\v");
  return std::string(s.substr(b, e - b + 1));
}

// Element indices are positions in `elements`, which is assumed to be in
// document order; the stored `index` field is overwritten to match.
inline DomNode build_dom_tree(std::vector<HtmlElement> elements) {
  if (elements.empty()) throw InvariantError("cannot build a document tree from zero elements");

  // Parent of each element, -1 for the root.
  std::vector<long> parent(elements.size(), -1);
  std::vector<std::size_t> headings;  // open heading stack
  std::optional<std::size_t> last_block;

  for (std::size_t i = 0; i < elements.size(); ++i) {
    auto& el = elements[i];
    el.index = i;
    el.text = trim(el.text);
    if (el.text.empty()) throw InvariantError("element " + std::to_string(i) + " has empty text");

    const int level = heading_level(el.tag);
    if (level > 0) {
      while (!headings.empty() && heading_level(elements[headings.back()].tag) >= level) headings.pop_back();
      parent[i] = headings.empty() ? -1 : static_cast<long>(headings.back());
      headings.push_back(i);
      last_block = i;
    } else if (el.tag == HtmlTag::Li) {
      parent[i] = last_block ? static_cast<long>(*last_block) : -1;
    } else {
      parent[i] = headings.empty() ? -1 : static_cast<long>(headings.back());
      last_block = i;
    }
  }

  std::vector<std::vector<std::size_t>> kids(elements.size());
  std::vector<std::size_t> top;
  for (std::size_t i = 0; i < elements.size(); ++i) {
    (parent[i] < 0 ? top : kids[static_cast<std::size_t>(parent[i])]).push_back(i);
  }

  auto build = [&](auto&& self, std::size_t i) -> DomNode {
    DomNode node;
    node.element = elements[i];
    for (auto k : kids[i]) node.children.push_back(self(self, k));
    return node;
  };
  DomNode root;
  for (auto i : top) root.children.push_back(build(build, i));
  return root;
}

inline constexpr std::string_view kResultSeparator = " | ";

// Every set of sibling leaves becomes one group, with the texts of its
// ancestors (direct parent first, root excluded) joined as the result.
// Leaves hanging directly off the root each form their own group with an
// empty result. Groups are ordered by their first condition; condition ids
// are "C0", "C1", ... in document order.
inline std::vector<ConditionGroup> parse_html_context(const std::vector<HtmlElement>& elements) {
  const DomNode root = build_dom_tree(elements);

  struct Pending {
    std::size_t first;
    ConditionGroup group;
    std::vector<std::size_t> leaf_indices;
  };
  std::vector<Pending> pending;
  std::vector<const HtmlElement*> chain;

  auto result_of = [&]() {
    std::string out;
    for (auto it = chain.rbegin(); it != chain.rend(); ++it) {
      if (!out.empty()) out += kResultSeparator;
      out += (*it)->text;
    }
    return out;
  };

  auto visit = [&](auto&& self, const DomNode& node) -> void {
    std::vector<const DomNode*> leaves;
    for (const auto& child : node.children) {
      if (child.is_leaf()) leaves.push_back(&child);
    }
    if (node.is_root()) {
      for (const auto* leaf : leaves) {
        Pending p{leaf->element->index, {}, {leaf->element->index}};
        p.group.result_id = "R" + std::to_string(leaf->element->index);
        p.group.logical_type = LogicalType::Unknown;
        p.group.conditions.push_back({"", leaf->element->text, false, EvidenceState::NotMentioned});
        pending.push_back(std::move(p));
      }
    } else if (!leaves.empty()) {
      Pending p{leaves.front()->element->index, {}, {}};
      p.group.result_id = "R" + std::to_string(node.element->index);
      p.group.result_text = result_of();
      p.group.logical_type = LogicalType::Unknown;
      for (const auto* leaf : leaves) {
        p.leaf_indices.push_back(leaf->element->index);
        p.group.conditions.push_back({"", leaf->element->text, false, EvidenceState::NotMentioned});
      }
      pending.push_back(std::move(p));
    }
    for (const auto& child : node.children) {
      if (child.is_leaf()) continue;
      chain.push_back(&*child.element);
      self(self, child);
      chain.pop_back();
    }
  };
  visit(visit, root);

  std::sort(pending.begin(), pending.end(), [](const Pending& a, const Pending& b) { return a.first < b.first; });

  // number conditions by document position
  std::vector<std::size_t> all;
  for (const auto& p : pending) all.insert(all.end(), p.leaf_indices.begin(), p.leaf_indices.end());
  std::sort(all.begin(), all.end());
  std::map<std::size_t, std::string> id_of;
  for (std::size_t k = 0; k < all.size(); ++k) id_of[all[k]] = "C" + std::to_string(k);

  std::vector<ConditionGroup> out;
  out.reserve(pending.size());
  for (auto& p : pending) {
    for (std::size_t k = 0; k < p.leaf_indices.size(); ++k) p.group.conditions[k].id = id_of.at(p.leaf_indices[k]);
    out.push_back(std::move(p.group));
  }
  return out;
}

// Depth of every leaf below the synthetic root (top-level elements are at 1).
inline std::vector<std::size_t> leaf_depths(const DomNode& root) {
  std::vector<std::size_t> out;
  auto walk = [&](auto&& self, const DomNode& n, std::size_t depth) -> void {
    if (!n.is_root() && n.is_leaf()) out.push_back(depth);
    for (const auto& c : n.children) self(self, c, depth + 1);
  };
  walk(walk, root, 0);
  return out;
}

// ---------------------------------------------------------------------------
// Pre-segmented discourse units

struct EduSequence {
  std::string sentence_id;
  std::string sentence;
  std::vector<std::string> spans;

  bool operator==(const EduSequence&) const = default;
};

inline std::string strip_whitespace(std::string_view s) {
  std::string out;
  for (char c : s) {
    if (!std::isspace(static_cast<unsigned char>(c))) out += c;
  }
  return out;
}

inline void validate(const EduSequence& seq) {
  if (seq.spans.empty()) throw InvariantError("sentence '" + seq.sentence_id + "' has no spans");
  std::string joined;
  for (const auto& s : seq.spans) joined += s;
  if (strip_whitespace(joined) != strip_whitespace(seq.sentence)) {
    throw InvariantError("spans of sentence '" + seq.sentence_id + "' do not reconstruct the sentence");
  }
}

// All spans of one context form a single group of unknown type and no
// result; each span is a condition.
inline std::vector<ConditionGroup> accept_edu_input(const std::vector<EduSequence>& sequences) {
  if (sequences.empty()) throw InvariantError("no discourse-unit sequences given");
  ConditionGroup group;
  group.result_id = "R0";
  group.logical_type = LogicalType::Unknown;
  std::size_t k = 0;
  for (const auto& seq : sequences) {
    validate(seq);
    for (const auto& span : seq.spans) {
      group.conditions.push_back({"C" + std::to_string(k++), trim(span), false, EvidenceState::NotMentioned});
    }
  }
  return {group};
}

}  // namespace condlogic
