#pragma once

// Line-delimited JSON records for examples, condition groups, templates and
// split manifests.
//
// Writers terminate every record with '\n'; a reader treats an unterminated
// final line as a torn write and skips it with a warning. Each split file
// `x.jsonl` has a sidecar `x.jsonl.manifest` holding one JSON object.

#include <cctype>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <istream>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "condlogic/context.hpp"
#include "condlogic/dsl.hpp"
#include "condlogic/error.hpp"
#include "condlogic/generator.hpp"
#include "condlogic/logic.hpp"

namespace condlogic {

inline constexpr std::string_view kToolkitVersion = "0.1.0";

using json = nlohmann::json;

inline bool is_condition_id(std::string_view id) {
  if (id.size() < 2 || id.front() != 'C') return false;
  for (std::size_t i = 1; i < id.size(); ++i) {
    if (!std::isdigit(static_cast<unsigned char>(id[i]))) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// Records

inline json group_to_json(const ConditionGroup& g) {
  json conds = json::array();
  for (const auto& c : g.conditions) conds.push_back({{"id", c.id}, {"text", c.text}});
  return {{"result_id", g.result_id},
          {"result", g.result_text},
          {"type", std::string(to_string(g.logical_type))},
          {"conditions", std::move(conds)}};
}

inline ConditionGroup group_from_json(const json& j) {
  ConditionGroup g;
  g.result_id = j.at("result_id").get<std::string>();
  g.result_text = j.at("result").get<std::string>();
  const auto type = logical_type_from_string(j.at("type").get<std::string>());
  if (!type) throw InvariantError("unknown group type '" + j.at("type").get<std::string>() + "'");
  g.logical_type = *type;
  for (const auto& c : j.at("conditions")) {
    Condition cond;
    cond.id = c.at("id").get<std::string>();
    cond.text = c.at("text").get<std::string>();
    g.conditions.push_back(std::move(cond));
  }
  return g;
}

inline json example_to_json(const Example& ex) {
  json context = json::array();
  for (const auto& g : ex.context) context.push_back(group_to_json(g));
  return {{"id", ex.id},
          {"template_id", ex.template_id},
          {"seed", ex.seed},
          {"context", std::move(context)},
          {"facts", ex.facts},
          {"question", ex.question},
          {"answer_label", std::string(to_string(ex.gold.label))},
          {"unsatisfied", ex.gold.unsatisfied}};
}

// Throws on any schema violation.
inline Example example_from_json(const json& j) {
  Example ex;
  ex.id = j.at("id").get<std::string>();
  ex.template_id = j.at("template_id").get<std::string>();
  ex.seed = j.at("seed").get<std::uint64_t>();
  for (const auto& g : j.at("context")) {
    auto group = group_from_json(g);
    const auto t = group.logical_type;
    if (t != LogicalType::All && t != LogicalType::Any && t != LogicalType::Required) {
      throw InvariantError("example group type must be all, any or required");
    }
    if (t == LogicalType::Required && group.conditions.size() != 1) {
      throw InvariantError("required group with " + std::to_string(group.conditions.size()) + " conditions");
    }
    for (const auto& c : group.conditions) {
      if (!is_condition_id(c.id)) throw InvariantError("malformed condition id '" + c.id + "'");
    }
    ex.context.push_back(std::move(group));
  }
  ex.facts = j.at("facts").get<std::vector<std::string>>();
  ex.question = j.at("question").get<std::string>();
  const auto label = answer_label_from_string(j.at("answer_label").get<std::string>());
  if (!label) throw InvariantError("unknown answer label '" + j.at("answer_label").get<std::string>() + "'");
  ex.gold.label = *label;
  ex.gold.unsatisfied = j.at("unsatisfied").get<std::vector<std::string>>();
  for (const auto& id : ex.gold.unsatisfied) {
    if (!is_condition_id(id)) throw InvariantError("malformed condition id '" + id + "'");
  }
  return ex;
}

struct SplitManifest {
  std::string split;
  std::size_t count = 0;
  std::uint64_t master_seed = 0;
  std::string config_hash;
  std::string version = std::string(kToolkitVersion);

  bool operator==(const SplitManifest&) const = default;
};

NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(SplitManifest, split, count, master_seed, config_hash, version)

inline std::string manifest_path(const std::string& split_path) { return split_path + ".manifest"; }

// ---------------------------------------------------------------------------
// Line reading

struct ReadReport {
  std::vector<Diagnostic> errors;
  std::vector<std::string> warnings;
};

// Calls `fn(record, line_number)` for every complete non-blank line. Lines
// that are not JSON, or for which `fn` throws condlogic::Error or a JSON
// error, are recorded in `report.errors` and skipped.
inline void for_each_record(std::istream& in, const std::function<void(const json&, std::size_t)>& fn,
                            ReadReport& report) {
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (in.eof()) {
      if (line.find_first_not_of(" \t\r") != std::string::npos) {
        report.warnings.push_back("line " + std::to_string(lineno) + ": unterminated final line skipped");
      }
      break;
    }
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      fn(json::parse(line), lineno);
    } catch (const json::exception& e) {
      report.errors.push_back({lineno, e.what()});
    } catch (const Error& e) {
      report.errors.push_back({lineno, e.what()});
    }
  }
}

inline std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "'");
  return in;
}

inline std::optional<SplitManifest> read_manifest(const std::string& split_path) {
  std::ifstream in(manifest_path(split_path));
  if (!in) return std::nullopt;
  try {
    return json::parse(in).get<SplitManifest>();
  } catch (const json::exception&) {
    return std::nullopt;
  }
}

// ---------------------------------------------------------------------------
// Splits

class SplitWriter {
 public:
  explicit SplitWriter(std::string path) : path_(std::move(path)), out_(path_, std::ios::out | std::ios::trunc) {
    if (!out_) throw IoError("cannot write '" + path_ + "'");
  }

  void write(const Example& ex) {
    out_ << example_to_json(ex).dump() << '\n';
    if (!out_) throw IoError("write to '" + path_ + "' failed");
    ++count_;
  }

  // Flushes the data and writes the manifest with the final record count.
  void finish(SplitManifest manifest) {
    out_.flush();
    if (!out_) throw IoError("flush of '" + path_ + "' failed");
    manifest.count = count_;
    std::ofstream m(manifest_path(path_), std::ios::out | std::ios::trunc);
    m << json(manifest).dump(2) << '\n';
    if (!m) throw IoError("cannot write manifest for '" + path_ + "'");
  }

  std::size_t count() const { return count_; }

 private:
  std::string path_;
  std::ofstream out_;
  std::size_t count_ = 0;
};

template <typename Range>
void write_split(const Range& examples, const std::string& path, SplitManifest manifest) {
  SplitWriter w(path);
  for (const auto& ex : examples) w.write(ex);
  w.finish(std::move(manifest));
}

struct SplitContents {
  std::vector<Example> examples;
  ReadReport report;
  std::optional<SplitManifest> manifest;
};

// Streams a split through `fn` one record at a time.
inline ReadReport read_split(const std::string& path, const std::function<void(Example)>& fn) {
  auto in = open_input(path);
  ReadReport report;
  std::size_t good = 0;
  for_each_record(
      in,
      [&](const json& j, std::size_t) {
        fn(example_from_json(j));
        ++good;
      },
      report);
  if (auto m = read_manifest(path); m && m->count != good + report.errors.size()) {
    report.warnings.push_back("manifest count " + std::to_string(m->count) + " does not match " +
                              std::to_string(good + report.errors.size()) + " records in '" + path + "'");
  }
  return report;
}

inline SplitContents read_split(const std::string& path) {
  SplitContents out;
  out.report = read_split(path, [&](Example ex) { out.examples.push_back(std::move(ex)); });
  out.manifest = read_manifest(path);
  return out;
}

// ---------------------------------------------------------------------------
// Templates: {"template_id": "T000", "dsl": "If all (A, B), then U. ..."}

inline void write_templates(const std::vector<Template>& templates, const std::string& path) {
  std::ofstream out(path, std::ios::out | std::ios::trunc);
  if (!out) throw IoError("cannot write '" + path + "'");
  for (std::size_t i = 0; i < templates.size(); ++i) {
    out << json{{"template_id", template_id(i)}, {"dsl", render_template_dsl(templates[i])}}.dump() << '\n';
  }
  if (!out) throw IoError("write to '" + path + "' failed");
}

inline std::vector<std::pair<std::string, Template>> read_templates(const std::string& path, ReadReport& report) {
  auto in = open_input(path);
  std::vector<std::pair<std::string, Template>> out;
  for_each_record(
      in,
      [&](const json& j, std::size_t) {
        out.emplace_back(j.at("template_id").get<std::string>(), parse_template_dsl(j.at("dsl").get<std::string>()));
      },
      report);
  return out;
}

// ---------------------------------------------------------------------------
// HTML element and discourse-unit inputs

inline std::vector<HtmlElement> read_html_elements(std::istream& in, ReadReport& report) {
  std::vector<HtmlElement> out;
  for_each_record(
      in,
      [&](const json& j, std::size_t) {
        HtmlElement el;
        el.tag = html_tag_from_string(j.at("tag").get<std::string>());
        el.text = j.at("text").get<std::string>();
        if (trim(el.text).empty()) throw InvariantError("element text is empty");
        el.index = out.size();
        out.push_back(std::move(el));
      },
      report);
  return out;
}

inline std::vector<EduSequence> read_edu_sequences(std::istream& in, ReadReport& report) {
  std::vector<EduSequence> out;
  for_each_record(
      in,
      [&](const json& j, std::size_t) {
        EduSequence s;
        s.sentence_id = j.value("sentence_id", std::to_string(out.size()));
        s.sentence = j.at("sentence").get<std::string>();
        s.spans = j.at("spans").get<std::vector<std::string>>();
        validate(s);
        out.push_back(std::move(s));
      },
      report);
  return out;
}

}  // namespace condlogic
