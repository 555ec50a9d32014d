// condlogic: generate synthetic conditional-NLI data, solve templates, parse
// contexts into condition groups, and score predictions.
//
// Exit codes: 0 success, 1 usage or validation error, 2 I/O error.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <iterator>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "condlogic/condlogic.hpp"

namespace fs = std::filesystem;
using namespace condlogic;

namespace {

constexpr int kOk = 0;
constexpr int kUsage = 1;
constexpr int kIo = 2;

std::string format_verdict(const Verdict& v) {
  std::string out(to_string(v.label));
  for (std::size_t i = 0; i < v.unsatisfied.size(); ++i) out += (i ? ", " : ", if ") + v.unsatisfied[i];
  return out;
}

void print_diagnostics(const std::string& source, const ReadReport& report) {
  for (const auto& e : report.errors) std::cerr << source << ":" << e.line << ": " << e.message << '\n';
  for (const auto& w : report.warnings) std::cerr << source << ": warning: " << w << '\n';
}

// ---------------------------------------------------------------------------
// generate

struct GenerateArgs {
  std::string bank;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::size_t templates = 65;
  std::size_t max_conditions = 6;
  std::size_t min_conditions = 1;
  std::size_t dev = 5000;
  std::size_t test = 5000;
  std::size_t train = 0;
};

int cmd_generate(const GenerateArgs& a) {
  if (!a.seed) {
    std::cerr << "generate: --seed is required\n";
    return kUsage;
  }
  GenConfig config;
  config.seed = *a.seed;
  config.n_templates = a.templates;
  config.max_conditions = a.max_conditions;
  config.min_conditions = a.min_conditions;
  config.n_dev = a.dev;
  config.n_test = a.test;
  try {
    config.validate();
  } catch (const Error& e) {
    std::cerr << "generate: " << e.what() << '\n';
    return kUsage;
  }

  NliBank bank;
  try {
    bank = load_nli_bank(a.bank);
  } catch (const IoError& e) {
    std::cerr << "generate: " << e.what() << '\n';
    return kIo;
  } catch (const Error& e) {
    std::cerr << "generate: " << e.what() << '\n';
    return kUsage;
  }
  for (const auto& d : bank.rejected) std::cerr << a.bank << ":" << d.line << ": rejected: " << d.message << '\n';

  std::error_code ec;
  fs::create_directories(a.out, ec);
  if (ec) {
    std::cerr << "generate: cannot create '" << a.out << "': " << ec.message() << '\n';
    return kIo;
  }

  try {
    const ExampleGenerator gen(config, bank);
    write_templates(gen.templates(), (fs::path(a.out) / "templates.jsonl").string());

    struct Row {
      std::string split;
      std::size_t count = 0;
      std::map<AnswerLabel, std::size_t> labels;
      std::size_t with_conditions = 0;
    };
    std::vector<Row> rows;
    auto emit = [&](Split split, std::size_t count) {
      const auto path = (fs::path(a.out) / (std::string(to_string(split)) + ".jsonl")).string();
      SplitWriter writer(path);
      Row row;
      row.split = std::string(to_string(split));
      for (std::size_t i = 0; i < count; ++i) {
        const auto ex = gen.make(split, i);
        writer.write(ex);
        ++row.labels[ex.gold.label];
        row.with_conditions += ex.gold.unsatisfied.empty() ? 0 : 1;
      }
      row.count = writer.count();
      writer.finish({row.split, row.count, config.seed, config_hash(config), std::string(kToolkitVersion)});
      rows.push_back(row);
    };
    emit(Split::Dev, config.n_dev);
    emit(Split::Test, config.n_test);
    if (a.train > 0) emit(Split::Train, a.train);

    std::size_t max_size = 0;
    for (const auto& t : gen.templates()) max_size = std::max(max_size, condition_count(t));
    std::cout << "templates: " << gen.templates().size() << " (largest has " << max_size << " conditions)\n";
    std::cout << "config hash: " << config_hash(config) << "\n\n";
    const std::vector<AnswerLabel> labels = label_space(TaskProfile::CondNli);
    std::cout << std::left << std::setw(7) << "split" << std::right << std::setw(9) << "examples";
    for (auto l : labels) std::cout << std::setw(14) << to_string(l);
    std::cout << std::setw(17) << "with conditions" << '\n';
    for (const auto& row : rows) {
      std::cout << std::left << std::setw(7) << row.split << std::right << std::setw(9) << row.count;
      for (auto l : labels) {
        auto it = row.labels.find(l);
        std::cout << std::setw(14) << (it == row.labels.end() ? 0 : it->second);
      }
      std::cout << std::setw(17) << row.with_conditions << '\n';
    }
  } catch (const IoError& e) {
    std::cerr << "generate: " << e.what() << '\n';
    return kIo;
  } catch (const Error& e) {
    std::cerr << "generate: " << e.what() << '\n';
    return kUsage;
  }
  return kOk;
}

// ---------------------------------------------------------------------------
// solve

struct SolveArgs {
  std::string file;
  bool use_stdin = false;
  std::string assignments;
  std::string templates;
};

int print_assignments(const std::string& spec) {
  const auto colon = spec.find(':');
  const auto type = logical_type_from_string(spec.substr(0, colon));
  std::size_t k = 0;
  try {
    if (colon == std::string::npos) throw std::invalid_argument("missing ':'");
    std::size_t used = 0;
    k = std::stoul(spec.substr(colon + 1), &used);
    if (used != spec.size() - colon - 1) throw std::invalid_argument("trailing characters");
  } catch (const std::exception&) {
    std::cerr << "solve: --assignments expects OP:K, e.g. any:3\n";
    return kUsage;
  }
  if (!type || *type == LogicalType::Unknown) {
    std::cerr << "solve: unknown logical type in '" << spec << "'\n";
    return kUsage;
  }
  std::vector<AssignmentRow> table;
  try {
    table = enumerate_assignments(*type, k);
  } catch (const Error& e) {
    std::cerr << "solve: " << e.what() << '\n';
    return kUsage;
  }
  std::cout << "# " << to_string(*type) << " over " << k << " conditions: " << table.size() << " assignments\n";
  for (const auto& row : table) {
    for (std::size_t i = 0; i < row.assignment.size(); ++i) {
      std::cout << (i ? " " : "") << std::left << std::setw(13) << to_string(row.assignment[i]);
    }
    std::cout << " | " << std::setw(12) << to_string(row.status) << " |";
    for (auto l : row.labels) std::cout << ' ' << to_string(l);
    std::cout << std::right << '\n';
  }
  return kOk;
}

int solve_dsl(const std::string& text) {
  try {
    const auto t = parse_template_dsl(text);
    auto verdict = solve_template(t);
    const auto ids = condition_ids(t);
    for (auto& v : verdict.unsatisfied) v = ids.at(v);
    std::cout << format_verdict(verdict) << '\n';
  } catch (const ParseError& e) {
    std::cerr << "solve: parse error at " << e.what() << '\n';
    return kUsage;
  } catch (const Error& e) {
    std::cerr << "solve: " << e.what() << '\n';
    return kUsage;
  }
  return kOk;
}

int solve_records(const std::string& text, const SolveArgs& a) {
  std::vector<json> records;
  {
    std::istringstream in(text);
    ReadReport report;
    for_each_record(in, [&](const json& j, std::size_t) { records.push_back(j); }, report);
    print_diagnostics(a.use_stdin ? "<stdin>" : a.file, report);
    if (!report.errors.empty()) return kUsage;
  }
  if (records.empty()) {
    std::cerr << "solve: no records\n";
    return kUsage;
  }

  try {
    if (records.front().contains("dsl")) {
      for (const auto& r : records) {
        const auto t = parse_template_dsl(r.at("dsl").get<std::string>());
        auto verdict = solve_template(t);
        const auto ids = condition_ids(t);
        for (auto& v : verdict.unsatisfied) v = ids.at(v);
        std::cout << r.value("template_id", std::string("?")) << ": " << format_verdict(verdict) << '\n';
      }
      return kOk;
    }

    // Examples: re-solve each one from its template and compare with gold.
    std::string templates_path = a.templates;
    if (templates_path.empty()) {
      if (a.use_stdin) {
        std::cerr << "solve: --templates is required to re-solve examples read from stdin\n";
        return kUsage;
      }
      templates_path = (fs::path(a.file).parent_path() / "templates.jsonl").string();
    }
    ReadReport report;
    std::map<std::string, Template> templates;
    try {
      for (auto& [id, t] : read_templates(templates_path, report)) templates.emplace(id, std::move(t));
    } catch (const IoError& e) {
      std::cerr << "solve: " << e.what() << '\n';
      return kIo;
    }
    print_diagnostics(templates_path, report);

    std::size_t agree = 0;
    for (const auto& r : records) {
      const auto ex = example_from_json(r);
      const auto it = templates.find(ex.template_id);
      if (it == templates.end()) {
        std::cerr << "solve: " << ex.id << ": unknown template '" << ex.template_id << "'\n";
        continue;
      }
      auto verdict = solve_template(it->second);
      const auto ids = condition_ids(it->second);
      for (auto& v : verdict.unsatisfied) v = ids.at(v);
      const bool same = verdict == ex.gold;
      agree += same ? 1 : 0;
      std::cout << ex.id << ": " << format_verdict(verdict) << (same ? "" : "  [gold: " + format_verdict(ex.gold) + "]")
                << '\n';
    }
    std::cout << "consistent with gold: " << agree << "/" << records.size() << '\n';
    return agree == records.size() ? kOk : kUsage;
  } catch (const Error& e) {
    std::cerr << "solve: " << e.what() << '\n';
    return kUsage;
  } catch (const json::exception& e) {
    std::cerr << "solve: " << e.what() << '\n';
    return kUsage;
  }
}

int cmd_solve(const SolveArgs& a) {
  if (!a.assignments.empty()) return print_assignments(a.assignments);
  if (a.file.empty() == !a.use_stdin) {
    std::cerr << "solve: give exactly one of --file or --stdin\n";
    return kUsage;
  }
  std::string text;
  if (a.use_stdin) {
    text.assign(std::istreambuf_iterator<char>(std::cin), {});
  } else {
    std::ifstream in(a.file);
    if (!in) {
      std::cerr << "solve: cannot open '" << a.file << "'\n";
      return kIo;
    }
    text.assign(std::istreambuf_iterator<char>(in), {});
  }
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] == '{') return solve_records(text, a);
  return solve_dsl(text);
}

// ---------------------------------------------------------------------------
// parse-context

struct ParseContextArgs {
  std::string in;
  std::string out;
  std::string format = "html";
  bool stats = false;
};

int cmd_parse_context(const ParseContextArgs& a) {
  std::ifstream in(a.in);
  if (!in) {
    std::cerr << "parse-context: cannot open '" << a.in << "'\n";
    return kIo;
  }
  ReadReport report;
  std::vector<ConditionGroup> groups;
  std::vector<std::size_t> depths;
  try {
    if (a.format == "edu") {
      const auto seqs = read_edu_sequences(in, report);
      print_diagnostics(a.in, report);
      if (!report.errors.empty()) return kUsage;
      if (seqs.empty()) {
        std::cerr << "parse-context: '" << a.in << "' has no records\n";
        return kIo;
      }
      groups = accept_edu_input(seqs);
    } else {
      const auto elements = read_html_elements(in, report);
      print_diagnostics(a.in, report);
      if (!report.errors.empty()) return kUsage;
      if (elements.empty()) {
        std::cerr << "parse-context: '" << a.in << "' has no records\n";
        return kIo;
      }
      groups = parse_html_context(elements);
      depths = leaf_depths(build_dom_tree(elements));
    }
  } catch (const Error& e) {
    std::cerr << "parse-context: " << e.what() << '\n';
    return kUsage;
  }

  std::ofstream out(a.out, std::ios::out | std::ios::trunc);
  if (!out) {
    std::cerr << "parse-context: cannot write '" << a.out << "'\n";
    return kIo;
  }
  for (const auto& g : groups) out << group_to_json(g).dump() << '\n';
  if (!out) {
    std::cerr << "parse-context: write to '" << a.out << "' failed\n";
    return kIo;
  }

  std::size_t conditions = 0;
  for (const auto& g : groups) conditions += g.conditions.size();
  std::cout << "groups: " << groups.size() << "  conditions: " << conditions << '\n';
  if (a.stats) {
    std::map<std::size_t, std::size_t> sizes;
    for (const auto& g : groups) ++sizes[g.conditions.size()];
    std::cout << "group size histogram:\n";
    for (const auto& [size, n] : sizes) std::cout << "  " << std::setw(3) << size << "  " << n << '\n';
    if (!depths.empty()) {
      std::map<std::size_t, std::size_t> hist;
      for (auto d : depths) ++hist[d];
      std::cout << "leaf depth histogram:\n";
      for (const auto& [depth, n] : hist) std::cout << "  " << std::setw(3) << depth << "  " << n << '\n';
    }
  }
  return kOk;
}

// ---------------------------------------------------------------------------
// evaluate

struct EvaluateArgs {
  std::string pred;
  std::string gold;
  std::string profile;
  std::string per_example;
  std::string out;
};

int cmd_evaluate(const EvaluateArgs& a) {
  const auto profile = task_profile_from_string(a.profile);
  if (!profile) {
    std::cerr << "evaluate: unknown profile '" << a.profile << "'\n";
    return kUsage;
  }
  std::vector<ExampleScore> scores;
  EvalReport report;
  try {
    report = evaluate_files(a.pred, a.gold, *profile, a.per_example.empty() ? nullptr : &scores);
  } catch (const IoError& e) {
    std::cerr << "evaluate: " << e.what() << '\n';
    return kIo;
  } catch (const Error& e) {
    std::cerr << "evaluate: " << e.what() << '\n';
    return kUsage;
  }
  print_report(std::cout, report);

  auto write = [](const std::string& path, auto&& body) {
    std::ofstream out(path, std::ios::out | std::ios::trunc);
    if (!out) return false;
    body(out);
    return static_cast<bool>(out);
  };
  if (!a.per_example.empty() &&
      !write(a.per_example, [&](std::ostream& os) {
        for (const auto& s : scores) os << score_to_json(s).dump() << '\n';
      })) {
    std::cerr << "evaluate: cannot write '" << a.per_example << "'\n";
    return kIo;
  }
  if (!a.out.empty() && !write(a.out, [&](std::ostream& os) { os << report_to_json(report).dump(2) << '\n'; })) {
    std::cerr << "evaluate: cannot write '" << a.out << "'\n";
    return kIo;
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Conditional reasoning toolkit: data generation, solving, context parsing and scoring"};
  app.require_subcommand(1);

  GenerateArgs gen;
  auto* generate = app.add_subcommand("generate", "Generate templates and dev/test splits from an NLI bank");
  generate->add_option("--bank", gen.bank, "NLI bank (JSON lines: premise, hypothesis, label)")->required();
  generate->add_option("--out", gen.out, "Output directory")->required();
  generate->add_option("--seed", gen.seed, "Master seed");
  generate->add_option("--templates", gen.templates, "Number of distinct templates")->capture_default_str();
  generate->add_option("--max-conditions", gen.max_conditions, "Most conditions per template")->capture_default_str();
  generate->add_option("--min-conditions", gen.min_conditions, "Fewest conditions per template")->capture_default_str();
  generate->add_option("--dev", gen.dev, "Dev split size")->capture_default_str();
  generate->add_option("--test", gen.test, "Test split size")->capture_default_str();
  generate->add_option("--train", gen.train, "Also write this many training examples")->capture_default_str();

  SolveArgs solve;
  auto* solve_cmd = app.add_subcommand("solve", "Solve a template, or re-solve a split against its templates");
  solve_cmd->add_option("--file", solve.file, "Template text, templates.jsonl or a split file");
  solve_cmd->add_flag("--stdin", solve.use_stdin, "Read the input from standard input");
  solve_cmd->add_option("--assignments", solve.assignments, "Print the truth table for OP:K (e.g. any:3)");
  solve_cmd->add_option("--templates", solve.templates, "templates.jsonl used to re-solve a split");

  ParseContextArgs pc;
  auto* parse = app.add_subcommand("parse-context", "Turn an HTML element stream into condition groups");
  parse->add_option("--in", pc.in, "Input records (JSON lines)")->required();
  parse->add_option("--out", pc.out, "Output condition groups (JSON lines)")->required();
  parse->add_option("--format", pc.format, "html or edu")->check(CLI::IsMember({"html", "edu"}))->capture_default_str();
  parse->add_flag("--stats", pc.stats, "Print group-size and depth histograms");

  EvaluateArgs ev;
  auto* evaluate_cmd = app.add_subcommand("evaluate", "Score predictions against gold records");
  evaluate_cmd->add_option("--pred", ev.pred, "Prediction records")->required();
  evaluate_cmd->add_option("--gold", ev.gold, "Gold records")->required();
  evaluate_cmd->add_option("--profile", ev.profile, "condnli, conditionalqa or sharc")->required();
  evaluate_cmd->add_option("--per-example", ev.per_example, "Write per-example scores here");
  evaluate_cmd->add_option("--out", ev.out, "Write the report as JSON here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  if (generate->parsed()) return cmd_generate(gen);
  if (solve_cmd->parsed()) return cmd_solve(solve);
  if (parse->parsed()) return cmd_parse_context(pc);
  if (evaluate_cmd->parsed()) return cmd_evaluate(ev);
  return kUsage;
}
