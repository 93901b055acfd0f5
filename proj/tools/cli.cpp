#include "cli.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include "fretfrag/analysis.hpp"
#include "fretfrag/equivalence.hpp"
#include "fretfrag/json.hpp"
#include "fretfrag/parser.hpp"
#include "fretfrag/refactor.hpp"
#include "fretfrag/semantics.hpp"

namespace fretfrag::cli {

namespace fs = std::filesystem;

void write_atomically(const std::string& path, const std::string& content) {
  const fs::path target(path);
  const fs::path dir = target.has_parent_path() ? target.parent_path() : fs::path(".");
  std::random_device rd;
  const fs::path tmp =
      dir / ("." + target.filename().string() + ".tmp" + std::to_string(rd() % 1000000));
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw Error(ErrorKind::InvalidArgument, "cannot write '" + tmp.string() + "'");
    f << content;
    f.flush();
    if (!f) {
      f.close();
      fs::remove(tmp);
      throw Error(ErrorKind::InvalidArgument, "cannot write '" + tmp.string() + "'");
    }
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp);
    throw Error(ErrorKind::InvalidArgument, "cannot replace '" + path + "': " + ec.message());
  }
}

namespace {

std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorKind::InvalidArgument, "cannot read '" + path + "'");
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

RequirementSet load(const std::string& path) { return parse(read_file(path), path); }

std::string join(const std::vector<std::string>& xs, const std::string& sep) {
  std::string out;
  for (const auto& x : xs) out += (out.empty() ? "" : sep) + x;
  return out;
}

struct EquivFlags {
  int max_len = 4;
  std::string mode = "auto";
  std::uint64_t samples = 100000;
  std::uint64_t seed = EquivConfig::kDefaultSeed;
  int max_atoms = 5;
  unsigned workers = 1;

  void attach(CLI::App* cmd) {
    cmd->add_option("--max-len", max_len, "longest trace length")->capture_default_str()
        ->check(CLI::Range(1, 64));
    cmd->add_option("--mode", mode, "exhaustive, random or auto")->capture_default_str()
        ->check(CLI::IsMember({"exhaustive", "random", "auto"}));
    cmd->add_option("--samples", samples, "random traces to try")->capture_default_str();
    cmd->add_option("--seed", seed, "random seed")->capture_default_str();
    cmd->add_option("--max-atoms", max_atoms, "atom budget for exhaustive mode")
        ->capture_default_str();
    cmd->add_option("--workers", workers, "enumeration threads, 0 = all cores")
        ->capture_default_str();
  }

  EquivConfig config() const {
    EquivConfig cfg;
    cfg.max_len = max_len;
    cfg.mode = mode == "random"  ? EquivConfig::Mode::Random
               : mode == "auto" ? EquivConfig::Mode::Auto
                                 : EquivConfig::Mode::Exhaustive;
    cfg.samples = samples;
    cfg.seed = seed;
    cfg.max_atoms_exhaustive = max_atoms;
    cfg.workers = workers;
    return cfg;
  }
};

void emit(std::ostream& out, const std::string& text, const std::string& write_path) {
  if (write_path.empty()) {
    out << text;
  } else {
    write_atomically(write_path, text);
  }
}

// Every problem in the set, not only the first.
std::vector<std::string> lint(const std::string& path) {
  std::vector<std::string> problems;
  RequirementSet set;
  try {
    set = load(path);
  } catch (const Error& e) {
    return {e.render()};
  }
  try {
    validate(set);
  } catch (const Error& e) {
    problems.push_back(e.render());
    return problems;
  }
  for (const auto& r : set.requirements()) {
    try {
      combine_templates(r, set);
    } catch (const Error& e) {
      problems.push_back(e.render());
    }
  }
  return problems;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Structured requirements with reusable fragments", "fretfrag"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all");

  std::string file, file2, req_id, name, pattern, prefix = "Frag", fragment, left, right;
  std::vector<std::string> targets;
  bool json_out = false, write = false, to_stdout = false, do_inline = false, apply = false;
  bool dot = false, responses = false;
  int min_support = 2;
  EquivFlags eq;

  auto file_arg = [&](CLI::App* cmd, std::string& slot, const char* label) {
    cmd->add_option(label, slot, "requirements file")->required()->check(CLI::ExistingFile);
  };

  auto* c_parse = app.add_subcommand("parse", "parse a file and dump its syntax tree");
  file_arg(c_parse, file, "FILE");
  c_parse->add_flag("--json", json_out, "print the syntax tree as JSON");

  auto* c_fmt = app.add_subcommand("fmt", "print the canonical layout");
  file_arg(c_fmt, file, "FILE");
  c_fmt->add_flag("--write", write, "rewrite FILE in place");

  auto* c_lint = app.add_subcommand("lint", "report unknown fragments, cycles, conflicts, duplicate ids");
  file_arg(c_lint, file, "FILE");

  auto* c_ltl = app.add_subcommand("ltl", "emit the temporal logic formula of a requirement");
  file_arg(c_ltl, file, "FILE");
  c_ltl->add_option("--req", req_id, "requirement id")->required();
  c_ltl->add_flag("--inline", do_inline, "inline fragments first");

  auto* c_inline = app.add_subcommand("inline", "print the set with every fragment inlined");
  file_arg(c_inline, file, "FILE");
  c_inline->add_option("--req", req_id, "only this requirement");

  auto* c_extract = app.add_subcommand("extract", "extract a fragment from target requirements");
  file_arg(c_extract, file, "FILE");
  c_extract->add_option("--name", name, "fragment name")->required();
  c_extract->add_option("--pattern", pattern, "fragment body in .fret syntax")->required();
  c_extract->add_option("--targets", targets, "requirement ids")->required()->delimiter(',');
  auto* w_extract = c_extract->add_flag("--write", write, "rewrite FILE in place");
  c_extract->add_flag("--stdout", to_stdout, "print the result (default)")->excludes(w_extract);

  auto* c_dups = app.add_subcommand("dups", "mine duplicate fragment candidates");
  file_arg(c_dups, file, "FILE");
  c_dups->add_option("--min-support", min_support, "minimum number of requirements")
      ->capture_default_str()->check(CLI::PositiveNumber);
  c_dups->add_flag("--include-responses", responses, "also mine response conjuncts");
  c_dups->add_flag("--json", json_out, "print candidates as JSON");
  auto* f_apply = c_dups->add_flag("--apply", apply, "extract every candidate");
  c_dups->add_option("--prefix", prefix, "generated fragment name prefix")->capture_default_str();
  c_dups->add_flag("--write", write, "rewrite FILE in place")->needs(f_apply);

  auto* c_equiv = app.add_subcommand("equiv", "bounded equivalence of two requirements");
  file_arg(c_equiv, file, "FILE");
  c_equiv->add_option("--left", left, "requirement id")->required();
  c_equiv->add_option("--right", right, "requirement id")->required();
  c_equiv->add_flag("--json", json_out, "print the verdict as JSON");
  eq.attach(c_equiv);

  auto* c_check = app.add_subcommand("check-refactor", "compare every requirement of two sets");
  file_arg(c_check, file, "BEFORE");
  file_arg(c_check, file2, "AFTER");
  c_check->add_flag("--json", json_out, "print the report as JSON");
  eq.attach(c_check);

  auto* c_graph = app.add_subcommand("graph", "requirement to fragment dependency graph");
  file_arg(c_graph, file, "FILE");
  c_graph->add_flag("--dot", dot, "Graphviz output");
  c_graph->add_flag("--json", json_out, "JSON output");

  auto* c_impact = app.add_subcommand("impact", "requirements affected by a fragment change");
  file_arg(c_impact, file, "FILE");
  c_impact->add_option("--fragment", fragment, "fragment name")->required();

  std::vector<std::string> rev(args.rbegin(), args.rend());
  if (!rev.empty()) rev.pop_back();
  try {
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kSuccess : kUsageError;
  }

  try {
    if (c_parse->parsed()) {
      const RequirementSet set = load(file);
      if (json_out) {
        out << to_json(set).dump(2) << "\n";
      } else {
        out << "parsed " << set.requirements().size() << " requirements and "
            << set.fragments().size() << " fragments\n";
      }
    } else if (c_fmt->parsed()) {
      emit(out, print(load(file)), write ? file : "");
    } else if (c_lint->parsed()) {
      const auto problems = lint(file);
      for (const auto& p : problems) err << p << "\n";
      if (!problems.empty()) return kDomainError;
      out << "ok\n";
    } else if (c_ltl->parsed()) {
      const RequirementSet set = load(file);
      validate(set);
      Requirement r = set.requirement(req_id);
      if (do_inline) r = combine_templates(r, set);
      out << to_text(to_ltl(r)) << "\n";
    } else if (c_inline->parsed()) {
      const RequirementSet set = load(file);
      validate(set);
      if (req_id.empty()) {
        out << print(inline_all(set));
      } else {
        out << print(combine_templates(set.requirement(req_id), set));
      }
    } else if (c_extract->parsed()) {
      const RequirementSet set = load(file);
      validate(set);
      Fragment body = parse_fragment(pattern, "<pattern>");
      const RequirementSet result = extract_fragment(set, {name, std::move(body), targets});
      emit(out, print(result), write ? file : "");
    } else if (c_dups->parsed()) {
      const RequirementSet set = load(file);
      validate(set);
      DupOptions opts;
      opts.min_support = min_support;
      opts.include_responses = responses;
      const auto cands = find_duplicates(set, opts);
      if (apply) {
        const ApplyResult res = apply_duplicates(set, cands, prefix);
        for (const auto& line : res.log) err << line << "\n";
        emit(out, print(res.set), write ? file : "");
      } else if (json_out) {
        out << to_json(cands).dump(2) << "\n";
      } else {
        out << cands.size() << " candidates (min support " << min_support << ")\n";
        for (std::size_t i = 0; i < cands.size(); ++i) {
          const auto& c = cands[i];
          out << i + 1 << ". support " << c.support.size() << ", size " << c.size << ": "
              << c.text() << "\n";
          out << "   in: " << join(c.support, ", ") << "\n";
          // nested atoms are left to --json
          for (const auto& p : c.subsumed) {
            if (p.size() > 1) out << "   nested: " << p.text() << "\n";
          }
        }
      }
    } else if (c_equiv->parsed() || c_check->parsed()) {
      const EquivConfig cfg = eq.config();
      if (cfg.mode != EquivConfig::Mode::Exhaustive) err << "seed: " << cfg.seed << "\n";
      bool passed = false;
      if (c_equiv->parsed()) {
        const RequirementSet set = load(file);
        validate(set);
        const Verdict v = equivalent(set.requirement(left), set.requirement(right), set, cfg);
        out << (json_out ? to_json(v).dump(2) : to_text(v)) << "\n";
        passed = v.passed();
      } else {
        const RequirementSet before = load(file);
        const RequirementSet after = load(file2);
        validate(before);
        validate(after);
        const RefactorReport report = check_refactoring(before, after, cfg);
        if (json_out) {
          out << to_json(report).dump(2) << "\n";
        } else {
          out << to_text(report);
        }
        passed = report.all_passed();
      }
      if (!passed) return kDomainError;
    } else if (c_graph->parsed()) {
      const RequirementSet set = load(file);
      validate(set);
      const DependencyGraph g = dependency_graph(set);
      if (json_out) {
        out << to_json(g).dump(2) << "\n";
      } else if (dot) {
        out << g.to_dot();
      } else {
        for (const auto& [from, to] : g.edges) out << from << " -> " << to << "\n";
      }
    } else if (c_impact->parsed()) {
      const RequirementSet set = load(file);
      validate(set);
      for (const auto& id : impact(set, fragment)) out << id << "\n";
    }
  } catch (const Error& e) {
    err << e.render() << "\n";
    return kDomainError;
  }
  return kSuccess;
}

}  // namespace fretfrag::cli
