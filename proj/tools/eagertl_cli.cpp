// eagertl: command-line front end.
//
// Exit codes: 0 success, 1 refusal or negative answer, 2 input error,
// 3 search budget exhausted.

#include "eagertl.hpp"
#include "eagertl/json_io.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

namespace {

using namespace eagertl;

enum Exit { ok = 0, refused = 1, bad_input = 2, budget = 3 };

struct input_error : error {
  using error::error;
};

bool quiet = false;

std::ostream &report() {
  static std::ostream null(nullptr);
  return quiet ? null : std::cerr;
}

std::string read_file(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw input_error("cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string &path, const std::string &text) {
  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw input_error("cannot write '" + path + "'");
  out << text;
}

void emit(const json &j) { std::cout << j.dump(2) << "\n"; }

std::size_t env_size(const char *name, std::size_t fallback) {
  const char *v = std::getenv(name);
  if (!v || !*v)
    return fallback;
  char *end = nullptr;
  const auto n = std::strtoull(v, &end, 10);
  if (*end || n == 0)
    throw input_error(std::string(name) + " must be a positive integer");
  return static_cast<std::size_t>(n);
}

bool out_of_fragment(const Violation &v) {
  return v.what.find("out of fragment") != std::string::npos;
}

/// Parses and validates a problem file. Returns the exit code to use when
/// the problem is unusable, `ok` otherwise.
int load_problem(const std::string &path, PlanningProblem &p, json &out) {
  try {
    p = parse_problem(read_file(path));
  } catch (const parse_error &e) {
    out["error"] = path + ":" + e.what();
    report() << path << ":" << e.what() << "\n";
    return bad_input;
  }
  const auto issues = validate_problem(p);
  out["violations"] = violations_to_json(issues);
  for (const auto &v : issues)
    report() << path << ": " << to_string(v) << "\n";
  if (!has_errors(issues))
    return ok;
  for (const auto &v : issues)
    if (!v.warning && !out_of_fragment(v))
      return bad_input;
  return refused;
}

json classify_all(const PlanningProblem &p, bool &all_eager) {
  json rules = json::array();
  all_eager = true;
  for (const auto &r : p.rules) {
    const auto c = is_eager_rule(r);
    all_eager &= c.eager;
    rules.push_back(classification_to_json(r, c));
    if (!c.eager) {
      report() << "rule " << r.name << ": not eager (";
      for (std::size_t i = 0; i < c.reasons.size(); ++i)
        report() << (i ? "; " : "") << c.reasons[i];
      report() << ")\n";
    }
  }
  return rules;
}

int cmd_check(const std::string &file) {
  PlanningProblem p;
  json out = {{"command", "check"}, {"file", file}};
  if (int rc = load_problem(file, p, out); rc != ok) {
    out["valid"] = false;
    emit(out);
    return rc;
  }
  out["valid"] = true;
  bool eager = false;
  out["rules"] = classify_all(p, eager);
  out["eager"] = eager;
  emit(out);
  if (eager)
    report() << "all rules eager\n";
  return eager ? ok : refused;
}

struct SolveArgs {
  std::string file, emit_plan, dot;
  std::size_t max_states = 0, max_len = 0;
  bool allow_empty = false, timing = false;
};

int cmd_solve(const SolveArgs &a) {
  PlanningProblem p;
  json out = {{"command", "solve"}, {"file", a.file}};
  if (int rc = load_problem(a.file, p, out); rc != ok) {
    emit(out);
    return rc;
  }
  bool eager = false;
  const auto cls = classify_all(p, eager);
  if (!eager) {
    out["status"] = "refused";
    out["rules"] = cls;
    emit(out);
    return refused;
  }
  SolveOptions opt;
  opt.budget.max_states =
      a.max_states ? a.max_states : env_size("EAGERTL_MAX_STATES", opt.budget.max_states);
  opt.budget.max_len = a.max_len ? a.max_len : env_size("EAGERTL_MAX_LEN", opt.budget.max_len);
  opt.budget.allow_empty = a.allow_empty;
  opt.want_dot = !a.dot.empty();
  const auto res = find_solution(p, opt);
  const Signature sig(p);
  auto j = solve_result_to_json(sig, res, a.timing);
  for (auto it = j.begin(); it != j.end(); ++it)
    out[it.key()] = it.value();
  if (!a.dot.empty())
    write_file(a.dot, res.dot);
  if (res.plan && !a.emit_plan.empty())
    write_file(a.emit_plan, plan_to_json(*res.plan).dump(2) + "\n");
  emit(out);
  switch (res.status) {
  case SolveStatus::solution:
    report() << "solution of horizon " << res.plan->horizon << " after "
             << res.stats.states << " states\n";
    return ok;
  case SolveStatus::empty:
    report() << "no solution plan exists\n";
    return refused;
  case SolveStatus::budget_exhausted:
    report() << "budget exhausted: " << res.reason << "\n";
    return budget;
  }
  return refused;
}

int cmd_verify(const std::string &file, const std::string &plan_file) {
  PlanningProblem p;
  json out = {{"command", "verify"}, {"file", file}, {"plan", plan_file}};
  if (int rc = load_problem(file, p, out); rc != ok) {
    emit(out);
    return rc;
  }
  Plan plan;
  try {
    plan = parse_plan(read_file(plan_file));
  } catch (const error &e) {
    out["error"] = e.what();
    report() << plan_file << ": " << e.what() << "\n";
    emit(out);
    return bad_input;
  }
  const auto issues = validate_plan(p, plan);
  if (!issues.empty()) {
    out["plan_violations"] = violations_to_json(issues);
    for (const auto &v : issues)
      report() << plan_file << ": " << to_string(v) << "\n";
    emit(out);
    return bad_input;
  }
  const auto rep = verify_solution(p, plan);
  out["report"] = solution_report_to_json(rep);
  emit(out);
  if (rep.solution) {
    report() << "plan is a solution\n";
    return ok;
  }
  for (const auto &r : rep.failing_rules())
    report() << "rule " << r << " violated\n";
  return refused;
}

int cmd_allen(const std::string &format, bool reflexive) {
  const auto rows = allen_table(reflexive);
  std::cout << (format == "csv" ? allen_table_csv(rows) : allen_table_text(rows));
  return ok;
}

int cmd_lowerbound(int n, const std::string &format, bool timing) {
  if (n < 1 || n > 5)
    throw input_error("--n must lie in 1..5");
  const auto r = count_distinguished(n);
  if (format == "csv")
    std::cout << lowerbound_csv({r}, timing);
  else
    emit(lowerbound_to_json(r, timing));
  const auto two = std::uint64_t{1} << n;
  report() << "n=" << n << " classes=" << r.classes
           << (r.classes > two ? " > " : r.classes == two ? " = " : " < ") << two
           << " (" << r.verified_pairs << "/" << r.pairs << " pairs certified)\n";
  return r.verified_pairs == r.pairs && r.disagreements == 0 ? ok : refused;
}

int cmd_bpmn(const std::string &tree_file, const std::string &out_file,
             bool overlay, const std::string &fixtures_dir) {
  SeseBlock tree;
  try {
    tree = parse_sese(read_file(tree_file));
  } catch (const input_error &) {
    throw;
  } catch (const error &e) {
    report() << tree_file << ": " << e.what() << "\n";
    emit({{"command", "bpmn"}, {"file", tree_file}, {"error", e.what()}});
    return bad_input;
  }
  auto cp = compile(tree);
  if (overlay)
    add_condition_overlay(cp, "b4", "b16");
  const std::string text = print_problem(cp.problem);
  if (!fixtures_dir.empty()) {
    auto fx = overlay ? overlay_fixture_plans() : fixture_plans();
    for (const auto &f : fx)
      write_file(fixtures_dir + "/" + f.name + ".json",
                 plan_to_json(f.plan).dump(2) + "\n");
  }
  if (out_file.empty()) {
    std::cout << text;
  } else {
    write_file(out_file, text);
    emit({{"command", "bpmn"},
          {"file", tree_file},
          {"output", out_file},
          {"blocks", tree.size()},
          {"variables", cp.problem.vars.size()},
          {"rules", cp.problem.rules.size()}});
  }
  report() << "compiled " << tree.size() << " blocks into "
           << cp.problem.vars.size() << " variables and "
           << cp.problem.rules.size() << " rules\n";
  return ok;
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"Eager qualitative timeline-based planning toolkit"};
  app.require_subcommand(1);
  app.fallthrough();
  app.add_flag("-q,--quiet", quiet, "Suppress reports on standard error");

  std::string file, plan_file, format = "text", out_file, fixtures_dir;
  bool reflexive = false, overlay = false, timing = false;
  int n = 4;
  SolveArgs sa;

  auto *check = app.add_subcommand("check", "Validate a problem and classify its rules");
  check->add_option("problem", file, "Problem file")->required();

  auto *solve = app.add_subcommand("solve", "Decide plan existence and print a witness");
  solve->add_option("problem", sa.file, "Problem file")->required();
  solve->add_option("--max-states", sa.max_states, "State budget (env EAGERTL_MAX_STATES)");
  solve->add_option("--max-len", sa.max_len, "Horizon budget (env EAGERTL_MAX_LEN)");
  solve->add_option("--emit-plan", sa.emit_plan, "Write the plan as JSON");
  solve->add_option("--dot", sa.dot, "Write the explored product as DOT");
  solve->add_flag("--allow-empty", sa.allow_empty, "Accept the horizon-0 plan");
  solve->add_flag("--timing", sa.timing, "Include wall-clock time");

  auto *verify = app.add_subcommand("verify", "Check a plan against a problem");
  verify->add_option("problem", file, "Problem file")->required();
  verify->add_option("plan", plan_file, "Plan JSON file")->required();

  auto *allen = app.add_subcommand("allen-table", "Print the Allen eagerness table");
  allen->add_option("--format", format, "text or csv")
      ->check(CLI::IsMember({"text", "csv"}));
  allen->add_flag("--reflexive", reflexive, "Use the reflexive relations");

  auto *lb = app.add_subcommand("lowerbound", "Count distinguished words for P_n");
  lb->add_option("--n", n, "Instance size (1..5)");
  lb->add_option("--format", format, "json or csv")->check(CLI::IsMember({"json", "csv", "text"}));
  lb->add_flag("--timing", timing, "Include wall-clock time");

  auto *bp = app.add_subcommand("bpmn", "Compile a SESE tree into a problem file");
  bp->add_option("tree", file, "SESE tree JSON file")->required();
  bp->add_option("-o,--output", out_file, "Problem file to write");
  bp->add_flag("--condition-overlay", overlay, "Add the patient-condition timeline");
  bp->add_option("--fixtures", fixtures_dir, "Write the figure plans into this directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp &e) {
    return app.exit(e);
  } catch (const CLI::ParseError &e) {
    app.exit(e);
    return bad_input;
  }

  try {
    if (*check)
      return cmd_check(file);
    if (*solve)
      return cmd_solve(sa);
    if (*verify)
      return cmd_verify(file, plan_file);
    if (*allen)
      return cmd_allen(format, reflexive);
    if (*lb)
      return cmd_lowerbound(n, format, timing);
    if (*bp)
      return cmd_bpmn(file, out_file, overlay, fixtures_dir);
  } catch (const input_error &e) {
    std::cerr << "error: " << e.what() << "\n";
    return bad_input;
  } catch (const not_eager &e) {
    std::cerr << "error: " << e.what() << "\n";
    return refused;
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << "\n";
    return refused;
  }
  return bad_input;
}
