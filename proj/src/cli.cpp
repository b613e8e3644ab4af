#include "acid/cli.hpp"

#include <chrono>
#include <cstdint>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "acid/fuzz.hpp"
#include "acid/parse.hpp"
#include "acid/presets.hpp"
#include "acid/saturation.hpp"
#include "acid/sequent.hpp"
#include "acid/slde.hpp"

namespace acid {
namespace {

using nlohmann::json;

struct RunConfig {
  std::string subcommand;
  std::string preset = "ag";
  std::string theory_path;
  std::string know_path;
  std::string goal_text;
  std::string slde_path;
  std::string proof_out;
  std::string artifact_dir;
  bool json_output = false;
  long budget = 10000;
  int oracle_depth = 4;
  std::uint64_t seed = 1;
  int cases = 100;
  long samples = 200;
};

struct Timer {
  std::chrono::steady_clock::time_point start =
      std::chrono::steady_clock::now();
  double ms() const {
    return std::chrono::duration<double, std::milli>(
               std::chrono::steady_clock::now() - start)
        .count();
  }
};

Theory load_theory(const RunConfig& cfg) {
  if (!cfg.theory_path.empty()) return parse_theory_file(cfg.theory_path);
  return preset_theory(cfg.preset);
}

TermSet load_knowledge(const RunConfig& cfg, Signature& sig) {
  TermSet gamma;
  if (cfg.know_path.empty()) return gamma;
  for (Term& t : parse_knowledge_file(cfg.know_path, sig))
    gamma.insert(std::move(t));
  return gamma;
}

// Goals are ground; identifiers not declared anywhere become private names,
// so an undeclared atom is never silently derivable.
Term load_goal(const RunConfig& cfg, Signature& sig) {
  TermSyntax syn;
  syn.allow_vars = false;
  syn.auto_declare_names = true;
  return parse_term(cfg.goal_text, sig, syn);
}

void witness_json(json& j, const std::optional<MatchWitness>& w,
                  const Signature& sig) {
  if (!w) {
    j["witness_context"] = nullptr;
    j["witness_fillers"] = json::array();
    return;
  }
  MatchWitness r = renumber_holes(*w, sig);
  j["witness_context"] = to_string(r.context, sig);
  json fillers = json::array();
  for (const Term& f : r.fillers) fillers.push_back(to_string(f, sig));
  j["witness_fillers"] = std::move(fillers);
}

void witness_text(std::ostream& os, const std::optional<MatchWitness>& w,
                  const Signature& sig) {
  if (!w) return;
  MatchWitness r = renumber_holes(*w, sig);
  os << "context: " << to_string(r.context, sig) << '\n';
  for (const Term& f : r.fillers)
    os << "filler: " << to_string(f, sig) << '\n';
}

void sequent_line(std::ostream& os, const Sequent& s, const Signature& sig) {
  bool first = true;
  for (const Term& h : s.hypotheses) {
    if (!first) os << ", ";
    os << to_string(h, sig);
    first = false;
  }
  os << " |- " << to_string(s.goal, sig);
}

void proof_tree(std::ostream& os, const ProofNode& p, const Signature& sig,
                int depth) {
  os << std::string(static_cast<size_t>(depth) * 2, ' ') << p.rule << ": ";
  sequent_line(os, p.conclusion, sig);
  os << '\n';
  for (const ProofNode& q : p.premises) proof_tree(os, q, sig, depth + 1);
}

// File format: a 'rows vars' header line, then one line per equation holding
// vars coefficients followed by the target. '#' starts a comment.
DiophantineSystem read_slde_file(const std::string& path) {
  std::string text = read_file(path);
  std::string clean;
  bool comment = false;
  for (char c : text) {
    if (c == '#') comment = true;
    if (c == '\n') comment = false;
    clean.push_back(comment ? ' ' : c);
  }
  std::istringstream in(clean);
  long rows = 0, vars = 0;
  if (!(in >> rows >> vars) || rows < 0 || vars < 0)
    throw ParseError(path + ": expected a 'rows vars' header");
  DiophantineSystem sys;
  sys.vars = static_cast<size_t>(vars);
  sys.coefficients.assign(static_cast<size_t>(rows),
                          std::vector<long>(sys.vars, 0));
  for (long j = 0; j < rows; ++j) {
    for (size_t v = 0; v < sys.vars; ++v)
      if (!(in >> sys.coefficients[static_cast<size_t>(j)][v]))
        throw ParseError(path + ": row " + std::to_string(j + 1) +
                         ": expected " + std::to_string(vars + 1) +
                         " integers");
    long target = 0;
    if (!(in >> target))
      throw ParseError(path + ": row " + std::to_string(j + 1) +
                       ": expected " + std::to_string(vars + 1) + " integers");
    sys.targets.push_back(target);
  }
  long extra = 0;
  if (in >> extra) throw ParseError(path + ": trailing input after the rows");
  return sys;
}

void emit(std::ostream& os, const json& j) { os << j.dump(2) << '\n'; }

// ---- subcommand bodies ------------------------------------------------

int cmd_normalize(const RunConfig& cfg, std::ostream& out) {
  Theory th = load_theory(cfg);
  load_knowledge(cfg, th.sig);  // names declared there may appear in the goal
  Term goal = load_goal(cfg, th.sig);
  Timer timer;
  Term nf = normalize(goal, th, cfg.budget);
  if (cfg.json_output) {
    json j;
    j["input"] = to_string(goal, th.sig);
    j["normal"] = to_string(nf, th.sig);
    j["millis"] = timer.ms();
    emit(out, j);
  } else {
    out << to_string(nf, th.sig) << '\n';
  }
  return kExitYes;
}

int cmd_saturate(const RunConfig& cfg, std::ostream& out) {
  Theory th = load_theory(cfg);
  TermSet gamma = load_knowledge(cfg, th.sig);
  Timer timer;
  SaturatedSet sat = saturate(gamma, th, cfg.budget);
  if (cfg.json_output) {
    json j;
    json terms = json::array();
    for (const Term& t : sat.terms) terms.push_back(to_string(t, th.sig));
    j["terms"] = std::move(terms);
    j["count"] = sat.terms.size();
    j["complete"] = sat.complete;
    j["millis"] = timer.ms();
    emit(out, j);
  } else {
    for (const Term& t : sat.terms) out << to_string(t, th.sig) << '\n';
  }
  return kExitYes;
}

int cmd_match(const RunConfig& cfg, std::ostream& out) {
  Theory th = load_theory(cfg);
  TermSet given = load_knowledge(cfg, th.sig);
  Term goal = load_goal(cfg, th.sig);
  TermSet sat;
  for (const Term& t : given) sat.insert(normalize(t, th, cfg.budget));
  Term m = normalize(goal, th, cfg.budget);
  Timer timer;
  MatchStats stats;
  std::optional<MatchWitness> w = context_match(m, sat, th, &stats);
  if (cfg.json_output) {
    json j;
    j["matched"] = w.has_value();
    j["exact"] = stats.witness_exact;
    witness_json(j, w, th.sig);
    j["millis"] = timer.ms();
    emit(out, j);
  } else {
    out << (w ? "match" : "no match") << '\n';
    witness_text(out, w, th.sig);
  }
  return w ? kExitYes : kExitNo;
}

int cmd_decide(const RunConfig& cfg, std::ostream& out, bool elementary) {
  Theory th = load_theory(cfg);
  TermSet gamma = load_knowledge(cfg, th.sig);
  Term goal = load_goal(cfg, th.sig);
  Timer timer;
  Decision d = elementary ? decide_edp(gamma, goal, th, cfg.budget)
                          : decide_idp(gamma, goal, th, cfg.budget);
  if (cfg.json_output) {
    json j;
    j["deducible"] = d.deducible;
    j["sat_size"] = d.sat_size;
    witness_json(j, d.witness, th.sig);
    j["millis"] = timer.ms();
    emit(out, j);
  } else {
    out << (d.deducible ? "deducible" : "not deducible") << '\n';
    witness_text(out, d.witness, th.sig);
  }
  return d.deducible ? kExitYes : kExitNo;
}

int cmd_prove(const RunConfig& cfg, std::ostream& out) {
  Theory th = load_theory(cfg);
  Sequent s;
  s.hypotheses = load_knowledge(cfg, th.sig);
  s.goal = load_goal(cfg, th.sig);
  Timer timer;
  std::optional<ProofNode> proof = prove(s, th, 4096, cfg.budget);
  if (proof && !cfg.proof_out.empty()) {
    std::ofstream f(cfg.proof_out);
    if (!f) throw Error("cannot write proof file: " + cfg.proof_out);
    f << proof_to_json(*proof, th.sig) << '\n';
  }
  if (cfg.json_output) {
    json j;
    j["provable"] = proof.has_value();
    j["proof"] = proof ? json::parse(proof_to_json(*proof, th.sig))
                       : json(nullptr);
    j["millis"] = timer.ms();
    emit(out, j);
  } else {
    out << (proof ? "provable" : "not provable") << '\n';
    if (proof) proof_tree(out, *proof, th.sig, 0);
  }
  return proof ? kExitYes : kExitNo;
}

int cmd_verify(const RunConfig& cfg, std::ostream& out) {
  Theory th = load_theory(cfg);
  TermSet gamma = load_knowledge(cfg, th.sig);
  Timer timer;
  SaturatedSet sat = saturate(gamma, th, cfg.budget);
  VerifyReport report = verify_conditions(sat, th, cfg.samples, cfg.seed);
  std::string why;
  bool trace_ok = replay_trace(sat, th, &why);
  if (cfg.json_output) {
    json j;
    j["ok"] = report.ok() && trace_ok;
    j["sat_size"] = sat.terms.size();
    j["samples"] = report.samples_run;
    j["trace_ok"] = trace_ok;
    if (!trace_ok) j["trace_error"] = why;
    json v = json::array();
    for (const ConditionViolation& x : report.violations) {
      json e;
      e["condition"] = x.condition;
      e["detail"] = x.detail;
      e["witness"] = to_string(x.witness, th.sig);
      v.push_back(std::move(e));
    }
    j["violations"] = std::move(v);
    j["assumptions"] = report.assumptions;
    j["millis"] = timer.ms();
    emit(out, j);
  } else {
    for (const ConditionViolation& x : report.violations)
      out << "condition " << x.condition << " violated: " << x.detail << " ["
          << to_string(x.witness, th.sig) << "]\n";
    if (!trace_ok) out << "trace broken: " << why << '\n';
    if (report.ok() && trace_ok)
      out << "conditions hold: " << sat.terms.size() << " terms, "
          << report.samples_run << " sampled contexts, trace replayed\n";
  }
  return report.ok() && trace_ok ? kExitYes : kExitNo;
}

int cmd_slde(const RunConfig& cfg, std::ostream& out) {
  DiophantineSystem sys = read_slde_file(cfg.slde_path);
  Timer timer;
  std::optional<std::vector<BigInt>> sol = solve_z(sys);
  if (cfg.json_output) {
    json j;
    j["solvable"] = sol.has_value();
    json xs = json::array();
    if (sol)
      for (const BigInt& x : *sol) xs.push_back(x.str());
    j["solution"] = std::move(xs);
    j["millis"] = timer.ms();
    emit(out, j);
  } else {
    if (!sol) {
      out << "unsolvable\n";
    } else {
      out << "solvable:";
      for (const BigInt& x : *sol) out << ' ' << x;
      out << '\n';
    }
  }
  return sol ? kExitYes : kExitNo;
}

int cmd_fuzz(const RunConfig& cfg, std::ostream& out) {
  FuzzConfig fc;
  fc.preset = cfg.preset;
  fc.seed = cfg.seed;
  fc.cases = cfg.cases;
  fc.oracle_depth = cfg.oracle_depth;
  fc.budget = cfg.budget;
  fc.artifact_dir = cfg.artifact_dir;
  Timer timer;
  FuzzReport r = run_fuzz(fc);
  if (cfg.json_output) {
    json j;
    j["deduction"] = {{"cases", r.deduction_cases},
                      {"mismatches", r.deduction_mismatches},
                      {"refusals", r.deduction_refusals}};
    j["slde"] = {{"cases", r.slde_cases}, {"mismatches", r.slde_mismatches}};
    j["match"] = {{"cases", r.match_cases},
                  {"mismatches", r.match_mismatches}};
    j["artifacts"] = r.artifacts;
    j["ok"] = r.ok();
    j["millis"] = timer.ms();
    emit(out, j);
  } else {
    out << "deduction: " << r.deduction_cases << " cases, "
        << r.deduction_mismatches << " mismatches, " << r.deduction_refusals
        << " refusals\n";
    out << "slde: " << r.slde_cases << " cases, " << r.slde_mismatches
        << " mismatches\n";
    out << "match: " << r.match_cases << " cases, " << r.match_mismatches
        << " mismatches\n";
    for (const std::string& a : r.artifacts) out << "wrote " << a << '\n';
  }
  return r.ok() ? kExitYes : kExitNo;
}

int dispatch(const RunConfig& cfg, std::ostream& out) {
  if (cfg.subcommand == "normalize") return cmd_normalize(cfg, out);
  if (cfg.subcommand == "saturate") return cmd_saturate(cfg, out);
  if (cfg.subcommand == "match") return cmd_match(cfg, out);
  if (cfg.subcommand == "deduce") return cmd_decide(cfg, out, false);
  if (cfg.subcommand == "edp") return cmd_decide(cfg, out, true);
  if (cfg.subcommand == "prove") return cmd_prove(cfg, out);
  if (cfg.subcommand == "verify") return cmd_verify(cfg, out);
  if (cfg.subcommand == "slde") return cmd_slde(cfg, out);
  if (cfg.subcommand == "fuzz") return cmd_fuzz(cfg, out);
  throw Error("unknown subcommand: " + cfg.subcommand);
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out,
            std::ostream& err) {
  RunConfig cfg;
  CLI::App app{"deduction engine for AC-convergent theories"};
  app.require_subcommand(1);

  auto shared = [&](CLI::App* sub) {
    sub->add_option("--theory", cfg.theory_path,
                    "theory file (overrides --preset)");
    sub->add_option("--preset", cfg.preset,
                    "bundled theory: ag, pure-ac, ag+blind");
    sub->add_flag("--json", cfg.json_output, "emit a JSON report");
    sub->add_option("--budget", cfg.budget, "work budget before refusing");
    sub->callback([&cfg, sub] { cfg.subcommand = sub->get_name(); });
  };
  auto with_know = [&](CLI::App* sub) {
    sub->add_option("--know", cfg.know_path,
                    "knowledge file (name and know lines)");
  };
  auto with_goal = [&](CLI::App* sub) {
    sub->add_option("--goal", cfg.goal_text, "goal term")->required();
  };

  CLI::App* nrm = app.add_subcommand("normalize", "rewrite a term to normal form");
  shared(nrm), with_know(nrm), with_goal(nrm);
  CLI::App* sat = app.add_subcommand("saturate", "close a knowledge set");
  shared(sat), with_know(sat);
  CLI::App* mat = app.add_subcommand("match", "express a term over a given set");
  shared(mat), with_know(mat), with_goal(mat);
  CLI::App* ded = app.add_subcommand("deduce", "decide derivability of the goal");
  shared(ded), with_know(ded), with_goal(ded);
  CLI::App* edp = app.add_subcommand(
      "edp", "decide derivability with constructor material abstracted");
  shared(edp), with_know(edp), with_goal(edp);
  CLI::App* prv = app.add_subcommand("prove", "search a sequent proof");
  shared(prv), with_know(prv), with_goal(prv);
  prv->add_option("--proof-out", cfg.proof_out, "write the proof as JSON");
  CLI::App* ver = app.add_subcommand("verify", "check closure conditions");
  shared(ver), with_know(ver);
  ver->add_option("--samples", cfg.samples, "sampled contexts per condition");
  ver->add_option("--seed", cfg.seed, "sampling seed");
  CLI::App* sld = app.add_subcommand("slde", "solve a linear system file");
  sld->add_option("file", cfg.slde_path, "system file")->required();
  sld->add_flag("--json", cfg.json_output, "emit a JSON report");
  sld->callback([&cfg] { cfg.subcommand = "slde"; });
  CLI::App* fz = app.add_subcommand("fuzz", "cross-check against references");
  shared(fz);
  fz->add_option("--seed", cfg.seed, "generator seed");
  fz->add_option("--cases", cfg.cases, "cases per check");
  fz->add_option("--oracle-depth", cfg.oracle_depth,
                 "forward-search depth of the reference");
  fz->add_option("--artifacts", cfg.artifact_dir,
                 "directory for replayable counterexamples");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? kExitYes : kExitInputError;
  }

  try {
    return dispatch(cfg, out);
  } catch (const SaturationBudgetError& e) {
    err << "budget exceeded: " << e.what() << '\n';
    return kExitBudget;
  } catch (const StepBudgetExceeded& e) {
    err << "budget exceeded: " << e.what() << '\n';
    return kExitBudget;
  } catch (const SearchSpaceError& e) {
    err << "budget exceeded: " << e.what() << '\n';
    return kExitBudget;
  } catch (const ParseError& e) {
    err << e.what() << '\n';
    return kExitInputError;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitInputError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitInputError;
  }
}

}  // namespace acid
