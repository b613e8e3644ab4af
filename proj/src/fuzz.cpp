#include "acid/fuzz.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <set>
#include <sstream>

#include "acid/parse.hpp"
#include "acid/presets.hpp"
#include "acid/slde.hpp"

namespace acid {
namespace {

struct Rng {
  std::mt19937_64 eng;
  explicit Rng(uint64_t seed) : eng(seed) {}

  int uniform(int lo, int hi) {  // inclusive bounds
    return std::uniform_int_distribution<int>(lo, hi)(eng);
  }
  bool chance(double p) {
    return std::uniform_real_distribution<double>(0, 1)(eng) < p;
  }
  template <typename T>
  const T& pick(const std::vector<T>& xs) {
    return xs[static_cast<size_t>(uniform(0, static_cast<int>(xs.size()) - 1))];
  }
};

// Names every random query draws from. Three private atoms keep collisions
// (and with them cancellations) frequent; the public name exercises the
// always-derivable case.
constexpr const char* kPrivateNames[] = {"a", "b", "c"};
constexpr const char* kPublicName = "p";

// Random ground terms over a preset theory: atoms, AC sums, inverses when the
// theory has one, and occasional constructor applications when allowed.
struct TermGen {
  const Theory& th;
  std::vector<Term> atoms;
  int plus = -1, inv = -1;
  std::vector<int> ctors;

  explicit TermGen(Theory& theory) : th(theory) {
    for (const char* n : kPrivateNames) {
      int id = theory.sig.name_id(n);
      if (id < 0) id = theory.sig.add_name(n, /*is_public=*/false);
      atoms.push_back(Term::name(id));
    }
    int pid = theory.sig.name_id(kPublicName);
    if (pid < 0) pid = theory.sig.add_name(kPublicName, /*is_public=*/true);
    atoms.push_back(Term::name(pid));
    for (int s = 0; s < th.sig.symbol_count(); ++s) {
      const Symbol& sym = th.sig.symbol(s);
      if (sym.kind == SymbolKind::Ac && plus < 0) {
        plus = s;
        inv = sym.inverse;
      }
      if (sym.kind == SymbolKind::Constructor && sym.arity > 0)
        ctors.push_back(s);
    }
  }

  // random term with binary-reading size <= budget (>= 1)
  Term gen(Rng& rng, int budget, bool allow_ctor) {
    if (budget <= 1) return rng.pick(atoms);
    int shape = rng.uniform(0, 5);
    if (shape == 0) return rng.pick(atoms);
    if (shape == 1 && inv >= 0)
      return Term::app(inv, {gen(rng, budget - 1, allow_ctor)}, th.sig);
    if (shape == 2 && allow_ctor && !ctors.empty()) {
      int c = rng.pick(ctors);
      const Symbol& sym = th.sig.symbol(c);
      int each = std::max(1, (budget - 1) / sym.arity);
      std::vector<Term> args;
      args.reserve(static_cast<size_t>(sym.arity));
      for (int i = 0; i < sym.arity; ++i)
        args.push_back(gen(rng, each, allow_ctor));
      return Term::app(c, std::move(args), th.sig);
    }
    int left = rng.uniform(1, std::max(1, budget - 2));
    Term a = gen(rng, left, allow_ctor);
    Term b = gen(rng, budget - 1 - left, allow_ctor);
    return Term::app(plus, {std::move(a), std::move(b)}, th.sig);
  }
};

// Literal expressibility modulo AC alone, by exhaustive enumeration: m is a
// set member, a public name, an equational application of expressible pieces,
// or (at an AC node) splittable by some partition of its summand multiset
// into expressible singletons and whole blocks drawn from the set.
bool expressible_by_partitions(const Term& m, const TermSet& sat,
                               const Theory& th) {
  if (sat.count(m)) return true;
  if (m.is_name()) return th.sig.name_public(m.id());
  if (!m.is_app() || !th.sig.in_sigma_e(m.id())) return false;
  if (!m.is_ac_app()) {
    for (const Term& a : m.args())
      if (!expressible_by_partitions(a, sat, th)) return false;
    return true;
  }
  const std::vector<Term>& args = m.args();
  const size_t k = args.size();
  std::vector<int> block(k, 0);
  auto ok_partition = [&]() {
    std::map<int, std::vector<Term>> groups;
    for (size_t j = 0; j < k; ++j) groups[block[j]].push_back(args[j]);
    for (auto& [b, elems] : groups) {
      if (elems.size() == 1 && expressible_by_partitions(elems[0], sat, th))
        continue;
      if (!sat.count(Term::app(m.id(), elems, th.sig))) return false;
    }
    return true;
  };
  // restricted-growth enumeration of all set partitions of the k summands
  auto rec = [&](auto&& self, size_t i, int used) -> bool {
    if (i == k) return ok_partition();
    for (int b = 0; b <= used; ++b) {
      block[i] = b;
      if (self(self, i + 1, std::max(used, b + 1))) return true;
    }
    return false;
  };
  return rec(rec, 1, 1);  // summand 0 always sits in block 0
}

// Exhaustive integer-solution search over the box [lo, hi]^vars.
std::optional<std::vector<long>> box_solve(const DiophantineSystem& sys,
                                           long lo, long hi) {
  std::vector<long> x(sys.vars, lo);
  while (true) {
    bool ok = true;
    for (size_t j = 0; j < sys.rows() && ok; ++j) {
      long acc = 0;
      for (size_t i = 0; i < sys.vars; ++i)
        acc += sys.coefficients[j][i] * x[i];
      ok = acc == sys.targets[j];
    }
    if (ok) return x;
    size_t i = 0;
    while (i < sys.vars && x[i] == hi) x[i++] = lo;
    if (i == sys.vars) return std::nullopt;
    ++x[i];
  }
}

// ---- replay files ---------------------------------------------------------

std::string artifact_path(const FuzzConfig& cfg, const char* kind, int index,
                          const char* ext) {
  std::ostringstream os;
  os << "fuzz-" << cfg.seed << "-" << kind << "-" << index << ext;
  return (std::filesystem::path(cfg.artifact_dir) / os.str()).string();
}

void collect_names(const Term& t, std::set<int>& out) {
  if (t.is_name()) out.insert(t.id());
  for (const Term& a : t.args()) collect_names(a, out);
}

// Knowledge-file body: name declarations for everything the terms mention,
// then one know line per term. Loads back with parse_knowledge_file.
void write_knowledge_lines(std::ostream& os, const TermSet& knowledge,
                           const Term& goal, const Signature& sig) {
  std::set<int> names;
  for (const Term& g : knowledge) collect_names(g, names);
  collect_names(goal, names);
  for (int n : names)
    os << "name " << sig.name_str(n) << ' '
       << (sig.name_public(n) ? "public" : "private") << '\n';
  for (const Term& g : knowledge) os << "know " << to_string(g, sig) << '\n';
}

void record(FuzzReport& report, const FuzzConfig& cfg, const char* kind,
            int index, const char* ext, const std::string& body) {
  if (cfg.artifact_dir.empty()) return;
  std::filesystem::create_directories(cfg.artifact_dir);
  std::string path = artifact_path(cfg, kind, index, ext);
  std::ofstream out(path);
  out << body;
  report.artifacts.push_back(std::move(path));
}

}  // namespace

std::vector<BatchQuery> random_queries(const std::string& preset, int count,
                                       uint64_t seed, Theory& th) {
  th = preset_theory(preset);
  TermGen gen(th);
  Rng rng(seed);
  bool has_ctors = !gen.ctors.empty();
  std::vector<BatchQuery> out;
  out.reserve(static_cast<size_t>(std::max(count, 0)));
  for (int i = 0; i < count; ++i) {
    BatchQuery q;
    int k = rng.uniform(1, 3);
    for (int j = 0; j < k; ++j)
      q.knowledge.insert(gen.gen(rng, rng.uniform(1, 5),
                                 has_ctors && rng.chance(0.3)));
    q.goal = gen.gen(rng, rng.uniform(1, 5), has_ctors && rng.chance(0.3));
    out.push_back(std::move(q));
  }
  return out;
}

FuzzReport run_fuzz(const FuzzConfig& cfg) {
  FuzzReport report;
  Theory th;
  std::vector<BatchQuery> queries =
      random_queries(cfg.preset, cfg.cases, cfg.seed, th);

  // Check 1: the decision procedure against bounded forward search. A case
  // where either side runs out of budget is a refusal, not a verdict.
  for (size_t i = 0; i < queries.size(); ++i) {
    const BatchQuery& q = queries[i];
    ++report.deduction_cases;
    bool engine = false, reference = false;
    try {
      engine = decide_idp(q.knowledge, q.goal, th, cfg.budget).deducible;
      reference = oracle_derive(q.knowledge, q.goal, th, cfg.oracle_depth);
    } catch (const Error&) {
      ++report.deduction_refusals;
      continue;
    }
    if (engine == reference) continue;
    ++report.deduction_mismatches;
    std::ostringstream os;
    os << "# engine " << (engine ? "derives" : "rejects") << ", reference "
       << (reference ? "derives" : "rejects") << '\n'
       << "# replay: acid deduce --preset " << cfg.preset
       << " --know <this file> --goal \"" << to_string(q.goal, th.sig)
       << "\"\n";
    write_knowledge_lines(os, q.knowledge, q.goal, th.sig);
    record(report, cfg, "ded", static_cast<int>(i), ".know", os.str());
  }

  // Check 2: the integer solver against box enumeration. Half the systems
  // are solvable by construction so positives stay frequent.
  Rng slde_rng(cfg.seed + 1);
  for (int i = 0; i < cfg.cases; ++i) {
    ++report.slde_cases;
    DiophantineSystem sys;
    sys.vars = static_cast<size_t>(slde_rng.uniform(1, 4));
    size_t rows = static_cast<size_t>(slde_rng.uniform(1, 3));
    sys.coefficients.assign(rows, std::vector<long>(sys.vars, 0));
    for (size_t j = 0; j < rows; ++j)
      for (size_t v = 0; v < sys.vars; ++v)
        sys.coefficients[j][v] = slde_rng.uniform(-3, 3);
    if (slde_rng.chance(0.5)) {
      std::vector<long> planted(sys.vars);
      for (size_t v = 0; v < sys.vars; ++v) planted[v] = slde_rng.uniform(-2, 2);
      for (size_t j = 0; j < rows; ++j) {
        long acc = 0;
        for (size_t v = 0; v < sys.vars; ++v)
          acc += sys.coefficients[j][v] * planted[v];
        sys.targets.push_back(acc);
      }
    } else {
      for (size_t j = 0; j < rows; ++j)
        sys.targets.push_back(slde_rng.uniform(-6, 6));
    }

    auto exact = solve_z(sys);
    auto boxed = box_solve(sys, -10, 10);
    bool bad = false;
    std::string why;
    if (exact && !slde_satisfies(sys, *exact)) {
      bad = true;
      why = "solver returned a vector that does not satisfy the system";
    } else if (!exact && boxed) {
      bad = true;
      why = "solver reported unsolvable, box search found a solution";
    }
    if (!bad) continue;
    ++report.slde_mismatches;
    std::ostringstream os;
    os << "# " << why << '\n' << "# replay: acid slde <this file>\n"
       << rows << ' ' << sys.vars << '\n';
    for (size_t j = 0; j < rows; ++j) {
      for (size_t v = 0; v < sys.vars; ++v) os << sys.coefficients[j][v] << ' ';
      os << sys.targets[j] << '\n';
    }
    record(report, cfg, "slde", i, ".slde", os.str());
  }

  // Check 3: context matching against partition enumeration. The enumerator
  // speaks literal AC expressibility, so the comparison is one-sided on
  // arbitrary sets: enumeration success must be matched, and any witness must
  // check out (exactly when flagged exact, modulo rewriting otherwise).
  Rng match_rng(cfg.seed + 2);
  TermGen gen(th);
  for (int i = 0; i < cfg.cases; ++i) {
    ++report.match_cases;
    TermSet sat;
    int k = match_rng.uniform(0, 4);
    bool skip = false;
    Term goal;
    try {
      for (int j = 0; j < k; ++j)
        sat.insert(
            normalize(gen.gen(match_rng, match_rng.uniform(1, 5), false), th));
      goal = normalize(gen.gen(match_rng, match_rng.uniform(1, 7), false), th);
    } catch (const Error&) {
      skip = true;
    }
    if (skip) continue;

    MatchStats stats;
    std::optional<MatchWitness> w;
    try {
      w = context_match(goal, sat, th, &stats);
    } catch (const Error&) {
      continue;
    }
    bool reference = expressible_by_partitions(goal, sat, th);
    std::string why;
    if (reference && !w) {
      why = "enumeration expresses the goal, matcher found nothing";
    } else if (w) {
      for (const Term& f : w->fillers)
        if (!sat.count(f)) why = "witness filler is not a set member";
      if (why.empty()) {
        Term applied = apply_context(w->context, w->fillers, th.sig);
        if (stats.witness_exact && !(applied == goal))
          why = "exact witness does not reproduce the goal";
        else if (stats.witness_exact && !reference)
          why = "matcher found an exact witness, enumeration disagrees";
        else if (!stats.witness_exact && !(normalize(applied, th) == goal))
          why = "witness does not normalize to the goal";
      }
    }
    if (why.empty()) continue;
    ++report.match_mismatches;
    std::ostringstream os;
    os << "# " << why << '\n'
       << "# replay: acid match --preset " << cfg.preset
       << " --know <this file> --goal \"" << to_string(goal, th.sig) << "\"\n";
    write_knowledge_lines(os, sat, goal, th.sig);
    record(report, cfg, "match", i, ".know", os.str());
  }

  return report;
}

}  // namespace acid
