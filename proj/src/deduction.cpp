#include "acid/deduction.hpp"

#include <map>
#include <memory>
#include <mutex>
#include <sstream>

#include "acid/parse.hpp"

namespace acid {

namespace {

void require_ground_goal(const Term& t) {
  if (t.is_var() || t.is_hole()) throw Error("deduction needs a ground goal");
  for (const Term& a : t.args()) require_ground_goal(a);
}

// Shared saturation cache. Entries are immutable once inserted, so readers
// may use the returned set concurrently; the map itself is mutex-guarded.
struct SatCache {
  std::mutex mu;
  std::map<std::string, std::shared_ptr<const SaturatedSet>> entries;
};

SatCache& cache() {
  static SatCache c;
  return c;
}

std::string cache_key(const TermSet& gamma, const Theory& th) {
  std::ostringstream os;
  os << th.name << '#' << th.rules.size() << '#' << th.c_e << '#'
     << th.sig.symbol_count() << '#' << th.sig.name_count();
  // public names join every saturation, so they are part of the key even
  // when they do not occur in the knowledge
  for (int n = 0; n < th.sig.name_count(); ++n)
    if (th.sig.name_public(n)) os << '!' << th.sig.name_str(n);
  for (const Term& g : gamma) os << '|' << to_string(g, th.sig);
  return os.str();
}

std::shared_ptr<const SaturatedSet> saturate_cached(const TermSet& gamma,
                                                    const Theory& th,
                                                    long budget) {
  std::string key = cache_key(gamma, th);
  {
    std::lock_guard<std::mutex> lock(cache().mu);
    auto it = cache().entries.find(key);
    if (it != cache().entries.end()) return it->second;
  }
  auto sat = std::make_shared<const SaturatedSet>(saturate(gamma, th, budget));
  std::lock_guard<std::mutex> lock(cache().mu);
  return cache().entries.emplace(key, std::move(sat)).first->second;
}

// Replaces every maximal constructor-headed subterm by a fresh private
// constant, consistently across all inputs of one query.
struct Abstraction {
  Theory th;                      // clone of the base theory plus constants
  std::map<Term, Term> to_const;  // constructor subterm -> constant
  std::map<int, Term> from_name;  // constant's name id -> original subterm

  explicit Abstraction(const Theory& base) : th(base) {}

  Term freeze(const Term& t) {
    if (t.is_app() &&
        th.sig.symbol(t.id()).kind == SymbolKind::Constructor) {
      auto it = to_const.find(t);
      if (it != to_const.end()) return it->second;
      // the apostrophe keeps these clear of any parseable identifier
      int id = th.sig.add_name("atom'" + std::to_string(to_const.size()),
                               false);
      Term c = Term::name(id);
      to_const.emplace(t, c);
      from_name.emplace(id, t);
      return c;
    }
    if (!t.is_app()) return t;
    std::vector<Term> args;
    args.reserve(t.args().size());
    for (const Term& a : t.args()) args.push_back(freeze(a));
    return Term::app(t.id(), std::move(args), th.sig);
  }

  Term thaw(const Term& t, const Signature& orig) const {
    if (t.is_name()) {
      auto it = from_name.find(t.id());
      return it != from_name.end() ? it->second : t;
    }
    if (!t.is_app()) return t;
    std::vector<Term> args;
    args.reserve(t.args().size());
    for (const Term& a : t.args()) args.push_back(thaw(a, orig));
    return Term::app(t.id(), std::move(args), orig);
  }
};

}  // namespace

Decision decide_idp(const TermSet& knowledge, const Term& goal,
                    const Theory& th, long budget) {
  require_ground_goal(goal);
  Decision d;
  TermSet gamma;
  for (const Term& g : knowledge) {
    Term n = normalize(g, th);
    d.inputs_normalized |= (n != g);
    gamma.insert(n);
  }
  Term m = normalize(goal, th);
  d.inputs_normalized |= (m != goal);
  std::shared_ptr<const SaturatedSet> sat = saturate_cached(gamma, th, budget);
  d.sat_size = sat->terms.size();
  d.witness = context_match(m, sat->terms, th, &d.stats);
  d.deducible = d.witness.has_value();
  return d;
}

Decision decide_edp(const TermSet& knowledge, const Term& goal,
                    const Theory& th, long budget) {
  require_ground_goal(goal);
  Abstraction abs(th);
  TermSet frozen_knowledge;
  bool changed = false;
  for (const Term& g : knowledge) {
    Term n = normalize(g, th);
    changed |= (n != g);
    frozen_knowledge.insert(abs.freeze(n));
  }
  Term m = normalize(goal, th);
  changed |= (m != goal);
  Term frozen_goal = abs.freeze(m);
  Decision d = decide_idp(frozen_knowledge, frozen_goal, abs.th, budget);
  d.inputs_normalized = changed;
  if (d.witness) {
    MatchWitness thawed;
    thawed.context =
        Context::from_skeleton(abs.thaw(d.witness->context.skeleton, th.sig));
    for (const Term& f : d.witness->fillers)
      thawed.fillers.push_back(abs.thaw(f, th.sig));
    d.witness = std::move(thawed);
  }
  return d;
}

bool validate_edp_witness(const TermSet& knowledge, const Term& goal,
                          const MatchWitness& w, const Theory& th,
                          long budget) {
  require_ground_goal(goal);
  // the context must stay inside the equational layer
  auto e_context = [&](const Term& t, auto&& self) -> bool {
    if (t.is_hole()) return true;
    if (t.is_name()) return th.sig.name_public(t.id());
    if (!t.is_app() || !th.sig.in_sigma_e(t.id())) return false;
    for (const Term& a : t.args())
      if (!self(a, self)) return false;
    return true;
  };
  if (!e_context(w.context.skeleton, e_context)) return false;
  if (w.fillers.size() != static_cast<size_t>(w.context.holes)) return false;

  Abstraction abs(th);
  TermSet frozen;
  for (const Term& g : knowledge) frozen.insert(abs.freeze(normalize(g, th)));
  std::shared_ptr<const SaturatedSet> sat =
      saturate_cached(frozen, abs.th, budget);
  TermSet closure;
  for (const Term& t : sat->terms) closure.insert(abs.thaw(t, th.sig));
  for (const Term& f : w.fillers)
    if (!closure.count(f)) return false;
  try {
    Term built = apply_context(w.context, w.fillers, th.sig);
    return normalize(built, th) == normalize(goal, th);
  } catch (const Error&) {
    return false;
  }
}

bool oracle_derive(const TermSet& knowledge, const Term& goal,
                   const Theory& th, int depth) {
  Term m = normalize(goal, th);
  TermSet derived;
  for (const Term& g : knowledge) derived.insert(normalize(g, th));
  TermSet gamma = derived;
  for (int n = 0; n < th.sig.name_count(); ++n)
    if (th.sig.name_public(n)) derived.insert(Term::name(n));
  for (int s = 0; s < th.sig.symbol_count(); ++s) {
    const Symbol& sym = th.sig.symbol(s);
    if (sym.kind != SymbolKind::Constructor && sym.arity == 0)
      derived.insert(Term::app(s, {}, th.sig));
  }
  // candidate pool: subterms of the inputs, their inverses, the saturated set
  TermSet pool = derived;
  pool.insert(m);
  for (const Term& u : subterms(m)) pool.insert(u);
  for (const Term& g : gamma)
    for (const Term& u : subterms(g)) pool.insert(u);
  for (int s : th.sig.ac_symbols()) {
    int inv = th.sig.symbol(s).inverse;
    if (inv < 0) continue;
    std::vector<Term> snap(pool.begin(), pool.end());
    for (const Term& u : snap)
      pool.insert(normalize(Term::app(inv, {u}, th.sig), th));
  }
  try {
    SaturatedSet sat = saturate(gamma, th);
    pool.insert(sat.terms.begin(), sat.terms.end());
  } catch (const SaturationBudgetError& e) {
    pool.insert(e.partial.terms.begin(), e.partial.terms.end());
  }

  if (derived.count(m)) return true;
  for (int level = 0; level < depth; ++level) {
    TermSet next = derived;
    std::vector<Term> snap(derived.begin(), derived.end());
    for (int s = 0; s < th.sig.symbol_count(); ++s) {
      const Symbol& sym = th.sig.symbol(s);
      if (sym.kind == SymbolKind::Constructor || sym.arity == 0) continue;
      if (sym.kind == SymbolKind::Ac) {
        for (size_t i = 0; i < snap.size(); ++i)
          for (size_t j = i; j < snap.size(); ++j) {
            Term t = normalize(Term::app(s, {snap[i], snap[j]}, th.sig), th);
            if (pool.count(t)) next.insert(t);
          }
      } else {
        std::vector<size_t> idx(sym.arity, 0);
        while (!snap.empty()) {
          std::vector<Term> args;
          args.reserve(sym.arity);
          for (size_t i : idx) args.push_back(snap[i]);
          Term t = normalize(Term::app(s, std::move(args), th.sig), th);
          if (pool.count(t)) next.insert(t);
          size_t k = idx.size();
          bool done = true;
          while (k > 0) {
            --k;
            if (idx[k] + 1 < snap.size()) {
              ++idx[k];
              for (size_t j = k + 1; j < idx.size(); ++j) idx[j] = 0;
              done = false;
              break;
            }
          }
          if (done) break;
        }
      }
    }
    if (next.count(m)) return true;
    if (next.size() == derived.size()) break;
    derived.swap(next);
  }
  return derived.count(m);
}

}  // namespace acid
