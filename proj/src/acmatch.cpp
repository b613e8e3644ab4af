#include "acid/acmatch.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>

namespace acid {

long SumDecomposition::count(const Term& base) const {
  for (const auto& [b, c] : parts)
    if (b == base) return c;
  return 0;
}

SumDecomposition decompose_sum(const Term& t, int ac, const Signature& sig) {
  const Symbol& acs = sig.symbol(ac);
  if (acs.kind != SymbolKind::Ac)
    throw Error("decompose_sum needs an AC symbol");
  std::vector<Term> summands;
  if (t.is_app_of(ac))
    summands = t.args();
  else
    summands.push_back(t);

  std::map<Term, long> acc;
  for (const Term& s : summands) {
    if (acs.neutral >= 0 && s.is_app_of(acs.neutral)) continue;
    if (acs.inverse >= 0 && s.is_app_of(acs.inverse)) {
      const Term& core = s.args()[0];
      bool atomic_core = !core.is_app_of(acs.inverse) && !core.is_app_of(ac);
      if (atomic_core) {
        --acc[core];
        continue;
      }
    }
    ++acc[s];
  }
  SumDecomposition d;
  d.ac = ac;
  for (auto& [b, c] : acc)
    if (c != 0) d.parts.emplace_back(b, c);
  return d;
}

bool candidate_selectable(const SumDecomposition& target,
                          const SumDecomposition& cand) {
  for (const auto& [b, c] : cand.parts)
    if (target.count(b) == 0) return false;
  return true;
}

DiophantineSystem build_slde(const SumDecomposition& target,
                             const std::vector<SumDecomposition>& candidates) {
  std::vector<const SumDecomposition*> kept;
  for (const auto& c : candidates)
    if (candidate_selectable(target, c)) kept.push_back(&c);
  DiophantineSystem sys;
  sys.vars = kept.size();
  for (const auto& [base, count] : target.parts) {
    std::vector<long> row;
    row.reserve(kept.size());
    for (const auto* c : kept) row.push_back(c->count(base));
    sys.coefficients.push_back(std::move(row));
    sys.targets.push_back(count);
  }
  return sys;
}

std::optional<Term> do_acm_match(const Term& t_i, const Term& m, int ac,
                                 const Signature& sig) {
  SumDecomposition dt = decompose_sum(t_i, ac, sig);
  SumDecomposition dm = decompose_sum(m, ac, sig);
  for (const auto& [b, ct] : dt.parts) {
    long cm = dm.count(b);
    if (ct > 0 ? cm < ct : cm > ct) return std::nullopt;
  }
  const Symbol& acs = sig.symbol(ac);
  std::vector<Term> rest;
  for (const auto& [b, cm] : dm.parts) {
    long c = cm - dt.count(b);
    for (long k = 0; k < std::labs(c); ++k)
      rest.push_back(c > 0 ? b : Term::app(acs.inverse, {b}, sig));
  }
  if (rest.empty()) {
    if (acs.neutral < 0) return std::nullopt;  // nothing expresses emptiness
    return Term::app(acs.neutral, {}, sig);
  }
  return Term::app(ac, std::move(rest), sig);
}

namespace {

// The literal summand multiset of a sum node (or the term itself when it is
// not headed by the AC symbol), used for witness reconstruction that must be
// valid modulo AC alone.
std::map<Term, long> raw_parts(const Term& t, int ac) {
  std::map<Term, long> out;
  if (t.is_app_of(ac))
    for (const Term& a : t.args()) ++out[a];
  else
    ++out[t];
  return out;
}

// Drives one matching query. Sums are solved bottom-up; every solved subterm
// remembers the plan that rebuilds it, so a witness can be assembled after
// the marking pass.
class ContextMatcher {
 public:
  ContextMatcher(const TermSet& sat, const Theory& th, MatchStats& stats)
      : sat_(sat), th_(th), stats_(stats) {}

  std::optional<MatchWitness> run(const Term& m);

 private:
  enum class How {
    Leaf,       // member of the given set: becomes a hole
    Closed,     // public name or nullary equational symbol: kept verbatim
    Composite,  // equational symbol applied to expressible arguments
    Sum,        // AC node covered by a multiset of candidate summands
  };
  struct Plan {
    How how = How::Leaf;
    std::vector<Term> children;                // Composite arguments
    std::vector<std::pair<Term, long>> uses;   // Sum: candidate -> count
  };

  bool expressible(const Term& t);
  bool solve_sum(const Term& n);
  bool available(const Term& t) const {
    if (sat_.count(t)) return true;
    auto it = memo_.find(t);
    return it != memo_.end() && it->second.has_value();
  }

  using RawCount = std::map<Term, long>;
  static bool raw_fits(const RawCount& need, const RawCount& have);
  std::optional<std::vector<std::pair<Term, long>>> greedy_cover(
      const RawCount& target, const std::vector<Term>& cands, int ac) const;
  bool raw_matches(const RawCount& target,
                   const std::vector<std::pair<Term, long>>& uses,
                   int ac) const;

  struct Occurrence {
    Position pos;       // flattened child indices
    bool under_ac = false;
  };
  static std::optional<Occurrence> find_occurrence(const Term& host,
                                                   const Term& t);
  Term punch(const Term& host, const Position& pos, size_t i,
             const Term& plug) const;
  bool residue_clean(const Term& t) const;
  Term instantiate(const Term& t, std::vector<Term>& fillers);

  const TermSet& sat_;
  const Theory& th_;
  MatchStats& stats_;
  std::map<Term, std::optional<Plan>> memo_;
  TermSet solved_sums_;
  TermSet expanding_;  // guards witness assembly against inverse cycles
};

bool ContextMatcher::expressible(const Term& t) {
  if (auto it = memo_.find(t); it != memo_.end()) return it->second.has_value();
  std::optional<Plan> plan;
  if (sat_.count(t)) {
    plan = Plan{How::Leaf, {}, {}};
  } else if (t.is_name()) {
    if (th_.sig.name_public(t.id())) plan = Plan{How::Closed, {}, {}};
  } else if (t.is_app()) {
    const Symbol& s = th_.sig.symbol(t.id());
    if (s.kind == SymbolKind::Ac) {
      // Sums are only expressible once solved bottom-up; an unsolved sum
      // reaching this point is simply not available. Do not memoize: the
      // verdict belongs to solve_sum.
      return false;
    }
    if (s.kind != SymbolKind::Constructor) {
      if (t.arg_count() == 0) {
        plan = Plan{How::Closed, {}, {}};
      } else {
        bool ok = true;
        for (const Term& a : t.args()) ok = expressible(a) && ok;
        if (ok) plan = Plan{How::Composite, t.args(), {}};
      }
    }
  }
  bool res = plan.has_value();
  memo_[t] = std::move(plan);
  return res;
}

bool ContextMatcher::raw_fits(const RawCount& need, const RawCount& have) {
  for (const auto& [b, c] : need) {
    auto it = have.find(b);
    if (it == have.end() || it->second < c) return false;
  }
  return true;
}

// Peels candidates off the literal summand multiset, largest first. Any
// success is a valid reconstruction; failure just defers to the integer
// solver.
std::optional<std::vector<std::pair<Term, long>>> ContextMatcher::greedy_cover(
    const RawCount& target, const std::vector<Term>& cands, int ac) const {
  std::vector<Term> order = cands;
  std::sort(order.begin(), order.end(), [](const Term& a, const Term& b) {
    long sa = term_size(a), sb = term_size(b);
    return sa != sb ? sa > sb : a < b;
  });
  RawCount rest = target;
  std::vector<std::pair<Term, long>> uses;
  for (const Term& c : order) {
    RawCount need = raw_parts(c, ac);
    long fit = -1;
    for (const auto& [b, k] : need) {
      auto it = rest.find(b);
      long room = it == rest.end() ? 0 : it->second / k;
      fit = fit < 0 ? room : std::min(fit, room);
      if (fit == 0) break;
    }
    if (fit <= 0) continue;
    for (const auto& [b, k] : need) {
      auto it = rest.find(b);
      it->second -= k * fit;
      if (it->second == 0) rest.erase(it);
    }
    uses.emplace_back(c, fit);
  }
  if (!rest.empty()) return std::nullopt;
  return uses;
}

bool ContextMatcher::raw_matches(const RawCount& target,
                                 const std::vector<std::pair<Term, long>>& uses,
                                 int ac) const {
  RawCount acc;
  for (const auto& [u, c] : uses) {
    if (c < 0) return false;
    for (const auto& [b, k] : raw_parts(u, ac)) acc[b] += k * c;
  }
  return acc == target;
}

bool ContextMatcher::solve_sum(const Term& n) {
  if (auto it = memo_.find(n); it != memo_.end()) return it->second.has_value();
  if (sat_.count(n)) {
    memo_[n] = Plan{How::Leaf, {}, {}};
    return true;
  }
  const int ac = n.id();
  const Symbol& acs = th_.sig.symbol(ac);
  ++stats_.slde_count;

  // Establish which arguments are expressible before snapshotting the pool;
  // both they and previously solved terms may serve as summand candidates.
  for (const Term& arg : n.args()) expressible(arg);
  TermSet pool = sat_;
  for (const auto& [t, plan] : memo_)
    if (plan.has_value()) pool.insert(t);
  pool.erase(n);

  SumDecomposition target = decompose_sum(n, ac, th_.sig);
  std::vector<Term> kept;
  std::vector<SumDecomposition> kdec;
  for (const Term& c : pool) {
    SumDecomposition d = decompose_sum(c, ac, th_.sig);
    if (d.parts.empty()) continue;  // contributes nothing to any sum
    if (!candidate_selectable(target, d)) continue;
    kept.push_back(c);
    kdec.push_back(std::move(d));
  }

  RawCount raw_target = raw_parts(n, ac);
  auto finish = [&](std::vector<std::pair<Term, long>> uses, bool exact) {
    if (!exact) stats_.witness_exact = false;
    Plan p;
    p.how = How::Sum;
    p.uses = std::move(uses);
    memo_[n] = std::move(p);
    solved_sums_.insert(n);
    return true;
  };

  // Attempt an exact reconstruction first: it both decides and yields a
  // witness valid modulo AC alone.
  if (auto uses = greedy_cover(raw_target, kept, ac))
    return finish(std::move(*uses), true);

  if (target.parts.empty()) {
    // The sum cancels to nothing under the integer reading (possible only
    // for non-normalized input, e.g. a + i(a)).
    if (acs.neutral < 0) {
      memo_[n] = std::nullopt;
      return false;
    }
    return finish({}, false);
  }

  DiophantineSystem sys = build_slde(target, kdec);
  std::vector<long> beta;
  if (acs.inverse >= 0) {
    auto z = solve_z(sys);
    if (!z) {
      memo_[n] = std::nullopt;
      return false;
    }
    beta.reserve(z->size());
    for (const BigInt& v : *z) beta.push_back(v.convert_to<long>());
  } else {
    long bound = 0;
    for (const auto& [b, c] : target.parts) bound = std::max(bound, c);
    auto nat = solve_n_bounded(sys, bound);
    if (!nat) {
      memo_[n] = std::nullopt;
      return false;
    }
    beta = *nat;
  }

  std::vector<std::pair<Term, long>> uses;
  for (size_t i = 0; i < kept.size(); ++i)
    if (beta[i] != 0) uses.emplace_back(kept[i], beta[i]);

  if (raw_matches(raw_target, uses, ac)) return finish(std::move(uses), true);

  // Swap negatively used candidates for their available inverses, which may
  // turn the solution into a literal summand cover.
  if (acs.inverse >= 0) {
    bool swappable = true;
    std::vector<std::pair<Term, long>> swapped;
    for (const auto& [u, c] : uses) {
      if (c > 0) {
        swapped.emplace_back(u, c);
        continue;
      }
      Term v = normalize(Term::app(acs.inverse, {u}, th_.sig), th_);
      if (!available(v)) {
        swappable = false;
        break;
      }
      swapped.emplace_back(v, -c);
    }
    if (swappable && raw_matches(raw_target, swapped, ac))
      return finish(std::move(swapped), true);
  }

  // Last exact resort: a small bounded search over the literal summands.
  {
    std::vector<Term> rkept;
    std::vector<RawCount> rneed;
    for (const Term& c : kept) {
      RawCount need = raw_parts(c, ac);
      if (raw_fits(need, raw_target)) {
        rkept.push_back(c);
        rneed.push_back(std::move(need));
      }
    }
    long bound = 0;
    for (const auto& [b, c] : raw_target) bound = std::max(bound, c);
    double work = std::pow(static_cast<double>(bound) + 1.0,
                           static_cast<double>(rkept.size()));
    if (!rkept.empty() && work <= 2e6) {
      DiophantineSystem rsys;
      rsys.vars = rkept.size();
      for (const auto& [b, c] : raw_target) {
        std::vector<long> row;
        for (const auto& need : rneed) {
          auto it = need.find(b);
          row.push_back(it == need.end() ? 0 : it->second);
        }
        rsys.coefficients.push_back(std::move(row));
        rsys.targets.push_back(c);
      }
      if (auto nat = solve_n_bounded(rsys, bound)) {
        std::vector<std::pair<Term, long>> exact_uses;
        for (size_t i = 0; i < rkept.size(); ++i)
          if ((*nat)[i] != 0) exact_uses.emplace_back(rkept[i], (*nat)[i]);
        return finish(std::move(exact_uses), true);
      }
    }
  }

  // Keep the integer solution: the decision stands, the witness is only
  // valid modulo rewriting.
  return finish(std::move(uses), false);
}

std::optional<ContextMatcher::Occurrence> ContextMatcher::find_occurrence(
    const Term& host, const Term& t) {
  if (host == t) return Occurrence{{}, false};
  if (!host.is_app()) return std::nullopt;
  bool ac_here = host.is_ac_app();
  for (int i = 0; i < host.arg_count(); ++i) {
    auto sub = find_occurrence(host.args()[static_cast<size_t>(i)], t);
    if (sub) {
      sub->pos.insert(sub->pos.begin(), i + 1);
      sub->under_ac = sub->under_ac || ac_here;
      return sub;
    }
  }
  return std::nullopt;
}

Term ContextMatcher::punch(const Term& host, const Position& pos, size_t i,
                           const Term& plug) const {
  if (i == pos.size()) return plug;
  std::vector<Term> args = host.args();
  size_t k = static_cast<size_t>(pos[i] - 1);
  args[k] = punch(args[k], pos, i + 1, plug);
  return Term::app(host.id(), std::move(args), th_.sig);
}

bool ContextMatcher::residue_clean(const Term& t) const {
  if (is_e_alien(t, th_.sig)) return false;
  for (const Term& a : t.args())
    if (!residue_clean(a)) return false;
  return true;
}

Term ContextMatcher::instantiate(const Term& t, std::vector<Term>& fillers) {
  if (sat_.count(t)) {
    fillers.push_back(t);
    return Term::hole(static_cast<int>(fillers.size()) - 1);
  }
  const Plan& plan = *memo_.at(t);
  switch (plan.how) {
    case How::Leaf: {
      fillers.push_back(t);
      return Term::hole(static_cast<int>(fillers.size()) - 1);
    }
    case How::Closed:
      return t;
    case How::Composite: {
      std::vector<Term> kids;
      kids.reserve(plan.children.size());
      for (const Term& c : plan.children) kids.push_back(instantiate(c, fillers));
      return Term::app(t.id(), std::move(kids), th_.sig);
    }
    case How::Sum: {
      const Symbol& acs = th_.sig.symbol(t.id());
      expanding_.insert(t);
      std::vector<Term> kids;
      for (const auto& [u, c] : plan.uses) {
        if (c > 0) {
          for (long k = 0; k < c; ++k) kids.push_back(instantiate(u, fillers));
        } else {
          // Negated use: expand the normalized inverse when that does not
          // loop back into a sum currently being expanded.
          Term v = normalize(Term::app(acs.inverse, {u}, th_.sig), th_);
          bool usable = available(v) && !expanding_.count(v);
          for (long k = 0; k < -c; ++k) {
            if (usable)
              kids.push_back(instantiate(v, fillers));
            else
              kids.push_back(
                  Term::app(acs.inverse, {instantiate(u, fillers)}, th_.sig));
          }
        }
      }
      expanding_.erase(t);
      if (kids.empty()) return Term::app(acs.neutral, {}, th_.sig);
      return Term::app(t.id(), std::move(kids), th_.sig);
    }
  }
  throw Error("unreachable expansion state");
}

std::optional<MatchWitness> ContextMatcher::run(const Term& m) {
  // Solve every sum node, innermost first, so each system may draw on the
  // results below it.
  std::vector<std::pair<int, Term>> sums;
  auto collect = [&](auto&& self, const Term& t, int depth) -> void {
    if (t.is_var() || t.is_hole())
      throw Error("context matching needs a ground goal");
    if (t.is_ac_app()) sums.emplace_back(depth, t);
    for (const Term& a : t.args()) self(self, a, depth + 1);
  };
  collect(collect, m, 0);
  std::sort(sums.begin(), sums.end(),
            [](const std::pair<int, Term>& a, const std::pair<int, Term>& b) {
              return a.first != b.first ? a.first > b.first
                                        : a.second < b.second;
            });
  for (const auto& [depth, node] : sums) solve_sum(node);

  // Rank everything deletable by size, largest first: a containing term is
  // always deleted before the pieces inside it.
  TermSet deletable = sat_;
  deletable.insert(solved_sums_.begin(), solved_sums_.end());
  std::vector<Term> ranked(deletable.begin(), deletable.end());
  std::sort(ranked.begin(), ranked.end(), [](const Term& a, const Term& b) {
    long sa = term_size(a), sb = term_size(b);
    return sa != sb ? sa > sb : a < b;
  });

  // Greedy marking: delete every visible occurrence. An occurrence that is
  // still visible under an AC node means the enclosing sum was not solved,
  // so the whole goal is out of reach.
  Term cur = m;
  std::vector<Term> deleted;
  for (const Term& t : ranked) {
    while (auto occ = find_occurrence(cur, t)) {
      if (occ->under_ac) return std::nullopt;
      cur = punch(cur, occ->pos, 0, Term::hole(static_cast<int>(deleted.size())));
      deleted.push_back(t);
      ++stats_.occurrences;
    }
  }

  if (!residue_clean(cur)) return std::nullopt;

  // Splice the expansion of each deleted subterm back into the residue,
  // renumbering holes left to right.
  std::vector<Term> fillers;
  auto splice = [&](auto&& self, const Term& t) -> Term {
    if (t.is_hole()) return instantiate(deleted[static_cast<size_t>(t.id())], fillers);
    if (!t.is_app()) return t;
    std::vector<Term> kids;
    kids.reserve(t.args().size());
    for (const Term& a : t.args()) kids.push_back(self(self, a));
    return Term::app(t.id(), std::move(kids), th_.sig);
  };
  Term skeleton = splice(splice, cur);
  MatchWitness w;
  w.context = Context::from_skeleton(std::move(skeleton));
  w.fillers = std::move(fillers);
  return w;
}

}  // namespace

std::optional<MatchWitness> context_match(const Term& m, const TermSet& sat,
                                          const Theory& th,
                                          MatchStats* stats) {
  MatchStats local;
  ContextMatcher matcher(sat, th, stats ? *stats : local);
  return matcher.run(m);
}

namespace {

void hole_order(const Term& t, std::vector<int>& order) {
  if (t.is_hole()) {
    order.push_back(t.id());
    return;
  }
  for (const Term& a : t.args()) hole_order(a, order);
}

Term relabel_holes(const Term& t, const std::map<int, int>& to,
                   const Signature& sig) {
  if (t.is_hole()) return Term::hole(to.at(t.id()));
  if (!t.is_app()) return t;
  std::vector<Term> args;
  args.reserve(t.args().size());
  for (const Term& a : t.args()) args.push_back(relabel_holes(a, to, sig));
  return Term::app(t.id(), std::move(args), sig);
}

}  // namespace

MatchWitness renumber_holes(const MatchWitness& w, const Signature& sig) {
  std::vector<int> order;
  hole_order(w.context.skeleton, order);
  std::map<int, int> to;
  for (int old : order) to.emplace(old, static_cast<int>(to.size()));
  MatchWitness out;
  out.context =
      Context::from_skeleton(relabel_holes(w.context.skeleton, to, sig));
  out.fillers.resize(w.fillers.size());
  for (const auto& [from, into] : to)
    out.fillers[static_cast<size_t>(into)] =
        w.fillers[static_cast<size_t>(from)];
  return out;
}

}  // namespace acid
