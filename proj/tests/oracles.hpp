// Independent reference implementations used to cross-check the engine.
// Everything here favors obviousness over speed: permutation backtracking,
// exhaustive assignment enumeration, explicit binary trees.
#pragma once

#include <algorithm>
#include <functional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "acid/acmatch.hpp"
#include "acid/parse.hpp"
#include "acid/rewrite.hpp"
#include "acid/sequent.hpp"
#include "acid/slde.hpp"

namespace acid::testing {

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

// ---------------------------------------------------------------------------
// Plain binary trees: the unflattened reading of a term. AC nodes expand to
// left-nested binary applications.

struct TreeNode {
  std::string label;
  bool ac = false;
  std::vector<TreeNode> kids;
};

inline TreeNode to_binary_tree(const Term& t, const Signature& sig) {
  switch (t.kind()) {
    case Term::Kind::Name:
      return {sig.name_str(t.id()), false, {}};
    case Term::Kind::Var:
      return {"?" + sig.var_str(t.id()), false, {}};
    case Term::Kind::Hole:
      return {"_" + std::to_string(t.id()), false, {}};
    case Term::Kind::App: {
      const std::string& label = sig.symbol(t.id()).name;
      bool ac = t.is_ac_app();
      std::vector<TreeNode> kids;
      for (const Term& a : t.args()) kids.push_back(to_binary_tree(a, sig));
      if (!ac) return {label, false, std::move(kids)};
      TreeNode acc = std::move(kids[0]);
      for (size_t i = 1; i < kids.size(); ++i) {
        TreeNode next{label, true, {}};
        next.kids.push_back(std::move(acc));
        next.kids.push_back(std::move(kids[i]));
        acc = std::move(next);
      }
      return acc;
    }
  }
  return {};
}

inline long node_count(const TreeNode& n) {
  long c = 1;
  for (const TreeNode& k : n.kids) c += node_count(k);
  return c;
}

// Equality modulo AC by fringe collection + permutation backtracking.
inline void ac_fringe(const TreeNode& n, const std::string& label,
                      std::vector<const TreeNode*>& out) {
  if (n.ac && n.label == label) {
    for (const TreeNode& k : n.kids) ac_fringe(k, label, out);
  } else {
    out.push_back(&n);
  }
}

inline bool naive_ac_equal(const TreeNode& a, const TreeNode& b);

inline bool multiset_match(std::vector<const TreeNode*>& xs,
                           std::vector<const TreeNode*>& ys) {
  if (xs.size() != ys.size()) return false;
  if (xs.empty()) return true;
  const TreeNode* x = xs.back();
  xs.pop_back();
  for (size_t i = 0; i < ys.size(); ++i) {
    if (!naive_ac_equal(*x, *ys[i])) continue;
    std::swap(ys[i], ys.back());
    const TreeNode* y = ys.back();
    ys.pop_back();
    bool ok = multiset_match(xs, ys);
    ys.push_back(y);
    std::swap(ys[i], ys.back());
    if (ok) {
      xs.push_back(x);
      return true;
    }
  }
  xs.push_back(x);
  return false;
}

inline bool naive_ac_equal(const TreeNode& a, const TreeNode& b) {
  if (a.label != b.label || a.ac != b.ac) return false;
  if (a.ac) {
    std::vector<const TreeNode*> xs, ys;
    ac_fringe(a, a.label, xs);
    ac_fringe(b, b.label, ys);
    return multiset_match(xs, ys);
  }
  if (a.kids.size() != b.kids.size()) return false;
  for (size_t i = 0; i < a.kids.size(); ++i)
    if (!naive_ac_equal(a.kids[i], b.kids[i])) return false;
  return true;
}

// ---------------------------------------------------------------------------
// Exhaustive AC matching: every substitution mapping pattern onto subject,
// found by assigning each subject argument of an AC node to a pattern slot.

inline bool merge_subst(const Substitution& a, Substitution& into) {
  for (auto& [v, t] : a) {
    auto it = into.find(v);
    if (it != into.end()) {
      if (!(it->second == t)) return false;
    } else {
      into.emplace(v, t);
    }
  }
  return true;
}

inline std::vector<Substitution> oracle_match(const Term& pattern,
                                              const Term& subject,
                                              const Signature& sig) {
  std::vector<Substitution> out;
  if (pattern.is_var()) {
    out.push_back({{pattern.id(), subject}});
    return out;
  }
  if (pattern.is_name()) {
    if (pattern == subject) out.push_back({});
    return out;
  }
  if (!subject.is_app_of(pattern.id())) return out;
  if (!pattern.is_ac_app()) {
    std::vector<Substitution> acc{{}};
    for (int i = 0; i < pattern.arg_count(); ++i) {
      std::vector<Substitution> next;
      for (const Substitution& partial : acc)
        for (const Substitution& sigma :
             oracle_match(pattern.args()[static_cast<size_t>(i)],
                          subject.args()[static_cast<size_t>(i)], sig)) {
          Substitution merged = partial;
          if (merge_subst(sigma, merged)) next.push_back(std::move(merged));
        }
      acc = std::move(next);
    }
    return acc;
  }
  // AC node: enumerate every assignment of subject args to pattern slots
  const auto& pargs = pattern.args();
  const auto& sargs = subject.args();
  size_t k = pargs.size(), n = sargs.size();
  if (n < k) return out;
  std::vector<size_t> slot(n, 0);
  std::set<Substitution> dedup;
  while (true) {
    std::vector<std::vector<Term>> groups(k);
    for (size_t i = 0; i < n; ++i) groups[slot[i]].push_back(sargs[i]);
    bool shape_ok = true;
    for (size_t s = 0; s < k; ++s) {
      if (groups[s].empty() || (!pargs[s].is_var() && groups[s].size() != 1))
        shape_ok = false;
    }
    if (shape_ok) {
      std::vector<Substitution> acc{{}};
      for (size_t s = 0; s < k && !acc.empty(); ++s) {
        Term bound = groups[s].size() == 1
                         ? groups[s][0]
                         : Term::app(pattern.id(), groups[s], sig);
        std::vector<Substitution> next;
        for (const Substitution& partial : acc)
          for (const Substitution& sigma : oracle_match(pargs[s], bound, sig)) {
            Substitution merged = partial;
            if (merge_subst(sigma, merged)) next.push_back(std::move(merged));
          }
        acc = std::move(next);
      }
      for (Substitution& s : acc) dedup.insert(std::move(s));
    }
    // next assignment
    size_t i = 0;
    while (i < n && slot[i] + 1 == k) slot[i++] = 0;
    if (i == n) break;
    slot[i]++;
  }
  out.assign(dedup.begin(), dedup.end());
  return out;
}

// ---------------------------------------------------------------------------
// Head rewriting by brute force: try the whole term and every sub-multiset of
// a top-level AC sum against every rule.

inline void submultisets(const std::vector<Term>& args, size_t i,
                         std::vector<Term>& in, std::vector<Term>& rest,
                         const std::function<void(const std::vector<Term>&,
                                                  const std::vector<Term>&)>& f) {
  if (i == args.size()) {
    f(in, rest);
    return;
  }
  in.push_back(args[i]);
  submultisets(args, i + 1, in, rest, f);
  in.pop_back();
  rest.push_back(args[i]);
  submultisets(args, i + 1, in, rest, f);
  rest.pop_back();
}

inline TermSet oracle_head_rewrites(const Term& t, const Theory& th) {
  TermSet out;
  for (const RewriteRule& rule : th.rules) {
    for (const Substitution& sigma : oracle_match(rule.lhs, t, th.sig))
      out.insert(substitute(rule.rhs, sigma, th.sig));
    if (!t.is_ac_app()) continue;
    std::vector<Term> in, rest;
    submultisets(t.args(), 0, in, rest, [&](const std::vector<Term>& redex,
                                            const std::vector<Term>& residue) {
      if (redex.empty() || residue.empty()) return;
      Term sub_term = redex.size() == 1 ? redex[0]
                                        : Term::app(t.id(), redex, th.sig);
      for (const Substitution& sigma : oracle_match(rule.lhs, sub_term, th.sig)) {
        std::vector<Term> parts = residue;
        parts.push_back(substitute(rule.rhs, sigma, th.sig));
        out.insert(Term::app(t.id(), std::move(parts), th.sig));
      }
    });
  }
  return out;
}

// ---------------------------------------------------------------------------
// Random ground terms over the abelian-group signature.

struct AgTermGen {
  const Theory& th;
  std::vector<Term> atoms;  // names (and optionally the neutral)
  int plus, inv;

  AgTermGen(const Theory& theory, const std::vector<std::string>& names,
            Signature& sig)
      : th(theory) {
    for (const std::string& n : names) {
      int id = sig.name_id(n);
      if (id < 0) id = sig.add_name(n, /*is_public=*/false);
      atoms.push_back(Term::name(id));
    }
    plus = sig.symbol_id("+");
    inv = sig.symbol_id("i");
  }

  // random term with binary-reading size <= budget (>= 1)
  Term gen(Rng& rng, int budget) {
    if (budget <= 1) return rng.pick(atoms);
    int shape = rng.uniform(0, 3);
    if (shape == 0) return rng.pick(atoms);
    if (shape == 1 && inv >= 0)
      return Term::app(inv, {gen(rng, budget - 1)}, th.sig);
    int left = rng.uniform(1, budget - 2 < 1 ? 1 : budget - 2);
    Term a = gen(rng, left);
    Term b = gen(rng, budget - 1 - left);
    return Term::app(plus, {std::move(a), std::move(b)}, th.sig);
  }
};

// Prints t with AC arguments in random order and random bracketing; parsing
// the result must reproduce the canonical term.
inline std::string scrambled_render(const Term& t, const Signature& sig,
                                    Rng& rng) {
  switch (t.kind()) {
    case Term::Kind::Name:
      return sig.name_str(t.id());
    case Term::Kind::Var:
      return "?" + sig.var_str(t.id());
    case Term::Kind::Hole:
      return "_";
    case Term::Kind::App: {
      const Symbol& s = sig.symbol(t.id());
      if (t.arg_count() == 0) return s.name;
      if (t.is_ac_app()) {
        std::vector<std::string> parts;
        for (const Term& a : t.args()) {
          std::string r = scrambled_render(a, sig, rng);
          parts.push_back(a.is_app() && a.arg_count() > 0 && sig.symbol(a.id()).kind == SymbolKind::Ac
                              ? "(" + r + ")"
                              : r);
        }
        std::shuffle(parts.begin(), parts.end(), rng.eng);
        // random bracketing: fold a random adjacent pair until one remains
        while (parts.size() > 1) {
          size_t i = static_cast<size_t>(
              rng.uniform(0, static_cast<int>(parts.size()) - 2));
          std::string merged =
              "(" + parts[i] + " " + s.name + " " + parts[i + 1] + ")";
          parts[i] = std::move(merged);
          parts.erase(parts.begin() + static_cast<long>(i) + 1);
        }
        return parts[0];
      }
      std::string out = s.name + "(";
      for (int i = 0; i < t.arg_count(); ++i) {
        if (i) out += ", ";
        out += scrambled_render(t.args()[static_cast<size_t>(i)], sig, rng);
      }
      return out + ")";
    }
  }
  return "";
}

// ---------------------------------------------------------------------------
// Linear Diophantine reference: exhaustive search over a finite box.

inline std::optional<std::vector<long>> brute_box_solve(
    const DiophantineSystem& sys, long lo, long hi) {
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

// ---------------------------------------------------------------------------
// Exhaustive context expressibility: can m be written, modulo AC alone, as a
// term over the equational symbols and public names whose gaps are filled
// with members of the given set? AC nodes enumerate every partition of their
// summand multiset; each block is either one expressible summand or a whole
// block drawn from the set.

inline bool oracle_expressible(const Term& m, const TermSet& sat,
                               const Theory& th) {
  if (sat.count(m)) return true;
  if (m.is_name()) return th.sig.name_public(m.id());
  if (m.is_var() || m.is_hole()) return false;
  const Symbol& s = th.sig.symbol(m.id());
  if (s.kind == SymbolKind::Constructor) return false;
  if (!m.is_ac_app()) {
    for (const Term& a : m.args())
      if (!oracle_expressible(a, sat, th)) return false;
    return true;
  }
  const std::vector<Term>& args = m.args();
  const size_t k = args.size();
  std::vector<int> block(k, 0);
  auto ok_partition = [&]() {
    std::map<int, std::vector<Term>> groups;
    for (size_t j = 0; j < k; ++j) groups[block[j]].push_back(args[j]);
    for (auto& [b, elems] : groups) {
      if (elems.size() == 1 && oracle_expressible(elems[0], sat, th)) continue;
      if (!sat.count(Term::app(m.id(), elems, th.sig))) return false;
    }
    return true;
  };
  // Restricted-growth enumeration of all set partitions of the k summands.
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

// ---------------------------------------------------------------------------
// Depth-bounded exhaustive sequent proof enumeration: every rule instance at
// every step, no ordering heuristics and no pruning. The memo table caches
// the pure function of (hypotheses, goal, remaining depth) and cannot change
// its value, because the depth strictly decreases along every recursion.

inline std::string sequent_key(const TermSet& hyps, const Term& goal,
                               const Signature& sig) {
  std::string k;
  for (const Term& h : hyps) k += to_string(h, sig) + " , ";
  return k + "|- " + to_string(goal, sig);
}

inline bool enumerate_proofs(const TermSet& hyps, const Term& goal,
                             const Theory& th, int depth,
                             std::map<std::string, bool>& memo) {
  if (decide_edp(hyps, goal, th).deducible) return true;
  if (depth <= 0) return false;
  std::string key =
      sequent_key(hyps, goal, th.sig) + "#" + std::to_string(depth);
  if (auto it = memo.find(key); it != memo.end()) return it->second;

  ConstructorRoles roles = ConstructorRoles::resolve(th.sig);
  auto with = [&](std::vector<Term> adds) {
    TermSet out = hyps;
    for (Term& a : adds) out.insert(std::move(a));
    return out;
  };
  auto sub = [&](const TermSet& h, const Term& g) {
    return enumerate_proofs(h, g, th, depth - 1, memo);
  };

  bool ok = false;
  for (const Term& h : hyps) {
    if (ok) break;
    if (h.is_app_of(roles.pair))
      ok |= sub(with({h.args()[0], h.args()[1]}), goal);
    if (!ok && h.is_app_of(roles.sign) && roles.pub >= 0 &&
        hyps.count(Term::app(roles.pub, {h.args()[1]}, th.sig)))
      ok |= sub(with({h.args()[0]}), goal);
    if (!ok && h.is_app_of(roles.enc))
      ok |= sub(hyps, h.args()[1]) &&
            sub(with({h.args()[0], h.args()[1]}), goal);
    if (!ok && h.is_app_of(roles.blind))
      ok |= sub(hyps, h.args()[1]) &&
            sub(with({h.args()[0], h.args()[1]}), goal);
    if (!ok && h.is_app_of(roles.sign) &&
        h.args()[0].is_app_of(roles.blind)) {
      const Term& body = h.args()[0];
      Term unblinded =
          Term::app(roles.sign, {body.args()[0], h.args()[1]}, th.sig);
      ok |= sub(hyps, body.args()[1]) &&
            sub(with({unblinded, body.args()[1]}), goal);
    }
  }
  if (!ok) {
    TermSet cuts = e_factors(goal, th.sig);
    for (const Term& h : hyps) {
      TermSet ef = e_factors(h, th.sig);
      cuts.insert(ef.begin(), ef.end());
    }
    for (const Term& a : cuts)
      if (sub(hyps, a) && sub(with({a}), goal)) {
        ok = true;
        break;
      }
  }
  if (!ok && goal.is_app() &&
      (goal.id() == roles.pair || goal.id() == roles.enc ||
       goal.id() == roles.sign || goal.id() == roles.blind))
    ok = sub(hyps, goal.args()[0]) && sub(hyps, goal.args()[1]);

  memo[key] = ok;
  return ok;
}

inline bool enumerate_proofs(const TermSet& hyps, const Term& goal,
                             const Theory& th, int depth) {
  std::map<std::string, bool> memo;
  return enumerate_proofs(hyps, goal, th, depth, memo);
}

}  // namespace acid::testing
