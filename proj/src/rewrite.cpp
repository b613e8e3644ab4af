#include "acid/rewrite.hpp"

#include <algorithm>
#include <functional>
#include <set>

namespace acid {

void Theory::validate() const {
  for (const RewriteRule& r : rules) {
    if (!r.lhs.is_app())
      throw Error("theory " + name + ": rule lhs must be an application");
    std::set<int> lvars, rvars;
    std::function<void(const Term&, std::set<int>&)> vars =
        [&](const Term& t, std::set<int>& acc) {
          if (t.is_var()) acc.insert(t.id());
          if (t.is_hole()) throw Error("hole in rewrite rule");
          if (t.is_app() && !sig.in_sigma_e(t.id()))
            throw Error("theory " + name + ": rule uses constructor symbol " +
                        sig.symbol(t.id()).name);
          for (const Term& a : t.args()) vars(a, acc);
        };
    vars(r.lhs, lvars);
    vars(r.rhs, rvars);
    for (int v : rvars)
      if (!lvars.count(v))
        throw Error("theory " + name + ": rule rhs introduces variable ?" +
                    sig.var_str(v));
  }
}

long compute_c_e(const Theory& th) {
  long c = th.sig.max_eq_arity() + 1;
  for (const RewriteRule& r : th.rules) {
    c = std::max(c, term_size(r.lhs));
    c = std::max(c, term_size(r.rhs));
  }
  return c;
}

Term substitute(const Term& t, const Substitution& sub, const Signature& sig) {
  if (t.is_var()) {
    auto it = sub.find(t.id());
    if (it == sub.end()) throw Error("unbound variable in substitution");
    return it->second;
  }
  if (!t.is_app()) return t;
  std::vector<Term> args;
  args.reserve(t.args().size());
  for (const Term& a : t.args()) args.push_back(substitute(a, sub, sig));
  return Term::app(t.id(), std::move(args), sig);
}

namespace {

// multiset of AC arguments as sorted distinct terms with mutable counts
struct ArgBag {
  std::vector<Term> elems;
  std::vector<int> cnt;

  explicit ArgBag(const std::vector<Term>& args) {
    for (const Term& a : args) {
      if (!elems.empty() && elems.back() == a) {
        cnt.back()++;
      } else {
        elems.push_back(a);
        cnt.push_back(1);
      }
    }
  }
  std::vector<Term> expansion() const {
    std::vector<Term> out;
    for (size_t i = 0; i < elems.size(); ++i)
      for (int k = 0; k < cnt[i]; ++k) out.push_back(elems[i]);
    return out;
  }
};

// Backtracking matcher modulo AC, continuation-passing so nested AC nodes
// compose. Every way of matching invokes the continuation once, with the
// substitution extended in place.
struct Matcher {
  const Signature& sig;
  bool stop = false;

  void match(const Term& p, const Term& s, Substitution& sub,
             const std::function<void()>& k) {
    if (stop) return;
    switch (p.kind()) {
      case Term::Kind::Var: {
        auto it = sub.find(p.id());
        if (it != sub.end()) {
          if (it->second == s) k();
          return;
        }
        sub.emplace(p.id(), s);
        k();
        sub.erase(p.id());
        return;
      }
      case Term::Kind::Name:
        if (p == s) k();
        return;
      case Term::Kind::Hole:
        throw Error("hole in match pattern");
      case Term::Kind::App: {
        if (!s.is_app_of(p.id())) return;
        if (p.is_ac_app()) {
          ArgBag bag(s.args());
          match_ac(p.id(), p.args(), bag, sub, /*allow_rest=*/false,
                   [&](const std::vector<Term>&) { k(); });
          return;
        }
        match_seq(p.args(), s.args(), 0, sub, k);
        return;
      }
    }
  }

  void match_seq(const std::vector<Term>& ps, const std::vector<Term>& ss,
                 size_t i, Substitution& sub, const std::function<void()>& k) {
    if (stop) return;
    if (i == ps.size()) {
      k();
      return;
    }
    match(ps[i], ss[i], sub, [&] { match_seq(ps, ss, i + 1, sub, k); });
  }

  // Matches the argument list of an AC pattern node against bag. With
  // allow_rest the leftover subject arguments become the residue passed to k;
  // otherwise the match must consume the bag entirely.
  void match_ac(int ac_sym, const std::vector<Term>& pargs, ArgBag& bag,
                Substitution& sub, bool allow_rest,
                const std::function<void(const std::vector<Term>&)>& k) {
    std::vector<Term> nonvars;
    std::vector<std::pair<int, int>> vargroups;  // var id, multiplicity
    for (const Term& p : pargs) {
      if (p.is_var()) {
        auto it = std::find_if(vargroups.begin(), vargroups.end(),
                               [&](auto& g) { return g.first == p.id(); });
        if (it == vargroups.end())
          vargroups.emplace_back(p.id(), 1);
        else
          it->second++;
      } else {
        nonvars.push_back(p);
      }
    }
    match_nonvars(ac_sym, nonvars, 0, vargroups, bag, sub, allow_rest, k);
  }

 private:
  void match_nonvars(int ac_sym, const std::vector<Term>& nonvars, size_t i,
                     const std::vector<std::pair<int, int>>& vargroups,
                     ArgBag& bag, Substitution& sub, bool allow_rest,
                     const std::function<void(const std::vector<Term>&)>& k) {
    if (stop) return;
    if (i == nonvars.size()) {
      match_vars(ac_sym, vargroups, 0, bag, sub, allow_rest, k);
      return;
    }
    for (size_t j = 0; j < bag.elems.size(); ++j) {
      if (bag.cnt[j] == 0) continue;
      bag.cnt[j]--;
      match(nonvars[i], bag.elems[j], sub, [&] {
        match_nonvars(ac_sym, nonvars, i + 1, vargroups, bag, sub, allow_rest,
                      k);
      });
      bag.cnt[j]++;
      if (stop) return;
    }
  }

  // remove the expansion of a bound variable's value from the bag, m times
  bool consume_bound(int ac_sym, const Term& val, int m, ArgBag& bag,
                     std::vector<std::pair<size_t, int>>& taken) {
    std::vector<Term> expand;
    if (val.is_app_of(ac_sym))
      expand = val.args();
    else
      expand = {val};
    for (const Term& e : expand) {
      auto it = std::lower_bound(bag.elems.begin(), bag.elems.end(), e);
      if (it == bag.elems.end() || !(*it == e)) return false;
      size_t j = static_cast<size_t>(it - bag.elems.begin());
      if (bag.cnt[j] < m) return false;
      bag.cnt[j] -= m;
      taken.emplace_back(j, m);
    }
    return true;
  }

  void match_vars(int ac_sym, const std::vector<std::pair<int, int>>& groups,
                  size_t i, ArgBag& bag, Substitution& sub, bool allow_rest,
                  const std::function<void(const std::vector<Term>&)>& k) {
    if (stop) return;
    if (i == groups.size()) {
      std::vector<Term> rest = bag.expansion();
      if (allow_rest || rest.empty()) k(rest);
      return;
    }
    auto [v, m] = groups[i];
    auto it = sub.find(v);
    if (it != sub.end()) {
      std::vector<std::pair<size_t, int>> taken;
      if (consume_bound(ac_sym, it->second, m, bag, taken))
        match_vars(ac_sym, groups, i + 1, bag, sub, allow_rest, k);
      for (auto [j, c] : taken) bag.cnt[j] += c;
      return;
    }
    // the last unbound variable in an exact match must take everything left
    if (!allow_rest && i + 1 == groups.size() && m == 1) {
      std::vector<Term> rest = bag.expansion();
      if (rest.empty()) return;
      std::vector<int> saved = bag.cnt;
      std::fill(bag.cnt.begin(), bag.cnt.end(), 0);
      sub.emplace(v, Term::app(ac_sym, std::move(rest), sig));
      match_vars(ac_sym, groups, i + 1, bag, sub, allow_rest, k);
      sub.erase(v);
      bag.cnt = saved;
      return;
    }
    std::vector<int> choice(bag.elems.size(), 0);
    enum_choice(ac_sym, groups, i, v, m, 0, choice, bag, sub, allow_rest, k);
  }

  // enumerate nonempty sub-multisets whose m-fold copy fits in the bag
  void enum_choice(int ac_sym, const std::vector<std::pair<int, int>>& groups,
                   size_t i, int v, int m, size_t j, std::vector<int>& choice,
                   ArgBag& bag, Substitution& sub, bool allow_rest,
                   const std::function<void(const std::vector<Term>&)>& k) {
    if (stop) return;
    if (j == bag.elems.size()) {
      std::vector<Term> picked;
      for (size_t a = 0; a < choice.size(); ++a)
        for (int c = 0; c < choice[a]; ++c) picked.push_back(bag.elems[a]);
      if (picked.empty()) return;
      sub.emplace(v, Term::app(ac_sym, std::move(picked), sig));
      match_vars(ac_sym, groups, i + 1, bag, sub, allow_rest, k);
      sub.erase(v);
      return;
    }
    for (int c = 0; c * m <= bag.cnt[j]; ++c) {
      choice[j] = c;
      bag.cnt[j] -= c * m;
      enum_choice(ac_sym, groups, i, v, m, j + 1, choice, bag, sub, allow_rest,
                  k);
      bag.cnt[j] += c * m;
      if (stop) return;
    }
    choice[j] = 0;
  }
};

// emits every (substitution, residue) pair for a sum-headed lhs matched
// against a sub-multiset of the AC node's arguments; on_match returning true
// stops the enumeration
void for_each_submultiset_match(
    const RewriteRule& rule, const Term& subject, const Signature& sig,
    const std::function<bool(const Substitution&, const std::vector<Term>&)>&
        on_match) {
  Matcher m{sig};
  ArgBag bag(subject.args());
  Substitution sub;
  m.match_ac(subject.id(), rule.lhs.args(), bag, sub, /*allow_rest=*/true,
             [&](const std::vector<Term>& rest) {
               if (on_match(sub, rest)) m.stop = true;
             });
}

void for_each_whole_match(const RewriteRule& rule, const Term& subject,
                          const Signature& sig,
                          const std::function<bool(const Substitution&)>& on) {
  Matcher m{sig};
  Substitution sub;
  m.match(rule.lhs, subject, sub, [&] {
    if (on(sub)) m.stop = true;
  });
}

}  // namespace

std::vector<Substitution> match_modulo_ac(const Term& pattern,
                                          const Term& subject,
                                          const Signature& sig,
                                          size_t max_matches) {
  Matcher m{sig};
  std::set<Substitution> seen;
  std::vector<Substitution> out;
  Substitution sub;
  m.match(pattern, subject, sub, [&] {
    if (seen.insert(sub).second) {
      out.push_back(sub);
      if (out.size() >= max_matches) m.stop = true;
    }
  });
  return out;
}

std::optional<Term> rewrite_step(const Term& t, const Theory& th) {
  if (!t.is_app()) return std::nullopt;
  // innermost first: arguments left to right
  for (size_t i = 0; i < t.args().size(); ++i) {
    if (auto r = rewrite_step(t.args()[i], th)) {
      std::vector<Term> args = t.args();
      args[i] = std::move(*r);
      return Term::app(t.id(), std::move(args), th.sig);
    }
  }
  for (const RewriteRule& rule : th.rules) {
    std::optional<Term> result;
    if (t.is_ac_app() && rule.lhs.is_app_of(t.id())) {
      // a rule whose lhs is a sum may consume any sub-multiset of summands
      for_each_submultiset_match(
          rule, t, th.sig,
          [&](const Substitution& sub, const std::vector<Term>& rest) {
            std::vector<Term> parts = rest;
            parts.push_back(substitute(rule.rhs, sub, th.sig));
            result = Term::app(t.id(), std::move(parts), th.sig);
            return true;
          });
    } else if (!t.is_ac_app() && rule.lhs.id() == t.id()) {
      for_each_whole_match(rule, t, th.sig, [&](const Substitution& sub) {
        result = substitute(rule.rhs, sub, th.sig);
        return true;
      });
    }
    if (result) return result;
  }
  return std::nullopt;
}

Term normalize(const Term& t, const Theory& th, long step_budget) {
  Term cur = t;
  for (long i = 0; i < step_budget; ++i) {
    auto next = rewrite_step(cur, th);
    if (!next) return cur;
    cur = *next;
  }
  throw StepBudgetExceeded("no normal form within " +
                           std::to_string(step_budget) + " rewrite steps");
}

TermSet all_rewrite_steps(const Term& t, const Theory& th) {
  TermSet out;
  if (!t.is_app()) return out;
  for (size_t i = 0; i < t.args().size(); ++i)
    for (const Term& r : all_rewrite_steps(t.args()[i], th)) {
      std::vector<Term> args = t.args();
      args[i] = r;
      out.insert(Term::app(t.id(), std::move(args), th.sig));
    }
  for (const RewriteRule& rule : th.rules) {
    if (t.is_ac_app() && rule.lhs.is_app_of(t.id())) {
      for_each_submultiset_match(
          rule, t, th.sig,
          [&](const Substitution& sub, const std::vector<Term>& rest) {
            std::vector<Term> parts = rest;
            parts.push_back(substitute(rule.rhs, sub, th.sig));
            out.insert(Term::app(t.id(), std::move(parts), th.sig));
            return false;
          });
    } else if (!t.is_ac_app() && rule.lhs.id() == t.id()) {
      for_each_whole_match(rule, t, th.sig, [&](const Substitution& sub) {
        out.insert(substitute(rule.rhs, sub, th.sig));
        return false;
      });
    }
  }
  return out;
}

TermSet head_rewrite_steps(const Term& t, const Theory& th) {
  TermSet out;
  for (const RewriteRule& rule : th.rules) {
    if (t.is_ac_app()) {
      if (rule.lhs.is_app_of(t.id())) {
        // the redex may be any sub-multiset, the other summands are residue
        for_each_submultiset_match(
            rule, t, th.sig,
            [&](const Substitution& sub, const std::vector<Term>& rest) {
              std::vector<Term> parts = rest;
              parts.push_back(substitute(rule.rhs, sub, th.sig));
              out.insert(Term::app(t.id(), std::move(parts), th.sig));
              return false;
            });
      } else if (rule.lhs.is_app()) {
        // a single summand may be the redex, the rest stays alongside
        ArgBag bag(t.args());
        for (size_t j = 0; j < bag.elems.size(); ++j) {
          Matcher m{th.sig};
          Substitution sub;
          m.match(rule.lhs, bag.elems[j], sub, [&] {
            bag.cnt[j]--;
            std::vector<Term> parts = bag.expansion();
            bag.cnt[j]++;
            parts.push_back(substitute(rule.rhs, sub, th.sig));
            out.insert(Term::app(t.id(), std::move(parts), th.sig));
          });
        }
      }
    } else if (t.is_app() && rule.lhs.id() == t.id()) {
      for_each_whole_match(rule, t, th.sig, [&](const Substitution& sub) {
        out.insert(substitute(rule.rhs, sub, th.sig));
        return false;
      });
    }
  }
  return out;
}

}  // namespace acid
