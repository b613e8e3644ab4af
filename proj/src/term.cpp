#include "acid/term.hpp"

#include <algorithm>

namespace acid {

int Signature::add_symbol(const Symbol& s) {
  if (symbol_index_.count(s.name) || name_index_.count(s.name))
    throw Error("duplicate symbol declaration: " + s.name);
  int id = static_cast<int>(symbols_.size());
  symbols_.push_back(s);
  symbol_index_[s.name] = id;
  return id;
}

int Signature::add_name(const std::string& n, bool is_public) {
  if (name_index_.count(n) || symbol_index_.count(n))
    throw Error("duplicate name declaration: " + n);
  int id = static_cast<int>(names_.size());
  names_.emplace_back(n, is_public);
  name_index_[n] = id;
  return id;
}

int Signature::add_var(const std::string& v) {
  auto it = var_index_.find(v);
  if (it != var_index_.end()) return it->second;
  int id = static_cast<int>(vars_.size());
  vars_.push_back(v);
  var_index_[v] = id;
  return id;
}

void Signature::link_ac(int ac_id, int inverse_id, int neutral_id) {
  if (symbols_.at(ac_id).kind != SymbolKind::Ac)
    throw Error("link_ac target is not an AC symbol");
  if (inverse_id >= 0) {
    symbols_.at(ac_id).inverse = inverse_id;
    symbols_.at(inverse_id).ac_owner = ac_id;
  }
  if (neutral_id >= 0) symbols_.at(ac_id).neutral = neutral_id;
}

int Signature::symbol_id(const std::string& n) const {
  auto it = symbol_index_.find(n);
  return it == symbol_index_.end() ? -1 : it->second;
}

int Signature::name_id(const std::string& n) const {
  auto it = name_index_.find(n);
  return it == name_index_.end() ? -1 : it->second;
}

int Signature::var_id(const std::string& v) const {
  auto it = var_index_.find(v);
  return it == var_index_.end() ? -1 : it->second;
}

int Signature::max_eq_arity() const {
  int ar = 0;
  for (const Symbol& s : symbols_)
    if (s.kind != SymbolKind::Constructor) ar = std::max(ar, s.arity);
  return ar;
}

std::vector<int> Signature::ac_symbols() const {
  std::vector<int> out;
  for (int i = 0; i < symbol_count(); ++i)
    if (symbols_[i].kind == SymbolKind::Ac) out.push_back(i);
  return out;
}

std::strong_ordering operator<=>(const Term& a, const Term& b) {
  auto rank = [](Term::Kind k) {
    switch (k) {
      case Term::Kind::Name: return 0;
      case Term::Kind::Var: return 1;
      case Term::Kind::App: return 2;
      case Term::Kind::Hole: return 3;
    }
    return 4;
  };
  if (auto c = rank(a.kind_) <=> rank(b.kind_); c != 0) return c;
  if (auto c = a.id_ <=> b.id_; c != 0) return c;
  // applications of the same symbol: lexicographic on arguments
  size_t n = std::min(a.args_.size(), b.args_.size());
  for (size_t i = 0; i < n; ++i)
    if (auto c = a.args_[i] <=> b.args_[i]; c != 0) return c;
  return a.args_.size() <=> b.args_.size();
}

bool operator==(const Term& a, const Term& b) { return (a <=> b) == 0; }

Term Term::app(int sym, std::vector<Term> args, const Signature& sig) {
  const Symbol& s = sig.symbol(sym);
  if (s.kind != SymbolKind::Ac) {
    if (static_cast<int>(args.size()) != s.arity)
      throw ArityError("symbol " + s.name + " expects " +
                       std::to_string(s.arity) + " arguments, got " +
                       std::to_string(args.size()));
    return Term(Kind::App, sym, std::move(args));
  }
  // AC node: splice in arguments headed by the same symbol, then sort.
  std::vector<Term> flat;
  flat.reserve(args.size());
  for (Term& a : args) {
    if (a.is_app_of(sym))
      for (Term& sub : a.args_) flat.push_back(std::move(sub));
    else
      flat.push_back(std::move(a));
  }
  if (flat.empty()) {
    if (s.neutral >= 0) return Term(Kind::App, s.neutral, {});
    throw ArityError("empty application of AC symbol " + s.name +
                     " with no neutral");
  }
  if (flat.size() == 1) return flat[0];
  std::sort(flat.begin(), flat.end());
  return Term(Kind::App, sym, std::move(flat), /*ac=*/true);
}

Term ac_canonicalize(const Term& t, const Signature& sig) {
  if (!t.is_app()) return t;
  std::vector<Term> args;
  args.reserve(t.args().size());
  for (const Term& a : t.args()) args.push_back(ac_canonicalize(a, sig));
  return Term::app(t.id(), std::move(args), sig);
}

bool ac_equal(const Term& s, const Term& t, const Signature& sig) {
  return ac_canonicalize(s, sig) == ac_canonicalize(t, sig);
}

long term_size(const Term& t) {
  if (!t.is_app()) return 1;
  long n = 0;
  for (const Term& a : t.args()) n += term_size(a);
  // a k-argument AC node reads as k-1 binary operator nodes
  return n + (t.is_ac_app() ? t.arg_count() - 1 : 1);
}

Term Term::ac_suffix(const Term& t, size_t from) {
  if (!t.is_ac_app() || from >= t.args_.size())
    throw PositionError("ac_suffix outside an AC node");
  if (t.args_.size() - from == 1) return t.args_[from];
  return Term(Kind::App, t.id_,
              std::vector<Term>(t.args_.begin() + static_cast<long>(from),
                                t.args_.end()),
              /*ac=*/true);
}

namespace {

void collect_positions(const Term& t, Position& cur,
                       std::vector<Position>& out) {
  out.push_back(cur);
  if (t.is_ac_app() && t.arg_count() > 2) {
    cur.push_back(1);
    collect_positions(t.args()[0], cur, out);
    cur.back() = 2;
    collect_positions(Term::ac_suffix(t, 1), cur, out);
    cur.pop_back();
    return;
  }
  for (int i = 0; i < t.arg_count(); ++i) {
    cur.push_back(i + 1);
    collect_positions(t.args()[static_cast<size_t>(i)], cur, out);
    cur.pop_back();
  }
}

}  // namespace

std::vector<Position> positions(const Term& t) {
  std::vector<Position> out;
  Position cur;
  collect_positions(t, cur, out);
  return out;
}

Term subterm_at(const Term& t, const Position& p) {
  Term cur = t;
  for (int i : p) {
    Term next;  // built before assigning: cur's arguments alias into cur
    if (cur.is_ac_app() && cur.arg_count() > 2) {
      if (i == 1)
        next = cur.args()[0];
      else if (i == 2)
        next = Term::ac_suffix(cur, 1);
      else
        throw PositionError("no subterm at child index " + std::to_string(i));
    } else {
      if (i < 1 || i > cur.arg_count())
        throw PositionError("no subterm at child index " + std::to_string(i));
      next = cur.args()[static_cast<size_t>(i - 1)];
    }
    cur = std::move(next);
  }
  return cur;
}

Term replace_at(const Term& t, const Position& p, const Term& u,
                const Signature& sig) {
  if (p.empty()) return ac_canonicalize(u, sig);
  int i = p.front();
  Position rest(p.begin() + 1, p.end());
  if (t.is_ac_app() && t.arg_count() > 2) {
    if (i == 1) {
      std::vector<Term> args{replace_at(t.args()[0], rest, u, sig)};
      args.insert(args.end(), t.args().begin() + 1, t.args().end());
      return Term::app(t.id(), std::move(args), sig);
    }
    if (i == 2) {
      Term tail = replace_at(Term::ac_suffix(t, 1), rest, u, sig);
      return Term::app(t.id(), {t.args()[0], std::move(tail)}, sig);
    }
    throw PositionError("no subterm at child index " + std::to_string(i));
  }
  if (i < 1 || i > t.arg_count())
    throw PositionError("no subterm at child index " + std::to_string(i));
  std::vector<Term> args = t.args();
  args[static_cast<size_t>(i - 1)] =
      replace_at(args[static_cast<size_t>(i - 1)], rest, u, sig);
  return Term::app(t.id(), std::move(args), sig);
}

TermSet subterms(const Term& t) {
  TermSet out;
  out.insert(t);
  for (const Term& a : t.args()) {
    TermSet sub = subterms(a);
    out.insert(sub.begin(), sub.end());
  }
  return out;
}

bool is_e_alien(const Term& t, const Signature& sig) {
  if (t.is_name()) return !sig.name_public(t.id());
  if (t.is_app()) return !sig.in_sigma_e(t.id());
  return false;
}

TermSet e_factors(const Term& t, const Signature& sig) {
  TermSet out;
  for (const Term& u : subterms(t)) {
    if (!u.is_app() || !sig.in_sigma_e(u.id())) continue;
    for (const Term& a : u.args())
      if (is_e_alien(a, sig)) out.insert(a);
  }
  return out;
}

namespace {

void count_holes(const Term& t, std::vector<int>& seen) {
  if (t.is_hole()) {
    int i = t.id();
    if (i < 0) throw Error("negative hole index");
    if (static_cast<size_t>(i) >= seen.size()) seen.resize(i + 1, 0);
    seen[static_cast<size_t>(i)]++;
    return;
  }
  for (const Term& a : t.args()) count_holes(a, seen);
}

}  // namespace

Context Context::from_skeleton(Term skeleton) {
  std::vector<int> seen;
  count_holes(skeleton, seen);
  for (size_t i = 0; i < seen.size(); ++i)
    if (seen[i] != 1)
      throw Error("hole " + std::to_string(i) + " occurs " +
                  std::to_string(seen[i]) + " times");
  int holes = static_cast<int>(seen.size());
  return Context{std::move(skeleton), holes};
}

namespace {

Term fill_holes(const Term& t, const std::vector<Term>& fillers,
                const Signature& sig) {
  if (t.is_hole()) return fillers.at(static_cast<size_t>(t.id()));
  if (!t.is_app()) return t;
  std::vector<Term> args;
  args.reserve(t.args().size());
  for (const Term& a : t.args()) args.push_back(fill_holes(a, fillers, sig));
  return Term::app(t.id(), std::move(args), sig);
}

}  // namespace

Term apply_context(const Context& c, const std::vector<Term>& fillers,
                   const Signature& sig) {
  if (static_cast<int>(fillers.size()) != c.holes)
    throw ArityError("context with " + std::to_string(c.holes) +
                     " holes applied to " + std::to_string(fillers.size()) +
                     " fillers");
  return fill_holes(c.skeleton, fillers, sig);
}

}  // namespace acid
