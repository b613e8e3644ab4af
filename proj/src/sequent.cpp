#include "acid/sequent.hpp"

#include <climits>
#include <map>
#include <sstream>
#include <utility>

#include "acid/parse.hpp"
#include "json.hpp"

namespace acid {

namespace {

using nlohmann::json;

void require_ground(const Term& t) {
  if (t.is_var() || t.is_hole()) throw Error("sequents must be ground");
  for (const Term& a : t.args()) require_ground(a);
}

// Subterm closure of the root sequent plus, for every sign(blind(N,R),K) it
// contains, the unblinded product sign(N,K). Every term a search state can
// mention lives here, which both bounds the search and powers the cap check.
TermSet candidate_space(const Sequent& s, const ConstructorRoles& roles,
                        const Signature& sig, size_t cap) {
  TermSet closure = subterms(s.goal);
  for (const Term& h : s.hypotheses) {
    TermSet sub = subterms(h);
    closure.insert(sub.begin(), sub.end());
  }
  bool grew = roles.sign >= 0 && roles.blind >= 0;
  while (grew) {
    grew = false;
    std::vector<Term> snap(closure.begin(), closure.end());
    for (const Term& t : snap) {
      if (!t.is_app_of(roles.sign)) continue;
      const Term& body = t.args()[0];
      if (!body.is_app_of(roles.blind)) continue;
      Term unblinded =
          Term::app(roles.sign, {body.args()[0], t.args()[1]}, sig);
      grew |= closure.insert(unblinded).second;
    }
    if (closure.size() > cap) break;
  }
  if (closure.size() > cap)
    throw SearchSpaceError("candidate space overflow: " +
                           std::to_string(closure.size()) +
                           " terms exceed the cap of " + std::to_string(cap));
  return closure;
}

struct Prover {
  const Theory& th;
  ConstructorRoles roles;
  long budget;

  enum State { kInProgress, kProved, kFailed };
  struct Entry {
    State state = kInProgress;
    int depth = 0;
    ProofNode proof;  // meaningful when state == kProved
  };
  std::map<std::string, Entry> memo;

  std::string key(const Sequent& s) const {
    std::ostringstream os;
    for (const Term& h : s.hypotheses) os << to_string(h, th.sig) << " , ";
    os << "|- " << to_string(s.goal, th.sig);
    return os.str();
  }

  // taint reports the shallowest in-progress ancestor any failed branch
  // looped back to. A failure that only loops to the sequent itself (or to
  // nothing) cannot be rescued by another path and is cached permanently;
  // one that depends on an enclosing sequent is forgotten so a later query
  // along a different path can re-examine it.
  std::optional<ProofNode> search(const Sequent& s, int depth, int& taint) {
    std::string k = key(s);
    auto it = memo.find(k);
    if (it != memo.end()) {
      if (it->second.state == kProved) return it->second.proof;
      if (it->second.state == kFailed) return std::nullopt;
      taint = std::min(taint, it->second.depth);
      return std::nullopt;
    }
    memo[k] = Entry{kInProgress, depth, {}};
    int sub = INT_MAX;
    std::optional<ProofNode> found = expand(s, depth, sub);
    if (found) {
      memo[k] = Entry{kProved, depth, *found};
      return found;
    }
    if (sub < depth) {
      memo.erase(k);
      taint = std::min(taint, sub);
    } else {
      memo[k].state = kFailed;
    }
    return std::nullopt;
  }

  std::optional<ProofNode> wrap1(const char* rule, const Sequent& s,
                                 const Term& principal,
                                 std::optional<ProofNode> premise) {
    if (!premise) return std::nullopt;
    ProofNode node;
    node.rule = rule;
    node.conclusion = s;
    node.principal = principal;
    node.premises.push_back(std::move(*premise));
    return node;
  }

  std::optional<ProofNode> expand(const Sequent& s, int depth, int& taint) {
    const TermSet& g = s.hypotheses;

    // Invertible left rules first. Applying one never loses provability, so
    // whichever instance adds new material decides the sequent outright.
    if (roles.pair >= 0) {
      for (const Term& h : g) {
        if (!h.is_app_of(roles.pair)) continue;
        if (g.count(h.args()[0]) && g.count(h.args()[1])) continue;
        Sequent child{g, s.goal};
        child.hypotheses.insert(h.args()[0]);
        child.hypotheses.insert(h.args()[1]);
        return wrap1("p_L", s, h, search(child, depth + 1, taint));
      }
    }
    if (roles.sign >= 0 && roles.pub >= 0) {
      for (const Term& h : g) {
        if (!h.is_app_of(roles.sign) || g.count(h.args()[0])) continue;
        // verification key present modulo AC: terms are canonical, so the
        // side condition is a plain membership test
        if (!g.count(Term::app(roles.pub, {h.args()[1]}, th.sig))) continue;
        Sequent child{g, s.goal};
        child.hypotheses.insert(h.args()[0]);
        return wrap1("sign_L", s, h, search(child, depth + 1, taint));
      }
    }

    // Branching left rules: derive the hidden component, then continue with
    // the released material alongside the untouched principal.
    auto left2 = [&](const char* rule, const Term& principal,
                     const Term& need,
                     std::vector<Term> adds) -> std::optional<ProofNode> {
      bool novel = false;
      for (const Term& a : adds) novel |= !g.count(a);
      if (!novel) return std::nullopt;
      auto d1 = search(Sequent{g, need}, depth + 1, taint);
      if (!d1) return std::nullopt;
      Sequent rest{g, s.goal};
      for (const Term& a : adds) rest.hypotheses.insert(a);
      auto d2 = search(rest, depth + 1, taint);
      if (!d2) return std::nullopt;
      ProofNode node;
      node.rule = rule;
      node.conclusion = s;
      node.principal = principal;
      node.premises.push_back(std::move(*d1));
      node.premises.push_back(std::move(*d2));
      return node;
    };

    if (roles.enc >= 0)
      for (const Term& h : g)
        if (h.is_app_of(roles.enc))
          if (auto n = left2("e_L", h, h.args()[1],
                             {h.args()[0], h.args()[1]}))
            return n;
    if (roles.blind >= 0)
      for (const Term& h : g)
        if (h.is_app_of(roles.blind))
          if (auto n = left2("blind_L1", h, h.args()[1],
                             {h.args()[0], h.args()[1]}))
            return n;
    if (roles.sign >= 0 && roles.blind >= 0)
      for (const Term& h : g)
        if (h.is_app_of(roles.sign) && h.args()[0].is_app_of(roles.blind)) {
          const Term& body = h.args()[0];
          Term unblinded = Term::app(
              roles.sign, {body.args()[0], h.args()[1]}, th.sig);
          if (auto n = left2("blind_L2", h, body.args()[1],
                             {unblinded, body.args()[1]}))
            return n;
        }

    // Analytic cut over alien subterms sitting directly under equational
    // symbols anywhere in the sequent, including material added mid-proof.
    TermSet cut_pool = e_factors(s.goal, th.sig);
    for (const Term& h : g) {
      TermSet ef = e_factors(h, th.sig);
      cut_pool.insert(ef.begin(), ef.end());
    }
    for (const Term& a : cut_pool) {
      if (g.count(a) || a == s.goal) continue;
      auto d1 = search(Sequent{g, a}, depth + 1, taint);
      if (!d1) continue;
      Sequent rest{g, s.goal};
      rest.hypotheses.insert(a);
      auto d2 = search(rest, depth + 1, taint);
      if (!d2) continue;
      ProofNode node;
      node.rule = "acut";
      node.conclusion = s;
      node.principal = a;
      node.premises.push_back(std::move(*d1));
      node.premises.push_back(std::move(*d2));
      return node;
    }

    // Right rule on the goal's head constructor (there is none for pub).
    if (s.goal.is_app()) {
      const char* rule = nullptr;
      if (s.goal.id() == roles.pair)
        rule = "p_R";
      else if (s.goal.id() == roles.enc)
        rule = "e_R";
      else if (s.goal.id() == roles.sign)
        rule = "sign_R";
      else if (s.goal.id() == roles.blind)
        rule = "blind_R";
      if (rule) {
        auto d1 = search(Sequent{g, s.goal.args()[0]}, depth + 1, taint);
        if (d1) {
          auto d2 = search(Sequent{g, s.goal.args()[1]}, depth + 1, taint);
          if (d2) {
            ProofNode node;
            node.rule = rule;
            node.conclusion = s;
            node.premises.push_back(std::move(*d1));
            node.premises.push_back(std::move(*d2));
            return node;
          }
        }
      }
    }

    // Elementary layer.
    Decision d = decide_edp(g, s.goal, th, budget);
    if (!d.deducible) return std::nullopt;
    ProofNode node;
    node.rule = "id";
    node.conclusion = s;
    node.witness = std::move(d.witness);
    return node;
  }
};

// ---- proof checking ----------------------------------------------------

struct Checker {
  const Theory& th;
  ConstructorRoles roles;
  long budget;

  bool premise_is(const ProofNode& p, size_t i, const Sequent& want) const {
    return i < p.premises.size() && p.premises[i].conclusion == want;
  }

  bool node_ok(const ProofNode& p) const {
    const TermSet& g = p.conclusion.hypotheses;
    const Term& goal = p.conclusion.goal;

    if (p.rule == "id") {
      if (!p.premises.empty() || !p.witness) return false;
      try {
        if (!validate_edp_witness(g, goal, *p.witness, th, budget))
          return false;
      } catch (const SaturationBudgetError&) {
        return false;
      }
    } else if (p.rule == "p_L") {
      if (p.premises.size() != 1 || !p.principal) return false;
      const Term& h = *p.principal;
      if (!h.is_app_of(roles.pair) || !g.count(h)) return false;
      Sequent want{g, goal};
      want.hypotheses.insert(h.args()[0]);
      want.hypotheses.insert(h.args()[1]);
      if (!premise_is(p, 0, want)) return false;
    } else if (p.rule == "sign_L") {
      if (p.premises.size() != 1 || !p.principal || roles.pub < 0)
        return false;
      const Term& h = *p.principal;
      if (!h.is_app_of(roles.sign) || !g.count(h)) return false;
      if (!g.count(Term::app(roles.pub, {h.args()[1]}, th.sig))) return false;
      Sequent want{g, goal};
      want.hypotheses.insert(h.args()[0]);
      if (!premise_is(p, 0, want)) return false;
    } else if (p.rule == "e_L" || p.rule == "blind_L1") {
      int head = p.rule == "e_L" ? roles.enc : roles.blind;
      if (p.premises.size() != 2 || !p.principal) return false;
      const Term& h = *p.principal;
      if (!h.is_app_of(head) || !g.count(h)) return false;
      Sequent rest{g, goal};
      rest.hypotheses.insert(h.args()[0]);
      rest.hypotheses.insert(h.args()[1]);
      if (!premise_is(p, 0, Sequent{g, h.args()[1]})) return false;
      if (!premise_is(p, 1, rest)) return false;
    } else if (p.rule == "blind_L2") {
      if (p.premises.size() != 2 || !p.principal) return false;
      const Term& h = *p.principal;
      if (!h.is_app_of(roles.sign) || !g.count(h)) return false;
      const Term& body = h.args()[0];
      if (!body.is_app_of(roles.blind)) return false;
      Term unblinded =
          Term::app(roles.sign, {body.args()[0], h.args()[1]}, th.sig);
      Sequent rest{g, goal};
      rest.hypotheses.insert(unblinded);
      rest.hypotheses.insert(body.args()[1]);
      if (!premise_is(p, 0, Sequent{g, body.args()[1]})) return false;
      if (!premise_is(p, 1, rest)) return false;
    } else if (p.rule == "acut") {
      if (p.premises.size() != 2 || !p.principal) return false;
      const Term& a = *p.principal;
      TermSet pool = e_factors(goal, th.sig);
      for (const Term& h : g) {
        TermSet ef = e_factors(h, th.sig);
        pool.insert(ef.begin(), ef.end());
      }
      if (!pool.count(a)) return false;
      Sequent rest{g, goal};
      rest.hypotheses.insert(a);
      if (!premise_is(p, 0, Sequent{g, a})) return false;
      if (!premise_is(p, 1, rest)) return false;
    } else if (p.rule == "p_R" || p.rule == "e_R" || p.rule == "sign_R" ||
               p.rule == "blind_R") {
      int head = p.rule == "p_R"     ? roles.pair
                 : p.rule == "e_R"   ? roles.enc
                 : p.rule == "sign_R" ? roles.sign
                                      : roles.blind;
      if (p.premises.size() != 2 || !goal.is_app_of(head)) return false;
      if (!premise_is(p, 0, Sequent{g, goal.args()[0]})) return false;
      if (!premise_is(p, 1, Sequent{g, goal.args()[1]})) return false;
    } else {
      return false;
    }

    for (const ProofNode& q : p.premises)
      if (!node_ok(q)) return false;
    return true;
  }
};

// ---- JSON --------------------------------------------------------------

json node_to_json(const ProofNode& p, const Signature& sig) {
  json j;
  j["rule"] = p.rule;
  json hyps = json::array();
  for (const Term& h : p.conclusion.hypotheses)
    hyps.push_back(to_string(h, sig));
  j["hypotheses"] = std::move(hyps);
  j["goal"] = to_string(p.conclusion.goal, sig);
  if (p.principal) j["principal"] = to_string(*p.principal, sig);
  if (p.witness) {
    MatchWitness w = renumber_holes(*p.witness, sig);
    json jw;
    jw["context"] = to_string(w.context, sig);
    json fillers = json::array();
    for (const Term& f : w.fillers) fillers.push_back(to_string(f, sig));
    jw["fillers"] = std::move(fillers);
    j["witness"] = std::move(jw);
  }
  json prems = json::array();
  for (const ProofNode& q : p.premises) prems.push_back(node_to_json(q, sig));
  j["premises"] = std::move(prems);
  return j;
}

ProofNode node_from_json(const json& j, Signature& sig) {
  TermSyntax ground;
  ground.allow_vars = false;
  ground.auto_declare_names = true;
  ProofNode p;
  p.rule = j.at("rule").get<std::string>();
  for (const auto& h : j.at("hypotheses"))
    p.conclusion.hypotheses.insert(
        parse_term(h.get<std::string>(), sig, ground));
  p.conclusion.goal = parse_term(j.at("goal").get<std::string>(), sig, ground);
  if (j.contains("principal"))
    p.principal = parse_term(j.at("principal").get<std::string>(), sig, ground);
  if (j.contains("witness")) {
    TermSyntax holed = ground;
    holed.allow_holes = true;
    MatchWitness w;
    w.context = Context::from_skeleton(parse_term(
        j.at("witness").at("context").get<std::string>(), sig, holed));
    for (const auto& f : j.at("witness").at("fillers"))
      w.fillers.push_back(parse_term(f.get<std::string>(), sig, ground));
    p.witness = std::move(w);
  }
  for (const auto& q : j.at("premises"))
    p.premises.push_back(node_from_json(q, sig));
  return p;
}

}  // namespace

ConstructorRoles ConstructorRoles::resolve(const Signature& sig) {
  auto role = [&](const char* name, int arity) {
    int id = sig.symbol_id(name);
    if (id < 0) return -1;
    const Symbol& s = sig.symbol(id);
    bool fits = s.kind == SymbolKind::Constructor && s.arity == arity;
    return fits ? id : -1;
  };
  ConstructorRoles r;
  r.pair = role("pair", 2);
  r.enc = role("enc", 2);
  r.sign = role("sign", 2);
  r.blind = role("blind", 2);
  r.pub = role("pub", 1);
  return r;
}

bool operator==(const Sequent& a, const Sequent& b) {
  return a.goal == b.goal && a.hypotheses == b.hypotheses;
}

std::optional<ProofNode> prove(const Sequent& s, const Theory& th,
                               size_t max_candidates, long budget) {
  Sequent root;
  for (const Term& h : s.hypotheses) {
    require_ground(h);
    root.hypotheses.insert(normalize(h, th));
  }
  require_ground(s.goal);
  root.goal = normalize(s.goal, th);

  ConstructorRoles roles = ConstructorRoles::resolve(th.sig);
  candidate_space(root, roles, th.sig, max_candidates);

  Prover prover{th, roles, budget, {}};
  int taint = INT_MAX;
  return prover.search(root, 0, taint);
}

bool check_proof(const ProofNode& p, const Theory& th, long budget) {
  Checker checker{th, ConstructorRoles::resolve(th.sig), budget};
  return checker.node_ok(p);
}

std::string proof_to_json(const ProofNode& p, const Signature& sig) {
  return node_to_json(p, sig).dump(2);
}

ProofNode proof_from_json(const std::string& text, Signature& sig) {
  try {
    return node_from_json(json::parse(text), sig);
  } catch (const json::exception& e) {
    throw ParseError(std::string("proof json: ") + e.what());
  }
}

}  // namespace acid
