// Term algebra with flattened AC applications kept in a canonical form.
// Ground terms, rewrite patterns (variables) and match contexts (holes) share
// one representation; AC-equality collapses to structural equality on the
// canonical form.
#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace acid {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ArityError : Error {
  using Error::Error;
};
struct PositionError : Error {
  using Error::Error;
};

enum class SymbolKind {
  EqFree,       // free symbol of the equational signature (incl. neutral constants)
  Ac,           // associative-commutative symbol
  Inverse,      // unary inverse belonging to an Ac symbol
  Constructor,  // opaque data constructor (pairing, encryption, signatures, ...)
};

struct Symbol {
  std::string name;
  int arity = 0;
  SymbolKind kind = SymbolKind::EqFree;
  int inverse = -1;   // Ac only: symbol id of its inverse, -1 if none
  int neutral = -1;   // Ac only: symbol id of its neutral constant, -1 if none
  int ac_owner = -1;  // Inverse only: the Ac symbol it belongs to
};

// Interning authority for function symbols, atomic names and variables.
// Mutable while a theory/knowledge file is being loaded, read-only afterwards;
// queries against a fully built signature are safe to run concurrently.
class Signature {
 public:
  int add_symbol(const Symbol& s);
  int add_name(const std::string& n, bool is_public);
  int add_var(const std::string& v);  // idempotent
  // wires an AC symbol to its (optional, pass -1) inverse and neutral
  void link_ac(int ac_id, int inverse_id, int neutral_id);

  int symbol_id(const std::string& n) const;  // -1 when absent
  int name_id(const std::string& n) const;
  int var_id(const std::string& v) const;

  const Symbol& symbol(int id) const { return symbols_.at(id); }
  const std::string& name_str(int id) const { return names_.at(id).first; }
  bool name_public(int id) const { return names_.at(id).second; }
  const std::string& var_str(int id) const { return vars_.at(id); }

  int symbol_count() const { return static_cast<int>(symbols_.size()); }
  int name_count() const { return static_cast<int>(names_.size()); }
  int var_count() const { return static_cast<int>(vars_.size()); }

  bool in_sigma_e(int sym) const {
    return symbol(sym).kind != SymbolKind::Constructor;
  }
  // max arity over the equational part (constructors excluded)
  int max_eq_arity() const;
  std::vector<int> ac_symbols() const;

 private:
  std::vector<Symbol> symbols_;
  std::vector<std::pair<std::string, bool>> names_;
  std::vector<std::string> vars_;
  std::map<std::string, int> symbol_index_;
  std::map<std::string, int> name_index_;
  std::map<std::string, int> var_index_;
};

// Child indices are 1-based; the empty vector is the root position.
using Position = std::vector<int>;

class Term {
 public:
  enum class Kind : uint8_t { Name, Var, App, Hole };

  Term() : kind_(Kind::Hole), id_(0) {}  // the identity-context hole

  static Term name(int id) { return Term(Kind::Name, id, {}); }
  static Term var(int id) { return Term(Kind::Var, id, {}); }
  static Term hole(int index) { return Term(Kind::Hole, index, {}); }
  // Builds a canonical application: checks arity, flattens + sorts AC
  // arguments. An AC application of a single argument collapses to that
  // argument; an empty AC application collapses to the declared neutral.
  static Term app(int sym, std::vector<Term> args, const Signature& sig);
  // The partial sum args[from..] of an AC node under the binary reading
  // (a single remaining argument collapses to itself).
  static Term ac_suffix(const Term& t, size_t from);

  Kind kind() const { return kind_; }
  int id() const { return id_; }
  const std::vector<Term>& args() const { return args_; }
  int arg_count() const { return static_cast<int>(args_.size()); }

  bool is_name() const { return kind_ == Kind::Name; }
  bool is_var() const { return kind_ == Kind::Var; }
  bool is_hole() const { return kind_ == Kind::Hole; }
  bool is_app() const { return kind_ == Kind::App; }
  bool is_app_of(int sym) const { return kind_ == Kind::App && id_ == sym; }
  bool is_ac_app() const { return kind_ == Kind::App && ac_; }

  friend std::strong_ordering operator<=>(const Term& a, const Term& b);
  friend bool operator==(const Term& a, const Term& b);

 private:
  Term(Kind k, int id, std::vector<Term> args, bool ac = false)
      : kind_(k), id_(id), ac_(ac), args_(std::move(args)) {}

  Kind kind_;
  bool ac_ = false;  // App only; derived from the symbol, not compared
  int id_ = 0;
  std::vector<Term> args_;
};

using TermSet = std::set<Term>;

// Re-canonicalizes an arbitrarily built term bottom-up (idempotent).
Term ac_canonicalize(const Term& t, const Signature& sig);

// Size on the binary reading: a k-argument AC node contributes k-1 operator
// nodes; names, variables and holes count 1.
long term_size(const Term& t);

// Tree navigation on the binary reading: an AC node with more than two
// arguments has child 1 = its first argument and child 2 = the partial sum of
// the rest, so |positions(t)| == term_size(t). Invalid positions throw
// PositionError.
std::vector<Position> positions(const Term& t);
Term subterm_at(const Term& t, const Position& p);
Term replace_at(const Term& t, const Position& p, const Term& u,
                const Signature& sig);
// Every argument of a flattened AC node and the node itself are subterms;
// partial AC sums are not.
TermSet subterms(const Term& t);

// A term is equationally alien when headed by a constructor or when it is a
// private name. Public names act as constants available to any context.
bool is_e_alien(const Term& t, const Signature& sig);
// Alien immediate subterms of equationally headed subterms of t.
TermSet e_factors(const Term& t, const Signature& sig);

// A context is a term over the equational signature (plus public names) whose
// holes carry filler indices 0..holes-1, each exactly once. Default: the
// identity context (a single hole).
struct Context {
  Term skeleton;  // Term() is hole 0
  int holes = 1;

  static Context from_skeleton(Term skeleton);  // validates hole indexing
};

// Substitutes fillers[i] for hole i and re-canonicalizes. Throws ArityError
// when the filler count does not match.
Term apply_context(const Context& c, const std::vector<Term>& fillers,
                   const Signature& sig);

// True iff s and t are equal modulo associativity/commutativity of the
// declared AC symbols (inputs need not be canonical).
bool ac_equal(const Term& s, const Term& t, const Signature& sig);

}  // namespace acid
