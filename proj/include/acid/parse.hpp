// Concrete syntax: terms, theory files and knowledge files, plus the printer
// that round-trips with the term parser.
#pragma once

#include <string>
#include <vector>

#include "acid/rewrite.hpp"

namespace acid {

struct ParseError : Error {
  using Error::Error;
};

struct TermSyntax {
  bool allow_vars = true;    // ?x tokens (rewrite rules); off for ground input
  bool allow_holes = false;  // bare _ parses as the next context hole
  // unknown identifiers become private names instead of raising an error
  bool auto_declare_names = false;
};

// Parses one term. Identifiers are [A-Za-z_][A-Za-z0-9_]* or digit strings;
// application is f(t1,...,tn); declared AC symbols whose name is a single
// operator character chain infix (a + b + c); mixing two infix operators
// without parentheses is rejected; variables are written ?x.
Term parse_term(const std::string& text, Signature& sig,
                const TermSyntax& opts = {});

// Theory file, line-oriented with # comments:
//   theory <name>
//   ac <sym> [inverse <sym>] [neutral <sym>]
//   eq <sym>/<arity>
//   ctor <sym>/<arity>
//   rule <lhs> -> <rhs>
Theory parse_theory(const std::string& text);
Theory parse_theory_file(const std::string& path);

// Knowledge file, line-oriented with # comments:
//   name <id> public|private
//   know <term>
// Returns the ground terms; names are interned into sig.
std::vector<Term> parse_knowledge(const std::string& text, Signature& sig);
std::vector<Term> parse_knowledge_file(const std::string& path,
                                       Signature& sig);

// Printer. Holes print as _; AC symbols with single-character operator names
// print infix with parentheses around nested AC applications, everything else
// prints prefix. parse_term(to_string(t)) reproduces t.
std::string to_string(const Term& t, const Signature& sig);
std::string to_string(const Context& c, const Signature& sig);

std::string read_file(const std::string& path);  // throws Error on failure

}  // namespace acid
