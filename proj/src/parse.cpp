#include "acid/parse.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

namespace acid {

namespace {

const std::string kOpChars = "+*^%~|&@$!";

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

struct Token {
  enum Type { Ident, Num, Op, LParen, RParen, Comma, Slash, Arrow, Var, End };
  Type type;
  std::string text;
  int line = 1, col = 1;
};

[[noreturn]] void fail(const Token& at, const std::string& msg) {
  throw ParseError("line " + std::to_string(at.line) + ", col " +
                   std::to_string(at.col) + ": " + msg);
}

std::vector<Token> lex(const std::string& text, int start_line) {
  std::vector<Token> out;
  int line = start_line, col = 1;
  size_t i = 0;
  auto push = [&](Token::Type t, std::string s) {
    out.push_back(Token{t, std::move(s), line, col});
  };
  while (i < text.size()) {
    char c = text[i];
    if (c == '\n') {
      ++line;
      col = 1;
      ++i;
      continue;
    }
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++col;
      ++i;
      continue;
    }
    if (c == '#') {  // comment to end of line
      while (i < text.size() && text[i] != '\n') ++i;
      continue;
    }
    if (ident_start(c)) {
      size_t j = i;
      while (j < text.size() && ident_char(text[j])) ++j;
      push(Token::Ident, text.substr(i, j - i));
      col += static_cast<int>(j - i);
      i = j;
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      size_t j = i;
      while (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j]))) ++j;
      push(Token::Num, text.substr(i, j - i));
      col += static_cast<int>(j - i);
      i = j;
      continue;
    }
    if (c == '?') {
      size_t j = i + 1;
      if (j >= text.size() || !ident_start(text[j]))
        throw ParseError("line " + std::to_string(line) + ", col " +
                         std::to_string(col) + ": expected variable name after ?");
      size_t k = j;
      while (k < text.size() && ident_char(text[k])) ++k;
      push(Token::Var, text.substr(j, k - j));
      col += static_cast<int>(k - i);
      i = k;
      continue;
    }
    if (c == '-' && i + 1 < text.size() && text[i + 1] == '>') {
      push(Token::Arrow, "->");
      col += 2;
      i += 2;
      continue;
    }
    switch (c) {
      case '(': push(Token::LParen, "("); break;
      case ')': push(Token::RParen, ")"); break;
      case ',': push(Token::Comma, ","); break;
      case '/': push(Token::Slash, "/"); break;
      default:
        if (kOpChars.find(c) != std::string::npos) {
          push(Token::Op, std::string(1, c));
        } else {
          throw ParseError("line " + std::to_string(line) + ", col " +
                           std::to_string(col) + ": unexpected character '" +
                           std::string(1, c) + "'");
        }
    }
    ++col;
    ++i;
  }
  out.push_back(Token{Token::End, "", line, col});
  return out;
}

struct TermParser {
  const std::vector<Token>& toks;
  size_t pos = 0;
  Signature& sig;
  TermSyntax opts;
  int next_hole = 0;

  const Token& peek() const { return toks[pos]; }
  Token take() { return toks[pos++]; }
  void expect(Token::Type t, const std::string& what) {
    if (peek().type != t) fail(peek(), "expected " + what);
    ++pos;
  }

  // expr := primary (OP primary)* with a single operator per chain
  Term parse_expr() {
    Term first = parse_primary();
    if (peek().type != Token::Op) return first;
    std::string op = peek().text;
    int sym = sig.symbol_id(op);
    if (sym < 0) fail(peek(), "unknown operator '" + op + "'");
    if (sig.symbol(sym).kind != SymbolKind::Ac)
      fail(peek(), "operator '" + op + "' is not an AC symbol");
    std::vector<Term> args{std::move(first)};
    while (peek().type == Token::Op) {
      if (peek().text != op)
        fail(peek(), "mixed AC operators need parentheses ('" + op +
                         "' vs '" + peek().text + "')");
      ++pos;
      args.push_back(parse_primary());
    }
    return Term::app(sym, std::move(args), sig);
  }

  Term parse_primary() {
    const Token& t = peek();
    switch (t.type) {
      case Token::LParen: {
        ++pos;
        Term inner = parse_expr();
        expect(Token::RParen, "')'");
        return inner;
      }
      case Token::Var: {
        if (!opts.allow_vars) fail(t, "variables are not allowed here");
        ++pos;
        return Term::var(sig.add_var(t.text));
      }
      case Token::Op: {  // prefix application of an operator-named symbol
        std::string op = t.text;
        ++pos;
        int sym = sig.symbol_id(op);
        if (sym < 0) fail(t, "unknown operator '" + op + "'");
        return parse_application(sym, t);
      }
      case Token::Ident:
      case Token::Num:
        ++pos;
        return resolve_atom(t);
      default:
        fail(t, "expected a term");
    }
  }

  Term parse_application(int sym, const Token& at) {
    expect(Token::LParen, "'(' after symbol " + at.text);
    std::vector<Term> args;
    if (peek().type != Token::RParen) {
      args.push_back(parse_expr());
      while (peek().type == Token::Comma) {
        ++pos;
        args.push_back(parse_expr());
      }
    }
    expect(Token::RParen, "')'");
    try {
      return Term::app(sym, std::move(args), sig);
    } catch (const Error& e) {
      fail(at, e.what());
    }
  }

  Term resolve_atom(const Token& t) {
    if (opts.allow_holes && t.text == "_") return Term::hole(next_hole++);
    if (peek().type == Token::LParen) {
      int sym = sig.symbol_id(t.text);
      if (sym < 0) fail(t, "unknown symbol '" + t.text + "'");
      return parse_application(sym, t);
    }
    if (int sym = sig.symbol_id(t.text); sym >= 0) {
      if (sig.symbol(sym).arity != 0 && sig.symbol(sym).kind != SymbolKind::Ac)
        fail(t, "symbol '" + t.text + "' expects arguments");
      if (sig.symbol(sym).kind == SymbolKind::Ac)
        fail(t, "AC symbol '" + t.text + "' expects arguments");
      return Term::app(sym, {}, sig);
    }
    if (int n = sig.name_id(t.text); n >= 0) return Term::name(n);
    if (opts.auto_declare_names)
      return Term::name(sig.add_name(t.text, /*is_public=*/false));
    fail(t, "unknown identifier '" + t.text + "'");
  }
};

Term parse_tokens(const std::vector<Token>& toks, size_t& pos, Signature& sig,
                  const TermSyntax& opts) {
  TermParser p{toks, pos, sig, opts};
  Term t = p.parse_expr();
  pos = p.pos;
  return t;
}

std::vector<std::pair<int, std::string>> logical_lines(const std::string& text) {
  std::vector<std::pair<int, std::string>> out;
  std::istringstream in(text);
  std::string line;
  int no = 0;
  while (std::getline(in, line)) {
    ++no;
    if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
    bool blank = true;
    for (char c : line)
      if (!std::isspace(static_cast<unsigned char>(c))) blank = false;
    if (!blank) out.emplace_back(no, line);
  }
  return out;
}

// `<sym>/<arity>` after an eq/ctor keyword
std::pair<std::string, int> parse_sym_arity(const std::vector<Token>& toks,
                                            size_t& pos) {
  const Token& s = toks[pos];
  if (s.type != Token::Ident && s.type != Token::Num && s.type != Token::Op)
    fail(s, "expected symbol name");
  ++pos;
  if (toks[pos].type != Token::Slash) fail(toks[pos], "expected '/'");
  ++pos;
  if (toks[pos].type != Token::Num) fail(toks[pos], "expected arity");
  int ar = std::stoi(toks[pos].text);
  ++pos;
  return {s.text, ar};
}

}  // namespace

Term parse_term(const std::string& text, Signature& sig,
                const TermSyntax& opts) {
  std::vector<Token> toks = lex(text, 1);
  size_t pos = 0;
  Term t = parse_tokens(toks, pos, sig, opts);
  if (toks[pos].type != Token::End) fail(toks[pos], "trailing input after term");
  return t;
}

Theory parse_theory(const std::string& text) {
  Theory th;
  struct PendingRule {
    int line;
    std::string text;
  };
  std::vector<PendingRule> rule_lines;
  for (auto& [no, line] : logical_lines(text)) {
    std::vector<Token> toks = lex(line, no);
    size_t pos = 0;
    if (toks[pos].type != Token::Ident) fail(toks[pos], "expected a directive");
    std::string kw = toks[pos++].text;
    if (kw == "theory") {
      if (toks[pos].type != Token::Ident) fail(toks[pos], "expected theory name");
      th.name = toks[pos++].text;
    } else if (kw == "ac") {
      const Token& s = toks[pos];
      if (s.type != Token::Ident && s.type != Token::Num && s.type != Token::Op)
        fail(s, "expected AC symbol name");
      ++pos;
      Symbol ac{s.text, 2, SymbolKind::Ac};
      int ac_id = th.sig.add_symbol(ac);
      int inv_id = -1, neu_id = -1;
      while (toks[pos].type == Token::Ident &&
             (toks[pos].text == "inverse" || toks[pos].text == "neutral")) {
        std::string clause = toks[pos++].text;
        const Token& n = toks[pos];
        if (n.type != Token::Ident && n.type != Token::Num && n.type != Token::Op)
          fail(n, "expected symbol name after " + clause);
        ++pos;
        if (clause == "inverse")
          inv_id = th.sig.add_symbol(Symbol{n.text, 1, SymbolKind::Inverse});
        else
          neu_id = th.sig.add_symbol(Symbol{n.text, 0, SymbolKind::EqFree});
      }
      th.sig.link_ac(ac_id, inv_id, neu_id);
      if (toks[pos].type != Token::End) fail(toks[pos], "trailing input on ac line");
    } else if (kw == "eq" || kw == "ctor") {
      auto [nm, ar] = parse_sym_arity(toks, pos);
      Symbol s{nm, ar, kw == "eq" ? SymbolKind::EqFree : SymbolKind::Constructor};
      th.sig.add_symbol(s);
      if (toks[pos].type != Token::End) fail(toks[pos], "trailing input");
    } else if (kw == "rule") {
      rule_lines.push_back({no, line});  // parsed after all symbols are known
    } else {
      fail(toks[0], "unknown directive '" + kw + "'");
    }
  }
  TermSyntax rule_syntax;
  rule_syntax.allow_vars = true;
  for (auto& [no, line] : rule_lines) {
    std::vector<Token> toks = lex(line, no);
    size_t pos = 1;  // skip the rule keyword
    Term lhs = parse_tokens(toks, pos, th.sig, rule_syntax);
    if (toks[pos].type != Token::Arrow) fail(toks[pos], "expected '->'");
    ++pos;
    Term rhs = parse_tokens(toks, pos, th.sig, rule_syntax);
    if (toks[pos].type != Token::End) fail(toks[pos], "trailing input after rule");
    th.rules.push_back(RewriteRule{std::move(lhs), std::move(rhs)});
  }
  th.validate();
  th.c_e = compute_c_e(th);
  return th;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Theory parse_theory_file(const std::string& path) {
  try {
    return parse_theory(read_file(path));
  } catch (const ParseError& e) {
    throw ParseError(path + ": " + e.what());
  }
}

std::vector<Term> parse_knowledge(const std::string& text, Signature& sig) {
  std::vector<Term> terms;
  TermSyntax ground;
  ground.allow_vars = false;
  for (auto& [no, line] : logical_lines(text)) {
    std::vector<Token> toks = lex(line, no);
    size_t pos = 0;
    if (toks[pos].type != Token::Ident) fail(toks[pos], "expected a directive");
    std::string kw = toks[pos++].text;
    if (kw == "name") {
      if (toks[pos].type != Token::Ident) fail(toks[pos], "expected name");
      std::string nm = toks[pos++].text;
      if (toks[pos].type != Token::Ident ||
          (toks[pos].text != "public" && toks[pos].text != "private"))
        fail(toks[pos], "expected 'public' or 'private'");
      sig.add_name(nm, toks[pos].text == "public");
      ++pos;
      if (toks[pos].type != Token::End) fail(toks[pos], "trailing input");
    } else if (kw == "know") {
      Term t = parse_tokens(toks, pos, sig, ground);
      if (toks[pos].type != Token::End) fail(toks[pos], "trailing input");
      terms.push_back(std::move(t));
    } else {
      fail(toks[0], "unknown directive '" + kw + "'");
    }
  }
  return terms;
}

std::vector<Term> parse_knowledge_file(const std::string& path,
                                       Signature& sig) {
  try {
    return parse_knowledge(read_file(path), sig);
  } catch (const ParseError& e) {
    throw ParseError(path + ": " + e.what());
  }
}

namespace {

bool infix_op(const Signature& sig, int sym) {
  const Symbol& s = sig.symbol(sym);
  return s.kind == SymbolKind::Ac && s.name.size() == 1 &&
         kOpChars.find(s.name[0]) != std::string::npos;
}

void print(const Term& t, const Signature& sig, std::string& out) {
  switch (t.kind()) {
    case Term::Kind::Name:
      out += sig.name_str(t.id());
      return;
    case Term::Kind::Var:
      out += "?" + sig.var_str(t.id());
      return;
    case Term::Kind::Hole:
      out += "_";
      return;
    case Term::Kind::App: {
      const Symbol& s = sig.symbol(t.id());
      if (t.arg_count() == 0) {
        out += s.name;
        return;
      }
      if (t.is_ac_app() && infix_op(sig, t.id())) {
        bool first = true;
        for (const Term& a : t.args()) {
          if (!first) out += " " + s.name + " ";
          first = false;
          bool paren = a.is_ac_app() && infix_op(sig, a.id());
          if (paren) out += "(";
          print(a, sig, out);
          if (paren) out += ")";
        }
        return;
      }
      out += s.name + "(";
      bool first = true;
      for (const Term& a : t.args()) {
        if (!first) out += ", ";
        first = false;
        print(a, sig, out);
      }
      out += ")";
      return;
    }
  }
}

}  // namespace

std::string to_string(const Term& t, const Signature& sig) {
  std::string out;
  print(t, sig, out);
  return out;
}

std::string to_string(const Context& c, const Signature& sig) {
  return to_string(c.skeleton, sig);
}

}  // namespace acid
