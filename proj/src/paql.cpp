#include "pqe/paql.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <vector>

namespace pqe {

namespace {

enum class Tok { ident, number, string, symbol, end };

struct Token {
  Tok kind = Tok::end;
  std::string text;   // symbols normalized ("<=", ">=", "=", "<", ">", "(", ")", ".", "*", ",")
  std::string upper;  // uppercased identifier
  double value = 0.0;
  int line = 1, col = 1;
};

struct Lexer {
  const std::string& src;
  size_t pos = 0;
  int line = 1, col = 1;

  explicit Lexer(const std::string& s) : src(s) {}

  void advance(size_t n) {
    for (size_t i = 0; i < n && pos < src.size(); ++i, ++pos) {
      if (src[pos] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
  }

  bool starts_with(const char* s) const {
    return src.compare(pos, std::char_traits<char>::length(s), s) == 0;
  }

  Token next() {
    while (pos < src.size() && std::isspace(static_cast<unsigned char>(src[pos])))
      advance(1);
    Token t;
    t.line = line;
    t.col = col;
    if (pos >= src.size()) return t;

    const char c = src[pos];
    // UTF-8 comparison glyphs.
    if (starts_with("\xe2\x89\xa5")) {  // >=
      advance(3);
      t.kind = Tok::symbol;
      t.text = ">=";
      return t;
    }
    if (starts_with("\xe2\x89\xa4")) {  // <=
      advance(3);
      t.kind = Tok::symbol;
      t.text = "<=";
      return t;
    }
    if (starts_with("<=") || starts_with(">=")) {
      t.kind = Tok::symbol;
      t.text = src.substr(pos, 2);
      advance(2);
      return t;
    }
    if (std::strchr("()=<>*.,", c)) {
      t.kind = Tok::symbol;
      t.text = std::string(1, c);
      advance(1);
      return t;
    }
    if (c == '\'') {
      advance(1);
      std::string s;
      while (pos < src.size() && src[pos] != '\'') {
        s.push_back(src[pos]);
        advance(1);
      }
      if (pos >= src.size()) throw PaqlError("unterminated string literal", t.line, t.col);
      advance(1);
      t.kind = Tok::string;
      t.text = std::move(s);
      return t;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '-' || c == '+') {
      size_t end = pos;
      if (src[end] == '-' || src[end] == '+') ++end;
      bool any = false;
      while (end < src.size() &&
             (std::isdigit(static_cast<unsigned char>(src[end])) || src[end] == '.' ||
              src[end] == 'e' || src[end] == 'E' ||
              ((src[end] == '-' || src[end] == '+') &&
               (src[end - 1] == 'e' || src[end - 1] == 'E')))) {
        any = true;
        ++end;
      }
      if (!any) throw PaqlError("unexpected character", t.line, t.col);
      const std::string text = src.substr(pos, end - pos);
      double v = 0.0;
      const auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
      if (ec != std::errc{} || p != text.data() + text.size())
        throw PaqlError("malformed number: " + text, t.line, t.col);
      advance(end - pos);
      t.kind = Tok::number;
      t.text = text;
      t.value = v;
      return t;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      size_t end = pos;
      while (end < src.size() && (std::isalnum(static_cast<unsigned char>(src[end])) ||
                                  src[end] == '_'))
        ++end;
      t.kind = Tok::ident;
      t.text = src.substr(pos, end - pos);
      t.upper = t.text;
      std::transform(t.upper.begin(), t.upper.end(), t.upper.begin(),
                     [](unsigned char ch) { return std::toupper(ch); });
      advance(end - pos);
      return t;
    }
    throw PaqlError("unexpected character", t.line, t.col);
  }
};

struct Parser {
  std::vector<Token> toks;
  size_t at = 0;
  PackageQuery q;

  explicit Parser(const std::string& text) {
    Lexer lex(text);
    while (true) {
      Token t = lex.next();
      const bool end = t.kind == Tok::end;
      toks.push_back(std::move(t));
      if (end) break;
    }
  }

  const Token& peek(size_t ahead = 0) const {
    return toks[std::min(at + ahead, toks.size() - 1)];
  }
  const Token& get() { return toks[std::min(at++, toks.size() - 1)]; }

  [[noreturn]] void fail(const std::string& msg, const Token& t) const {
    throw PaqlError(msg, t.line, t.col);
  }

  bool is_kw(const Token& t, const char* kw) const {
    return t.kind == Tok::ident && t.upper == kw;
  }
  void expect_kw(const char* kw) {
    const Token& t = get();
    if (!is_kw(t, kw)) fail(std::string("expected ") + kw, t);
  }
  void expect_sym(const char* s) {
    const Token& t = get();
    if (t.kind != Tok::symbol || t.text != s) fail(std::string("expected '") + s + "'", t);
  }
  std::string expect_ident() {
    const Token& t = get();
    if (t.kind != Tok::ident) fail("expected identifier", t);
    return t.text;
  }
  double expect_number() {
    const Token& t = get();
    if (t.kind != Tok::number) fail("expected number", t);
    return t.value;
  }

  bool is_cmp(const Token& t) const {
    return t.kind == Tok::symbol &&
           (t.text == "=" || t.text == "<=" || t.text == ">=" || t.text == "<" ||
            t.text == ">");
  }
  std::string expect_cmp() {
    const Token& t = get();
    if (!is_cmp(t)) fail("expected comparison operator", t);
    if (t.text == "<" || t.text == ">")
      fail("strict comparisons are not part of the PaQL subset; use <= or >=", t);
    return t.text;
  }

  // COUNT(alias.*) | SUM(alias.attr) | AVG(alias.attr)
  std::pair<AggKind, std::string> parse_agg() {
    const Token& t = get();
    AggKind kind;
    if (is_kw(t, "COUNT"))
      kind = AggKind::count;
    else if (is_kw(t, "SUM"))
      kind = AggKind::sum;
    else if (is_kw(t, "AVG"))
      kind = AggKind::avg;
    else
      fail("expected COUNT, SUM or AVG", t);
    expect_sym("(");
    const std::string alias = expect_ident();
    if (alias != q.package_alias) fail("unknown package alias: " + alias, peek());
    expect_sym(".");
    std::string attr;
    if (kind == AggKind::count) {
      expect_sym("*");
    } else {
      attr = expect_ident();
    }
    expect_sym(")");
    return {kind, attr};
  }

  GlobalConstraint parse_constraint() {
    GlobalConstraint gc;
    if (peek().kind == Tok::number) {
      // Chained form: a <= AGG [<= b]
      const double a = expect_number();
      const std::string op = expect_cmp();
      auto [kind, attr] = parse_agg();
      gc.kind = kind;
      gc.attr = attr;
      if (op == "<=")
        gc.lower = a;
      else if (op == ">=")
        gc.upper = a;
      else
        gc.lower = gc.upper = a;
      if (is_cmp(peek())) {
        const std::string op2 = expect_cmp();
        const double b = expect_number();
        if (op2 == "<=")
          gc.upper = b;
        else if (op2 == ">=")
          gc.lower = b;
        else
          gc.lower = gc.upper = b;
      }
      return gc;
    }
    auto [kind, attr] = parse_agg();
    gc.kind = kind;
    gc.attr = attr;
    if (is_kw(peek(), "BETWEEN")) {
      get();
      gc.lower = expect_number();
      expect_kw("AND");
      gc.upper = expect_number();
      return gc;
    }
    const std::string op = expect_cmp();
    const double v = expect_number();
    if (op == "<=")
      gc.upper = v;
    else if (op == ">=")
      gc.lower = v;
    else
      gc.lower = gc.upper = v;
    return gc;
  }

  PackageQuery parse() {
    expect_kw("SELECT");
    expect_kw("PACKAGE");
    expect_sym("(");
    expect_sym("*");
    expect_sym(")");
    expect_kw("AS");
    q.package_alias = expect_ident();
    expect_kw("FROM");
    q.table = expect_ident();
    if (peek().kind == Tok::ident && peek().upper != "REPEAT" && peek().upper != "WHERE" &&
        peek().upper != "SUCH")
      get();  // optional relation alias
    if (is_kw(peek(), "REPEAT")) {
      get();
      const double r = expect_number();
      if (r < 0 || r != std::floor(r)) fail("REPEAT needs a non-negative integer", peek());
      q.repeat = static_cast<int64_t>(r);
    }
    if (is_kw(peek(), "WHERE")) {
      get();
      while (true) {
        LocalPredicate p;
        p.attr = expect_ident();
        if (peek().kind == Tok::symbol && peek().text == ".") {
          get();
          p.attr = expect_ident();  // qualified name; keep the column part
        }
        const Token& op = get();
        if (op.kind != Tok::symbol || !std::strchr("=<>", op.text[0]))
          fail("expected comparison in WHERE predicate", op);
        p.op = op.text;
        const Token& v = get();
        if (v.kind == Tok::number)
          p.value_text = v.text;
        else if (v.kind == Tok::string)
          p.value_text = "'" + v.text + "'";
        else
          fail("expected literal in WHERE predicate", v);
        q.where.push_back(std::move(p));
        if (is_kw(peek(), "AND")) {
          get();
          continue;
        }
        break;
      }
    }
    expect_kw("SUCH");
    expect_kw("THAT");
    while (true) {
      q.constraints.push_back(parse_constraint());
      if (is_kw(peek(), "AND")) {
        get();
        continue;
      }
      if (is_kw(peek(), "MAXIMIZE") || is_kw(peek(), "MINIMIZE") || peek().kind == Tok::end)
        break;
      // Adjacent constraints without AND (newline-separated listings).
    }
    const Token& obj = get();
    if (is_kw(obj, "MAXIMIZE"))
      q.sense = Sense::maximize;
    else if (is_kw(obj, "MINIMIZE"))
      q.sense = Sense::minimize;
    else
      fail("expected MAXIMIZE or MINIMIZE", obj);
    expect_kw("SUM");
    expect_sym("(");
    const std::string alias = expect_ident();
    if (alias != q.package_alias) fail("unknown package alias: " + alias, peek());
    expect_sym(".");
    q.objective_attr = expect_ident();
    expect_sym(")");
    if (peek().kind != Tok::end) fail("trailing input after objective", peek());
    return std::move(q);
  }
};

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string agg_text(const GlobalConstraint& gc, const std::string& alias) {
  switch (gc.kind) {
    case AggKind::count: return "COUNT(" + alias + ".*)";
    case AggKind::sum: return "SUM(" + alias + "." + gc.attr + ")";
    case AggKind::avg: return "AVG(" + alias + "." + gc.attr + ")";
  }
  return "";
}

}  // namespace

PackageQuery parse_paql(const std::string& text) { return Parser(text).parse(); }

std::string to_paql(const PackageQuery& q) {
  std::string out = "SELECT PACKAGE(*) AS " + q.package_alias + "\nFROM " + q.table;
  if (q.repeat) out += " REPEAT " + std::to_string(*q.repeat);
  out += "\n";
  if (!q.where.empty()) {
    out += "WHERE ";
    for (size_t i = 0; i < q.where.size(); ++i) {
      if (i) out += " AND ";
      out += q.where[i].attr + " " + q.where[i].op + " " + q.where[i].value_text;
    }
    out += "\n";
  }
  out += "SUCH THAT ";
  for (size_t i = 0; i < q.constraints.size(); ++i) {
    const GlobalConstraint& gc = q.constraints[i];
    if (i) out += " AND ";
    const std::string agg = agg_text(gc, q.package_alias);
    const bool has_lo = gc.lower > -kInf, has_hi = gc.upper < kInf;
    if (has_lo && has_hi && gc.lower == gc.upper)
      out += agg + " = " + fmt(gc.lower);
    else if (has_lo && has_hi)
      out += agg + " BETWEEN " + fmt(gc.lower) + " AND " + fmt(gc.upper);
    else if (has_lo)
      out += agg + " >= " + fmt(gc.lower);
    else
      out += agg + " <= " + fmt(gc.upper);
  }
  out += "\n";
  out += (q.sense == Sense::maximize ? "MAXIMIZE" : "MINIMIZE");
  out += " SUM(" + q.package_alias + "." + q.objective_attr + ")\n";
  return out;
}

}  // namespace pqe
