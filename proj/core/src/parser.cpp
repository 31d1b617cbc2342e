#include "ctlcalc/parser.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <unordered_map>

namespace ctlcalc {

ParseError::ParseError(std::size_t l, std::size_t c, std::vector<std::string> exp, const std::string& message)
    : std::runtime_error(std::to_string(l) + ":" + std::to_string(c) + ": " + message),
      line(l),
      column(c),
      expected(std::move(exp)) {}

namespace {

struct Pos {
  std::size_t line = 1;
  std::size_t column = 1;
};

struct Token {
  enum Type { LParen, RParen, Atom, End } type;
  std::string text;
  Pos pos;
};

bool ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) != 0 || c == '_' || c == '\'' || c == '?' || c == '!' ||
         c == '*' || c == '+' || c == '-' || c == '.' || c == '#';
}

std::vector<Token> tokenize(std::string_view text) {
  std::vector<Token> out;
  Pos pos;
  std::size_t i = 0;
  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n; ++k, ++i) {
      if (text[i] == '\n') {
        ++pos.line;
        pos.column = 1;
      } else {
        ++pos.column;
      }
    }
  };
  while (i < text.size()) {
    const char c = text[i];
    if (c == ';') {
      while (i < text.size() && text[i] != '\n') advance(1);
    } else if (std::isspace(static_cast<unsigned char>(c)) != 0) {
      advance(1);
    } else if (c == '(') {
      out.push_back({Token::LParen, "(", pos});
      advance(1);
    } else if (c == ')') {
      out.push_back({Token::RParen, ")", pos});
      advance(1);
    } else if (ident_char(c)) {
      const Pos start = pos;
      std::size_t j = i;
      while (j < text.size() && ident_char(text[j])) ++j;
      out.push_back({Token::Atom, std::string(text.substr(i, j - i)), start});
      advance(j - i);
    } else {
      throw ParseError(pos.line, pos.column, {"(", ")", "identifier"},
                       std::string("unexpected character '") + c + "'");
    }
  }
  out.push_back({Token::End, "<end of input>", pos});
  return out;
}

const std::vector<std::string> kValueStarts = {"identifier", "()", "(pair", "(inj", "(thunk", "(nat"};
const std::vector<std::string> kCompHeads = {"pcase", "case",   "force", "return", "let",   "lam",   "app",
                                             "cpair", "prj",    "shift0", "dollar", "throw", "create",
                                             "resume", "yield", "op",    "handle", "ref",   "set!",  "get"};

class Parser {
 public:
  explicit Parser(std::string_view text) : toks_(tokenize(text)) {}

  Term phrase() {
    if (peek().type == Token::LParen && peek(1).type == Token::Atom && is_comp_head(peek(1).text)) {
      return computation();
    }
    return value();
  }

  void finish() {
    if (peek().type != Token::End) fail({"<end of input>"}, "trailing input");
  }

  std::unordered_map<const Node*, Pos> positions;

 private:
  std::vector<Token> toks_;
  std::size_t at_ = 0;

  static bool is_comp_head(const std::string& s) {
    return std::find(kCompHeads.begin(), kCompHeads.end(), s) != kCompHeads.end();
  }

  const Token& peek(std::size_t ahead = 0) const { return toks_[std::min(at_ + ahead, toks_.size() - 1)]; }
  const Token& next() {
    const Token& t = peek();
    if (at_ < toks_.size() - 1) ++at_;
    return t;
  }

  [[noreturn]] void fail(std::vector<std::string> expected, const std::string& what) const {
    const Token& t = peek();
    std::string msg = what + " at '" + t.text + "'; expected ";
    for (std::size_t i = 0; i < expected.size(); ++i) msg += (i ? " | " : "") + expected[i];
    throw ParseError(t.pos.line, t.pos.column, std::move(expected), msg);
  }

  void expect_close() {
    if (peek().type != Token::RParen) fail({")"}, "unexpected token");
    next();
  }
  void expect_open() {
    if (peek().type != Token::LParen) fail({"("}, "unexpected token");
    next();
  }

  std::string ident(const char* what) {
    const Token& t = peek();
    if (t.type != Token::Atom) fail({what}, "unexpected token");
    if (t.text[0] == '#') {
      throw ParseError(t.pos.line, t.pos.column, {}, "runtime label " + t.text + " cannot appear in source text");
    }
    return next().text;
  }

  Term note(Term t, Pos p) {
    positions.emplace(t.get(), p);
    return t;
  }

  Term value() {
    const Token& t = peek();
    const Pos p = t.pos;
    if (t.type == Token::Atom) return note(mk::var(ident("identifier")), p);
    if (t.type != Token::LParen) fail(kValueStarts, "expected a value");
    if (peek(1).type == Token::RParen) {
      next();
      next();
      return note(mk::unit(), p);
    }
    next();
    if (peek().type != Token::Atom) fail({"pair", "inj", "thunk", "nat"}, "expected a value head");
    const std::string head = next().text;
    Term out;
    if (head == "pair") {
      Term a = value();
      Term b = value();
      out = mk::pair(a, b);
    } else if (head == "inj") {
      std::string tag = ident("constructor tag");
      out = mk::inj(std::move(tag), value());
    } else if (head == "thunk") {
      out = mk::thunk(computation());
    } else if (head == "nat") {
      const Token& n = peek();
      std::uint64_t v = 0;
      auto [ptr, ec] = std::from_chars(n.text.data(), n.text.data() + n.text.size(), v);
      if (n.type != Token::Atom || ec != std::errc() || ptr != n.text.data() + n.text.size()) {
        fail({"natural number"}, "bad numeral");
      }
      next();
      out = mk::nat(v);
    } else if (head == "labeled") {
      throw ParseError(p.line, p.column, {}, "labeled computations are runtime-only");
    } else {
      at_ -= 1;
      fail({"pair", "inj", "thunk", "nat"}, "expected a value head");
    }
    expect_close();
    return note(out, p);
  }

  Handler handler() {
    expect_open();
    if (peek().type != Token::Atom || peek().text != "handler") fail({"handler"}, "unexpected token");
    next();
    expect_open();
    if (peek().type != Token::Atom || peek().text != "ret") fail({"ret"}, "unexpected token");
    next();
    Handler h;
    h.ret_binder = ident("binder");
    h.ret_body = computation();
    expect_close();
    while (peek().type == Token::LParen) {
      next();
      if (peek().type != Token::Atom || peek().text != "on") fail({"on"}, "unexpected token");
      next();
      OpClause c;
      c.op = ident("operation name");
      c.param = ident("binder");
      c.cont = ident("binder");
      c.body = computation();
      expect_close();
      h.ops.push_back(std::move(c));
    }
    expect_close();
    return h;
  }

  Term computation() {
    const Pos p = peek().pos;
    if (peek().type != Token::LParen) fail({"("}, "expected a computation");
    next();
    if (peek().type != Token::Atom) fail(kCompHeads, "expected a computation head");
    if (peek().text == "labeled") {
      throw ParseError(p.line, p.column, {}, "labeled computations are runtime-only");
    }
    if (!is_comp_head(peek().text)) fail(kCompHeads, "unknown computation head");
    const std::string head = next().text;
    Term out;
    if (head == "pcase") {
      Term v = value();
      expect_open();
      std::string a = ident("binder");
      std::string b = ident("binder");
      expect_close();
      out = mk::pcase(v, std::move(a), std::move(b), computation());
    } else if (head == "case") {
      Term v = value();
      std::vector<CaseClause> clauses;
      do {
        expect_open();
        CaseClause c;
        c.tag = ident("constructor tag");
        c.binder = ident("binder");
        c.body = computation();
        expect_close();
        clauses.push_back(std::move(c));
      } while (peek().type == Token::LParen);
      out = mk::scase(v, std::move(clauses));
    } else if (head == "force") {
      out = mk::force(value());
    } else if (head == "return") {
      out = mk::ret(value());
    } else if (head == "let") {
      std::string x = ident("binder");
      Term m = computation();
      out = mk::seq(std::move(x), m, computation());
    } else if (head == "lam") {
      std::string x = ident("binder");
      out = mk::lam(std::move(x), computation());
    } else if (head == "app") {
      Term m = computation();
      out = mk::app(m, value());
    } else if (head == "cpair") {
      Term m = computation();
      out = mk::cpair(m, computation());
    } else if (head == "prj") {
      const Token& i = peek();
      if (i.type != Token::Atom || (i.text != "1" && i.text != "2")) fail({"1", "2"}, "bad projection index");
      const std::uint64_t idx = next().text == "1" ? 1 : 2;
      out = mk::prj(idx, computation());
    } else if (head == "shift0") {
      std::string k = ident("binder");
      out = mk::shift0(std::move(k), computation());
    } else if (head == "dollar") {
      Term m = computation();
      std::string x = ident("binder");
      out = mk::dollar(m, std::move(x), computation());
    } else if (head == "throw") {
      Term v = value();
      out = mk::throw_(v, value());
    } else if (head == "create") {
      out = mk::create(value());
    } else if (head == "resume") {
      Term v = value();
      out = mk::resume(v, value());
    } else if (head == "yield") {
      out = mk::yield(value());
    } else if (head == "op") {
      std::string name = ident("operation name");
      out = mk::op_call(std::move(name), value());
    } else if (head == "handle") {
      Handler h = handler();
      out = mk::handle(std::move(h), computation());
    } else if (head == "ref") {
      out = mk::ref_create(value());
    } else if (head == "set!") {
      Term v = value();
      out = mk::ref_set(v, value());
    } else {
      out = mk::ref_get(value());
    }
    expect_close();
    return note(out, p);
  }
};

}  // namespace

Term parse_term(std::string_view text) {
  Parser parser(text);
  Term t = parser.phrase();
  parser.finish();
  return t;
}

Term parse_program(std::string_view text, Calculus c) {
  Parser parser(text);
  Term t = parser.phrase();
  parser.finish();
  if (auto v = check_calculus(t, c, true)) {
    Pos p;
    if (auto it = parser.positions.find(v->subterm.get()); it != parser.positions.end()) p = it->second;
    throw ParseError(p.line, p.column, {},
                     v->reason + " (" + v->constructor + ") in " + std::string(to_string(c)) + " program");
  }
  return t;
}

std::optional<Calculus> header_calculus(std::string_view text) {
  std::size_t i = 0;
  while (i < text.size()) {
    std::size_t eol = text.find('\n', i);
    if (eol == std::string_view::npos) eol = text.size();
    std::string_view line = text.substr(i, eol - i);
    const auto first = line.find_first_not_of(" \t\r");
    if (first != std::string_view::npos) {
      line = line.substr(first);
      if (line[0] != ';') return std::nullopt;
      line.remove_prefix(line.find_first_not_of(';'));
      const auto key = line.find("calculus:");
      if (key != std::string_view::npos) {
        std::string_view rest = line.substr(key + 9);
        const auto b = rest.find_first_not_of(" \t");
        if (b == std::string_view::npos) return std::nullopt;
        rest = rest.substr(b);
        const auto e = rest.find_first_of(" \t\r");
        return parse_calculus(rest.substr(0, e));
      }
    }
    i = eol + 1;
  }
  return std::nullopt;
}

SourceFile parse_source(std::string_view text, std::optional<Calculus> c) {
  if (!c) c = header_calculus(text);
  if (!c) throw ParseError(1, 1, {";; calculus: mam|del|ac|eff|ref"}, "no calculus given and no header found");
  return SourceFile{parse_program(text, *c), *c};
}

std::string print_program(const Term& t) {
  if (t.has_labels() || t.has_active()) {
    throw std::invalid_argument("cannot print a term containing runtime labels as a program");
  }
  return pretty(t);
}

}  // namespace ctlcalc
