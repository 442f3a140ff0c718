#include "sexpr.hpp"

#include <cctype>

namespace lamfin::detail {

namespace {

struct Reader {
  std::string_view s;
  size_t i = 0;
  int line = 1, col = 1;

  void advance() {
    if (s[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
    ++i;
  }

  void skip() {
    while (i < s.size()) {
      if (s[i] == ';' || s[i] == '#') {
        while (i < s.size() && s[i] != '\n') advance();
      } else if (std::isspace(static_cast<unsigned char>(s[i]))) {
        advance();
      } else {
        break;
      }
    }
  }

  SExpr read() {
    skip();
    SExpr e;
    e.pos = {line, col};
    if (i >= s.size()) throw ParseError(e.pos, "unexpected end of input");
    if (s[i] == ')') throw ParseError(e.pos, "unexpected ')'");
    if (s[i] == '(') {
      e.is_list = true;
      advance();
      for (;;) {
        skip();
        if (i >= s.size()) throw ParseError(e.pos, "unclosed '('");
        if (s[i] == ')') {
          advance();
          break;
        }
        e.list.push_back(read());
      }
      return e;
    }
    size_t j = i;
    while (i < s.size() && s[i] != '(' && s[i] != ')' && !std::isspace(static_cast<unsigned char>(s[i])))
      advance();
    e.atom = std::string(s.substr(j, i - j));
    return e;
  }
};

}  // namespace

SExpr read_sexpr(std::string_view text) {
  Reader r{text};
  SExpr e = r.read();
  r.skip();
  if (r.i != text.size()) throw ParseError({r.line, r.col}, "trailing input after s-expression");
  return e;
}

}  // namespace lamfin::detail
