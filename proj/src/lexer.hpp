#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "lamfin/term.hpp"

namespace lamfin::detail {

enum class Tok { Word, Lambda, Dot, LParen, RParen, LBracket, RBracket, Colon, Arrow, Equals, End };

struct Token {
  Tok kind;
  std::string text;
  SourcePos pos;
};

// Tokenizes one logical line (or a whole term); `#` starts a comment.
std::vector<Token> tokenize(std::string_view text, int first_line = 1);

class TokenStream {
public:
  explicit TokenStream(std::vector<Token> toks) : toks_(std::move(toks)) {}
  const Token& peek(size_t ahead = 0) const {
    size_t i = pos_ + ahead;
    return i < toks_.size() ? toks_[i] : toks_.back();
  }
  const Token& next() {
    const Token& t = peek();
    if (pos_ < toks_.size() - 1) ++pos_;
    return t;
  }
  bool at(Tok k) const { return peek().kind == k; }
  const Token& expect(Tok k, const char* what);
  bool done() const { return at(Tok::End); }

private:
  std::vector<Token> toks_;
  size_t pos_ = 0;
};

Sort parse_sort_tokens(TokenStream& ts);
RawPtr parse_raw_tokens(TokenStream& ts);

bool is_identifier(const std::string& w);

}  // namespace lamfin::detail
