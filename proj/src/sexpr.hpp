#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "lamfin/term.hpp"

namespace lamfin::detail {

struct SExpr {
  std::string atom;
  std::vector<SExpr> list;
  bool is_list = false;
  SourcePos pos;
  bool is_atom() const { return !is_list; }
};

SExpr read_sexpr(std::string_view text);

}  // namespace lamfin::detail
