#pragma once

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "lamfin/engine.hpp"
#include "lamfin/scheme.hpp"

namespace testing {

inline std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline std::string corpus_path(const std::string& name) { return std::string(LAMFIN_CORPUS) + "/" + name; }

inline lamfin::TermFile load_corpus(const std::string& name) { return lamfin::load_program(read_file(corpus_path(name))); }

struct ManifestEntry {
  std::string file;
  std::string expected;
  std::vector<std::size_t> sizes;
};

inline std::vector<ManifestEntry> manifest() {
  std::vector<ManifestEntry> out;
  for (const auto& e : nlohmann::json::parse(read_file(corpus_path("manifest.json"))))
    out.push_back({e.at("file"), e.at("expected"), e.at("sizes").get<std::vector<std::size_t>>()});
  return out;
}

// The alphabet of the worked examples: a of rank 1, b of rank 2, e of rank 0.
inline lamfin::Alphabet abe() {
  lamfin::Alphabet s;
  s.add("a", 1);
  s.add("b", 2);
  s.add("e", 0);
  return s;
}

inline lamfin::FullType ft(const std::string& s) { return lamfin::parse_full_type(s); }

// Full types of the worked examples.
inline lamfin::FullType rho1() { return ft("(1,{},{0},o)"); }
inline lamfin::FullType rho2() { return ft("(2,{},{0,1},o)"); }
inline lamfin::FullType tau_f() { return ft("(2,{1},{},{(1,{},{0},o)}->o)"); }
inline lamfin::FullType tau_m() { return ft("(2,{},{1},{(1,{},{0},o)}->o)"); }

inline lamfin::SubtermRef node(const lamfin::TermGraph& g, const std::string& printed) {
  auto r = g.find(printed);
  if (!r) throw std::runtime_error("no subterm printed as " + printed);
  return *r;
}

}  // namespace testing
