#include "lamfin/export.hpp"

#include <functional>
#include <sstream>
#include <stdexcept>

namespace lamfin {

using nlohmann::json;

Format parse_format(const std::string& s) {
  if (s == "text") return Format::Text;
  if (s == "json") return Format::Json;
  if (s == "dot") return Format::Dot;
  throw std::invalid_argument("unknown format '" + s + "' (text, json or dot)");
}

namespace {

json order_set(OrderSet s) { return s.elements(); }

OrderSet order_set_from(const json& j) {
  OrderSet s;
  for (const auto& x : j) s.insert(x.get<unsigned>());
  return s;
}

Rule rule_from(const std::string& s) {
  for (Rule r : {Rule::Br, Rule::Var, Rule::Lam, Rule::Con, Rule::App})
    if (s == to_string(r)) return r;
  throw std::invalid_argument("unknown rule '" + s + "'");
}

SubtermRef ref_from(const TermGraph& g, const json& j) {
  auto id = j.get<std::uint32_t>();
  if (id >= g.size()) throw std::invalid_argument("subterm id " + std::to_string(id) + " outside the graph");
  return SubtermRef{id};
}

Judgment judgment_from(const TermGraph& g, const json& j) {
  TypeEnv env;
  for (const auto& e : j.at("env")) {
    SubtermRef x = ref_from(g, e.at("var"));
    for (const auto& t : e.at("types")) env.add(x, parse_full_type(t.get<std::string>()));
  }
  FullType type = FullType::make(j.at("order").get<unsigned>(), order_set_from(j.at("flags")),
                                 order_set_from(j.at("markers")), parse_itype(j.at("itype").get<std::string>()));
  return Judgment{std::move(env), ref_from(g, j.at("subject").at("id")), type, j.at("counter").get<std::uint64_t>()};
}

std::string escape_dot(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out;
}

std::string line(const TermGraph& g, const Derivation& d) {
  const Judgment& j = d.conclusion;
  return j.env.str(&g) + " ⊢ " + g.print(j.subject) + " : " + j.type.str() + " ▷" + std::to_string(j.counter) +
         " (" + to_string(d.rule) + ")";
}

}  // namespace

json judgment_to_json(const TermGraph& g, const Judgment& j) {
  json env = json::array();
  for (const auto& [x, ts] : j.env.entries()) {
    json types = json::array();
    for (FullType t : ts) types.push_back(t.str());
    env.push_back({{"var", x.id}, {"name", g.node(x).name}, {"types", types}});
  }
  return {{"env", env},
          {"subject", {{"id", j.subject.id}, {"term", g.print(j.subject)}}},
          {"order", j.type.order()},
          {"flags", order_set(j.type.flags())},
          {"markers", order_set(j.type.markers())},
          {"itype", j.type.itype().str()},
          {"counter", j.counter}};
}

json derivation_to_json(const TermGraph& g, const Derivation& d) {
  json out = judgment_to_json(g, d.conclusion);
  out["rule"] = to_string(d.rule);
  json prem = json::array();
  for (const auto& p : d.premisses) prem.push_back(derivation_to_json(g, *p));
  out["premisses"] = prem;
  json flags = json::array();
  for (auto [n, c] : d.placed_flags) flags.push_back({n, c});
  out["placed_flags"] = flags;
  out["placed_markers"] = order_set(d.placed_markers);
  if (d.rule == Rule::Br) out["branch"] = d.branch;
  if (d.env_type) out["env_type"] = d.env_type->str();
  return out;
}

DerivationPtr derivation_from_json(const TermGraph& g, const json& j) {
  try {
    Derivation d{judgment_from(g, j), rule_from(j.at("rule").get<std::string>()), {}, {}, {}, 0, {}};
    for (const auto& p : j.at("premisses")) d.premisses.push_back(derivation_from_json(g, p));
    for (const auto& f : j.at("placed_flags"))
      d.placed_flags.emplace_back(f.at(0).get<unsigned>(), f.at(1).get<std::uint64_t>());
    d.placed_markers = order_set_from(j.at("placed_markers"));
    if (j.contains("branch")) d.branch = j.at("branch").get<unsigned>();
    if (j.contains("env_type")) d.env_type = parse_full_type(j.at("env_type").get<std::string>());
    return std::make_shared<Derivation>(std::move(d));
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("malformed derivation json: ") + e.what());
  }
}

std::string derivation_to_text(const TermGraph& g, const Derivation& d) {
  std::string out;
  std::function<void(const Derivation&, unsigned)> walk = [&](const Derivation& n, unsigned depth) {
    out += std::string(2 * depth, ' ') + line(g, n) + "\n";
    for (const auto& p : n.premisses) walk(*p, depth + 1);
  };
  walk(d, 0);
  return out;
}

std::string derivation_to_dot(const TermGraph& g, const Derivation& d) {
  std::ostringstream os;
  os << "digraph derivation {\n  node [shape=box, fontname=monospace];\n";
  std::size_t next = 0;
  std::function<std::size_t(const Derivation&)> walk = [&](const Derivation& n) {
    std::size_t id = next++;
    std::string placed;
    for (auto [k, c] : n.placed_flags) placed += " flag" + std::to_string(k) + "x" + std::to_string(c);
    if (!n.placed_markers.empty()) placed += " marker" + n.placed_markers.str();
    os << "  n" << id << " [label=\"" << escape_dot(line(g, n)) << (placed.empty() ? "" : "\\nplaced:" + escape_dot(placed))
       << "\"";
    if (!n.placed_markers.empty()) os << ", style=filled, fillcolor=lightblue";
    else if (!n.placed_flags.empty()) os << ", style=filled, fillcolor=khaki";
    os << "];\n";
    for (const auto& p : n.premisses) {
      std::size_t c = walk(*p);
      os << "  n" << id << " -> n" << c << ";\n";
    }
    return id;
  };
  walk(d);
  os << "}\n";
  return os.str();
}

std::string export_derivation(const TermGraph& g, const Derivation& d, Format f) {
  switch (f) {
    case Format::Text: return derivation_to_text(g, d);
    case Format::Json: return derivation_to_json(g, d).dump(2) + "\n";
    case Format::Dot: return derivation_to_dot(g, d);
  }
  return {};
}

json verdict_to_json(const TermGraph& g, const Verdict& v) {
  json out = {{"verdict", to_string(v.kind)},
              {"order", v.order},
              {"root_derivable", v.root_derivable},
              {"stats",
               {{"skeletons", v.stats.skeletons}, {"instances", v.stats.instances}, {"rounds", v.stats.rounds}}}};
  if (v.max_counter) out["max_counter"] = *v.max_counter;
  if (v.kind == Verdict::Kind::Finite) out["size_bound"] = v.size_bound ? json(*v.size_bound) : json(nullptr);
  if (v.witness)
    out["witness"] = {{"ancestor", v.witness->ancestor},
                      {"descendant", v.witness->descendant},
                      {"derivation", derivation_to_json(g, *v.witness->derivation)}};
  return out;
}

}  // namespace lamfin
