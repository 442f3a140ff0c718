#pragma once

#include <string>

#include "json.hpp"
#include "lamfin/derivation.hpp"
#include "lamfin/engine.hpp"

namespace lamfin {

enum class Format { Text, Json, Dot };

// Throws std::invalid_argument for anything but text, json and dot.
Format parse_format(const std::string& s);

nlohmann::json judgment_to_json(const TermGraph& g, const Judgment& j);
nlohmann::json derivation_to_json(const TermGraph& g, const Derivation& d);
// Rebuilds the tree as written, without re-deriving anything; run validate on
// the result to check it.  Throws std::invalid_argument on malformed input.
DerivationPtr derivation_from_json(const TermGraph& g, const nlohmann::json& j);

// One line per derivation node, premisses indented below their conclusion.
std::string derivation_to_text(const TermGraph& g, const Derivation& d);
// One graph node per derivation node; nodes placing flags or markers are
// filled.
std::string derivation_to_dot(const TermGraph& g, const Derivation& d);

std::string export_derivation(const TermGraph& g, const Derivation& d, Format f);

nlohmann::json verdict_to_json(const TermGraph& g, const Verdict& v);

}  // namespace lamfin
