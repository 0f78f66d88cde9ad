#pragma once

#include <iosfwd>
#include <string>

#include <json.hpp>

#include "perqwalk/attractors.hpp"
#include "perqwalk/grover3.hpp"
#include "perqwalk/percolation.hpp"
#include "perqwalk/walk.hpp"

namespace perqwalk {

// Walk spec JSON: target_degree (optional), coin preset or explicit blocks of
// [re, im] entry pairs, permutation preset or per-vertex kinds/slot arrays,
// variant tag. `validate` can be deferred so broken specs can be inspected.
WalkSpec walk_spec_from_json(const nlohmann::json& j, const StructureGraph& g,
                             bool validate = true);
WalkSpec load_walk_spec(const std::string& path, const StructureGraph& g, bool validate = true);
nlohmann::json walk_spec_to_json(const WalkSpec& w);

// Scheme spec: a kind name ("single_closed"), "full:p", or inline/loaded JSON
// like {"kind":"full","p":0.5} or an explicit configuration list.
PercolationScheme scheme_from_json(const nlohmann::json& j, const StructureGraph& g);
PercolationScheme parse_scheme_arg(const std::string& arg, const StructureGraph& g);
nlohmann::json scheme_to_json(const PercolationScheme& s, const StructureGraph& g);

nlohmann::json attractor_to_json(const Attractor& a);
nlohmann::json attractor_basis_to_json(const AttractorBasis& b);
AttractorBasis attractor_basis_from_json(const nlohmann::json& j);

nlohmann::json coloring_to_json(const EdgeColoring& c, const StateGraph& sg);

void write_text_file(const std::string& path, const std::string& content);
nlohmann::json load_json_file(const std::string& path);

}  // namespace perqwalk
