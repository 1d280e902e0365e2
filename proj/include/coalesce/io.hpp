#pragma once

#include <map>
#include <string>
#include <vector>

#include "json.hpp"

#include "coalesce/ghostfree.hpp"
#include "coalesce/labels.hpp"
#include "coalesce/rational.hpp"
#include "coalesce/spacetime.hpp"

namespace coalesce {

// Key order in files and outputs is meaningful, so keep it.
using Json = nlohmann::ordered_json;

// Accepts a plain integer or a "p/q" string.
Rat json_number(const Json& v);

// "[a,b]" for an interval, "g" for a junction.
Label parse_role_key(const std::string& text);

ModelSpec parse_model(const Json& j);

// A state file carries the ghost set plus exactly one of:
//   "positions": { role: space }         every role pinned
//   "heirs":     [space, ...]            heir positions in rank order
//   "signs":     { junction: +1/-1 }     sign pattern only
//   "boxes":     { role: [lo, hi] }      position ranges (null = unbounded)
struct StateSpec {
  enum class Kind { Positions, Heirs, Signs, Boxes };
  Kind kind = Kind::Positions;
  std::vector<int> ghosts;
  std::map<Label, int> positions;
  std::vector<int> heirs;
  std::map<int, int> signs;
  std::map<Label, RoleBounds> boxes;
};

StateSpec parse_state(const Json& j);

Json load_json(const std::string& path);

}  // namespace coalesce
