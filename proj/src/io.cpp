#include "coalesce/io.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <set>
#include <stdexcept>

namespace coalesce {

namespace {

int parse_int(const char* first, const char* last, const char*& end, const std::string& what) {
  int value = 0;
  auto res = std::from_chars(first, last, value);
  if (res.ec != std::errc{}) throw std::invalid_argument("cannot read " + what);
  end = res.ptr;
  return value;
}

int whole_int(const std::string& text, const std::string& what) {
  const char* end = nullptr;
  int value = parse_int(text.data(), text.data() + text.size(), end, what);
  if (end != text.data() + text.size()) throw std::invalid_argument("cannot read " + what);
  return value;
}

}  // namespace

Rat json_number(const Json& v) {
  if (v.is_number_integer()) return Rat(v.get<long>());
  if (v.is_string()) return rat_parse(v.get<std::string>());
  throw std::invalid_argument("expected an integer or a \"p/q\" string");
}

Label parse_role_key(const std::string& text) {
  if (!text.empty() && text.front() == '[') {
    if (text.back() != ']') throw std::invalid_argument("bad role key \"" + text + "\"");
    const char* end = nullptr;
    const char* last = text.data() + text.size();
    const int a = parse_int(text.data() + 1, last, end, "role key \"" + text + "\"");
    if (end >= last || *end != ',')
      throw std::invalid_argument("bad role key \"" + text + "\"");
    const int b = parse_int(end + 1, last, end, "role key \"" + text + "\"");
    if (end != last - 1 || a >= b)
      throw std::invalid_argument("bad role key \"" + text + "\"");
    return Label::interval(a, b);
  }
  return Label::junction(whole_int(text, "role key \"" + text + "\""));
}

ModelSpec parse_model(const Json& j) {
  if (!j.is_object()) throw std::invalid_argument("model: expected an object");
  static const std::set<std::string> allowed = {"kind",    "T",          "window", "sources",
                                                "parameters", "edges",   "state"};
  for (const auto& item : j.items())
    if (!allowed.count(item.key()))
      throw std::invalid_argument("model: unknown key \"" + item.key() + "\"");

  ModelSpec spec;
  if (!j.contains("kind") || !j.at("kind").is_string())
    throw std::invalid_argument("model: \"kind\" must be a string");
  spec.kind = j.at("kind").get<std::string>();
  if (!j.contains("T") || !j.at("T").is_number_integer())
    throw std::invalid_argument("model: \"T\" must be an integer");
  spec.T = j.at("T").get<int>();

  if (!j.contains("sources") || !j.at("sources").is_array() || j.at("sources").empty())
    throw std::invalid_argument("model: \"sources\" must be a non-empty array");
  for (const Json& s : j.at("sources")) {
    if (!s.is_number_integer()) throw std::invalid_argument("model: sources must be integers");
    spec.sources.push_back(s.get<int>());
  }

  if (j.contains("parameters")) {
    if (!j.at("parameters").is_object())
      throw std::invalid_argument("model: \"parameters\" must be an object");
    for (const auto& item : j.at("parameters").items())
      spec.parameters[item.key()] = json_number(item.value());
  }

  if (j.contains("edges")) {
    if (spec.kind != "custom")
      throw std::invalid_argument("model: only custom models take \"edges\"");
    for (const Json& e : j.at("edges")) {
      if (!e.is_object() || !e.contains("from") || !e.contains("to") || !e.contains("weight") ||
          !e.at("from").is_array() || e.at("from").size() != 2)
        throw std::invalid_argument(
            "model: an edge needs \"from\": [space, time], \"to\": space, \"weight\"");
      ModelSpec::CustomEdge edge;
      edge.from_space = e.at("from").at(0).get<int>();
      edge.from_time = e.at("from").at(1).get<int>();
      edge.to_space = e.at("to").get<int>();
      edge.w = json_number(e.at("weight"));
      spec.custom_edges.push_back(std::move(edge));
    }
  }

  if (j.contains("window")) {
    const Json& w = j.at("window");
    if (!w.is_array() || w.size() != 2 || !w.at(0).is_number_integer() ||
        !w.at(1).is_number_integer())
      throw std::invalid_argument("model: \"window\" must be [lo, hi]");
    spec.window_lo = w.at(0).get<int>();
    spec.window_hi = w.at(1).get<int>();
  } else {
    // Snug default: everything a walker could reach.
    int lo = *std::min_element(spec.sources.begin(), spec.sources.end());
    int hi = *std::max_element(spec.sources.begin(), spec.sources.end());
    for (const auto& e : spec.custom_edges) {
      lo = std::min({lo, e.from_space, e.to_space});
      hi = std::max({hi, e.from_space, e.to_space});
    }
    spec.window_lo = lo - (spec.kind == "custom" ? 0 : spec.T);
    spec.window_hi = hi + (spec.kind == "custom" ? 0 : spec.T);
  }
  return spec;
}

StateSpec parse_state(const Json& j) {
  if (!j.is_object()) throw std::invalid_argument("state: expected an object");
  static const std::set<std::string> allowed = {"ghosts", "positions", "heirs", "signs", "boxes"};
  for (const auto& item : j.items())
    if (!allowed.count(item.key()))
      throw std::invalid_argument("state: unknown key \"" + item.key() + "\"");

  StateSpec out;
  if (!j.contains("ghosts") || !j.at("ghosts").is_array())
    throw std::invalid_argument("state: \"ghosts\" must be an array");
  for (const Json& g : j.at("ghosts")) {
    if (!g.is_number_integer()) throw std::invalid_argument("state: ghosts must be integers");
    out.ghosts.push_back(g.get<int>());
  }

  const int forms = int(j.contains("positions")) + int(j.contains("heirs")) +
                    int(j.contains("signs")) + int(j.contains("boxes"));
  if (forms != 1)
    throw std::invalid_argument(
        "state: need exactly one of \"positions\", \"heirs\", \"signs\", \"boxes\"");

  if (j.contains("positions")) {
    out.kind = StateSpec::Kind::Positions;
    if (!j.at("positions").is_object())
      throw std::invalid_argument("state: \"positions\" must be an object");
    for (const auto& item : j.at("positions").items()) {
      if (!item.value().is_number_integer())
        throw std::invalid_argument("state: positions must be integers");
      out.positions[parse_role_key(item.key())] = item.value().get<int>();
    }
  } else if (j.contains("heirs")) {
    out.kind = StateSpec::Kind::Heirs;
    if (!j.at("heirs").is_array())
      throw std::invalid_argument("state: \"heirs\" must be an array");
    for (const Json& y : j.at("heirs")) {
      if (!y.is_number_integer())
        throw std::invalid_argument("state: heir positions must be integers");
      out.heirs.push_back(y.get<int>());
    }
  } else if (j.contains("signs")) {
    out.kind = StateSpec::Kind::Signs;
    if (!j.at("signs").is_object())
      throw std::invalid_argument("state: \"signs\" must be an object");
    for (const auto& item : j.at("signs").items()) {
      const Label l = parse_role_key(item.key());
      if (!l.is_junction()) throw std::invalid_argument("state: signs take junction keys");
      if (!item.value().is_number_integer() ||
          (item.value().get<int>() != 1 && item.value().get<int>() != -1))
        throw std::invalid_argument("state: signs must be +1 or -1");
      out.signs[l.a] = item.value().get<int>();
    }
  } else {
    out.kind = StateSpec::Kind::Boxes;
    if (!j.at("boxes").is_object())
      throw std::invalid_argument("state: \"boxes\" must be an object");
    for (const auto& item : j.at("boxes").items()) {
      const Json& b = item.value();
      if (!b.is_array() || b.size() != 2)
        throw std::invalid_argument("state: a box is [lo, hi] (null = unbounded)");
      RoleBounds rb;
      if (!b.at(0).is_null()) rb.lo = b.at(0).get<int>();
      if (!b.at(1).is_null()) rb.hi = b.at(1).get<int>();
      out.boxes[parse_role_key(item.key())] = rb;
    }
  }
  return out;
}

Json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open " + path);
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw std::invalid_argument(path + ": " + e.what());
  }
}

}  // namespace coalesce
