#pragma once

#include <fstream>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "selfsim/mealy.hpp"

namespace selfsim {

/// A named, validated machine plus its default (inverse-closed) generating set.
struct CatalogEntry {
  std::string name;
  MealyMachine machine;
  std::string description;
  std::vector<std::string> default_generators;  // state names

  std::vector<Word> generator_words() const {
    std::vector<Word> out;
    for (const auto& g : default_generators) out.push_back(machine.word({g}));
    return out;
  }
};

namespace detail {

inline MealyMachine make_machine(int d, std::vector<StateDef> states,
                                 std::vector<std::pair<std::string, std::string>> inverses,
                                 std::map<std::string, int> orders) {
  return MealyMachine(Alphabet{d}, std::move(states), std::move(inverses), std::move(orders));
}

inline std::vector<StateId> targets(const std::vector<std::string>& names,
                                    const std::map<std::string, StateId>& ids) {
  std::vector<StateId> out;
  out.reserve(names.size());
  for (const auto& n : names) {
    if (n == "id") {
      out.push_back(kIdentity);
    } else {
      auto it = ids.find(n);
      if (it == ids.end()) throw StructuralError("unknown transition target: " + n);
      out.push_back(it->second);
    }
  }
  return out;
}

}  // namespace detail

inline std::vector<std::string> catalog_names() {
  return {"G", "H", "grigorchuk", "grigorchuk-exp"};
}

/// Built-in machines. "G" is the 4-state (a, b, b^-1 plus the identity
/// sentinel) automaton over 8 letters generating a torsion group of
/// intermediate growth whose activity is exponential; "H" is the
/// bounded-activity relative with the same permutations and only the
/// depth-7 self-reference; the Grigorchuk pair are the classical 2-letter
/// automaton and its exponential-activity rewiring.
inline CatalogEntry load(const std::string& name) {
  if (name == "G") {
    std::map<std::string, StateId> ids{{"a", 0}, {"b", 1}, {"b-1", 2}};
    std::vector<StateDef> states;
    states.push_back({"a", Perm::parse("(34)(67)(58)", 8),
                      detail::targets({"a", "id", "id", "id", "id", "id", "id", "id"}, ids)});
    states.push_back({"b", Perm::parse("(123)(456)", 8),
                      detail::targets({"id", "id", "id", "id", "id", "id", "b", "b-1"}, ids)});
    states.push_back({"b-1", Perm::parse("(132)(465)", 8),
                      detail::targets({"id", "id", "id", "id", "id", "id", "b-1", "b"}, ids)});
    return {"G",
            detail::make_machine(8, std::move(states), {{"a", "a"}, {"b", "b-1"}},
                                 {{"a", 2}, {"b", 3}}),
            "4-state automaton on 8 letters; torsion, intermediate growth, exponential activity",
            {"a", "b", "b-1"}};
  }
  if (name == "H") {
    std::map<std::string, StateId> ids{{"a", 0}, {"b'", 1}, {"b'-1", 2}};
    std::vector<StateDef> states;
    states.push_back({"a", Perm::parse("(34)(67)(58)", 8),
                      detail::targets({"a", "id", "id", "id", "id", "id", "id", "id"}, ids)});
    states.push_back({"b'", Perm::parse("(123)(456)", 8),
                      detail::targets({"id", "id", "id", "id", "id", "id", "b'", "id"}, ids)});
    states.push_back({"b'-1", Perm::parse("(132)(465)", 8),
                      detail::targets({"id", "id", "id", "id", "id", "id", "b'-1", "id"}, ids)});
    return {"H",
            detail::make_machine(8, std::move(states), {{"a", "a"}, {"b'", "b'-1"}},
                                 {{"a", 2}, {"b'", 3}}),
            "bounded-activity relative of G: single depth recursion at letter 7",
            {"a", "b'", "b'-1"}};
  }
  if (name == "grigorchuk") {
    std::map<std::string, StateId> ids{{"a", 0}, {"b", 1}, {"c", 2}, {"d", 3}};
    std::vector<StateDef> states;
    states.push_back({"a", Perm::parse("(12)", 2), detail::targets({"id", "id"}, ids)});
    states.push_back({"b", Perm::parse("()", 2), detail::targets({"c", "a"}, ids)});
    states.push_back({"c", Perm::parse("()", 2), detail::targets({"d", "a"}, ids)});
    states.push_back({"d", Perm::parse("()", 2), detail::targets({"b", "id"}, ids)});
    return {"grigorchuk",
            detail::make_machine(2, std::move(states),
                                 {{"a", "a"}, {"b", "b"}, {"c", "c"}, {"d", "d"}},
                                 {{"a", 2}, {"b", 2}, {"c", 2}, {"d", 2}}),
            "first Grigorchuk group, classical bounded-activity automaton",
            {"a", "b", "c", "d"}};
  }
  if (name == "grigorchuk-exp") {
    std::map<std::string, StateId> ids{{"a'", 0}, {"b", 1}, {"c", 2}, {"d", 3}};
    std::vector<StateDef> states;
    states.push_back({"a'", Perm::parse("(12)", 2), detail::targets({"a'", "a'"}, ids)});
    states.push_back({"b", Perm::parse("()", 2), detail::targets({"c", "a'"}, ids)});
    states.push_back({"c", Perm::parse("()", 2), detail::targets({"d", "a'"}, ids)});
    states.push_back({"d", Perm::parse("()", 2), detail::targets({"b", "id"}, ids)});
    return {"grigorchuk-exp",
            detail::make_machine(2, std::move(states),
                                 {{"a'", "a'"}, {"b", "b"}, {"c", "c"}, {"d", "d"}},
                                 {{"a'", 2}, {"b", 2}, {"c", 2}, {"d", 2}}),
            "Grigorchuk automaton with a replaced by the exponential-activity a'",
            {"a'", "b", "c", "d"}};
  }
  throw StructuralError("unknown catalog entry: " + name +
                        " (known: G, H, grigorchuk, grigorchuk-exp)");
}

// ---------------------------------------------------------------------------
// JSON machine schema (field names are normative):
// {
//   "alphabet": d,
//   "states": [ { "name": str, "perm": cycles-or-image-list,
//                 "transitions": [state-name or "id", x d] } ],
//   "inverses": [ [name, name], ... ],
//   "orders": { name: int, ... }
// }
// ---------------------------------------------------------------------------

inline MealyMachine machine_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw StructuralError("machine JSON must be an object");
  if (!j.contains("alphabet") || !j["alphabet"].is_number_integer())
    throw StructuralError("machine JSON needs an integer \"alphabet\" field");
  int d = j["alphabet"].get<int>();
  if (!j.contains("states") || !j["states"].is_array())
    throw StructuralError("machine JSON needs a \"states\" array");

  std::map<std::string, StateId> ids;
  StateId next = 0;
  for (const auto& js : j["states"]) {
    if (!js.contains("name") || !js["name"].is_string())
      throw StructuralError("every state needs a string \"name\"");
    ids[js["name"].get<std::string>()] = next++;
  }

  std::vector<StateDef> states;
  for (const auto& js : j["states"]) {
    StateDef def;
    def.name = js["name"].get<std::string>();
    if (!js.contains("perm")) throw StructuralError("state " + def.name + " misses \"perm\"");
    if (js["perm"].is_string()) {
      def.perm = Perm::parse(js["perm"].get<std::string>(), d);
    } else if (js["perm"].is_array()) {
      def.perm = Perm::from_images(js["perm"].get<std::vector<int>>());
      if (def.perm.degree() != d)
        throw StructuralError("state " + def.name + ": image list length != alphabet");
    } else {
      throw StructuralError("state " + def.name + ": \"perm\" must be a cycle string or image list");
    }
    if (!js.contains("transitions") || !js["transitions"].is_array())
      throw StructuralError("state " + def.name + " misses \"transitions\"");
    std::vector<std::string> targets = js["transitions"].get<std::vector<std::string>>();
    def.transitions = detail::targets(targets, ids);
    states.push_back(std::move(def));
  }

  std::vector<std::pair<std::string, std::string>> inverses;
  if (j.contains("inverses")) {
    for (const auto& pair : j["inverses"]) {
      if (!pair.is_array() || pair.size() != 2)
        throw StructuralError("\"inverses\" entries must be [name, name] pairs");
      inverses.emplace_back(pair[0].get<std::string>(), pair[1].get<std::string>());
    }
  }

  std::map<std::string, int> orders;
  if (j.contains("orders")) {
    if (!j["orders"].is_object()) throw StructuralError("\"orders\" must be an object");
    for (auto it = j["orders"].begin(); it != j["orders"].end(); ++it)
      orders[it.key()] = it.value().get<int>();
  }

  return MealyMachine(Alphabet{d}, std::move(states), std::move(inverses), std::move(orders));
}

inline nlohmann::json machine_to_json(const MealyMachine& m) {
  nlohmann::json j;
  j["alphabet"] = m.alphabet();
  j["states"] = nlohmann::json::array();
  for (StateId s = 0; s < m.state_count(); ++s) {
    const StateDef& def = m.state(s);
    nlohmann::json js;
    js["name"] = def.name;
    js["perm"] = def.perm.to_string();
    auto trans = nlohmann::json::array();
    for (StateId t : def.transitions)
      trans.push_back(t == kIdentity ? std::string("id") : m.state(t).name);
    js["transitions"] = trans;
    j["states"].push_back(js);
  }
  auto inv = nlohmann::json::array();
  for (StateId s = 0; s < m.state_count(); ++s) {
    StateId t = m.inverse(s);
    if (t >= s) inv.push_back(nlohmann::json::array({m.state(s).name, m.state(t).name}));
  }
  j["inverses"] = inv;
  nlohmann::json orders = nlohmann::json::object();
  for (StateId s = 0; s < m.state_count(); ++s)
    if (m.torsion_order(s) != 0) orders[m.state(s).name] = m.torsion_order(s);
  j["orders"] = orders;
  return j;
}

inline CatalogEntry entry_from_json(const nlohmann::json& j, const std::string& fallback_name) {
  CatalogEntry e{j.value("name", fallback_name), machine_from_json(j),
                 j.value("description", std::string("user machine")),
                 {}};
  if (j.contains("generators")) {
    e.default_generators = j["generators"].get<std::vector<std::string>>();
    for (const auto& g : e.default_generators) e.machine.state_id(g);  // validate
  } else {
    for (StateId s = 0; s < e.machine.state_count(); ++s)
      e.default_generators.push_back(e.machine.state(s).name);
  }
  return e;
}

inline nlohmann::json entry_to_json(const CatalogEntry& e) {
  nlohmann::json j = machine_to_json(e.machine);
  j["name"] = e.name;
  j["description"] = e.description;
  j["generators"] = e.default_generators;
  return j;
}

inline CatalogEntry load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw StructuralError("cannot open machine file: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const std::exception& ex) {
    throw StructuralError("bad JSON in " + path + ": " + ex.what());
  }
  std::string base = path;
  if (auto slash = base.find_last_of('/'); slash != std::string::npos) base = base.substr(slash + 1);
  if (base.size() > 5 && base.substr(base.size() - 5) == ".json") base.resize(base.size() - 5);
  return entry_from_json(j, base);
}

/// Catalog name or a path to a machine JSON file.
inline CatalogEntry load_group(const std::string& selector) {
  for (const auto& n : catalog_names())
    if (n == selector) return load(selector);
  if (selector.find('/') != std::string::npos ||
      (selector.size() > 5 && selector.substr(selector.size() - 5) == ".json"))
    return load_json(selector);
  throw StructuralError("unknown group '" + selector +
                        "': not a catalog name and not a .json path");
}

}  // namespace selfsim
