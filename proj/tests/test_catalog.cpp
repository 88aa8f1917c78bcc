#include <cstdio>
#include <fstream>

#include <catch2/catch_amalgamated.hpp>

#include "selfsim/catalog.hpp"

using namespace selfsim;

TEST_CASE("catalog: G ships the defining data") {
  CatalogEntry e = load("G");
  const MealyMachine& m = e.machine;
  CHECK(m.alphabet() == 8);
  CHECK(m.state_count() == 3);
  CHECK(e.default_generators == std::vector<std::string>{"a", "b", "b-1"});

  const StateDef& b = m.state(m.state_id("b"));
  CHECK(b.perm == Perm::parse("(123)(456)", 8));
  CHECK(b.transitions[6] == m.state_id("b"));
  CHECK(b.transitions[7] == m.state_id("b-1"));
  for (int i = 0; i < 6; ++i) CHECK(b.transitions[i] == kIdentity);

  CHECK(m.inverse(m.state_id("a")) == m.state_id("a"));
  CHECK(m.inverse(m.state_id("b")) == m.state_id("b-1"));
  CHECK(m.torsion_order(m.state_id("a")) == 2);
  CHECK(m.torsion_order(m.state_id("b")) == 3);
  CHECK(m.torsion_order(m.state_id("b-1")) == 3);
}

TEST_CASE("catalog: H has the single depth recursion") {
  CatalogEntry e = load("H");
  const MealyMachine& m = e.machine;
  const StateDef& bp = m.state(m.state_id("b'"));
  CHECK(bp.perm == Perm::parse("(123)(456)", 8));
  CHECK(bp.transitions[6] == m.state_id("b'"));
  CHECK(bp.transitions[7] == kIdentity);  // slot 8 is id, unlike G
  const StateDef& a = m.state(m.state_id("a"));
  CHECK(a.perm == Perm::parse("(34)(67)(58)", 8));
}

TEST_CASE("catalog: the Grigorchuk pair") {
  CatalogEntry g = load("grigorchuk");
  const MealyMachine& m = g.machine;
  CHECK(m.alphabet() == 2);
  CHECK(m.state_count() == 4);
  const StateDef& d = m.state(m.state_id("d"));
  CHECK(d.transitions == std::vector<StateId>{m.state_id("b"), kIdentity});
  CHECK(m.state(m.state_id("a")).perm == Perm::parse("(12)", 2));
  CHECK(m.state(m.state_id("b")).perm.is_identity());

  CatalogEntry x = load("grigorchuk-exp");
  const MealyMachine& mx = x.machine;
  CHECK(mx.state(mx.state_id("a'")).transitions ==
        std::vector<StateId>{mx.state_id("a'"), mx.state_id("a'")});
  // b, c, d wired as before, with a replaced by a'
  CHECK(mx.state(mx.state_id("b")).transitions ==
        std::vector<StateId>{mx.state_id("c"), mx.state_id("a'")});
  CHECK(mx.state(mx.state_id("c")).transitions ==
        std::vector<StateId>{mx.state_id("d"), mx.state_id("a'")});
  CHECK(mx.state(mx.state_id("d")).transitions ==
        std::vector<StateId>{mx.state_id("b"), kIdentity});
}

TEST_CASE("unknown catalog name") {
  CHECK_THROWS_AS(load("nope"), StructuralError);
  CHECK_THROWS_AS(load_group("nope"), StructuralError);
}

TEST_CASE("machine JSON round-trips") {
  for (const auto& name : catalog_names()) {
    CatalogEntry e = load(name);
    nlohmann::json j = machine_to_json(e.machine);
    MealyMachine back = machine_from_json(j);
    CHECK(back == e.machine);
  }
}

TEST_CASE("entry JSON carries name, description and generators") {
  CatalogEntry e = load("G");
  nlohmann::json j = entry_to_json(e);
  CHECK(j["name"] == "G");
  CHECK(j["alphabet"] == 8);
  CHECK(j["generators"] == nlohmann::json({"a", "b", "b-1"}));
  CatalogEntry back = entry_from_json(j, "ignored");
  CHECK(back.name == "G");
  CHECK(back.machine == e.machine);
  CHECK(back.default_generators == e.default_generators);
}

TEST_CASE("load_json reads a machine file") {
  CatalogEntry e = load("G");
  std::string path = "test_machine_G.json";
  {
    std::ofstream out(path);
    out << entry_to_json(e).dump(2);
  }
  CatalogEntry back = load_json(path);
  CHECK(back.machine == e.machine);
  std::remove(path.c_str());

  CHECK_THROWS_AS(load_json("does_not_exist.json"), StructuralError);
}

TEST_CASE("a b-1 line contradicting the synthesized inverse is rejected") {
  nlohmann::json j = machine_to_json(load("G").machine);
  // corrupt the b-1 line: swap its transitions at 7 and 8
  for (auto& js : j["states"]) {
    if (js["name"] == "b-1") {
      js["transitions"][6] = "b";
      js["transitions"][7] = "b-1";
    }
  }
  try {
    machine_from_json(j);
    FAIL("expected an inverse-inconsistency error");
  } catch (const StructuralError& ex) {
    CHECK(std::string(ex.what()).find("inverse") != std::string::npos);
  }
}

TEST_CASE("non-bijective permutation in JSON is rejected") {
  nlohmann::json j = machine_to_json(load("G").machine);
  j["states"][0]["perm"] = nlohmann::json::array({1, 1, 3, 4, 5, 6, 7, 8});
  CHECK_THROWS_AS(machine_from_json(j), StructuralError);
}

TEST_CASE("schema violations carry diagnostics") {
  CHECK_THROWS_AS(machine_from_json(nlohmann::json::array()), StructuralError);
  nlohmann::json j;
  j["alphabet"] = 8;
  CHECK_THROWS_AS(machine_from_json(j), StructuralError);
  j["states"] = nlohmann::json::array();
  j["states"].push_back({{"name", "s"}, {"perm", "(12)"}});
  CHECK_THROWS_AS(machine_from_json(j), StructuralError);  // missing transitions
  j["states"][0]["transitions"] = {"id", "id", "id", "id", "id", "id", "id", "nope"};
  CHECK_THROWS_AS(machine_from_json(j), StructuralError);  // unknown target
}

TEST_CASE("load_group resolves names and paths") {
  CHECK(load_group("G").name == "G");
  CatalogEntry e = load("H");
  std::string path = "./test_load_group.json";
  {
    std::ofstream out(path);
    out << entry_to_json(e).dump();
  }
  CHECK(load_group(path).machine == e.machine);
  std::remove(path.c_str());
}
