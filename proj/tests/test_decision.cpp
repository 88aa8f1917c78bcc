#include <random>

#include <catch2/catch_amalgamated.hpp>

#include "selfsim/catalog.hpp"
#include "selfsim/decision.hpp"

using namespace selfsim;

namespace {

Engine make_engine(const char* group = "G") {
  static std::map<std::string, CatalogEntry> entries;
  auto it = entries.find(group);
  if (it == entries.end()) it = entries.emplace(group, load(group)).first;
  return Engine(it->second.machine);
}

// the odometer: infinite order, the self-reference rule must catch it
MealyMachine odometer() {
  std::vector<StateDef> states;
  states.push_back({"t", Perm::parse("(12)", 2), {kIdentity, 0}});
  states.push_back({"t-1", Perm::parse("(12)", 2), {1, kIdentity}});
  return MealyMachine(Alphabet{2}, std::move(states), {{"t", "t-1"}}, {});
}

}  // namespace

TEST_CASE("is_identity: relations and non-relations") {
  Engine eng = make_engine();
  const MealyMachine& m = eng.machine();
  CHECK(eng.is_identity(Word{}));
  CHECK(eng.is_identity(m.parse_word("a^2")));
  CHECK(eng.is_identity(m.parse_word("b^3")));
  CHECK(eng.is_identity(m.parse_word("(ab)^16")));
  CHECK_FALSE(eng.is_identity(m.parse_word("(ab)^8")));
  CHECK_FALSE(eng.is_identity(m.parse_word("a")));
  CHECK_FALSE(eng.is_identity(m.parse_word("ab")));
}

TEST_CASE("is_identity agrees with the level action, with witnesses") {
  Engine eng = make_engine();
  const MealyMachine& m = eng.machine();
  std::mt19937 rng(2718);
  std::vector<Word> sample;
  enumerate_reduced(m, 3, [&](const Word& w) {
    if (rng() % 3 == 0) sample.push_back(w);
  });
  sample.push_back(m.parse_word("(ab)^16"));
  sample.push_back(m.parse_word("(ab)^8"));
  sample.push_back(m.parse_word("abab-1aabab-1a"));  // reduces toward a relation
  for (const Word& w : sample) {
    if (eng.is_identity(w)) {
      for (int trial = 0; trial < 25; ++trial) {
        VertexWord v;
        int level = static_cast<int>(rng() % 5);
        for (int t = 0; t < level; ++t) v.push_back(static_cast<int>(rng() % 8) + 1);
        CHECK(apply(m, w, v) == v);
      }
    } else {
      VertexWord v = eng.nontrivial_witness(w);
      CHECK(apply(m, w, v) != v);
    }
  }
  CHECK_THROWS_AS(make_engine().nontrivial_witness(Word{}), StructuralError);
}

TEST_CASE("are_equal") {
  Engine eng = make_engine();
  const MealyMachine& m = eng.machine();
  CHECK(eng.are_equal(m.parse_word("bb"), m.parse_word("b-1")));
  CHECK_FALSE(eng.are_equal(m.parse_word("a"), m.parse_word("b")));
  // both exceptional eighth powers are involutions but differ from each other
  CHECK_FALSE(eng.are_equal(m.parse_word("(ba)^8"), m.parse_word("(ab)^8")));
  CHECK(eng.are_equal(m.parse_word("(ab)^8"), m.parse_word("(b-1a)^8")));

  // equivalence-relation spot checks
  Word u = m.parse_word("bb"), v = m.parse_word("b-1"), w = m.parse_word("b-1aa");
  CHECK(eng.are_equal(u, u));
  CHECK(eng.are_equal(u, v) == eng.are_equal(v, u));
  CHECK(eng.are_equal(u, v));
  CHECK(eng.are_equal(v, w));
  CHECK(eng.are_equal(u, w));
}

TEST_CASE("order: generators and the cross product") {
  Engine eng = make_engine();
  const MealyMachine& m = eng.machine();
  CHECK(eng.order(Word{}).n == 1);
  OrderResult a = eng.order(m.parse_word("a"));
  REQUIRE(a.is_finite());
  CHECK(a.n == 2);
  OrderResult b = eng.order(m.parse_word("b"));
  REQUIRE(b.is_finite());
  CHECK(b.n == 3);
  OrderResult ab = eng.order(m.parse_word("ab"));
  REQUIRE(ab.is_finite());
  CHECK(ab.n == 16);
}

TEST_CASE("order is minimal and conjugation-invariant on a sample") {
  Engine eng = make_engine();
  const MealyMachine& m = eng.machine();
  std::vector<Word> sample;
  int skip = 0;
  enumerate_reduced(m, 5, [&](const Word& w) {
    if (++skip % 2 == 0 && sample.size() < 100) sample.push_back(w);
  });
  REQUIRE(sample.size() == 100);
  std::vector<Word> conjugators{m.parse_word("a"), m.parse_word("ab"), m.parse_word("b-1a")};
  for (const Word& w : sample) {
    OrderResult r = eng.order(w);
    REQUIRE(r.is_finite());
    // external minimality re-check through the bisimulation oracle
    CHECK(eng.is_identity(word_pow(m, w, static_cast<long long>(r.n))));
    for (std::uint64_t p : prime_factors(r.n))
      CHECK_FALSE(eng.is_identity(word_pow(m, w, static_cast<long long>(r.n / p))));
    for (const Word& u : conjugators) {
      Word conj = invert(m, u) + w + u;
      OrderResult rc = eng.order(conj);
      REQUIRE(rc.is_finite());
      CHECK(rc.n == r.n);
    }
  }
}

TEST_CASE("order: infinite-order evidence on the odometer") {
  MealyMachine m = odometer();
  Engine eng(m);
  CHECK_FALSE(eng.is_identity(m.parse_word("t")));
  OrderResult r = eng.order(m.parse_word("t"));
  CHECK(r.kind == OrderResult::Kind::infinite);
  CHECK_FALSE(r.witness.empty());
  // t^2 is the odometer squared: still nontrivial, still infinite
  CHECK_FALSE(eng.is_identity(m.parse_word("t^2")));
  CHECK(eng.order(m.parse_word("t^2")).kind == OrderResult::Kind::infinite);
  CHECK(eng.order(m.parse_word("t t-1")).n == 1);
}

TEST_CASE("order: cap exceeded is reported, not miscomputed") {
  Engine eng = make_engine();
  const MealyMachine& m = eng.machine();
  OrderResult r = eng.order(m.parse_word("ab"), 8);
  CHECK(r.kind == OrderResult::Kind::exceeded_cap);
  // a fresh engine still gets the true order with a big enough cap
  Engine eng2 = make_engine();
  CHECK(eng2.order(m.parse_word("ab"), 16).n == 16);
}

TEST_CASE("budget errors are loud") {
  CatalogEntry e = load("G");
  {
    // room for the word itself and nothing else
    Engine eng(e.machine, BisimBudget{1, 1'000'000});
    CHECK_THROWS_AS(eng.is_identity(e.machine.parse_word("(ab)^16")), BudgetError);
  }
  {
    // (ab)^8 fixes level 1 and its sections carry a-letters
    Engine eng(e.machine, BisimBudget{1'000'000, 0});
    CHECK_THROWS_AS(eng.is_identity(e.machine.parse_word("(ab)^8")), BudgetError);
  }
}

TEST_CASE("caches only ever store verified facts") {
  Engine eng = make_engine();
  const MealyMachine& m = eng.machine();
  CHECK(eng.is_identity(m.parse_word("(ab)^16")));
  auto cached = eng.identity_cache_size();
  CHECK(cached > 0);
  CHECK(eng.is_identity(m.parse_word("(ab)^16")));  // served from cache
  CHECK(eng.identity_cache_size() == cached);
  CHECK_FALSE(eng.is_identity(m.parse_word("(ab)^8")));
  CHECK(eng.order(m.parse_word("ab")).n == 16);
  CHECK(eng.order_cache_size() > 0);
}

TEST_CASE("section map onto the generators from the vertex-1 stabilizer") {
  Engine eng = make_engine();
  SectionOntoReport r = verify_section_onto(eng);
  CHECK(r.passed());
  CHECK(r.computed_perm == "(264)(358)");
  REQUIRE(r.computed_sections.size() == 8);
  CHECK(r.computed_sections[0] == "b");
  CHECK(r.computed_sections[1] == "a b-1");
  CHECK(r.computed_sections[2] == "a");
  CHECK(r.computed_sections[3] == "b-1 a");
  CHECK(r.computed_sections[4] == "b-1");
  CHECK(r.computed_sections[5] == "b-1");  // reduces from b.b
  CHECK(r.computed_sections[6] == "b-1");
  CHECK(r.computed_sections[7] == "b a");
  CHECK(r.conj_cubed_trivial);
}

TEST_CASE("torsion sweep at a small radius") {
  Engine eng = make_engine();
  TorsionSweep s = verify_torsion_base(eng, 4, 1ull << 20);
  CHECK(s.report.words_checked == 3 + 9 * 15);
  CHECK(s.report.all_finite);
  CHECK(s.report.histogram.at(1) == 1);
  CHECK(s.report.histogram.count(2) == 1);
  CHECK(s.report.histogram.count(3) == 1);
  CHECK(s.report.histogram.count(16) == 1);
  CHECK(s.report.failures.empty());
  nlohmann::json j = s.report.to_json(eng.machine(), s.words, s.orders);
  CHECK(j["all_finite"] == true);
  CHECK(j["orders"]["a"] == 2);
  CHECK(j["orders"]["a b"] == 16);
}

TEST_CASE("full torsion base sweep: frozen histogram") {
  Engine eng = make_engine();
  TorsionSweep s = verify_torsion_base(eng, 8, 1ull << 20);
  CHECK(s.report.words_checked == 2298);
  CHECK(s.report.all_finite);
  CHECK(s.report.max_order == 1008);
  std::map<std::uint64_t, std::uint64_t> expect{
      {1, 1},    {2, 51},   {3, 92},   {4, 180},  {7, 30},   {8, 312},  {14, 60},
      {16, 264}, {21, 12},  {28, 84},  {42, 192}, {48, 240}, {49, 24},  {64, 96},
      {98, 96},  {112, 144}, {128, 84}, {294, 48}, {336, 246}, {1008, 42}};
  CHECK(s.report.histogram == expect);
}

TEST_CASE("contraction sweep: the tight bound holds up to a-length 8") {
  ContractionReport r = verify_contraction(load("G").machine, 8);
  CHECK(r.passed());
  CHECK(r.words_checked == 3 + 9 * 255);
  CHECK(r.max_excess == 8);  // equality at a-length 8, e.g. (ab)^8
  CHECK(r.max_ratio_num * 8 == r.max_ratio_den * 7);  // max ratio is exactly 7/8
}

TEST_CASE("contraction sweep to 16: the measured truth, frozen") {
  ContractionReport r = verify_contraction(load("G").machine, 16);
  CHECK(r.words_checked == 589818);
  CHECK_FALSE(r.passed());
  CHECK(r.violation_count == 54);
  CHECK(r.max_excess == 11);
  std::vector<std::int64_t> expect_per_a{0, 1, 2,  3,  4,  5,  6,  7, 8,
                                         9, 10, 11, -4, -3, -2, -1, 0};
  CHECK(r.max_excess_per_a == expect_per_a);
  CHECK(r.max_ratio_num == 10);
  CHECK(r.max_ratio_den == 11);
  CHECK(r.argmax_count == 9);
  // the shortest violators: no shorter representatives can exist at 17 letters
  REQUIRE_FALSE(r.violations.empty());
  CHECK(r.violations.front() == "a b-1 a b-1 a b-1 a b a b a b a b a b a");
  // the quoted worst-case template attains the maximum of its own a-class
  CHECK(r.worst_case_word == "a b a b a b a b a b a b a b a b-1 a b a b-1 a b-1 a b-1 a b-1 a b-1 a b-1 a b-1");
  CHECK(r.worst_case_a == 16);
  CHECK(r.worst_case_L == 14);
  CHECK(r.worst_case_attains_class_max);
  CHECK_FALSE(r.worst_case_attains_max);
}

TEST_CASE("contraction sweep is deterministic across worker counts") {
  ContractionReport r1 = verify_contraction(load("G").machine, 10, 1);
  ContractionReport r3 = verify_contraction(load("G").machine, 10, 3);
  CHECK(r1.words_checked == r3.words_checked);
  CHECK(r1.violation_count == r3.violation_count);
  CHECK(r1.max_excess_per_a == r3.max_excess_per_a);
  CHECK(r1.max_ratio_num == r3.max_ratio_num);
  CHECK(r1.max_ratio_den == r3.max_ratio_den);
  CHECK(r1.argmax == r3.argmax);
  CHECK(r1.violations == r3.violations);
  CHECK(r1.to_json() == r3.to_json());
}

TEST_CASE("Grigorchuk relations hold in both wirings") {
  for (const char* name : {"grigorchuk", "grigorchuk-exp"}) {
    CatalogEntry e = load(name);
    Engine eng(e.machine);
    const MealyMachine& m = e.machine;
    std::string a = std::string(name) == "grigorchuk-exp" ? "a'" : "a";
    for (const std::string& s : {a, std::string("b"), std::string("c"), std::string("d")}) {
      CHECK(eng.is_identity(m.word({s, s})));
      CHECK_FALSE(eng.is_identity(m.word({s})));
    }
    CHECK(eng.is_identity(m.word({"b", "c", "d"})));
    CHECK(eng.is_identity(m.word({"d", "b", "c"})));
    CHECK_FALSE(eng.is_identity(m.word({"b", "c"})));
    OrderResult r = eng.order(m.word({a, "b"}));
    REQUIRE(r.is_finite());
    CHECK(r.n == 16);  // classical: ab has order 16 in the Grigorchuk group
  }
}

TEST_CASE("prime factorization") {
  CHECK(prime_factors(1).empty());
  CHECK(prime_factors(16) == std::vector<std::uint64_t>{2});
  CHECK(prime_factors(1008) == std::vector<std::uint64_t>{2, 3, 7});
  CHECK(prime_factors(97) == std::vector<std::uint64_t>{97});
}
