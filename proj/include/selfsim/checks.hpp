#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "selfsim/catalog.hpp"
#include "selfsim/decision.hpp"
#include "selfsim/growth.hpp"
#include "selfsim/mealy.hpp"
#include "selfsim/schreier.hpp"
#include "selfsim/words.hpp"

namespace selfsim {

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct VerifyOptions {
  int contraction_max_a = 16;  // 12 is substituted automatically for H
  int torsion_max_a = 8;
  std::uint64_t order_cap = 1ull << 20;
  BisimBudget budget{};
  int growth_n = 12;
  int activity_levels = 20;
  int workers = 1;
};

/// Names of the checks defined for a catalog group, in run order.
inline std::vector<std::string> checks_for(const std::string& group) {
  if (group == "G")
    return {"defining-data", "figure1",       "relations", "key-identity", "sixteenth-power",
            "contraction",   "section-onto",  "activity",  "growth",       "torsion"};
  if (group == "H") return {"key-identity", "contraction", "activity"};
  if (group == "grigorchuk") return {"relations", "activity"};
  if (group == "grigorchuk-exp") return {"relations", "activity"};
  return {};
}

namespace checks_detail {

inline CheckResult result(std::string name, bool ok, std::string detail) {
  return {std::move(name), ok, std::move(detail)};
}

inline CheckResult defining_data(const CatalogEntry& entry) {
  const MealyMachine& m = entry.machine;
  bool ok = true;
  std::ostringstream why;
  auto expect_state = [&](const std::string& name, const std::string& perm,
                          const std::vector<std::string>& targets) {
    StateId s = m.state_id(name);
    const StateDef& def = m.state(s);
    if (def.perm != Perm::parse(perm, 8)) {
      ok = false;
      why << name << ": perm " << def.perm.to_string() << " != " << perm << "; ";
    }
    for (int i = 0; i < 8; ++i) {
      StateId t = def.transitions[i];
      std::string got = t == kIdentity ? "id" : m.state(t).name;
      if (got != targets[i]) {
        ok = false;
        why << name << ": transition " << (i + 1) << " is " << got << " != " << targets[i] << "; ";
      }
    }
  };
  expect_state("a", "(34)(67)(58)", {"a", "id", "id", "id", "id", "id", "id", "id"});
  expect_state("b", "(123)(456)", {"id", "id", "id", "id", "id", "id", "b", "b-1"});
  expect_state("b-1", "(132)(465)", {"id", "id", "id", "id", "id", "id", "b-1", "b"});

  StateDef synth = m.synthesize_inverse(m.state_id("b"));
  const StateDef& stored = m.state(m.state_id("b-1"));
  if (synth.perm != stored.perm || synth.transitions != stored.transitions) {
    ok = false;
    why << "synthesized inverse of b differs from the stored b-1 line; ";
  }
  return result("defining-data", ok,
                ok ? "machine data matches the defining recursion; b-1 equals the synthesized "
                     "inverse of b"
                   : why.str());
}

inline CheckResult figure1(const CatalogEntry& entry) {
  const MealyMachine& m = entry.machine;
  SchreierGraph g = build_schreier(
      m, {{"a", m.word({"a"})}, {"b", m.word({"b"})}}, 1);
  using Edge = std::pair<int, int>;
  auto edges_of = [&](std::size_t gen) {
    std::set<Edge> out;
    for (std::uint64_t v = 0; v < 8; ++v)
      out.insert({static_cast<int>(v) + 1, static_cast<int>(g.images[gen][v]) + 1});
    return out;
  };
  std::set<Edge> a_expect{{3, 4}, {4, 3}, {6, 7}, {7, 6}, {5, 8}, {8, 5}, {1, 1}, {2, 2}};
  std::set<Edge> b_expect{{1, 2}, {2, 3}, {3, 1}, {4, 5}, {5, 6}, {6, 4}, {7, 7}, {8, 8}};
  bool ok = edges_of(0) == a_expect && edges_of(1) == b_expect;
  return result("figure1", ok,
                ok ? "level-1 action graph: a swaps 3-4, 6-7, 5-8 with loops at 1, 2; "
                     "b cycles 1>2>3 and 4>5>6 with loops at 7, 8"
                   : "level-1 edge multiset differs from the defining permutations");
}

inline CheckResult relations(const CatalogEntry& entry, Engine& engine) {
  const MealyMachine& m = entry.machine;
  bool ok = true;
  std::ostringstream detail;
  if (entry.name == "G") {
    ok &= engine.is_identity(m.parse_word("a^2"));
    ok &= engine.is_identity(m.parse_word("b^3"));
    OrderResult oa = engine.order(m.parse_word("a"));
    OrderResult ob = engine.order(m.parse_word("b"));
    ok &= oa.is_finite() && oa.n == 2;
    ok &= ob.is_finite() && ob.n == 3;
    detail << "a^2 = b^3 = id; order(a) = 2, order(b) = 3";
  } else {
    // the Grigorchuk relations, with whatever the rooted state is called
    std::string a = entry.name == "grigorchuk-exp" ? "a'" : "a";
    for (std::string s : {a, std::string("b"), std::string("c"), std::string("d")})
      ok &= engine.is_identity(m.word({s, s}));
    ok &= engine.is_identity(m.word({"b", "c", "d"}));
    detail << a << "^2 = b^2 = c^2 = d^2 = bcd = id";
  }
  return result("relations", ok, ok ? detail.str() : "a declared relation failed");
}

inline CheckResult key_identity(const CatalogEntry& entry, Engine& engine) {
  const MealyMachine& m = entry.machine;
  const ShapeSystem sys = engine.shape_system();
  const char A = static_cast<char>(sys.invol);
  const char B = static_cast<char>(sys.rot_pos);
  const char Bi = static_cast<char>(sys.rot_neg);
  Word w{std::string{A, B, A, Bi, A}};

  bool ok = root_perm(m, w) == Perm::parse("(27)(35)(68)", 8);
  ok &= section(m, w, 1) == Word(std::string{A, A});  // slot 1 before reduction
  SectionProfile prof = section_profile(m, w, sys, engine.factor_table());
  std::vector<Word> expect;
  if (entry.name == "H") {
    expect = {Word{},                  Word{},               Word{},
              Word{std::string{A}},    Word{},               Word{std::string{B}},
              Word{},                  Word{std::string{Bi}}};
  } else {
    expect = {Word{},                  Word{},               Word{std::string{B}},
              Word{std::string{A}},    Word{std::string{Bi}}, Word{std::string{B}},
              Word{},                  Word{std::string{Bi}}};
  }
  ok &= prof.sections == expect;
  ok &= prof.L == 1;
  std::ostringstream detail;
  detail << m.word_compact(w) << " = <";
  for (Letter i = 1; i <= 8; ++i)
    detail << (i > 1 ? ", " : "") << m.word_compact(prof.sections[i - 1]);
  detail << "> " << root_perm(m, w).to_string() << ", L = " << prof.L
         << " (slot 1 cancels an " << m.state(sys.invol).name << "^2)";
  return result("key-identity", ok, ok ? detail.str() : "decomposition mismatch: " + detail.str());
}

inline CheckResult sixteenth_power(const CatalogEntry& entry, Engine& engine,
                                   const VerifyOptions& opts) {
  const MealyMachine& m = entry.machine;
  Word ab = m.parse_word("ab");
  bool id16 = engine.is_identity(word_pow(m, ab, 16));
  bool id8 = engine.is_identity(word_pow(m, ab, 8));
  OrderResult r = engine.order(ab, opts.order_cap);
  bool ok = id16 && !id8 && r.is_finite() && r.n == 16;
  std::ostringstream detail;
  detail << "(ab)^16 = id: " << (id16 ? "yes" : "NO") << "; (ab)^8 = id: "
         << (id8 ? "YES" : "no") << "; order(ab) = "
         << (r.is_finite() ? std::to_string(r.n) : std::string("not finite"));
  return result("sixteenth-power", ok, detail.str());
}

inline CheckResult contraction(const CatalogEntry& entry, const VerifyOptions& opts) {
  int max_a = entry.name == "H" ? std::min(opts.contraction_max_a, 12) : opts.contraction_max_a;
  ContractionReport r = verify_contraction(entry.machine, max_a, opts.workers);
  bool ok = r.passed();
  if (entry.name == "G" && max_a >= 16) ok &= r.worst_case_attains_max;
  std::ostringstream detail;
  detail << r.words_checked << " reduced words with a-length <= " << max_a << ", "
         << r.violation_count << " violations of L <= (7/8)|w|_a + 1; max (L-1)/|w|_a = "
         << r.max_ratio_num << "/" << r.max_ratio_den << " attained by " << r.argmax_count
         << " words; max excess 8L - 7|w|_a = " << r.max_excess
         << " (the tight bound would need <= 8, so L <= (7/8)|w|_a + " << r.max_excess
         << "/8 is what holds)";
  if (r.worst_case_L >= 0)
    detail << "; worst-case template has L = " << r.worst_case_L << " at a-length "
           << r.worst_case_a << " and "
           << (r.worst_case_attains_max ? "attains the global maximum"
                                        : (r.worst_case_attains_class_max
                                               ? "attains the maximum within its a-length only"
                                               : "misses even its a-length maximum"));
  return result("contraction", ok, detail.str());
}

inline CheckResult torsion(const CatalogEntry& entry, Engine& engine, const VerifyOptions& opts) {
  TorsionSweep sweep = verify_torsion_base(engine, opts.torsion_max_a, opts.order_cap,
                                           opts.workers);
  const TorsionReport& r = sweep.report;
  bool ok = r.passed();
  auto has = [&](const char* w, std::uint64_t n) {
    OrderResult res = engine.order(entry.machine.parse_word(w), opts.order_cap);
    return res.is_finite() && res.n == n;
  };
  ok &= has("a", 2) && has("b", 3) && has("ab", 16);
  std::ostringstream detail;
  detail << r.words_checked << " reduced words with a-length <= " << opts.torsion_max_a
         << (r.all_finite ? ", all of verified finite order" : ", UNRESOLVED words present")
         << "; max order " << r.max_order << "; orders of a, b, ab are 2, 3, 16; histogram:";
  for (auto [n, c] : r.histogram) detail << " " << n << "x" << c;
  return result("torsion", ok, detail.str());
}

inline CheckResult section_onto(Engine& engine) {
  SectionOntoReport r = verify_section_onto(engine);
  std::ostringstream detail;
  if (r.passed()) {
    detail << "a and (abab)^-1 b (abab) both fix vertex 1 with sections a and b; conjugate = <";
    for (std::size_t i = 0; i < r.computed_sections.size(); ++i)
      detail << (i ? ", " : "") << r.computed_sections[i];
    detail << "> " << r.computed_perm << " and cubes to id";
  } else {
    detail << "stabilizer section check failed: " << r.to_json().dump();
  }
  return result("section-onto", r.passed(), detail.str());
}

inline CheckResult activity(const CatalogEntry& entry, Engine& engine,
                            const VerifyOptions& opts) {
  const MealyMachine& m = entry.machine;
  bool ok = true;
  std::ostringstream detail;
  if (entry.name == "G") {
    Word b = m.word({"b"});
    for (int l = 1; l <= opts.activity_levels; ++l)
      ok &= activity_recursive(engine, b, l) == (1ull << l);
    for (int l = 0; l <= 6; ++l)
      ok &= activity_direct(engine, b, l) == activity_recursive(engine, b, l);
    ActivityProfile pb = classify_activity(engine, m.state_id("b"));
    ActivityProfile pa = classify_activity(engine, m.state_id("a"));
    ok &= pb.cls == ActivityProfile::Class::exponential && std::abs(pb.lambda - 2.0) < 1e-6;
    ok &= pa.cls == ActivityProfile::Class::bounded;
    detail << "act_b(l) = 2^l for l <= " << opts.activity_levels
           << " (cross-checked directly for l <= 6); b is exponential with rate "
           << pb.lambda << "; a is bounded";
  } else if (entry.name == "H") {
    ActivityProfile p = classify_activity(engine, m.state_id("b'"));
    ok &= p.cls == ActivityProfile::Class::bounded;
    detail << "b' is " << p.class_name();
  } else if (entry.name == "grigorchuk-exp") {
    ActivityProfile p = classify_activity(engine, m.state_id("a'"));
    ok &= p.cls == ActivityProfile::Class::exponential && std::abs(p.lambda - 2.0) < 1e-6;
    for (int l = 1; l <= 12; ++l)
      ok &= activity_recursive(engine, m.word({"a'"}), l) == (1ull << l);
    detail << "a' is " << p.class_name() << " with rate " << p.lambda << " and act(l) = 2^l";
  } else {
    for (StateId s = 0; s < m.state_count(); ++s) {
      ActivityProfile p = classify_activity(engine, s);
      ok &= p.cls == ActivityProfile::Class::bounded;
    }
    detail << "every state is bounded";
  }
  return result("activity", ok, ok ? detail.str() : "activity classification mismatch");
}

inline CheckResult growth(const CatalogEntry& entry, Engine& engine, const VerifyOptions& opts) {
  GrowthReport r = ball_sizes(engine, entry.generator_words(), opts.growth_n);
  bool ok = r.sizes.size() >= 11;
  ok &= r.sizes[0] == 1 && r.sizes[1] == 4 && r.sizes[2] == 8;
  for (std::size_t n = 1; n < r.sizes.size(); ++n) ok &= r.sizes[n] >= r.sizes[n - 1];
  for (std::size_t n = 0; n < r.sizes.size(); ++n)
    for (std::size_t k = 0; k + n < r.sizes.size(); ++k)
      ok &= r.sizes[n + k] <= r.sizes[n] * r.sizes[k];
  ok &= !r.fit.disclaimer.empty() && std::abs(r.fit.alpha_ref - 0.9396) < 1e-3;
  std::ostringstream detail;
  detail << "b(0.." << (r.sizes.size() - 1) << ") =";
  for (auto s : r.sizes) detail << " " << s;
  detail << "; monotone and submultiplicative; reference exponent " << r.fit.alpha_ref
         << ", fitted " << r.fit.alpha_lsq << " (descriptive only)";
  return result("growth", ok, detail.str());
}

}  // namespace checks_detail

/// Run the named checks (all known ones when `which` is empty) against a
/// catalog entry. Budget exhaustion inside a check fails that check; it never
/// passes silently.
inline std::vector<CheckResult> run_checks(const CatalogEntry& entry,
                                           std::vector<std::string> which,
                                           const VerifyOptions& opts = {}) {
  std::vector<std::string> known = checks_for(entry.name);
  if (known.empty())
    throw StructuralError("no verification checks are defined for group " + entry.name);
  if (which.empty()) which = known;
  for (const auto& w : which)
    if (std::find(known.begin(), known.end(), w) == known.end())
      throw StructuralError("unknown check '" + w + "' for group " + entry.name);

  Engine engine(entry.machine, opts.budget);
  std::vector<CheckResult> out;
  for (const auto& name : which) {
    try {
      if (name == "defining-data") out.push_back(checks_detail::defining_data(entry));
      else if (name == "figure1") out.push_back(checks_detail::figure1(entry));
      else if (name == "relations") out.push_back(checks_detail::relations(entry, engine));
      else if (name == "key-identity") out.push_back(checks_detail::key_identity(entry, engine));
      else if (name == "sixteenth-power")
        out.push_back(checks_detail::sixteenth_power(entry, engine, opts));
      else if (name == "contraction") out.push_back(checks_detail::contraction(entry, opts));
      else if (name == "torsion") out.push_back(checks_detail::torsion(entry, engine, opts));
      else if (name == "section-onto") out.push_back(checks_detail::section_onto(engine));
      else if (name == "activity") out.push_back(checks_detail::activity(entry, engine, opts));
      else if (name == "growth") out.push_back(checks_detail::growth(entry, engine, opts));
    } catch (const Error& ex) {
      out.push_back({name, false, std::string("error: ") + ex.what()});
    }
  }
  return out;
}

}  // namespace selfsim
