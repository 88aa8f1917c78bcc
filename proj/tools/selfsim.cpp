// selfsim — command-line front end for computations in self-similar
// (automata) groups: tree actions, word reduction, identity/equality/order
// decisions, growth and activity measurements, Schreier graphs, and the
// built-in verification suite.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "selfsim/catalog.hpp"
#include "selfsim/checks.hpp"
#include "selfsim/decision.hpp"
#include "selfsim/growth.hpp"
#include "selfsim/mealy.hpp"
#include "selfsim/schreier.hpp"
#include "selfsim/words.hpp"

namespace {

using namespace selfsim;

struct Options {
  std::string group = "G";
  bool json = false;
  std::string csv_path;
  std::string out_path;
  int workers = 1;
  std::uint64_t budget = 1'000'000;
  std::uint64_t cap = 1ull << 20;
  int level = -1;
  int max_a = 16;
  int radius = 8;
  std::string format = "dot";
  std::string gens;
  std::vector<std::string> words;
  std::vector<std::string> checks;
};

void write_output(const std::string& path, const std::string& data) {
  if (path.empty()) {
    std::cout << data;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw StructuralError("cannot write to " + path);
  out << data;
}

std::vector<std::pair<std::string, Word>> pick_generators(const CatalogEntry& entry,
                                                          const std::string& spec) {
  std::vector<std::pair<std::string, Word>> out;
  if (spec.empty()) {
    for (const auto& name : entry.default_generators)
      out.emplace_back(name, entry.machine.word({name}));
    return out;
  }
  std::stringstream ss(spec);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.emplace_back(item, entry.machine.parse_word(item));
  if (out.empty()) throw StructuralError("empty generator list");
  return out;
}

int cmd_apply(const Options& opt, const CatalogEntry& entry) {
  if (opt.words.size() != 2) throw StructuralError("apply needs WORD and VERTEX arguments");
  const MealyMachine& m = entry.machine;
  Word w = m.parse_word(opt.words[0]);
  VertexWord v = parse_vertex(opt.words[1], m.alphabet());
  VertexWord image = apply(m, w, v);
  if (opt.json) {
    nlohmann::json j{{"word", m.word_name(w)}, {"vertex", vertex_name(v)},
                     {"image", vertex_name(image)}};
    std::cout << j.dump() << "\n";
  } else {
    std::cout << vertex_name(image) << "\n";
  }
  return 0;
}

int cmd_reduce(const Options& opt, const CatalogEntry& entry) {
  if (opt.words.size() != 1) throw StructuralError("reduce needs one WORD argument");
  const MealyMachine& m = entry.machine;
  Word w = m.parse_word(opt.words[0]);
  Word r = free_reduce(m, w);
  if (opt.json) {
    nlohmann::json j{{"input", m.word_name(w)}, {"reduced", m.word_name(r)},
                     {"length", r.size()}};
    std::cout << j.dump() << "\n";
  } else {
    std::cout << m.word_name(r) << "\n";
  }
  return 0;
}

int cmd_equal(const Options& opt, const CatalogEntry& entry) {
  if (opt.words.size() != 2) throw StructuralError("equal needs two WORD arguments");
  Engine engine(entry.machine, BisimBudget{opt.budget, 1'000'000});
  bool eq = engine.are_equal(entry.machine.parse_word(opt.words[0]),
                             entry.machine.parse_word(opt.words[1]));
  if (opt.json)
    std::cout << nlohmann::json{{"equal", eq}}.dump() << "\n";
  else
    std::cout << (eq ? "true" : "false") << "\n";
  return eq ? 0 : 1;
}

int cmd_order(const Options& opt, const CatalogEntry& entry) {
  if (opt.words.size() != 1) throw StructuralError("order needs one WORD argument");
  Engine engine(entry.machine, BisimBudget{opt.budget, 1'000'000});
  OrderResult r = engine.order(entry.machine.parse_word(opt.words[0]), opt.cap);
  if (opt.json) {
    nlohmann::json j;
    j["word"] = entry.machine.word_name(entry.machine.parse_word(opt.words[0]));
    switch (r.kind) {
      case OrderResult::Kind::finite:
        j["outcome"] = "finite";
        j["order"] = r.n;
        break;
      case OrderResult::Kind::exceeded_cap:
        j["outcome"] = "exceeded-cap";
        j["cap"] = opt.cap;
        break;
      case OrderResult::Kind::infinite:
        j["outcome"] = "infinite";
        j["witness"] = entry.machine.word_name(r.witness);
        break;
    }
    std::cout << j.dump() << "\n";
  } else {
    switch (r.kind) {
      case OrderResult::Kind::finite: std::cout << r.n << "\n"; break;
      case OrderResult::Kind::exceeded_cap:
        std::cout << "exceeded-cap (" << opt.cap << ")\n";
        break;
      case OrderResult::Kind::infinite:
        std::cout << "infinite (witness: " << entry.machine.word_name(r.witness) << ")\n";
        break;
    }
  }
  return r.is_finite() ? 0 : 1;
}

int cmd_ball(const Options& opt, const CatalogEntry& entry) {
  Engine engine(entry.machine, BisimBudget{opt.budget, 1'000'000});
  int level = opt.level > 0 ? opt.level : 3;
  GrowthReport r = ball_sizes(engine, entry.generator_words(), opt.radius, level);
  if (!opt.csv_path.empty()) write_output(opt.csv_path, r.to_csv());
  if (opt.json)
    std::cout << r.to_json().dump(2) << "\n";
  else if (opt.csv_path.empty())
    std::cout << r.to_csv();
  return 0;
}

int cmd_activity(const Options& opt, const CatalogEntry& entry) {
  if (opt.words.size() != 1) throw StructuralError("activity needs one WORD argument");
  Engine engine(entry.machine, BisimBudget{opt.budget, 1'000'000});
  Word w = entry.machine.parse_word(opt.words[0]);
  int levels = opt.level > 0 ? opt.level : 10;
  std::vector<std::uint64_t> values;
  for (int l = 0; l <= levels; ++l) values.push_back(activity_recursive(engine, w, l));
  std::ostringstream csv;
  for (int l = 0; l <= levels; ++l) csv << l << "," << values[l] << "\n";
  if (!opt.csv_path.empty()) write_output(opt.csv_path, csv.str());
  if (opt.json) {
    nlohmann::json j{{"word", entry.machine.word_name(w)}, {"values", values}};
    std::cout << j.dump() << "\n";
  } else if (opt.csv_path.empty()) {
    std::cout << csv.str();
  }
  return 0;
}

int cmd_classify(const Options& opt, const CatalogEntry& entry) {
  if (opt.words.size() != 1) throw StructuralError("classify needs one STATE argument");
  Engine engine(entry.machine, BisimBudget{opt.budget, 1'000'000});
  ActivityProfile p = classify_activity(engine, opt.words[0]);
  if (opt.json) {
    std::cout << p.to_json().dump() << "\n";
  } else {
    std::cout << p.state << ": " << p.class_name();
    if (p.cls == ActivityProfile::Class::exponential) std::cout << " lambda=" << p.lambda;
    if (p.cls == ActivityProfile::Class::polynomial) std::cout << " degree=" << p.degree;
    std::cout << "\n";
  }
  return 0;
}

int cmd_schreier(const Options& opt, const CatalogEntry& entry) {
  int level = opt.level >= 0 ? opt.level : 1;
  SchreierGraph g = build_schreier(entry.machine, pick_generators(entry, opt.gens), level);
  std::string data;
  if (opt.format == "dot") data = g.to_dot();
  else if (opt.format == "csv" || opt.format == "edge-csv") data = g.to_csv();
  else if (opt.format == "json") data = g.to_json().dump(2) + "\n";
  else throw StructuralError("unknown format '" + opt.format + "' (use dot, csv or json)");
  write_output(opt.out_path, data);
  return 0;
}

int cmd_verify(const Options& opt, const CatalogEntry& entry) {
  VerifyOptions vo;
  vo.contraction_max_a = opt.max_a;
  vo.order_cap = opt.cap;
  vo.budget = BisimBudget{opt.budget, 1'000'000};
  vo.workers = opt.workers;
  std::vector<CheckResult> results = run_checks(entry, opt.checks, vo);
  bool all = true;
  if (opt.json) {
    nlohmann::json j = nlohmann::json::array();
    for (const auto& r : results) {
      j.push_back({{"check", r.name}, {"passed", r.passed}, {"detail", r.detail}});
      all &= r.passed;
    }
    std::cout << j.dump(2) << "\n";
  } else {
    for (const auto& r : results) {
      std::cout << (r.passed ? "PASS" : "FAIL") << "  " << r.name << ": " << r.detail << "\n";
      all &= r.passed;
    }
    std::cout << (all ? "all checks passed" : "CHECKS FAILED") << " (group " << entry.name
              << ")\n";
  }
  return all ? 0 : 1;
}

int cmd_catalog(const Options& opt) {
  if (opt.json) {
    nlohmann::json j = nlohmann::json::array();
    for (const auto& name : catalog_names()) j.push_back(entry_to_json(load(name)));
    std::cout << j.dump(2) << "\n";
  } else {
    for (const auto& name : catalog_names()) {
      CatalogEntry e = load(name);
      std::cout << e.name << ": " << e.machine.state_count() << " states on "
                << e.machine.alphabet() << " letters; generators";
      for (const auto& g : e.default_generators) std::cout << " " << g;
      std::cout << "\n  " << e.description << "\n";
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  Options opt;
  CLI::App app{"computations in self-similar (automata) groups"};
  app.require_subcommand(1);
  app.fallthrough();

  app.add_option("-g,--group", opt.group, "catalog group or machine JSON path")
      ->envname("SELFSIM_GROUP");
  app.add_flag("--json", opt.json, "machine-readable JSON output");
  app.add_option("--csv", opt.csv_path, "write CSV to this path");
  app.add_option("--workers", opt.workers, "worker threads for the sweeps")
      ->check(CLI::PositiveNumber);
  app.add_option("--budget", opt.budget, "bisimulation node budget")
      ->check(CLI::PositiveNumber);
  app.add_option("--cap", opt.cap, "order search cap")->check(CLI::PositiveNumber);

  auto* apply_cmd = app.add_subcommand("apply", "apply a word to a tree vertex");
  apply_cmd->add_option("word", opt.words, "word, then vertex (letters, comma-separated)")
      ->expected(2);

  auto* reduce_cmd = app.add_subcommand("reduce", "free-product reduction of a word");
  reduce_cmd->add_option("word", opt.words)->expected(1);

  auto* equal_cmd = app.add_subcommand("equal", "decide equality of two words");
  equal_cmd->add_option("word", opt.words)->expected(2);

  auto* order_cmd = app.add_subcommand("order", "order of the element, verified");
  order_cmd->add_option("word", opt.words)->expected(1);

  auto* ball_cmd = app.add_subcommand("ball", "growth series b(0..n) with exact deduplication");
  ball_cmd->add_option("-n,--radius", opt.radius, "ball radius");
  ball_cmd->add_option("--level", opt.level, "deduplication fingerprint level (default 3)");

  auto* act_cmd = app.add_subcommand("activity", "activity counts act(0..L) of a word");
  act_cmd->add_option("word", opt.words)->expected(1);
  act_cmd->add_option("--level", opt.level, "maximum level (default 10)");

  auto* cls_cmd = app.add_subcommand("classify", "activity class of a state");
  cls_cmd->add_option("state", opt.words)->expected(1);

  auto* sch_cmd = app.add_subcommand("schreier", "Schreier graph of the generator action");
  sch_cmd->add_option("--level", opt.level, "tree level (default 1)");
  sch_cmd->add_option("--format", opt.format, "dot, csv or json");
  sch_cmd->add_option("--gens", opt.gens, "comma-separated generator words");
  sch_cmd->add_option("-o,--output", opt.out_path, "output path (default stdout)");

  auto* ver_cmd = app.add_subcommand("verify", "run the built-in verification checks");
  ver_cmd->add_option("--checks", opt.checks, "subset of checks, comma-separated")
      ->delimiter(',');
  ver_cmd->add_option("--max-a", opt.max_a, "contraction sweep a-length bound");

  auto* cat_cmd = app.add_subcommand("catalog", "list the built-in machines");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*cat_cmd) return cmd_catalog(opt);
    CatalogEntry entry = load_group(opt.group);
    if (*apply_cmd) return cmd_apply(opt, entry);
    if (*reduce_cmd) return cmd_reduce(opt, entry);
    if (*equal_cmd) return cmd_equal(opt, entry);
    if (*order_cmd) return cmd_order(opt, entry);
    if (*ball_cmd) return cmd_ball(opt, entry);
    if (*act_cmd) return cmd_activity(opt, entry);
    if (*cls_cmd) return cmd_classify(opt, entry);
    if (*sch_cmd) return cmd_schreier(opt, entry);
    if (*ver_cmd) return cmd_verify(opt, entry);
  } catch (const BudgetError& ex) {
    std::cerr << "budget exhausted: " << ex.what() << "\n";
    return 1;
  } catch (const StructuralError& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return 2;
  } catch (const Error& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return 1;
  }
  return 2;
}
