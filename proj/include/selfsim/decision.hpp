#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <map>
#include <numeric>
#include <string>
#include <thread>
#include <unordered_map>
#include <utility>
#include <vector>

#include <json.hpp>

#include "selfsim/mealy.hpp"
#include "selfsim/words.hpp"

namespace selfsim {

/// Explicit termination guard for the decision procedures. Contraction makes
/// the built-in machines terminate without it; user machines must fail loudly
/// instead of looping.
struct BisimBudget {
  std::size_t max_nodes = 1'000'000;  // distinct reduced words explorable per query
  std::size_t max_a_len = 1'000'000;  // cap on section a-length (letter length
                                      // for machines without the two-factor shape)
};

struct OrderResult {
  enum class Kind { finite, exceeded_cap, infinite };
  Kind kind = Kind::finite;
  std::uint64_t n = 0;   // set for finite
  Word witness;          // set for infinite: a word whose first-return loop multiplies up

  static OrderResult finite(std::uint64_t n) { return {Kind::finite, n, {}}; }
  static OrderResult exceeded() { return {Kind::exceeded_cap, 0, {}}; }
  static OrderResult infinite(Word w) { return {Kind::infinite, 0, std::move(w)}; }

  bool is_finite() const { return kind == Kind::finite; }
};

inline std::vector<std::uint64_t> prime_factors(std::uint64_t n) {
  std::vector<std::uint64_t> out;
  for (std::uint64_t p = 2; p * p <= n; ++p) {
    if (n % p == 0) {
      out.push_back(p);
      while (n % p == 0) n /= p;
    }
  }
  if (n > 1) out.push_back(n);
  return out;
}

/// Semantic decision procedures for one machine, with monotone fact caches.
/// Deterministic and single-threaded; use one Engine per thread.
class Engine {
 public:
  explicit Engine(const MealyMachine& m, BisimBudget budget = {})
      : m_(&m), budget_(budget), factors_(FactorTable::build(m)) {
    try {
      shape_ = ShapeSystem::find(m);
      has_shape_ = true;
    } catch (const StructuralError&) {
      has_shape_ = false;
    }
  }

  const MealyMachine& machine() const { return *m_; }
  const FactorTable& factor_table() const { return factors_; }
  const BisimBudget& budget() const { return budget_; }
  bool has_shape() const { return has_shape_; }
  const ShapeSystem& shape_system() const {
    if (!has_shape_) throw StructuralError("machine lacks the order-2 * order-3 structure");
    return shape_;
  }

  Word reduce(const Word& w) const { return free_reduce(*m_, w, factors_); }

  /// True iff w acts trivially on every level of the tree.
  ///
  /// Coinductive bisimulation: explore the closure of the reduced word under
  /// reduced sections, assuming everything in the closure trivial; the word
  /// is nontrivial exactly when some member of the closure has a nontrivial
  /// root permutation. On success the entire closure is a proven fact and is
  /// cached; on failure the offending chain is cached as nontrivial.
  /// Throws BudgetError instead of ever returning a wrong boolean.
  bool is_identity(const Word& w_in) {
    Word w = reduce(w_in);
    if (auto it = triv_.find(w); it != triv_.end()) return it->second;
    if (!root_perm(*m_, w).is_identity()) {
      triv_.emplace(std::move(w), false);
      return false;
    }
    std::vector<Word> nodes{w};
    std::unordered_map<Word, std::size_t> index{{w, 0}};
    std::vector<std::size_t> parent{0};
    const int d = m_->alphabet();
    for (std::size_t head = 0; head < nodes.size(); ++head) {
      for (Letter i = 1; i <= d; ++i) {
        Word s = reduce(section(*m_, nodes[head], i));
        check_growth(s);
        if (auto it = triv_.find(s); it != triv_.end()) {
          if (it->second) continue;
          return fail_chain(nodes, parent, head);
        }
        if (index.count(s)) continue;  // already assumed trivial in this closure
        if (!root_perm(*m_, s).is_identity()) {
          triv_.emplace(std::move(s), false);
          return fail_chain(nodes, parent, head);
        }
        if (nodes.size() >= budget_.max_nodes)
          throw BudgetError("is_identity: budget of " + std::to_string(budget_.max_nodes) +
                            " explored words exceeded");
        index.emplace(s, nodes.size());
        parent.push_back(head);
        nodes.push_back(std::move(s));
      }
    }
    for (auto& n : nodes) triv_.emplace(std::move(n), true);
    return true;
  }

  bool are_equal(const Word& u, const Word& v) {
    return is_identity(u + invert(*m_, v));
  }

  /// A vertex moved by w. Throws StructuralError when w is the identity.
  VertexWord nontrivial_witness(const Word& w_in) {
    Word w = reduce(w_in);
    struct Node {
      Word word;
      std::size_t parent;
      Letter via;
    };
    std::vector<Node> nodes{{w, 0, 0}};
    std::unordered_map<Word, std::size_t> index{{w, 0}};
    const int d = m_->alphabet();
    for (std::size_t head = 0; head < nodes.size(); ++head) {
      Perm p = root_perm(*m_, nodes[head].word);
      if (!p.is_identity()) {
        Letter moved = 1;
        while (p.apply(moved) == moved) ++moved;
        VertexWord v{moved};
        for (std::size_t k = head; k != 0; k = nodes[k].parent)
          v.insert(v.begin(), nodes[k].via);
        return v;
      }
      for (Letter i = 1; i <= d; ++i) {
        Word s = reduce(section(*m_, nodes[head].word, i));
        check_growth(s);
        if (index.count(s)) continue;
        if (nodes.size() >= budget_.max_nodes)
          throw BudgetError("nontrivial_witness: node budget exceeded");
        index.emplace(s, nodes.size());
        nodes.push_back({std::move(s), head, i});
      }
    }
    throw StructuralError("word acts trivially; no moved vertex exists");
  }

  /// Exact element order, computed by the first-return recursion over the
  /// cycles of the root permutation, then verified through is_identity:
  /// w^n must vanish and w^(n/p) must not, for every prime p | n. A failed
  /// verification falls back to direct search over multiples of the root
  /// permutation order up to the cap.
  OrderResult order(const Word& w_in, std::uint64_t cap = 1ull << 20) {
    if (cap < 1) throw StructuralError("order cap must be positive");
    Word w = reduce(w_in);
    stack_.clear();
    rec_nodes_ = 0;
    RecOut r = order_rec(w, cap, 1);
    switch (r.k) {
      case RecOut::kFinite:
        return OrderResult::finite(r.n);
      case RecOut::kInfinite:
        return OrderResult::infinite(r.witness);
      case RecOut::kExceeded:
        return OrderResult::exceeded();
      case RecOut::kSelfOne:
        break;  // unreachable at top level: the stack is empty
    }
    throw Error("order: unreachable recursion outcome");
  }

  std::size_t identity_cache_size() const { return triv_.size(); }
  std::size_t order_cache_size() const { return ord_.size(); }

 private:
  struct RecOut {
    enum K { kSelfOne, kFinite, kInfinite, kExceeded } k;
    std::uint64_t n = 0;
    Word witness;
  };

  void check_growth(const Word& s) const {
    std::size_t measure = has_shape_
                              ? static_cast<std::size_t>(a_length(*m_, s, shape_))
                              : s.size();
    if (measure > budget_.max_a_len)
      throw BudgetError("section growth exceeded max_a_len = " +
                        std::to_string(budget_.max_a_len));
  }

  bool fail_chain(std::vector<Word>& nodes, const std::vector<std::size_t>& parent,
                  std::size_t head) {
    // nodes[head] has a nontrivial descendant, hence so does its whole chain
    for (std::size_t k = head;; k = parent[k]) {
      triv_[nodes[k]] = false;
      if (k == 0) break;
    }
    return false;
  }

  /// Section of w^k at the cycle representative: the product of sections of
  /// w along the forward orbit of the letter. No power expansion needed.
  Word first_return(const Word& w, Letter rep, std::size_t k) const {
    Word out;
    int pos = rep - 1;
    for (std::size_t t = 0; t < k; ++t) {
      for (char c : w) {
        const StateDef& def = m_->state(m_->check_id(c));
        StateId tr = def.transitions[static_cast<std::size_t>(pos)];
        if (tr != kIdentity) out.push_back(static_cast<char>(tr));
        pos = def.perm.apply0(pos);
      }
    }
    return out;
  }

  RecOut order_rec(const Word& u, std::uint64_t cap, unsigned __int128 cum) {
    if (u.empty()) return {RecOut::kFinite, 1, {}};
    if (auto it = ord_.find(u); it != ord_.end()) {
      const OrderResult& c = it->second;
      return c.is_finite() ? RecOut{RecOut::kFinite, c.n, {}}
                           : RecOut{RecOut::kInfinite, 0, c.witness};
    }
    for (const auto& [word, entry_cum] : stack_) {
      if (word == u) {
        if (cum == entry_cum) return {RecOut::kSelfOne, 0, {}};
        ord_[u] = OrderResult::infinite(u);
        return {RecOut::kInfinite, 0, u};
      }
    }
    if (++rec_nodes_ > budget_.max_nodes)
      throw BudgetError("order: recursion node budget exceeded");
    if (stack_.size() > 4096) throw BudgetError("order: recursion too deep");
    stack_.emplace_back(u, cum);
    RecOut result{RecOut::kFinite, 1, {}};
    Perm sigma = root_perm(*m_, u);
    for (const auto& cycle : sigma.cycles(/*include_fixed=*/true)) {
      const auto k = static_cast<std::uint64_t>(cycle.size());
      Word p = reduce(first_return(u, cycle.front(), cycle.size()));
      check_growth(p);
      if (cum > (static_cast<unsigned __int128>(1) << 100))
        throw BudgetError("order: multiplier overflow in self-reference tracking");
      RecOut sub = order_rec(p, cap, cum * k);
      if (sub.k == RecOut::kSelfOne) continue;
      if (sub.k != RecOut::kFinite) {
        if (sub.k == RecOut::kInfinite) ord_[u] = OrderResult::infinite(sub.witness);
        result = sub;
        stack_.pop_back();
        return result;
      }
      unsigned __int128 contribution = static_cast<unsigned __int128>(k) * sub.n;
      if (contribution > cap) {
        stack_.pop_back();
        return {RecOut::kExceeded, 0, {}};
      }
      unsigned __int128 l = lcm128(result.n, static_cast<std::uint64_t>(contribution));
      if (l > cap) {
        stack_.pop_back();
        return {RecOut::kExceeded, 0, {}};
      }
      result.n = static_cast<std::uint64_t>(l);
    }
    stack_.pop_back();
    if (!verify_order(u, result.n)) {
      std::uint64_t found = 0;
      std::uint64_t step = sigma.order();
      for (std::uint64_t n = step; n <= cap; n += step) {
        if (is_identity(word_pow(*m_, u, static_cast<long long>(n)))) {
          found = n;
          break;
        }
      }
      if (found == 0) return {RecOut::kExceeded, 0, {}};
      result.n = found;
    }
    ord_[u] = OrderResult::finite(result.n);
    return result;
  }

  static unsigned __int128 lcm128(std::uint64_t a, std::uint64_t b) {
    std::uint64_t g = std::gcd(a, b);
    return static_cast<unsigned __int128>(a / g) * b;
  }

  bool verify_order(const Word& u, std::uint64_t n) {
    if (n == 0) return false;
    if (!is_identity(word_pow(*m_, u, static_cast<long long>(n)))) return false;
    for (std::uint64_t p : prime_factors(n))
      if (is_identity(word_pow(*m_, u, static_cast<long long>(n / p)))) return false;
    return true;
  }

  const MealyMachine* m_;
  BisimBudget budget_;
  FactorTable factors_;
  ShapeSystem shape_{};
  bool has_shape_ = false;
  std::unordered_map<Word, bool> triv_;
  std::unordered_map<Word, OrderResult> ord_;
  std::vector<std::pair<Word, unsigned __int128>> stack_;
  std::size_t rec_nodes_ = 0;
};

// ---------------------------------------------------------------------------
// Exhaustive verification sweeps.
// ---------------------------------------------------------------------------

/// Sweep of L(w) <= (7/8)|w|_a + 1 over all reduced words with a-length up
/// to max_a. Violation and ratio arithmetic is exact (integers/fractions).
struct ContractionReport {
  int max_a = 0;
  std::uint64_t words_checked = 0;
  std::vector<std::string> violations;  // first few, as display names
  std::uint64_t violation_count = 0;
  // max over words with a-length >= 1 of (L(w) - 1) / |w|_a, exact
  std::int64_t max_ratio_num = 0;
  std::int64_t max_ratio_den = 1;
  std::vector<std::string> argmax;  // first few maximizers, display names
  std::uint64_t argmax_count = 0;
  // max of 8L - 7a, overall and per a-length (8L - 7a <= 8 is the tight bound)
  std::int64_t max_excess = 0;
  std::vector<std::int64_t> max_excess_per_a;
  std::string worst_case_word;  // (ab)^7 ab^-1 ab (ab^-1)^7 in machine letters
  int worst_case_a = 0;
  int worst_case_L = -1;  // -1 when out of sweep range
  bool worst_case_attains_max = false;        // attains the global max of (L-1)/a
  bool worst_case_attains_class_max = false;  // attains the max excess within its a-length

  double max_ratio() const {
    return max_ratio_den == 0 ? 0.0
                              : static_cast<double>(max_ratio_num) /
                                    static_cast<double>(max_ratio_den);
  }
  bool passed() const { return violation_count == 0; }

  nlohmann::json to_json() const {
    nlohmann::json j;
    j["max_a"] = max_a;
    j["words_checked"] = words_checked;
    j["violations"] = violations;
    j["violation_count"] = violation_count;
    j["max_ratio"] = max_ratio();
    j["max_ratio_exact"] = std::to_string(max_ratio_num) + "/" + std::to_string(max_ratio_den);
    j["argmax"] = argmax;
    j["argmax_count"] = argmax_count;
    j["max_excess_8L_minus_7a"] = max_excess;
    j["max_excess_per_a"] = max_excess_per_a;
    j["worst_case_word"] = worst_case_word;
    j["worst_case_a"] = worst_case_a;
    j["worst_case_L"] = worst_case_L;
    j["worst_case_attains_max"] = worst_case_attains_max;
    j["worst_case_attains_class_max"] = worst_case_attains_class_max;
    return j;
  }
};

namespace detail {

struct ContractionPartial {
  std::vector<std::string> violations;
  std::uint64_t violation_count = 0;
  std::int64_t num = 0, den = 0;  // den == 0: nothing seen yet
  std::vector<std::string> argmax;
  std::uint64_t argmax_count = 0;
  std::uint64_t checked = 0;
  std::vector<std::int64_t> excess_per_a;
};

// exact compare of n1/d1 vs n2/d2 with positive denominators
inline int frac_cmp(std::int64_t n1, std::int64_t d1, std::int64_t n2, std::int64_t d2) {
  std::int64_t lhs = n1 * d2, rhs = n2 * d1;
  return lhs < rhs ? -1 : lhs > rhs ? 1 : 0;
}

inline void contraction_word(const MealyMachine& m, const ShapeSystem& sys,
                             const FactorTable& t, const Word& w, std::size_t keep,
                             ContractionPartial& out) {
  const int d = m.alphabet();
  ++out.checked;
  int a = a_length(m, w, sys);
  int L = 0;
  for (Letter i = 1; i <= d; ++i)
    L += a_length(m, free_reduce(m, section(m, w, i), t), sys);
  // exact: L <= (7/8) a + 1  <=>  8L <= 7a + 8
  if (8 * L > 7 * a + 8) {
    ++out.violation_count;
    if (out.violations.size() < keep) out.violations.push_back(m.word_name(w));
  }
  out.excess_per_a[a] = std::max<std::int64_t>(out.excess_per_a[a], 8 * L - 7 * a);
  if (a >= 1) {
    int c = out.den == 0 ? 1 : frac_cmp(L - 1, a, out.num, out.den);
    if (c > 0) {
      out.num = L - 1;
      out.den = a;
      out.argmax.clear();
      out.argmax_count = 0;
    }
    if (c >= 0) {
      ++out.argmax_count;
      if (out.argmax.size() < keep) out.argmax.push_back(m.word_name(w));
    }
  }
}

}  // namespace detail

inline ContractionReport verify_contraction(const MealyMachine& m, int max_a, int workers = 1,
                                            std::size_t keep = 64) {
  if (max_a < 1) throw StructuralError("max_a must be >= 1");
  const ShapeSystem sys = ShapeSystem::find(m);
  const FactorTable t = FactorTable::build(m);

  std::size_t w_count = workers < 1 ? 1 : static_cast<std::size_t>(workers);
  std::vector<detail::ContractionPartial> parts(w_count);
  for (auto& p : parts)
    p.excess_per_a.assign(max_a + 1, std::numeric_limits<std::int64_t>::min());
  if (w_count == 1) {
    // streaming: no materialization, so large sweeps are memory-flat
    enumerate_reduced(m, max_a,
                      [&](const Word& w) { detail::contraction_word(m, sys, t, w, keep, parts[0]); },
                      sys);
  } else {
    if (max_a > 22)
      throw StructuralError("parallel sweeps materialize the word list; max_a is capped at 22");
    std::vector<Word> words = enumerate_reduced(m, max_a);
    std::size_t n = words.size();
    if (w_count > n) w_count = n ? n : 1;
    parts.resize(w_count);
    std::vector<std::thread> threads;
    std::size_t chunk = (n + w_count - 1) / w_count;
    for (std::size_t k = 0; k < w_count; ++k) {
      std::size_t b = k * chunk, e = std::min(n, b + chunk);
      threads.emplace_back([&, b, e, k] {
        for (std::size_t idx = b; idx < e; ++idx)
          detail::contraction_word(m, sys, t, words[idx], keep, parts[k]);
      });
    }
    for (auto& th : threads) th.join();
  }

  ContractionReport r;
  r.max_a = max_a;
  r.max_excess_per_a.assign(max_a + 1, std::numeric_limits<std::int64_t>::min());
  for (const auto& p : parts) {
    r.words_checked += p.checked;
    r.violation_count += p.violation_count;
    for (const auto& v : p.violations)
      if (r.violations.size() < keep) r.violations.push_back(v);
    for (int a = 0; a <= max_a; ++a)
      r.max_excess_per_a[a] = std::max(r.max_excess_per_a[a], p.excess_per_a[a]);
    if (p.den == 0) continue;
    int c = (r.max_ratio_den == 0 || r.argmax_count == 0)
                ? 1
                : detail::frac_cmp(p.num, p.den, r.max_ratio_num, r.max_ratio_den);
    if (c > 0) {
      r.max_ratio_num = p.num;
      r.max_ratio_den = p.den;
      r.argmax.clear();
      r.argmax_count = 0;
      c = 0;
    }
    if (c == 0) {
      r.argmax_count += p.argmax_count;
      for (const auto& v : p.argmax)
        if (r.argmax.size() < keep) r.argmax.push_back(v);
    }
  }
  r.max_excess = *std::max_element(r.max_excess_per_a.begin(), r.max_excess_per_a.end());

  // the specific worst-case template (ab)^7 ab^-1 ab (ab^-1)^7
  NormalFormShape worst;
  worst.blocks = {{7, 1}, {1, 7}};
  Word wc = reconstruct(m, worst, sys);
  r.worst_case_word = m.word_name(wc);
  r.worst_case_a = a_length(m, wc, sys);
  if (r.worst_case_a <= max_a) {
    int a = r.worst_case_a;
    int L = section_profile(m, wc, sys, t).L;
    r.worst_case_L = L;
    r.worst_case_attains_max =
        r.argmax_count > 0 && detail::frac_cmp(L - 1, a, r.max_ratio_num, r.max_ratio_den) == 0;
    r.worst_case_attains_class_max = (8 * L - 7 * a) == r.max_excess_per_a[a];
  }
  return r;
}

/// Order of every reduced word with a-length <= max_a; the check succeeds
/// when each one is finite (and verified) under the cap.
struct TorsionReport {
  int max_a = 0;
  std::uint64_t words_checked = 0;
  std::map<std::uint64_t, std::uint64_t> histogram;  // order -> count of words
  std::vector<std::pair<std::string, std::string>> failures;  // word, reason
  std::uint64_t max_order = 0;
  bool all_finite = true;

  bool passed() const { return all_finite; }

  nlohmann::json to_json(const MealyMachine& m, const std::vector<Word>& words,
                         const std::vector<OrderResult>& orders) const {
    nlohmann::json j;
    j["max_a"] = max_a;
    j["words_checked"] = words_checked;
    nlohmann::json per_word = nlohmann::json::object();
    for (std::size_t k = 0; k < words.size(); ++k)
      if (orders[k].is_finite()) per_word[m.word_name(words[k])] = orders[k].n;
    j["orders"] = per_word;
    nlohmann::json hist = nlohmann::json::object();
    for (auto [n, c] : histogram) hist[std::to_string(n)] = c;
    j["histogram"] = hist;
    j["max_order"] = max_order;
    j["all_finite"] = all_finite;
    nlohmann::json fails = nlohmann::json::array();
    for (const auto& [word, reason] : failures)
      fails.push_back({{"word", word}, {"reason", reason}});
    j["failures"] = fails;
    return j;
  }
};

struct TorsionSweep {
  TorsionReport report;
  std::vector<Word> words;
  std::vector<OrderResult> orders;
};

inline TorsionSweep verify_torsion_base(Engine& engine, int max_a = 8,
                                        std::uint64_t cap = 1ull << 20, int workers = 1) {
  if (max_a > 22)
    throw StructuralError("torsion sweeps materialize the word list; max_a is capped at 22");
  const MealyMachine& m = engine.machine();
  TorsionSweep out;
  out.report.max_a = max_a;
  out.words = enumerate_reduced(m, max_a);
  out.orders.assign(out.words.size(), OrderResult::exceeded());

  auto run_range = [&](Engine& eng, std::size_t b, std::size_t e) {
    for (std::size_t k = b; k < e; ++k) {
      try {
        out.orders[k] = eng.order(out.words[k], cap);
      } catch (const BudgetError& ex) {
        out.orders[k] = OrderResult::exceeded();
        out.orders[k].witness = ex.what();  // reuse the field to carry the reason
      }
    }
  };

  std::size_t n = out.words.size();
  std::size_t w_count = workers < 1 ? 1 : static_cast<std::size_t>(workers);
  if (w_count > n) w_count = n ? n : 1;
  if (w_count == 1) {
    run_range(engine, 0, n);
  } else {
    std::vector<std::thread> threads;
    std::vector<Engine> engines;
    engines.reserve(w_count);
    for (std::size_t k = 0; k < w_count; ++k) engines.emplace_back(m, engine.budget());
    std::size_t chunk = (n + w_count - 1) / w_count;
    for (std::size_t k = 0; k < w_count; ++k) {
      std::size_t b = k * chunk, e = std::min(n, b + chunk);
      threads.emplace_back([&, b, e, k] { run_range(engines[k], b, e); });
    }
    for (auto& th : threads) th.join();
  }

  for (std::size_t k = 0; k < n; ++k) {
    ++out.report.words_checked;
    const OrderResult& r = out.orders[k];
    if (r.is_finite()) {
      ++out.report.histogram[r.n];
      out.report.max_order = std::max(out.report.max_order, r.n);
    } else {
      out.report.all_finite = false;
      std::string reason = r.kind == OrderResult::Kind::infinite
                               ? "infinite-order evidence: " + m.word_name(r.witness)
                               : (r.witness.empty() ? std::string("order cap exceeded")
                                                    : std::string(r.witness.begin(),
                                                                  r.witness.end()));
      out.report.failures.emplace_back(m.word_name(out.words[k]), reason);
    }
  }
  return out;
}

/// The stabilizer-of-vertex-1 section map hits both generators: a itself
/// fixes 1 with section a, and the conjugate (abab)^-1 b (abab) fixes 1 with
/// section b. Checks the full decomposition of the conjugate.
struct SectionOntoReport {
  bool a_fixes_1 = false;
  bool a_section_ok = false;
  bool conj_fixes_1 = false;
  bool conj_perm_ok = false;
  std::vector<bool> slot_ok;
  bool slot1_is_b = false;
  bool conj_cubed_trivial = false;
  std::string computed_perm;
  std::vector<std::string> computed_sections;

  bool passed() const {
    if (!(a_fixes_1 && a_section_ok && conj_fixes_1 && conj_perm_ok && slot1_is_b &&
          conj_cubed_trivial))
      return false;
    for (bool ok : slot_ok)
      if (!ok) return false;
    return true;
  }

  nlohmann::json to_json() const {
    nlohmann::json j;
    j["a_fixes_1"] = a_fixes_1;
    j["a_section_ok"] = a_section_ok;
    j["conj_fixes_1"] = conj_fixes_1;
    j["conj_perm"] = computed_perm;
    j["conj_perm_ok"] = conj_perm_ok;
    j["sections"] = computed_sections;
    j["slot1_is_b"] = slot1_is_b;
    j["conj_cubed_trivial"] = conj_cubed_trivial;
    j["passed"] = passed();
    return j;
  }
};

inline SectionOntoReport verify_section_onto(Engine& engine) {
  const MealyMachine& m = engine.machine();
  const ShapeSystem sys = engine.shape_system();
  if (m.alphabet() != 8) throw StructuralError("section-onto check targets the 8-letter machine");
  const char A = static_cast<char>(sys.invol);
  const char B = static_cast<char>(sys.rot_pos);
  const char Bi = static_cast<char>(sys.rot_neg);

  SectionOntoReport r;
  Word a(1, A), b(1, B);
  r.a_fixes_1 = fixes_vertex(m, a, {1});
  r.a_section_ok = engine.reduce(section(m, a, 1)) == a;

  Word u{std::string{A, B, A, B}};
  Word conj = invert(m, u) + b + u;  // b conjugated by abab, leftmost acts first
  r.conj_fixes_1 = fixes_vertex(m, conj, {1});
  Perm sigma = root_perm(m, conj);
  r.computed_perm = sigma.to_string();
  r.conj_perm_ok = sigma == Perm::parse("(264)(358)", 8);

  // expected decomposition: <b, ab^-1, a, b^-1 a, b^-1, b^-1, b^-1, b a>
  std::vector<Word> expected = {
      Word{std::string{B}},     Word{std::string{A, Bi}}, Word{std::string{A}},
      Word{std::string{Bi, A}}, Word{std::string{Bi}},    Word{std::string{Bi}},
      Word{std::string{Bi}},    Word{std::string{B, A}},
  };
  r.slot_ok.resize(8, false);
  for (Letter i = 1; i <= 8; ++i) {
    Word s = engine.reduce(section(m, conj, i));
    r.computed_sections.push_back(m.word_name(s));
    r.slot_ok[static_cast<std::size_t>(i - 1)] = (s == expected[static_cast<std::size_t>(i - 1)]);
  }
  r.slot1_is_b = engine.reduce(section(m, conj, 1)) == b;
  r.conj_cubed_trivial = engine.is_identity(word_pow(m, conj, 3));
  return r;
}

}  // namespace selfsim
