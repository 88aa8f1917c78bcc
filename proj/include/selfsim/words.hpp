#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "selfsim/mealy.hpp"

namespace selfsim {

/// Partition of the state set into <s, s^-1> factors, with the declared
/// cyclic order per factor. Built once per machine, drives free reduction.
struct FactorTable {
  struct Factor {
    StateId pos;  // canonical representative (smaller id)
    StateId neg;  // its inverse (== pos when self-inverse)
    int order;    // declared torsion order, 0 = free
  };
  std::vector<Factor> factors;
  std::vector<int> factor_of;  // per state
  std::vector<int> sign_of;    // +1 for pos, -1 for neg

  static FactorTable build(const MealyMachine& m) {
    FactorTable t;
    t.factor_of.assign(static_cast<std::size_t>(m.state_count()), -1);
    t.sign_of.assign(static_cast<std::size_t>(m.state_count()), 0);
    for (StateId s = 0; s < m.state_count(); ++s) {
      if (t.factor_of[static_cast<std::size_t>(s)] != -1) continue;
      StateId inv = m.inverse(s);
      Factor f{s, inv, m.torsion_order(s)};
      int id = static_cast<int>(t.factors.size());
      t.factor_of[static_cast<std::size_t>(s)] = id;
      t.sign_of[static_cast<std::size_t>(s)] = 1;
      if (inv != s) {
        t.factor_of[static_cast<std::size_t>(inv)] = id;
        t.sign_of[static_cast<std::size_t>(inv)] = -1;
      }
      t.factors.push_back(f);
    }
    return t;
  }
};

/// Free-product reduction over the declared cyclic factors: adjacent letters
/// of one factor merge exponents mod the declared order; zero runs cancel and
/// neighbours re-merge. Exponents render as the shorter of s^k and s^-(n-k),
/// ties to the positive side. Machines without declared orders get plain
/// free-group cancellation. Confluent, so the result is a normal form.
inline Word free_reduce(const MealyMachine& m, const Word& w, const FactorTable& t) {
  std::vector<std::pair<int, long long>> runs;  // (factor, net exponent)
  for (char c : w) {
    StateId s = m.check_id(c);
    int f = t.factor_of[static_cast<std::size_t>(s)];
    long long e = t.sign_of[static_cast<std::size_t>(s)];
    if (!runs.empty() && runs.back().first == f) {
      runs.back().second += e;
      int n = t.factors[static_cast<std::size_t>(f)].order;
      if (n > 0) runs.back().second %= n;
      if (runs.back().second == 0) runs.pop_back();
    } else {
      runs.emplace_back(f, e);
      int n = t.factors[static_cast<std::size_t>(f)].order;
      if (n > 0) {
        runs.back().second %= n;
        if (runs.back().second < 0) runs.back().second += n;
        if (runs.back().second == 0) runs.pop_back();
      }
    }
  }
  Word out;
  for (auto [f, e] : runs) {
    const auto& fac = t.factors[static_cast<std::size_t>(f)];
    int n = fac.order;
    long long k = e;
    if (n > 0) {
      k %= n;
      if (k < 0) k += n;
      if (k == 0) continue;
      if (2 * k <= n)
        out.append(static_cast<std::size_t>(k), static_cast<char>(fac.pos));
      else
        out.append(static_cast<std::size_t>(n - k), static_cast<char>(fac.neg));
    } else if (k > 0) {
      out.append(static_cast<std::size_t>(k), static_cast<char>(fac.pos));
    } else {
      out.append(static_cast<std::size_t>(-k), static_cast<char>(fac.neg));
    }
  }
  return out;
}

inline Word free_reduce(const MealyMachine& m, const Word& w) {
  return free_reduce(m, w, FactorTable::build(m));
}

inline bool is_reduced(const MealyMachine& m, const Word& w, const FactorTable& t) {
  return free_reduce(m, w, t) == w;
}

inline bool is_reduced(const MealyMachine& m, const Word& w) {
  return free_reduce(m, w) == w;
}

// ---------------------------------------------------------------------------
// The two-factor presentation <a> * <b> with a^2 = b^3 = id underlying the
// normal form b^e1 (ab)^p1 (ab^-1)^q1 ... (ab)^pk (ab^-1)^qk a^e2 and the
// contraction machinery. Machines lacking this structure reject these
// operations with a structural error; free_reduce above stays generic.
// ---------------------------------------------------------------------------

struct ShapeSystem {
  StateId invol;    // the order-2 self-inverse generator ("a")
  StateId rot_pos;  // the order-3 generator ("b")
  StateId rot_neg;  // its inverse ("b^-1")

  static ShapeSystem find(const MealyMachine& m) {
    const FactorTable t = FactorTable::build(m);
    int invol_factor = -1, rot_factor = -1;
    for (std::size_t f = 0; f < t.factors.size(); ++f) {
      const auto& fac = t.factors[f];
      if (fac.order == 2 && fac.pos == fac.neg) {
        if (invol_factor != -1) throw StructuralError("machine has several order-2 factors");
        invol_factor = static_cast<int>(f);
      } else if (fac.order == 3 && fac.pos != fac.neg) {
        if (rot_factor != -1) throw StructuralError("machine has several order-3 factors");
        rot_factor = static_cast<int>(f);
      } else {
        throw StructuralError("machine is not generated by an order-2 and an order-3 factor");
      }
    }
    if (invol_factor == -1 || rot_factor == -1)
      throw StructuralError("machine is not generated by an order-2 and an order-3 factor");
    const auto& rf = t.factors[static_cast<std::size_t>(rot_factor)];
    return ShapeSystem{t.factors[static_cast<std::size_t>(invol_factor)].pos, rf.pos, rf.neg};
  }
};

/// Number of occurrences of the order-2 generator.
inline int a_length(const MealyMachine& m, const Word& w, const ShapeSystem& sys) {
  int n = 0;
  for (char c : w)
    if (m.check_id(c) == sys.invol) ++n;
  return n;
}

inline int a_length(const MealyMachine& m, const Word& w) {
  return a_length(m, w, ShapeSystem::find(m));
}

/// The (eps1, eps2, blocks) decomposition of a reduced word:
///   w = b^eps1 (ab)^p1 (ab^-1)^q1 ... (ab)^pk (ab^-1)^qk a^eps2
/// with interior exponents >= 1; only p1 or qk may vanish.
struct NormalFormShape {
  int eps1 = 0;  // -1, 0, 1
  int eps2 = 0;  // 0, 1
  std::vector<std::pair<int, int>> blocks;

  friend bool operator==(const NormalFormShape& x, const NormalFormShape& y) {
    return x.eps1 == y.eps1 && x.eps2 == y.eps2 && x.blocks == y.blocks;
  }
};

inline NormalFormShape shape(const MealyMachine& m, const Word& w, const ShapeSystem& sys) {
  FactorTable t = FactorTable::build(m);
  if (!is_reduced(m, w, t)) throw StructuralError("shape() requires a reduced word");
  NormalFormShape out;
  std::size_t k = 0;
  auto at = [&](std::size_t i) { return static_cast<StateId>(w[i]); };
  if (k < w.size() && at(k) != sys.invol) {
    out.eps1 = (at(k) == sys.rot_pos) ? 1 : -1;
    ++k;
  }
  // the rest alternates a b^{+-1} ... with a possibly trailing lone a
  std::vector<int> deltas;
  while (k < w.size()) {
    if (at(k) != sys.invol)
      throw StructuralError("reduced word does not alternate as expected");
    ++k;
    if (k == w.size()) {
      out.eps2 = 1;
      break;
    }
    deltas.push_back(at(k) == sys.rot_pos ? 1 : -1);
    ++k;
  }
  // group the +-1 sequence into (p, q) runs
  std::size_t i = 0;
  while (i < deltas.size()) {
    int p = 0, q = 0;
    while (i < deltas.size() && deltas[i] == 1) ++p, ++i;
    while (i < deltas.size() && deltas[i] == -1) ++q, ++i;
    out.blocks.emplace_back(p, q);
  }
  return out;
}

inline NormalFormShape shape(const MealyMachine& m, const Word& w) {
  return shape(m, w, ShapeSystem::find(m));
}

inline Word reconstruct([[maybe_unused]] const MealyMachine& m, const NormalFormShape& s,
                        const ShapeSystem& sys) {
  for (std::size_t k = 0; k < s.blocks.size(); ++k) {
    auto [p, q] = s.blocks[k];
    if (p < 0 || q < 0) throw StructuralError("negative block exponent");
    if (p == 0 && k != 0) throw StructuralError("interior p exponent is zero");
    if (q == 0 && k + 1 != s.blocks.size()) throw StructuralError("interior q exponent is zero");
    if (p == 0 && q == 0) throw StructuralError("empty block");
  }
  Word w;
  auto push = [&](StateId s_) { w.push_back(static_cast<char>(s_)); };
  if (s.eps1 == 1) push(sys.rot_pos);
  if (s.eps1 == -1) push(sys.rot_neg);
  for (auto [p, q] : s.blocks) {
    for (int k = 0; k < p; ++k) {
      push(sys.invol);
      push(sys.rot_pos);
    }
    for (int k = 0; k < q; ++k) {
      push(sys.invol);
      push(sys.rot_neg);
    }
  }
  if (s.eps2 == 1) push(sys.invol);
  return w;
}

inline Word reconstruct(const MealyMachine& m, const NormalFormShape& s) {
  return reconstruct(m, s, ShapeSystem::find(m));
}

/// Stream every reduced word with a_length <= max_a, each exactly once, in
/// non-decreasing a_length. Generates from the normal-form template, so the
/// cost is linear in the output size.
template <class F>
void enumerate_reduced([[maybe_unused]] const MealyMachine& m, int max_a, F&& f,
                       const ShapeSystem& sys) {
  if (max_a < 0) throw StructuralError("max_a must be non-negative");
  Word w;
  f(static_cast<const Word&>(w));  // the empty word
  w.assign(1, static_cast<char>(sys.rot_pos));
  f(static_cast<const Word&>(w));
  w.assign(1, static_cast<char>(sys.rot_neg));
  f(static_cast<const Word&>(w));
  const char A = static_cast<char>(sys.invol);
  const char B = static_cast<char>(sys.rot_pos);
  const char Binv = static_cast<char>(sys.rot_neg);
  for (int a_count = 1; a_count <= max_a; ++a_count) {
    const int interior = a_count - 1;
    for (int lead = 0; lead < 3; ++lead) {  // none, b, b^-1
      const std::uint64_t patterns = 1ull << interior;
      for (std::uint64_t bits = 0; bits < patterns; ++bits) {
        for (int tail = 0; tail < 3; ++tail) {  // none, b, b^-1
          w.clear();
          if (lead == 1) w.push_back(B);
          if (lead == 2) w.push_back(Binv);
          for (int k = 0; k < interior; ++k) {
            w.push_back(A);
            w.push_back((bits >> k) & 1 ? Binv : B);
          }
          w.push_back(A);
          if (tail == 1) w.push_back(B);
          if (tail == 2) w.push_back(Binv);
          f(static_cast<const Word&>(w));
        }
      }
    }
  }
}

template <class F>
void enumerate_reduced(const MealyMachine& m, int max_a, F&& f) {
  enumerate_reduced(m, max_a, std::forward<F>(f), ShapeSystem::find(m));
}

inline std::vector<Word> enumerate_reduced(const MealyMachine& m, int max_a) {
  std::vector<Word> out;
  enumerate_reduced(m, max_a, [&](const Word& w) { out.push_back(w); });
  return out;
}

/// Reduced sections w_1..w_d plus L = sum of their a-lengths.
struct SectionProfile {
  std::vector<Word> sections;
  int L = 0;
};

inline SectionProfile section_profile(const MealyMachine& m, const Word& w,
                                      const ShapeSystem& sys, const FactorTable& t) {
  if (!is_reduced(m, w, t)) throw StructuralError("section_profile() requires a reduced word");
  SectionProfile out;
  out.sections.reserve(static_cast<std::size_t>(m.alphabet()));
  for (Letter i = 1; i <= m.alphabet(); ++i) {
    Word s = free_reduce(m, section(m, w, i), t);
    out.L += a_length(m, s, sys);
    out.sections.push_back(std::move(s));
  }
  return out;
}

inline SectionProfile section_profile(const MealyMachine& m, const Word& w) {
  return section_profile(m, w, ShapeSystem::find(m), FactorTable::build(m));
}

}  // namespace selfsim
