#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "selfsim/errors.hpp"
#include "selfsim/perm.hpp"

namespace selfsim {

using Letter = int;    // alphabet letter, 1-based
using StateId = int;   // index into MealyMachine::state()

/// Transition target meaning the identity automorphism. The identity is a
/// sentinel, never a declared state.
inline constexpr StateId kIdentity = -1;

/// A word over machine states, stored as one byte per state id. The empty
/// word is the identity element. Words act on the tree left-to-right: in
/// "ab" the state a is applied first. Value type, hashable, cheap to copy.
using Word = std::string;

/// A tree vertex: sequence of letters, position 0 = level-1 letter.
/// Empty = root.
using VertexWord = std::vector<Letter>;

struct Alphabet {
  int size = 0;  // letters are 1..size, size >= 2
};

struct StateDef {
  std::string name;
  Perm perm;
  std::vector<StateId> transitions;  // length d, entries kIdentity or a StateId

  friend bool operator==(const StateDef& a, const StateDef& b) {
    return a.name == b.name && a.perm == b.perm && a.transitions == b.transitions;
  }
};

/// A finite invertible Mealy machine: states with root permutations and
/// letter-indexed transitions, an inverse pairing on states, and optional
/// declared torsion orders driving free reduction.
///
/// Everything is validated at construction and immutable afterwards, so
/// machines can be shared freely across threads.
class MealyMachine {
 public:
  MealyMachine(Alphabet alphabet, std::vector<StateDef> states,
               std::vector<std::pair<std::string, std::string>> inverse_pairs,
               std::map<std::string, int> torsion_orders)
      : d_(alphabet.size), states_(std::move(states)) {
    validate_basics();
    index_names();
    resolve_inverses(inverse_pairs);
    resolve_orders(torsion_orders);
    check_inverse_consistency();
  }

  int alphabet() const { return d_; }
  int state_count() const { return static_cast<int>(states_.size()); }

  const StateDef& state(StateId s) const { return states_[static_cast<std::size_t>(s)]; }

  StateId state_id(const std::string& name) const {
    auto it = name_to_id_.find(name);
    if (it == name_to_id_.end()) throw StructuralError("unknown state: " + name);
    return it->second;
  }

  bool has_state(const std::string& name) const { return name_to_id_.count(name) != 0; }

  StateId inverse(StateId s) const { return inverse_[static_cast<std::size_t>(s)]; }

  /// Declared torsion order of a state, 0 if undeclared.
  int torsion_order(StateId s) const { return order_[static_cast<std::size_t>(s)]; }

  /// The inverse state's data derived from the action law:
  /// perm(s)^-1 and transitions[i] = inverse of transitions(s)[perm(s)^-1(i)].
  StateDef synthesize_inverse(StateId s) const {
    const StateDef& def = state(s);
    StateDef out;
    out.name = def.name + "^-1";
    out.perm = def.perm.inverse();
    out.transitions.resize(static_cast<std::size_t>(d_));
    for (int i = 0; i < d_; ++i) {
      StateId t = def.transitions[static_cast<std::size_t>(out.perm.apply0(i))];
      out.transitions[static_cast<std::size_t>(i)] = (t == kIdentity) ? kIdentity : inverse_[static_cast<std::size_t>(t)];
    }
    return out;
  }

  Word word(const std::vector<std::string>& names) const {
    Word w;
    for (const auto& n : names)
      if (n != "id") w.push_back(static_cast<char>(state_id(n)));
    return w;
  }

  /// Render a word as whitespace-separated state names; "id" for the empty word.
  std::string word_name(const Word& w) const {
    if (w.empty()) return "id";
    std::string out;
    for (std::size_t k = 0; k < w.size(); ++k) {
      if (k) out.push_back(' ');
      out += state(check_id(w[k])).name;
    }
    return out;
  }

  /// Compact rendering without separators (unambiguous for longest-match names).
  std::string word_compact(const Word& w) const {
    if (w.empty()) return "id";
    std::string out;
    for (char c : w) out += state(check_id(c)).name;
    return out;
  }

  /// Parse the word grammar: state names (longest match), "id", spaces and
  /// '.' as separators, parentheses, and integer powers:
  ///   "a b a b-1 a", "abab-1a", "(ab)^16", "((ab)^2 b)^-3".
  Word parse_word(const std::string& text) const {
    std::size_t pos = 0;
    Word w = parse_sequence(text, pos);
    if (pos != text.size())
      throw StructuralError("unexpected '" + std::string(1, text[pos]) + "' at position " +
                            std::to_string(pos) + " in word: " + text);
    return w;
  }

  StateId check_id(char c) const {
    auto s = static_cast<StateId>(c);
    if (s < 0 || s >= state_count())
      throw StructuralError("state id out of range; word built for another machine?");
    return s;
  }

  friend bool operator==(const MealyMachine& a, const MealyMachine& b) {
    return a.d_ == b.d_ && a.states_ == b.states_ && a.inverse_ == b.inverse_ &&
           a.order_ == b.order_;
  }

 private:
  void validate_basics() const {
    if (d_ < 2) throw StructuralError("alphabet size must be at least 2");
    if (d_ > 200) throw StructuralError("alphabet size too large");
    if (states_.empty()) throw StructuralError("machine needs at least one state");
    if (states_.size() > 120) throw StructuralError("too many states");
    for (const auto& def : states_) {
      if (def.name.empty()) throw StructuralError("state with empty name");
      if (def.name == "id") throw StructuralError("'id' is reserved for the identity sentinel");
      if (def.name.find_first_of(" \t.()^,") != std::string::npos)
        throw StructuralError("state name contains reserved characters: " + def.name);
      if (def.name[0] >= '0' && def.name[0] <= '9')
        throw StructuralError("state name starts with a digit: " + def.name);
      if (def.perm.degree() != d_)
        throw StructuralError("state " + def.name + ": permutation degree != alphabet size");
      if (static_cast<int>(def.transitions.size()) != d_)
        throw StructuralError("state " + def.name + ": expected " + std::to_string(d_) +
                              " transitions, got " + std::to_string(def.transitions.size()));
      for (StateId t : def.transitions)
        if (t != kIdentity && (t < 0 || t >= static_cast<StateId>(states_.size())))
          throw StructuralError("state " + def.name + ": transition target out of range");
    }
  }

  void index_names() {
    for (std::size_t k = 0; k < states_.size(); ++k)
      if (!name_to_id_.emplace(states_[k].name, static_cast<StateId>(k)).second)
        throw StructuralError("duplicate state name: " + states_[k].name);
    for (const auto& [name, id] : name_to_id_) {
      (void)id;
      names_by_length_.push_back(name);
    }
    std::sort(names_by_length_.begin(), names_by_length_.end(),
              [](const std::string& a, const std::string& b) {
                return a.size() != b.size() ? a.size() > b.size() : a < b;
              });
  }

  void resolve_inverses(const std::vector<std::pair<std::string, std::string>>& pairs) {
    inverse_.assign(states_.size(), kIdentity);
    for (const auto& [x, y] : pairs) {
      StateId sx = state_id(x), sy = state_id(y);
      if (inverse_[static_cast<std::size_t>(sx)] != kIdentity ||
          (sx != sy && inverse_[static_cast<std::size_t>(sy)] != kIdentity))
        throw StructuralError("state appears in more than one inverse pair: " + x + "/" + y);
      inverse_[static_cast<std::size_t>(sx)] = sy;
      inverse_[static_cast<std::size_t>(sy)] = sx;
    }
    for (std::size_t k = 0; k < states_.size(); ++k)
      if (inverse_[k] == kIdentity)
        throw StructuralError("state " + states_[k].name +
                              " has no inverse pairing (pair it with itself if self-inverse)");
  }

  void resolve_orders(const std::map<std::string, int>& orders) {
    order_.assign(states_.size(), 0);
    for (const auto& [name, n] : orders) {
      if (n < 1) throw StructuralError("declared order must be positive for state " + name);
      order_[static_cast<std::size_t>(state_id(name))] = n;
    }
    // propagate to inverse partners; conflicting declarations are rejected
    for (std::size_t k = 0; k < states_.size(); ++k) {
      auto j = static_cast<std::size_t>(inverse_[k]);
      if (order_[k] != 0 && order_[j] != 0 && order_[k] != order_[j])
        throw StructuralError("states " + states_[k].name + " and " + states_[j].name +
                              " are inverse to each other but declare different orders");
      if (order_[k] != 0) order_[j] = order_[k];
    }
    for (std::size_t k = 0; k < states_.size(); ++k) {
      if (order_[k] == 0) continue;
      if (inverse_[k] == static_cast<StateId>(k) && order_[k] > 2)
        throw StructuralError("state " + states_[k].name +
                              " is self-inverse but declares order " + std::to_string(order_[k]));
      auto po = states_[k].perm.order();
      if (static_cast<std::uint64_t>(order_[k]) % po != 0)
        throw StructuralError("state " + states_[k].name + ": declared order " +
                              std::to_string(order_[k]) +
                              " is not a multiple of its root permutation order " +
                              std::to_string(po));
    }
  }

  void check_inverse_consistency() const {
    for (std::size_t k = 0; k < states_.size(); ++k) {
      const StateDef& s = states_[k];
      const StateDef& t = states_[static_cast<std::size_t>(inverse_[k])];
      if (t.perm != s.perm.inverse())
        throw StructuralError("inverse inconsistency: perm(" + t.name + ") != perm(" + s.name +
                              ")^-1");
      for (int i = 0; i < d_; ++i) {
        StateId via = s.transitions[static_cast<std::size_t>(t.perm.apply0(i))];
        StateId want = (via == kIdentity) ? kIdentity : inverse_[static_cast<std::size_t>(via)];
        if (t.transitions[static_cast<std::size_t>(i)] != want) {
          auto show = [&](StateId x) { return x == kIdentity ? std::string("id") : states_[static_cast<std::size_t>(x)].name; };
          throw StructuralError("inverse inconsistency: transitions(" + t.name + ")[" +
                                std::to_string(i + 1) + "] = " +
                                show(t.transitions[static_cast<std::size_t>(i)]) +
                                " but the inverse of transitions(" + s.name + ")[" +
                                std::to_string(t.perm.apply0(i) + 1) + "] is " + show(want));
        }
      }
    }
  }

  Word parse_sequence(const std::string& text, std::size_t& pos) const {
    Word out;
    while (true) {
      while (pos < text.size() &&
             (text[pos] == ' ' || text[pos] == '\t' || text[pos] == '.'))
        ++pos;
      if (pos >= text.size() || text[pos] == ')') return out;
      Word atom;
      if (text[pos] == '(') {
        ++pos;
        atom = parse_sequence(text, pos);
        if (pos >= text.size() || text[pos] != ')')
          throw StructuralError("missing ')' in word: " + text);
        ++pos;
      } else {
        atom = parse_name(text, pos);
      }
      long long e = parse_exponent(text, pos);
      append_power(atom, e, out);
    }
  }

  Word parse_name(const std::string& text, std::size_t& pos) const {
    if (text.compare(pos, 2, "id") == 0 && !is_name_prefix_longer(text, pos, 2)) {
      pos += 2;
      return {};
    }
    for (const auto& name : names_by_length_) {
      if (text.compare(pos, name.size(), name) == 0) {
        pos += name.size();
        Word w;
        w.push_back(static_cast<char>(name_to_id_.at(name)));
        return w;
      }
    }
    throw StructuralError("no state name matches at position " + std::to_string(pos) +
                          " in word: " + text);
  }

  // "id" must not shadow a longer declared name such as "ida"
  bool is_name_prefix_longer(const std::string& text, std::size_t pos, std::size_t len) const {
    for (const auto& name : names_by_length_) {
      if (name.size() <= len) break;
      if (text.compare(pos, name.size(), name) == 0) return true;
    }
    return false;
  }

  long long parse_exponent(const std::string& text, std::size_t& pos) const {
    std::size_t q = pos;
    while (q < text.size() && (text[q] == ' ' || text[q] == '\t')) ++q;
    if (q >= text.size() || text[q] != '^') return 1;
    ++q;
    bool neg = false;
    if (q < text.size() && (text[q] == '-' || text[q] == '+')) {
      neg = text[q] == '-';
      ++q;
    }
    if (q >= text.size() || text[q] < '0' || text[q] > '9')
      throw StructuralError("expected integer after '^' in word: " + text);
    long long v = 0;
    while (q < text.size() && text[q] >= '0' && text[q] <= '9') {
      v = v * 10 + (text[q] - '0');
      if (v > (1ll << 40)) throw StructuralError("exponent too large in word: " + text);
      ++q;
    }
    pos = q;
    return neg ? -v : v;
  }

  void append_power(const Word& atom, long long e, Word& out) const {
    Word base = atom;
    if (e < 0) {
      base = invert_word(base);
      e = -e;
    }
    if (base.size() * static_cast<std::size_t>(e) > (1u << 26))
      throw StructuralError("word expansion too large");
    for (long long k = 0; k < e; ++k) out += base;
  }

  Word invert_word(const Word& w) const {
    Word out;
    out.reserve(w.size());
    for (auto it = w.rbegin(); it != w.rend(); ++it)
      out.push_back(static_cast<char>(inverse_[static_cast<std::size_t>(check_id(*it))]));
    return out;
  }

  int d_;
  std::vector<StateDef> states_;
  std::vector<StateId> inverse_;
  std::vector<int> order_;
  std::map<std::string, StateId> name_to_id_;
  std::vector<std::string> names_by_length_;

  friend Word invert(const MealyMachine&, const Word&);
};

// ---------------------------------------------------------------------------
// The wreath-recursion action. Words act left-to-right: for w = s1 s2 ... sk,
// w(v) = sk(...(s2(s1(v)))...). Hence the mixed law
//   (uv)(i.x) = sigma_v(sigma_u(i)) . (u_i v_{sigma_u(i)})(x),
// i.e. root_perm(uv) = root_perm(u).then(root_perm(v)) and
// section(uv, i) = section(u, i) + section(v, root_perm(u)(i)).
// ---------------------------------------------------------------------------

inline Perm root_perm(const MealyMachine& m, const Word& w) {
  const int d = m.alphabet();
  std::vector<int> img(static_cast<std::size_t>(d));
  for (int i = 0; i < d; ++i) img[static_cast<std::size_t>(i)] = i;
  for (char c : w) {
    const Perm& p = m.state(m.check_id(c)).perm;
    for (int i = 0; i < d; ++i)
      img[static_cast<std::size_t>(i)] = p.apply0(img[static_cast<std::size_t>(i)]);
  }
  std::vector<int> one_based(img.size());
  for (std::size_t i = 0; i < img.size(); ++i) one_based[i] = img[i] + 1;
  return Perm::from_images(one_based);
}

/// Image of a single letter under the word's root permutation.
inline Letter root_image(const MealyMachine& m, const Word& w, Letter i) {
  if (i < 1 || i > m.alphabet()) throw StructuralError("letter out of range: " + std::to_string(i));
  int pos = i - 1;
  for (char c : w) pos = m.state(m.check_id(c)).perm.apply0(pos);
  return pos + 1;
}

/// Section of w at letter i, unreduced: one pass over the word, collecting
/// the transition of each state at the running letter.
inline Word section(const MealyMachine& m, const Word& w, Letter i) {
  if (i < 1 || i > m.alphabet()) throw StructuralError("letter out of range: " + std::to_string(i));
  int pos = i - 1;
  Word out;
  for (char c : w) {
    const StateDef& def = m.state(m.check_id(c));
    StateId t = def.transitions[static_cast<std::size_t>(pos)];
    if (t != kIdentity) out.push_back(static_cast<char>(t));
    pos = def.perm.apply0(pos);
  }
  return out;
}

/// Single recursion step: (image of i, section at i).
inline std::pair<Letter, Word> step(const MealyMachine& m, const Word& w, Letter i) {
  if (i < 1 || i > m.alphabet()) throw StructuralError("letter out of range: " + std::to_string(i));
  int pos = i - 1;
  Word out;
  for (char c : w) {
    const StateDef& def = m.state(m.check_id(c));
    StateId t = def.transitions[static_cast<std::size_t>(pos)];
    if (t != kIdentity) out.push_back(static_cast<char>(t));
    pos = def.perm.apply0(pos);
  }
  return {pos + 1, std::move(out)};
}

/// Action on a vertex: w(i.v) = sigma_w(i) . w_i(v), recursively.
inline VertexWord apply(const MealyMachine& m, const Word& w, const VertexWord& v) {
  VertexWord out;
  out.reserve(v.size());
  Word cur = w;
  for (Letter x : v) {
    auto [img, sec] = step(m, cur, x);
    out.push_back(img);
    cur = std::move(sec);
  }
  return out;
}

/// Reverse the word and replace each state by its inverse partner.
inline Word invert(const MealyMachine& m, const Word& w) { return m.invert_word(w); }

inline bool fixes_vertex(const MealyMachine& m, const Word& w, const VertexWord& v) {
  Word cur = w;
  for (Letter x : v) {
    auto [img, sec] = step(m, cur, x);
    if (img != x) return false;
    cur = std::move(sec);
  }
  return true;
}

/// w^n for n >= 0 (concatenation); negative n inverts first.
inline Word word_pow(const MealyMachine& m, const Word& w, long long n) {
  Word base = w;
  if (n < 0) {
    base = invert(m, w);
    n = -n;
  }
  if (base.size() * static_cast<std::size_t>(n) > (1u << 28))
    throw BudgetError("power expansion too large: |w|=" + std::to_string(w.size()) +
                      ", n=" + std::to_string(n));
  Word out;
  out.reserve(base.size() * static_cast<std::size_t>(n));
  for (long long k = 0; k < n; ++k) out += base;
  return out;
}

inline std::string vertex_name(const VertexWord& v) {
  std::string out;
  for (std::size_t k = 0; k < v.size(); ++k) {
    if (k) out.push_back(',');
    out += std::to_string(v[k]);
  }
  return out;
}

inline VertexWord parse_vertex(const std::string& text, int alphabet) {
  VertexWord v;
  if (text.empty() || text == "root" || text == "e") return v;
  if (text.find(',') == std::string::npos && alphabet <= 9) {
    for (char c : text) {
      if (c < '0' || c > '9') throw StructuralError("bad vertex: " + text);
      v.push_back(c - '0');
    }
  } else {
    std::size_t pos = 0;
    while (pos < text.size()) {
      std::size_t next = text.find(',', pos);
      if (next == std::string::npos) next = text.size();
      v.push_back(std::stoi(text.substr(pos, next - pos)));
      pos = next + 1;
    }
  }
  for (Letter x : v)
    if (x < 1 || x > alphabet)
      throw StructuralError("vertex letter out of range: " + std::to_string(x));
  return v;
}

}  // namespace selfsim
