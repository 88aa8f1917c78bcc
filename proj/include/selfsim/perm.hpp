#pragma once

#include <cstdint>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "selfsim/errors.hpp"

namespace selfsim {

/// Permutation of the letters 1..d. Immutable after construction.
///
/// Composition is written left-to-right: p.then(q) maps i to q(p(i)), i.e.
/// p is evaluated first. Cycle notation "(123)" means 1->2, 2->3, 3->1.
class Perm {
 public:
  Perm() = default;  // degree-0 placeholder

  explicit Perm(int degree) : img_(static_cast<std::size_t>(check_degree(degree))) {
    std::iota(img_.begin(), img_.end(), 0);
  }

  static Perm identity(int degree) { return Perm(degree); }

  /// Build from 1-based images: images[k] = image of letter k+1.
  static Perm from_images(const std::vector<int>& images) {
    Perm p(static_cast<int>(images.size()));
    std::vector<bool> seen(images.size(), false);
    for (std::size_t k = 0; k < images.size(); ++k) {
      int v = images[k];
      if (v < 1 || v > static_cast<int>(images.size()))
        throw StructuralError("permutation image out of range: " + std::to_string(v));
      if (seen[static_cast<std::size_t>(v - 1)])
        throw StructuralError("permutation repeats image " + std::to_string(v));
      seen[static_cast<std::size_t>(v - 1)] = true;
      p.img_[k] = v - 1;
    }
    return p;
  }

  /// Parse cycle notation over 1..degree, e.g. "(34)(67)(58)". Fixed points
  /// may be omitted; "()", "" and "id" denote the identity. Letters inside a
  /// cycle are single digits, or separated by spaces/commas when degree > 9.
  static Perm parse(const std::string& text, int degree) {
    Perm p(degree);
    std::size_t i = 0;
    auto skip_ws = [&] {
      while (i < text.size() && (text[i] == ' ' || text[i] == '\t')) ++i;
    };
    skip_ws();
    if (i == text.size()) return p;
    if (text.compare(i, 2, "id") == 0 && i + 2 == text.size()) return p;
    while (i < text.size()) {
      skip_ws();
      if (i == text.size()) break;
      if (text[i] != '(')
        throw StructuralError("expected '(' in permutation: " + text);
      ++i;
      std::vector<int> cycle;
      bool saw_separator = false;
      std::string digits;
      auto flush_digits = [&] {
        if (digits.empty()) return;
        cycle.push_back(std::stoi(digits));
        digits.clear();
      };
      for (; i < text.size() && text[i] != ')'; ++i) {
        char c = text[i];
        if (c >= '0' && c <= '9') {
          digits.push_back(c);
        } else if (c == ' ' || c == ',' || c == '\t') {
          saw_separator = true;
          flush_digits();
        } else {
          throw StructuralError(std::string("bad character '") + c + "' in permutation: " + text);
        }
      }
      if (i == text.size()) throw StructuralError("unterminated cycle in permutation: " + text);
      ++i;  // ')'
      if (!saw_separator && digits.size() > 1 && degree <= 9) {
        for (char c : digits) cycle.push_back(c - '0');
      } else {
        flush_digits();
      }
      apply_cycle(p, cycle, degree, text);
    }
    return p;
  }

  int degree() const { return static_cast<int>(img_.size()); }

  /// Image of a 1-based letter.
  int apply(int letter) const {
    if (letter < 1 || letter > degree())
      throw StructuralError("letter out of range: " + std::to_string(letter));
    return img_[static_cast<std::size_t>(letter - 1)] + 1;
  }

  /// Image of a 0-based index, unchecked. Hot path.
  int apply0(int i) const { return img_[static_cast<std::size_t>(i)]; }

  /// this evaluated first, then next.
  Perm then(const Perm& next) const {
    if (next.degree() != degree()) throw StructuralError("permutation degree mismatch");
    Perm r(degree());
    for (std::size_t i = 0; i < img_.size(); ++i)
      r.img_[i] = next.img_[static_cast<std::size_t>(img_[i])];
    return r;
  }

  Perm inverse() const {
    Perm r(degree());
    for (std::size_t i = 0; i < img_.size(); ++i)
      r.img_[static_cast<std::size_t>(img_[i])] = static_cast<int>(i);
    return r;
  }

  bool is_identity() const {
    for (std::size_t i = 0; i < img_.size(); ++i)
      if (img_[i] != static_cast<int>(i)) return false;
    return true;
  }

  /// Cycles in canonical order: each cycle starts at its least letter,
  /// cycles sorted by least letter. 1-based. Fixed points optional.
  std::vector<std::vector<int>> cycles(bool include_fixed = false) const {
    std::vector<std::vector<int>> out;
    std::vector<bool> seen(img_.size(), false);
    for (std::size_t i = 0; i < img_.size(); ++i) {
      if (seen[i]) continue;
      std::vector<int> cyc;
      std::size_t j = i;
      while (!seen[j]) {
        seen[j] = true;
        cyc.push_back(static_cast<int>(j) + 1);
        j = static_cast<std::size_t>(img_[j]);
      }
      if (cyc.size() > 1 || include_fixed) out.push_back(std::move(cyc));
    }
    return out;
  }

  std::uint64_t order() const {
    std::uint64_t n = 1;
    for (const auto& c : cycles()) n = std::lcm(n, static_cast<std::uint64_t>(c.size()));
    return n;
  }

  std::string to_string() const {
    auto cs = cycles();
    if (cs.empty()) return "()";
    std::ostringstream os;
    bool compact = degree() <= 9;
    for (const auto& c : cs) {
      os << '(';
      for (std::size_t k = 0; k < c.size(); ++k) {
        if (k && !compact) os << ',';
        os << c[k];
      }
      os << ')';
    }
    return os.str();
  }

  const std::vector<int>& images0() const { return img_; }

  friend bool operator==(const Perm& a, const Perm& b) { return a.img_ == b.img_; }
  friend bool operator!=(const Perm& a, const Perm& b) { return !(a == b); }

 private:
  static int check_degree(int d) {
    if (d < 1) throw StructuralError("permutation degree must be positive");
    return d;
  }

  static void apply_cycle(Perm& p, const std::vector<int>& cycle, int degree,
                          const std::string& text) {
    if (cycle.empty()) return;  // "()" is the identity
    for (int v : cycle)
      if (v < 1 || v > degree)
        throw StructuralError("cycle letter " + std::to_string(v) + " out of range in: " + text);
    for (std::size_t k = 0; k < cycle.size(); ++k) {
      int from = cycle[k] - 1;
      int to = cycle[(k + 1) % cycle.size()] - 1;
      if (p.img_[static_cast<std::size_t>(from)] != from)
        throw StructuralError("letter " + std::to_string(from + 1) +
                              " appears twice in permutation: " + text);
      p.img_[static_cast<std::size_t>(from)] = to;
    }
    // reject cycles that revisit a letter, e.g. "(121)"
    std::vector<bool> seen(static_cast<std::size_t>(degree), false);
    for (int v : cycle) {
      if (seen[static_cast<std::size_t>(v - 1)])
        throw StructuralError("letter " + std::to_string(v) + " repeated within a cycle: " + text);
      seen[static_cast<std::size_t>(v - 1)] = true;
    }
  }

  std::vector<int> img_;
};

}  // namespace selfsim
