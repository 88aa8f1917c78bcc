#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <sstream>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include <json.hpp>

#include "selfsim/decision.hpp"
#include "selfsim/mealy.hpp"
#include "selfsim/words.hpp"

namespace selfsim {

// ---------------------------------------------------------------------------
// Ball growth b(n) with exact semantic deduplication.
// ---------------------------------------------------------------------------

struct DedupStats {
  std::uint64_t fingerprints = 0;         // level-L action fingerprints computed
  std::uint64_t bucket_collisions = 0;    // candidates landing in a non-empty bucket
  std::uint64_t equality_checks = 0;      // exact bisimulation comparisons run
  std::uint64_t reduction_shortcuts = 0;  // products whose free reduction shortened
};

struct GrowthFit {
  double alpha_ref = 0.0;   // ln 8 / (ln 8 - ln(7/8))
  double alpha_lsq = 0.0;   // least-squares slope of lnln b(n) against ln n
  double alpha_tail = 0.0;  // successive-ratio estimate at the tail
  bool valid = false;
  std::string disclaimer;
};

struct GrowthReport {
  std::vector<std::uint64_t> sizes;  // b(0..n_max)
  std::vector<std::string> generators;
  int fingerprint_level = 3;
  DedupStats dedup;
  GrowthFit fit;

  nlohmann::json to_json() const {
    nlohmann::json j;
    j["sizes"] = sizes;
    j["generators"] = generators;
    j["fingerprint_level"] = fingerprint_level;
    j["dedup"] = {{"fingerprints", dedup.fingerprints},
                  {"bucket_collisions", dedup.bucket_collisions},
                  {"equality_checks", dedup.equality_checks},
                  {"reduction_shortcuts", dedup.reduction_shortcuts}};
    j["fit"] = {{"alpha_ref", fit.alpha_ref},
                {"alpha_lsq", fit.alpha_lsq},
                {"alpha_tail", fit.alpha_tail},
                {"valid", fit.valid},
                {"disclaimer", fit.disclaimer}};
    return j;
  }

  std::string to_csv() const {
    std::ostringstream os;
    for (std::size_t n = 0; n < sizes.size(); ++n) os << n << "," << sizes[n] << "\n";
    return os.str();
  }
};

namespace detail {

/// Image of the vertex encoded by `code` (base-d digits, level-1 letter most
/// significant) under the word's action, as an encoded vertex.
inline std::uint64_t apply_code(const MealyMachine& m, const Word& w, std::uint64_t code,
                                int level) {
  const auto d = static_cast<std::uint64_t>(m.alphabet());
  std::uint64_t out = 0;
  Word cur = w;
  std::uint64_t div = 1;
  for (int t = 1; t < level; ++t) div *= d;
  for (int t = 0; t < level; ++t) {
    auto x = static_cast<Letter>((code / div) % d) + 1;
    auto [img, sec] = step(m, cur, x);
    out = out * d + static_cast<std::uint64_t>(img - 1);
    cur = std::move(sec);
    if (div > 1) div /= d;
  }
  return out;
}

inline std::uint64_t fingerprint(const MealyMachine& m, const Word& w, int level) {
  std::uint64_t h = 1469598103934665603ull;  // FNV-1a over the image tuple
  std::uint64_t count = 1;
  for (int t = 0; t < level; ++t) count *= static_cast<std::uint64_t>(m.alphabet());
  for (std::uint64_t code = 0; code < count; ++code) {
    std::uint64_t img = apply_code(m, w, code, level);
    for (int byte = 0; byte < 8; ++byte) {
      h ^= (img >> (8 * byte)) & 0xff;
      h *= 1099511628211ull;
    }
  }
  return h;
}

inline std::uint64_t checked_add(std::uint64_t a, std::uint64_t b) {
  std::uint64_t s = a + b;
  if (s < a) throw Error("activity count overflow");
  return s;
}

}  // namespace detail

/// Breadth-first enumeration of the ball in the Cayley graph. New products
/// are bucketed by a level-L action fingerprint; every bucket hit is resolved
/// with the exact bisimulation test, so the level only affects speed, never
/// the counts. b(n) = number of distinct elements of word length at most n.
inline GrowthReport ball_sizes(Engine& engine, const std::vector<Word>& generators, int n_max,
                               int fingerprint_level = 3) {
  const MealyMachine& m = engine.machine();
  if (n_max < 0) throw StructuralError("n_max must be non-negative");
  if (fingerprint_level < 1 || fingerprint_level > 7)
    throw StructuralError("fingerprint level must be in 1..7");
  if (generators.empty()) throw StructuralError("need at least one generator");
  for (const Word& g : generators) {
    Word gi = engine.reduce(invert(m, g));
    bool found = false;
    for (const Word& h : generators)
      if (engine.reduce(h) == gi) found = true;
    if (!found)
      throw StructuralError("generator set is not closed under inversion (missing inverse of " +
                            m.word_name(g) + ")");
  }

  GrowthReport report;
  report.fingerprint_level = fingerprint_level;
  for (const Word& g : generators) report.generators.push_back(m.word_name(g));

  std::vector<Word> reps;
  std::unordered_map<std::uint64_t, std::vector<std::uint32_t>> buckets;
  auto insert = [&](const Word& w) -> bool {  // true when w is a new element
    std::uint64_t h = detail::fingerprint(m, w, fingerprint_level);
    ++report.dedup.fingerprints;
    auto& bucket = buckets[h];
    if (!bucket.empty()) ++report.dedup.bucket_collisions;
    for (std::uint32_t idx : bucket) {
      ++report.dedup.equality_checks;
      try {
        if (engine.are_equal(w, reps[idx])) return false;
      } catch (const BudgetError& ex) {
        throw BudgetError("ball enumeration: deduplicating " + m.word_name(w) + " against " +
                          m.word_name(reps[idx]) + ": " + ex.what());
      }
    }
    bucket.push_back(static_cast<std::uint32_t>(reps.size()));
    reps.push_back(w);
    return true;
  };

  std::vector<Word> frontier;
  insert(Word{});
  frontier.push_back(Word{});
  report.sizes.push_back(1);
  for (int n = 1; n <= n_max; ++n) {
    std::vector<Word> next;
    for (const Word& u : frontier) {
      for (const Word& g : generators) {
        Word w = engine.reduce(u + g);
        if (w.size() < u.size() + g.size()) ++report.dedup.reduction_shortcuts;
        if (insert(w)) next.push_back(std::move(w));
      }
    }
    frontier = std::move(next);
    report.sizes.push_back(reps.size());
  }

  // descriptive exponent fits; nothing asymptotic is claimed
  report.fit.alpha_ref = std::log(8.0) / (std::log(8.0) - std::log(7.0 / 8.0));
  report.fit.disclaimer =
      "finite-range fit only: the computed ball sizes neither verify nor refute any "
      "asymptotic growth bound";
  std::vector<std::pair<double, double>> pts;  // (ln n, lnln b(n))
  for (std::size_t n = 2; n < report.sizes.size(); ++n)
    if (report.sizes[n] >= 3)
      pts.emplace_back(std::log(static_cast<double>(n)),
                       std::log(std::log(static_cast<double>(report.sizes[n]))));
  if (pts.size() >= 3) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (auto [x, y] : pts) {
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
    }
    double k = static_cast<double>(pts.size());
    report.fit.alpha_lsq = (k * sxy - sx * sy) / (k * sxx - sx * sx);
    auto [x1, y1] = pts[pts.size() - 2];
    auto [x2, y2] = pts[pts.size() - 1];
    report.fit.alpha_tail = (y2 - y1) / (x2 - x1);
    report.fit.valid = true;
  }
  return report;
}

// ---------------------------------------------------------------------------
// Activity: number of level-l vertices whose section is nontrivial.
// ---------------------------------------------------------------------------

/// Direct enumeration over all d^level vertices; the independent cross-check
/// for the recursive count. Capped at level 6.
inline std::uint64_t activity_direct(Engine& engine, const Word& w, int level) {
  if (level < 0) throw StructuralError("level must be non-negative");
  if (level > 6)
    throw StructuralError("activity_direct is capped at level 6; use activity_recursive");
  const MealyMachine& m = engine.machine();
  const auto d = static_cast<std::uint64_t>(m.alphabet());
  std::uint64_t total = 1;
  for (int t = 0; t < level; ++t) total *= d;
  std::uint64_t count = 0;
  for (std::uint64_t code = 0; code < total; ++code) {
    Word cur = engine.reduce(w);
    std::uint64_t div = total;
    for (int t = 0; t < level; ++t) {
      div /= d;
      auto x = static_cast<Letter>((code / div) % d) + 1;
      cur = engine.reduce(section(m, cur, x));
    }
    if (!engine.is_identity(cur)) ++count;
  }
  return count;
}

/// act_w(l) = sum over letters of act_{w_i}(l-1), act_u(0) = [u != id],
/// memoized on the closure of reduced words. Exact; throws on overflow.
inline std::uint64_t activity_recursive(Engine& engine, const Word& w, int level) {
  if (level < 0) throw StructuralError("level must be non-negative");
  if (level > 60) throw StructuralError("activity_recursive is capped at level 60");
  const MealyMachine& m = engine.machine();

  // closure of w under reduced sections, discovered breadth-first
  std::vector<Word> words;
  std::unordered_map<Word, std::size_t> index;
  Word w0 = engine.reduce(w);
  words.push_back(w0);
  index.emplace(w0, 0);
  std::vector<std::vector<std::size_t>> child;  // per word, d section indices
  for (std::size_t head = 0; head < words.size(); ++head) {
    std::vector<std::size_t> secs;
    for (Letter i = 1; i <= m.alphabet(); ++i) {
      Word s = engine.reduce(section(m, words[head], i));
      auto it = index.find(s);
      if (it == index.end()) {
        if (words.size() >= engine.budget().max_nodes)
          throw BudgetError("activity_recursive: word closure exceeds budget");
        it = index.emplace(std::move(s), words.size()).first;
        words.push_back(it->first);
      }
      secs.push_back(it->second);
    }
    child.push_back(std::move(secs));
  }

  std::vector<std::uint64_t> act(words.size());
  for (std::size_t k = 0; k < words.size(); ++k)
    act[k] = engine.is_identity(words[k]) ? 0 : 1;
  for (int l = 1; l <= level; ++l) {
    std::vector<std::uint64_t> next(words.size(), 0);
    for (std::size_t k = 0; k < words.size(); ++k)
      for (std::size_t c : child[k]) next[k] = detail::checked_add(next[k], act[c]);
    act = std::move(next);
  }
  return act[0];
}

// ---------------------------------------------------------------------------
// Sidki classification of single states.
// ---------------------------------------------------------------------------

struct ActivityProfile {
  std::string state;
  std::vector<std::uint64_t> values;  // act(1..l_max)
  enum class Class { bounded, polynomial, exponential } cls = Class::bounded;
  int degree = 0;     // polynomial degree; bounded = degree 0
  double lambda = 0;  // growth rate for the exponential class

  std::string class_name() const {
    switch (cls) {
      case Class::bounded: return "bounded";
      case Class::polynomial: return "polynomial";
      case Class::exponential: return "exponential";
    }
    return "?";
  }

  nlohmann::json to_json() const {
    nlohmann::json j;
    j["state"] = state;
    j["values"] = values;
    j["class"] = class_name();
    if (cls != Class::exponential) j["degree"] = degree;
    if (cls == Class::exponential) j["lambda"] = lambda;
    return j;
  }
};

namespace detail {

struct Scc {
  std::vector<int> comp;  // vertex -> component id, reverse topological
  int count = 0;
};

/// Iterative Tarjan on a multigraph (targets listed per multiplicity).
inline Scc tarjan(const std::vector<std::vector<int>>& adj) {
  int n = static_cast<int>(adj.size());
  Scc out;
  out.comp.assign(n, -1);
  std::vector<int> low(n, 0), idx(n, -1);
  std::vector<int> stck;
  std::vector<bool> on_stack(n, false);
  int counter = 0;
  struct Frame {
    int v;
    std::size_t child;
  };
  for (int root = 0; root < n; ++root) {
    if (idx[root] != -1) continue;
    std::vector<Frame> frames{{root, 0}};
    idx[root] = low[root] = counter++;
    stck.push_back(root);
    on_stack[root] = true;
    while (!frames.empty()) {
      Frame& f = frames.back();
      if (f.child < adj[f.v].size()) {
        int w = adj[f.v][f.child++];
        if (idx[w] == -1) {
          idx[w] = low[w] = counter++;
          stck.push_back(w);
          on_stack[w] = true;
          frames.push_back({w, 0});
        } else if (on_stack[w]) {
          low[f.v] = std::min(low[f.v], idx[w]);
        }
      } else {
        if (low[f.v] == idx[f.v]) {
          while (true) {
            int w = stck.back();
            stck.pop_back();
            on_stack[w] = false;
            out.comp[w] = out.count;
            if (w == f.v) break;
          }
          ++out.count;
        }
        int done = f.v;
        frames.pop_back();
        if (!frames.empty()) low[frames.back().v] = std::min(low[frames.back().v], low[done]);
      }
    }
  }
  return out;
}

/// Spectral radius of a small non-negative matrix by power iteration.
inline double spectral_radius(const std::vector<std::vector<double>>& mat) {
  std::size_t n = mat.size();
  if (n == 0) return 0.0;
  std::vector<double> v(n, 1.0);
  double lambda = 0.0;
  for (int it = 0; it < 500; ++it) {
    std::vector<double> next(n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) next[i] += mat[i][j] * v[j];
    double norm = 0.0;
    for (double x : next) norm = std::max(norm, x);
    if (norm == 0.0) return 0.0;
    for (double& x : next) x /= norm;
    if (it > 10 && std::abs(norm - lambda) < 1e-12) return norm;
    lambda = norm;
    v = std::move(next);
  }
  return lambda;
}

}  // namespace detail

/// Sidki classification of a single state. Build the multigraph on the
/// semantically nontrivial states; the state is exponential iff some
/// strongly-connected component reachable from it carries two distinct
/// directed cycles (its intra-component edge multiplicity exceeds its vertex
/// count), with rate the component's spectral radius. Otherwise the degree is
/// (max number of cycle-bearing components on one directed path) - 1, and
/// degree 0 is the bounded class.
inline ActivityProfile classify_activity(Engine& engine, StateId s, int l_max = 20) {
  const MealyMachine& m = engine.machine();
  const int n = m.state_count();
  std::vector<bool> nontrivial(n);
  for (StateId q = 0; q < n; ++q)
    nontrivial[q] = !engine.is_identity(Word(1, static_cast<char>(q)));

  ActivityProfile out;
  out.state = m.state(s).name;
  for (int l = 1; l <= l_max; ++l)
    out.values.push_back(activity_recursive(engine, Word(1, static_cast<char>(s)), l));

  if (!nontrivial[s]) return out;  // bounded, degree 0

  std::vector<std::vector<int>> adj(n);
  for (StateId q = 0; q < n; ++q) {
    if (!nontrivial[q]) continue;
    for (StateId t : m.state(q).transitions)
      if (t != kIdentity && nontrivial[t]) adj[q].push_back(t);
  }

  std::vector<bool> reach(n, false);
  std::vector<int> work{s};
  reach[s] = true;
  while (!work.empty()) {
    int v = work.back();
    work.pop_back();
    for (int t : adj[v])
      if (!reach[t]) {
        reach[t] = true;
        work.push_back(t);
      }
  }

  auto scc = detail::tarjan(adj);
  std::vector<int> comp_size(scc.count, 0), comp_edges(scc.count, 0);
  for (int v = 0; v < n; ++v) {
    if (!nontrivial[v] || !reach[v]) continue;
    ++comp_size[scc.comp[v]];
    for (int t : adj[v])
      if (scc.comp[t] == scc.comp[v]) ++comp_edges[scc.comp[v]];
  }

  double lambda = 0.0;
  bool exponential = false;
  for (int c = 0; c < scc.count; ++c) {
    if (comp_size[c] == 0 || comp_edges[c] <= comp_size[c]) continue;
    exponential = true;
    std::vector<int> verts;
    std::vector<int> pos(n, -1);
    for (int v = 0; v < n; ++v)
      if (reach[v] && nontrivial[v] && scc.comp[v] == c) {
        pos[v] = static_cast<int>(verts.size());
        verts.push_back(v);
      }
    std::vector<std::vector<double>> mat(verts.size(), std::vector<double>(verts.size(), 0.0));
    for (int v : verts)
      for (int t : adj[v])
        if (pos[t] >= 0) mat[pos[v]][pos[t]] += 1.0;
    lambda = std::max(lambda, detail::spectral_radius(mat));
  }
  if (exponential) {
    out.cls = ActivityProfile::Class::exponential;
    out.lambda = lambda;
    return out;
  }

  // longest chain of cycle-bearing components reachable from s
  std::vector<bool> cyclic(scc.count, false);
  for (int c = 0; c < scc.count; ++c)
    cyclic[c] = comp_size[c] > 1 || (comp_size[c] == 1 && comp_edges[c] >= 1);
  std::vector<int> best(scc.count, -1);
  for (int c = 0; c < scc.count; ++c)
    if (comp_size[c] > 0) best[c] = cyclic[c] ? 1 : 0;
  bool changed = true;
  while (changed) {
    changed = false;
    for (int v = 0; v < n; ++v) {
      if (!reach[v] || !nontrivial[v]) continue;
      int cv = scc.comp[v];
      for (int t : adj[v]) {
        int ct = scc.comp[t];
        if (ct == cv || best[ct] < 0) continue;
        int cand = (cyclic[cv] ? 1 : 0) + best[ct];
        if (cand > best[cv]) {
          best[cv] = cand;
          changed = true;
        }
      }
    }
  }
  int chains = best[scc.comp[s]];
  out.degree = std::max(0, chains - 1);
  out.cls = out.degree == 0 ? ActivityProfile::Class::bounded : ActivityProfile::Class::polynomial;
  return out;
}

inline ActivityProfile classify_activity(Engine& engine, const std::string& state_name,
                                         int l_max = 20) {
  return classify_activity(engine, engine.machine().state_id(state_name), l_max);
}

}  // namespace selfsim
