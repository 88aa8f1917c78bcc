#pragma once

#include <cstdint>
#include <numeric>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "selfsim/mealy.hpp"

namespace selfsim {

/// Labeled action graph of a generator set on the level-l vertices. Vertices
/// are all d^l words in lexicographic order (encoded base d, level-1 letter
/// most significant); self-loops are kept so every vertex has one out-edge
/// per generator.
struct SchreierGraph {
  int level = 0;
  int alphabet = 0;
  std::vector<std::string> generator_names;
  std::vector<std::vector<std::uint32_t>> images;  // [generator][vertex] -> vertex

  std::uint64_t vertex_count() const {
    std::uint64_t n = 1;
    for (int t = 0; t < level; ++t) n *= static_cast<std::uint64_t>(alphabet);
    return n;
  }

  std::string vertex_name(std::uint64_t code) const {
    if (level == 0) return "";
    std::string out;
    std::uint64_t div = 1;
    for (int t = 1; t < level; ++t) div *= static_cast<std::uint64_t>(alphabet);
    for (int t = 0; t < level; ++t) {
      auto letter = static_cast<int>((code / div) % static_cast<std::uint64_t>(alphabet)) + 1;
      if (t && alphabet > 9) out.push_back('.');
      out += std::to_string(letter);
      if (div > 1) div /= static_cast<std::uint64_t>(alphabet);
    }
    return out;
  }

  std::string to_dot() const {
    std::ostringstream os;
    os << "digraph schreier_level" << level << " {\n";
    std::uint64_t n = vertex_count();
    for (std::uint64_t v = 0; v < n; ++v) os << "  \"" << vertex_name(v) << "\";\n";
    for (std::uint64_t v = 0; v < n; ++v)
      for (std::size_t g = 0; g < images.size(); ++g)
        os << "  \"" << vertex_name(v) << "\" -> \"" << vertex_name(images[g][v])
           << "\" [label=\"" << generator_names[g] << "\"];\n";
    os << "}\n";
    return os.str();
  }

  /// Headerless src,dst,label rows, vertices in lexicographic order.
  std::string to_csv() const {
    std::ostringstream os;
    std::uint64_t n = vertex_count();
    for (std::uint64_t v = 0; v < n; ++v)
      for (std::size_t g = 0; g < images.size(); ++g)
        os << vertex_name(v) << "," << vertex_name(images[g][v]) << "," << generator_names[g]
           << "\n";
    return os.str();
  }

  nlohmann::json to_json() const {
    nlohmann::json j;
    j["level"] = level;
    j["alphabet"] = alphabet;
    j["generators"] = generator_names;
    std::uint64_t n = vertex_count();
    auto vertices = nlohmann::json::array();
    for (std::uint64_t v = 0; v < n; ++v) vertices.push_back(vertex_name(v));
    j["vertices"] = vertices;
    auto edges = nlohmann::json::array();
    for (std::uint64_t v = 0; v < n; ++v)
      for (std::size_t g = 0; g < images.size(); ++g)
        edges.push_back({{"src", vertex_name(v)},
                         {"dst", vertex_name(images[g][v])},
                         {"label", generator_names[g]}});
    j["edges"] = edges;
    return j;
  }

  /// Whether the graph is connected when edges are taken undirected.
  bool connected() const {
    std::uint64_t n = vertex_count();
    if (n <= 1) return true;
    std::vector<std::uint32_t> parent(n);
    std::iota(parent.begin(), parent.end(), 0);
    std::vector<std::uint32_t> rank(n, 0);
    auto find = [&](std::uint32_t x) {
      while (parent[x] != x) {
        parent[x] = parent[parent[x]];
        x = parent[x];
      }
      return x;
    };
    auto unite = [&](std::uint32_t a, std::uint32_t b) {
      a = find(a);
      b = find(b);
      if (a == b) return;
      if (rank[a] < rank[b]) std::swap(a, b);
      parent[b] = a;
      if (rank[a] == rank[b]) ++rank[a];
    };
    for (const auto& img : images)
      for (std::uint64_t v = 0; v < n; ++v) unite(static_cast<std::uint32_t>(v), img[v]);
    std::uint32_t root = find(0);
    for (std::uint64_t v = 1; v < n; ++v)
      if (find(static_cast<std::uint32_t>(v)) != root) return false;
    return true;
  }
};

/// Build the level-l Schreier graph of the given generator words.
inline SchreierGraph build_schreier(const MealyMachine& m,
                                    const std::vector<std::pair<std::string, Word>>& generators,
                                    int level) {
  if (level < 0) throw StructuralError("level must be non-negative");
  if (level > 7) throw StructuralError("Schreier graphs are capped at level 7");
  SchreierGraph g;
  g.level = level;
  g.alphabet = m.alphabet();
  std::uint64_t n = g.vertex_count();
  const auto d = static_cast<std::uint64_t>(m.alphabet());
  for (const auto& [name, word] : generators) {
    g.generator_names.push_back(name);
    std::vector<std::uint32_t> img(n);
    for (std::uint64_t code = 0; code < n; ++code) {
      // walk the levels once per vertex; cheap at the allowed sizes
      std::uint64_t out = 0;
      Word cur = word;
      std::uint64_t div = n / (level > 0 ? d : 1);
      if (level == 0) div = 1;
      for (int t = 0; t < level; ++t) {
        auto x = static_cast<Letter>((code / div) % d) + 1;
        auto [imgletter, sec] = step(m, cur, x);
        out = out * d + static_cast<std::uint64_t>(imgletter - 1);
        cur = std::move(sec);
        if (div > 1) div /= d;
      }
      img[code] = static_cast<std::uint32_t>(out);
    }
    g.images.push_back(std::move(img));
  }
  return g;
}

}  // namespace selfsim
