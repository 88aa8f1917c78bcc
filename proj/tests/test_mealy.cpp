#include <random>

#include <catch2/catch_amalgamated.hpp>

#include "selfsim/catalog.hpp"
#include "selfsim/mealy.hpp"

using namespace selfsim;

namespace {

// Independent oracle: the three defining states hard-coded as raw arrays and
// a naive recursive single-state action. Words act leftmost state first.
// Shares no code with the library's section-propagation path.
namespace oracle {

constexpr int kPerm[3][8] = {
    {1, 2, 4, 3, 8, 7, 6, 5},  // a = (34)(67)(58)
    {2, 3, 1, 5, 6, 4, 7, 8},  // b = (123)(456)
    {3, 1, 2, 6, 4, 5, 7, 8},  // b^-1 = (132)(465)
};
constexpr int kTrans[3][8] = {
    {0, -1, -1, -1, -1, -1, -1, -1},  // a: section a at letter 1
    {-1, -1, -1, -1, -1, -1, 1, 2},   // b: sections b, b^-1 at 7, 8
    {-1, -1, -1, -1, -1, -1, 2, 1},   // b^-1: sections b^-1, b at 7, 8
};

std::vector<int> apply_state(int s, std::vector<int> v) {
  if (v.empty()) return v;
  int head = v.front();
  std::vector<int> tail(v.begin() + 1, v.end());
  int t = kTrans[s][head - 1];
  if (t != -1) tail = apply_state(t, std::move(tail));
  std::vector<int> out{kPerm[s][head - 1]};
  out.insert(out.end(), tail.begin(), tail.end());
  return out;
}

std::vector<int> apply_word(const std::vector<int>& word, std::vector<int> v) {
  for (int s : word) v = apply_state(s, std::move(v));
  return v;
}

}  // namespace oracle

const CatalogEntry& G() {
  static CatalogEntry entry = load("G");
  return entry;
}

std::vector<int> to_oracle(const MealyMachine& m, const Word& w) {
  std::vector<int> out;
  for (char c : w) out.push_back(m.state(c).name == "a" ? 0 : (m.state(c).name == "b" ? 1 : 2));
  return out;
}

std::vector<Word> small_words(const MealyMachine& m, int max_len) {
  std::vector<Word> out{Word{}};
  std::size_t begin = 0;
  for (int len = 1; len <= max_len; ++len) {
    std::size_t end = out.size();
    for (std::size_t k = begin; k < end; ++k)
      for (StateId s = 0; s < m.state_count(); ++s) {
        Word w = out[k];
        w.push_back(static_cast<char>(s));
        out.push_back(std::move(w));
      }
    begin = end;
  }
  return out;
}

std::vector<VertexWord> sample_vertices(int alphabet, int max_level, int count,
                                        std::uint32_t seed) {
  std::mt19937 rng(seed);
  std::vector<VertexWord> out;
  for (int k = 0; k < count; ++k) {
    int level = static_cast<int>(rng() % (max_level + 1));
    VertexWord v;
    for (int t = 0; t < level; ++t) v.push_back(static_cast<int>(rng() % alphabet) + 1);
    out.push_back(std::move(v));
  }
  return out;
}

}  // namespace

TEST_CASE("defining recursion: root permutations and sections") {
  const MealyMachine& m = G().machine;
  CHECK(root_perm(m, m.parse_word("a")) == Perm::parse("(34)(67)(58)", 8));
  CHECK(root_perm(m, Word{}).is_identity());
  CHECK(m.word_name(section(m, m.parse_word("b"), 8)) == "b-1");
  CHECK(section(m, m.parse_word("b"), 3).empty());
  CHECK(m.word_compact(section(m, m.parse_word("aa"), 1)) == "aa");
  CHECK_THROWS_AS(section(m, m.parse_word("b"), 9), StructuralError);
  CHECK_THROWS_AS(section(m, m.parse_word("b"), 0), StructuralError);
}

TEST_CASE("root_perm of ab against the brute-force composition oracle") {
  const MealyMachine& m = G().machine;
  // compose the defining permutations directly, a evaluated first
  std::vector<int> expect(8);
  for (int i = 1; i <= 8; ++i) expect[i - 1] = oracle::kPerm[1][oracle::kPerm[0][i - 1] - 1];
  CHECK(root_perm(m, m.parse_word("ab")) == Perm::from_images(expect));
  // frozen value of that composition: an 8-cycle, hence (ab)^8 fixes level 1
  CHECK(expect == std::vector<int>{2, 3, 5, 1, 8, 7, 4, 6});
  CHECK(root_perm(m, m.parse_word("ab")).order() == 8);
}

TEST_CASE("apply agrees with the naive recursive oracle") {
  const MealyMachine& m = G().machine;
  auto words = small_words(m, 4);
  auto vertices = sample_vertices(8, 6, 40, 20240501);
  for (const Word& w : words) {
    for (const VertexWord& v : vertices) {
      CHECK(apply(m, w, v) == oracle::apply_word(to_oracle(m, w), v));
    }
  }
}

TEST_CASE("apply: worked examples") {
  const MealyMachine& m = G().machine;
  CHECK(apply(m, m.parse_word("b"), {1, 7}) == VertexWord{2, 7});
  CHECK(apply(m, Word{}, {5, 3, 2}) == VertexWord{5, 3, 2});
  CHECK(apply(m, m.parse_word("a"), {1, 1, 1}) == VertexWord{1, 1, 1});
  CHECK(apply(m, m.parse_word("abab-1a"), {2}) == VertexWord{7});
  CHECK_THROWS_AS(apply(m, m.parse_word("a"), {9}), StructuralError);
}

TEST_CASE("action homomorphism: u then v composes") {
  const MealyMachine& m = G().machine;
  auto words = small_words(m, 3);
  auto vertices = sample_vertices(8, 6, 12, 77);
  for (const Word& u : words)
    for (const Word& v : words)
      for (const VertexWord& x : vertices)
        CHECK(apply(m, u + v, x) == apply(m, v, apply(m, u, x)));
}

TEST_CASE("root-perm homomorphism") {
  const MealyMachine& m = G().machine;
  auto words = small_words(m, 3);
  for (const Word& u : words)
    for (const Word& v : words)
      CHECK(root_perm(m, u + v) == root_perm(m, u).then(root_perm(m, v)));
}

TEST_CASE("each generator acts bijectively on every level up to 4") {
  const MealyMachine& m = G().machine;
  for (const char* gen : {"a", "b", "b-1"}) {
    Word g = m.parse_word(gen);
    for (int level = 0; level <= 4; ++level) {
      std::uint64_t count = 1;
      for (int t = 0; t < level; ++t) count *= 8;
      std::vector<bool> hit(count, false);
      // enumerate vertices in lexicographic order
      VertexWord v(level, 1);
      for (std::uint64_t code = 0; code < count; ++code) {
        std::uint64_t c = code;
        for (int t = level - 1; t >= 0; --t) {
          v[t] = static_cast<int>(c % 8) + 1;
          c /= 8;
        }
        VertexWord img = apply(m, g, v);
        std::uint64_t enc = 0;
        for (int t = 0; t < level; ++t) enc = enc * 8 + static_cast<std::uint64_t>(img[t] - 1);
        CHECK_FALSE(hit[enc]);
        hit[enc] = true;
      }
    }
  }
}

TEST_CASE("section law: apply(w, i.x) = sigma_w(i) . apply(w_i, x)") {
  const MealyMachine& m = G().machine;
  auto words = small_words(m, 3);
  std::mt19937 rng(99);
  auto vertices = sample_vertices(8, 5, 10, 4242);
  for (const Word& w : words) {
    for (Letter i = 1; i <= 8; ++i) {
      const VertexWord& x = vertices[rng() % vertices.size()];
      VertexWord ix{i};
      ix.insert(ix.end(), x.begin(), x.end());
      VertexWord lhs = apply(m, w, ix);
      VertexWord rhs{root_image(m, w, i)};
      VertexWord tail = apply(m, section(m, w, i), x);
      rhs.insert(rhs.end(), tail.begin(), tail.end());
      CHECK(lhs == rhs);
    }
  }
}

TEST_CASE("invert: reversal with inverse states, and the inverse law") {
  const MealyMachine& m = G().machine;
  CHECK(m.word_name(invert(m, m.parse_word("b"))) == "b-1");
  CHECK(invert(m, Word{}).empty());
  CHECK(m.word_name(invert(m, m.parse_word("ab"))) == "b-1 a");
  auto words = small_words(m, 4);
  auto vertices = sample_vertices(8, 5, 8, 31337);
  for (const Word& w : words)
    for (const VertexWord& v : vertices)
      CHECK(apply(m, invert(m, w), apply(m, w, v)) == v);
}

TEST_CASE("mechanically derived inverse of b equals the stored third line") {
  const MealyMachine& m = G().machine;
  StateDef synth = m.synthesize_inverse(m.state_id("b"));
  const StateDef& stored = m.state(m.state_id("b-1"));
  CHECK(synth.perm == stored.perm);
  CHECK(synth.transitions == stored.transitions);
}

TEST_CASE("fixes_vertex") {
  const MealyMachine& m = G().machine;
  CHECK(fixes_vertex(m, m.parse_word("a"), {1}));
  CHECK_FALSE(fixes_vertex(m, m.parse_word("b"), {1}));
  // b conjugated by abab, written leftmost-first, stabilizes vertex 1
  CHECK(fixes_vertex(m, m.parse_word("(abab)^-1 b abab"), {1}));
}

TEST_CASE("word grammar") {
  const MealyMachine& m = G().machine;
  CHECK(m.parse_word("(ab)^16").size() == 32);
  CHECK(m.parse_word("a b a b-1 a") == m.parse_word("abab-1a"));
  CHECK(m.parse_word("a.b.a.b-1.a") == m.parse_word("abab-1a"));
  CHECK(m.parse_word("id").empty());
  CHECK(m.parse_word("").empty());
  CHECK(m.parse_word("b^-1") == m.parse_word("b-1"));
  CHECK(m.parse_word("(ab)^-2") == m.parse_word("b-1ab-1a"));
  CHECK(m.parse_word("(ab)^0").empty());
  CHECK(m.parse_word("((ab)^2 b)^2") == m.parse_word("ababb ababb"));
  CHECK_THROWS_AS(m.parse_word("xyz"), StructuralError);
  CHECK_THROWS_AS(m.parse_word("a^"), StructuralError);
  CHECK_THROWS_AS(m.parse_word("(ab"), StructuralError);
  CHECK_THROWS_AS(m.parse_word("a)"), StructuralError);
  // round-trip through display names
  for (const Word& w : small_words(m, 3)) CHECK(m.parse_word(m.word_name(w)) == w);
}

TEST_CASE("vertex parsing") {
  CHECK(parse_vertex("1,7", 8) == VertexWord{1, 7});
  CHECK(parse_vertex("17", 8) == VertexWord{1, 7});
  CHECK(parse_vertex("", 8).empty());
  CHECK(parse_vertex("3", 8) == VertexWord{3});
  CHECK_THROWS_AS(parse_vertex("0", 8), StructuralError);
  CHECK_THROWS_AS(parse_vertex("9", 8), StructuralError);
  CHECK(vertex_name({2, 7}) == "2,7");
  CHECK(vertex_name({}) == "");
}

TEST_CASE("machine validation rejects malformed data") {
  auto perm8 = Perm::parse("(12)", 8);
  std::vector<StateId> idtrans(8, kIdentity);
  // transitions of the wrong arity
  CHECK_THROWS_AS(MealyMachine(Alphabet{8}, {{"s", perm8, {kIdentity, kIdentity}}},
                               {{"s", "s"}}, {}),
                  StructuralError);
  // degree mismatch
  CHECK_THROWS_AS(MealyMachine(Alphabet{4}, {{"s", perm8, {kIdentity, kIdentity, kIdentity, kIdentity}}},
                               {{"s", "s"}}, {}),
                  StructuralError);
  // reserved name
  CHECK_THROWS_AS(MealyMachine(Alphabet{8}, {{"id", perm8, idtrans}}, {{"id", "id"}}, {}),
                  StructuralError);
  // missing inverse pairing
  CHECK_THROWS_AS(MealyMachine(Alphabet{8}, {{"s", perm8, idtrans}}, {}, {}), StructuralError);
  // declared order not a multiple of the root permutation's order
  CHECK_THROWS_AS(MealyMachine(Alphabet{8}, {{"s", perm8, idtrans}}, {{"s", "s"}}, {{"s", 3}}),
                  StructuralError);
  // self-paired state cannot declare order above 2
  std::vector<StateId> selftrans(8, kIdentity);
  CHECK_THROWS_AS(MealyMachine(Alphabet{8}, {{"s", Perm::identity(8), selftrans}}, {{"s", "s"}},
                               {{"s", 3}}),
                  StructuralError);
}
