#include <doctest.h>

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "qtn/errors.hpp"
#include "qtn/nc_partition.hpp"
#include "qtn/polyomino.hpp"
#include "qtn/statistics.hpp"

using namespace qtn;

namespace {

// Reference enumeration of all set partitions of [1..n] via restricted
// growth strings, independent of the production scan.
std::vector<std::vector<std::vector<int>>> all_set_partitions(int n) {
  std::vector<std::vector<std::vector<int>>> out;
  std::vector<int> rgs(static_cast<std::size_t>(n), 0);
  while (true) {
    int block_count = *std::max_element(rgs.begin(), rgs.end()) + 1;
    std::vector<std::vector<int>> blocks(static_cast<std::size_t>(block_count));
    for (int i = 0; i < n; ++i)
      blocks[static_cast<std::size_t>(rgs[static_cast<std::size_t>(i)])].push_back(i + 1);
    out.push_back(blocks);
    int i = n - 1;
    while (i > 0) {
      int cap = *std::max_element(rgs.begin(), rgs.begin() + i) + 1;
      if (rgs[static_cast<std::size_t>(i)] < cap) break;
      --i;
    }
    if (i == 0) return out;
    ++rgs[static_cast<std::size_t>(i)];
    std::fill(rgs.begin() + i + 1, rgs.end(), 0);
  }
}

// Quadratic-pair crossing oracle: a < b < c < d with {a,c} and {b,d} split
// across two different blocks.
bool crossing_oracle(const std::vector<std::vector<int>>& blocks, int n) {
  std::vector<int> owner(static_cast<std::size_t>(n) + 1, -1);
  for (std::size_t b = 0; b < blocks.size(); ++b)
    for (int x : blocks[b]) owner[static_cast<std::size_t>(x)] = static_cast<int>(b);
  for (int a = 1; a <= n; ++a)
    for (int b = a + 1; b <= n; ++b)
      for (int c = b + 1; c <= n; ++c)
        for (int d = c + 1; d <= n; ++d)
          if (owner[a] == owner[c] && owner[b] == owner[d] && owner[a] != owner[b])
            return true;
  return false;
}

long long binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  long long out = 1;
  for (int i = 0; i < k; ++i) out = out * (n - i) / (i + 1);
  return out;
}

// Narayana count of partitions of [n] into exactly b noncrossing blocks.
long long narayana_count(int n, int b) {
  if (n == 0 || b < 1 || b > n) return 0;
  return binomial(n, b) * binomial(n, b - 1) / n;
}

}  // namespace

TEST_SUITE("combinatorics") {
  TEST_CASE("enumeration agrees with the brute-force oracle") {
    for (int n = 1; n <= 9; ++n) {
      auto reference = all_set_partitions(n);
      for (int k = 1; k <= n; ++k) {
        std::set<std::string> expected;
        std::size_t blocks_wanted = static_cast<std::size_t>(n - k + 1);
        for (const auto& blocks : reference)
          if (blocks.size() == blocks_wanted && !crossing_oracle(blocks, n))
            expected.insert(serialize_nc(NCPartition::from_blocks(n, blocks)));
        std::set<std::string> got;
        std::vector<std::string> ordered;
        for (const auto& p : enumerate_nc(n, k)) {
          REQUIRE(p.n == n);
          REQUIRE(p.blocks.size() == blocks_wanted);
          ordered.push_back(serialize_nc(p));
          got.insert(ordered.back());
        }
        CHECK(got == expected);
        CHECK(std::is_sorted(ordered.begin(), ordered.end()));
        CHECK(got.size() == ordered.size());
      }
    }
  }

  TEST_CASE("counts follow the Narayana numbers") {
    CHECK(enumerate_nc(14, 3).size() == 2366);
    CHECK(enumerate_nc(12, 3).size() == 1210);
    CHECK(enumerate_nc(10, 5).size() == 5292);
    for (int n = 1; n <= 11; ++n)
      for (int k = 1; k <= n; ++k)
        CHECK(static_cast<long long>(enumerate_nc(n, k).size()) ==
              narayana_count(n, n - k + 1));
  }

  TEST_CASE("serialization round-trips and rejects bad text") {
    for (int n = 1; n <= 8; ++n)
      for (int k = 1; k <= n; ++k)
        for (const auto& p : enumerate_nc(n, k))
          CHECK(parse_nc(serialize_nc(p), n) == p);

    CHECK_THROWS_AS(parse_nc("", 3), ParseError);
    CHECK_THROWS_AS(parse_nc("1,2|x", 3), ParseError);
    CHECK_THROWS_AS(parse_nc("1,2|2,3", 3), ParseError);    // duplicate element
    CHECK_THROWS_AS(parse_nc("1,2", 3), ParseError);        // misses 3
    CHECK_THROWS_AS(parse_nc("1,3|2,4", 4), ParseError);    // crossing
    CHECK_THROWS_AS(parse_nc("1,2|3,5", 4), ParseError);    // out of range
  }

  TEST_CASE("parse errors carry their diagnosis") {
    auto code_of = [](const std::string& text, int n) {
      try {
        parse_nc(text, n);
      } catch (const ParseError& e) {
        return e.code;
      }
      return ParseCode::Malformed;
    };
    CHECK(code_of("1,,2|3", 3) == ParseCode::Malformed);
    CHECK(code_of("1,2|2,3", 3) == ParseCode::NotPartition);
    CHECK(code_of("1,3|2,4", 4) == ParseCode::Crossing);
  }

  TEST_CASE("flip is an involution that preserves the block profile") {
    for (int n = 2; n <= 9; ++n)
      for (int k = 1; k <= n; ++k)
        for (const auto& p : enumerate_nc(n, k)) {
          NCPartition f = flip(p);
          CHECK(f.blocks.size() == p.blocks.size());
          CHECK(is_noncrossing(f.blocks, n));
          CHECK(flip(f) == p);
        }
  }

  TEST_CASE("shift and unshift invert each other") {
    for (int n = 3; n <= 9; ++n)
      for (const auto& p : enumerate_nc(n, 3)) {
        if (m_of(p) < n) {
          NCPartition s = shift(p);
          CHECK(m_of(s) == m_of(p) + 1);
          CHECK(skip(s) == skip(p));
          REQUIRE(unshift(s).has_value());
          CHECK(*unshift(s) == p);
        } else {
          CHECK_THROWS_AS(shift(p), ArgumentError);
        }
      }
    // A non-singleton block containing 1 has no predecessor.
    CHECK_FALSE(unshift(parse_nc("1,2|3", 3)).has_value());
  }

  TEST_CASE("three-element encoding round-trips and classifies shapes") {
    for (int n = 3; n <= 10; ++n)
      for (const auto& p : enumerate_nc(n, 3)) {
        NC3 e = to_nc3(p);
        CHECK(from_nc3(e) == p);
        CHECK(e.n == n);
        CHECK(e.a < e.d);
        CHECK(e.a < e.b);
        CHECK(e.b <= e.c);
        CHECK(e.c < e.d);
        std::size_t non_singletons = 0;
        for (const auto& block : p.blocks)
          if (block.size() > 1) ++non_singletons;
        if (e.shape == NC3Shape::Triple)
          CHECK(non_singletons == 1);
        else
          CHECK(non_singletons == 2);
      }
    CHECK(to_nc3(parse_nc("1,4|2,3", 4)).shape == NC3Shape::Nested);
    CHECK(to_nc3(parse_nc("1,2|3,4", 4)).shape == NC3Shape::Sequential);
    CHECK(to_nc3(parse_nc("1,2,4|3", 4)).shape == NC3Shape::Triple);
    CHECK_THROWS_AS(to_nc3(parse_nc("1|2|3|4", 4)), ArgumentError);
  }

  TEST_CASE("block tuples expose the blocks in min order") {
    auto tuple = to_nc3(parse_nc("1,4|2,3", 4)).block_tuple();
    CHECK(tuple == std::array<long long, 4>{1, 4, 2, 3});
    tuple = to_nc3(parse_nc("1,2|3,4", 4)).block_tuple();
    CHECK(tuple == std::array<long long, 4>{1, 2, 3, 4});
    tuple = to_nc3(parse_nc("1,3,4|2", 4)).block_tuple();
    CHECK(tuple == std::array<long long, 4>{1, 3, 3, 4});
  }

  TEST_CASE("polyomino counts match the Narayana numbers") {
    CHECK(enumerate_pp(2, 2).size() == 3);
    for (int w = 1; w <= 6; ++w)
      for (int h = 1; h <= 6; ++h)
        CHECK(enumerate_pp(w, h).size() == enumerate_nc(w + h - 1, w).size());
  }

  TEST_CASE("polyomino serialization round-trips") {
    for (int w = 1; w <= 5; ++w)
      for (int h = 1; h <= 5; ++h) {
        auto all = enumerate_pp(w, h);
        std::vector<std::string> texts;
        for (const auto& p : all) {
          CHECK(parse_pp(serialize_pp(p)) == p);
          texts.push_back(serialize_pp(p));
        }
        CHECK(std::is_sorted(texts.begin(), texts.end()));
      }
    CHECK(serialize_pp(Polyomino::from_paths(2, 2, "EENN", "NNEE")) == "2,2:EENN/NNEE");
  }

  TEST_CASE("path pairs must only meet at the endpoints") {
    CHECK_THROWS_AS(Polyomino::from_paths(2, 2, "ENEN", "NENE"), ArgumentError);
    CHECK_THROWS_AS(Polyomino::from_paths(3, 1, "EENE", "NEEE"), ArgumentError);
    CHECK_THROWS_AS(Polyomino::from_paths(2, 2, "EEN", "NEE"), ArgumentError);
    CHECK_THROWS_AS(Polyomino::from_paths(2, 2, "EEXN", "NNEE"), ArgumentError);
    CHECK_THROWS_AS(Polyomino::from_paths(0, 2, "", "NN"), ArgumentError);
  }

  TEST_CASE("transpose reflects across the diagonal") {
    for (int w = 1; w <= 5; ++w)
      for (int h = 1; h <= 5; ++h)
        for (const auto& p : enumerate_pp(w, h)) {
          Polyomino t = transpose(p);
          CHECK(t.w == h);
          CHECK(t.h == w);
          CHECK(transpose(t) == p);
        }
  }

  TEST_CASE("the cell labelling is a bijection onto noncrossing partitions") {
    for (int w = 1; w <= 5; ++w)
      for (int h = 1; h <= 5; ++h) {
        int n = w + h - 1;
        std::set<std::string> images;
        for (const auto& p : enumerate_pp(w, h)) {
          NCPartition nc = eta(p);
          CHECK(nc.n == n);
          CHECK(nc.blocks.size() == static_cast<std::size_t>(h));
          CHECK(is_noncrossing(nc.blocks, n));
          images.insert(serialize_nc(nc));
        }
        CHECK(images.size() == enumerate_pp(w, h).size());
        CHECK(images.size() == enumerate_nc(n, w).size());
      }
  }
}
