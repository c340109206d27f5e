#include <doctest.h>

#include <cmath>
#include <map>

#include "aiot/error.hpp"
#include "aiot/model.hpp"
#include "support.hpp"

using namespace aiot;
using aiot::test::as_sequence;

namespace {

ProbabilityModel model_of(std::initializer_list<std::pair<std::uint32_t, std::uint64_t>> weights) {
  std::vector<ModelEntry> entries;
  for (auto [s, w] : weights) entries.push_back({s, w});
  return ProbabilityModel(entries, ModelOrder::BySymbol);
}

double total_probability(const ProbabilityModel& m) {
  double sum = 0;
  for (std::size_t i = 0; i < m.size(); ++i) sum += m.probability(i);
  return sum;
}

}  // namespace

TEST_CASE("build_model counts frequencies") {
  auto m = build_model(as_sequence({0, 0, 1, 1}));
  REQUIRE(m.size() == 2);
  CHECK(m.probability(0) == 0.5);
  CHECK(m.probability(1) == 0.5);
  CHECK(m.cumulative(0) == 0.0);
  CHECK(m.cumulative(1) == 0.5);

  m = build_model(as_sequence({7}));
  REQUIRE(m.size() == 1);
  CHECK(m.entries()[0].symbol == 7);
  CHECK(m.probability(0) == 1.0);
  CHECK(m.cumulative(0) == 0.0);

  m = build_model(as_sequence({2, 1, 1, 1}));
  CHECK(cumulative_of(m, 1).probability == 0.75);
  CHECK(cumulative_of(m, 1).cumulative == 0.0);
  CHECK(cumulative_of(m, 2).probability == 0.25);
  CHECK(cumulative_of(m, 2).cumulative == 0.75);

  CHECK_THROWS_AS(build_model(as_sequence({})), Error);
}

TEST_CASE("build_model agrees with a brute-force count") {
  test::Rng rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    const auto xs = test::random_sequence(rng, 1 + rng() % 500, 2 + rng() % 255);
    const auto m = build_model(as_sequence(xs));
    std::map<std::uint32_t, std::uint64_t> counts;
    for (auto x : xs) ++counts[x];
    REQUIRE(m.size() == counts.size());
    CHECK(m.total() == xs.size());
    std::size_t i = 0;
    for (auto [s, c] : counts) {
      CHECK(m.entries()[i].symbol == s);
      CHECK(m.weight(i) == c);
      ++i;
    }
    CHECK(total_probability(m) == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("cumulative_of uses prefix sums") {
  const auto m = model_of({{'a', 5}, {'b', 3}, {'c', 2}});
  CHECK(cumulative_of(m, 'b').cumulative == doctest::Approx(0.5));
  CHECK(cumulative_of(m, 'b').probability == doctest::Approx(0.3));
  CHECK(cumulative_of(m, 'a').cumulative == 0.0);
  CHECK(cumulative_of(m, 'a').probability == doctest::Approx(0.5));
  CHECK(cumulative_of(m, 'c').cumulative == doctest::Approx(0.8));
  CHECK(cumulative_of(m, 'c').probability == doctest::Approx(0.2));
  try {
    cumulative_of(m, 'z');
    FAIL("expected UnknownSymbol");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::UnknownSymbol);
  }
}

TEST_CASE("ProbabilityModel validates its entries") {
  CHECK_THROWS_AS(model_of({{1, 0}}), Error);
  CHECK_THROWS_AS(model_of({{1, 2}, {1, 3}}), Error);
  CHECK_THROWS_AS(model_of({{kMaxSymbol + 1, 2}}), Error);
}

TEST_CASE("round_probabilities") {
  auto r = round_probabilities(model_of({{0, 12345}, {1, 87655}}), 3);
  REQUIRE(r.size() == 2);
  CHECK(r.probability(0) == doctest::Approx(0.123));
  CHECK(r.probability(1) == doctest::Approx(0.877));

  r = round_probabilities(model_of({{4, 9}}), 5);
  REQUIRE(r.size() == 1);
  CHECK(r.probability(0) == 1.0);

  SUBCASE("an entry that rounds to zero merges into its neighbour") {
    r = round_probabilities(model_of({{0, 4}, {1, 4996}, {2, 5000}}), 3);
    REQUIRE(r.size() == 2);
    CHECK(r.probability(0) == 0.5);
    CHECK(r.probability(1) == 0.5);
    CHECK(r.index_of(0) == r.index_of(1));
    CHECK(cumulative_of(r, 0).probability == 0.5);
  }
  SUBCASE("later absorbed entries merge downward") {
    r = round_probabilities(model_of({{0, 5000}, {1, 4996}, {2, 4}}), 3);
    CHECK(r.index_of(2) == r.index_of(1));
  }
  CHECK_THROWS_AS(round_probabilities(model_of({{0, 1}}), 0), Error);
}

TEST_CASE("round_probabilities keeps total mass and stays within half a unit") {
  test::Rng rng(11);
  for (int trial = 0; trial < 40; ++trial) {
    const auto base = build_model(as_sequence(test::zipf_sequence(rng, 2000, 200, 1.1)));
    for (int n = 3; n <= 6; ++n) {
      const auto r = round_probabilities(base, n);
      CHECK(total_probability(r) == doctest::Approx(1.0).epsilon(1e-12));
      for (std::size_t i = 0; i < r.size(); ++i) {
        const double unit = std::pow(10.0, -n);
        CHECK(std::abs(r.weight(i) * unit - base.probability(base.index_of(r.entries()[i].symbol))) <= 0.5 * unit + 1e-15);
      }
      for (std::size_t i = 0; i < base.size(); ++i) CHECK(r.find(base.entries()[i].symbol).has_value());
    }
  }
}

TEST_CASE("sort_descending orders by probability then symbol") {
  auto order = [](const ProbabilityModel& m) {
    std::vector<std::uint32_t> out;
    for (const auto& e : m.entries()) out.push_back(e.symbol);
    return out;
  };
  CHECK(order(sort_descending(model_of({{0, 2}, {1, 8}}))) == std::vector<std::uint32_t>{1, 0});
  CHECK(order(sort_descending(model_of({{0, 5}, {1, 5}}))) == std::vector<std::uint32_t>{0, 1});
  CHECK(order(sort_descending(model_of({{2, 3}, {5, 1}, {9, 6}}))) == std::vector<std::uint32_t>{9, 2, 5});
  CHECK(sort_descending(model_of({{2, 3}})).order() == ModelOrder::ByProbabilityDesc);
}

TEST_CASE("sort_descending agrees with std::sort") {
  test::Rng rng(5);
  for (int trial = 0; trial < 30; ++trial) {
    const auto m = build_model(as_sequence(test::zipf_sequence(rng, 800, 64, 0.7)));
    auto expected = m.entries();
    std::sort(expected.begin(), expected.end(), [](const ModelEntry& a, const ModelEntry& b) {
      return a.weight != b.weight ? a.weight > b.weight : a.symbol < b.symbol;
    });
    const auto sorted = sort_descending(m);
    CHECK(sorted.entries() == expected);
    CHECK(total_probability(sorted) == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("group_similar") {
  SUBCASE("equal probabilities at T = 0 form one group") {
    const auto g = group_similar(sort_descending(model_of({{10, 1}, {20, 1}})), 0.0);
    REQUIRE(g.size() == 1);
    CHECK(g.groups()[0].members == std::vector<std::uint32_t>{10, 20});
    CHECK(g.probability(0) == 1.0);
    CHECK(g.groups()[0].representative == 15);
  }
  SUBCASE("a threshold below every gap is the identity partition") {
    const auto sorted = sort_descending(model_of({{1, 1}, {2, 2}, {3, 4}, {4, 8}}));
    const auto g = group_similar(sorted, 0.01);
    REQUIRE(g.size() == sorted.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
      CHECK(g.groups()[i].members == std::vector<std::uint32_t>{sorted.entries()[i].symbol});
      CHECK(g.groups()[i].representative == sorted.entries()[i].symbol);
      CHECK(g.probability(i) == sorted.probability(i));
    }
  }
  SUBCASE("the size cap splits a run of equal symbols") {
    const auto sorted = sort_descending(model_of({{0, 1}, {1, 1}, {2, 1}, {3, 1}, {4, 1}, {5, 1}, {6, 1}}));
    const auto g = group_similar(sorted, 1e9, 6);
    REQUIRE(g.size() == 2);
    CHECK(g.groups()[0].members.size() == 6);
    CHECK(g.groups()[1].members.size() == 1);
  }
  SUBCASE("representative is the probability-weighted mean") {
    const auto g = group_similar(sort_descending(model_of({{0, 3}, {100, 1}})), 1.0);
    REQUIRE(g.size() == 1);
    CHECK(g.groups()[0].representative == 25);
  }
  CHECK_THROWS_AS(group_similar(model_of({{0, 1}}), 0.1), Error);
}

TEST_CASE("group_similar invariants") {
  test::Rng rng(23);
  for (int trial = 0; trial < 40; ++trial) {
    const auto base = build_model(as_sequence(test::zipf_sequence(rng, 3000, 256, 0.9)));
    const int n = 3 + trial % 4;
    const auto sorted = sort_descending(round_probabilities(base, n));
    const double T = std::pow(10.0, -n);
    const auto g = group_similar(sorted, T, 6);
    double mass = 0;
    std::size_t members = 0;
    for (std::size_t i = 0; i < g.size(); ++i) {
      const auto& grp = g.groups()[i];
      mass += g.probability(i);
      CHECK(grp.representative <= 255);
      std::size_t coded = 0;
      for (auto s : grp.members) {
        CHECK(g.group_of(s) == i);
        if (sorted.find(s) && sorted.entries()[*sorted.find(s)].symbol == s) {
          ++coded;
          const double head = sorted.probability(sorted.index_of(grp.members.front()));
          CHECK(std::abs(sorted.probability(sorted.index_of(s)) - head) <= T + 1e-12);
        }
      }
      CHECK(coded >= 1);
      CHECK(coded <= 6);
      members += grp.members.size();
    }
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(members == base.size());
    const auto index = g.index_model();
    CHECK(index.size() == g.size());
    CHECK(index.order() == ModelOrder::ByProbabilityDesc);
  }
}

TEST_CASE("QuantizerSpec") {
  const QuantizerSpec q(32);
  CHECK(q.step() == 8);
  CHECK(q.quantize(103) == 12);
  CHECK(q.quantize(0) == 0);
  CHECK(q.quantize(255) == 31);
  CHECK(q.dequantize(12) == 100);
  CHECK(q.dequantize(0) == 4);
  CHECK(q.dequantize(31) == 252);
  CHECK_THROWS_AS((void)q.dequantize(32), Error);
  CHECK_THROWS_AS(QuantizerSpec(1), Error);
  CHECK_THROWS_AS(QuantizerSpec(257), Error);

  std::map<int, int> counts;
  for (int p = 0; p < 256; ++p) {
    const auto level = q.quantize(static_cast<std::uint8_t>(p));
    ++counts[level];
    CHECK(std::abs(p - q.dequantize(level)) <= 4);
  }
  CHECK(counts.size() == 32);
  for (auto [level, c] : counts) CHECK(c == 8);
}

TEST_CASE("quantization is idempotent at every level count") {
  for (int levels = 2; levels <= 256; ++levels) {
    const QuantizerSpec q(levels);
    for (int p = 0; p < 256; ++p) {
      const auto level = q.quantize(static_cast<std::uint8_t>(p));
      REQUIRE(level < levels);
      const auto mid = q.dequantize(level);
      CHECK(q.quantize(mid) == level);
      CHECK(std::abs(p - mid) <= q.step() / 2 + (levels * q.step() > 256 ? q.step() : 0));
    }
  }
  const QuantizerSpec identity(256);
  for (int p = 0; p < 256; ++p) CHECK(identity.dequantize(identity.quantize(static_cast<std::uint8_t>(p))) == p);
}

TEST_CASE("entropy_bits") {
  CHECK(entropy_bits(model_of({{0, 1}, {1, 1}})) == doctest::Approx(1.0));
  CHECK(entropy_bits(model_of({{3, 9}})) == 0.0);
  CHECK(entropy_bits(model_of({{0, 1}, {1, 1}, {2, 1}, {3, 1}})) == doctest::Approx(2.0));
}
