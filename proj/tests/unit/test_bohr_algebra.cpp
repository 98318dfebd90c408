#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "support.hpp"

#include <random>

#include "measurelab/bohr_algebra.hpp"

using namespace mlab;

namespace {

const BasisPtr kBasis = SymbolBasis::make({"u1", "u2", "u3"});

FrequencyVector u(std::size_t i) { return FrequencyVector::unit(kBasis, i); }

FrequencyVector vec(const std::vector<std::string>& coords) { return FrequencyVector::parse(kBasis, coords); }

FrequencyVector random_vector(std::mt19937_64& eng) {
  std::uniform_int_distribution<int> num(-4, 4), den(1, 4);
  std::vector<mpq_class> c;
  for (int i = 0; i < 3; ++i) {
    mpq_class q(num(eng), den(eng));
    q.canonicalize();
    c.push_back(q);
  }
  return FrequencyVector(kBasis, c);
}

FrequencyVector combine(const IntVector& m, const IndependentSet& g) {
  auto k = FrequencyVector::zero(g.basis());
  for (std::size_t i = 0; i < m.size(); ++i) k = k + g[i] * m[i];
  return k;
}

}  // namespace

TEST_CASE("rationals") {
  CHECK(parse_rational("3/6") == mpq_class(1, 2));
  CHECK(parse_rational(" -4 ") == -4);
  CHECK(format_rational(parse_rational("-10/4")) == "-5/2");
  CHECK(format_rational(mpq_class(7)) == "7");
  CHECK_ERRC(parse_rational("1/0"), Errc::Parse);
  CHECK_ERRC(parse_rational("0.5"), Errc::Parse);
  CHECK_ERRC(parse_rational(""), Errc::Parse);
}

TEST_CASE("basis and vectors") {
  CHECK_ERRC(SymbolBasis::make({}), Errc::BadBasis);
  CHECK_ERRC(SymbolBasis::make({"a", "a"}), Errc::BadBasis);
  CHECK_ERRC(FrequencyVector(kBasis, {1, 2}), Errc::SizeMismatch);
  CHECK((u(0) + u(1) - u(0)) == u(1));
  CHECK((u(0) * mpq_class(1, 2)).to_strings() == std::vector<std::string>{"1/2", "0", "0"});
  CHECK(u(1) < u(0));
  const auto other = FrequencyVector::unit(SymbolBasis::make({"a", "b", "c"}), 0);
  CHECK_ERRC(u(0) + other, Errc::BasisMismatch);
}

TEST_CASE("rank_over_Q examples") {
  const std::vector<FrequencyVector> a = {u(0), u(1)};
  const std::vector<FrequencyVector> b = {u(0), u(0) * 2};
  const std::vector<FrequencyVector> c = {u(0) + u(1), u(0) - u(1), u(0)};
  CHECK(rank_over_Q(a) == 2);
  CHECK(rank_over_Q(b) == 1);
  CHECK(rank_over_Q(c) == 2);
  const std::vector<FrequencyVector> zero = {FrequencyVector::zero(kBasis)};
  CHECK(rank_over_Q(zero) == 0);
}

TEST_CASE("find_integer_relation") {
  const std::vector<FrequencyVector> b = {u(0), u(0) * 2};
  CHECK(*find_integer_relation(b, 5) == IntVector{2, -1});
  const std::vector<FrequencyVector> far = {u(0), u(0) * 7};
  CHECK(!find_integer_relation(far, 5).has_value());
  CHECK(*find_integer_relation(far, 7) == IntVector{7, -1});
}

TEST_CASE("make_independent_set examples") {
  CHECK_NOTHROW(IndependentSet::make({vec({"1/2", "0", "0"}), vec({"0", "1/3", "0"}), u(2)}));
  try {
    IndependentSet::make({u(0), u(1), u(0) + u(1)});
    FAIL("expected DEPENDENT_SET");
  } catch (const DependentSetError& e) {
    CHECK(e.code() == Errc::DependentSet);
    REQUIRE(e.witness().has_value());
    CHECK(*e.witness() == IntVector{1, 1, -1});
  }
  CHECK_ERRC(IndependentSet::make({}), Errc::EmptySet);
}

TEST_CASE("decompose examples") {
  const auto g = IndependentSet::make({u(0) + u(2), u(1) * mpq_class(1, 3)});
  CHECK(decompose(g[0] * 3 - g[1] * 2, g) == IntVector{3, -2});
  CHECK_ERRC(decompose(g[0] * mpq_class(1, 2), g), Errc::NotIntegral);
  const auto one = IndependentSet::make({u(0)});
  CHECK_ERRC(decompose(u(1), one), Errc::NotInSpan);
}

TEST_CASE("refinement_matrix examples") {
  CHECK(refinement_matrix(IndependentSet::make({u(0) * 2}), IndependentSet::make({u(0)})) == IntMatrix{{2}});
  CHECK(refinement_matrix(IndependentSet::make({u(0) + u(1), u(0) - u(1)}), IndependentSet::make({u(0), u(1)})) ==
        IntMatrix{{1, 1}, {1, -1}});
  CHECK_ERRC(refinement_matrix(IndependentSet::make({u(0) * mpq_class(1, 2)}), IndependentSet::make({u(0)})),
             Errc::NotRefinement);
}

TEST_CASE("scale examples") {
  const auto k = u(0) * 3 + u(1);
  CHECK(scale(k, 1) == k);
  CHECK(scale(u(0) * 3, mpq_class(2, 3)) == u(0) * 2);
  CHECK_ERRC(scale(k, 0), Errc::ZeroLambda);
}

TEST_CASE("property: rank agrees with bounded relation search on random small sets") {
  std::mt19937_64 eng(17);
  for (int t = 0; t < 400; ++t) {
    const std::size_t n = 1 + t % 3;
    std::vector<FrequencyVector> v;
    for (std::size_t i = 0; i < n; ++i) v.push_back(random_vector(eng));
    const auto rel = find_integer_relation(v, 5);
    if (rank_over_Q(v) == n) CHECK(!rel.has_value());
    if (rel) {
      auto sum = FrequencyVector::zero(kBasis);
      for (std::size_t i = 0; i < n; ++i) sum = sum + v[i] * (*rel)[i];
      CHECK(sum.is_zero());
      CHECK(rank_over_Q(v) < n);
    }
  }
}

TEST_CASE("property: decompose then recompose, scaling keeps coordinates") {
  std::mt19937_64 eng(23);
  std::uniform_int_distribution<int> coef(-9, 9);
  int made = 0;
  for (int t = 0; t < 300 && made < 100; ++t) {
    std::vector<FrequencyVector> v;
    const std::size_t n = 1 + t % 3;
    for (std::size_t i = 0; i < n; ++i) v.push_back(random_vector(eng));
    if (rank_over_Q(v) != n) continue;
    ++made;
    const auto g = IndependentSet::make(v);
    IntVector m;
    for (std::size_t i = 0; i < n; ++i) m.push_back(coef(eng));
    const auto k = combine(m, g);
    CHECK(decompose(k, g) == m);
    // independence and coordinates survive k -> lambda k
    const mpq_class lambda = parse_rational(std::to_string(2 * t + 3) + "/7");
    const auto lg = scale(g, lambda);
    std::vector<FrequencyVector> lv(lg.generators());
    CHECK(rank_over_Q(lv) == n);
    CHECK(decompose(scale(k, lambda), lg) == m);
  }
  CHECK(made == 100);
}

TEST_CASE("property: refinement matrices compose") {
  std::mt19937_64 eng(31);
  std::uniform_int_distribution<int> entry(-2, 2);
  const auto fine = IndependentSet::make({vec({"1/2", "0", "0"}), vec({"0", "1/3", "0"}), vec({"0", "0", "1/4"})});
  for (int t = 0; t < 50; ++t) {
    auto random_sub = [&](const IndependentSet& g, std::size_t rows) -> std::optional<IndependentSet> {
      std::vector<FrequencyVector> v;
      for (std::size_t r = 0; r < rows; ++r) {
        IntVector m;
        for (std::size_t i = 0; i < g.size(); ++i) m.push_back(entry(eng));
        v.push_back(combine(m, g));
      }
      if (rank_over_Q(v) != rows) return std::nullopt;
      return IndependentSet::make(v);
    };
    const auto mid = random_sub(fine, 3);
    if (!mid) continue;
    const auto coarse = random_sub(*mid, 2);
    if (!coarse) continue;
    CHECK(multiply(refinement_matrix(*coarse, *mid), refinement_matrix(*mid, fine)) ==
          refinement_matrix(*coarse, fine));
  }
}

TEST_CASE("large coordinates overflow cleanly") {
  const auto g = IndependentSet::make({u(0) * parse_rational("1/100000000000000000000")});
  CHECK_ERRC(decompose(u(0), g), Errc::Overflow);
}
