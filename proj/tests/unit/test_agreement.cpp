#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "argmine/agreement.hpp"
#include "argmine/error.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

using namespace argmine;

namespace {

Continuum two(std::size_t length, std::vector<Unit> a, std::vector<Unit> b) {
  return {length, {"A", "B"}, {std::move(a), std::move(b)}};
}

}  // namespace

TEST_CASE("identical unitizations give alpha 1") {
  const std::vector<Unit> u = {{1, 4, "X"}, {6, 9, "Y"}};
  const auto s = unitized_alpha(two(12, u, u));
  CHECK(s.alpha_u == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(s.observed_disagreement == 0.0);
  CHECK(s.per_label_alpha.at("X") == 1.0);
}

TEST_CASE("hand-computed two-coder example") {
  // L = 10, A marks [2,5) as X, B marks nothing:
  // D_o = 2 * 3^2 / (2 * 1 * 100) = 0.09
  // D_e = (2/10) * 3^2 * ((5-3+1) + (10-3+1)) / (20*19 - 3*2) = 0.052941...
  const auto s = unitized_alpha(two(10, {{2, 5, "X"}}, {}));
  CHECK(s.observed_disagreement == doctest::Approx(0.09).epsilon(1e-12));
  CHECK(s.expected_disagreement == doctest::Approx(0.2 * 99.0 / 374.0).epsilon(1e-12));
  CHECK(s.alpha_u == doctest::Approx(1.0 - 0.09 / (0.2 * 99.0 / 374.0)).epsilon(1e-12));
}

TEST_CASE("matches the formula oracle on random small continua") {
  Rng rng(4);
  for (int trial = 0; trial < 300; ++trial) {
    const auto d = fixture::random_continuum(rng, 30, 3, 3);
    const auto got = unitized_alpha(d.lib);
    const auto want = oracle::unitized_alpha(int(d.lib.length), d.ref);
    CHECK(got.observed_disagreement == doctest::Approx(want.d_o).epsilon(1e-9));
    CHECK(got.expected_disagreement == doctest::Approx(want.d_e).epsilon(1e-9));
    CHECK(got.alpha_u == doctest::Approx(want.alpha).epsilon(1e-9));
  }
}

TEST_CASE("shrinking an agreed unit raises observed disagreement") {
  Rng rng(8);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t L = 10 + rng.below(20);
    const std::size_t b = rng.below(L - 3);
    const std::size_t e = b + 2 + rng.below(L - b - 2);
    const Unit agreed{b, e, "X"};
    const auto base = unitized_alpha(two(L, {agreed}, {agreed}));
    const Unit shrunk{b + (rng.below(2) ? 1 : 0), e, "X"};
    const Unit smaller = shrunk.start == b ? Unit{b, e - 1, "X"} : shrunk;
    const auto changed = unitized_alpha(two(L, {agreed}, {smaller}));
    CHECK(changed.observed_disagreement > base.observed_disagreement);
  }
}

TEST_CASE("symmetric in annotator order") {
  Rng rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    auto d = fixture::random_continuum(rng, 25, 3, 3);
    const double a = unitized_alpha(d.lib).alpha_u;
    std::reverse(d.lib.annotators.begin(), d.lib.annotators.end());
    std::reverse(d.lib.units.begin(), d.lib.units.end());
    CHECK(unitized_alpha(d.lib).alpha_u == doctest::Approx(a).epsilon(1e-12));
  }
}

TEST_CASE("errors") {
  auto kind = [](const Continuum& c) {
    try {
      unitized_alpha(c);
    } catch (const Error& e) {
      return e.kind();
    }
    return ErrorKind::kInvalidArgument;
  };
  CHECK(kind({5, {"A"}, {{}}}) == ErrorKind::kTooFewAnnotators);
  CHECK(kind(two(0, {}, {})) == ErrorKind::kEmptyContinuum);
  CHECK(kind(two(5, {{3, 7, "X"}}, {})) == ErrorKind::kSpanOutOfBounds);
  CHECK(kind(two(9, {{1, 4, "X"}, {3, 6, "Y"}}, {})) == ErrorKind::kOverlappingSpans);
}

TEST_CASE("case continuum and batch report") {
  Rng rng(3);
  AnnotatedCase c = fixture::random_case(rng, "c1");
  c.raw_annotator_layers["ann1"] = c.gold_spans;
  c.raw_annotator_layers["ann2"] = c.gold_spans;
  const auto cont = build_continuum(c, Dimension::ArgType);
  std::size_t law_tokens = 0;
  for (const auto& p : c.paragraphs) law_tokens += p.in_law_section ? p.tokens.size() : 0;
  CHECK(cont.length == law_tokens);
  CHECK(cont.annotators == std::vector<std::string>{"ann1", "ann2"});
  CHECK(unitized_alpha(c, Dimension::Actor).alpha_u == doctest::Approx(1.0));

  AnnotatedCase single = fixture::random_case(rng, "c2");
  single.raw_annotator_layers["ann1"] = single.gold_spans;

  const auto rows = batch_report({c, single}, {{"b1", {"c1", "c2"}}, {"b2", {"c2"}}});
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].batch == "b1");
  CHECK(rows[0].cases == 1);
  REQUIRE(rows[0].alpha_arg_type.has_value());
  CHECK(*rows[0].alpha_arg_type == doctest::Approx(1.0));
  CHECK_FALSE(rows[0].notes.empty());
  CHECK(rows[1].cases == 0);
  CHECK_FALSE(rows[1].alpha_actor.has_value());
}

TEST_CASE("pairwise scores for three annotators") {
  Continuum c{20, {"a", "b", "c"}, {{{1, 5, "X"}}, {{1, 5, "X"}}, {{2, 6, "X"}}}};
  const auto pairs = pairwise_alpha(c);
  REQUIRE(pairs.size() == 3);
  CHECK(pairs[0].annotator_a == "a");
  CHECK(pairs[0].annotator_b == "b");
  CHECK(pairs[0].score.alpha_u == doctest::Approx(1.0));
  CHECK(pairs[1].score.alpha_u < 1.0);
}
