#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <chrono>
#include <cmath>

#include "argmine/error.hpp"
#include "argmine/tagger.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

using namespace argmine;

namespace {

ErrorKind kind_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  return ErrorKind::kInvalidArgument;
}

std::vector<TaggerExample> random_examples(Rng& rng, std::size_t vocab, std::size_t count) {
  std::vector<TaggerExample> out;
  for (std::size_t k = 0; k < count; ++k) {
    TaggerExample ex;
    const std::size_t n = 1 + rng.below(6);
    for (std::size_t i = 0; i < n; ++i) {
      ex.ids.push_back(int(rng.below(vocab)));
      ex.arg_targets.push_back(int(rng.below(31)));
      ex.actor_targets.push_back(int(rng.below(11)));
      ex.mask.push_back(rng.below(4) != 0);
    }
    ex.mask[0] = 1;
    out.push_back(ex);
  }
  return out;
}

std::vector<const TaggerExample*> pointers(const std::vector<TaggerExample>& v) {
  std::vector<const TaggerExample*> out;
  for (const auto& e : v) out.push_back(&e);
  return out;
}

TaggerConfig tiny(int epochs, std::uint64_t seed) {
  TaggerConfig cfg = fixture::overfit_config();
  cfg.embedding_dim = 6;
  cfg.hidden_dim = 5;
  cfg.epochs = epochs;
  cfg.seed = seed;
  return cfg;
}

}  // namespace

TEST_CASE("vocabulary") {
  const auto corpus = fixture::tagger_corpus();
  const auto v = build_vocab(corpus, 1);
  CHECK(v.tokens()[0] == "<pad>");
  CHECK(v.tokens()[1] == "<unk>");
  CHECK(v.id("applicant") > 1);
  CHECK(v.id("never-seen") == Vocab::kUnknown);
  CHECK(v.tokens()[2] == ".");  // every paragraph has two
  const auto rare = build_vocab(corpus, 1000);
  CHECK(rare.size() == 2);
}

TEST_CASE("config validation") {
  TaggerConfig c;
  c.hidden_dim = 0;
  CHECK(kind_of([&] { c.validate(); }) == ErrorKind::kConfigInvalid);
  c = {};
  c.learning_rate = -1;
  CHECK(kind_of([&] { c.validate(); }) == ErrorKind::kConfigInvalid);
  c = {};
  c.epochs = -1;
  CHECK(kind_of([&] { c.validate(); }) == ErrorKind::kConfigInvalid);
  c = {};
  c.batch_size = 0;
  CHECK(kind_of([&] { c.validate(); }) == ErrorKind::kConfigInvalid);
}

TEST_CASE("analytic gradient matches central differences") {
  Rng rng(4);
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    TaggerModel model(9, 4, 3, seed);
    // Move away from the zero biases so every block is exercised.
    for (auto& p : model.parameters()) p += rng.uniform(-0.3, 0.3);
    const auto examples = random_examples(rng, 9, 3);
    const auto batch = pointers(examples);
    for (Dimension task : {Dimension::ArgType, Dimension::Actor}) {
      std::vector<double> grad(model.parameters().size(), 0.0);
      const double l = model.loss_and_gradient(batch, task, grad);
      CHECK(l == doctest::Approx(model.loss(batch, task)).epsilon(1e-12));
      const double h = 1e-4;
      double diff = 0, norm_a = 0, norm_n = 0;
      for (std::size_t k = 0; k < grad.size(); ++k) {
        auto& p = model.parameters()[k];
        const double saved = p;
        p = saved + h;
        const double up = model.loss(batch, task);
        p = saved - h;
        const double down = model.loss(batch, task);
        p = saved;
        const double numeric = (up - down) / (2 * h);
        diff += (numeric - grad[k]) * (numeric - grad[k]);
        norm_a += grad[k] * grad[k];
        norm_n += numeric * numeric;
        if (std::abs(numeric) > 1e-4) CHECK(std::abs(numeric - grad[k]) / std::abs(numeric) <= 1e-3);
      }
      CHECK(std::sqrt(diff) / std::max(std::sqrt(norm_a), std::sqrt(norm_n)) <= 1e-3);
    }
  }
}

TEST_CASE("masked positions carry no loss") {
  Rng rng(9);
  TaggerModel model(12, 4, 3, 7);
  auto examples = random_examples(rng, 12, 4);
  const auto batch = pointers(examples);
  std::vector<double> g1(model.parameters().size()), g2(g1.size());
  const double l1 = model.loss_and_gradient(batch, Dimension::ArgType, g1);
  for (auto& ex : examples)
    for (std::size_t i = 0; i < ex.ids.size(); ++i)
      if (!ex.mask[i]) ex.arg_targets[i] = (ex.arg_targets[i] + 7) % 31;
  const double l2 = model.loss_and_gradient(batch, Dimension::ArgType, g2);
  CHECK(l1 == l2);
  CHECK(g1 == g2);
}

TEST_CASE("padding row starts at zero") {
  TaggerModel model(10, 4, 3, 2);
  const auto& b = model.blocks().front();
  CHECK(b.name == "embedding");
  for (std::size_t k = 0; k < b.cols; ++k) CHECK(model.parameters()[b.offset + k] == 0.0);
}

TEST_CASE("training is bitwise deterministic per seed") {
  const auto corpus = fixture::tagger_corpus();
  const auto split = fixture::all_in_train_and_dev(corpus);
  const auto a = train(split, corpus, tiny(3, 5));
  const auto b = train(split, corpus, tiny(3, 5));
  const auto c = train(split, corpus, tiny(3, 6));
  CHECK(a.checkpoint.parameters == b.checkpoint.parameters);
  CHECK(a.log.size() == 3);
  for (std::size_t e = 0; e < a.log.size(); ++e) CHECK(a.log[e].arg_loss == b.log[e].arg_loss);
  CHECK(a.checkpoint.parameters != c.checkpoint.parameters);
}

TEST_CASE("zero epochs return the initial model") {
  const auto corpus = fixture::tagger_corpus();
  const auto split = fixture::all_in_train_and_dev(corpus);
  const auto r = train(split, corpus, tiny(0, 8));
  const auto v = build_vocab(corpus, 1);
  const TaggerModel init(v.size(), 6, 5, 8);
  CHECK(r.checkpoint.parameters == init.parameters());
  CHECK(r.checkpoint.epoch == 0);
  REQUIRE(r.log.size() == 1);
  CHECK(r.checkpoint.dev.combined == doctest::Approx((r.checkpoint.dev.arg_macro_f1 + r.checkpoint.dev.actor_macro_f1) / 2));
}

TEST_CASE("empty splits") {
  const auto corpus = fixture::tagger_corpus();
  CorpusSplit s;
  s.dev = {"syn-0"};
  CHECK(kind_of([&] { train(s, corpus, tiny(1, 0)); }) == ErrorKind::kEmptySplit);
  s = {{"syn-0"}, {}, {}};
  CHECK(kind_of([&] { train(s, corpus, tiny(1, 0)); }) == ErrorKind::kEmptySplit);
}

TEST_CASE("overfits the synthetic corpus") {
  const auto corpus = fixture::tagger_corpus();
  const auto split = fixture::all_in_train_and_dev(corpus);
  const auto t0 = std::chrono::steady_clock::now();
  const auto r = train(split, corpus, fixture::overfit_config());
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const auto acc = fixture::token_accuracy(r.checkpoint, corpus);
  MESSAGE("overfit: arg ", acc.arg, " actor ", acc.actor, " epoch ", r.checkpoint.epoch, " in ", seconds, " s");
  CHECK(acc.arg >= 0.99);
  CHECK(acc.actor >= 0.99);
  CHECK(seconds < 120);

  // The kept checkpoint is the best combined dev epoch.
  double best = -1;
  for (const auto& e : r.log) best = std::max(best, e.dev.combined);
  CHECK(r.checkpoint.dev.combined == best);

  // Moving average of the epoch loss (window 10) never rises.
  std::vector<double> total;
  for (const auto& e : r.log) total.push_back(e.arg_loss + e.actor_loss);
  double prev = INFINITY;
  for (std::size_t e = 10; e <= total.size(); ++e) {
    double avg = 0;
    for (std::size_t k = e - 10; k < e; ++k) avg += total[k] / 10;
    CHECK(avg <= prev + 1e-9);
    prev = avg;
  }

  for (const auto& c : corpus)
    for (const auto& p : predict(r.checkpoint, c)) {
      CHECK(oracle::valid_bio(p.arg_type.labels));
      CHECK(oracle::valid_bio(p.actor.labels));
    }
}

TEST_CASE("checkpoint JSON round trip") {
  const auto corpus = fixture::tagger_corpus();
  const auto split = fixture::all_in_train_and_dev(corpus);
  const auto r = train(split, corpus, tiny(2, 3));
  const auto text = checkpoint_to_json(r.checkpoint, R"({"tool": "test"})");
  const auto back = checkpoint_from_json(text);
  CHECK(back.parameters == r.checkpoint.parameters);
  CHECK(back.vocab.tokens() == r.checkpoint.vocab.tokens());
  CHECK(back.config.hidden_dim == 5);
  CHECK(back.epoch == r.checkpoint.epoch);
  for (const auto& c : corpus) {
    const auto p1 = predict(r.checkpoint, c);
    const auto p2 = predict(back, c);
    for (std::size_t k = 0; k < p1.size(); ++k) CHECK(p1[k].arg_type.labels == p2[k].arg_type.labels);
  }
  CHECK(kind_of([] { checkpoint_from_json("{}"); }) == ErrorKind::kParse);
  auto broken = r.checkpoint;
  broken.parameters.pop_back();
  CHECK(kind_of([&] { checkpoint_from_json(checkpoint_to_json(broken)); }) == ErrorKind::kParse);
}

TEST_CASE("predictions cover every token with valid tags") {
  const auto corpus = fixture::tagger_corpus();
  const auto split = fixture::all_in_train_and_dev(corpus);
  const auto r = train(split, corpus, tiny(1, 11));
  Rng rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const auto c = fixture::random_case(rng, "x");
    const auto pred = predict(r.checkpoint, c);
    REQUIRE(pred.size() == c.paragraphs.size());
    for (std::size_t k = 0; k < pred.size(); ++k) {
      CHECK(pred[k].arg_type.labels.size() == c.paragraphs[k].tokens.size());
      CHECK(oracle::valid_bio(pred[k].arg_type.labels));
      CHECK(oracle::valid_bio(pred[k].actor.labels));
    }
  }
}
