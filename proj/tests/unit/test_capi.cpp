// Exercises the shared library through its C header only; the core is linked
// just to generate fixtures.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <string>

#include "argmine/argmine.h"
#include "argmine/corpus_io.hpp"
#include "fixtures.hpp"

namespace fs = std::filesystem;

namespace {

struct Str {
  char* p = nullptr;
  ~Str() { am_string_free(p); }
  char** out() { return &p; }
  std::string get() const { return p ? p : ""; }
};

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("argmine-capi-" + std::to_string(::getpid())) / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

fs::path skewed_dir() {
  static const fs::path dir = [] {
    const auto d = scratch("skewed");
    argmine::Rng rng(1);
    auto corpus = fixture::skewed_corpus(60, 42);
    for (auto& c : corpus) {
      fixture::add_annotators(c, rng);
      argmine::save_case(c, d);
    }
    return d;
  }();
  return dir;
}

am_corpus* load(const fs::path& p, std::size_t min_spans = 5) {
  am_corpus* c = nullptr;
  REQUIRE(am_corpus_load(p.c_str(), min_spans, &c, nullptr) == AM_OK);
  return c;
}

int count_lines(const std::string& s, const std::string& prefix) {
  int n = 0;
  std::size_t pos = 0;
  while (pos < s.size()) {
    const auto end = s.find('\n', pos);
    if (s.compare(pos, prefix.size(), prefix) == 0) ++n;
    if (end == std::string::npos) break;
    pos = end + 1;
  }
  return n;
}

}  // namespace

TEST_CASE("status and errors") {
  CHECK(std::string(am_version()).size() > 0);
  CHECK(std::string(am_status_name(AM_OK)) == "ok");
  CHECK(std::string(am_status_name(AM_ERR_DEGENERATE_CLASS)) == "DegenerateClass");
  am_corpus* c = nullptr;
  CHECK(am_corpus_load("/nonexistent/argmine", 5, &c, nullptr) == AM_ERR_IO);
  CHECK(c == nullptr);
  CHECK(std::string(am_last_error()).find("nonexistent") != std::string::npos);
  CHECK(am_corpus_load(nullptr, 5, &c, nullptr) == AM_ERR_INVALID_ARGUMENT);
  CHECK(am_corpus_size(nullptr) == 0);
  am_corpus_free(nullptr);
  am_string_free(nullptr);
}

TEST_CASE("corpus round trip, validation and stats") {
  am_corpus* c = load(skewed_dir());
  CHECK(am_corpus_size(c) == 60);
  Str id;
  REQUIRE(am_corpus_case_id(c, 0, id.out()) == AM_OK);
  CHECK(id.get() == "case-0000");
  CHECK(am_corpus_case_id(c, 60, id.out()) == AM_ERR_INVALID_ARGUMENT);

  Str report;
  std::size_t violations = 99;
  REQUIRE(am_corpus_validate(c, report.out(), &violations) == AM_OK);
  CHECK(violations == 0);

  Str stats;
  REQUIRE(am_corpus_stats(c, "# hdr", stats.out()) == AM_OK);
  CHECK(stats.get().rfind("# hdr\n", 0) == 0);
  CHECK(count_lines(stats.get(), "# table=") == 4);
  CHECK(stats.get().find("Application case") != std::string::npos);

  const auto copy = scratch("copy");
  REQUIRE(am_corpus_save(c, copy.c_str()) == AM_OK);
  am_corpus* back = load(copy);
  CHECK(am_corpus_size(back) == 60);
  am_corpus_free(back);

  Str warnings;
  am_corpus* strict = nullptr;
  REQUIRE(am_corpus_load(skewed_dir().c_str(), 30, &strict, warnings.out()) == AM_OK);
  CHECK(am_corpus_size(strict) < 60);
  CHECK(count_lines(warnings.get(), "") == int(60 - am_corpus_size(strict)));
  am_corpus_free(strict);
  am_corpus_free(c);
}

TEST_CASE("split, subset and gold encoding") {
  am_corpus* c = load(skewed_dir());
  Str a, b, warnings;
  REQUIRE(am_corpus_split(c, 0.8, 0.1, 0.1, 7, R"({"tool":"t"})", a.out(), warnings.out()) == AM_OK);
  REQUIRE(am_corpus_split(c, 0.8, 0.1, 0.1, 7, R"({"tool":"t"})", b.out(), nullptr) == AM_OK);
  CHECK(a.get() == b.get());
  CHECK((warnings.get().empty() || warnings.get().rfind("InfeasibleStratification", 0) == 0));

  std::size_t total = 0;
  for (const char* part : {"train", "dev", "test"}) {
    am_corpus* sub = nullptr;
    REQUIRE(am_corpus_subset(c, a.get().c_str(), part, &sub) == AM_OK);
    total += am_corpus_size(sub);
    am_corpus_free(sub);
  }
  CHECK(total == 60);
  am_corpus* sub = nullptr;
  CHECK(am_corpus_subset(c, a.get().c_str(), "holdout", &sub) == AM_ERR_INVALID_ARGUMENT);
  CHECK(am_corpus_split(c, 0.5, 0.1, 0.1, 7, nullptr, a.out(), nullptr) == AM_ERR_INVALID_ARGUMENT);

  Str tsv, metrics;
  REQUIRE(am_corpus_encode_tsv(c, "# h", tsv.out()) == AM_OK);
  CHECK(tsv.get().rfind("# h\n", 0) == 0);
  // No prediction columns in a gold-only table.
  CHECK(am_eval_tsv(tsv.get().c_str(), tsv.get().c_str(), "arg", 0, 0, nullptr, metrics.out(), nullptr,
                    nullptr) == AM_ERR_PARSE);
  CHECK(am_eval_tsv(tsv.get().c_str(), tsv.get().c_str(), "both", 0, 0, nullptr, metrics.out(), nullptr,
                    nullptr) == AM_ERR_INVALID_ARGUMENT);
  am_corpus_free(c);
}

TEST_CASE("agreement report") {
  am_corpus* c = load(skewed_dir());
  Str tsv;
  REQUIRE(am_agreement_report(c, nullptr, "# h", tsv.out()) == AM_OK);
  CHECK(tsv.get().find("# variant=") != std::string::npos);
  CHECK(tsv.get().find("\nall\t60\t") != std::string::npos);
  CHECK(tsv.get().find("ann1\tann2") != std::string::npos);
  REQUIRE(am_agreement_report(c, R"({"b1": ["case-0000", "case-0001"], "b2": ["case-0002"]})", nullptr,
                              tsv.out()) == AM_OK);
  CHECK(tsv.get().find("\nb1\t2\t") != std::string::npos);
  CHECK(tsv.get().find("\nb2\t1\t") != std::string::npos);
  CHECK(am_agreement_report(c, "[", nullptr, tsv.out()) == AM_ERR_PARSE);
  am_corpus_free(c);
}

TEST_CASE("tagger train, save, load, predict, eval, transfer") {
  const auto dir = scratch("tagger");
  for (const auto& c : fixture::tagger_corpus()) argmine::save_case(c, dir);
  am_corpus* c = load(dir, 1);
  const std::string split = R"({"train": ["syn-0", "syn-1", "syn-2"], "dev": ["syn-3"], "test": ["syn-3"]})";
  am_tagger* t = nullptr;
  Str log;
  CHECK(am_tagger_train(c, split.c_str(), R"({"bogus": 1})", &t, nullptr) == AM_ERR_CONFIG_INVALID);
  REQUIRE(am_tagger_train(c, split.c_str(), R"({"epochs": 2, "hidden_dim": 6, "embedding_dim": 5, "seed": 3})",
                          &t, log.out()) == AM_OK);
  CHECK(count_lines(log.get(), "epoch\t") == 1);
  CHECK(log.get().find("# best_epoch=") != std::string::npos);
  const auto path = dir / "model.json";
  REQUIRE(am_tagger_save(t, path.c_str(), R"({"tool": "argmine"})") == AM_OK);
  am_tagger* loaded = nullptr;
  REQUIRE(am_tagger_load(path.c_str(), &loaded) == AM_OK);

  am_corpus* test = nullptr;
  REQUIRE(am_corpus_subset(c, split.c_str(), "test", &test) == AM_OK);
  Str p1, p2, gold;
  REQUIRE(am_tagger_predict_tsv(t, test, nullptr, 1, p1.out()) == AM_OK);
  REQUIRE(am_tagger_predict_tsv(loaded, test, nullptr, 3, p2.out()) == AM_OK);
  CHECK(p1.get() == p2.get());
  REQUIRE(am_corpus_encode_tsv(test, nullptr, gold.out()) == AM_OK);

  Str m1, m2, json, confusion, transfer;
  REQUIRE(am_eval_tsv(gold.get().c_str(), p1.get().c_str(), "actor", 0, 1, nullptr, m1.out(), json.out(),
                      confusion.out()) == AM_OK);
  CHECK(json.get().find("\"macro_f1\"") != std::string::npos);
  CHECK(confusion.get().find("B-ECHR") != std::string::npos);
  // The predict table carries gold columns too; scoring it alone is the same.
  REQUIRE(am_eval_tsv(p1.get().c_str(), p1.get().c_str(), "actor", 0, 1, nullptr, m2.out(), nullptr,
                      nullptr) == AM_OK);
  CHECK(m1.get() == m2.get());
  REQUIRE(am_transfer_tsv(m1.get().c_str(), m2.get().c_str(), nullptr, transfer.out()) == AM_OK);
  CHECK(transfer.get().find("B-ECHR") != std::string::npos);
  Str mismatch;
  CHECK(am_eval_tsv(gold.get().c_str(), "", "arg", 0, 0, nullptr, mismatch.out(), nullptr, nullptr) ==
        AM_ERR_LENGTH_MISMATCH);

  CHECK(am_tagger_load((dir / "missing.json").c_str(), &loaded) == AM_ERR_IO);
  am_tagger_free(loaded);
  am_tagger_free(t);
  am_corpus_free(test);
  am_corpus_free(c);
}

TEST_CASE("importance") {
  am_corpus* c = load(skewed_dir());
  Str features, model, report, again, averages, weights;
  REQUIRE(am_importance_features(c, nullptr, features.out()) == AM_OK);
  CHECK(count_lines(features.get(), "case-") == 60);
  REQUIRE(am_importance_train(c, 5, "0.1,1,10", R"({"tool":"t"})", "# h", model.out(), report.out()) ==
          AM_OK);
  CHECK(report.get().find("# selected_c=") != std::string::npos);
  CHECK(report.get().find("macro avg,") != std::string::npos);
  REQUIRE(am_importance_report(c, model.get().c_str(), "# h", again.out()) == AM_OK);
  CHECK(again.get().substr(again.get().find("level,")) == report.get().substr(report.get().find("level,")));
  CHECK(am_importance_train(c, 5, "0,1", nullptr, nullptr, model.out(), report.out()) ==
        AM_ERR_CONFIG_INVALID);
  REQUIRE(am_importance_averages(c, nullptr, averages.out()) == AM_OK);
  CHECK(averages.get().rfind("feature,level_1,level_2,level_3,level_4\n", 0) == 0);
  REQUIRE(am_importance_weights(c, 1, 4, 10, nullptr, weights.out()) == AM_OK);
  CHECK(count_lines(weights.get(), "1,") == 1);
  CHECK(am_importance_weights(c, 2, 2, 10, nullptr, weights.out()) == AM_ERR_DEGENERATE_CLASS);
  am_corpus_free(c);
}

TEST_CASE("ingest a directory") {
  const auto in = scratch("raw");
  const auto out = scratch("ingested");
  std::ofstream(in / "a.txt") << "PROCEDURE\n1. Intro.\nAS TO THE LAW\n2. The Court holds.\n";
  std::ofstream(in / "b.html") << "<p>1. Only facts.</p>";
  std::ofstream(in / "c.txt") << "bad \xC3\x28";
  std::ofstream(in / "notes.md") << "ignored";
  Str report;
  REQUIRE(am_ingest_directory(in.c_str(), out.c_str(), 1, 2, R"({"tool":"t"})", report.out()) == AM_OK);
  CHECK(report.get().find("a.txt\tok\ta\t2") != std::string::npos);
  CHECK(report.get().find("LawSectionNotFound") != std::string::npos);
  CHECK(report.get().find("EncodingError") != std::string::npos);
  CHECK(report.get().find("notes.md") == std::string::npos);
  CHECK(fs::exists(out / "a.json"));
  CHECK(fs::exists(out / "_manifest.json"));
  am_corpus* c = load(out, 0);
  CHECK(am_corpus_size(c) == 1);
  am_corpus_free(c);
}

TEST_CASE("evaluation repairs predicted sequences") {
  const std::string gold = "# case=c par=1\nA\tB-ECHR\tB-ECHR\t\t\nB\tI-ECHR\tI-ECHR\t\t\n";
  const std::string pred = "# case=c par=1\nA\tO\tO\tO\tO\nB\tI-ECHR\tI-ECHR\tI-ECHR\tI-ECHR\n";
  Str metrics;
  REQUIRE(am_eval_tsv(gold.c_str(), pred.c_str(), "actor", 0, 0, nullptr, metrics.out(), nullptr, nullptr) ==
          AM_OK);
  // The orphan I-ECHR is read as B-ECHR, so I-ECHR is never predicted.
  CHECK(metrics.get().find("\nB-ECHR\t1\t") != std::string::npos);
  CHECK(metrics.get().find("\nI-ECHR\t1\t0.00\t0.00\t0.00") != std::string::npos);
}
