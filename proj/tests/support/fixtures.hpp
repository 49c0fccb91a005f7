#pragma once
// Hand-rolled generators for synthetic corpora and small fixtures.

#include <string>
#include <vector>

#include "argmine/corpus.hpp"
#include "argmine/importance.hpp"
#include "argmine/ingest.hpp"
#include "argmine/rng.hpp"
#include "argmine/tagger.hpp"
#include "argmine/agreement.hpp"
#include "argmine/bio.hpp"
#include "argmine/eval.hpp"
#include "oracles.hpp"

namespace fixture {

using argmine::Actor;
using argmine::AnnotatedCase;
using argmine::ArgType;
using argmine::ArgumentSpan;
using argmine::Paragraph;
using argmine::Rng;

inline const std::vector<std::string>& lexicon() {
  static const std::vector<std::string> words = {
      "the",   "Court", "applicant", "State",  "Article", "Convention", "refusal", "grant",
      "home",  "right", "family",    "life",   "margin",  "necessary",  "society", "law",
      "of",    "to",    "in",        "that",   "which",   "was",        "not",     "its",
      "case",  "Commission", "submits", "Government", "interference", "respect", "§", "10730/84"};
  return words;
}

// Text and tokens built together, so offsets are exact by construction.
inline Paragraph paragraph(const std::string& id, const std::vector<std::string>& words,
                           bool law = true) {
  Paragraph p;
  p.id = id;
  p.in_law_section = law;
  for (const auto& w : words) {
    if (!p.text.empty()) p.text += ' ';
    p.tokens.push_back({p.text.size(), p.text.size() + w.size()});
    p.text += w;
  }
  return p;
}

inline Paragraph random_paragraph(Rng& rng, const std::string& id, std::size_t len, bool law = true) {
  std::vector<std::string> words;
  for (std::size_t i = 0; i < len; ++i) words.push_back(lexicon()[rng.below(lexicon().size())]);
  return paragraph(id, words, law);
}

inline ArgType random_type(Rng& rng) { return argmine::all_arg_types()[rng.below(argmine::kNumArgTypes)]; }
inline Actor random_actor(Rng& rng) { return argmine::all_actors()[rng.below(argmine::kNumActors)]; }

// Non-overlapping spans over [0, n): walk left to right, opening spans at random.
inline std::vector<ArgumentSpan> random_spans(Rng& rng, const std::string& pid, std::size_t n,
                                              double density = 0.3) {
  std::vector<ArgumentSpan> out;
  std::size_t pos = 0;
  while (pos < n) {
    if (rng.uniform() < density) {
      const std::size_t len = 1 + rng.below(std::min<std::size_t>(n - pos, 8));
      out.push_back({pid, pos, pos + len, random_type(rng), random_actor(rng), std::nullopt});
      pos += len;
    } else {
      ++pos;
    }
  }
  return out;
}

// A case with law-section paragraphs carrying at least `min_spans` gold spans.
inline AnnotatedCase random_case(Rng& rng, const std::string& id, std::size_t min_spans = 5) {
  AnnotatedCase c;
  c.case_id = id;
  c.article = 8;
  c.importance = argmine::ImportanceLevel(int(1 + rng.below(4)));
  const std::size_t n_par = 2 + rng.below(4);
  for (std::size_t k = 0; k < n_par; ++k) {
    const std::string pid = std::to_string(k + 1);
    c.paragraphs.push_back(random_paragraph(rng, pid, 4 + rng.below(20), k > 0));
  }
  while (c.gold_spans.size() < min_spans) {
    c.gold_spans.clear();
    for (const auto& p : c.paragraphs) {
      for (auto& s : random_spans(rng, p.id, p.tokens.size())) c.gold_spans.push_back(s);
    }
  }
  return c;
}

// Skewed label distribution resembling a real corpus: a few frequent types,
// a long tail, and one type rare enough to be infeasible to stratify.
inline AnnotatedCase skewed_case(Rng& rng, const std::string& id) {
  static const std::vector<std::pair<ArgType, double>> weights = {
      {ArgType::ApplicationCase, 0.55}, {ArgType::PrecedentsECHR, 0.14},
      {ArgType::NecessityProportionality, 0.10}, {ArgType::DecisionECHR, 0.06},
      {ArgType::Distinguishing, 0.03},  {ArgType::MarginOfAppreciation, 0.03},
      {ArgType::TeleologicalInterpretation, 0.02}, {ArgType::SystematicInterpretation, 0.02},
      {ArgType::TextualInterpretation, 0.015},      {ArgType::Overruling, 0.01},
      {ArgType::NonContestation, 0.01},             {ArgType::LegalBasis, 0.01},
      {ArgType::LegitimatePurpose, 0.005},         {ArgType::Suitability, 0.004},
      {ArgType::ComparativeLaw, 0.001}};
  static const std::vector<std::pair<Actor, double>> actors = {
      {Actor::ECHR, 0.65}, {Actor::Applicant, 0.16}, {Actor::State, 0.16},
      {Actor::ThirdParties, 0.02}, {Actor::CommissionChamber, 0.01}};
  auto pick = [&](const auto& table) {
    double u = rng.uniform();
    for (const auto& [v, w] : table) {
      if ((u -= w) < 0) return v;
    }
    return table.front().first;
  };
  AnnotatedCase c;
  c.case_id = id;
  c.article = 8;
  c.importance = argmine::ImportanceLevel(int(1 + rng.below(4)));
  const std::size_t n_spans = 5 + rng.below(30);
  for (std::size_t k = 0; k < n_spans; ++k) {
    const std::string pid = std::to_string(k + 1);
    c.paragraphs.push_back(random_paragraph(rng, pid, 6 + rng.below(10)));
    const std::size_t n = c.paragraphs.back().tokens.size();
    const std::size_t start = rng.below(n / 2);
    c.gold_spans.push_back({pid, start, start + 1 + rng.below(n - start), pick(weights), pick(actors),
                            std::nullopt});
  }
  return c;
}

inline argmine::Corpus skewed_corpus(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  argmine::Corpus out;
  for (std::size_t i = 0; i < n; ++i) {
    char id[32];
    std::snprintf(id, sizeof id, "case-%04zu", i);
    out.push_back(skewed_case(rng, id));
  }
  return out;
}

// Paragraph 22 of Berrehab v. the Netherlands (abridged), tokenized by the library.
inline Paragraph berrehab_paragraph() {
  Paragraph p;
  p.id = "22";
  p.text = "22. In the applicants' submission, the refusal to grant home country.";
  p.tokens = argmine::tokenize(p.text);
  p.in_law_section = true;
  return p;
}

// Twenty short paragraphs whose tags are a deterministic function of the
// words, so a small tagger can fit them exactly.
inline argmine::Corpus tagger_corpus() {
  struct Phrase {
    std::vector<std::string> words;
    ArgType type;
    Actor actor;
  };
  const std::vector<Phrase> phrases = {
      {{"in", "Berrehab", "v.", "Netherlands"}, ArgType::PrecedentsECHR, Actor::ECHR},
      {{"the", "applicant", "complains"}, ArgType::ApplicationCase, Actor::Applicant},
      {{"the", "Government", "submits"}, ArgType::ApplicationCase, Actor::State},
      {{"necessary", "in", "a", "democratic", "society"}, ArgType::NecessityProportionality, Actor::ECHR},
      {{"wide", "margin", "of", "appreciation"}, ArgType::MarginOfAppreciation, Actor::State},
      {{"the", "Commission", "found"}, ArgType::DecisionECHR, Actor::CommissionChamber},
  };
  const std::vector<std::vector<std::string>> fillers = {
      {"moreover"}, {"it", "follows", "that"}, {"accordingly"}, {"in", "this", "respect"}, {"finally"}};

  argmine::Corpus corpus;
  Rng rng(20);
  for (int c = 0; c < 4; ++c) {
    AnnotatedCase ac;
    ac.case_id = "syn-" + std::to_string(c);
    for (int k = 0; k < 5; ++k) {
      std::vector<std::string> words = fillers[rng.below(fillers.size())];
      const std::string pid = std::to_string(k + 1);
      std::vector<ArgumentSpan> spans;
      for (int r = 0; r < 2; ++r) {
        const auto& ph = phrases[rng.below(phrases.size())];
        const std::size_t start = words.size();
        words.insert(words.end(), ph.words.begin(), ph.words.end());
        spans.push_back({pid, start, words.size(), ph.type, ph.actor, std::nullopt});
        words.push_back(".");
      }
      ac.paragraphs.push_back(paragraph(pid, words));
      for (auto& s : spans) ac.gold_spans.push_back(s);
    }
    corpus.push_back(std::move(ac));
  }
  return corpus;
}

// Four tight clusters at the corners of a square, plus noise columns; each
// class is linearly separable from the rest.
struct Labelled {
  argmine::FeatureMatrix x;
  std::vector<int> levels;
};

inline Labelled separable_levels(std::size_t per_class, std::uint64_t seed, std::size_t noise_cols = 4) {
  static const double corner[4][2] = {{0, 0}, {4, 0}, {0, 4}, {4, 4}};
  Rng rng(seed);
  Labelled out;
  for (std::size_t i = 0; i < per_class; ++i) {
    for (int k = 0; k < 4; ++k) {
      std::vector<double> row = {corner[k][0] + rng.uniform(-0.5, 0.5), corner[k][1] + rng.uniform(-0.5, 0.5)};
      for (std::size_t j = 0; j < noise_cols; ++j) row.push_back(rng.uniform(-1, 1));
      out.x.push_back(std::move(row));
      out.levels.push_back(k + 1);
    }
  }
  return out;
}

// Two annotator layers derived from the gold spans: one exact copy and one
// that drops or shifts spans at random.
inline void add_annotators(AnnotatedCase& c, Rng& rng) {
  auto& exact = c.raw_annotator_layers["ann1"];
  auto& noisy = c.raw_annotator_layers["ann2"];
  exact = c.gold_spans;
  noisy.clear();
  for (auto s : c.gold_spans) {
    const double u = rng.uniform();
    if (u < 0.15) continue;
    if (u < 0.35 && s.tok_end - s.tok_start > 1) --s.tok_end;
    if (u > 0.9) s.arg_type = random_type(rng);
    noisy.push_back(s);
  }
}

inline argmine::CorpusSplit all_in_train_and_dev(const argmine::Corpus& corpus) {
  argmine::CorpusSplit split;
  for (const auto& c : corpus) {
    split.train.push_back(c.case_id);
    split.dev.push_back(c.case_id);
  }
  return split;
}

struct Accuracy {
  double arg = 0;
  double actor = 0;
};

// Token accuracy of repaired predictions against the gold BIO encoding.
inline Accuracy token_accuracy(const argmine::Checkpoint& ckpt, const argmine::Corpus& corpus) {
  std::size_t total = 0, arg = 0, actor = 0;
  for (const auto& c : corpus) {
    const auto pred = argmine::predict(ckpt, c);
    for (std::size_t k = 0; k < c.paragraphs.size(); ++k) {
      const auto& p = c.paragraphs[k];
      std::vector<ArgumentSpan> spans;
      for (const auto& s : c.gold_spans)
        if (s.paragraph_id == p.id) spans.push_back(s);
      const auto ga = argmine::encode_bio(p, spans, argmine::Dimension::ArgType).labels;
      const auto gr = argmine::encode_bio(p, spans, argmine::Dimension::Actor).labels;
      for (std::size_t i = 0; i < ga.size(); ++i) {
        ++total;
        arg += ga[i] == pred[k].arg_type.labels[i];
        actor += gr[i] == pred[k].actor.labels[i];
      }
    }
  }
  return {double(arg) / double(total), double(actor) / double(total)};
}

inline argmine::TaggerConfig overfit_config() {
  argmine::TaggerConfig cfg;
  cfg.embedding_dim = 16;
  cfg.hidden_dim = 24;
  cfg.epochs = 200;
  cfg.learning_rate = 1e-2;
  cfg.batch_size = 4;
  cfg.weight_decay = 0.0;
  cfg.warmup_steps = 10;
  cfg.seed = 1;
  return cfg;
}

// A continuum drawn twice: once for the library, once for the oracle.
struct Draw {
  argmine::Continuum lib;
  std::vector<std::vector<oracle::Unit>> ref;
};

inline Draw random_continuum(Rng& rng, std::size_t max_len, std::size_t max_annot, std::size_t max_units) {
  Draw d;
  d.lib.length = 1 + rng.below(max_len);
  const std::size_t m = 2 + rng.below(max_annot - 1);
  const char* labels[] = {"X", "Y", "Z"};
  for (std::size_t i = 0; i < m; ++i) {
    d.lib.annotators.push_back("a" + std::to_string(i));
    auto& units = d.lib.units.emplace_back();
    auto& ref = d.ref.emplace_back();
    const std::size_t want = rng.below(max_units + 1);
    std::size_t pos = rng.below(3);
    for (std::size_t k = 0; k < want && pos < d.lib.length; ++k) {
      const std::size_t len = 1 + rng.below(std::min<std::size_t>(6, d.lib.length - pos));
      const std::string label = labels[rng.below(3)];
      units.push_back({pos, pos + len, label});
      ref.push_back({int(pos), int(pos + len), label});
      pos += len + rng.below(4);
    }
  }
  return d;
}

// Tag sequences where about half of the predictions copy the gold tag.
inline std::pair<argmine::TagSequences, argmine::TagSequences> random_tag_pair(Rng& rng) {
  static const std::vector<std::string> tags = {"O", "B-X", "I-X", "B-Y", "I-Y", "B-Z"};
  argmine::TagSequences gold, pred;
  const std::size_t n_seq = 1 + rng.below(5);
  for (std::size_t s = 0; s < n_seq; ++s) {
    const std::size_t len = 1 + rng.below(12);
    auto& g = gold.emplace_back();
    auto& p = pred.emplace_back();
    for (std::size_t i = 0; i < len; ++i) {
      g.push_back(tags[rng.below(tags.size())]);
      p.push_back(rng.uniform() < 0.5 ? g.back() : tags[rng.below(tags.size())]);
    }
  }
  return {gold, pred};
}

}  // namespace fixture
