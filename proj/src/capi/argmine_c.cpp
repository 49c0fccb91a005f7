#include "argmine/argmine.h"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include "argmine/agreement.hpp"
#include "argmine/bio.hpp"
#include "argmine/corpus.hpp"
#include "argmine/corpus_io.hpp"
#include "argmine/error.hpp"
#include "argmine/eval.hpp"
#include "argmine/importance.hpp"
#include "argmine/ingest.hpp"
#include "argmine/tagger.hpp"
#include "json.hpp"

using argmine::Error;
using argmine::ErrorKind;
using nlohmann::json;

struct am_corpus {
  argmine::Corpus cases;
};

struct am_tagger {
  argmine::Checkpoint checkpoint;
};

namespace {

thread_local std::string g_last_error;

am_status to_status(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kInvalidArgument: return AM_ERR_INVALID_ARGUMENT;
    case ErrorKind::kIo: return AM_ERR_IO;
    case ErrorKind::kParse: return AM_ERR_PARSE;
    case ErrorKind::kEmptyCorpus: return AM_ERR_EMPTY_CORPUS;
    case ErrorKind::kMalformedDocument: return AM_ERR_MALFORMED_DOCUMENT;
    case ErrorKind::kEncodingError: return AM_ERR_ENCODING;
    case ErrorKind::kLawSectionNotFound: return AM_ERR_LAW_SECTION_NOT_FOUND;
    case ErrorKind::kOverlappingSpans: return AM_ERR_OVERLAPPING_SPANS;
    case ErrorKind::kSpanOutOfBounds: return AM_ERR_SPAN_OUT_OF_BOUNDS;
    case ErrorKind::kInvalidSequence: return AM_ERR_INVALID_SEQUENCE;
    case ErrorKind::kAlignmentMismatch: return AM_ERR_ALIGNMENT_MISMATCH;
    case ErrorKind::kTooFewAnnotators: return AM_ERR_TOO_FEW_ANNOTATORS;
    case ErrorKind::kEmptyContinuum: return AM_ERR_EMPTY_CONTINUUM;
    case ErrorKind::kEmptyTrainingSet: return AM_ERR_EMPTY_TRAINING_SET;
    case ErrorKind::kConfigInvalid: return AM_ERR_CONFIG_INVALID;
    case ErrorKind::kEmptySplit: return AM_ERR_EMPTY_SPLIT;
    case ErrorKind::kVocabMissing: return AM_ERR_VOCAB_MISSING;
    case ErrorKind::kLengthMismatch: return AM_ERR_LENGTH_MISMATCH;
    case ErrorKind::kNoArguments: return AM_ERR_NO_ARGUMENTS;
    case ErrorKind::kDegenerateClass: return AM_ERR_DEGENERATE_CLASS;
  }
  return AM_ERR_INTERNAL;
}

template <typename F>
am_status guarded(F&& body) {
  g_last_error.clear();
  try {
    body();
    return AM_OK;
  } catch (const Error& e) {
    g_last_error = e.what();
    return to_status(e.kind());
  } catch (const json::exception& e) {
    g_last_error = e.what();
    return AM_ERR_PARSE;
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return AM_ERR_INTERNAL;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return AM_ERR_INTERNAL;
  }
}

void require(bool ok, const char* what) {
  if (!ok) throw Error(ErrorKind::kInvalidArgument, what);
}

char* dup(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.data(), s.size() + 1);
  return out;
}

void put(char** slot, const std::string& s) {
  if (slot) *slot = dup(s);
}

std::string opt(const char* s) { return s ? std::string(s) : std::string(); }

std::string with_header(const char* header) {
  std::string h = opt(header);
  if (!h.empty() && h.back() != '\n') h += '\n';
  return h;
}

std::string join_lines(const std::vector<std::string>& lines) {
  std::string out;
  for (const auto& l : lines) out += l + "\n";
  return out;
}

argmine::Dimension dimension_arg(const char* name) {
  const std::string s = opt(name);
  if (s == "arg" || s == "type" || s == "arg_type") return argmine::Dimension::ArgType;
  if (s == "actor") return argmine::Dimension::Actor;
  throw Error(ErrorKind::kInvalidArgument, "dimension must be 'arg' or 'actor', got '" + s + "'");
}

// Runs fn(i) for i in [0, n) on up to `jobs` threads; the first error wins.
template <typename F>
void parallel_for(std::size_t n, int jobs, F&& fn) {
  const std::size_t workers = std::min<std::size_t>(n, jobs > 1 ? std::size_t(jobs) : 1);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex lock;
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard g(lock);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

std::string tsv_escape(std::string s) {
  for (char& ch : s) {
    if (ch == '\t' || ch == '\n') ch = ' ';
  }
  return s;
}

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

argmine::TaggerConfig tagger_config(const std::string& text) {
  argmine::TaggerConfig c;
  if (text.empty()) return c;
  const json j = json::parse(text);
  if (!j.is_object()) throw Error(ErrorKind::kConfigInvalid, "tagger config must be an object");
  static const std::vector<std::string> known = {"embedding_dim", "hidden_dim", "epochs",
                                                 "learning_rate", "batch_size", "weight_decay",
                                                 "warmup_steps", "seed", "min_freq"};
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (std::find(known.begin(), known.end(), it.key()) == known.end()) {
      throw Error(ErrorKind::kConfigInvalid, "unknown tagger config key '" + it.key() + "'");
    }
  }
  try {
    c.embedding_dim = j.value("embedding_dim", c.embedding_dim);
    c.hidden_dim = j.value("hidden_dim", c.hidden_dim);
    c.epochs = j.value("epochs", c.epochs);
    c.learning_rate = j.value("learning_rate", c.learning_rate);
    c.batch_size = j.value("batch_size", c.batch_size);
    c.weight_decay = j.value("weight_decay", c.weight_decay);
    c.warmup_steps = j.value("warmup_steps", c.warmup_steps);
    c.seed = j.value("seed", c.seed);
    c.min_freq = j.value("min_freq", c.min_freq);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::kConfigInvalid, std::string("tagger config: ") + e.what());
  }
  c.validate();
  return c;
}

// Pairs gold columns from one TSV with predicted columns from another.
argmine::TagSequences column(const std::vector<argmine::TsvParagraph>& rows, bool gold,
                             argmine::Dimension d, const char* which) {
  argmine::TagSequences out;
  for (const auto& p : rows) {
    const auto& col = gold ? (d == argmine::Dimension::ArgType ? p.gold_type : p.gold_actor)
                           : (d == argmine::Dimension::ArgType ? p.pred_type : p.pred_actor);
    if (col.size() != p.tokens.size()) {
      throw Error(ErrorKind::kParse, std::string(which) + " file lacks the " +
                                         (gold ? "gold " : "predicted ") +
                                         std::string(argmine::to_string(d)) + " column for case " +
                                         p.case_id + " paragraph " + p.paragraph_id);
    }
    // Predictions may come from outside the toolkit; score them repaired.
    out.push_back(gold ? col : argmine::repair_bio({d, col}).labels);
  }
  return out;
}

std::string features_header() {
  std::string out = "case_id,level";
  for (const auto& n : argmine::feature_names()) out += "," + n;
  return out + "\n";
}

std::string report_csv(const argmine::ClassificationReport& r) {
  std::ostringstream out;
  out << "level,precision,recall,f1,support\n";
  for (const auto& row : r.rows) {
    out << row.level << ',' << fixed(row.precision, 2) << ',' << fixed(row.recall, 2) << ','
        << fixed(row.f1, 2) << ',' << row.support << "\n";
  }
  out << "macro avg," << fixed(r.macro_precision, 2) << ',' << fixed(r.macro_recall, 2) << ','
      << fixed(r.macro_f1, 2) << ',' << r.support << "\n";
  return out.str();
}

argmine::ImportanceData subset(const argmine::ImportanceData& d, const std::vector<std::size_t>& idx) {
  argmine::ImportanceData out;
  for (auto i : idx) {
    out.case_ids.push_back(d.case_ids[i]);
    out.x.push_back(d.x[i]);
    out.levels.push_back(d.levels[i]);
  }
  return out;
}

}  // namespace

extern "C" {

const char* am_last_error(void) { return g_last_error.c_str(); }

const char* am_status_name(am_status status) {
  switch (status) {
    case AM_OK: return "ok";
    case AM_ERR_INTERNAL: return "Internal";
    case AM_ERR_ENCODING: return "EncodingError";
    default: break;
  }
  static const ErrorKind kinds[] = {
      ErrorKind::kInvalidArgument, ErrorKind::kIo, ErrorKind::kParse, ErrorKind::kEmptyCorpus,
      ErrorKind::kMalformedDocument, ErrorKind::kEncodingError, ErrorKind::kLawSectionNotFound,
      ErrorKind::kOverlappingSpans, ErrorKind::kSpanOutOfBounds, ErrorKind::kInvalidSequence,
      ErrorKind::kAlignmentMismatch, ErrorKind::kTooFewAnnotators, ErrorKind::kEmptyContinuum,
      ErrorKind::kEmptyTrainingSet, ErrorKind::kConfigInvalid, ErrorKind::kEmptySplit,
      ErrorKind::kVocabMissing, ErrorKind::kLengthMismatch, ErrorKind::kNoArguments,
      ErrorKind::kDegenerateClass};
  const int i = int(status) - 1;
  if (i < 0 || i >= int(std::size(kinds))) return "unknown";
  return argmine::error_kind_name(kinds[i]);
}

const char* am_version(void) { return ARGMINE_VERSION; }

void am_string_free(char* s) { std::free(s); }

am_status am_corpus_load(const char* path, size_t min_gold_spans, am_corpus** out, char** warnings) {
  return guarded([&] {
    require(path && out, "am_corpus_load: null argument");
    auto loaded = argmine::load_corpus(path, {min_gold_spans});
    put(warnings, join_lines(loaded.warnings));
    *out = new am_corpus{std::move(loaded.cases)};
  });
}

void am_corpus_free(am_corpus* corpus) { delete corpus; }

size_t am_corpus_size(const am_corpus* corpus) { return corpus ? corpus->cases.size() : 0; }

am_status am_corpus_case_id(const am_corpus* corpus, size_t index, char** out) {
  return guarded([&] {
    require(corpus && out, "am_corpus_case_id: null argument");
    require(index < corpus->cases.size(), "am_corpus_case_id: index out of range");
    *out = dup(corpus->cases[index].case_id);
  });
}

am_status am_corpus_save(const am_corpus* corpus, const char* dir) {
  return guarded([&] {
    require(corpus && dir, "am_corpus_save: null argument");
    for (const auto& c : corpus->cases) argmine::save_case(c, dir);
  });
}

am_status am_corpus_validate(const am_corpus* corpus, char** report, size_t* violation_count) {
  return guarded([&] {
    require(corpus, "am_corpus_validate: null corpus");
    std::ostringstream out;
    out << "case_id\trule\tlayer\tparagraph\tindex\tmessage\n";
    std::size_t n = 0;
    for (const auto& c : corpus->cases) {
      for (const auto& v : argmine::validate_case(c)) {
        out << c.case_id << '\t' << argmine::to_string(v.rule) << '\t' << v.layer << '\t'
            << v.paragraph_id << '\t' << v.index << '\t' << tsv_escape(v.message) << "\n";
        ++n;
      }
    }
    if (violation_count) *violation_count = n;
    put(report, out.str());
  });
}

am_status am_corpus_stats(const am_corpus* corpus, const char* header, char** tsv) {
  return guarded([&] {
    require(corpus && tsv, "am_corpus_stats: null argument");
    const auto stats = argmine::corpus_stats(corpus->cases);
    std::ostringstream out;
    out << with_header(header);
    auto section = [&](const char* name, const std::vector<argmine::LabelCount>& rows, bool tags,
                       argmine::Dimension d) {
      out << "# table=" << name << "\n";
      out << "label\tname\tcount\tpercent\n";
      for (const auto& r : rows) {
        std::string display;
        if (tags) {
          display = argmine::display_tag(r.label, d);
        } else if (d == argmine::Dimension::ArgType) {
          display = argmine::display_name(*argmine::parse_arg_type(r.label));
        } else {
          display = argmine::display_name(*argmine::parse_actor(r.label));
        }
        out << r.label << '\t' << display << '\t' << r.count << '\t' << fixed(r.percent, 2) << "\n";
      }
      out << "\n";
    };
    section("arg_type_spans", stats.arg_type_spans, false, argmine::Dimension::ArgType);
    section("actor_spans", stats.actor_spans, false, argmine::Dimension::Actor);
    section("arg_type_tokens", stats.arg_type_tokens, true, argmine::Dimension::ArgType);
    section("actor_tokens", stats.actor_tokens, true, argmine::Dimension::Actor);
    *tsv = dup(out.str());
  });
}

am_status am_corpus_split(const am_corpus* corpus, double train, double dev, double test,
                          uint64_t seed, const char* meta_json, char** split_json, char** warnings) {
  return guarded([&] {
    require(corpus && split_json, "am_corpus_split: null argument");
    const auto result = argmine::stratified_split(corpus->cases, {train, dev, test}, seed);
    *split_json = dup(argmine::split_to_json(result.split, opt(meta_json)));
    put(warnings, join_lines(result.warnings));
  });
}

am_status am_corpus_subset(const am_corpus* corpus, const char* split_json, const char* part,
                           am_corpus** out) {
  return guarded([&] {
    require(corpus && split_json && part && out, "am_corpus_subset: null argument");
    const auto split = argmine::split_from_json(split_json);
    const std::string p = part;
    const std::vector<std::string>* ids = p == "train" ? &split.train
                                          : p == "dev" ? &split.dev
                                          : p == "test" ? &split.test
                                                        : nullptr;
    require(ids != nullptr, "am_corpus_subset: part must be train, dev or test");
    *out = new am_corpus{argmine::select_cases(corpus->cases, *ids)};
  });
}

am_status am_corpus_encode_tsv(const am_corpus* corpus, const char* header, char** tsv) {
  return guarded([&] {
    require(corpus && tsv, "am_corpus_encode_tsv: null argument");
    *tsv = dup(argmine::write_tsv(argmine::gold_tsv_rows(corpus->cases), opt(header)));
  });
}

am_status am_ingest_directory(const char* in_dir, const char* out_dir, int trim_law, int jobs,
                              const char* meta_json, char** report) {
  return guarded([&] {
    namespace fs = std::filesystem;
    require(in_dir && out_dir, "am_ingest_directory: null argument");
    if (!fs::is_directory(in_dir)) {
      throw Error(ErrorKind::kIo, std::string("not a directory: ") + in_dir);
    }
    std::vector<fs::path> inputs;
    for (const auto& entry : fs::directory_iterator(in_dir)) {
      if (!entry.is_regular_file()) continue;
      const auto ext = entry.path().extension().string();
      if (ext == ".html" || ext == ".htm" || ext == ".txt") inputs.push_back(entry.path());
    }
    std::sort(inputs.begin(), inputs.end());
    if (inputs.empty()) throw Error(ErrorKind::kEmptyCorpus, std::string("no .html/.txt files in ") + in_dir);

    struct Outcome {
      std::string status = "ok";
      std::string detail;
      std::string case_id;
      std::size_t paragraphs = 0;
    };
    std::vector<Outcome> outcomes(inputs.size());
    parallel_for(inputs.size(), jobs, [&](std::size_t i) {
      Outcome& o = outcomes[i];
      try {
        const auto ext = inputs[i].extension().string();
        argmine::RawDocument doc{inputs[i].stem().string(), argmine::read_file(inputs[i]),
                                 ext == ".txt" ? argmine::DocumentFormat::Text
                                               : argmine::DocumentFormat::Html};
        auto extracted = argmine::extract_case(doc);
        argmine::AnnotatedCase c = std::move(extracted.case_data);
        if (trim_law) c = argmine::trim_to_law(c);
        o.case_id = c.case_id;
        o.paragraphs = c.paragraphs.size();
        for (const auto& m : extracted.sections) {
          o.detail += (o.detail.empty() ? "" : ",") + std::string(argmine::to_string(m.kind));
        }
        argmine::save_case(c, out_dir);
      } catch (const Error& e) {
        o.status = std::string(argmine::error_kind_name(e.kind()));
        o.detail = e.what();
      }
    });

    json manifest = {{"inputs", json::array()}};
    if (meta_json && *meta_json) manifest["meta"] = json::parse(meta_json);
    std::ostringstream out;
    out << "source\tstatus\tcase_id\tparagraphs\tdetail\n";
    std::size_t ok = 0;
    for (std::size_t i = 0; i < inputs.size(); ++i) {
      const auto& o = outcomes[i];
      ok += o.status == "ok";
      out << inputs[i].filename().string() << '\t' << o.status << '\t' << o.case_id << '\t'
          << o.paragraphs << '\t' << tsv_escape(o.detail) << "\n";
      manifest["inputs"].push_back({{"source", inputs[i].filename().string()},
                                    {"status", o.status},
                                    {"case_id", o.case_id},
                                    {"paragraphs", o.paragraphs},
                                    {"detail", o.detail}});
    }
    manifest["converted"] = ok;
    manifest["failed"] = inputs.size() - ok;
    argmine::write_file(fs::path(out_dir) / "_manifest.json", manifest.dump(1) + "\n");
    put(report, out.str());
  });
}

am_status am_agreement_report(const am_corpus* corpus, const char* batches_json, const char* header,
                              char** tsv) {
  return guarded([&] {
    require(corpus && tsv, "am_agreement_report: null argument");
    std::map<std::string, std::vector<std::string>> batches;
    if (batches_json && *batches_json) {
      batches = json::parse(batches_json).get<std::map<std::string, std::vector<std::string>>>();
    } else {
      auto& all = batches["all"];
      for (const auto& c : corpus->cases) all.push_back(c.case_id);
    }
    std::ostringstream out;
    out << with_header(header);
    out << "# variant=" << argmine::kAlphaVariant << " positions=tokens\n";
    out << "batch\tcases\talpha_arg_type\talpha_actor\tnotes\n";
    auto cell = [](const std::optional<double>& v) { return v ? fixed(*v, 4) : std::string("n/a"); };
    std::set<std::string> in_batches;
    for (const auto& row : argmine::batch_report(corpus->cases, batches)) {
      std::string notes;
      for (const auto& n : row.notes) notes += (notes.empty() ? "" : "; ") + n;
      out << row.batch << '\t' << row.cases << '\t' << cell(row.alpha_arg_type) << '\t'
          << cell(row.alpha_actor) << '\t' << tsv_escape(notes) << "\n";
    }
    for (const auto& [name, ids] : batches) in_batches.insert(ids.begin(), ids.end());

    out << "\n# pairwise\n";
    out << "case_id\tdimension\tannotator_a\tannotator_b\talpha_u\n";
    for (const auto& c : corpus->cases) {
      if (!in_batches.contains(c.case_id)) continue;
      for (auto d : {argmine::Dimension::ArgType, argmine::Dimension::Actor}) {
        try {
          for (const auto& p : argmine::pairwise_alpha(argmine::build_continuum(c, d))) {
            out << c.case_id << '\t' << argmine::to_string(d) << '\t' << p.annotator_a << '\t'
                << p.annotator_b << '\t' << fixed(p.score.alpha_u, 4) << "\n";
          }
        } catch (const Error&) {
          // already reported in the batch notes
        }
      }
    }
    *tsv = dup(out.str());
  });
}

am_status am_tagger_train(const am_corpus* corpus, const char* split_json, const char* config_json,
                          am_tagger** out, char** log_tsv) {
  return guarded([&] {
    require(corpus && split_json && out, "am_tagger_train: null argument");
    const auto config = tagger_config(opt(config_json));
    const auto split = argmine::split_from_json(split_json);
    auto result = argmine::train(split, corpus->cases, config);
    std::ostringstream log;
    log << "epoch\targ_loss\tactor_loss\tdev_arg_macro_f1\tdev_actor_macro_f1\tdev_combined\n";
    for (const auto& e : result.log) {
      log << e.epoch << '\t' << fixed(e.arg_loss, 6) << '\t' << fixed(e.actor_loss, 6) << '\t'
          << fixed(e.dev.arg_macro_f1, 2) << '\t' << fixed(e.dev.actor_macro_f1, 2) << '\t'
          << fixed(e.dev.combined, 2) << "\n";
    }
    log << "# best_epoch=" << result.checkpoint.epoch << "\n";
    put(log_tsv, log.str());
    *out = new am_tagger{std::move(result.checkpoint)};
  });
}

am_status am_tagger_load(const char* path, am_tagger** out) {
  return guarded([&] {
    require(path && out, "am_tagger_load: null argument");
    *out = new am_tagger{argmine::checkpoint_from_json(argmine::read_file(path))};
  });
}

am_status am_tagger_save(const am_tagger* tagger, const char* path, const char* meta_json) {
  return guarded([&] {
    require(tagger && path, "am_tagger_save: null argument");
    argmine::write_file(path, argmine::checkpoint_to_json(tagger->checkpoint, opt(meta_json)));
  });
}

void am_tagger_free(am_tagger* tagger) { delete tagger; }

am_status am_tagger_predict_tsv(const am_tagger* tagger, const am_corpus* corpus, const char* header,
                                int jobs, char** tsv) {
  return guarded([&] {
    require(tagger && corpus && tsv, "am_tagger_predict_tsv: null argument");
    const auto& cases = corpus->cases;
    std::vector<std::vector<argmine::TsvParagraph>> per_case(cases.size());
    parallel_for(cases.size(), jobs, [&](std::size_t i) {
      const auto& c = cases[i];
      const auto preds = argmine::predict(tagger->checkpoint, c);
      for (std::size_t k = 0; k < c.paragraphs.size(); ++k) {
        const auto& p = c.paragraphs[k];
        if (p.tokens.empty()) continue;
        argmine::TsvParagraph row;
        row.case_id = c.case_id;
        row.paragraph_id = p.id;
        for (std::size_t t = 0; t < p.tokens.size(); ++t) row.tokens.emplace_back(p.token_text(t));
        std::vector<argmine::ArgumentSpan> own;
        for (const auto& s : c.gold_spans) {
          if (s.paragraph_id == p.id) own.push_back(s);
        }
        row.gold_type = argmine::encode_bio(p, own, argmine::Dimension::ArgType).labels;
        row.gold_actor = argmine::encode_bio(p, own, argmine::Dimension::Actor).labels;
        row.pred_type = preds[k].arg_type.labels;
        row.pred_actor = preds[k].actor.labels;
        per_case[i].push_back(std::move(row));
      }
    });
    std::vector<argmine::TsvParagraph> rows;
    for (auto& v : per_case) {
      for (auto& r : v) rows.push_back(std::move(r));
    }
    *tsv = dup(argmine::write_tsv(rows, opt(header)));
  });
}

am_status am_eval_tsv(const char* gold_tsv, const char* pred_tsv, const char* dimension,
                      int exclude_outside, int fixed_universe, const char* header,
                      char** metrics_tsv, char** metrics_json, char** confusion_csv) {
  return guarded([&] {
    require(gold_tsv && pred_tsv, "am_eval_tsv: null argument");
    const auto d = dimension_arg(dimension);
    const auto gold_rows = argmine::read_tsv(gold_tsv);
    const auto pred_rows = argmine::read_tsv(pred_tsv);
    if (gold_rows.size() != pred_rows.size()) {
      throw Error(ErrorKind::kLengthMismatch, "gold has " + std::to_string(gold_rows.size()) +
                                                  " paragraphs, predictions have " +
                                                  std::to_string(pred_rows.size()));
    }
    for (std::size_t i = 0; i < gold_rows.size(); ++i) {
      if (gold_rows[i].case_id != pred_rows[i].case_id ||
          gold_rows[i].paragraph_id != pred_rows[i].paragraph_id) {
        throw Error(ErrorKind::kLengthMismatch,
                    "paragraph " + std::to_string(i) + " differs: " + gold_rows[i].case_id + "/" +
                        gold_rows[i].paragraph_id + " vs " + pred_rows[i].case_id + "/" +
                        pred_rows[i].paragraph_id);
      }
    }
    const auto gold = column(gold_rows, true, d, "gold");
    const auto pred = column(pred_rows, false, d, "prediction");
    argmine::PrfOptions options;
    options.exclude_outside = exclude_outside != 0;
    if (fixed_universe) options.fixed_universe = argmine::tag_vocabulary(d);
    const auto table = argmine::token_prf(gold, pred, options);
    put(metrics_tsv, argmine::metrics_to_tsv(table, opt(header)));
    put(metrics_json, argmine::metrics_to_json(table));
    if (confusion_csv) {
      const auto m = argmine::confusion(gold, pred);
      *confusion_csv = dup(argmine::confusion_to_csv(m, true, opt(header)));
    }
  });
}

am_status am_transfer_tsv(const char* original_tsv, const char* updated_tsv, const char* header,
                          char** out) {
  return guarded([&] {
    require(original_tsv && updated_tsv && out, "am_transfer_tsv: null argument");
    const auto report = argmine::transfer_report(argmine::metrics_from_tsv(original_tsv),
                                                 argmine::metrics_from_tsv(updated_tsv));
    *out = dup(argmine::transfer_to_tsv(report, opt(header)));
  });
}

am_status am_importance_features(const am_corpus* corpus, const char* header, char** csv) {
  return guarded([&] {
    require(corpus && csv, "am_importance_features: null argument");
    std::ostringstream out;
    out << with_header(header) << features_header();
    for (const auto& c : corpus->cases) {
      if (c.gold_spans.empty()) {
        out << "# skipped " << c.case_id << ": NoArguments\n";
        continue;
      }
      const auto f = argmine::extract_features(c);
      out << c.case_id << ',' << (c.importance ? std::to_string(c.importance->value()) : "");
      for (double v : f.values) out << ',' << fixed(v, 6);
      out << "\n";
    }
    *csv = dup(out.str());
  });
}

am_status am_importance_train(const am_corpus* corpus, uint64_t seed, const char* c_values,
                              const char* meta_json, const char* header, char** model_json,
                              char** report) {
  return guarded([&] {
    require(corpus && model_json, "am_importance_train: null argument");
    argmine::GridConfig grid;
    if (c_values && *c_values) {
      grid.c_values.clear();
      std::stringstream ss(c_values);
      std::string item;
      while (std::getline(ss, item, ',')) {
        try {
          grid.c_values.push_back(std::stod(item));
        } catch (const std::logic_error&) {
          throw Error(ErrorKind::kConfigInvalid, "bad C value '" + item + "'");
        }
        if (!(grid.c_values.back() > 0)) throw Error(ErrorKind::kConfigInvalid, "C values must be positive");
      }
    }
    const auto data = argmine::importance_data(corpus->cases);
    const auto holdout = argmine::stratified_holdout(data.levels, 0.2, seed);
    const auto train = subset(data, holdout.train);
    const auto test = subset(data, holdout.test);
    const auto model = argmine::grid_search_train(train.x, train.levels, grid, seed);

    json extra = {{"seed", seed}, {"test_fraction", 0.2}, {"train_cases", train.case_ids},
                  {"test_cases", test.case_ids}};
    if (meta_json && *meta_json) extra["meta"] = json::parse(meta_json);
    *model_json = dup(argmine::model_to_json(model, extra.dump()));

    std::ostringstream out;
    out << with_header(header);
    out << "# selected_c=" << model.c << " train=" << train.x.size() << " test=" << test.x.size()
        << " skipped=" << data.skipped.size() << "\n";
    out << "# grid:";
    for (const auto& g : model.grid) out << " C=" << g.c << ":" << fixed(g.mean_macro_f1, 4);
    out << "\n";
    out << report_csv(argmine::classification_report(model, test.x, test.levels));
    put(report, out.str());
  });
}

am_status am_importance_report(const am_corpus* corpus, const char* model_json, const char* header,
                               char** csv) {
  return guarded([&] {
    require(corpus && model_json && csv, "am_importance_report: null argument");
    const auto model = argmine::model_from_json(model_json);
    const json j = json::parse(model_json);
    if (!j.contains("extra") || !j["extra"].contains("seed")) {
      throw Error(ErrorKind::kParse, "model does not record its holdout seed");
    }
    const auto seed = j["extra"]["seed"].get<std::uint64_t>();
    const auto data = argmine::importance_data(corpus->cases);
    const auto holdout = argmine::stratified_holdout(data.levels, 0.2, seed);
    const auto test = subset(data, holdout.test);
    *csv = dup(with_header(header) + report_csv(argmine::classification_report(model, test.x, test.levels)));
  });
}

am_status am_importance_averages(const am_corpus* corpus, const char* header, char** csv) {
  return guarded([&] {
    require(corpus && csv, "am_importance_averages: null argument");
    const auto avg = argmine::feature_averages(corpus->cases);
    std::ostringstream out;
    out << with_header(header);
    out << "feature,level_1,level_2,level_3,level_4\n";
    out << "cases";
    for (auto n : avg.cases) out << ',' << n;
    out << "\n";
    const auto& names = argmine::feature_names();
    for (std::size_t f = 0; f < names.size(); ++f) {
      out << names[f];
      for (const auto& v : avg.means[f]) out << ',' << (v ? fixed(*v, 4) : std::string("n/a"));
      out << "\n";
    }
    *csv = dup(out.str());
  });
}

am_status am_importance_weights(const am_corpus* corpus, int class_a, int class_b, double c,
                                const char* header, char** csv) {
  return guarded([&] {
    require(corpus && csv, "am_importance_weights: null argument");
    const auto data = argmine::importance_data(corpus->cases);
    const auto ranked = argmine::feature_importance(data.x, data.levels, class_a, class_b,
                                                    argmine::feature_names(), c);
    std::ostringstream out;
    out << with_header(header);
    out << "# binary fit: level " << class_a << " (+) vs level " << class_b << " (-), C=" << c << "\n";
    out << "rank,feature,weight,favours\n";
    for (std::size_t i = 0; i < ranked.size(); ++i) {
      const auto& w = ranked[i];
      out << i + 1 << ',' << w.name << ',' << fixed(w.weight, 6) << ','
          << (w.weight > 0 ? class_a : w.weight < 0 ? class_b : 0) << "\n";
    }
    *csv = dup(out.str());
  });
}

}  // extern "C"
