// argmine command line: thin dispatch over the C API.
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "argmine/argmine.h"

namespace {

constexpr int kExitData = 1;
constexpr int kExitUsage = 2;

struct Failure {
  int code;
  std::string message;
};

struct Str {
  char* p = nullptr;
  ~Str() { am_string_free(p); }
  char** out() { return &p; }
  std::string get() const { return p ? p : ""; }
};

using CorpusPtr = std::unique_ptr<am_corpus, decltype(&am_corpus_free)>;
using TaggerPtr = std::unique_ptr<am_tagger, decltype(&am_tagger_free)>;

void check(am_status s, const char* what) {
  if (s != AM_OK) {
    throw Failure{kExitData, std::string(what) + ": " + am_status_name(s) + ": " + am_last_error()};
  }
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Failure{kExitData, "cannot read " + path};
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void emit(const std::string& path, const std::string& content) {
  if (path.empty() || path == "-") {
    std::fwrite(content.data(), 1, content.size(), stdout);
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Failure{kExitData, "cannot write " + path};
  out << content;
  if (!out) throw Failure{kExitData, "write failed: " + path};
}

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  return h;
}

// Everything that ends up in artifact metadata.
struct Meta {
  std::string command;
  std::string config_hash;
  std::uint64_t seed = 0;

  std::string header() const {
    return "# argmine " + std::string(am_version()) + " cmd=" + command + " config=" + config_hash +
           " seed=" + std::to_string(seed);
  }
  std::string json() const {
    return "{\"tool\":\"argmine\",\"version\":\"" + std::string(am_version()) + "\",\"command\":\"" +
           command + "\",\"config_hash\":\"" + config_hash + "\",\"seed\":" + std::to_string(seed) + "}";
  }
};

struct Options {
  std::string corpus;
  std::size_t min_spans = 5;
  int jobs = 1;
  std::uint64_t seed = 0;
  std::string out;

  std::string in_dir;
  bool trim_law = false;

  std::string ratios = "0.8,0.1,0.1";
  std::string split;
  std::string part;

  std::string layers = "raw";
  std::string by_batch;

  std::string model;
  std::string log;
  int epochs = 10;
  double lr = 1e-3;
  std::size_t hidden = 128;
  std::size_t embedding = 64;
  std::size_t batch_size = 8;
  double weight_decay = 0.01;
  std::size_t warmup = 10;
  std::size_t min_freq = 1;

  std::string gold;
  std::string pred;
  std::string dimension;
  bool exclude_o = false;
  bool fixed_universe = false;
  std::string json_out;
  std::string confusion_out;

  std::string original;
  std::string updated;

  std::string c_values;
  int class_a = 1;
  int class_b = 4;
  double c = 10.0;
};

CorpusPtr load(const Options& o) {
  if (o.corpus.empty()) {
    throw Failure{kExitUsage, "no corpus given (--corpus or ARGMINE_CORPUS)"};
  }
  am_corpus* raw = nullptr;
  Str warnings;
  check(am_corpus_load(o.corpus.c_str(), o.min_spans, &raw, warnings.out()), "load corpus");
  if (!warnings.get().empty()) std::cerr << warnings.get();
  return CorpusPtr(raw, am_corpus_free);
}

CorpusPtr restrict(CorpusPtr corpus, const Options& o) {
  if (o.split.empty()) return corpus;
  am_corpus* part = nullptr;
  const std::string which = o.part.empty() ? "test" : o.part;
  check(am_corpus_subset(corpus.get(), slurp(o.split).c_str(), which.c_str(), &part), "select split");
  return CorpusPtr(part, am_corpus_free);
}

std::array<double, 3> parse_ratios(const std::string& text) {
  std::array<double, 3> r{};
  std::stringstream ss(text);
  std::string item;
  std::size_t i = 0;
  while (std::getline(ss, item, ',')) {
    if (i == 3) throw Failure{kExitUsage, "--ratios takes three values"};
    try {
      r[i++] = std::stod(item);
    } catch (const std::logic_error&) {
      throw Failure{kExitUsage, "bad ratio '" + item + "'"};
    }
  }
  if (i != 3) throw Failure{kExitUsage, "--ratios takes three values"};
  return r;
}

int run(CLI::App& app, const Options& o, const Meta& meta) {
  const std::string header = meta.header();
  CLI::App* sub = app.get_subcommands().front();
  const std::string name = sub->get_name();

  if (name == "ingest") {
    Str report;
    check(am_ingest_directory(o.in_dir.c_str(), o.out.c_str(), o.trim_law, o.jobs, meta.json().c_str(),
                              report.out()),
          "ingest");
    std::cout << header << "\n" << report.get();
    return report.get().find("\tok\t") == std::string::npos ? kExitData : 0;
  }
  if (name == "validate") {
    auto corpus = load(o);
    Str report;
    std::size_t violations = 0;
    check(am_corpus_validate(corpus.get(), report.out(), &violations), "validate");
    emit(o.out, header + "\n" + report.get());
    std::cerr << am_corpus_size(corpus.get()) << " cases, " << violations << " violations\n";
    return violations == 0 ? 0 : kExitData;
  }
  if (name == "stats") {
    auto corpus = load(o);
    Str tsv;
    check(am_corpus_stats(corpus.get(), header.c_str(), tsv.out()), "stats");
    emit(o.out, tsv.get());
    return 0;
  }
  if (name == "split") {
    auto corpus = load(o);
    const auto r = parse_ratios(o.ratios);
    Str json, warnings;
    check(am_corpus_split(corpus.get(), r[0], r[1], r[2], o.seed, meta.json().c_str(), json.out(),
                          warnings.out()),
          "split");
    if (!warnings.get().empty()) std::cerr << warnings.get();
    emit(o.out, json.get());
    return 0;
  }
  if (name == "encode") {
    auto corpus = restrict(load(o), o);
    Str tsv;
    check(am_corpus_encode_tsv(corpus.get(), header.c_str(), tsv.out()), "encode");
    emit(o.out, tsv.get());
    return 0;
  }
  if (name == "agree") {
    if (o.layers != "raw") throw Failure{kExitUsage, "--layers supports only 'raw'"};
    auto corpus = load(o);
    std::string batches;
    if (!o.by_batch.empty()) batches = slurp(o.by_batch);
    Str tsv;
    check(am_agreement_report(corpus.get(), batches.empty() ? nullptr : batches.c_str(),
                              header.c_str(), tsv.out()),
          "agree");
    emit(o.out, tsv.get());
    return 0;
  }
  if (name == "train") {
    auto corpus = load(o);
    std::ostringstream cfg;
    cfg << "{\"embedding_dim\":" << o.embedding << ",\"hidden_dim\":" << o.hidden
        << ",\"epochs\":" << o.epochs << ",\"learning_rate\":" << o.lr
        << ",\"batch_size\":" << o.batch_size << ",\"weight_decay\":" << o.weight_decay
        << ",\"warmup_steps\":" << o.warmup << ",\"seed\":" << o.seed
        << ",\"min_freq\":" << o.min_freq << "}";
    am_tagger* raw = nullptr;
    Str log;
    check(am_tagger_train(corpus.get(), slurp(o.split).c_str(), cfg.str().c_str(), &raw, log.out()),
          "train");
    TaggerPtr tagger(raw, am_tagger_free);
    check(am_tagger_save(tagger.get(), o.out.c_str(), meta.json().c_str()), "save checkpoint");
    if (o.log.empty()) {
      std::cerr << log.get();
    } else {
      emit(o.log, header + "\n" + log.get());
    }
    return 0;
  }
  if (name == "predict") {
    am_tagger* raw = nullptr;
    check(am_tagger_load(o.model.c_str(), &raw), "load checkpoint");
    TaggerPtr tagger(raw, am_tagger_free);
    auto corpus = restrict(load(o), o);
    Str tsv;
    check(am_tagger_predict_tsv(tagger.get(), corpus.get(), header.c_str(), o.jobs, tsv.out()),
          "predict");
    emit(o.out, tsv.get());
    return 0;
  }
  if (name == "eval") {
    Str metrics, json, confusion;
    check(am_eval_tsv(slurp(o.gold).c_str(), slurp(o.pred).c_str(), o.dimension.c_str(), o.exclude_o,
                      o.fixed_universe, header.c_str(), metrics.out(),
                      o.json_out.empty() ? nullptr : json.out(),
                      o.confusion_out.empty() ? nullptr : confusion.out()),
          "eval");
    emit(o.out, metrics.get());
    if (!o.json_out.empty()) emit(o.json_out, json.get());
    if (!o.confusion_out.empty()) emit(o.confusion_out, confusion.get());
    return 0;
  }
  if (name == "transfer") {
    Str tsv;
    check(am_transfer_tsv(slurp(o.original).c_str(), slurp(o.updated).c_str(), header.c_str(),
                          tsv.out()),
          "transfer");
    emit(o.out, tsv.get());
    return 0;
  }
  if (name == "importance") {
    const std::string what = sub->get_subcommands().front()->get_name();
    auto corpus = load(o);
    Str csv;
    if (what == "features") {
      check(am_importance_features(corpus.get(), header.c_str(), csv.out()), "importance features");
    } else if (what == "train") {
      Str model;
      check(am_importance_train(corpus.get(), o.seed, o.c_values.empty() ? nullptr : o.c_values.c_str(),
                                meta.json().c_str(), header.c_str(), model.out(), csv.out()),
            "importance train");
      emit(o.model, model.get());
    } else if (what == "report") {
      check(am_importance_report(corpus.get(), slurp(o.model).c_str(), header.c_str(), csv.out()),
            "importance report");
    } else if (what == "averages") {
      check(am_importance_averages(corpus.get(), header.c_str(), csv.out()), "importance averages");
    } else {
      check(am_importance_weights(corpus.get(), o.class_a, o.class_b, o.c, header.c_str(),
                                  csv.out()),
            "importance weights");
    }
    emit(o.out, csv.get());
    return 0;
  }
  throw Failure{kExitUsage, "unknown command " + name};
}

void add_corpus(CLI::App* cmd, Options& o) {
  cmd->add_option("--corpus", o.corpus, "Corpus directory or JSON file")->envname("ARGMINE_CORPUS");
  cmd->add_option("--min-spans", o.min_spans, "Drop cases with fewer gold spans");
}

void add_out(CLI::App* cmd, Options& o, bool required = false) {
  auto* opt = cmd->add_option("--out", o.out, "Output file (default stdout)");
  if (required) opt->required();
}

void add_selection(CLI::App* cmd, Options& o) {
  cmd->add_option("--split", o.split, "Split file restricting the cases")->check(CLI::ExistingFile);
  cmd->add_option("--part", o.part, "Split part used with --split (default test)")
      ->check(CLI::IsMember({"train", "dev", "test"}));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"argmine: argument mining toolkit for court decisions"};
  app.name("argmine");
  Options o;
  app.set_config("--config", "", "Configuration file (TOML/INI); command-line flags win");
  app.add_option("--jobs", o.jobs, "Worker threads where supported")->check(CLI::PositiveNumber);
  app.require_subcommand(1);
  app.fallthrough();

  auto* ingest = app.add_subcommand("ingest", "Convert .html/.txt decisions to corpus JSON");
  ingest->add_option("--in", o.in_dir, "Input directory")->required()->check(CLI::ExistingDirectory);
  add_out(ingest, o, true);
  ingest->add_flag("--trim-law", o.trim_law, "Keep only the law section");

  auto* validate = app.add_subcommand("validate", "Check corpus invariants");
  add_corpus(validate, o);
  add_out(validate, o);

  auto* stats = app.add_subcommand("stats", "Label distribution tables");
  add_corpus(stats, o);
  add_out(stats, o);

  auto* split = app.add_subcommand("split", "Stratified train/dev/test split");
  add_corpus(split, o);
  split->add_option("--seed", o.seed, "Random seed");
  split->add_option("--ratios", o.ratios, "train,dev,test fractions");
  add_out(split, o);

  auto* encode = app.add_subcommand("encode", "Gold BIO columns as TSV");
  add_corpus(encode, o);
  add_selection(encode, o);
  add_out(encode, o);

  auto* agree = app.add_subcommand("agree", "Inter-annotator agreement (unitized alpha)");
  add_corpus(agree, o);
  agree->add_option("--layers", o.layers, "Annotation layers to compare");
  agree->add_option("--by-batch", o.by_batch, "JSON map of batch name to case ids")
      ->check(CLI::ExistingFile);
  add_out(agree, o);

  auto* train = app.add_subcommand("train", "Train the multitask tagger");
  add_corpus(train, o);
  train->add_option("--split", o.split, "Split file")->required()->check(CLI::ExistingFile);
  add_out(train, o, true);
  train->add_option("--log", o.log, "Epoch log TSV (default stderr)");
  train->add_option("--seed", o.seed, "Random seed");
  train->add_option("--epochs", o.epochs, "Training epochs");
  train->add_option("--lr", o.lr, "Peak learning rate");
  train->add_option("--hidden", o.hidden, "Recurrent hidden size per direction");
  train->add_option("--embedding", o.embedding, "Token embedding size");
  train->add_option("--batch-size", o.batch_size, "Paragraphs per batch");
  train->add_option("--weight-decay", o.weight_decay, "Decoupled weight decay");
  train->add_option("--warmup", o.warmup, "Warmup steps");
  train->add_option("--min-freq", o.min_freq, "Minimum token frequency for the vocabulary");

  auto* predict = app.add_subcommand("predict", "Tag a corpus with a trained checkpoint");
  predict->add_option("--model", o.model, "Checkpoint file")->required()->check(CLI::ExistingFile);
  add_corpus(predict, o);
  add_selection(predict, o);
  add_out(predict, o);

  auto* eval = app.add_subcommand("eval", "Token-level precision/recall/F1");
  eval->add_option("--gold", o.gold, "TSV with gold columns")->required()->check(CLI::ExistingFile);
  eval->add_option("--pred", o.pred, "TSV with predicted columns")->required()->check(CLI::ExistingFile);
  eval->add_option("--dimension", o.dimension, "arg or actor")
      ->required()
      ->check(CLI::IsMember({"arg", "actor"}));
  eval->add_flag("--exclude-o", o.exclude_o, "Leave O out of the macro average");
  eval->add_flag("--fixed-universe", o.fixed_universe, "Macro over the full tag set");
  eval->add_option("--json", o.json_out, "Also write the metrics as JSON");
  eval->add_option("--confusion", o.confusion_out, "Row-normalized confusion matrix CSV");
  add_out(eval, o);

  auto* transfer = app.add_subcommand("transfer", "Compare two metric tables");
  transfer->add_option("--original", o.original, "Metrics TSV on the original set")
      ->required()
      ->check(CLI::ExistingFile);
  transfer->add_option("--new", o.updated, "Metrics TSV on the new set")
      ->required()
      ->check(CLI::ExistingFile);
  add_out(transfer, o);

  auto* importance = app.add_subcommand("importance", "Case importance from argument features");
  importance->require_subcommand(1);
  for (const char* what : {"features", "train", "report", "averages", "weights"}) {
    auto* cmd = importance->add_subcommand(what);
    add_corpus(cmd, o);
    add_out(cmd, o);
    const std::string w = what;
    cmd->add_option("--seed", o.seed, w == "train" ? "Holdout and fold seed" : "Seed recorded in the header");
    if (w == "train") {
      cmd->description("Grid-searched one-vs-rest linear SVM");
      cmd->add_option("--model", o.model, "Where to write the model")->required();
      cmd->add_option("--c-values", o.c_values, "Comma-separated C grid");
    } else if (w == "report") {
      cmd->description("Held-out classification report for a saved model");
      cmd->add_option("--model", o.model, "Model file")->required()->check(CLI::ExistingFile);
    } else if (w == "weights") {
      cmd->description("Ranked weights of a binary level-vs-level fit");
      cmd->add_option("--class-a", o.class_a, "Positive level")->check(CLI::Range(1, 4));
      cmd->add_option("--class-b", o.class_b, "Negative level")->check(CLI::Range(1, 4));
      cmd->add_option("--c", o.c, "Regularisation constant")->check(CLI::PositiveNumber);
    } else if (w == "features") {
      cmd->description("Feature vector per case");
    } else {
      cmd->description("Mean feature value per importance level");
    }
  }

  if (argc < 2) {
    std::cerr << app.help();
    return kExitUsage;
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  Meta meta;
  auto* sub = app.get_subcommands().front();
  meta.command = sub->get_name();
  if (!sub->get_subcommands().empty()) meta.command += "." + sub->get_subcommands().front()->get_name();
  meta.seed = o.seed;
  char hash[17];
  std::snprintf(hash, sizeof hash, "%016llx",
                static_cast<unsigned long long>(fnv1a(meta.command + "\n" + app.config_to_str(true, false))));
  meta.config_hash = hash;

  try {
    return run(app, o, meta);
  } catch (const Failure& f) {
    std::cerr << "argmine: " << f.message << "\n";
    return f.code;
  }
}
