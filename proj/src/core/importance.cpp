#include "argmine/importance.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <unordered_set>

#include "argmine/error.hpp"
#include "argmine/rng.hpp"
#include "json.hpp"

namespace argmine {

const std::vector<std::string>& feature_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> n = {"doc_length",
                                  "shortened_doc_length",
                                  "num_arguments",
                                  "avg_argument_length",
                                  "fraction_argumentative",
                                  "shortened_fraction_argumentative"};
    for (ArgType t : all_arg_types()) n.push_back("fraction_" + std::string(to_string(t)));
    for (Actor a : all_actors()) n.push_back("fraction_" + std::string(to_string(a)));
    return n;
  }();
  return names;
}

namespace {

std::size_t count_code_points(std::string_view s) {
  std::size_t n = 0;
  for (char ch : s) {
    if ((static_cast<unsigned char>(ch) & 0xC0) != 0x80) ++n;
  }
  return n;
}

}  // namespace

FeatureVector extract_features(const AnnotatedCase& c) {
  if (c.gold_spans.empty()) {
    throw Error(ErrorKind::kNoArguments, c.case_id + ": no arguments, fractions undefined");
  }
  const bool any_law = std::any_of(c.paragraphs.begin(), c.paragraphs.end(),
                                   [](const Paragraph& p) { return p.in_law_section; });
  double doc_tokens = 0;
  double law_tokens = 0;
  std::unordered_set<std::string> law_ids;
  for (const auto& p : c.paragraphs) {
    doc_tokens += double(p.tokens.size());
    if (!any_law || p.in_law_section) {
      law_tokens += double(p.tokens.size());
      law_ids.insert(p.id);
    }
  }

  FeatureVector f;
  double arg_tokens = 0;
  double arg_tokens_law = 0;
  double arg_chars = 0;
  for (const auto& s : c.gold_spans) {
    const Paragraph* p = c.find_paragraph(s.paragraph_id);
    if (p == nullptr || s.tok_start >= s.tok_end || s.tok_end > p->tokens.size()) {
      throw Error(ErrorKind::kSpanOutOfBounds, c.case_id + ": invalid gold span");
    }
    const double len = double(s.tok_end - s.tok_start);
    arg_tokens += len;
    if (law_ids.contains(s.paragraph_id)) arg_tokens_law += len;
    const std::size_t from = p->tokens[s.tok_start].char_start;
    const std::size_t to = p->tokens[s.tok_end - 1].char_end;
    arg_chars += double(count_code_points(std::string_view(p->text).substr(from, to - from)));
    f.values[6 + static_cast<std::size_t>(s.arg_type)] += 1.0;
    f.values[6 + kNumArgTypes + static_cast<std::size_t>(s.actor)] += 1.0;
  }
  const double n_args = double(c.gold_spans.size());
  f.values[0] = doc_tokens;
  f.values[1] = law_tokens;
  f.values[2] = n_args;
  f.values[3] = arg_chars / n_args;
  f.values[4] = doc_tokens > 0 ? arg_tokens / doc_tokens : 0.0;
  f.values[5] = law_tokens > 0 ? arg_tokens_law / law_tokens : 0.0;
  for (std::size_t k = 6; k < kNumFeatures; ++k) f.values[k] /= n_args;
  return f;
}

// ---------------------------------------------------------------------------

Standardizer Standardizer::fit(const FeatureMatrix& rows) {
  if (rows.empty()) throw Error(ErrorKind::kInvalidArgument, "cannot standardize zero rows");
  const std::size_t d = rows.front().size();
  Standardizer s;
  s.mean.assign(d, 0.0);
  s.scale.assign(d, 1.0);
  s.retained.assign(d, true);
  const double n = double(rows.size());
  for (const auto& r : rows) {
    for (std::size_t k = 0; k < d; ++k) s.mean[k] += r[k];
  }
  for (auto& m : s.mean) m /= n;
  std::vector<double> var(d, 0.0);
  for (const auto& r : rows) {
    for (std::size_t k = 0; k < d; ++k) var[k] += (r[k] - s.mean[k]) * (r[k] - s.mean[k]);
  }
  for (std::size_t k = 0; k < d; ++k) {
    const double sd = std::sqrt(var[k] / n);
    if (sd > 1e-12 * std::max(1.0, std::abs(s.mean[k]))) {
      s.scale[k] = sd;
    } else {
      s.retained[k] = false;
    }
  }
  return s;
}

std::vector<double> Standardizer::apply(std::span<const double> row) const {
  if (row.size() != mean.size()) {
    throw Error(ErrorKind::kInvalidArgument, "feature row has wrong dimension");
  }
  std::vector<double> out(row.size());
  for (std::size_t k = 0; k < row.size(); ++k) {
    out[k] = retained[k] ? (row[k] - mean[k]) / scale[k] : 0.0;
  }
  return out;
}

FeatureMatrix Standardizer::apply(const FeatureMatrix& rows) const {
  FeatureMatrix out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back(apply(r));
  return out;
}

// ---------------------------------------------------------------------------

double BinaryLinearSvm::decision(std::span<const double> x) const {
  double v = bias;
  for (std::size_t k = 0; k < weights.size(); ++k) v += weights[k] * x[k];
  return v;
}

double svm_primal_objective(const BinaryLinearSvm& model, const FeatureMatrix& x,
                            const std::vector<int>& y, double c) {
  double reg = model.bias * model.bias;
  for (double w : model.weights) reg += w * w;
  double loss = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    loss += std::max(0.0, 1.0 - double(y[i]) * model.decision(x[i]));
  }
  return 0.5 * reg + c * loss;
}

BinaryLinearSvm train_linear_svm(const FeatureMatrix& x, const std::vector<int>& y,
                                 const SvmOptions& options) {
  if (x.empty() || x.size() != y.size()) {
    throw Error(ErrorKind::kInvalidArgument, "svm: need matching non-empty examples and labels");
  }
  if (!(options.c > 0.0)) throw Error(ErrorKind::kConfigInvalid, "svm: C must be positive");
  const std::size_t n = x.size();
  const std::size_t d = x.front().size();
  for (int label : y) {
    if (label != 1 && label != -1) throw Error(ErrorKind::kInvalidArgument, "svm labels must be ±1");
  }

  // Dual coordinate descent in a fixed cyclic order; the returned model is the
  // best primal iterate seen at an epoch boundary.
  std::vector<double> w(d, 0.0);
  double b = 0.0;
  std::vector<double> alpha(n, 0.0);
  std::vector<double> qdiag(n, 1.0);  // the bias feature contributes 1
  for (std::size_t i = 0; i < n; ++i) {
    for (double v : x[i]) qdiag[i] += v * v;
  }

  BinaryLinearSvm model;
  model.weights = w;
  double best = svm_primal_objective(model, x, y, options.c);
  BinaryLinearSvm current;
  for (int epoch = 0; epoch < options.max_epochs; ++epoch) {
    double max_pg = -std::numeric_limits<double>::infinity();
    double min_pg = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
      const double yi = double(y[i]);
      double margin = b;
      for (std::size_t k = 0; k < d; ++k) margin += w[k] * x[i][k];
      const double g = yi * margin - 1.0;
      double pg = g;
      if (alpha[i] == 0.0) {
        pg = std::min(g, 0.0);
      } else if (alpha[i] == options.c) {
        pg = std::max(g, 0.0);
      }
      max_pg = std::max(max_pg, pg);
      min_pg = std::min(min_pg, pg);
      if (std::abs(pg) <= 1e-12) continue;
      const double old = alpha[i];
      alpha[i] = std::min(std::max(old - g / qdiag[i], 0.0), options.c);
      const double step = (alpha[i] - old) * yi;
      for (std::size_t k = 0; k < d; ++k) w[k] += step * x[i][k];
      b += step;
    }
    current.weights = w;
    current.bias = b;
    const double value = svm_primal_objective(current, x, y, options.c);
    if (value < best) {
      best = value;
      model.weights = w;
      model.bias = b;
    }
    model.epochs = epoch + 1;
    model.primal_trace.push_back(best);
    if (max_pg - min_pg < options.tolerance) break;
  }
  return model;
}

// ---------------------------------------------------------------------------

std::array<double, kNumLevels> ImportanceModel::decision_values(std::span<const double> raw) const {
  const auto z = standardizer.apply(raw);
  std::array<double, kNumLevels> out{};
  for (int k = 0; k < kNumLevels; ++k) out[k] = classes[k].decision(z);
  return out;
}

int ImportanceModel::predict(std::span<const double> raw) const {
  const auto v = decision_values(raw);
  int best = 0;
  for (int k = 1; k < kNumLevels; ++k) {
    if (v[k] > v[best]) best = k;
  }
  return best + 1;
}

namespace {

void check_levels(const std::vector<int>& levels) {
  for (int l : levels) {
    if (l < 1 || l > kNumLevels) {
      throw Error(ErrorKind::kInvalidArgument, "importance level out of range: " + std::to_string(l));
    }
  }
}

std::array<std::size_t, kNumLevels> level_counts(const std::vector<int>& levels) {
  std::array<std::size_t, kNumLevels> counts{};
  for (int l : levels) ++counts[l - 1];
  return counts;
}

FeatureMatrix take_rows(const FeatureMatrix& x, const std::vector<std::size_t>& idx) {
  FeatureMatrix out;
  out.reserve(idx.size());
  for (auto i : idx) out.push_back(x[i]);
  return out;
}

std::vector<int> take_labels(const std::vector<int>& y, const std::vector<std::size_t>& idx) {
  std::vector<int> out;
  out.reserve(idx.size());
  for (auto i : idx) out.push_back(y[i]);
  return out;
}

}  // namespace

ImportanceModel fit_one_vs_rest(const FeatureMatrix& x, const std::vector<int>& levels, double c) {
  check_levels(levels);
  const auto counts = level_counts(levels);
  for (int k = 0; k < kNumLevels; ++k) {
    if (counts[k] == 0) {
      throw Error(ErrorKind::kDegenerateClass,
                  "importance level " + std::to_string(k + 1) + " absent from training data");
    }
  }
  ImportanceModel model;
  model.c = c;
  model.standardizer = Standardizer::fit(x);
  const FeatureMatrix z = model.standardizer.apply(x);
  for (int k = 0; k < kNumLevels; ++k) {
    std::vector<int> y(levels.size());
    for (std::size_t i = 0; i < levels.size(); ++i) y[i] = levels[i] == k + 1 ? 1 : -1;
    SvmOptions opts;
    opts.c = c;
    model.classes[k] = train_linear_svm(z, y, opts);
  }
  return model;
}

std::vector<std::size_t> stratified_folds(const std::vector<int>& labels, std::size_t folds,
                                          std::uint64_t seed) {
  if (folds == 0) throw Error(ErrorKind::kConfigInvalid, "fold count must be positive");
  std::vector<int> distinct = labels;
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());

  Rng rng(seed);
  std::vector<std::size_t> fold(labels.size(), 0);
  std::size_t next = 0;
  for (int label : distinct) {
    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < labels.size(); ++i) {
      if (labels[i] == label) members.push_back(i);
    }
    rng.shuffle(std::span<std::size_t>(members));
    for (auto i : members) {
      fold[i] = next % folds;
      ++next;
    }
  }
  return fold;
}

HoldoutSplit stratified_holdout(const std::vector<int>& labels, double test_fraction,
                                std::uint64_t seed) {
  if (test_fraction < 0.0 || test_fraction > 1.0) {
    throw Error(ErrorKind::kConfigInvalid, "test fraction must be in [0, 1]");
  }
  std::vector<int> distinct = labels;
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());

  const std::size_t target = static_cast<std::size_t>(std::lround(test_fraction * double(labels.size())));
  std::vector<std::vector<std::size_t>> members(distinct.size());
  std::vector<std::size_t> quota(distinct.size());
  std::vector<double> remainder(distinct.size());
  std::size_t assigned = 0;
  Rng rng(seed);
  for (std::size_t k = 0; k < distinct.size(); ++k) {
    for (std::size_t i = 0; i < labels.size(); ++i) {
      if (labels[i] == distinct[k]) members[k].push_back(i);
    }
    rng.shuffle(std::span<std::size_t>(members[k]));
    const double exact = test_fraction * double(members[k].size());
    quota[k] = static_cast<std::size_t>(std::floor(exact));
    remainder[k] = exact - double(quota[k]);
    assigned += quota[k];
  }
  while (assigned < target) {
    std::size_t best = 0;
    for (std::size_t k = 1; k < distinct.size(); ++k) {
      if (remainder[k] > remainder[best]) best = k;
    }
    ++quota[best];
    remainder[best] = -1.0;
    ++assigned;
  }
  HoldoutSplit split;
  for (std::size_t k = 0; k < distinct.size(); ++k) {
    for (std::size_t j = 0; j < members[k].size(); ++j) {
      (j < quota[k] ? split.test : split.train).push_back(members[k][j]);
    }
  }
  std::sort(split.train.begin(), split.train.end());
  std::sort(split.test.begin(), split.test.end());
  return split;
}

ImportanceModel grid_search_train(const FeatureMatrix& x, const std::vector<int>& levels,
                                  const GridConfig& grid, std::uint64_t seed) {
  check_levels(levels);
  if (grid.c_values.empty()) throw Error(ErrorKind::kConfigInvalid, "grid has no C values");
  for (double c : grid.c_values) {
    if (!(c > 0.0)) throw Error(ErrorKind::kConfigInvalid, "grid C values must be positive");
  }
  const auto counts = level_counts(levels);
  for (int k = 0; k < kNumLevels; ++k) {
    if (counts[k] == 0) {
      throw Error(ErrorKind::kDegenerateClass,
                  "importance level " + std::to_string(k + 1) + " absent from training data");
    }
    if (counts[k] < grid.folds) {
      throw Error(ErrorKind::kDegenerateClass,
                  "importance level " + std::to_string(k + 1) + " has " +
                      std::to_string(counts[k]) + " examples, fewer than " +
                      std::to_string(grid.folds) + " folds");
    }
  }

  const auto fold = stratified_folds(levels, grid.folds, seed);
  std::vector<GridPoint> points;
  for (double c : grid.c_values) {
    GridPoint point;
    point.c = c;
    for (std::size_t f = 0; f < grid.folds; ++f) {
      std::vector<std::size_t> tr;
      std::vector<std::size_t> va;
      for (std::size_t i = 0; i < levels.size(); ++i) (fold[i] == f ? va : tr).push_back(i);
      const auto model = fit_one_vs_rest(take_rows(x, tr), take_labels(levels, tr), c);
      const auto report = classification_report(model, take_rows(x, va), take_labels(levels, va));
      point.fold_macro_f1.push_back(report.macro_f1);
    }
    point.mean_macro_f1 = macro_average(point.fold_macro_f1);
    points.push_back(std::move(point));
  }

  std::size_t best = 0;
  for (std::size_t k = 1; k < points.size(); ++k) {
    if (points[k].mean_macro_f1 > points[best].mean_macro_f1 + 1e-12) best = k;
  }
  ImportanceModel model = fit_one_vs_rest(x, levels, points[best].c);
  model.grid = std::move(points);
  return model;
}

// ---------------------------------------------------------------------------

double macro_average(std::span<const double> values) {
  if (values.empty()) return 0.0;
  return std::accumulate(values.begin(), values.end(), 0.0) / double(values.size());
}

ClassificationReport classification_report(const std::vector<int>& gold,
                                           const std::vector<int>& predicted) {
  if (gold.size() != predicted.size()) {
    throw Error(ErrorKind::kLengthMismatch, "classification_report: length mismatch");
  }
  check_levels(gold);
  check_levels(predicted);
  std::array<std::size_t, kNumLevels> tp{};
  std::array<std::size_t, kNumLevels> pred_count{};
  std::array<std::size_t, kNumLevels> gold_count{};
  for (std::size_t i = 0; i < gold.size(); ++i) {
    ++gold_count[gold[i] - 1];
    ++pred_count[predicted[i] - 1];
    if (gold[i] == predicted[i]) ++tp[gold[i] - 1];
  }
  ClassificationReport report;
  std::array<double, kNumLevels> p{};
  std::array<double, kNumLevels> r{};
  std::array<double, kNumLevels> f{};
  for (int k = 0; k < kNumLevels; ++k) {
    p[k] = pred_count[k] == 0 ? 0.0 : double(tp[k]) / double(pred_count[k]);
    r[k] = gold_count[k] == 0 ? 0.0 : double(tp[k]) / double(gold_count[k]);
    f[k] = (p[k] + r[k]) > 0.0 ? 2.0 * p[k] * r[k] / (p[k] + r[k]) : 0.0;
    report.rows[k] = {k + 1, p[k], r[k], f[k], gold_count[k]};
  }
  report.macro_precision = macro_average(p);
  report.macro_recall = macro_average(r);
  report.macro_f1 = macro_average(f);
  report.support = gold.size();
  return report;
}

ClassificationReport classification_report(const ImportanceModel& model, const FeatureMatrix& x,
                                           const std::vector<int>& gold) {
  std::vector<int> predicted;
  predicted.reserve(x.size());
  for (const auto& row : x) predicted.push_back(model.predict(row));
  return classification_report(gold, predicted);
}

std::vector<FeatureWeight> feature_importance(const FeatureMatrix& x, const std::vector<int>& levels,
                                              int class_a, int class_b,
                                              const std::vector<std::string>& names, double c) {
  FeatureMatrix rows;
  std::vector<int> y;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (levels[i] == class_a || levels[i] == class_b) {
      rows.push_back(x[i]);
      y.push_back(levels[i] == class_a ? 1 : -1);
    }
  }
  const auto has = [&](int v) { return std::find(y.begin(), y.end(), v) != y.end(); };
  if (class_a == class_b || !has(1) || !has(-1)) {
    throw Error(ErrorKind::kDegenerateClass, "feature_importance: both classes must be present");
  }
  if (!rows.empty() && names.size() != rows.front().size()) {
    throw Error(ErrorKind::kInvalidArgument, "feature_importance: name count differs from dimension");
  }
  const auto standardizer = Standardizer::fit(rows);
  SvmOptions opts;
  opts.c = c;
  const auto model = train_linear_svm(standardizer.apply(rows), y, opts);

  std::vector<FeatureWeight> out;
  for (std::size_t k = 0; k < names.size(); ++k) out.push_back({names[k], model.weights[k]});
  std::stable_sort(out.begin(), out.end(), [](const FeatureWeight& a, const FeatureWeight& b) {
    return std::abs(a.weight) > std::abs(b.weight);
  });
  return out;
}

ImportanceData importance_data(const Corpus& corpus) {
  ImportanceData data;
  for (const auto& c : corpus) {
    if (!c.importance) {
      data.skipped.push_back(c.case_id + ": no importance level");
      continue;
    }
    if (c.gold_spans.empty()) {
      data.skipped.push_back(c.case_id + ": no arguments");
      continue;
    }
    const auto f = extract_features(c);
    data.case_ids.push_back(c.case_id);
    data.x.emplace_back(f.values.begin(), f.values.end());
    data.levels.push_back(c.importance->value());
  }
  return data;
}

FeatureAverages feature_averages(const Corpus& corpus) {
  const auto data = importance_data(corpus);
  FeatureAverages out;
  std::vector<std::array<double, kNumLevels>> sums(kNumFeatures, std::array<double, kNumLevels>{});
  for (std::size_t i = 0; i < data.x.size(); ++i) {
    const int k = data.levels[i] - 1;
    ++out.cases[k];
    for (std::size_t f = 0; f < kNumFeatures; ++f) sums[f][k] += data.x[i][f];
  }
  out.means.resize(kNumFeatures);
  for (std::size_t f = 0; f < kNumFeatures; ++f) {
    for (int k = 0; k < kNumLevels; ++k) {
      if (out.cases[k] > 0) out.means[f][k] = sums[f][k] / double(out.cases[k]);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------

std::string model_to_json(const ImportanceModel& model, const std::string& extra_json) {
  using nlohmann::json;
  json classes = json::array();
  for (const auto& m : model.classes) classes.push_back({{"weights", m.weights}, {"bias", m.bias}});
  json grid = json::array();
  for (const auto& g : model.grid) {
    grid.push_back({{"c", g.c}, {"mean_macro_f1", g.mean_macro_f1}, {"fold_macro_f1", g.fold_macro_f1}});
  }
  json retained = json::array();
  for (bool r : model.standardizer.retained) retained.push_back(r);
  json j = {{"format", "argmine-importance"},
            {"version", 1},
            {"kernel", "linear"},
            {"c", model.c},
            {"features", feature_names()},
            {"standardizer",
             {{"mean", model.standardizer.mean},
              {"scale", model.standardizer.scale},
              {"retained", retained}}},
            {"classes", classes},
            {"grid", grid}};
  if (!extra_json.empty()) j["extra"] = json::parse(extra_json);
  return j.dump(1) + "\n";
}

ImportanceModel model_from_json(const std::string& text) {
  try {
    const auto j = nlohmann::json::parse(text);
    if (j.value("format", "") != "argmine-importance") {
      throw Error(ErrorKind::kParse, "not an importance model document");
    }
    ImportanceModel m;
    m.c = j.at("c").get<double>();
    m.standardizer.mean = j.at("standardizer").at("mean").get<std::vector<double>>();
    m.standardizer.scale = j.at("standardizer").at("scale").get<std::vector<double>>();
    m.standardizer.retained = j.at("standardizer").at("retained").get<std::vector<bool>>();
    const auto& classes = j.at("classes");
    if (classes.size() != kNumLevels) throw Error(ErrorKind::kParse, "model needs 4 classes");
    for (int k = 0; k < kNumLevels; ++k) {
      m.classes[k].weights = classes[k].at("weights").get<std::vector<double>>();
      m.classes[k].bias = classes[k].at("bias").get<double>();
    }
    for (const auto& g : j.value("grid", nlohmann::json::array())) {
      m.grid.push_back({g.at("c").get<double>(), g.at("mean_macro_f1").get<double>(),
                        g.at("fold_macro_f1").get<std::vector<double>>()});
    }
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::kParse, std::string("importance model: ") + e.what());
  }
}

}  // namespace argmine
