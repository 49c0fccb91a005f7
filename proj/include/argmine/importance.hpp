#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "argmine/corpus.hpp"

namespace argmine {

inline constexpr std::size_t kNumFeatures = 6 + kNumArgTypes + kNumActors;  // 26
inline constexpr int kNumLevels = 4;

/// Feature names in vector order: six length/fraction features, then one
/// fraction per argument type and per actor.
const std::vector<std::string>& feature_names();

struct FeatureVector {
  std::array<double, kNumFeatures> values{};

  double doc_length() const { return values[0]; }
  double shortened_doc_length() const { return values[1]; }
  double num_arguments() const { return values[2]; }
  double avg_argument_length() const { return values[3]; }
  double fraction_argumentative() const { return values[4]; }
  double shortened_fraction_argumentative() const { return values[5]; }
  double fraction(ArgType t) const { return values[6 + static_cast<std::size_t>(t)]; }
  double fraction(Actor a) const { return values[6 + kNumArgTypes + static_cast<std::size_t>(a)]; }
};

/// Lengths in tokens except avg_argument_length (code points). The shortened
/// document is the set of law-section paragraphs (the whole case if none is
/// flagged). Throws NoArguments for a case without gold spans.
FeatureVector extract_features(const AnnotatedCase& c);

using FeatureMatrix = std::vector<std::vector<double>>;

/// Train-fitted zero-mean/unit-variance scaling; constant columns map to 0.
struct Standardizer {
  std::vector<double> mean;
  std::vector<double> scale;
  std::vector<bool> retained;

  static Standardizer fit(const FeatureMatrix& rows);
  std::vector<double> apply(std::span<const double> row) const;
  FeatureMatrix apply(const FeatureMatrix& rows) const;
};

struct SvmOptions {
  double c = 1.0;
  double tolerance = 1e-6;  // projected-gradient spread at which to stop
  int max_epochs = 100000;
};

struct BinaryLinearSvm {
  std::vector<double> weights;
  double bias = 0.0;
  int epochs = 0;
  std::vector<double> primal_trace;  // objective of the kept iterate after each epoch

  double decision(std::span<const double> x) const;
};

/// L2-regularised hinge-loss SVM, ½|w|² + C Σ max(0, 1 - y(w·x + b)), with
/// the bias as a constant unit feature. Dual coordinate descent; after each
/// epoch the primal iterate is kept only if it lowers the objective, so the
/// trace never rises. Labels are +1 / -1.
BinaryLinearSvm train_linear_svm(const FeatureMatrix& x, const std::vector<int>& y,
                                 const SvmOptions& options);

double svm_primal_objective(const BinaryLinearSvm& model, const FeatureMatrix& x,
                            const std::vector<int>& y, double c);

struct GridConfig {
  std::vector<double> c_values = {0.1, 1, 10, 100, 1000};
  std::size_t folds = 5;
};

struct GridPoint {
  double c = 0.0;
  double mean_macro_f1 = 0.0;
  std::vector<double> fold_macro_f1;
};

struct ImportanceModel {
  Standardizer standardizer;
  std::array<BinaryLinearSvm, kNumLevels> classes;  // one-vs-rest, level k at index k-1
  double c = 0.0;
  std::vector<GridPoint> grid;

  std::array<double, kNumLevels> decision_values(std::span<const double> raw) const;
  /// Level with the largest decision value; ties go to the lower level.
  int predict(std::span<const double> raw) const;
};

/// One-vs-rest fit on standardized features for a fixed C.
ImportanceModel fit_one_vs_rest(const FeatureMatrix& x, const std::vector<int>& levels, double c);

/// Per-class shuffled round-robin assignment; fold index per example.
std::vector<std::size_t> stratified_folds(const std::vector<int>& labels, std::size_t folds,
                                          std::uint64_t seed);

struct HoldoutSplit {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};

/// Stratified by label; the test part holds round(test_fraction * n) examples.
HoldoutSplit stratified_holdout(const std::vector<int>& labels, double test_fraction,
                                std::uint64_t seed);

ImportanceModel grid_search_train(const FeatureMatrix& x, const std::vector<int>& levels,
                                  const GridConfig& grid, std::uint64_t seed);

struct ClassRow {
  int level = 0;
  double precision = 0.0;  // fractions in [0, 1]
  double recall = 0.0;
  double f1 = 0.0;
  std::size_t support = 0;
};

struct ClassificationReport {
  std::array<ClassRow, kNumLevels> rows;
  double macro_precision = 0.0;
  double macro_recall = 0.0;
  double macro_f1 = 0.0;
  std::size_t support = 0;
};

double macro_average(std::span<const double> values);

ClassificationReport classification_report(const std::vector<int>& gold,
                                           const std::vector<int>& predicted);
ClassificationReport classification_report(const ImportanceModel& model, const FeatureMatrix& x,
                                           const std::vector<int>& gold);

struct FeatureWeight {
  std::string name;
  double weight = 0.0;  // positive favours class_a
};

/// Binary fit of class_a (+1) against class_b (-1) on standardized features;
/// features ranked by |weight|.
std::vector<FeatureWeight> feature_importance(const FeatureMatrix& x, const std::vector<int>& levels,
                                              int class_a, int class_b,
                                              const std::vector<std::string>& names, double c);

struct FeatureAverages {
  std::array<std::size_t, kNumLevels> cases{};
  std::vector<std::array<std::optional<double>, kNumLevels>> means;  // one row per feature
};

/// Cases without an importance level or without arguments are skipped.
FeatureAverages feature_averages(const Corpus& corpus);

/// Features and levels of every case that has both; skipped case ids reported.
struct ImportanceData {
  std::vector<std::string> case_ids;
  FeatureMatrix x;
  std::vector<int> levels;
  std::vector<std::string> skipped;
};
ImportanceData importance_data(const Corpus& corpus);

std::string model_to_json(const ImportanceModel& model, const std::string& extra_json = "");
ImportanceModel model_from_json(const std::string& text);

}  // namespace argmine
