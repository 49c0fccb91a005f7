#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace argmine {

using TagSequences = std::vector<std::vector<std::string>>;

struct LabelMetrics {
  std::string label;
  std::uint64_t frequency = 0;  // gold tokens
  std::uint64_t predicted = 0;
  std::uint64_t true_positives = 0;
  double precision = 0.0;  // percent
  double recall = 0.0;
  double f1 = 0.0;
};

struct MetricsTable {
  std::vector<LabelMetrics> rows;  // decreasing gold frequency
  double macro_f1 = 0.0;           // percent
  std::uint64_t total_tokens = 0;
  std::string macro_basis;  // "observed" or "fixed"
};

struct PrfOptions {
  /// Average over this label set instead of the labels seen in gold or pred.
  std::optional<std::vector<std::string>> fixed_universe;
  bool exclude_outside = false;
};

MetricsTable token_prf(const TagSequences& gold, const TagSequences& pred,
                       const PrfOptions& options = {});

struct ConfusionMatrix {
  std::vector<std::string> labels;              // row and column order
  std::vector<std::vector<std::uint64_t>> counts;  // [gold][pred]
  std::vector<std::vector<double>> normalized;  // empty row when no gold support
};

/// With an empty `label_order` the labels of gold and pred are ordered by
/// decreasing gold frequency, then decreasing prediction count, then name.
ConfusionMatrix confusion(const TagSequences& gold, const TagSequences& pred,
                          const std::vector<std::string>& label_order = {});

struct TransferRow {
  std::string label;
  std::uint64_t frequency = 0;  // on the new set
  double original_f1 = 0.0;
  double new_f1 = 0.0;
  std::optional<int> difference_percent;  // absent when original is 0 and new is not
};

struct TransferReport {
  TransferRow macro;
  std::vector<TransferRow> rows;
};

/// round((new - original) / original * 100), half away from zero.
std::optional<int> relative_difference_percent(double original, double updated);

TransferReport transfer_report(const MetricsTable& original, const MetricsTable& updated);

std::string metrics_to_tsv(const MetricsTable& table, const std::string& header = "");
MetricsTable metrics_from_tsv(std::string_view text);
std::string metrics_to_json(const MetricsTable& table);
std::string confusion_to_csv(const ConfusionMatrix& m, bool normalized, const std::string& header = "");
std::string transfer_to_tsv(const TransferReport& report, const std::string& header = "");

/// Percent with two decimals, as tables print it.
std::string format_percent(double value);

}  // namespace argmine
