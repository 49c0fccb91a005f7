#include "argmine/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>
#include <sstream>

#include "argmine/error.hpp"
#include "json.hpp"

namespace argmine {

namespace {

void check_aligned(const TagSequences& gold, const TagSequences& pred) {
  if (gold.size() != pred.size()) {
    throw Error(ErrorKind::kLengthMismatch, "gold has " + std::to_string(gold.size()) +
                                                " sequences, pred has " +
                                                std::to_string(pred.size()));
  }
  for (std::size_t i = 0; i < gold.size(); ++i) {
    if (gold[i].size() != pred[i].size()) {
      throw Error(ErrorKind::kLengthMismatch,
                  "sequence " + std::to_string(i) + ": gold length " +
                      std::to_string(gold[i].size()) + " vs pred length " +
                      std::to_string(pred[i].size()));
    }
  }
}

struct Counts {
  std::uint64_t gold = 0;
  std::uint64_t pred = 0;
  std::uint64_t tp = 0;
};

}  // namespace

MetricsTable token_prf(const TagSequences& gold, const TagSequences& pred,
                       const PrfOptions& options) {
  check_aligned(gold, pred);
  std::map<std::string, Counts> counts;
  MetricsTable table;
  for (std::size_t s = 0; s < gold.size(); ++s) {
    for (std::size_t i = 0; i < gold[s].size(); ++i) {
      const auto& g = gold[s][i];
      const auto& p = pred[s][i];
      ++counts[g].gold;
      ++counts[p].pred;
      if (g == p) ++counts[g].tp;
      ++table.total_tokens;
    }
  }

  std::set<std::string> basis;
  if (options.fixed_universe) {
    for (const auto& l : *options.fixed_universe) {
      counts.try_emplace(l);
      basis.insert(l);
    }
    table.macro_basis = "fixed";
  } else {
    for (const auto& [label, c] : counts) basis.insert(label);
    table.macro_basis = "observed";
  }
  if (options.exclude_outside) {
    basis.erase("O");
    table.macro_basis += ",no-O";
  }

  double macro_sum = 0.0;
  for (const auto& [label, c] : counts) {
    LabelMetrics row;
    row.label = label;
    row.frequency = c.gold;
    row.predicted = c.pred;
    row.true_positives = c.tp;
    const double p = c.pred == 0 ? 0.0 : double(c.tp) / double(c.pred);
    const double r = c.gold == 0 ? 0.0 : double(c.tp) / double(c.gold);
    const double f = (p + r) > 0.0 ? 2.0 * p * r / (p + r) : 0.0;
    row.precision = 100.0 * p;
    row.recall = 100.0 * r;
    row.f1 = 100.0 * f;
    if (basis.contains(label)) macro_sum += row.f1;
    table.rows.push_back(std::move(row));
  }
  table.macro_f1 = basis.empty() ? 0.0 : macro_sum / double(basis.size());
  std::stable_sort(table.rows.begin(), table.rows.end(),
                   [](const LabelMetrics& a, const LabelMetrics& b) { return a.frequency > b.frequency; });
  return table;
}

ConfusionMatrix confusion(const TagSequences& gold, const TagSequences& pred,
                          const std::vector<std::string>& label_order) {
  check_aligned(gold, pred);
  std::map<std::string, std::pair<std::uint64_t, std::uint64_t>> freq;  // gold, pred
  for (std::size_t s = 0; s < gold.size(); ++s) {
    for (std::size_t i = 0; i < gold[s].size(); ++i) {
      ++freq[gold[s][i]].first;
      ++freq[pred[s][i]].second;
    }
  }

  ConfusionMatrix m;
  if (label_order.empty()) {
    for (const auto& [label, f] : freq) m.labels.push_back(label);
    std::stable_sort(m.labels.begin(), m.labels.end(), [&](const auto& a, const auto& b) {
      const auto& fa = freq[a];
      const auto& fb = freq[b];
      if (fa.first != fb.first) return fa.first > fb.first;
      return fa.second > fb.second;
    });
  } else {
    m.labels = label_order;
    for (const auto& [label, f] : freq) {
      if (std::find(m.labels.begin(), m.labels.end(), label) == m.labels.end()) {
        throw Error(ErrorKind::kInvalidArgument, "label '" + label + "' missing from label order");
      }
    }
  }

  std::map<std::string, std::size_t> index;
  for (std::size_t k = 0; k < m.labels.size(); ++k) index[m.labels[k]] = k;
  const std::size_t n = m.labels.size();
  m.counts.assign(n, std::vector<std::uint64_t>(n, 0));
  for (std::size_t s = 0; s < gold.size(); ++s) {
    for (std::size_t i = 0; i < gold[s].size(); ++i) {
      ++m.counts[index[gold[s][i]]][index[pred[s][i]]];
    }
  }
  m.normalized.resize(n);
  for (std::size_t g = 0; g < n; ++g) {
    std::uint64_t support = 0;
    for (auto v : m.counts[g]) support += v;
    if (support == 0) continue;
    m.normalized[g].resize(n);
    for (std::size_t p = 0; p < n; ++p) {
      m.normalized[g][p] = double(m.counts[g][p]) / double(support);
    }
  }
  return m;
}

std::optional<int> relative_difference_percent(double original, double updated) {
  if (original == 0.0) {
    if (updated == 0.0) return 0;
    return std::nullopt;
  }
  return static_cast<int>(std::lround((updated - original) / original * 100.0));
}

TransferReport transfer_report(const MetricsTable& original, const MetricsTable& updated) {
  TransferReport report;
  report.macro = {"Macro F1", updated.total_tokens, original.macro_f1, updated.macro_f1,
                  relative_difference_percent(original.macro_f1, updated.macro_f1)};

  std::map<std::string, const LabelMetrics*> fresh;
  for (const auto& r : updated.rows) fresh[r.label] = &r;
  std::set<std::string> listed;
  for (const auto& r : original.rows) {
    TransferRow row{r.label, 0, r.f1, 0.0, std::nullopt};
    if (auto it = fresh.find(r.label); it != fresh.end()) {
      row.frequency = it->second->frequency;
      row.new_f1 = it->second->f1;
    }
    row.difference_percent = relative_difference_percent(row.original_f1, row.new_f1);
    report.rows.push_back(std::move(row));
    listed.insert(r.label);
  }
  for (const auto& r : updated.rows) {
    if (listed.contains(r.label)) continue;
    report.rows.push_back({r.label, r.frequency, 0.0, r.f1,
                           relative_difference_percent(0.0, r.f1)});
  }
  std::stable_sort(report.rows.begin(), report.rows.end(),
                   [](const TransferRow& a, const TransferRow& b) { return a.frequency > b.frequency; });
  return report;
}

std::string format_percent(double value) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", value);
  return buf;
}

std::string metrics_to_tsv(const MetricsTable& table, const std::string& header) {
  std::ostringstream out;
  if (!header.empty()) out << header << "\n";
  out << "# macro_basis=" << table.macro_basis << "\n";
  out << "label\tfrequency\tprecision\trecall\tf1\n";
  out << "Macro F1\t" << table.total_tokens << "\t-\t-\t" << format_percent(table.macro_f1) << "\n";
  for (const auto& r : table.rows) {
    out << r.label << '\t' << r.frequency << '\t' << format_percent(r.precision) << '\t'
        << format_percent(r.recall) << '\t' << format_percent(r.f1) << "\n";
  }
  return out.str();
}

MetricsTable metrics_from_tsv(std::string_view text) {
  MetricsTable table;
  std::istringstream in{std::string(text)};
  std::string line;
  bool saw_columns = false;
  bool saw_macro = false;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line.starts_with("#")) {
      if (auto at = line.find("macro_basis="); at != std::string::npos) {
        table.macro_basis = line.substr(at + 12);
      }
      continue;
    }
    std::vector<std::string> f;
    std::istringstream ls(line);
    std::string field;
    while (std::getline(ls, field, '\t')) f.push_back(field);
    if (!saw_columns) {
      if (f.size() != 5 || f[0] != "label") {
        throw Error(ErrorKind::kParse, "metrics table: missing column header");
      }
      saw_columns = true;
      continue;
    }
    if (f.size() != 5) {
      throw Error(ErrorKind::kParse, "metrics table line " + std::to_string(line_no) +
                                         ": expected 5 columns");
    }
    try {
      if (f[0] == "Macro F1") {
        table.total_tokens = std::stoull(f[1]);
        table.macro_f1 = std::stod(f[4]);
        saw_macro = true;
      } else {
        LabelMetrics r;
        r.label = f[0];
        r.frequency = std::stoull(f[1]);
        r.precision = std::stod(f[2]);
        r.recall = std::stod(f[3]);
        r.f1 = std::stod(f[4]);
        table.rows.push_back(std::move(r));
      }
    } catch (const std::logic_error&) {
      throw Error(ErrorKind::kParse, "metrics table line " + std::to_string(line_no) +
                                         ": bad number");
    }
  }
  if (!saw_macro) throw Error(ErrorKind::kParse, "metrics table: missing Macro F1 row");
  return table;
}

std::string metrics_to_json(const MetricsTable& table) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : table.rows) {
    rows.push_back({{"label", r.label},
                    {"frequency", r.frequency},
                    {"predicted", r.predicted},
                    {"precision", r.precision},
                    {"recall", r.recall},
                    {"f1", r.f1}});
  }
  nlohmann::json j = {{"macro_f1", table.macro_f1},
                      {"macro_basis", table.macro_basis},
                      {"total_tokens", table.total_tokens},
                      {"labels", rows}};
  return j.dump(1) + "\n";
}

std::string confusion_to_csv(const ConfusionMatrix& m, bool normalized, const std::string& header) {
  std::ostringstream out;
  if (!header.empty()) out << header << "\n";
  out << "gold\\pred";
  for (const auto& l : m.labels) out << ',' << l;
  out << "\n";
  for (std::size_t g = 0; g < m.labels.size(); ++g) {
    if (normalized && m.normalized[g].empty()) continue;
    out << m.labels[g];
    for (std::size_t p = 0; p < m.labels.size(); ++p) {
      out << ',';
      if (normalized) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.4f", m.normalized[g][p]);
        out << buf;
      } else {
        out << m.counts[g][p];
      }
    }
    out << "\n";
  }
  return out.str();
}

std::string transfer_to_tsv(const TransferReport& report, const std::string& header) {
  std::ostringstream out;
  if (!header.empty()) out << header << "\n";
  out << "label\tfrequency\toriginal\tnew\tdifference_percent\n";
  auto emit = [&](const TransferRow& r) {
    out << r.label << '\t' << r.frequency << '\t' << format_percent(r.original_f1) << '\t'
        << format_percent(r.new_f1) << '\t';
    if (r.difference_percent) {
      out << *r.difference_percent;
    } else {
      out << "n/a";
    }
    out << "\n";
  };
  emit(report.macro);
  for (const auto& r : report.rows) emit(r);
  return out.str();
}

}  // namespace argmine
