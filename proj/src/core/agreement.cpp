#include "argmine/agreement.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <unordered_map>

#include "argmine/error.hpp"

namespace argmine {

namespace {

// A run of the continuum as one annotator sees it for a single category:
// either a unit of that category or the gap between such units.
struct Segment {
  double begin;
  double length;
  bool is_unit;
};

std::vector<Segment> segments_for(const std::vector<Unit>& units, const std::string& label,
                                  std::size_t length) {
  std::vector<const Unit*> own;
  for (const auto& u : units) {
    if (u.label == label) own.push_back(&u);
  }
  std::sort(own.begin(), own.end(), [](const Unit* a, const Unit* b) { return a->start < b->start; });
  std::vector<Segment> segs;
  std::size_t pos = 0;
  for (const Unit* u : own) {
    if (u->start > pos) segs.push_back({double(pos), double(u->start - pos), false});
    segs.push_back({double(u->start), double(u->end - u->start), true});
    pos = u->end;
  }
  if (pos < length) segs.push_back({double(pos), double(length - pos), false});
  return segs;
}

double pair_delta(const Segment& g, const Segment& h) {
  const double d = g.begin - h.begin;
  if (g.is_unit && h.is_unit) {
    if (-g.length < d && d < h.length) {
      const double e = g.begin + g.length - h.begin - h.length;
      return d * d + e * e;
    }
    return 0.0;
  }
  if (g.is_unit && !h.is_unit) {
    return (h.length - g.length >= d && d >= 0) ? g.length * g.length : 0.0;
  }
  if (!g.is_unit && h.is_unit) {
    return (g.length - h.length >= -d && -d >= 0) ? h.length * h.length : 0.0;
  }
  return 0.0;
}

// Sum of delta^2 over segment pairs of two annotators. Only overlapping
// segments can disagree, so a merge-style sweep visits each such pair once.
double observed_pair_sum(const std::vector<Segment>& a, const std::vector<Segment>& b) {
  double total = 0.0;
  std::size_t i = 0;
  std::size_t j = 0;
  while (i < a.size() && j < b.size()) {
    total += pair_delta(a[i], b[j]);
    const double end_a = a[i].begin + a[i].length;
    const double end_b = b[j].begin + b[j].length;
    if (end_a < end_b) {
      ++i;
    } else if (end_b < end_a) {
      ++j;
    } else {
      ++i;
      ++j;
    }
  }
  return total;
}

struct CategoryDisagreement {
  double observed = 0.0;
  double expected = 0.0;
};

CategoryDisagreement category_disagreement(const Continuum& c, const std::string& label) {
  const std::size_t m = c.annotators.size();
  const double L = static_cast<double>(c.length);
  std::vector<std::vector<Segment>> segs(m);
  for (std::size_t i = 0; i < m; ++i) segs[i] = segments_for(c.units[i], label, c.length);

  CategoryDisagreement out;
  double observed = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      if (i != j) observed += observed_pair_sum(segs[i], segs[j]);
    }
  }
  out.observed = observed / (double(m) * double(m - 1) * L * L);

  // Expected disagreement over all placements of the pooled units.
  std::vector<double> gap_lengths;
  std::vector<double> unit_lengths;
  for (const auto& s : segs) {
    for (const auto& seg : s) (seg.is_unit ? unit_lengths : gap_lengths).push_back(seg.length);
  }
  std::sort(gap_lengths.begin(), gap_lengths.end());
  std::vector<double> suffix(gap_lengths.size() + 1, 0.0);
  for (std::size_t k = gap_lengths.size(); k-- > 0;) suffix[k] = suffix[k + 1] + gap_lengths[k];

  const double n_units = static_cast<double>(unit_lengths.size());
  double numerator = 0.0;
  double self_pairs = 0.0;
  for (double l : unit_lengths) {
    const auto first = std::lower_bound(gap_lengths.begin(), gap_lengths.end(), l);
    const auto idx = static_cast<std::size_t>(first - gap_lengths.begin());
    const double count = static_cast<double>(gap_lengths.size() - idx);
    const double fitting = suffix[idx] - count * (l - 1.0);  // sum of (gap - l + 1)
    numerator += (n_units - 1.0) / 3.0 * (2.0 * l * l * l - 3.0 * l * l + l) + l * l * fitting;
    self_pairs += l * (l - 1.0);
  }
  const double mL = double(m) * L;
  const double denominator = mL * (mL - 1.0) - self_pairs;
  out.expected = denominator > 0.0 ? (2.0 / L) * numerator / denominator : 0.0;
  return out;
}

double ratio_alpha(double observed, double expected) {
  if (observed == 0.0) return 1.0;
  return 1.0 - observed / expected;
}

void check_continuum(const Continuum& c) {
  if (c.annotators.size() < 2) {
    throw Error(ErrorKind::kTooFewAnnotators,
                "alpha_u needs at least two annotators, got " + std::to_string(c.annotators.size()));
  }
  if (c.units.size() != c.annotators.size()) {
    throw Error(ErrorKind::kInvalidArgument, "continuum units do not match annotators");
  }
  if (c.length == 0) throw Error(ErrorKind::kEmptyContinuum, "continuum has length 0");
  for (std::size_t i = 0; i < c.units.size(); ++i) {
    std::vector<const Unit*> sorted;
    for (const auto& u : c.units[i]) {
      if (u.start >= u.end || u.end > c.length) {
        throw Error(ErrorKind::kSpanOutOfBounds,
                    "unit [" + std::to_string(u.start) + "," + std::to_string(u.end) +
                        ") of annotator " + c.annotators[i] + " outside continuum");
      }
      sorted.push_back(&u);
    }
    std::sort(sorted.begin(), sorted.end(),
              [](const Unit* a, const Unit* b) { return a->start < b->start; });
    for (std::size_t k = 1; k < sorted.size(); ++k) {
      if (sorted[k]->start < sorted[k - 1]->end) {
        throw Error(ErrorKind::kOverlappingSpans,
                    "annotator " + c.annotators[i] + " has overlapping units");
      }
    }
  }
}

}  // namespace

AgreementScore unitized_alpha(const Continuum& c) {
  check_continuum(c);
  std::set<std::string> labels;
  for (const auto& units : c.units) {
    for (const auto& u : units) labels.insert(u.label);
  }
  AgreementScore score;
  for (const auto& label : labels) {
    const auto d = category_disagreement(c, label);
    score.observed_disagreement += d.observed;
    score.expected_disagreement += d.expected;
    score.per_label_alpha[label] = ratio_alpha(d.observed, d.expected);
  }
  score.alpha_u = ratio_alpha(score.observed_disagreement, score.expected_disagreement);
  return score;
}

Continuum build_continuum(const AnnotatedCase& c, Dimension dimension) {
  const bool any_law = std::any_of(c.paragraphs.begin(), c.paragraphs.end(),
                                   [](const Paragraph& p) { return p.in_law_section; });
  std::unordered_map<std::string, std::size_t> offset;
  std::unordered_map<std::string, std::size_t> size;
  Continuum out;
  for (const auto& p : c.paragraphs) {
    if (any_law && !p.in_law_section) continue;
    offset[p.id] = out.length;
    size[p.id] = p.tokens.size();
    out.length += p.tokens.size();
  }
  for (const auto& [annotator, spans] : c.raw_annotator_layers) {
    out.annotators.push_back(annotator);
    auto& units = out.units.emplace_back();
    for (const auto& s : spans) {
      auto it = offset.find(s.paragraph_id);
      if (it == offset.end()) continue;  // outside the measured region
      if (s.tok_end > size[s.paragraph_id]) {
        throw Error(ErrorKind::kSpanOutOfBounds,
                    c.case_id + ": annotator span exceeds paragraph '" + s.paragraph_id + "'");
      }
      units.push_back({it->second + s.tok_start, it->second + s.tok_end, s.label(dimension)});
    }
  }
  return out;
}

AgreementScore unitized_alpha(const AnnotatedCase& c, Dimension dimension) {
  return unitized_alpha(build_continuum(c, dimension));
}

std::vector<PairScore> pairwise_alpha(const Continuum& c) {
  check_continuum(c);
  std::vector<PairScore> out;
  for (std::size_t i = 0; i < c.annotators.size(); ++i) {
    for (std::size_t j = i + 1; j < c.annotators.size(); ++j) {
      Continuum pair{c.length, {c.annotators[i], c.annotators[j]}, {c.units[i], c.units[j]}};
      out.push_back({c.annotators[i], c.annotators[j], unitized_alpha(pair)});
    }
  }
  return out;
}

std::vector<BatchRow> batch_report(const Corpus& corpus,
                                   const std::map<std::string, std::vector<std::string>>& batches) {
  std::unordered_map<std::string, const AnnotatedCase*> index;
  for (const auto& c : corpus) index.emplace(c.case_id, &c);

  std::vector<BatchRow> rows;
  for (const auto& [name, ids] : batches) {
    BatchRow row;
    row.batch = name;
    if (ids.empty()) row.notes.push_back("empty batch");
    double sum_type = 0.0;
    double sum_actor = 0.0;
    for (const auto& id : ids) {
      auto it = index.find(id);
      if (it == index.end()) {
        row.notes.push_back(id + ": not in corpus");
        continue;
      }
      try {
        const double t = unitized_alpha(*it->second, Dimension::ArgType).alpha_u;
        const double a = unitized_alpha(*it->second, Dimension::Actor).alpha_u;
        sum_type += t;
        sum_actor += a;
        ++row.cases;
      } catch (const Error& e) {
        row.notes.push_back(id + ": " + error_kind_name(e.kind()));
      }
    }
    if (row.cases > 0) {
      row.alpha_arg_type = sum_type / double(row.cases);
      row.alpha_actor = sum_actor / double(row.cases);
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace argmine
