#include "argmine/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include "argmine/bio.hpp"
#include "argmine/error.hpp"
#include "argmine/rng.hpp"

namespace argmine {

namespace {

constexpr std::array<std::string_view, kNumArgTypes> kArgTypeNames = {
    "NonContestation",        "TextualInterpretation", "SystematicInterpretation",
    "TeleologicalInterpretation", "ComparativeLaw",    "LegalBasis",
    "LegitimatePurpose",      "Suitability",           "NecessityProportionality",
    "Overruling",             "Distinguishing",        "MarginOfAppreciation",
    "PrecedentsECHR",         "DecisionECHR",          "ApplicationCase",
};

constexpr std::array<std::string_view, kNumArgTypes> kArgTypeDisplay = {
    "Non contestation",          "Textual interpretation", "Systematic interpretation",
    "Teleological interpretation", "Comparative law",      "Legal basis",
    "Legitimate purpose",        "Suitability",            "Necessity/Proportionality",
    "Overruling",                "Distinguishing",         "Margin of Appreciation",
    "Precedents ECHR",           "Decision ECHR",          "Application case",
};

constexpr std::array<std::string_view, kNumActors> kActorNames = {
    "ECHR", "Applicant", "State", "ThirdParties", "CommissionChamber"};

constexpr std::array<std::string_view, kNumActors> kActorDisplay = {
    "ECHR", "Applicant", "State", "Third parties", "Commission/Chamber"};

constexpr std::array<ArgType, kNumArgTypes> kAllArgTypes = {
    ArgType::NonContestation,        ArgType::TextualInterpretation,
    ArgType::SystematicInterpretation, ArgType::TeleologicalInterpretation,
    ArgType::ComparativeLaw,         ArgType::LegalBasis,
    ArgType::LegitimatePurpose,      ArgType::Suitability,
    ArgType::NecessityProportionality, ArgType::Overruling,
    ArgType::Distinguishing,         ArgType::MarginOfAppreciation,
    ArgType::PrecedentsECHR,         ArgType::DecisionECHR,
    ArgType::ApplicationCase,
};

constexpr std::array<Actor, kNumActors> kAllActors = {
    Actor::ECHR, Actor::Applicant, Actor::State, Actor::ThirdParties, Actor::CommissionChamber};

}  // namespace

std::string_view to_string(ArgType t) noexcept { return kArgTypeNames[static_cast<std::size_t>(t)]; }
std::string_view to_string(Actor a) noexcept { return kActorNames[static_cast<std::size_t>(a)]; }
std::string_view to_string(Dimension d) noexcept {
  return d == Dimension::ArgType ? "arg_type" : "actor";
}

std::string_view display_name(ArgType t) noexcept {
  return kArgTypeDisplay[static_cast<std::size_t>(t)];
}
std::string_view display_name(Actor a) noexcept { return kActorDisplay[static_cast<std::size_t>(a)]; }

std::optional<ArgType> parse_arg_type(std::string_view name) noexcept {
  for (std::size_t i = 0; i < kArgTypeNames.size(); ++i) {
    if (kArgTypeNames[i] == name) return kAllArgTypes[i];
  }
  return std::nullopt;
}

std::optional<Actor> parse_actor(std::string_view name) noexcept {
  for (std::size_t i = 0; i < kActorNames.size(); ++i) {
    if (kActorNames[i] == name) return kAllActors[i];
  }
  return std::nullopt;
}

std::optional<Dimension> parse_dimension(std::string_view name) noexcept {
  if (name == "arg_type" || name == "arg" || name == "type") return Dimension::ArgType;
  if (name == "actor" || name == "agent") return Dimension::Actor;
  return std::nullopt;
}

const std::array<ArgType, kNumArgTypes>& all_arg_types() noexcept { return kAllArgTypes; }
const std::array<Actor, kNumActors>& all_actors() noexcept { return kAllActors; }

std::vector<std::string> label_names(Dimension d) {
  std::vector<std::string> out;
  if (d == Dimension::ArgType) {
    for (auto n : kArgTypeNames) out.emplace_back(n);
  } else {
    for (auto n : kActorNames) out.emplace_back(n);
  }
  return out;
}

ImportanceLevel::ImportanceLevel(int value) : value_(value) {
  if (value < 1 || value > 4) {
    throw Error(ErrorKind::kInvalidArgument,
                "importance level must be in 1..4, got " + std::to_string(value));
  }
}

const Paragraph* AnnotatedCase::find_paragraph(std::string_view id) const {
  for (const auto& p : paragraphs) {
    if (p.id == id) return &p;
  }
  return nullptr;
}

std::size_t AnnotatedCase::token_count() const {
  std::size_t n = 0;
  for (const auto& p : paragraphs) n += p.tokens.size();
  return n;
}

// ---------------------------------------------------------------------------

std::string_view to_string(ViolationRule r) noexcept {
  switch (r) {
    case ViolationRule::DuplicateParagraphId: return "duplicate_paragraph_id";
    case ViolationRule::TokenRange: return "token_range";
    case ViolationRule::TokenOrder: return "token_order";
    case ViolationRule::UnknownParagraph: return "unknown_paragraph";
    case ViolationRule::SpanBounds: return "span_bounds";
    case ViolationRule::SpanOverlap: return "span_overlap";
  }
  return "unknown";
}

namespace {

void check_layer(const AnnotatedCase& c, const std::string& layer,
                 const std::vector<ArgumentSpan>& spans, ValidationReport& report) {
  // Spans that passed the reference and bounds checks, grouped per paragraph.
  std::map<std::string, std::vector<std::size_t>> by_paragraph;
  for (std::size_t i = 0; i < spans.size(); ++i) {
    const ArgumentSpan& s = spans[i];
    const Paragraph* p = c.find_paragraph(s.paragraph_id);
    if (p == nullptr) {
      report.push_back({ViolationRule::UnknownParagraph, layer, s.paragraph_id, i,
                        "span references unknown paragraph '" + s.paragraph_id + "'"});
      continue;
    }
    if (s.tok_start >= s.tok_end || s.tok_end > p->tokens.size()) {
      report.push_back({ViolationRule::SpanBounds, layer, s.paragraph_id, i,
                        "span [" + std::to_string(s.tok_start) + "," + std::to_string(s.tok_end) +
                            ") outside paragraph of " + std::to_string(p->tokens.size()) +
                            " tokens"});
      continue;
    }
    by_paragraph[s.paragraph_id].push_back(i);
  }
  for (auto& [pid, idx] : by_paragraph) {
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
      return std::tie(spans[a].tok_start, spans[a].tok_end, a) <
             std::tie(spans[b].tok_start, spans[b].tok_end, b);
    });
    std::size_t reach = 0;
    bool have = false;
    for (std::size_t k : idx) {
      if (have && spans[k].tok_start < reach) {
        report.push_back({ViolationRule::SpanOverlap, layer, pid, k,
                          "span [" + std::to_string(spans[k].tok_start) + "," +
                              std::to_string(spans[k].tok_end) + ") overlaps an earlier span"});
      }
      reach = have ? std::max(reach, spans[k].tok_end) : spans[k].tok_end;
      have = true;
    }
  }
}

}  // namespace

ValidationReport validate_case(const AnnotatedCase& c) {
  ValidationReport report;
  std::unordered_set<std::string> seen;
  for (const auto& p : c.paragraphs) {
    if (!seen.insert(p.id).second) {
      report.push_back({ViolationRule::DuplicateParagraphId, "", p.id, 0,
                        "paragraph id '" + p.id + "' is not unique"});
    }
    std::size_t prev_end = 0;
    for (std::size_t i = 0; i < p.tokens.size(); ++i) {
      const Token& t = p.tokens[i];
      if (t.char_start >= t.char_end || t.char_end > p.text.size()) {
        report.push_back({ViolationRule::TokenRange, "", p.id, i,
                          "token " + std::to_string(i) + " has invalid byte range"});
        continue;
      }
      if (i > 0 && t.char_start < prev_end) {
        report.push_back({ViolationRule::TokenOrder, "", p.id, i,
                          "token " + std::to_string(i) + " overlaps or precedes its predecessor"});
      }
      prev_end = std::max(prev_end, t.char_end);
    }
  }
  check_layer(c, "gold", c.gold_spans, report);
  for (const auto& [annotator, spans] : c.raw_annotator_layers) {
    check_layer(c, annotator, spans, report);
  }
  return report;
}

// ---------------------------------------------------------------------------

namespace {

std::vector<LabelCount> finish_counts(std::vector<LabelCount> rows) {
  std::uint64_t total = 0;
  for (const auto& r : rows) total += r.count;
  for (auto& r : rows) {
    r.percent = total == 0 ? 0.0 : static_cast<double>(r.count) / static_cast<double>(total) * 100.0;
  }
  std::stable_sort(rows.begin(), rows.end(),
                   [](const LabelCount& a, const LabelCount& b) { return a.count > b.count; });
  return rows;
}

std::vector<LabelCount> zero_rows(const std::vector<std::string>& labels) {
  std::vector<LabelCount> rows;
  for (const auto& l : labels) rows.push_back({l, 0, 0.0});
  return rows;
}

}  // namespace

StatsTable corpus_stats(const Corpus& corpus) {
  if (corpus.empty()) throw Error(ErrorKind::kEmptyCorpus, "corpus_stats: empty corpus");

  StatsTable table;
  table.arg_type_spans = zero_rows(label_names(Dimension::ArgType));
  table.actor_spans = zero_rows(label_names(Dimension::Actor));
  table.arg_type_tokens = zero_rows(tag_vocabulary(Dimension::ArgType));
  table.actor_tokens = zero_rows(tag_vocabulary(Dimension::Actor));

  auto bump = [](std::vector<LabelCount>& rows, std::string_view label) {
    for (auto& r : rows) {
      if (r.label == label) {
        ++r.count;
        return;
      }
    }
  };

  for (const auto& c : corpus) {
    for (const auto& s : c.gold_spans) {
      ++table.arg_type_spans[static_cast<std::size_t>(s.arg_type)].count;
      ++table.actor_spans[static_cast<std::size_t>(s.actor)].count;
    }
    for (const auto& p : c.paragraphs) {
      std::vector<ArgumentSpan> own;
      for (const auto& s : c.gold_spans) {
        if (s.paragraph_id == p.id) own.push_back(s);
      }
      for (Dimension d : {Dimension::ArgType, Dimension::Actor}) {
        auto& rows = d == Dimension::ArgType ? table.arg_type_tokens : table.actor_tokens;
        for (const auto& tag : encode_bio(p, own, d).labels) bump(rows, tag);
      }
    }
  }

  table.arg_type_spans = finish_counts(std::move(table.arg_type_spans));
  table.actor_spans = finish_counts(std::move(table.actor_spans));
  table.arg_type_tokens = finish_counts(std::move(table.arg_type_tokens));
  table.actor_tokens = finish_counts(std::move(table.actor_tokens));
  return table;
}

// ---------------------------------------------------------------------------

std::array<std::size_t, 3> split_sizes(std::size_t n, SplitRatios ratios) {
  const std::array<double, 3> r = {ratios.train, ratios.dev, ratios.test};
  std::array<std::size_t, 3> sizes{};
  std::array<double, 3> rem{};
  std::size_t assigned = 0;
  for (std::size_t k = 0; k < 3; ++k) {
    const double exact = r[k] * static_cast<double>(n);
    sizes[k] = static_cast<std::size_t>(std::floor(exact + 1e-9));
    rem[k] = exact - static_cast<double>(sizes[k]);
    assigned += sizes[k];
  }
  while (assigned < n) {
    // Largest remainder first; earlier split wins ties.
    std::size_t best = 0;
    for (std::size_t k = 1; k < 3; ++k) {
      if (rem[k] > rem[best] + 1e-12) best = k;
    }
    ++sizes[best];
    rem[best] = -1.0;
    ++assigned;
  }
  return sizes;
}

namespace {

// Labels of both dimensions share one index space: arg types first, then actors.
constexpr std::size_t kNumStratLabels = kNumArgTypes + kNumActors;

using LabelVector = std::array<int, kNumStratLabels>;

LabelVector case_label_counts(const AnnotatedCase& c) {
  LabelVector v{};
  for (const auto& s : c.gold_spans) {
    ++v[static_cast<std::size_t>(s.arg_type)];
    ++v[kNumArgTypes + static_cast<std::size_t>(s.actor)];
  }
  return v;
}

std::string strat_label_name(std::size_t l) {
  if (l < kNumArgTypes) return std::string(to_string(all_arg_types()[l]));
  return std::string(to_string(all_actors()[l - kNumArgTypes]));
}

class SplitState {
 public:
  SplitState(const std::vector<LabelVector>& counts, const LabelVector& totals,
             std::array<double, 3> ratios, std::array<std::size_t, 3> capacity)
      : counts_(counts), totals_(totals), ratios_(ratios), capacity_(capacity),
        assignment_(counts.size(), -1) {}

  bool full(int s) const { return size_[s] >= capacity_[s]; }
  int assignment(std::size_t c) const { return assignment_[c]; }

  void assign(std::size_t c, int s) {
    assignment_[c] = s;
    ++size_[s];
    for (std::size_t l = 0; l < kNumStratLabels; ++l) have_[s][l] += counts_[c][l];
  }

  void unassign(std::size_t c) {
    const int s = assignment_[c];
    --size_[s];
    for (std::size_t l = 0; l < kNumStratLabels; ++l) have_[s][l] -= counts_[c][l];
    assignment_[c] = -1;
  }

  double need(int s, std::size_t l) const {
    return ratios_[s] * totals_[l] - static_cast<double>(have_[s][l]);
  }

  std::size_t room(int s) const { return capacity_[s] - size_[s]; }

  int have(int s, std::size_t l) const { return have_[s][l]; }

  // Squared deviation from per-split label quotas.
  double cost() const {
    double total = 0.0;
    for (int s = 0; s < 3; ++s) {
      for (std::size_t l = 0; l < kNumStratLabels; ++l) {
        const double d = need(s, l);
        total += d * d;
      }
    }
    return total;
  }

 private:
  const std::vector<LabelVector>& counts_;
  const LabelVector& totals_;
  std::array<double, 3> ratios_;
  std::array<std::size_t, 3> capacity_;
  std::vector<int> assignment_;
  std::array<std::size_t, 3> size_{};
  std::array<LabelVector, 3> have_{};
};

}  // namespace

SplitResult stratified_split(const Corpus& corpus, SplitRatios ratios, std::uint64_t seed) {
  if (corpus.empty()) throw Error(ErrorKind::kEmptyCorpus, "stratified_split: empty corpus");
  if (ratios.train < 0 || ratios.dev < 0 || ratios.test < 0 ||
      std::abs(ratios.train + ratios.dev + ratios.test - 1.0) > 1e-6) {
    throw Error(ErrorKind::kInvalidArgument, "split ratios must be non-negative and sum to 1");
  }

  const std::size_t n = corpus.size();
  const auto capacity = split_sizes(n, ratios);
  const std::array<double, 3> r = {ratios.train, ratios.dev, ratios.test};

  std::vector<LabelVector> counts(n);
  LabelVector totals{};
  LabelVector case_freq{};
  for (std::size_t c = 0; c < n; ++c) {
    counts[c] = case_label_counts(corpus[c]);
    for (std::size_t l = 0; l < kNumStratLabels; ++l) {
      totals[l] += counts[c][l];
      if (counts[c][l] > 0) ++case_freq[l];
    }
  }

  SplitResult result;
  std::vector<std::size_t> must_cover;  // labels that should reach every split
  for (std::size_t l = 0; l < kNumStratLabels; ++l) {
    if (totals[l] < 3) continue;
    const std::size_t open_splits = static_cast<std::size_t>(std::count_if(
        capacity.begin(), capacity.end(), [](std::size_t cap) { return cap > 0; }));
    if (static_cast<std::size_t>(case_freq[l]) < open_splits) {
      result.warnings.push_back("InfeasibleStratification: label " + strat_label_name(l) + " has " +
                                std::to_string(totals[l]) + " spans in only " +
                                std::to_string(case_freq[l]) + " case(s); best-effort assignment");
    } else {
      must_cover.push_back(l);
    }
  }

  // Seeded tie-break order, then rarest-label content first.
  std::vector<std::size_t> tiebreak(n);
  std::iota(tiebreak.begin(), tiebreak.end(), 0);
  Rng rng(seed);
  rng.shuffle(std::span<std::size_t>(tiebreak));
  std::vector<std::size_t> rank(n);
  for (std::size_t i = 0; i < n; ++i) rank[tiebreak[i]] = i;

  auto rarest = [&](std::size_t c) {
    int best = INT32_MAX;
    for (std::size_t l = 0; l < kNumStratLabels; ++l) {
      if (counts[c][l] > 0) best = std::min(best, totals[l]);
    }
    return best;
  };
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::vector<int> rarity(n);
  for (std::size_t c = 0; c < n; ++c) rarity[c] = rarest(c);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return std::tie(rarity[a], rank[a]) < std::tie(rarity[b], rank[b]);
  });

  SplitState state(counts, totals, r, capacity);

  // Coverage phase: each label that must reach every split gets one case per
  // split that still lacks it, rarest labels first.
  std::vector<std::size_t> cover_order = must_cover;
  std::sort(cover_order.begin(), cover_order.end(), [&](std::size_t a, std::size_t b) {
    return std::tie(case_freq[a], totals[a], a) < std::tie(case_freq[b], totals[b], b);
  });
  for (std::size_t l : cover_order) {
    for (int s = 0; s < 3; ++s) {
      if (capacity[s] == 0 || state.have(s, l) > 0) continue;
      for (std::size_t c : order) {
        if (state.assignment(c) < 0 && counts[c][l] > 0 && !state.full(s)) {
          state.assign(c, s);
          break;
        }
      }
    }
  }

  // Greedy phase: each case goes to the split that most needs its rarest label.
  for (std::size_t c : order) {
    if (state.assignment(c) >= 0) continue;
    std::size_t key = kNumStratLabels;
    for (std::size_t l = 0; l < kNumStratLabels; ++l) {
      if (counts[c][l] > 0 && (key == kNumStratLabels || totals[l] < totals[key])) key = l;
    }
    int best = -1;
    for (int s = 0; s < 3; ++s) {
      if (state.full(s)) continue;
      if (best < 0) {
        best = s;
        continue;
      }
      const double a = key < kNumStratLabels ? state.need(s, key) : 0.0;
      const double b = key < kNumStratLabels ? state.need(best, key) : 0.0;
      if (a > b + 1e-12 || (std::abs(a - b) <= 1e-12 && state.room(s) > state.room(best))) {
        best = s;
      }
    }
    state.assign(c, best);
  }

  // Refinement: pairwise swaps across splits that lower the quota deviation
  // without uncovering a must-cover label.
  auto covered = [&](int s) {
    for (std::size_t l : must_cover) {
      if (capacity[s] > 0 && state.have(s, l) == 0) return false;
    }
    return true;
  };
  double cost = state.cost();
  for (int pass = 0; pass < 20; ++pass) {
    bool improved = false;
    for (std::size_t ia = 0; ia < n; ++ia) {
      for (std::size_t ib = ia + 1; ib < n; ++ib) {
        const std::size_t a = order[ia];
        const std::size_t b = order[ib];
        const int sa = state.assignment(a);
        const int sb = state.assignment(b);
        if (sa == sb || counts[a] == counts[b]) continue;
        state.unassign(a);
        state.unassign(b);
        state.assign(a, sb);
        state.assign(b, sa);
        const double next = state.cost();
        if (next < cost - 1e-9 && covered(sa) && covered(sb)) {
          cost = next;
          improved = true;
        } else {
          state.unassign(a);
          state.unassign(b);
          state.assign(a, sa);
          state.assign(b, sb);
        }
      }
    }
    if (!improved) break;
  }

  for (std::size_t c : order) {
    const std::string& id = corpus[c].case_id;
    switch (state.assignment(c)) {
      case 0: result.split.train.push_back(id); break;
      case 1: result.split.dev.push_back(id); break;
      default: result.split.test.push_back(id); break;
    }
  }
  for (auto* part : {&result.split.train, &result.split.dev, &result.split.test}) {
    std::sort(part->begin(), part->end());
  }
  return result;
}

Corpus select_cases(const Corpus& corpus, const std::vector<std::string>& ids) {
  std::unordered_map<std::string, const AnnotatedCase*> index;
  for (const auto& c : corpus) index.emplace(c.case_id, &c);
  Corpus out;
  out.reserve(ids.size());
  for (const auto& id : ids) {
    auto it = index.find(id);
    if (it == index.end()) {
      throw Error(ErrorKind::kInvalidArgument, "case '" + id + "' is not in the corpus");
    }
    out.push_back(*it->second);
  }
  return out;
}

}  // namespace argmine
