#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace argmine {

enum class ArgType : std::uint8_t {
  NonContestation,
  TextualInterpretation,
  SystematicInterpretation,
  TeleologicalInterpretation,
  ComparativeLaw,
  LegalBasis,
  LegitimatePurpose,
  Suitability,
  NecessityProportionality,
  Overruling,
  Distinguishing,
  MarginOfAppreciation,
  PrecedentsECHR,
  DecisionECHR,
  ApplicationCase,
};

enum class Actor : std::uint8_t {
  ECHR,
  Applicant,
  State,
  ThirdParties,
  CommissionChamber,
};

inline constexpr std::size_t kNumArgTypes = 15;
inline constexpr std::size_t kNumActors = 5;

/// Which of the two orthogonal tagsets a label belongs to.
enum class Dimension : std::uint8_t { ArgType, Actor };

std::string_view to_string(ArgType t) noexcept;
std::string_view to_string(Actor a) noexcept;
std::string_view to_string(Dimension d) noexcept;

/// Short human-facing label, e.g. "Application case" or "Third parties".
std::string_view display_name(ArgType t) noexcept;
std::string_view display_name(Actor a) noexcept;

std::optional<ArgType> parse_arg_type(std::string_view name) noexcept;
std::optional<Actor> parse_actor(std::string_view name) noexcept;
std::optional<Dimension> parse_dimension(std::string_view name) noexcept;

const std::array<ArgType, kNumArgTypes>& all_arg_types() noexcept;
const std::array<Actor, kNumActors>& all_actors() noexcept;

/// Enumeration names of a dimension's labels, in declaration order.
std::vector<std::string> label_names(Dimension d);

struct Token {
  std::size_t char_start = 0;  // byte offsets into Paragraph::text
  std::size_t char_end = 0;
};

struct Paragraph {
  std::string id;
  std::string text;
  std::vector<Token> tokens;
  bool in_law_section = false;

  std::string_view token_text(std::size_t i) const {
    const Token& t = tokens.at(i);
    return std::string_view(text).substr(t.char_start, t.char_end - t.char_start);
  }
};

struct ArgumentSpan {
  std::string paragraph_id;
  std::size_t tok_start = 0;  // half-open token interval
  std::size_t tok_end = 0;
  ArgType arg_type = ArgType::ApplicationCase;
  Actor actor = Actor::ECHR;
  std::optional<std::string> annotator_id;

  std::string label(Dimension d) const {
    return std::string(d == Dimension::ArgType ? to_string(arg_type) : to_string(actor));
  }
};

/// Importance level 1 (Case Reports) .. 4 (Low Importance).
class ImportanceLevel {
 public:
  explicit ImportanceLevel(int value);
  int value() const noexcept { return value_; }
  friend bool operator==(ImportanceLevel, ImportanceLevel) = default;

 private:
  int value_;
};

struct AnnotatedCase {
  std::string case_id;
  std::optional<int> article;
  std::optional<ImportanceLevel> importance;
  std::vector<Paragraph> paragraphs;
  std::vector<ArgumentSpan> gold_spans;
  std::map<std::string, std::vector<ArgumentSpan>> raw_annotator_layers;

  const Paragraph* find_paragraph(std::string_view id) const;
  std::size_t token_count() const;
};

using Corpus = std::vector<AnnotatedCase>;

// ---------------------------------------------------------------------------
// Validation

enum class ViolationRule {
  DuplicateParagraphId,
  TokenRange,
  TokenOrder,
  UnknownParagraph,
  SpanBounds,
  SpanOverlap,
};

std::string_view to_string(ViolationRule r) noexcept;

struct Violation {
  ViolationRule rule;
  std::string layer;  // "gold", an annotator id, or "" for paragraph rules
  std::string paragraph_id;
  std::size_t index = 0;  // span index within the layer, or token index
  std::string message;
};

using ValidationReport = std::vector<Violation>;

ValidationReport validate_case(const AnnotatedCase& c);

// ---------------------------------------------------------------------------
// Statistics

struct LabelCount {
  std::string label;
  std::uint64_t count = 0;
  double percent = 0.0;
};

struct StatsTable {
  std::vector<LabelCount> arg_type_spans;
  std::vector<LabelCount> actor_spans;
  std::vector<LabelCount> arg_type_tokens;  // BIO tag level
  std::vector<LabelCount> actor_tokens;
};

StatsTable corpus_stats(const Corpus& corpus);

// ---------------------------------------------------------------------------
// Splits

struct CorpusSplit {
  std::vector<std::string> train;
  std::vector<std::string> dev;
  std::vector<std::string> test;
};

struct SplitRatios {
  double train = 0.8;
  double dev = 0.1;
  double test = 0.1;
};

struct SplitResult {
  CorpusSplit split;
  std::vector<std::string> warnings;  // InfeasibleStratification notices
};

SplitResult stratified_split(const Corpus& corpus, SplitRatios ratios, std::uint64_t seed);

/// Split sizes by largest remainder: each within 1 of ratio * n, summing to n.
std::array<std::size_t, 3> split_sizes(std::size_t n, SplitRatios ratios);

/// Cases of `corpus` whose ids are listed in `ids`, in the order of `ids`.
Corpus select_cases(const Corpus& corpus, const std::vector<std::string>& ids);

}  // namespace argmine
