#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "argmine/corpus.hpp"

namespace argmine {

inline constexpr std::string_view kOutside = "O";
/// Label assigned to non-initial subword pieces during training.
inline constexpr std::string_view kIgnoreTag = "-100";

/// One BIO tag per token of a paragraph, for one dimension.
struct LabelSequence {
  Dimension dimension = Dimension::ArgType;
  std::vector<std::string> labels;
};

/// "O" followed by B-/I- tags for each label of the dimension (31 or 11 tags).
std::vector<std::string> tag_vocabulary(Dimension d);

bool is_valid_bio(const std::vector<std::string>& labels);

LabelSequence encode_bio(const Paragraph& paragraph, const std::vector<ArgumentSpan>& spans,
                         Dimension dimension);

/// Spans recovered from maximal B..I runs. Only the decoded dimension's field
/// of each span is meaningful. With `strict` off, an orphan I-X opens a span.
std::vector<ArgumentSpan> decode_bio(const LabelSequence& labels, const std::string& paragraph_id,
                                     bool strict = true);

/// Label runs as half-open token intervals, the dimension-agnostic core of
/// decode_bio.
struct LabeledRun {
  std::size_t start = 0;
  std::size_t end = 0;
  std::string label;
};
std::vector<LabeledRun> decode_runs(const std::vector<std::string>& labels, bool strict = true);

LabelSequence repair_bio(const LabelSequence& labels);
std::vector<std::string> repair_bio(const std::vector<std::string>& labels);

/// Per token, the indices of its subword pieces (contiguous, in order).
struct SubwordAlignment {
  std::vector<std::vector<std::size_t>> pieces;
  std::size_t piece_count() const;
};

LabelSequence map_subword_predictions(const std::vector<std::string>& piece_labels,
                                      const SubwordAlignment& alignment, Dimension dimension);

/// Training-side inverse: the first piece carries the token label, others
/// get kIgnoreTag.
std::vector<std::string> spread_to_subwords(const std::vector<std::string>& token_labels,
                                            const SubwordAlignment& alignment);

/// "B-ApplicationCase" -> "B-Application case"; "O" unchanged.
std::string display_tag(std::string_view tag, Dimension d);

// ---------------------------------------------------------------------------
// Columnar interchange:
//   # case=<id> par=<id>
//   token \t gold_type \t gold_actor \t pred_type \t pred_actor
// with a blank line between paragraphs. "-" marks an absent column.

struct TsvParagraph {
  std::string case_id;
  std::string paragraph_id;
  std::vector<std::string> tokens;
  std::vector<std::string> gold_type;
  std::vector<std::string> gold_actor;
  std::vector<std::string> pred_type;
  std::vector<std::string> pred_actor;
};

std::string write_tsv(const std::vector<TsvParagraph>& paragraphs, const std::string& header = "");
std::vector<TsvParagraph> read_tsv(std::string_view text);

/// Gold columns for every non-empty paragraph of the given cases; prediction columns empty.
std::vector<TsvParagraph> gold_tsv_rows(const Corpus& corpus);

}  // namespace argmine
