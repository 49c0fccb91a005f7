#include "argmine/bio.hpp"

#include <algorithm>
#include <sstream>

#include "argmine/error.hpp"

namespace argmine {

namespace {

// Splits "B-X" / "I-X" into prefix and label; returns false for "O" and
// anything else that is not a well-formed tag.
bool split_tag(std::string_view tag, char& prefix, std::string_view& label) {
  if (tag.size() < 3 || tag[1] != '-' || (tag[0] != 'B' && tag[0] != 'I')) return false;
  prefix = tag[0];
  label = tag.substr(2);
  return true;
}

}  // namespace

std::vector<std::string> tag_vocabulary(Dimension d) {
  std::vector<std::string> out{std::string(kOutside)};
  for (const auto& l : label_names(d)) {
    out.push_back("B-" + l);
    out.push_back("I-" + l);
  }
  return out;
}

bool is_valid_bio(const std::vector<std::string>& labels) {
  std::string_view open;  // label of the run the previous tag belongs to
  for (const auto& tag : labels) {
    char prefix = 0;
    std::string_view label;
    if (!split_tag(tag, prefix, label)) {
      if (tag != kOutside) return false;
      open = {};
      continue;
    }
    if (prefix == 'I' && label != open) return false;
    open = label;
  }
  return true;
}

LabelSequence encode_bio(const Paragraph& paragraph, const std::vector<ArgumentSpan>& spans,
                         Dimension dimension) {
  const std::size_t n = paragraph.tokens.size();
  LabelSequence seq{dimension, std::vector<std::string>(n, std::string(kOutside))};
  std::vector<bool> taken(n, false);
  for (const auto& s : spans) {
    if (s.paragraph_id != paragraph.id) continue;
    if (s.tok_start >= s.tok_end || s.tok_end > n) {
      throw Error(ErrorKind::kSpanOutOfBounds,
                  "span [" + std::to_string(s.tok_start) + "," + std::to_string(s.tok_end) +
                      ") outside paragraph '" + paragraph.id + "' of " + std::to_string(n) +
                      " tokens");
    }
    const std::string label = s.label(dimension);
    for (std::size_t i = s.tok_start; i < s.tok_end; ++i) {
      if (taken[i]) {
        throw Error(ErrorKind::kOverlappingSpans,
                    "overlapping spans at token " + std::to_string(i) + " of paragraph '" +
                        paragraph.id + "'");
      }
      taken[i] = true;
      seq.labels[i] = (i == s.tok_start ? "B-" : "I-") + label;
    }
  }
  return seq;
}

std::vector<std::string> repair_bio(const std::vector<std::string>& labels) {
  std::vector<std::string> out = labels;
  std::string_view open;
  for (auto& tag : out) {
    char prefix = 0;
    std::string_view label;
    if (!split_tag(tag, prefix, label)) {
      open = {};
      continue;
    }
    if (prefix == 'I' && label != open) tag[0] = 'B';
    open = std::string_view(tag).substr(2);
  }
  return out;
}

LabelSequence repair_bio(const LabelSequence& labels) {
  return {labels.dimension, repair_bio(labels.labels)};
}

std::vector<LabeledRun> decode_runs(const std::vector<std::string>& labels, bool strict) {
  if (strict && !is_valid_bio(labels)) {
    throw Error(ErrorKind::kInvalidSequence, "label sequence is not valid BIO");
  }
  const std::vector<std::string> tags = strict ? labels : repair_bio(labels);
  std::vector<LabeledRun> runs;
  for (std::size_t i = 0; i < tags.size(); ++i) {
    char prefix = 0;
    std::string_view label;
    if (!split_tag(tags[i], prefix, label)) continue;
    if (prefix == 'B') {
      runs.push_back({i, i + 1, std::string(label)});
    } else {
      runs.back().end = i + 1;
    }
  }
  return runs;
}

std::vector<ArgumentSpan> decode_bio(const LabelSequence& labels, const std::string& paragraph_id,
                                     bool strict) {
  std::vector<ArgumentSpan> spans;
  for (const auto& run : decode_runs(labels.labels, strict)) {
    ArgumentSpan s;
    s.paragraph_id = paragraph_id;
    s.tok_start = run.start;
    s.tok_end = run.end;
    if (labels.dimension == Dimension::ArgType) {
      auto t = parse_arg_type(run.label);
      if (!t) throw Error(ErrorKind::kInvalidSequence, "unknown argument type '" + run.label + "'");
      s.arg_type = *t;
    } else {
      auto a = parse_actor(run.label);
      if (!a) throw Error(ErrorKind::kInvalidSequence, "unknown actor '" + run.label + "'");
      s.actor = *a;
    }
    spans.push_back(std::move(s));
  }
  return spans;
}

std::size_t SubwordAlignment::piece_count() const {
  std::size_t n = 0;
  for (const auto& p : pieces) n += p.size();
  return n;
}

namespace {

void check_alignment(const SubwordAlignment& alignment, std::size_t piece_total) {
  std::size_t expected = 0;
  for (std::size_t t = 0; t < alignment.pieces.size(); ++t) {
    const auto& p = alignment.pieces[t];
    if (p.empty()) {
      throw Error(ErrorKind::kAlignmentMismatch, "token " + std::to_string(t) + " has no pieces");
    }
    for (std::size_t idx : p) {
      if (idx != expected) {
        throw Error(ErrorKind::kAlignmentMismatch,
                    "pieces of token " + std::to_string(t) + " are not contiguous and in order");
      }
      ++expected;
    }
  }
  if (expected != piece_total) {
    throw Error(ErrorKind::kAlignmentMismatch,
                "alignment covers " + std::to_string(expected) + " pieces, got " +
                    std::to_string(piece_total) + " piece labels");
  }
}

}  // namespace

LabelSequence map_subword_predictions(const std::vector<std::string>& piece_labels,
                                      const SubwordAlignment& alignment, Dimension dimension) {
  check_alignment(alignment, piece_labels.size());
  LabelSequence seq{dimension, {}};
  seq.labels.reserve(alignment.pieces.size());
  for (const auto& p : alignment.pieces) seq.labels.push_back(piece_labels[p.front()]);
  return seq;
}

std::vector<std::string> spread_to_subwords(const std::vector<std::string>& token_labels,
                                            const SubwordAlignment& alignment) {
  if (token_labels.size() != alignment.pieces.size()) {
    throw Error(ErrorKind::kAlignmentMismatch, "token label count differs from alignment");
  }
  check_alignment(alignment, alignment.piece_count());
  std::vector<std::string> out;
  out.reserve(alignment.piece_count());
  for (std::size_t t = 0; t < token_labels.size(); ++t) {
    out.push_back(token_labels[t]);
    for (std::size_t k = 1; k < alignment.pieces[t].size(); ++k) out.emplace_back(kIgnoreTag);
  }
  return out;
}

std::string display_tag(std::string_view tag, Dimension d) {
  char prefix = 0;
  std::string_view label;
  if (!split_tag(tag, prefix, label)) return std::string(tag);
  std::string_view shown = label;
  if (d == Dimension::ArgType) {
    if (auto t = parse_arg_type(label)) shown = display_name(*t);
  } else if (auto a = parse_actor(label)) {
    shown = display_name(*a);
  }
  return std::string(1, prefix) + "-" + std::string(shown);
}

// ---------------------------------------------------------------------------

namespace {

constexpr std::string_view kAbsent = "-";

const std::string& cell(const std::vector<std::string>& column, std::size_t i) {
  static const std::string absent(kAbsent);
  return column.empty() ? absent : column[i];
}

void check_column(const TsvParagraph& p, const std::vector<std::string>& column, const char* name) {
  if (!column.empty() && column.size() != p.tokens.size()) {
    throw Error(ErrorKind::kLengthMismatch, std::string("column ") + name + " of paragraph " +
                                                p.case_id + "/" + p.paragraph_id +
                                                " has wrong length");
  }
}

std::vector<std::string> split_tabs(std::string_view line) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (true) {
    const auto tab = line.find('\t', pos);
    out.emplace_back(line.substr(pos, tab == std::string_view::npos ? tab : tab - pos));
    if (tab == std::string_view::npos) break;
    pos = tab + 1;
  }
  return out;
}

std::string field_after(std::string_view line, std::string_view key) {
  const auto at = line.find(key);
  if (at == std::string_view::npos) return {};
  const auto start = at + key.size();
  const auto end = line.find(' ', start);
  return std::string(line.substr(start, end == std::string_view::npos ? end : end - start));
}

}  // namespace

std::string write_tsv(const std::vector<TsvParagraph>& paragraphs, const std::string& header) {
  std::ostringstream out;
  if (!header.empty()) out << header << "\n";
  bool first = true;
  for (const auto& p : paragraphs) {
    check_column(p, p.gold_type, "gold_type");
    check_column(p, p.gold_actor, "gold_actor");
    check_column(p, p.pred_type, "pred_type");
    check_column(p, p.pred_actor, "pred_actor");
    if (!first) out << "\n";
    first = false;
    out << "# case=" << p.case_id << " par=" << p.paragraph_id << "\n";
    for (std::size_t i = 0; i < p.tokens.size(); ++i) {
      out << p.tokens[i] << '\t' << cell(p.gold_type, i) << '\t' << cell(p.gold_actor, i) << '\t'
          << cell(p.pred_type, i) << '\t' << cell(p.pred_actor, i) << "\n";
    }
  }
  return out.str();
}

std::vector<TsvParagraph> read_tsv(std::string_view text) {
  std::vector<TsvParagraph> out;
  // A column stays absent only if every row of the paragraph marks it so.
  std::array<bool, 4> present{};
  auto close = [&] {
    if (out.empty()) return;
    auto& p = out.back();
    std::array<std::vector<std::string>*, 4> cols = {&p.gold_type, &p.gold_actor, &p.pred_type,
                                                      &p.pred_actor};
    for (std::size_t k = 0; k < 4; ++k) {
      if (!present[k]) cols[k]->clear();
    }
  };

  std::size_t line_no = 0;
  std::size_t pos = 0;
  bool in_paragraph = false;
  while (pos <= text.size()) {
    auto nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    std::string_view line = text.substr(pos, nl - pos);
    pos = nl + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);

    if (line.empty()) {
      in_paragraph = false;
      if (pos > text.size()) break;
      continue;
    }
    if (line.starts_with("# ")) {
      if (line.starts_with("# case=")) {
        close();
        TsvParagraph p;
        p.case_id = field_after(line, "case=");
        p.paragraph_id = field_after(line, "par=");
        out.push_back(std::move(p));
        present = {};
        in_paragraph = true;
      }
      continue;
    }
    auto fields = split_tabs(line);
    if (fields.size() != 5) {
      throw Error(ErrorKind::kParse, "line " + std::to_string(line_no) + ": expected 5 columns, got " +
                                         std::to_string(fields.size()));
    }
    if (!in_paragraph) {
      // Rows without a preceding header start an anonymous paragraph.
      close();
      out.push_back({});
      present = {};
      in_paragraph = true;
    }
    auto& p = out.back();
    p.tokens.push_back(fields[0]);
    std::array<std::vector<std::string>*, 4> cols = {&p.gold_type, &p.gold_actor, &p.pred_type,
                                                      &p.pred_actor};
    for (std::size_t k = 0; k < 4; ++k) {
      if (fields[k + 1] != kAbsent) present[k] = true;
      cols[k]->push_back(fields[k + 1]);
    }
  }
  close();
  return out;
}

std::vector<TsvParagraph> gold_tsv_rows(const Corpus& corpus) {
  std::vector<TsvParagraph> rows;
  for (const auto& c : corpus) {
    for (const auto& p : c.paragraphs) {
      if (p.tokens.empty()) continue;
      std::vector<ArgumentSpan> own;
      for (const auto& s : c.gold_spans) {
        if (s.paragraph_id == p.id) own.push_back(s);
      }
      TsvParagraph row;
      row.case_id = c.case_id;
      row.paragraph_id = p.id;
      for (std::size_t i = 0; i < p.tokens.size(); ++i) row.tokens.emplace_back(p.token_text(i));
      row.gold_type = encode_bio(p, own, Dimension::ArgType).labels;
      row.gold_actor = encode_bio(p, own, Dimension::Actor).labels;
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

}  // namespace argmine
