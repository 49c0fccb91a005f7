#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "argmine/corpus.hpp"

namespace argmine {

enum class DocumentFormat { Html, Text };

struct RawDocument {
  std::string source_id;
  std::string content;
  DocumentFormat format = DocumentFormat::Text;
};

enum class SectionKind { Procedure, Facts, Law, Operative };

std::string_view to_string(SectionKind k) noexcept;

struct SectionMarker {
  SectionKind kind;
  std::size_t paragraph_index;
};

struct ExtractedCase {
  AnnotatedCase case_data;  // gold spans empty
  std::vector<SectionMarker> sections;  // document order, one per kind at most
};

/// Rule-based segmentation: split on whitespace, then peel punctuation off
/// both ends of each chunk as single-character tokens. Punctuation inside a
/// chunk ("10730/84", "32-1") stays put.
std::vector<Token> tokenize(std::string_view text);

std::optional<SectionKind> classify_heading(std::string_view paragraph_text);

ExtractedCase extract_case(const RawDocument& doc);

/// Keeps paragraphs from the law heading onwards, all flagged in_law_section.
AnnotatedCase trim_to_law(const AnnotatedCase& c);

/// Plain text of an HTML document, one block-level element per line.
std::string html_to_text(std::string_view html);

bool is_valid_utf8(std::string_view s) noexcept;

}  // namespace argmine
