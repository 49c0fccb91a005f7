#include "argmine/ingest.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <unordered_set>

#include "argmine/error.hpp"

namespace argmine {

std::string_view to_string(SectionKind k) noexcept {
  switch (k) {
    case SectionKind::Procedure: return "procedure";
    case SectionKind::Facts: return "facts";
    case SectionKind::Law: return "law";
    case SectionKind::Operative: return "operative";
  }
  return "unknown";
}

namespace {

struct CodePoint {
  char32_t value;
  std::size_t start;
  std::size_t end;
};

// Decodes one code point at `pos`; malformed bytes come back as themselves
// with length 1 and `ok` cleared.
char32_t decode_at(std::string_view s, std::size_t pos, std::size_t& len, bool& ok) {
  const auto b0 = static_cast<unsigned char>(s[pos]);
  ok = true;
  len = 1;
  if (b0 < 0x80) return b0;
  std::size_t need = 0;
  char32_t cp = 0;
  if ((b0 & 0xE0) == 0xC0) {
    need = 1;
    cp = b0 & 0x1F;
  } else if ((b0 & 0xF0) == 0xE0) {
    need = 2;
    cp = b0 & 0x0F;
  } else if ((b0 & 0xF8) == 0xF0) {
    need = 3;
    cp = b0 & 0x07;
  } else {
    ok = false;
    return b0;
  }
  if (pos + need >= s.size()) {
    ok = false;
    return b0;
  }
  for (std::size_t k = 1; k <= need; ++k) {
    const auto b = static_cast<unsigned char>(s[pos + k]);
    if ((b & 0xC0) != 0x80) {
      ok = false;
      return b0;
    }
    cp = (cp << 6) | (b & 0x3F);
  }
  static constexpr std::array<char32_t, 4> kMin = {0, 0x80, 0x800, 0x10000};
  if (cp < kMin[need] || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) {
    ok = false;
    return b0;
  }
  len = need + 1;
  return cp;
}

bool is_space(char32_t c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v' ||
         c == 0x00A0 || c == 0x2009 || c == 0x202F || c == 0x200B;
}

bool is_punct(char32_t c) {
  if (c < 0x80) return std::ispunct(static_cast<int>(c)) != 0;
  switch (c) {
    case 0x2018: case 0x2019: case 0x201A: case 0x201B:
    case 0x201C: case 0x201D: case 0x201E: case 0x201F:
    case 0x00AB: case 0x00BB: case 0x2039: case 0x203A:
    case 0x2010: case 0x2011: case 0x2012: case 0x2013: case 0x2014: case 0x2015:
    case 0x2026: case 0x2022: case 0x00B7: case 0x2032: case 0x2033:
    case 0x00A1: case 0x00BF:
      return true;
    default:
      return false;
  }
}

std::string collapse_spaces(std::string_view s) {
  std::string out;
  bool pending = false;
  for (char ch : s) {
    if (ch == ' ' || ch == '\t' || ch == '\r' || ch == '\f' || ch == '\v') {
      pending = !out.empty();
      continue;
    }
    if (pending) out.push_back(' ');
    pending = false;
    out.push_back(ch);
  }
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

void append_utf8(std::string& out, char32_t cp) {
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

std::string lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

bool decode_entity(std::string_view name, std::string& out) {
  static const std::array<std::pair<std::string_view, char32_t>, 16> kNamed = {{
      {"amp", '&'},      {"lt", '<'},       {"gt", '>'},       {"quot", '"'},
      {"apos", '\''},    {"nbsp", ' '},     {"sect", 0x00A7},  {"rsquo", 0x2019},
      {"lsquo", 0x2018}, {"rdquo", 0x201D}, {"ldquo", 0x201C}, {"ndash", 0x2013},
      {"mdash", 0x2014}, {"hellip", 0x2026}, {"eacute", 0x00E9}, {"laquo", 0x00AB},
  }};
  if (name.size() > 1 && name[0] == '#') {
    char32_t cp = 0;
    const bool hex = name[1] == 'x' || name[1] == 'X';
    const auto digits = name.substr(hex ? 2 : 1);
    if (digits.empty()) return false;
    for (char ch : digits) {
      const int base = hex ? 16 : 10;
      int v;
      if (ch >= '0' && ch <= '9') {
        v = ch - '0';
      } else if (hex && std::isxdigit(static_cast<unsigned char>(ch))) {
        v = std::tolower(static_cast<unsigned char>(ch)) - 'a' + 10;
      } else {
        return false;
      }
      cp = cp * base + v;
      if (cp > 0x10FFFF) return false;
    }
    if (cp == 0xA0) cp = ' ';
    append_utf8(out, cp);
    return true;
  }
  for (const auto& [n, cp] : kNamed) {
    if (n == name) {
      append_utf8(out, cp);
      return true;
    }
  }
  return false;
}

bool is_block_tag(std::string_view tag) {
  static const std::unordered_set<std::string_view> kBlocks = {
      "p",     "div",   "br",      "h1",     "h2",         "h3",     "h4",    "h5",
      "h6",    "li",    "tr",      "table",  "section",    "article", "header", "footer",
      "blockquote", "pre", "ul",   "ol",     "title",      "body",   "html",  "head",
      "hr",    "dd",    "dt",      "dl",     "center",     "main",   "nav",   "aside",
      "tbody", "thead", "caption", "figure", "figcaption", "address"};
  return kBlocks.contains(tag);
}

// Court paragraph number ("22" for "22. In the ..."), if the text opens with one.
std::optional<std::string> leading_number(std::string_view text) {
  std::size_t i = 0;
  while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) ++i;
  if (i == 0 || i > 6 || i >= text.size() || text[i] != '.') return std::nullopt;
  if (i + 1 < text.size() && !std::isspace(static_cast<unsigned char>(text[i + 1]))) {
    return std::nullopt;
  }
  return std::string(text.substr(0, i));
}

}  // namespace

bool is_valid_utf8(std::string_view s) noexcept {
  std::size_t pos = 0;
  while (pos < s.size()) {
    std::size_t len;
    bool ok;
    decode_at(s, pos, len, ok);
    if (!ok) return false;
    pos += len;
  }
  return true;
}

std::vector<Token> tokenize(std::string_view text) {
  std::vector<CodePoint> cps;
  for (std::size_t pos = 0; pos < text.size();) {
    std::size_t len;
    bool ok;
    const char32_t cp = decode_at(text, pos, len, ok);
    cps.push_back({cp, pos, pos + len});
    pos += len;
  }

  std::vector<Token> tokens;
  std::size_t i = 0;
  while (i < cps.size()) {
    if (is_space(cps[i].value)) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < cps.size() && !is_space(cps[j].value)) ++j;
    // Chunk [i, j): peel punctuation from both ends.
    std::size_t lo = i;
    std::size_t hi = j;
    while (lo < hi && is_punct(cps[lo].value)) {
      tokens.push_back({cps[lo].start, cps[lo].end});
      ++lo;
    }
    std::size_t tail = hi;
    while (tail > lo && is_punct(cps[tail - 1].value)) --tail;
    if (lo < tail) tokens.push_back({cps[lo].start, cps[tail - 1].end});
    for (std::size_t k = tail; k < hi; ++k) tokens.push_back({cps[k].start, cps[k].end});
    i = j;
  }
  return tokens;
}

std::optional<SectionKind> classify_heading(std::string_view paragraph_text) {
  std::string upper(trim(paragraph_text));
  for (char& c : upper) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  upper = collapse_spaces(upper);
  if (upper.starts_with("AS TO THE LAW") || upper == "THE LAW") return SectionKind::Law;
  if (upper.starts_with("AS TO THE FACTS") || upper == "THE FACTS") return SectionKind::Facts;
  if (upper == "PROCEDURE") return SectionKind::Procedure;
  if (upper.starts_with("FOR THESE REASONS")) return SectionKind::Operative;
  return std::nullopt;
}

std::string html_to_text(std::string_view html) {
  std::string out;
  std::size_t i = 0;
  auto newline = [&] {
    if (!out.empty() && out.back() != '\n') out.push_back('\n');
  };
  while (i < html.size()) {
    const char ch = html[i];
    if (ch == '<') {
      if (html.substr(i, 4) == "<!--") {
        const auto end = html.find("-->", i + 4);
        i = end == std::string_view::npos ? html.size() : end + 3;
        continue;
      }
      const auto close = html.find('>', i + 1);
      if (close == std::string_view::npos) {
        out.push_back(ch);
        ++i;
        continue;
      }
      std::string_view inner = html.substr(i + 1, close - i - 1);
      const bool closing = !inner.empty() && inner.front() == '/';
      if (closing) inner.remove_prefix(1);
      std::size_t n = 0;
      while (n < inner.size() && (std::isalnum(static_cast<unsigned char>(inner[n])))) ++n;
      const std::string tag = lower(inner.substr(0, n));
      i = close + 1;
      if (!closing && (tag == "script" || tag == "style")) {
        const std::string end_tag = "</" + tag;
        std::size_t search = i;
        std::size_t found = std::string_view::npos;
        while (search < html.size()) {
          const auto lt = html.find("</", search);
          if (lt == std::string_view::npos) break;
          if (lower(html.substr(lt, end_tag.size())) == end_tag) {
            found = lt;
            break;
          }
          search = lt + 2;
        }
        if (found == std::string_view::npos) {
          i = html.size();
        } else {
          const auto gt = html.find('>', found);
          i = gt == std::string_view::npos ? html.size() : gt + 1;
        }
        continue;
      }
      if (is_block_tag(tag)) {
        newline();
      } else if (tag == "td" || tag == "th") {
        out.push_back(' ');
      }
      continue;
    }
    if (ch == '&') {
      const auto semi = html.find(';', i + 1);
      if (semi != std::string_view::npos && semi - i <= 10 &&
          decode_entity(html.substr(i + 1, semi - i - 1), out)) {
        i = semi + 1;
        continue;
      }
    }
    out.push_back(ch == '\n' || ch == '\r' || ch == '\t' ? ' ' : ch);
    ++i;
  }

  std::string result;
  std::size_t pos = 0;
  while (pos < out.size()) {
    auto nl = out.find('\n', pos);
    if (nl == std::string::npos) nl = out.size();
    const std::string line = collapse_spaces(trim(std::string_view(out).substr(pos, nl - pos)));
    if (!line.empty()) {
      result += line;
      result.push_back('\n');
    }
    pos = nl + 1;
  }
  return result;
}

ExtractedCase extract_case(const RawDocument& doc) {
  if (!is_valid_utf8(doc.content)) {
    throw Error(ErrorKind::kEncodingError, doc.source_id + ": content is not valid UTF-8");
  }
  const std::string text =
      doc.format == DocumentFormat::Html ? html_to_text(doc.content) : doc.content;

  ExtractedCase out;
  AnnotatedCase& c = out.case_data;
  c.case_id = doc.source_id;

  std::unordered_set<std::string> used_ids;
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto nl = text.find('\n', pos);
    if (nl == std::string::npos) nl = text.size();
    const std::string_view line = trim(std::string_view(text).substr(pos, nl - pos));
    pos = nl + 1;
    if (line.empty()) continue;

    Paragraph p;
    p.text = std::string(line);
    const std::size_t index = c.paragraphs.size();
    auto number = leading_number(p.text);
    if (number && !used_ids.contains(*number)) {
      p.id = *number;
    } else {
      p.id = "p" + std::to_string(index + 1);
    }
    used_ids.insert(p.id);
    p.tokens = tokenize(p.text);
    c.paragraphs.push_back(std::move(p));
  }
  if (c.paragraphs.empty()) {
    throw Error(ErrorKind::kMalformedDocument, doc.source_id + ": no paragraphs found");
  }

  std::array<bool, 4> seen{};
  for (std::size_t i = 0; i < c.paragraphs.size(); ++i) {
    auto kind = classify_heading(c.paragraphs[i].text);
    if (!kind) continue;
    auto k = static_cast<std::size_t>(*kind);
    if (seen[k]) continue;
    seen[k] = true;
    out.sections.push_back({*kind, i});
  }
  for (const auto& m : out.sections) {
    if (m.kind != SectionKind::Law) continue;
    for (std::size_t i = m.paragraph_index; i < c.paragraphs.size(); ++i) {
      c.paragraphs[i].in_law_section = true;
    }
  }
  return out;
}

AnnotatedCase trim_to_law(const AnnotatedCase& c) {
  std::size_t start = c.paragraphs.size();
  for (std::size_t i = 0; i < c.paragraphs.size(); ++i) {
    if (classify_heading(c.paragraphs[i].text) == SectionKind::Law) {
      start = i;
      break;
    }
  }
  if (start == c.paragraphs.size()) {
    throw Error(ErrorKind::kLawSectionNotFound,
                c.case_id + ": no \"AS TO THE LAW\" / \"THE LAW\" heading");
  }

  AnnotatedCase out;
  out.case_id = c.case_id;
  out.article = c.article;
  out.importance = c.importance;
  std::unordered_set<std::string> kept;
  for (std::size_t i = start; i < c.paragraphs.size(); ++i) {
    Paragraph p = c.paragraphs[i];
    p.in_law_section = true;
    kept.insert(p.id);
    out.paragraphs.push_back(std::move(p));
  }
  auto keep = [&](const std::vector<ArgumentSpan>& spans) {
    std::vector<ArgumentSpan> result;
    std::copy_if(spans.begin(), spans.end(), std::back_inserter(result),
                 [&](const ArgumentSpan& s) { return kept.contains(s.paragraph_id); });
    return result;
  };
  out.gold_spans = keep(c.gold_spans);
  for (const auto& [annotator, spans] : c.raw_annotator_layers) {
    out.raw_annotator_layers[annotator] = keep(spans);
  }
  return out;
}

}  // namespace argmine
