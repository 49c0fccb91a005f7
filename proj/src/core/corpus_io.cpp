#include "argmine/corpus_io.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "argmine/error.hpp"
#include "json.hpp"

namespace argmine {

using nlohmann::json;

namespace {

json span_to_json(const ArgumentSpan& s) {
  json j = {{"paragraph_id", s.paragraph_id},
            {"tok_start", s.tok_start},
            {"tok_end", s.tok_end},
            {"arg_type", std::string(to_string(s.arg_type))},
            {"actor", std::string(to_string(s.actor))}};
  if (s.annotator_id) j["annotator_id"] = *s.annotator_id;
  return j;
}

ArgumentSpan span_from_json(const json& j) {
  ArgumentSpan s;
  s.paragraph_id = j.at("paragraph_id").get<std::string>();
  s.tok_start = j.at("tok_start").get<std::size_t>();
  s.tok_end = j.at("tok_end").get<std::size_t>();
  const auto type_name = j.at("arg_type").get<std::string>();
  const auto actor_name = j.at("actor").get<std::string>();
  auto t = parse_arg_type(type_name);
  auto a = parse_actor(actor_name);
  if (!t) throw Error(ErrorKind::kParse, "unknown arg_type '" + type_name + "'");
  if (!a) throw Error(ErrorKind::kParse, "unknown actor '" + actor_name + "'");
  s.arg_type = *t;
  s.actor = *a;
  if (auto it = j.find("annotator_id"); it != j.end() && !it->is_null()) {
    s.annotator_id = it->get<std::string>();
  }
  return s;
}

json case_to_json_value(const AnnotatedCase& c) {
  json paragraphs = json::array();
  for (const auto& p : c.paragraphs) {
    json tokens = json::array();
    for (const auto& t : p.tokens) tokens.push_back({{"start", t.char_start}, {"end", t.char_end}});
    paragraphs.push_back(
        {{"id", p.id}, {"text", p.text}, {"tokens", tokens}, {"in_law_section", p.in_law_section}});
  }
  json gold = json::array();
  for (const auto& s : c.gold_spans) gold.push_back(span_to_json(s));
  json layers = json::array();
  for (const auto& [annotator, spans] : c.raw_annotator_layers) {
    for (auto s : spans) {
      s.annotator_id = annotator;
      layers.push_back(span_to_json(s));
    }
  }
  json j;
  j["case_id"] = c.case_id;
  j["article"] = c.article ? json(*c.article) : json(nullptr);
  j["importance"] = c.importance ? json(c.importance->value()) : json(nullptr);
  j["paragraphs"] = std::move(paragraphs);
  j["gold_spans"] = std::move(gold);
  j["annotator_layers"] = std::move(layers);
  return j;
}

AnnotatedCase case_from_json_value(const json& j) {
  AnnotatedCase c;
  c.case_id = j.at("case_id").get<std::string>();
  if (auto it = j.find("article"); it != j.end() && !it->is_null()) c.article = it->get<int>();
  if (auto it = j.find("importance"); it != j.end() && !it->is_null()) {
    c.importance = ImportanceLevel(it->get<int>());
  }
  for (const auto& jp : j.at("paragraphs")) {
    Paragraph p;
    p.id = jp.at("id").is_string() ? jp.at("id").get<std::string>() : jp.at("id").dump();
    p.text = jp.at("text").get<std::string>();
    for (const auto& jt : jp.at("tokens")) {
      p.tokens.push_back({jt.at("start").get<std::size_t>(), jt.at("end").get<std::size_t>()});
    }
    p.in_law_section = jp.value("in_law_section", false);
    c.paragraphs.push_back(std::move(p));
  }
  if (auto it = j.find("gold_spans"); it != j.end()) {
    for (const auto& js : *it) c.gold_spans.push_back(span_from_json(js));
  }
  if (auto it = j.find("annotator_layers"); it != j.end() && !it->is_null()) {
    for (const auto& js : *it) {
      ArgumentSpan s = span_from_json(js);
      if (!s.annotator_id) {
        throw Error(ErrorKind::kParse, "annotator layer span without annotator_id in case '" +
                                           c.case_id + "'");
      }
      c.raw_annotator_layers[*s.annotator_id].push_back(std::move(s));
    }
  }
  return c;
}

json parse_json(const std::string& text, const std::string& where) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::kParse, where + ": " + e.what());
  }
}

template <typename F>
auto wrap_json(const std::string& where, F&& f) {
  try {
    return f();
  } catch (const json::exception& e) {
    throw Error(ErrorKind::kParse, where + ": " + e.what());
  }
}

}  // namespace

std::string case_to_json(const AnnotatedCase& c, int indent) {
  return case_to_json_value(c).dump(indent);
}

AnnotatedCase case_from_json(const std::string& text) {
  const json j = parse_json(text, "case document");
  return wrap_json("case document", [&] { return case_from_json_value(j); });
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kIo, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::kIo, "cannot write " + path.string());
  out << content;
  if (!out) throw Error(ErrorKind::kIo, "write failed for " + path.string());
}

LoadResult load_corpus(const std::filesystem::path& path, const LoadOptions& options) {
  namespace fs = std::filesystem;
  LoadResult result;
  Corpus raw;

  if (fs::is_directory(path)) {
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(path)) {
      const auto name = entry.path().filename().string();
      if (entry.is_regular_file() && entry.path().extension() == ".json" && !name.starts_with("_")) {
        files.push_back(entry.path());
      }
    }
    std::sort(files.begin(), files.end());
    for (const auto& f : files) {
      const json j = parse_json(read_file(f), f.string());
      raw.push_back(wrap_json(f.string(), [&] { return case_from_json_value(j); }));
    }
  } else if (fs::is_regular_file(path)) {
    const json j = parse_json(read_file(path), path.string());
    wrap_json(path.string(), [&] {
      if (j.is_array()) {
        for (const auto& jc : j) raw.push_back(case_from_json_value(jc));
      } else {
        raw.push_back(case_from_json_value(j));
      }
      return 0;
    });
  } else {
    throw Error(ErrorKind::kIo, "corpus path does not exist: " + path.string());
  }

  for (auto& c : raw) {
    if (c.gold_spans.size() < options.min_gold_spans) {
      result.warnings.push_back("case '" + c.case_id + "' rejected: " +
                                std::to_string(c.gold_spans.size()) + " gold span(s), fewer than " +
                                std::to_string(options.min_gold_spans));
      continue;
    }
    result.cases.push_back(std::move(c));
  }
  return result;
}

void save_case(const AnnotatedCase& c, const std::filesystem::path& dir) {
  std::string name = c.case_id;
  for (char& ch : name) {
    if (ch == '/' || ch == '\\' || ch == ':' || ch == ' ') ch = '_';
  }
  write_file(dir / (name + ".json"), case_to_json(c, 1) + "\n");
}

std::string split_to_json(const CorpusSplit& split, const std::string& meta_json) {
  json j = {{"train", split.train}, {"dev", split.dev}, {"test", split.test}};
  if (!meta_json.empty()) j["meta"] = parse_json(meta_json, "split metadata");
  return j.dump(1) + "\n";
}

CorpusSplit split_from_json(const std::string& text) {
  const json j = parse_json(text, "split document");
  return wrap_json("split document", [&] {
    CorpusSplit s;
    s.train = j.at("train").get<std::vector<std::string>>();
    s.dev = j.at("dev").get<std::vector<std::string>>();
    s.test = j.at("test").get<std::vector<std::string>>();
    return s;
  });
}

}  // namespace argmine
