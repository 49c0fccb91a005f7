#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "argmine/corpus.hpp"

namespace argmine {

/// Cases with fewer gold spans than this are dropped at load time.
inline constexpr std::size_t kMinGoldSpans = 5;

std::string case_to_json(const AnnotatedCase& c, int indent = -1);
AnnotatedCase case_from_json(const std::string& text);

struct LoadOptions {
  std::size_t min_gold_spans = kMinGoldSpans;
};

struct LoadResult {
  Corpus cases;
  std::vector<std::string> warnings;
};

// `path` may be a directory of per-case `.json` files (names starting with
// '_' are skipped), a single case document, or a JSON array of cases.
LoadResult load_corpus(const std::filesystem::path& path, const LoadOptions& options = {});

void save_case(const AnnotatedCase& c, const std::filesystem::path& dir);

std::string split_to_json(const CorpusSplit& split, const std::string& meta_json = "");
CorpusSplit split_from_json(const std::string& text);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, const std::string& content);

}  // namespace argmine
