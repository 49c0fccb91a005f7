#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "argmine/corpus.hpp"

namespace argmine {

/// A labeled interval [start, end) on the continuum.
struct Unit {
  std::size_t start = 0;
  std::size_t end = 0;
  std::string label;
};

/// Token positions of a case's law section, and each annotator's units on them.
struct Continuum {
  std::size_t length = 0;
  std::vector<std::string> annotators;
  std::vector<std::vector<Unit>> units;  // parallel to `annotators`
};

struct AgreementScore {
  double alpha_u = 1.0;
  double observed_disagreement = 0.0;
  double expected_disagreement = 0.0;
  std::map<std::string, double> per_label_alpha;
};

/// Name recorded in outputs for the coefficient computed here: Krippendorff's
/// alpha_u, disagreements summed over categories before taking the ratio.
inline constexpr const char* kAlphaVariant = "alpha_u/category-summed";

/// Joint (multi-observer) alpha_u over all annotators of the continuum.
AgreementScore unitized_alpha(const Continuum& c);

/// Continuum of a case's raw annotator layers for one dimension. Positions
/// run over the law-section paragraphs in order (all paragraphs when none is
/// flagged).
Continuum build_continuum(const AnnotatedCase& c, Dimension dimension);

AgreementScore unitized_alpha(const AnnotatedCase& c, Dimension dimension);

struct PairScore {
  std::string annotator_a;
  std::string annotator_b;
  AgreementScore score;
};

std::vector<PairScore> pairwise_alpha(const Continuum& c);

struct BatchRow {
  std::string batch;
  std::size_t cases = 0;  // cases that produced a score
  std::optional<double> alpha_arg_type;
  std::optional<double> alpha_actor;
  std::vector<std::string> notes;  // per-case errors
};

/// Mean per-case alpha_u for each batch; batches maps name -> case ids.
std::vector<BatchRow> batch_report(const Corpus& corpus,
                                   const std::map<std::string, std::vector<std::string>>& batches);

}  // namespace argmine
