#pragma once
// Mention-level NER F1 and strong-matching entity-linking F1.

#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "jnel/data.hpp"

namespace jnel {

struct PRF {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;

  static PRF from_counts(std::size_t tp, std::size_t fp, std::size_t fn);
};

using DocAnnotations = std::vector<std::vector<Annotation>>;

// True positive iff (sentence, start, end, type) match a gold mention.
PRF ner_f1(const DocAnnotations& pred, const DocAnnotations& gold);

struct ElScores {
  PRF micro;
  // Counts are corpus totals; ratios are per-document averages.
  PRF macro;
};

// True positive iff (sentence, start, end, entity) match; types are ignored.
// NIL gold mentions and unlinked predictions are dropped before matching.
// A document with no gold links scores 1 if nothing is predicted in it,
// else 0.
ElScores el_strong_f1(const DocAnnotations& pred, const DocAnnotations& gold);

struct EvalReport {
  std::map<std::string, std::string> header;  // configuration echoed verbatim
  PRF ner;
  ElScores el;
  std::size_t linkable_mentions = 0;
  std::size_t gold_in_candidates = 0;
  double candidate_recall() const;
};

// Plain-text table followed by key=value lines.
std::string format_report(const EvalReport& report);

}  // namespace jnel
