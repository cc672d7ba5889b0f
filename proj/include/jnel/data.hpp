#pragma once
// Corpus, candidate dictionary and embedding table ingestion.
//
// Corpus: one token per line, `token TAB bio_tag TAB entity`, blank line
// between sentences, `-DOCSTART- (id)` between documents. BIO tags carry the
// entity type (B-PER, I-PER, O). The entity column holds a knowledge-base id,
// `--NME--` for a mention without one, or `—` on non-entity tokens.
//
// Candidate dictionary: `mention TAB entity_id TAB count`.
// Embedding tables: `key v1 v2 ... vd`, space separated.

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "jnel/transition.hpp"

namespace jnel {

class FormatError : public std::runtime_error {
 public:
  FormatError(const std::string& what, std::size_t line)
      : std::runtime_error(line ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

inline constexpr std::string_view kNilEntity = "--NME--";
inline constexpr std::string_view kNoEntity = "—";

struct Annotation {
  int sentence = 0;
  Span span;
  std::optional<std::string> entity;  // nullopt: NIL mention

  bool linked() const { return entity.has_value(); }
  friend auto operator<=>(const Annotation&, const Annotation&) = default;
};

struct Document {
  std::string id;
  std::vector<std::vector<std::string>> sentences;
  std::vector<Annotation> gold;
  // Optional precomputed per-token vectors, [sentence][token][dim].
  std::vector<std::vector<std::vector<double>>> contextual;

  std::vector<Span> spans_in(int sentence) const;
  std::size_t token_count() const;
  // Annotation covering exactly this span in this sentence, if any.
  const Annotation* find(int sentence, int start, int end) const;
};

// Checks span bounds and per-sentence non-overlap; throws FormatError.
void validate_document(const Document& doc);

std::vector<Document> load_corpus(const std::string& path);
std::vector<Document> parse_corpus(std::istream& in);
void write_corpus(std::ostream& out, const std::vector<Document>& docs);

TypeInventory collect_types(const std::vector<Document>& docs);

// Tokens joined by single spaces, ASCII-casefolded.
std::string normalize_mention(std::span<const std::string> tokens);
std::string normalize_mention(std::string_view text);

struct CandidateStub {
  std::string entity_id;
  double prior = 0.0;
};

class CandidateDictionary {
 public:
  // Counts for the same (mention, entity) pair are merged.
  void add(std::string_view mention, const std::string& entity_id, double count);
  // Entries for a normalized key, ordered by entity id; nullptr if unknown.
  const std::map<std::string, double>* find(const std::string& key) const;
  std::size_t size() const { return entries_.size(); }

 private:
  std::unordered_map<std::string, std::map<std::string, double>> entries_;
};

CandidateDictionary load_candidates(const std::string& path);
CandidateDictionary parse_candidates(std::istream& in);

// prior(e|m) = count(m, e) / sum_e' count(m, e'), sorted by prior descending
// (ties by entity id), truncated to top_k. Empty for unknown mentions.
std::vector<CandidateStub> compute_priors(const CandidateDictionary& dict, std::string_view mention,
                                          std::size_t top_k = 30);

enum class Fallback { kUniform, kUnitNorm };

// Keyed float64 vectors of fixed dimension. Lookups that miss return a vector
// generated from a hash of the key, identical on every call and every run.
class EmbeddingTable {
 public:
  EmbeddingTable(std::size_t dim, Fallback fallback, std::string salt = {});

  std::size_t dim() const { return dim_; }
  std::size_t size() const { return table_.size(); }
  bool contains(std::string_view key) const;
  std::vector<double> lookup(std::string_view key) const;
  std::vector<double> fallback(std::string_view key) const;
  // Later insertions of the same key replace earlier ones (with a warning).
  void insert(const std::string& key, std::vector<double> values, std::size_t line = 0);
  const std::vector<std::string>& warnings() const { return warnings_; }

 private:
  std::size_t dim_;
  Fallback fallback_;
  std::string salt_;
  std::unordered_map<std::string, std::vector<double>> table_;
  std::vector<std::string> warnings_;
};

EmbeddingTable parse_embeddings(std::istream& in, std::size_t dim, Fallback fallback, std::string salt = {});
EmbeddingTable load_word_embeddings(const std::string& path, std::size_t dim);
EmbeddingTable load_entity_embeddings(const std::string& path, std::size_t dim);
EmbeddingTable empty_word_embeddings(std::size_t dim);
EmbeddingTable empty_entity_embeddings(std::size_t dim);

// Contextual sidecar: one line of `dim` floats per corpus token, in corpus
// order. Fills Document::contextual; token count mismatch is an error.
std::vector<std::vector<double>> load_contextual_rows(const std::string& path, std::size_t dim);
void attach_contextual(std::vector<Document>& docs, const std::vector<std::vector<double>>& rows);

}  // namespace jnel
