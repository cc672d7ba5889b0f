#pragma once
// Training loop, greedy prediction and evaluation over a corpus.

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "jnel/checkpoint.hpp"
#include "jnel/config.hpp"
#include "jnel/data.hpp"
#include "jnel/eval.hpp"
#include "jnel/model.hpp"

namespace jnel {

// Owns the lookup tables a model runs against.
struct ResourceBundle {
  CandidateDictionary candidates;
  EmbeddingTable words;
  EmbeddingTable entities;

  Resources view() const { return {&candidates, &words, &entities}; }
};

struct ResourcePaths {
  std::string candidates;
  std::string word_emb;
  std::string entity_emb;
};

// Empty paths fall back to those recorded in the config, then to empty tables.
ResourceBundle load_resources(const Config& config, const ResourcePaths& overrides = {});

struct EpochMetrics {
  int epoch = 0;
  double lr = 0.0;
  double loss = 0.0;
  double ner_loss = 0.0;
  double el_loss = 0.0;
  double nil_loss = 0.0;
  std::size_t el_skipped = 0;
  std::optional<EvalReport> dev;
  double dev_score = 0.0;
};

struct TrainResult {
  Checkpoint best;  // last epoch when no dev set is given
  int best_epoch = 0;
  double best_score = 0.0;
  std::vector<EpochMetrics> history;
};

// Loss of one document under teacher forcing; accumulates parameter gradients.
// `el_skipped` receives the number of gold links whose entity was not among
// the candidates.
LossBreakdown train_document_loss(JointModel& model, const Document& doc, const Resources& res, Rng& rng,
                                  std::size_t* el_skipped = nullptr);

// One optimizer update per document, global-norm clipping, per-epoch learning
// rate decay, early stopping on the dev metric when `dev` is given.
TrainResult train(const Config& config, const std::vector<Document>& train_docs, const std::vector<Document>* dev,
                  const Resources& res, std::ostream* log = nullptr);

// Greedy decoding; one annotation list per document.
DocAnnotations predict(const JointModel& model, const std::vector<Document>& docs, const Resources& res);

DocAnnotations gold_annotations(const std::vector<Document>& docs);

EvalReport evaluate(const JointModel& model, const std::vector<Document>& docs, const Resources& res);

// Dev metric used for model selection: EL micro F1, or NER F1 in ner_only.
double selection_score(const Config& config, const EvalReport& report);

void write_predictions_tsv(std::ostream& out, const std::vector<Document>& docs, const DocAnnotations& pred);
void write_predictions_jsonl(std::ostream& out, const std::vector<Document>& docs, const DocAnnotations& pred);

}  // namespace jnel
