#pragma once
// Prediction heads: action classifier, candidate ranker, NIL gate, and the
// summed multi-task loss.

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "jnel/autodiff.hpp"
#include "jnel/stack_lstm.hpp"
#include "jnel/transition.hpp"

namespace jnel {

// Dropout applied to a head's input features.
struct HeadDropout {
  double ratio = 0.0;
  bool training = false;
  Rng* rng = nullptr;

  ad::Var apply(ad::Graph& g, ad::Var x) const {
    return training && ratio > 0.0 ? ad::dropout(g, x, ratio, training, *rng) : x;
  }
};

// ---- NER ------------------------------------------------------------------

struct NerHead {
  ad::Parameter* w = nullptr;  // |A| x |d|
  ad::Parameter* b = nullptr;

  static NerHead create(ad::ParameterSet& params, const std::string& prefix, std::size_t input_dim,
                        std::size_t num_actions, std::uint64_t seed);
};

struct ActionScores {
  ad::Var logits;
  ad::Var probs;  // softmax over the full alphabet
  Action chosen;  // best legal action
};

// d = [b; s; a; o; v?]
ad::Var action_features(ad::Graph& g, const StepContext& ctx, std::optional<ad::Var> v);

// Throws std::invalid_argument if `legal` is empty.
ActionScores score_actions(ad::Graph& g, const StepContext& ctx, std::optional<ad::Var> v, const NerHead& head,
                           std::span<const Action> legal, const ActionAlphabet& alphabet,
                           const HeadDropout& dropout = {});

// Highest-scoring legal action; ties go to the lowest alphabet index.
Action best_legal(std::span<const double> logits, std::span<const Action> legal, const ActionAlphabet& alphabet);

// ---- EL -------------------------------------------------------------------

struct Candidate {
  std::string entity_id;
  std::vector<double> embedding;
  double prior = 0.0;
};

// Scores one candidate from [entity embedding; prior; m?; v?; a] through
// affine -> tanh -> affine. The first two blocks differ per candidate; the
// rest is shared across a mention's candidates.
struct ElHead {
  ad::Parameter* w1 = nullptr;  // hidden x feature_dim
  ad::Parameter* b1 = nullptr;
  ad::Parameter* w2 = nullptr;  // 1 x hidden
  ad::Parameter* b2 = nullptr;
  std::size_t entity_dim = 0;
  std::size_t mention_dim = 0;   // 0 when the mention representation is off
  std::size_t sentence_dim = 0;  // 0 when the sentence representation is off
  std::size_t action_dim = 0;

  static ElHead create(ad::ParameterSet& params, const std::string& prefix, std::size_t entity_dim,
                       std::size_t mention_dim, std::size_t sentence_dim, std::size_t action_dim,
                       std::size_t hidden, std::uint64_t seed);
  std::size_t feature_dim() const { return entity_dim + 1 + mention_dim + sentence_dim + action_dim; }
};

struct CandidateScores {
  ad::Var logits;
  ad::Var probs;
  std::size_t chosen = 0;  // index into the candidate list
};

// std::nullopt when `cands` is empty (no candidates: the mention stays unlinked).
std::optional<CandidateScores> score_candidates(ad::Graph& g, std::span<const Candidate> cands,
                                                std::optional<ad::Var> m, std::optional<ad::Var> v, ad::Var a,
                                                const ElHead& head, const HeadDropout& dropout = {});

// ---- NIL ------------------------------------------------------------------

struct NilHead {
  ad::Parameter* w1 = nullptr;  // hidden x |s|
  ad::Parameter* b1 = nullptr;
  ad::Parameter* w2 = nullptr;  // 1 x hidden
  ad::Parameter* b2 = nullptr;
  double threshold = 0.5;

  static NilHead create(ad::ParameterSet& params, const std::string& prefix, std::size_t input_dim,
                        std::size_t hidden, double threshold, std::uint64_t seed);
};

struct NilDecision {
  ad::Var prob;  // probability that the mention has a knowledge-base entry
  double value = 0.0;
  bool linkable = false;  // value >= threshold
};

NilDecision nil_gate(ad::Graph& g, ad::Var s, const NilHead& head, const HeadDropout& dropout = {});

// ---- loss -----------------------------------------------------------------

struct LossBreakdown {
  ad::Var total;
  double ner = 0.0;
  double el = 0.0;
  double nil = 0.0;
  double value = 0.0;
};

// total = sum(ner) + sum(el) + sum(nil); empty groups contribute nothing.
LossBreakdown joint_loss(ad::Graph& g, std::span<const ad::Var> ner, std::span<const ad::Var> el,
                         std::span<const ad::Var> nil);

}  // namespace jnel
