#pragma once
// The joint model: parameter layout plus the per-document forward pass used
// both for teacher-forced training and for greedy decoding.

#include <optional>
#include <vector>

#include "jnel/autodiff.hpp"
#include "jnel/config.hpp"
#include "jnel/data.hpp"
#include "jnel/encoder.hpp"
#include "jnel/heads.hpp"
#include "jnel/stack_lstm.hpp"
#include "jnel/transition.hpp"

namespace jnel {

class JointModel {
 public:
  // config.types must be set; it fixes the action alphabet.
  explicit JointModel(Config config);
  JointModel(const JointModel&) = delete;
  JointModel& operator=(const JointModel&) = delete;

  const Config& config() const { return config_; }
  const TypeInventory& types() const { return alphabet_.types(); }
  const ActionAlphabet& alphabet() const { return alphabet_; }
  ad::ParameterSet& params() { return params_; }
  const ad::ParameterSet& params() const { return params_; }

  std::size_t token_input_dim() const { return embedder_.output_dim(); }

  const TokenEmbedder& embedder() const { return embedder_; }
  const SentenceEncoder& sentence_encoder() const { return sentence_; }
  const std::optional<AttentionParams>& attention() const { return attention_; }
  ad::Parameter& token_proj_w() const { return *token_w_; }
  ad::Parameter& token_proj_b() const { return *token_b_; }
  const StackLstmParams& buffer_lstm() const { return buffer_; }
  const StackLstmParams& stack_lstm() const { return stack_; }
  const StackLstmParams& action_lstm() const { return action_; }
  const StackLstmParams& output_lstm() const { return output_; }
  ad::Parameter& action_embeddings() const { return *action_emb_; }
  // One row per type plus a final row for non-entity tokens.
  ad::Parameter& type_embeddings() const { return *type_emb_; }
  const NerHead& ner_head() const { return ner_; }
  const ElHead& el_head() const { return el_; }
  const std::optional<NilHead>& nil_head() const { return nil_; }

 private:
  Config config_;
  ActionAlphabet alphabet_;
  ad::ParameterSet params_;
  TokenEmbedder embedder_;
  SentenceEncoder sentence_;
  std::optional<AttentionParams> attention_;
  ad::Parameter* token_w_ = nullptr;
  ad::Parameter* token_b_ = nullptr;
  StackLstmParams buffer_, stack_, action_, output_;
  ad::Parameter* action_emb_ = nullptr;
  ad::Parameter* type_emb_ = nullptr;
  NerHead ner_;
  ElHead el_;
  std::optional<NilHead> nil_;
};

struct Resources {
  const CandidateDictionary* candidates = nullptr;
  const EmbeddingTable* words = nullptr;
  const EmbeddingTable* entities = nullptr;
};

enum class Decoding { kTeacherForced, kGreedy };

struct DocumentRun {
  std::vector<ad::Var> ner_terms;
  std::vector<ad::Var> el_terms;
  std::vector<ad::Var> nil_terms;
  std::vector<std::vector<Action>> actions;  // per sentence
  std::vector<Annotation> annotations;       // mentions built by the actions taken
  std::size_t action_steps = 0;
  std::size_t linkable_mentions = 0;  // gold mentions with an entity id (teacher forcing)
  std::size_t el_skipped = 0;         // of those, gold entity missing from the candidates
};

// Candidates for a mention string: top-k priors joined with entity vectors.
std::vector<Candidate> candidates_for(const std::string& mention, const Resources& res, std::size_t top_k);

// Teacher forcing replays the gold actions and collects loss terms according
// to config().mode; greedy decoding picks the best legal action at each step
// and links predicted mentions. `rng` is required when training with dropout.
DocumentRun run_document(ad::Graph& g, const JointModel& model, const Document& doc, const Resources& res,
                         Decoding decoding, bool training, Rng* rng);

}  // namespace jnel
