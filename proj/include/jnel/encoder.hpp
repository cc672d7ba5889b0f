#pragma once
// Token embeddings and the two-layer sentence bi-LSTM.
//
// Layer-1 states feed the stack summary and the attention-based sentence
// representation; layer-2 states (computed from layer 1) feed the mention
// representation used for linking.

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "jnel/autodiff.hpp"
#include "jnel/data.hpp"
#include "jnel/lstm.hpp"

namespace jnel {

using ad::Graph;
using ad::Parameter;
using ad::ParameterSet;
using ad::Var;

struct TokenEmbedding {
  Var word;
  Var chars;
  std::optional<Var> contextual;
  Var full;  // [word; chars; contextual?]
};

// Word vectors come from a fixed table; character features from a trainable
// byte-level bi-LSTM over the token's characters.
class TokenEmbedder {
 public:
  TokenEmbedder() = default;
  TokenEmbedder(ParameterSet& params, const std::string& prefix, std::size_t word_dim, std::size_t char_emb_dim,
                std::size_t char_dim, std::size_t contextual_dim, std::uint64_t seed);

  std::size_t word_dim() const { return word_dim_; }
  std::size_t char_dim() const { return 2 * char_fw_.hidden_dim; }
  std::size_t contextual_dim() const { return contextual_dim_; }
  std::size_t output_dim() const { return word_dim_ + char_dim() + contextual_dim_; }

  // Final forward state and final backward state of the character bi-LSTM.
  Var char_features(Graph& g, std::string_view token) const;

 private:
  std::size_t word_dim_ = 0;
  std::size_t contextual_dim_ = 0;
  Parameter* char_table_ = nullptr;
  ad::LstmCell char_fw_;
  ad::LstmCell char_bw_;
};

// `contextual`, when given, holds one vector per token.
std::vector<TokenEmbedding> embed_tokens(Graph& g, const TokenEmbedder& embedder, std::span<const std::string> tokens,
                                         const EmbeddingTable& words,
                                         const std::vector<std::vector<double>>* contextual = nullptr);

struct SentenceEncoder {
  ad::LstmCell layer1_fw, layer1_bw;
  std::optional<ad::LstmCell> layer2_fw, layer2_bw;

  static SentenceEncoder create(ParameterSet& params, const std::string& prefix, std::size_t input_dim,
                                std::size_t hidden, bool with_second_layer, std::uint64_t seed);
  std::size_t output_dim() const { return 2 * layer1_fw.hidden_dim; }
};

struct SentenceEncoding {
  std::vector<Var> h1;
  std::vector<Var> h2;  // empty when the encoder has no second layer
  std::size_t length() const { return h1.size(); }
};

// Dropout (ratio, when training) is applied to the inputs of both layers.
SentenceEncoding encode_sentence(Graph& g, const SentenceEncoder& enc, std::span<const Var> inputs,
                                 double dropout = 0.0, bool training = false, Rng* rng = nullptr);

// Mean of layer-1 states over the stack tokens; zero vector for an empty stack.
Var stack_summary(Graph& g, const SentenceEncoding& enc, std::span<const int> stack);

struct AttentionParams {
  Parameter* w1 = nullptr;  // keys:   att x H1
  Parameter* w2 = nullptr;  // query:  att x H1
  Parameter* u = nullptr;   // att

  static AttentionParams create(ParameterSet& params, const std::string& prefix, std::size_t state_dim,
                                std::size_t attention_dim, std::uint64_t seed);
};

// W1 h1[w] for every position; independent of the action step.
std::vector<Var> attention_keys(Graph& g, const SentenceEncoding& enc, const AttentionParams& p);

struct SentenceRep {
  Var v;
  Var alpha;
};

// z[w] = u . (W1 h1[w] + W2 q), alpha = softmax(z), v = sum_w alpha[w] h1[w].
SentenceRep sentence_rep(Graph& g, const SentenceEncoding& enc, std::span<const Var> keys, Var q,
                         const AttentionParams& p);
SentenceRep sentence_rep(Graph& g, const SentenceEncoding& enc, Var q, const AttentionParams& p);

// Mean of layer-2 states over the mention tokens.
Var mention_rep(Graph& g, const SentenceEncoding& enc, std::span<const int> mention);

}  // namespace jnel
