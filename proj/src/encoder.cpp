#include "jnel/encoder.hpp"

namespace jnel {

TokenEmbedder::TokenEmbedder(ParameterSet& params, const std::string& prefix, std::size_t word_dim,
                             std::size_t char_emb_dim, std::size_t char_dim, std::size_t contextual_dim,
                             std::uint64_t seed)
    : word_dim_(word_dim), contextual_dim_(contextual_dim) {
  if (char_dim % 2 != 0) throw std::invalid_argument("character feature dimension must be even");
  char_table_ = &params.add_glorot(prefix + ".char_table", {256, char_emb_dim}, seed);
  char_fw_ = ad::LstmCell::create(params, prefix + ".char_fw", char_emb_dim, char_dim / 2, seed);
  char_bw_ = ad::LstmCell::create(params, prefix + ".char_bw", char_emb_dim, char_dim / 2, seed);
}

Var TokenEmbedder::char_features(Graph& g, std::string_view token) const {
  if (token.empty()) throw std::invalid_argument("char_features: empty token");
  const Var table = g.param(*char_table_);
  std::vector<Var> chars;
  chars.reserve(token.size());
  for (unsigned char c : token) chars.push_back(ad::row(g, table, c));
  const std::size_t h = char_fw_.hidden_dim;
  ad::LstmState fw{g.zeros(h), g.zeros(h)};
  for (Var x : chars) fw = ad::lstm_step(g, char_fw_, x, fw);
  ad::LstmState bw{g.zeros(h), g.zeros(h)};
  for (auto it = chars.rbegin(); it != chars.rend(); ++it) bw = ad::lstm_step(g, char_bw_, *it, bw);
  const Var both[] = {fw.h, bw.h};
  return ad::concat(g, both);
}

std::vector<TokenEmbedding> embed_tokens(Graph& g, const TokenEmbedder& embedder, std::span<const std::string> tokens,
                                         const EmbeddingTable& words,
                                         const std::vector<std::vector<double>>* contextual) {
  if (tokens.empty()) throw std::invalid_argument("embed_tokens: empty sentence");
  if (words.dim() != embedder.word_dim()) {
    throw ad::DimensionError("word table has dimension " + std::to_string(words.dim()) + ", embedder expects " +
                             std::to_string(embedder.word_dim()));
  }
  if (embedder.contextual_dim() > 0) {
    if (!contextual) throw std::invalid_argument("contextual vectors required but not provided");
    if (contextual->size() != tokens.size()) {
      throw FormatError("contextual vectors for " + std::to_string(contextual->size()) + " tokens, sentence has " +
                            std::to_string(tokens.size()), 0);
    }
  }
  std::vector<TokenEmbedding> out;
  out.reserve(tokens.size());
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    TokenEmbedding e;
    e.word = g.constant(words.lookup(tokens[i]));
    e.chars = embedder.char_features(g, tokens[i]);
    std::vector<Var> parts{e.word, e.chars};
    if (embedder.contextual_dim() > 0) {
      const auto& row = (*contextual)[i];
      if (row.size() != embedder.contextual_dim()) {
        throw ad::DimensionError("contextual vector of dimension " + std::to_string(row.size()) + ", expected " +
                                 std::to_string(embedder.contextual_dim()));
      }
      e.contextual = g.constant(row);
      parts.push_back(*e.contextual);
    }
    e.full = ad::concat(g, parts);
    out.push_back(e);
  }
  return out;
}

SentenceEncoder SentenceEncoder::create(ParameterSet& params, const std::string& prefix, std::size_t input_dim,
                                        std::size_t hidden, bool with_second_layer, std::uint64_t seed) {
  SentenceEncoder enc;
  enc.layer1_fw = ad::LstmCell::create(params, prefix + ".l1_fw", input_dim, hidden, seed);
  enc.layer1_bw = ad::LstmCell::create(params, prefix + ".l1_bw", input_dim, hidden, seed);
  if (with_second_layer) {
    enc.layer2_fw = ad::LstmCell::create(params, prefix + ".l2_fw", 2 * hidden, hidden, seed);
    enc.layer2_bw = ad::LstmCell::create(params, prefix + ".l2_bw", 2 * hidden, hidden, seed);
  }
  return enc;
}

SentenceEncoding encode_sentence(Graph& g, const SentenceEncoder& enc, std::span<const Var> inputs, double dropout,
                                 bool training, Rng* rng) {
  if (inputs.empty()) throw std::invalid_argument("encode_sentence: empty sentence");
  auto drop = [&](std::span<const Var> xs) {
    std::vector<Var> out(xs.begin(), xs.end());
    if (training && dropout > 0.0) {
      for (Var& x : out) x = ad::dropout(g, x, dropout, training, *rng);
    }
    return out;
  };
  SentenceEncoding out;
  const auto x1 = drop(inputs);
  out.h1 = ad::bilstm_run(g, enc.layer1_fw, enc.layer1_bw, x1);
  if (enc.layer2_fw) {
    const auto x2 = drop(out.h1);
    out.h2 = ad::bilstm_run(g, *enc.layer2_fw, *enc.layer2_bw, x2);
  }
  return out;
}

Var stack_summary(Graph& g, const SentenceEncoding& enc, std::span<const int> stack) {
  if (enc.h1.empty()) throw std::invalid_argument("stack_summary: empty encoding");
  if (stack.empty()) return g.zeros(g.size(enc.h1.front()));
  std::vector<Var> xs;
  xs.reserve(stack.size());
  for (int t : stack) {
    if (t < 0 || static_cast<std::size_t>(t) >= enc.h1.size()) {
      throw std::out_of_range("stack_summary: token " + std::to_string(t) + " out of range");
    }
    xs.push_back(enc.h1[static_cast<std::size_t>(t)]);
  }
  return ad::mean(g, xs);
}

AttentionParams AttentionParams::create(ParameterSet& params, const std::string& prefix, std::size_t state_dim,
                                        std::size_t attention_dim, std::uint64_t seed) {
  AttentionParams p;
  p.w1 = &params.add_glorot(prefix + ".W1", {attention_dim, state_dim}, seed);
  p.w2 = &params.add_glorot(prefix + ".W2", {attention_dim, state_dim}, seed);
  p.u = &params.add_glorot(prefix + ".u", {attention_dim}, seed);
  return p;
}

std::vector<Var> attention_keys(Graph& g, const SentenceEncoding& enc, const AttentionParams& p) {
  const Var w1 = g.param(*p.w1);
  std::vector<Var> keys;
  keys.reserve(enc.h1.size());
  for (Var h : enc.h1) keys.push_back(ad::matvec(g, w1, h));
  return keys;
}

SentenceRep sentence_rep(Graph& g, const SentenceEncoding& enc, std::span<const Var> keys, Var q,
                         const AttentionParams& p) {
  if (keys.size() != enc.h1.size()) throw ad::DimensionError("sentence_rep: keys do not match sentence length");
  const Var query = ad::matvec(g, g.param(*p.w2), q);
  const Var u = g.param(*p.u);
  std::vector<Var> scores;
  scores.reserve(keys.size());
  for (Var k : keys) scores.push_back(ad::dot(g, u, ad::add(g, k, query)));
  const Var alpha = ad::softmax(g, ad::concat(g, scores));
  return {ad::weighted_sum(g, enc.h1, alpha), alpha};
}

SentenceRep sentence_rep(Graph& g, const SentenceEncoding& enc, Var q, const AttentionParams& p) {
  const auto keys = attention_keys(g, enc, p);
  return sentence_rep(g, enc, keys, q, p);
}

Var mention_rep(Graph& g, const SentenceEncoding& enc, std::span<const int> mention) {
  if (mention.empty()) throw std::invalid_argument("mention_rep: empty mention");
  if (enc.h2.empty()) throw std::logic_error("mention_rep: encoder has no second layer");
  std::vector<Var> xs;
  xs.reserve(mention.size());
  for (int t : mention) {
    if (t < 0 || static_cast<std::size_t>(t) >= enc.h2.size()) {
      throw std::out_of_range("mention_rep: token " + std::to_string(t) + " out of range");
    }
    xs.push_back(enc.h2[static_cast<std::size_t>(t)]);
  }
  return ad::mean(g, xs);
}

}  // namespace jnel
