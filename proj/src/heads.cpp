#include "jnel/heads.hpp"

#include <stdexcept>

namespace jnel {

NerHead NerHead::create(ad::ParameterSet& params, const std::string& prefix, std::size_t input_dim,
                        std::size_t num_actions, std::uint64_t seed) {
  return {&params.add_glorot(prefix + ".W", {num_actions, input_dim}, seed), &params.add(prefix + ".b", {num_actions})};
}

ad::Var action_features(ad::Graph& g, const StepContext& ctx, std::optional<ad::Var> v) {
  std::vector<ad::Var> parts{ctx.b, ctx.s, ctx.a, ctx.o};
  if (v) parts.push_back(*v);
  return ad::concat(g, parts);
}

Action best_legal(std::span<const double> logits, std::span<const Action> legal, const ActionAlphabet& alphabet) {
  if (legal.empty()) throw std::invalid_argument("no legal actions: the state is terminal");
  std::size_t best = alphabet.index(legal.front());
  for (Action a : legal) {
    const std::size_t i = alphabet.index(a);
    if (logits[i] > logits[best] || (logits[i] == logits[best] && i < best)) best = i;
  }
  return alphabet.action(best);
}

ActionScores score_actions(ad::Graph& g, const StepContext& ctx, std::optional<ad::Var> v, const NerHead& head,
                           std::span<const Action> legal, const ActionAlphabet& alphabet,
                           const HeadDropout& dropout) {
  if (legal.empty()) throw std::invalid_argument("score_actions: no legal actions");
  const ad::Var d = dropout.apply(g, action_features(g, ctx, v));
  const ad::Var logits = ad::affine(g, g.param(*head.w), d, g.param(*head.b));
  if (g.size(logits) != alphabet.size()) {
    throw ad::DimensionError("score_actions: head produces " + std::to_string(g.size(logits)) +
                             " logits for an alphabet of " + std::to_string(alphabet.size()));
  }
  const ad::Var probs = ad::softmax(g, logits);
  return {logits, probs, best_legal(g.value(logits), legal, alphabet)};
}

ElHead ElHead::create(ad::ParameterSet& params, const std::string& prefix, std::size_t entity_dim,
                      std::size_t mention_dim, std::size_t sentence_dim, std::size_t action_dim, std::size_t hidden,
                      std::uint64_t seed) {
  ElHead h;
  h.entity_dim = entity_dim;
  h.mention_dim = mention_dim;
  h.sentence_dim = sentence_dim;
  h.action_dim = action_dim;
  h.w1 = &params.add_glorot(prefix + ".W1", {hidden, h.feature_dim()}, seed);
  h.b1 = &params.add(prefix + ".b1", {hidden});
  h.w2 = &params.add_glorot(prefix + ".W2", {1, hidden}, seed);
  h.b2 = &params.add(prefix + ".b2", {1});
  return h;
}

std::optional<CandidateScores> score_candidates(ad::Graph& g, std::span<const Candidate> cands,
                                                std::optional<ad::Var> m, std::optional<ad::Var> v, ad::Var a,
                                                const ElHead& head, const HeadDropout& dropout) {
  if (cands.empty()) return std::nullopt;
  if (m.has_value() != (head.mention_dim > 0) || v.has_value() != (head.sentence_dim > 0)) {
    throw std::invalid_argument("score_candidates: feature switches do not match the head layout");
  }
  std::vector<ad::Var> shared_parts;
  if (m) shared_parts.push_back(*m);
  if (v) shared_parts.push_back(*v);
  shared_parts.push_back(a);
  const ad::Var shared_in = dropout.apply(g, ad::concat(g, shared_parts));
  if (g.size(shared_in) != head.mention_dim + head.sentence_dim + head.action_dim) {
    throw ad::DimensionError("score_candidates: context features of size " + std::to_string(g.size(shared_in)) +
                             " do not match the head layout");
  }
  const ad::Var w1 = g.param(*head.w1);
  const ad::Var shared =
      ad::add(g, ad::matvec_cols(g, w1, head.entity_dim + 1, shared_in), g.param(*head.b1));
  const ad::Var w2 = g.param(*head.w2);
  const ad::Var b2 = g.param(*head.b2);

  std::vector<ad::Var> scores;
  scores.reserve(cands.size());
  for (const Candidate& c : cands) {
    if (c.embedding.size() != head.entity_dim) {
      throw ad::DimensionError("candidate '" + c.entity_id + "' embedding has dimension " +
                               std::to_string(c.embedding.size()) + ", expected " + std::to_string(head.entity_dim));
    }
    std::vector<double> own(c.embedding);
    own.push_back(c.prior);
    const ad::Var pre = ad::add(g, ad::matvec_cols(g, w1, 0, g.constant(std::move(own))), shared);
    scores.push_back(ad::affine(g, w2, ad::tanh(g, pre), b2));
  }
  const ad::Var logits = ad::concat(g, scores);
  const ad::Var probs = ad::softmax(g, logits);
  auto lv = g.value(logits);
  std::size_t best = 0;
  for (std::size_t i = 1; i < cands.size(); ++i) {
    if (lv[i] > lv[best] || (lv[i] == lv[best] && cands[i].entity_id < cands[best].entity_id)) best = i;
  }
  return CandidateScores{logits, probs, best};
}

NilHead NilHead::create(ad::ParameterSet& params, const std::string& prefix, std::size_t input_dim,
                        std::size_t hidden, double threshold, std::uint64_t seed) {
  NilHead h;
  h.w1 = &params.add_glorot(prefix + ".W1", {hidden, input_dim}, seed);
  h.b1 = &params.add(prefix + ".b1", {hidden});
  h.w2 = &params.add_glorot(prefix + ".W2", {1, hidden}, seed);
  h.b2 = &params.add(prefix + ".b2", {1});
  h.threshold = threshold;
  return h;
}

NilDecision nil_gate(ad::Graph& g, ad::Var s, const NilHead& head, const HeadDropout& dropout) {
  const ad::Var in = dropout.apply(g, s);
  const ad::Var hidden = ad::tanh(g, ad::affine(g, g.param(*head.w1), in, g.param(*head.b1)));
  const ad::Var prob = ad::sigmoid(g, ad::affine(g, g.param(*head.w2), hidden, g.param(*head.b2)));
  const double value = g.scalar(prob);
  return {prob, value, value >= head.threshold};
}

LossBreakdown joint_loss(ad::Graph& g, std::span<const ad::Var> ner, std::span<const ad::Var> el,
                         std::span<const ad::Var> nil) {
  LossBreakdown out;
  std::optional<ad::Var> total;
  auto fold = [&](std::span<const ad::Var> terms, double& component) {
    if (terms.empty()) return;
    const ad::Var s = ad::sum(g, terms);
    component = g.scalar(s);
    total = total ? ad::add(g, *total, s) : s;
  };
  fold(ner, out.ner);
  fold(el, out.el);
  fold(nil, out.nil);
  out.total = total ? *total : g.constant({0.0});
  out.value = g.scalar(out.total);
  return out;
}

}  // namespace jnel
