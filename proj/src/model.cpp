#include "jnel/model.hpp"

#include <algorithm>
#include <stdexcept>

namespace jnel {

JointModel::JointModel(Config config) : config_(std::move(config)), alphabet_(TypeInventory(config_.types)) {
  config_.validate();
  if (config_.types.empty()) throw std::invalid_argument("model needs at least one entity type");
  config_.types = alphabet_.types().names();
  const Config& c = config_;
  const std::uint64_t seed = c.seed;
  const std::size_t ctx_dim = c.use_contextual ? c.contextual_dim : 0;

  embedder_ = TokenEmbedder(params_, "embed", c.word_dim, c.char_emb_dim, c.char_dim, ctx_dim, seed);
  sentence_ = SentenceEncoder::create(params_, "sentence", embedder_.output_dim(), c.sent_hidden, c.use_ment_rep, seed);
  const std::size_t h1_dim = 2 * c.sent_hidden;
  if (c.use_sent_rep) attention_ = AttentionParams::create(params_, "attention", h1_dim, c.attention_dim, seed);

  token_w_ = &params_.add_glorot("token_proj.W", {c.token_dim, embedder_.output_dim()}, seed);
  token_b_ = &params_.add("token_proj.b", {c.token_dim});
  buffer_ = StackLstmParams::create(params_, "buffer_lstm", c.token_dim, c.stack_hidden, seed);
  stack_ = StackLstmParams::create(params_, "stack_lstm", c.token_dim, c.stack_hidden, seed);
  action_ = StackLstmParams::create(params_, "action_lstm", c.action_dim, c.stack_hidden, seed);
  output_ = StackLstmParams::create(params_, "output_lstm", c.token_dim + c.type_dim, c.stack_hidden, seed);
  action_emb_ = &params_.add_glorot("action_emb", {alphabet_.size(), c.action_dim}, seed);
  type_emb_ = &params_.add_glorot("type_emb", {alphabet_.types().size() + 1, c.type_dim}, seed);

  const std::size_t d_dim = 4 * c.stack_hidden + (c.use_sent_rep ? h1_dim : 0);
  ner_ = NerHead::create(params_, "ner", d_dim, alphabet_.size(), seed);
  el_ = ElHead::create(params_, "el", c.entity_dim, c.use_ment_rep ? h1_dim : 0, c.use_sent_rep ? h1_dim : 0,
                       c.stack_hidden, c.el_hidden, seed);
  if (c.use_nil) nil_ = NilHead::create(params_, "nil", c.stack_hidden, c.nil_hidden, c.nil_threshold, seed);
}

std::vector<Candidate> candidates_for(const std::string& mention, const Resources& res, std::size_t top_k) {
  std::vector<Candidate> out;
  if (!res.candidates) return out;
  for (CandidateStub& stub : compute_priors(*res.candidates, mention, top_k)) {
    out.push_back({stub.entity_id, res.entities->lookup(stub.entity_id), stub.prior});
  }
  return out;
}

namespace {

// Everything the step loop needs for one sentence.
struct SentenceInputs {
  SentenceEncoding enc;
  std::vector<Var> keys;
  std::vector<Var> tokens;  // projected token inputs for the stack LSTMs
};

SentenceInputs prepare_sentence(Graph& g, const JointModel& model, const Document& doc, std::size_t s,
                                const Resources& res, const HeadDropout& drop) {
  const Config& c = model.config();
  const auto& words = doc.sentences[s];
  const std::vector<std::vector<double>>* ctx = nullptr;
  if (c.use_contextual) {
    if (doc.contextual.size() != doc.sentences.size()) {
      throw FormatError("document " + doc.id + " has no contextual vectors", 0);
    }
    ctx = &doc.contextual[s];
  }
  const auto embs = embed_tokens(g, model.embedder(), words, *res.words, ctx);
  std::vector<Var> xs;
  xs.reserve(embs.size());
  for (const TokenEmbedding& e : embs) xs.push_back(e.full);

  SentenceEncoder encoder = model.sentence_encoder();
  // Layer 2 only feeds linking; skipping it keeps ner_only runs free of its dropout draws.
  if (c.mode == Mode::kNerOnly) {
    encoder.layer2_fw.reset();
    encoder.layer2_bw.reset();
  }
  SentenceInputs out;
  out.enc = encode_sentence(g, encoder, xs, drop.ratio, drop.training, drop.rng);
  if (model.attention()) out.keys = attention_keys(g, out.enc, *model.attention());
  const Var tw = g.param(model.token_proj_w());
  const Var tb = g.param(model.token_proj_b());
  for (Var x : xs) out.tokens.push_back(drop.apply(g, ad::affine(g, tw, x, tb)));
  return out;
}

}  // namespace

DocumentRun run_document(Graph& g, const JointModel& model, const Document& doc, const Resources& res,
                         Decoding decoding, bool training, Rng* rng) {
  const Config& c = model.config();
  const ActionAlphabet& alphabet = model.alphabet();
  const std::size_t num_types = alphabet.types().size();
  if (!res.words || !res.entities) throw std::invalid_argument("run_document: missing embedding tables");
  if (training && c.dropout > 0.0 && !rng) throw std::invalid_argument("run_document: dropout needs an rng");
  const HeadDropout drop{c.dropout, training, rng};
  const bool link = c.mode != Mode::kNerOnly;
  // el_only models never learn to detect mentions; they link gold mentions.
  const bool follow_gold = decoding == Decoding::kTeacherForced || c.mode == Mode::kElOnly;
  const bool collect_loss = decoding == Decoding::kTeacherForced;

  DocumentRun run;
  StackLstm action_lstm(g, model.action_lstm());
  const Var action_table = g.param(model.action_embeddings());
  const Var type_table = g.param(model.type_embeddings());
  const Var outside_type = ad::row(g, type_table, num_types);

  for (std::size_t s = 0; s < doc.sentences.size(); ++s) {
    const int n = static_cast<int>(doc.sentences[s].size());
    std::vector<Action> gold_actions;
    if (follow_gold) gold_actions = oracle_actions(n, doc.spans_in(static_cast<int>(s)), alphabet.types());

    const SentenceInputs in = prepare_sentence(g, model, doc, s, res, drop);
    StackLstm buffer(g, model.buffer_lstm());
    StackLstm stack(g, model.stack_lstm());
    StackLstm output(g, model.output_lstm());
    for (int w = n; w-- > 0;) buffer.push(in.tokens[static_cast<std::size_t>(w)]);

    TransitionState state(n);
    std::size_t t = 0;
    while (!state.terminal()) {
      const StepContext ctx = step_context(buffer, stack, action_lstm, output);
      std::optional<Var> v;
      if (model.attention()) {
        const Var q = stack_summary(g, in.enc, state.stack());
        v = sentence_rep(g, in.enc, in.keys, q, *model.attention()).v;
      }
      const auto legal = state.legal_actions(num_types);
      const ActionScores scores = score_actions(g, ctx, v, model.ner_head(), legal, alphabet, drop);

      Action action = scores.chosen;
      if (follow_gold) {
        action = gold_actions.at(t);
        if (collect_loss && c.mode != Mode::kElOnly) {
          run.ner_terms.push_back(ad::cross_entropy(g, scores.probs, alphabet.index(action)));
        }
      }

      if (action.kind == ActionKind::kReduce) {
        const std::vector<int> mention = state.stack();
        const int start = mention.front();
        const int end = mention.back() + 1;
        Annotation ann{static_cast<int>(s), {start, end, alphabet.types().name(static_cast<std::size_t>(action.type))},
                       std::nullopt};
        const Annotation* gold = doc.find(static_cast<int>(s), start, end);
        const std::vector<std::string> tokens(doc.sentences[s].begin() + start, doc.sentences[s].begin() + end);
        const std::string key = normalize_mention(tokens);

        if (link) {
          std::optional<Var> m;
          if (c.use_ment_rep) m = mention_rep(g, in.enc, mention);
          if (collect_loss) {
            const bool gold_linked = gold && gold->linked();
            if (model.nil_head()) {
              const NilDecision gate = nil_gate(g, ctx.s, *model.nil_head(), drop);
              run.nil_terms.push_back(ad::binary_cross_entropy(g, gate.prob, gold_linked ? 1.0 : 0.0));
            }
            if (gold_linked) {
              ++run.linkable_mentions;
              const auto cands = candidates_for(key, res, c.candidate_top_k);
              auto hit = std::find_if(cands.begin(), cands.end(),
                                      [&](const Candidate& cand) { return cand.entity_id == *gold->entity; });
              if (hit == cands.end()) {
                ++run.el_skipped;
              } else {
                const auto scored = score_candidates(g, cands, m, v, ctx.a, model.el_head(), drop);
                run.el_terms.push_back(
                    ad::cross_entropy(g, scored->probs, static_cast<std::size_t>(hit - cands.begin())));
              }
            }
            if (gold) ann.entity = gold->entity;
          } else {
            bool linkable = true;
            if (model.nil_head()) linkable = nil_gate(g, ctx.s, *model.nil_head(), drop).linkable;
            if (linkable) {
              const auto cands = candidates_for(key, res, c.candidate_top_k);
              if (auto scored = score_candidates(g, cands, m, v, ctx.a, model.el_head(), drop)) {
                ann.entity = cands[scored->chosen].entity_id;
              }
            }
          }
        }
        run.annotations.push_back(std::move(ann));

        std::vector<Var> chunk;
        for (int w : mention) {
          chunk.push_back(in.tokens[static_cast<std::size_t>(w)]);
          stack.pop();
        }
        const Var parts[] = {ad::mean(g, chunk), ad::row(g, type_table, static_cast<std::size_t>(action.type))};
        output.push(ad::concat(g, parts));
      } else {
        const Var token = in.tokens[static_cast<std::size_t>(state.next_token())];
        buffer.pop();
        if (action.kind == ActionKind::kShift) {
          stack.push(token);
        } else {
          const Var parts[] = {token, outside_type};
          output.push(ad::concat(g, parts));
        }
      }
      state.apply(action, num_types);
      action_lstm.push(ad::row(g, action_table, alphabet.index(action)));
      ++t;
    }
    run.action_steps += t;
    run.actions.push_back(state.history());
  }
  return run;
}

}  // namespace jnel
