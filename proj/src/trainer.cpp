#include "jnel/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>

#include "json.hpp"

namespace jnel {

ResourceBundle load_resources(const Config& config, const ResourcePaths& overrides) {
  auto pick = [](const std::string& a, const std::string& b) { return a.empty() ? b : a; };
  const std::string cand = pick(overrides.candidates, config.candidates);
  const std::string words = pick(overrides.word_emb, config.word_emb);
  const std::string ents = pick(overrides.entity_emb, config.entity_emb);
  return ResourceBundle{
      cand.empty() ? CandidateDictionary{} : load_candidates(cand),
      words.empty() ? empty_word_embeddings(config.word_dim) : load_word_embeddings(words, config.word_dim),
      ents.empty() ? empty_entity_embeddings(config.entity_dim) : load_entity_embeddings(ents, config.entity_dim),
  };
}

LossBreakdown train_document_loss(JointModel& model, const Document& doc, const Resources& res, Rng& rng,
                                  std::size_t* el_skipped) {
  ad::Graph g;
  const DocumentRun run = run_document(g, model, doc, res, Decoding::kTeacherForced, true, &rng);
  if (el_skipped) *el_skipped += run.el_skipped;
  LossBreakdown loss = joint_loss(g, run.ner_terms, run.el_terms, run.nil_terms);
  if (g.requires_grad(loss.total)) g.backward(loss.total);
  return loss;
}

TrainResult train(const Config& config, const std::vector<Document>& train_docs, const std::vector<Document>* dev,
                  const Resources& res, std::ostream* log) {
  if (train_docs.empty()) throw std::invalid_argument("training corpus is empty");
  Config cfg = config;
  if (cfg.types.empty()) cfg.types = collect_types(train_docs).names();
  JointModel model(cfg);
  ad::Adam adam(model.params(), cfg.lr, cfg.beta1, cfg.beta2, cfg.eps);
  Rng rng(cfg.seed);

  TrainResult result;
  result.best_score = -1.0;
  std::vector<std::size_t> order(train_docs.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  int since_best = 0;

  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    EpochMetrics m;
    m.epoch = epoch;
    m.lr = cfg.lr * std::pow(cfg.lr_decay, epoch - 1);
    adam.set_lr(m.lr);
    for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rng.index(i)]);

    for (std::size_t idx : order) {
      const LossBreakdown loss = train_document_loss(model, train_docs[idx], res, rng, &m.el_skipped);
      m.loss += loss.value;
      m.ner_loss += loss.ner;
      m.el_loss += loss.el;
      m.nil_loss += loss.nil;
      if (!model.params().count()) continue;
      ad::clip_grad_norm(model.params(), cfg.clip_norm);
      adam.step(model.params());
    }

    bool improved = false;
    if (dev) {
      m.dev = evaluate(model, *dev, res);
      m.dev_score = selection_score(cfg, *m.dev);
      improved = m.dev_score > result.best_score;
    } else {
      improved = true;
    }
    if (improved) {
      result.best = snapshot(model, adam, epoch, rng);
      result.best_epoch = epoch;
      result.best_score = m.dev_score;
      since_best = 0;
    } else {
      ++since_best;
    }
    if (log) {
      *log << "epoch " << epoch << " lr=" << m.lr << " loss=" << m.loss << " ner=" << m.ner_loss
           << " el=" << m.el_loss << " nil=" << m.nil_loss
           << " el_skipped=" << m.el_skipped;
      if (m.dev) *log << " dev_ner_f1=" << m.dev->ner.f1 << " dev_el_micro_f1=" << m.dev->el.micro.f1;
      *log << (improved ? " *" : "") << '\n';
    }
    result.history.push_back(std::move(m));
    if (dev && since_best >= cfg.patience) break;
  }
  return result;
}

DocAnnotations predict(const JointModel& model, const std::vector<Document>& docs, const Resources& res) {
  DocAnnotations out;
  out.reserve(docs.size());
  for (const Document& doc : docs) {
    ad::Graph g(false);
    out.push_back(run_document(g, model, doc, res, Decoding::kGreedy, false, nullptr).annotations);
  }
  return out;
}

DocAnnotations gold_annotations(const std::vector<Document>& docs) {
  DocAnnotations out;
  for (const Document& d : docs) out.push_back(d.gold);
  return out;
}

EvalReport evaluate(const JointModel& model, const std::vector<Document>& docs, const Resources& res) {
  const DocAnnotations pred = predict(model, docs, res);
  const DocAnnotations gold = gold_annotations(docs);
  EvalReport report;
  report.header = model.config().to_map();
  report.ner = ner_f1(pred, gold);
  report.el = el_strong_f1(pred, gold);
  for (const Document& doc : docs) {
    for (const Annotation& a : doc.gold) {
      if (!a.linked()) continue;
      ++report.linkable_mentions;
      const auto& sent = doc.sentences[static_cast<std::size_t>(a.sentence)];
      const std::vector<std::string> tokens(sent.begin() + a.span.start, sent.begin() + a.span.end);
      for (const CandidateStub& c : compute_priors(*res.candidates, normalize_mention(tokens),
                                                   model.config().candidate_top_k)) {
        if (c.entity_id == *a.entity) {
          ++report.gold_in_candidates;
          break;
        }
      }
    }
  }
  return report;
}

double selection_score(const Config& config, const EvalReport& report) {
  return config.mode == Mode::kNerOnly ? report.ner.f1 : report.el.micro.f1;
}

void write_predictions_tsv(std::ostream& out, const std::vector<Document>& docs, const DocAnnotations& pred) {
  if (pred.size() != docs.size()) throw std::invalid_argument("prediction/document count mismatch");
  std::vector<Document> view;
  view.reserve(docs.size());
  for (std::size_t i = 0; i < docs.size(); ++i) view.push_back({docs[i].id, docs[i].sentences, pred[i], {}});
  write_corpus(out, view);
}

void write_predictions_jsonl(std::ostream& out, const std::vector<Document>& docs, const DocAnnotations& pred) {
  if (pred.size() != docs.size()) throw std::invalid_argument("prediction/document count mismatch");
  for (std::size_t i = 0; i < docs.size(); ++i) {
    nlohmann::ordered_json mentions = nlohmann::ordered_json::array();
    for (const Annotation& a : pred[i]) {
      const auto& sent = docs[i].sentences[static_cast<std::size_t>(a.sentence)];
      std::string text;
      for (int t = a.span.start; t < a.span.end; ++t) {
        if (t > a.span.start) text += ' ';
        text += sent[static_cast<std::size_t>(t)];
      }
      mentions.push_back({{"sentence", a.sentence},
                          {"start", a.span.start},
                          {"end", a.span.end},
                          {"type", a.span.type},
                          {"text", text},
                          {"entity", a.entity ? nlohmann::ordered_json(*a.entity) : nlohmann::ordered_json(nullptr)}});
    }
    nlohmann::ordered_json line = {{"id", docs[i].id}, {"sentences", docs[i].sentences}, {"mentions", mentions}};
    out << line.dump() << '\n';
  }
}

}  // namespace jnel
