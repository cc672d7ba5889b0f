#pragma once
// Helpers shared by the unit tests and the acceptance binary: fuzzers for
// spans and documents, a miniature model configuration, and a central
// finite-difference gradient checker.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "jnel/autodiff.hpp"
#include "jnel/config.hpp"
#include "jnel/data.hpp"
#include "jnel/heads.hpp"
#include "jnel/model.hpp"
#include "jnel/rng.hpp"
#include "jnel/transition.hpp"

namespace jnel::testing {

inline std::string source_path(const std::string& rel) { return std::string(JNEL_SOURCE_DIR) + "/" + rel; }

// Fresh scratch directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("jnel_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

// Random non-overlapping typed spans over a sentence of length n.
inline std::vector<Span> random_spans(Rng& rng, int n, const TypeInventory& types) {
  std::vector<Span> out;
  int i = 0;
  while (i < n) {
    if (rng.uniform() < 0.4) {
      const int len = 1 + static_cast<int>(rng.index(static_cast<std::uint64_t>(std::min(3, n - i))));
      out.push_back({i, i + len, types.name(rng.index(types.size()))});
      i += len;
    } else {
      ++i;
    }
  }
  return out;
}

inline const std::vector<std::string>& fuzz_vocab() {
  static const std::vector<std::string> v = {"the", "Alpha", "met", "Beta", "in", "Gamma", "river", "Delta",
                                             "of",  "Zeta",  "and", "Eta",  "at", "Theta", ".",     "Iota"};
  return v;
}

struct FuzzOptions {
  int sentences_min = 1;
  int sentences_max = 2;
  int length_min = 1;
  int length_max = 6;
  int entities = 4;
  double nil_rate = 0.2;
};

// Document with random tokens, spans and links. Linked mentions point to
// "E0".."E{entities-1}".
inline Document random_document(Rng& rng, const TypeInventory& types, const std::string& id,
                                const FuzzOptions& opt = {}) {
  Document doc;
  doc.id = id;
  const int ns = opt.sentences_min + static_cast<int>(rng.index(opt.sentences_max - opt.sentences_min + 1));
  for (int s = 0; s < ns; ++s) {
    const int n = opt.length_min + static_cast<int>(rng.index(opt.length_max - opt.length_min + 1));
    std::vector<std::string> toks;
    for (int t = 0; t < n; ++t) toks.push_back(fuzz_vocab()[rng.index(fuzz_vocab().size())]);
    doc.sentences.push_back(toks);
    for (Span& sp : random_spans(rng, n, types)) {
      Annotation a{s, sp, std::nullopt};
      if (rng.uniform() >= opt.nil_rate) a.entity = "E" + std::to_string(rng.index(opt.entities));
      doc.gold.push_back(a);
    }
  }
  return doc;
}

inline std::string mention_key(const Document& doc, const Annotation& a) {
  const auto& sent = doc.sentences[static_cast<std::size_t>(a.sentence)];
  return normalize_mention(std::vector<std::string>(sent.begin() + a.span.start, sent.begin() + a.span.end));
}

// Every linked gold mention gets its gold entity plus `distractors` others.
inline CandidateDictionary candidates_for_docs(const std::vector<Document>& docs, int entities, int distractors) {
  CandidateDictionary dict;
  for (const Document& d : docs) {
    for (const Annotation& a : d.gold) {
      if (!a.linked()) continue;
      const std::string key = mention_key(d, a);
      dict.add(key, *a.entity, 3.0);
      const int gold = std::stoi(a.entity->substr(1));
      for (int k = 1; k <= distractors; ++k) dict.add(key, "E" + std::to_string((gold + k) % entities), 1.0);
    }
  }
  return dict;
}

// Model with every dimension in [4, 8] and two entity types.
inline Config mini_config() {
  Config c;
  c.word_dim = 4;
  c.char_emb_dim = 4;
  c.char_dim = 4;
  c.entity_dim = 5;
  c.sent_hidden = 4;
  c.stack_hidden = 5;
  c.token_dim = 6;
  c.action_dim = 4;
  c.type_dim = 4;
  c.attention_dim = 5;
  c.el_hidden = 6;
  c.nil_hidden = 4;
  c.dropout = 0.0;
  c.types = {"A", "B"};
  c.seed = 7;
  return c;
}

struct MiniWorld {
  std::vector<Document> docs;
  CandidateDictionary candidates;
  EmbeddingTable words;
  EmbeddingTable entities;

  MiniWorld(const Config& c, std::vector<Document> d, int num_entities, int distractors)
      : docs(std::move(d)),
        candidates(candidates_for_docs(docs, num_entities, distractors)),
        words(empty_word_embeddings(c.word_dim)),
        entities(empty_entity_embeddings(c.entity_dim)) {}

  Resources view() const { return {&candidates, &words, &entities}; }
};

inline MiniWorld mini_world(const Config& c, std::uint64_t seed, int num_docs, const FuzzOptions& opt = {},
                            int distractors = 1) {
  Rng rng(seed);
  const TypeInventory types(c.types);
  std::vector<Document> docs;
  for (int i = 0; i < num_docs; ++i) docs.push_back(random_document(rng, types, "doc" + std::to_string(i), opt));
  return MiniWorld(c, std::move(docs), opt.entities, distractors);
}

inline double teacher_loss(const JointModel& model, const Document& doc, const Resources& res) {
  ad::Graph g(false);
  const DocumentRun run = run_document(g, model, doc, res, Decoding::kTeacherForced, false, nullptr);
  return joint_loss(g, run.ner_terms, run.el_terms, run.nil_terms).value;
}

struct GradCheck {
  std::size_t checked = 0;
  double worst = 0.0;
  std::string worst_where;
};

// |a - n| / max(|a|, |n|, floor)
inline double relative_error(double a, double n, double floor) {
  return std::abs(a - n) / std::max({std::abs(a), std::abs(n), floor});
}

// Compares analytic gradients of the teacher-forced document loss with
// central differences for every scalar of every parameter.
inline GradCheck check_model_gradients(JointModel& model, const Document& doc, const Resources& res, double h,
                                       double floor) {
  model.params().zero_grad();
  {
    ad::Graph g;
    const DocumentRun run = run_document(g, model, doc, res, Decoding::kTeacherForced, false, nullptr);
    const LossBreakdown loss = joint_loss(g, run.ner_terms, run.el_terms, run.nil_terms);
    if (g.requires_grad(loss.total)) g.backward(loss.total);
  }
  GradCheck out;
  auto& params = model.params();
  for (std::size_t p = 0; p < params.count(); ++p) {
    ad::Parameter& param = params.at(p);
    for (std::size_t i = 0; i < param.tensor.size(); ++i) {
      const double saved = param.tensor.values[i];
      param.tensor.values[i] = saved + h;
      const double up = teacher_loss(model, doc, res);
      param.tensor.values[i] = saved - h;
      const double down = teacher_loss(model, doc, res);
      param.tensor.values[i] = saved;
      const double numeric = (up - down) / (2 * h);
      const double err = relative_error(param.tensor.grad[i], numeric, floor);
      ++out.checked;
      if (err > out.worst) {
        out.worst = err;
        char buf[96];
        std::snprintf(buf, sizeof buf, "] analytic=%.6g numeric=%.6g", param.tensor.grad[i], numeric);
        out.worst_where = param.name + "[" + std::to_string(i) + buf;
      }
    }
  }
  model.params().zero_grad();
  return out;
}

// Worst relative error between analytic and central-difference gradients of
// r . build(g) for every scalar in `ps`; r is a fixed random projection.
inline double projected_grad_error(ad::ParameterSet& ps, const std::function<ad::Var(ad::Graph&)>& build,
                                   double h = 1e-5, double floor = 1e-7) {
  auto project = [&](ad::Graph& g) {
    const ad::Var out = build(g);
    Rng rng(77);
    std::vector<double> r(g.size(out));
    for (double& x : r) x = rng.uniform(-1.0, 1.0);
    return ad::dot(g, out, g.constant(r));
  };
  ps.zero_grad();
  {
    ad::Graph g;
    g.backward(project(g));
  }
  double worst = 0.0;
  for (std::size_t p = 0; p < ps.count(); ++p) {
    ad::Tensor& t = ps.at(p).tensor;
    for (std::size_t i = 0; i < t.size(); ++i) {
      const double saved = t.values[i];
      t.values[i] = saved + h;
      ad::Graph g1(false);
      const double up = g1.scalar(project(g1));
      t.values[i] = saved - h;
      ad::Graph g2(false);
      const double down = g2.scalar(project(g2));
      t.values[i] = saved;
      worst = std::max(worst, relative_error(t.grad[i], (up - down) / (2 * h), floor));
    }
  }
  ps.zero_grad();
  return worst;
}

inline ad::Parameter& random_param(ad::ParameterSet& ps, const std::string& name, ad::Shape shape, std::uint64_t seed,
                                   double scale = 1.0) {
  ad::Parameter& p = ps.add(name, std::move(shape));
  Rng rng(seed);
  for (double& v : p.tensor.values) v = rng.uniform(-scale, scale);
  return p;
}

// Central differences of a scalar function of a flat input vector.
inline std::vector<double> numeric_gradient(const std::function<double(const std::vector<double>&)>& f,
                                            std::vector<double> x, double h = 1e-6) {
  std::vector<double> g(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double saved = x[i];
    x[i] = saved + h;
    const double up = f(x);
    x[i] = saved - h;
    const double down = f(x);
    x[i] = saved;
    g[i] = (up - down) / (2 * h);
  }
  return g;
}

}  // namespace jnel::testing
