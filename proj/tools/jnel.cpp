// Command-line front end: train, eval, predict, oracle.

#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "jnel/checkpoint.hpp"
#include "jnel/config.hpp"
#include "jnel/data.hpp"
#include "jnel/eval.hpp"
#include "jnel/trainer.hpp"
#include "jnel/transition.hpp"

namespace {

using namespace jnel;

std::vector<Document> read_corpus(const std::string& path, const std::string& contextual, const Config& config) {
  std::vector<Document> docs = load_corpus(path);
  if (!contextual.empty()) {
    if (!config.use_contextual) throw std::invalid_argument("--contextual given but use_contextual is off");
    attach_contextual(docs, load_contextual_rows(contextual, config.contextual_dim));
  } else if (config.use_contextual) {
    throw std::invalid_argument("use_contextual is on; pass --contextual");
  }
  return docs;
}

struct TrainArgs {
  std::string config, corpus, candidates, word_emb, entity_emb, contextual, dev, dev_contextual, out;
};

int run_train(const TrainArgs& a) {
  Config config = load_config(a.config);
  config.candidates = a.candidates;
  config.word_emb = a.word_emb;
  config.entity_emb = a.entity_emb;
  const auto train_docs = read_corpus(a.corpus, a.contextual, config);
  std::vector<Document> dev_docs;
  if (!a.dev.empty()) dev_docs = read_corpus(a.dev, a.dev_contextual, config);
  if (config.types.empty()) config.types = collect_types(train_docs).names();

  const ResourceBundle bundle = load_resources(config);
  for (const auto& w : bundle.words.warnings()) std::cerr << "warning: " << w << '\n';
  for (const auto& w : bundle.entities.warnings()) std::cerr << "warning: " << w << '\n';

  const TrainResult result = train(config, train_docs, a.dev.empty() ? nullptr : &dev_docs, bundle.view(), &std::cerr);
  save_checkpoint(a.out, result.best);
  std::cout << "saved " << a.out << " (epoch " << result.best_epoch << ")\n";
  return 0;
}

struct EvalArgs {
  std::string checkpoint, corpus, candidates, word_emb, entity_emb, contextual, format = "tsv", output;
};

int run_eval(const EvalArgs& a, bool predict_only) {
  const Checkpoint ckpt = load_checkpoint(a.checkpoint);
  const auto model = restore_model(ckpt);
  const auto docs = read_corpus(a.corpus, a.contextual, model->config());
  const ResourceBundle bundle = load_resources(model->config(), {a.candidates, a.word_emb, a.entity_emb});
  if (!predict_only) {
    std::cout << format_report(evaluate(*model, docs, bundle.view()));
    return 0;
  }
  const DocAnnotations pred = predict(*model, docs, bundle.view());
  std::ofstream file;
  if (!a.output.empty()) {
    file.open(a.output);
    if (!file) throw std::runtime_error("cannot write '" + a.output + "'");
  }
  std::ostream& out = a.output.empty() ? std::cout : file;
  if (a.format == "jsonlines") {
    write_predictions_jsonl(out, docs, pred);
  } else {
    write_predictions_tsv(out, docs, pred);
  }
  return 0;
}

int run_oracle(const std::string& corpus, const std::vector<std::string>& types) {
  const auto docs = load_corpus(corpus);
  const TypeInventory inv = types.empty() ? collect_types(docs) : TypeInventory(types);
  const ActionAlphabet alphabet(inv);
  for (const Document& doc : docs) {
    for (std::size_t s = 0; s < doc.sentences.size(); ++s) {
      const int n = static_cast<int>(doc.sentences[s].size());
      const auto actions = oracle_actions(n, doc.spans_in(static_cast<int>(s)), inv);
      if (decode_spans(actions, n, inv) != doc.spans_in(static_cast<int>(s))) {
        throw std::runtime_error("oracle round trip failed in document " + doc.id);
      }
      std::cout << doc.id << '\t' << s << '\t';
      for (std::size_t i = 0; i < actions.size(); ++i) std::cout << (i ? " " : "") << alphabet.name(actions[i]);
      std::cout << '\n';
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Joint named entity recognition and entity linking"};
  app.require_subcommand(1);

  TrainArgs ta;
  auto* train_cmd = app.add_subcommand("train", "Train a model and write a checkpoint");
  train_cmd->add_option("--config", ta.config, "Hyperparameter file (key = value)")->required();
  train_cmd->add_option("--corpus", ta.corpus, "Training corpus")->required();
  train_cmd->add_option("--candidates", ta.candidates, "Candidate dictionary")->required();
  train_cmd->add_option("--word-emb", ta.word_emb, "Word embedding table");
  train_cmd->add_option("--entity-emb", ta.entity_emb, "Entity embedding table");
  train_cmd->add_option("--contextual", ta.contextual, "Per-token contextual vectors for the corpus");
  train_cmd->add_option("--dev", ta.dev, "Development corpus for early stopping");
  train_cmd->add_option("--dev-contextual", ta.dev_contextual, "Contextual vectors for the dev corpus");
  train_cmd->add_option("--out", ta.out, "Checkpoint path")->required();

  EvalArgs ea;
  auto* eval_cmd = app.add_subcommand("eval", "Score a checkpoint against a gold corpus");
  eval_cmd->add_option("--checkpoint", ea.checkpoint)->required();
  eval_cmd->add_option("--corpus", ea.corpus)->required();
  eval_cmd->add_option("--candidates", ea.candidates, "Defaults to the path stored in the checkpoint");
  eval_cmd->add_option("--word-emb", ea.word_emb);
  eval_cmd->add_option("--entity-emb", ea.entity_emb);
  eval_cmd->add_option("--contextual", ea.contextual);

  EvalArgs pa;
  auto* predict_cmd = app.add_subcommand("predict", "Decode a corpus greedily");
  predict_cmd->add_option("--checkpoint", pa.checkpoint)->required();
  predict_cmd->add_option("--corpus", pa.corpus)->required();
  predict_cmd->add_option("--format", pa.format)->check(CLI::IsMember({"tsv", "jsonlines"}));
  predict_cmd->add_option("--output", pa.output, "Write here instead of stdout");
  predict_cmd->add_option("--candidates", pa.candidates, "Defaults to the path stored in the checkpoint");
  predict_cmd->add_option("--word-emb", pa.word_emb);
  predict_cmd->add_option("--entity-emb", pa.entity_emb);
  predict_cmd->add_option("--contextual", pa.contextual);

  std::string oracle_corpus;
  std::vector<std::string> oracle_types;
  auto* oracle_cmd = app.add_subcommand("oracle", "Print gold action sequences");
  oracle_cmd->add_option("--corpus", oracle_corpus)->required();
  oracle_cmd->add_option("--types", oracle_types, "Type inventory (default: types in the corpus)")->delimiter(',');

  CLI11_PARSE(app, argc, argv);

  try {
    if (*train_cmd) return run_train(ta);
    if (*eval_cmd) return run_eval(ea, false);
    if (*predict_cmd) return run_eval(pa, true);
    if (*oracle_cmd) return run_oracle(oracle_corpus, oracle_types);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
