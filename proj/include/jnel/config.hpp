#pragma once
// Model and training configuration, read from `key = value` text.

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace jnel {

enum class Mode { kJoint, kNerOnly, kElOnly };

std::string to_string(Mode mode);
Mode parse_mode(const std::string& s);

struct Config {
  // dimensions
  std::size_t word_dim = 100;
  std::size_t char_emb_dim = 25;
  std::size_t char_dim = 50;  // forward + backward character states
  std::size_t contextual_dim = 0;
  std::size_t entity_dim = 300;
  std::size_t sent_hidden = 100;  // per direction, both sentence layers
  std::size_t stack_hidden = 100;
  std::size_t token_dim = 100;
  std::size_t action_dim = 50;
  std::size_t type_dim = 20;
  std::size_t attention_dim = 100;
  std::size_t el_hidden = 5000;
  std::size_t nil_hidden = 100;

  // optimization
  double dropout = 0.3;
  double lr = 0.001;
  double beta1 = 0.8;
  double beta2 = 0.999;
  double eps = 1e-8;
  double lr_decay = 0.95;
  double clip_norm = 5.0;
  int epochs = 50;
  int patience = 5;
  std::uint64_t seed = 1;

  // switches
  bool use_sent_rep = true;
  bool use_ment_rep = true;
  bool use_nil = true;
  bool use_contextual = false;
  Mode mode = Mode::kJoint;
  std::size_t candidate_top_k = 30;
  double nil_threshold = 0.5;

  // Filled in by training and carried inside checkpoints.
  std::vector<std::string> types;
  std::string candidates;
  std::string word_emb;
  std::string entity_emb;

  // Throws std::invalid_argument describing the first bad value.
  void validate() const;
  std::map<std::string, std::string> to_map() const;
  // Canonical text; parse_config(to_text(c)) == c.
  std::string to_text() const;

  friend bool operator==(const Config&, const Config&) = default;
};

// Unknown keys, malformed lines and bad values are errors. '#' starts a comment.
Config parse_config(std::istream& in);
Config parse_config_text(const std::string& text);
Config load_config(const std::string& path);

}  // namespace jnel
