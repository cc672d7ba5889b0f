#include "jnel/config.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>
#include <stdexcept>

#include "jnel/data.hpp"

namespace jnel {
namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::size_t parse_size(const std::string& v) {
  std::size_t out = 0;
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size()) throw std::invalid_argument("expected an integer, got '" + v + "'");
  return out;
}

int parse_int(const std::string& v) {
  int out = 0;
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size()) throw std::invalid_argument("expected an integer, got '" + v + "'");
  return out;
}

double parse_real(const std::string& v) {
  double out = 0.0;
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size()) throw std::invalid_argument("expected a number, got '" + v + "'");
  return out;
}

bool parse_bool(const std::string& v) {
  if (v == "true" || v == "1" || v == "on" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "off" || v == "no") return false;
  throw std::invalid_argument("expected a boolean, got '" + v + "'");
}

std::vector<std::string> parse_list(const std::string& v) {
  std::vector<std::string> out;
  std::stringstream in(v);
  std::string item;
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::string join(const std::vector<std::string>& xs) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) out += ',';
    out += xs[i];
  }
  return out;
}

using Setter = std::function<void(Config&, const std::string&)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"word_dim", [](Config& c, const std::string& v) { c.word_dim = parse_size(v); }},
      {"char_emb_dim", [](Config& c, const std::string& v) { c.char_emb_dim = parse_size(v); }},
      {"char_dim", [](Config& c, const std::string& v) { c.char_dim = parse_size(v); }},
      {"contextual_dim", [](Config& c, const std::string& v) { c.contextual_dim = parse_size(v); }},
      {"entity_dim", [](Config& c, const std::string& v) { c.entity_dim = parse_size(v); }},
      {"sent_hidden", [](Config& c, const std::string& v) { c.sent_hidden = parse_size(v); }},
      {"stack_hidden", [](Config& c, const std::string& v) { c.stack_hidden = parse_size(v); }},
      {"token_dim", [](Config& c, const std::string& v) { c.token_dim = parse_size(v); }},
      {"action_dim", [](Config& c, const std::string& v) { c.action_dim = parse_size(v); }},
      {"type_dim", [](Config& c, const std::string& v) { c.type_dim = parse_size(v); }},
      {"attention_dim", [](Config& c, const std::string& v) { c.attention_dim = parse_size(v); }},
      {"el_hidden", [](Config& c, const std::string& v) { c.el_hidden = parse_size(v); }},
      {"nil_hidden", [](Config& c, const std::string& v) { c.nil_hidden = parse_size(v); }},
      {"dropout", [](Config& c, const std::string& v) { c.dropout = parse_real(v); }},
      {"lr", [](Config& c, const std::string& v) { c.lr = parse_real(v); }},
      {"beta1", [](Config& c, const std::string& v) { c.beta1 = parse_real(v); }},
      {"beta2", [](Config& c, const std::string& v) { c.beta2 = parse_real(v); }},
      {"eps", [](Config& c, const std::string& v) { c.eps = parse_real(v); }},
      {"lr_decay", [](Config& c, const std::string& v) { c.lr_decay = parse_real(v); }},
      {"clip_norm", [](Config& c, const std::string& v) { c.clip_norm = parse_real(v); }},
      {"epochs", [](Config& c, const std::string& v) { c.epochs = parse_int(v); }},
      {"patience", [](Config& c, const std::string& v) { c.patience = parse_int(v); }},
      {"seed", [](Config& c, const std::string& v) { c.seed = parse_size(v); }},
      {"use_sent_rep", [](Config& c, const std::string& v) { c.use_sent_rep = parse_bool(v); }},
      {"use_ment_rep", [](Config& c, const std::string& v) { c.use_ment_rep = parse_bool(v); }},
      {"use_nil", [](Config& c, const std::string& v) { c.use_nil = parse_bool(v); }},
      {"use_contextual", [](Config& c, const std::string& v) { c.use_contextual = parse_bool(v); }},
      {"mode", [](Config& c, const std::string& v) { c.mode = parse_mode(v); }},
      {"candidate_top_k", [](Config& c, const std::string& v) { c.candidate_top_k = parse_size(v); }},
      {"nil_threshold", [](Config& c, const std::string& v) { c.nil_threshold = parse_real(v); }},
      {"types", [](Config& c, const std::string& v) { c.types = parse_list(v); }},
      {"candidates", [](Config& c, const std::string& v) { c.candidates = v; }},
      {"word_emb", [](Config& c, const std::string& v) { c.word_emb = v; }},
      {"entity_emb", [](Config& c, const std::string& v) { c.entity_emb = v; }},
  };
  return table;
}

}  // namespace

std::string to_string(Mode mode) {
  switch (mode) {
    case Mode::kJoint:
      return "joint";
    case Mode::kNerOnly:
      return "ner_only";
    case Mode::kElOnly:
      return "el_only";
  }
  return "joint";
}

Mode parse_mode(const std::string& s) {
  if (s == "joint") return Mode::kJoint;
  if (s == "ner_only") return Mode::kNerOnly;
  if (s == "el_only") return Mode::kElOnly;
  throw std::invalid_argument("mode must be joint, ner_only or el_only, got '" + s + "'");
}

void Config::validate() const {
  const std::pair<const char*, std::size_t> dims[] = {
      {"word_dim", word_dim},       {"char_emb_dim", char_emb_dim},   {"char_dim", char_dim},
      {"entity_dim", entity_dim},   {"sent_hidden", sent_hidden},     {"stack_hidden", stack_hidden},
      {"token_dim", token_dim},     {"action_dim", action_dim},       {"type_dim", type_dim},
      {"attention_dim", attention_dim}, {"el_hidden", el_hidden},     {"nil_hidden", nil_hidden},
      {"candidate_top_k", candidate_top_k}};
  for (const auto& [name, value] : dims) {
    if (value == 0) throw std::invalid_argument(std::string(name) + " must be positive");
  }
  if (char_dim % 2) throw std::invalid_argument("char_dim must be even (forward + backward halves)");
  if (use_contextual && contextual_dim == 0) throw std::invalid_argument("use_contextual needs contextual_dim > 0");
  if (!(dropout >= 0.0 && dropout < 1.0)) throw std::invalid_argument("dropout must lie in [0, 1)");
  if (!(lr > 0.0)) throw std::invalid_argument("lr must be positive");
  if (!(beta1 >= 0.0 && beta1 < 1.0) || !(beta2 >= 0.0 && beta2 < 1.0)) {
    throw std::invalid_argument("beta1 and beta2 must lie in [0, 1)");
  }
  if (!(eps > 0.0)) throw std::invalid_argument("eps must be positive");
  if (!(lr_decay > 0.0 && lr_decay <= 1.0)) throw std::invalid_argument("lr_decay must lie in (0, 1]");
  if (epochs < 1) throw std::invalid_argument("epochs must be at least 1");
  if (patience < 1) throw std::invalid_argument("patience must be at least 1");
  if (!(nil_threshold >= 0.0 && nil_threshold <= 1.0)) throw std::invalid_argument("nil_threshold must lie in [0, 1]");
}

std::map<std::string, std::string> Config::to_map() const {
  auto b = [](bool x) { return std::string(x ? "true" : "false"); };
  auto z = [](std::size_t x) { return std::to_string(x); };
  return {
      {"word_dim", z(word_dim)},
      {"char_emb_dim", z(char_emb_dim)},
      {"char_dim", z(char_dim)},
      {"contextual_dim", z(contextual_dim)},
      {"entity_dim", z(entity_dim)},
      {"sent_hidden", z(sent_hidden)},
      {"stack_hidden", z(stack_hidden)},
      {"token_dim", z(token_dim)},
      {"action_dim", z(action_dim)},
      {"type_dim", z(type_dim)},
      {"attention_dim", z(attention_dim)},
      {"el_hidden", z(el_hidden)},
      {"nil_hidden", z(nil_hidden)},
      {"dropout", format_double(dropout)},
      {"lr", format_double(lr)},
      {"beta1", format_double(beta1)},
      {"beta2", format_double(beta2)},
      {"eps", format_double(eps)},
      {"lr_decay", format_double(lr_decay)},
      {"clip_norm", format_double(clip_norm)},
      {"epochs", std::to_string(epochs)},
      {"patience", std::to_string(patience)},
      {"seed", std::to_string(seed)},
      {"use_sent_rep", b(use_sent_rep)},
      {"use_ment_rep", b(use_ment_rep)},
      {"use_nil", b(use_nil)},
      {"use_contextual", b(use_contextual)},
      {"mode", to_string(mode)},
      {"candidate_top_k", z(candidate_top_k)},
      {"nil_threshold", format_double(nil_threshold)},
      {"types", join(types)},
      {"candidates", candidates},
      {"word_emb", word_emb},
      {"entity_emb", entity_emb},
  };
}

std::string Config::to_text() const {
  std::string out;
  for (const auto& [k, v] : to_map()) out += k + " = " + v + "\n";
  return out;
}

Config parse_config(std::istream& in) {
  Config c;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw FormatError("expected 'key = value'", line_no);
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    auto it = setters().find(key);
    if (it == setters().end()) throw FormatError("unknown config key '" + key + "'", line_no);
    try {
      it->second(c, value);
    } catch (const std::invalid_argument& e) {
      throw FormatError(key + ": " + e.what(), line_no);
    }
  }
  c.validate();
  return c;
}

Config parse_config_text(const std::string& text) {
  std::istringstream in(text);
  return parse_config(in);
}

Config load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open config '" + path + "'", 0);
  return parse_config(in);
}

}  // namespace jnel
