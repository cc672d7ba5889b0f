#include "jnel/data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "jnel/rng.hpp"

namespace jnel {
namespace {

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = s.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(s.substr(start));
      return out;
    }
    out.push_back(s.substr(start, pos - start));
    start = pos + 1;
  }
}

std::vector<std::string_view> split_ws(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
    std::size_t j = i;
    while (j < s.size() && s[j] != ' ' && s[j] != '\t') ++j;
    if (j > i) out.push_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

void chomp(std::string& line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
}

bool parse_double(std::string_view s, double& out) {
  const char* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, out);
  return ec == std::errc() && ptr == end && std::isfinite(out);
}

std::ifstream open(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open '" + path + "'", 0);
  return in;
}

bool is_no_entity(std::string_view s) { return s == kNoEntity || s == "-" || s.empty(); }
bool is_nil(std::string_view s) { return s == kNilEntity || s == "NIL"; }

struct OpenMention {
  int start = -1;
  std::string type;
  std::optional<std::string> entity;
};

}  // namespace

// ---- Document -------------------------------------------------------------

std::vector<Span> Document::spans_in(int sentence) const {
  std::vector<Span> out;
  for (const Annotation& a : gold) {
    if (a.sentence == sentence) out.push_back(a.span);
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::size_t Document::token_count() const {
  std::size_t n = 0;
  for (const auto& s : sentences) n += s.size();
  return n;
}

const Annotation* Document::find(int sentence, int start, int end) const {
  for (const Annotation& a : gold) {
    if (a.sentence == sentence && a.span.start == start && a.span.end == end) return &a;
  }
  return nullptr;
}

void validate_document(const Document& doc) {
  for (const Annotation& a : doc.gold) {
    if (a.sentence < 0 || static_cast<std::size_t>(a.sentence) >= doc.sentences.size()) {
      throw FormatError("document " + doc.id + ": annotation references missing sentence " +
                            std::to_string(a.sentence), 0);
    }
    const int n = static_cast<int>(doc.sentences[static_cast<std::size_t>(a.sentence)].size());
    if (a.span.start < 0 || a.span.end > n || a.span.start >= a.span.end) {
      throw FormatError("document " + doc.id + ": span out of bounds in sentence " + std::to_string(a.sentence), 0);
    }
    if (a.entity && a.entity->empty()) throw FormatError("document " + doc.id + ": empty entity id", 0);
  }
  for (std::size_t s = 0; s < doc.sentences.size(); ++s) {
    const auto spans = doc.spans_in(static_cast<int>(s));
    for (std::size_t i = 1; i < spans.size(); ++i) {
      if (spans[i].start < spans[i - 1].end) {
        throw FormatError("document " + doc.id + ": overlapping spans in sentence " + std::to_string(s), 0);
      }
    }
  }
}

// ---- corpus ---------------------------------------------------------------

std::vector<Document> parse_corpus(std::istream& in) {
  std::vector<Document> docs;
  std::vector<std::string> sentence;
  std::vector<Annotation> pending;
  OpenMention open;
  std::string line;
  std::size_t line_no = 0;

  auto current = [&]() -> Document& {
    if (docs.empty()) docs.push_back(Document{"doc0", {}, {}, {}});
    return docs.back();
  };
  auto close_mention = [&]() {
    if (open.start < 0) return;
    pending.push_back({0, {open.start, static_cast<int>(sentence.size()), open.type}, open.entity});
    open = {};
  };
  auto close_sentence = [&]() {
    close_mention();
    if (sentence.empty()) return;
    Document& doc = current();
    const int index = static_cast<int>(doc.sentences.size());
    for (Annotation& a : pending) {
      a.sentence = index;
      doc.gold.push_back(std::move(a));
    }
    doc.sentences.push_back(std::move(sentence));
    sentence.clear();
    pending.clear();
  };

  while (std::getline(in, line)) {
    ++line_no;
    chomp(line);
    if (line.empty() || line.find_first_not_of(" \t") == std::string::npos) {
      close_sentence();
      continue;
    }
    if (line.rfind("-DOCSTART-", 0) == 0) {
      close_sentence();
      std::string id = "doc" + std::to_string(docs.size());
      const auto lp = line.find('(');
      const auto rp = line.rfind(')');
      if (lp != std::string::npos && rp != std::string::npos && rp > lp + 1) id = line.substr(lp + 1, rp - lp - 1);
      docs.push_back(Document{std::move(id), {}, {}, {}});
      continue;
    }
    const auto fields = split(line, '\t');
    if (fields.size() < 2 || fields.size() > 3) {
      throw FormatError("expected 'token<TAB>tag<TAB>entity', got " + std::to_string(fields.size()) + " fields",
                        line_no);
    }
    if (fields[0].empty()) throw FormatError("empty token", line_no);
    const std::string_view tag = fields[1];
    const std::string_view entity = fields.size() == 3 ? fields[2] : std::string_view{};
    const int position = static_cast<int>(sentence.size());
    if (tag == "O") {
      if (!is_no_entity(entity)) throw FormatError("entity id on a non-entity token", line_no);
      close_mention();
    } else if (tag.size() > 2 && (tag[0] == 'B' || tag[0] == 'I') && tag[1] == '-') {
      const std::string type(tag.substr(2));
      std::optional<std::string> ent;
      if (!is_no_entity(entity) && !is_nil(entity)) ent = std::string(entity);
      const bool continues = tag[0] == 'I' && open.start >= 0 && open.type == type;
      if (continues) {
        if (ent != open.entity) throw FormatError("entity id changes inside a mention", line_no);
      } else {
        close_mention();
        open = {position, type, ent};
      }
    } else {
      throw FormatError("malformed BIO tag '" + std::string(tag) + "'", line_no);
    }
    sentence.emplace_back(fields[0]);
  }
  close_sentence();
  for (const Document& d : docs) validate_document(d);
  return docs;
}

std::vector<Document> load_corpus(const std::string& path) {
  auto in = open(path);
  return parse_corpus(in);
}

void write_corpus(std::ostream& out, const std::vector<Document>& docs) {
  for (const Document& doc : docs) {
    out << "-DOCSTART- (" << doc.id << ")\n\n";
    for (std::size_t s = 0; s < doc.sentences.size(); ++s) {
      const auto& tokens = doc.sentences[s];
      std::vector<std::string> tags(tokens.size(), "O");
      std::vector<std::string> ents(tokens.size(), std::string(kNoEntity));
      for (const Annotation& a : doc.gold) {
        if (a.sentence != static_cast<int>(s)) continue;
        for (int t = a.span.start; t < a.span.end; ++t) {
          tags[static_cast<std::size_t>(t)] = (t == a.span.start ? "B-" : "I-") + a.span.type;
          ents[static_cast<std::size_t>(t)] = a.entity ? *a.entity : std::string(kNilEntity);
        }
      }
      for (std::size_t t = 0; t < tokens.size(); ++t) out << tokens[t] << '\t' << tags[t] << '\t' << ents[t] << '\n';
      out << '\n';
    }
  }
}

TypeInventory collect_types(const std::vector<Document>& docs) {
  std::vector<std::string> names;
  for (const Document& d : docs) {
    for (const Annotation& a : d.gold) names.push_back(a.span.type);
  }
  return TypeInventory(std::move(names));
}

// ---- candidates -----------------------------------------------------------

std::string normalize_mention(std::span<const std::string> tokens) {
  std::string out;
  for (const std::string& t : tokens) {
    for (std::string_view piece : split_ws(t)) {
      if (!out.empty()) out.push_back(' ');
      out.append(piece);
    }
  }
  for (char& c : out) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return out;
}

std::string normalize_mention(std::string_view text) {
  const std::string single(text);
  return normalize_mention(std::span<const std::string>(&single, 1));
}

void CandidateDictionary::add(std::string_view mention, const std::string& entity_id, double count) {
  if (!(count > 0.0)) throw std::invalid_argument("candidate count must be positive");
  if (entity_id.empty()) throw std::invalid_argument("empty candidate entity id");
  entries_[normalize_mention(mention)][entity_id] += count;
}

const std::map<std::string, double>* CandidateDictionary::find(const std::string& key) const {
  auto it = entries_.find(key);
  return it == entries_.end() ? nullptr : &it->second;
}

CandidateDictionary parse_candidates(std::istream& in) {
  CandidateDictionary dict;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    chomp(line);
    if (line.empty() || line[0] == '#') continue;
    const auto fields = split(line, '\t');
    if (fields.size() != 3) throw FormatError("expected 'mention<TAB>entity<TAB>count'", line_no);
    double count = 0.0;
    if (!parse_double(fields[2], count) || count <= 0.0) {
      throw FormatError("count must be a positive number, got '" + std::string(fields[2]) + "'", line_no);
    }
    if (fields[0].empty() || fields[1].empty()) throw FormatError("empty mention or entity id", line_no);
    dict.add(fields[0], std::string(fields[1]), count);
  }
  return dict;
}

CandidateDictionary load_candidates(const std::string& path) {
  auto in = open(path);
  return parse_candidates(in);
}

std::vector<CandidateStub> compute_priors(const CandidateDictionary& dict, std::string_view mention,
                                          std::size_t top_k) {
  const auto* entries = dict.find(normalize_mention(mention));
  if (!entries || entries->empty()) return {};
  double total = 0.0;
  for (const auto& [id, count] : *entries) total += count;
  std::vector<CandidateStub> out;
  out.reserve(entries->size());
  for (const auto& [id, count] : *entries) out.push_back({id, count / total});
  std::stable_sort(out.begin(), out.end(),
                   [](const CandidateStub& a, const CandidateStub& b) { return a.prior > b.prior; });
  if (out.size() > top_k) out.resize(top_k);
  return out;
}

// ---- embeddings -----------------------------------------------------------

EmbeddingTable::EmbeddingTable(std::size_t dim, Fallback fallback, std::string salt)
    : dim_(dim), fallback_(fallback), salt_(std::move(salt)) {
  if (dim == 0) throw std::invalid_argument("embedding dimension must be positive");
}

bool EmbeddingTable::contains(std::string_view key) const { return table_.count(std::string(key)) > 0; }

std::vector<double> EmbeddingTable::lookup(std::string_view key) const {
  auto it = table_.find(std::string(key));
  if (it != table_.end()) return it->second;
  return fallback(key);
}

std::vector<double> EmbeddingTable::fallback(std::string_view key) const {
  Rng rng(fnv1a(key, fnv1a(salt_)));
  std::vector<double> v(dim_);
  for (double& x : v) x = rng.uniform(-1.0, 1.0);
  if (fallback_ == Fallback::kUnitNorm) {
    double norm = 0.0;
    for (double x : v) norm += x * x;
    norm = std::sqrt(norm);
    for (double& x : v) x /= norm;
  }
  return v;
}

void EmbeddingTable::insert(const std::string& key, std::vector<double> values, std::size_t line) {
  if (values.size() != dim_) {
    throw FormatError("embedding for '" + key + "' has " + std::to_string(values.size()) + " values, expected " +
                          std::to_string(dim_), line);
  }
  auto [it, inserted] = table_.try_emplace(key, std::move(values));
  if (!inserted) {
    it->second = std::move(values);
    warnings_.push_back((line ? "line " + std::to_string(line) + ": " : std::string()) + "duplicate key '" + key +
                        "', keeping the last occurrence");
  }
}

EmbeddingTable parse_embeddings(std::istream& in, std::size_t dim, Fallback fallback, std::string salt) {
  EmbeddingTable table(dim, fallback, std::move(salt));
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    chomp(line);
    const auto fields = split_ws(line);
    if (fields.empty()) continue;
    if (fields.size() - 1 != dim) {
      throw FormatError("expected " + std::to_string(dim) + " values, got " + std::to_string(fields.size() - 1),
                        line_no);
    }
    std::vector<double> values(dim);
    for (std::size_t i = 0; i < dim; ++i) {
      if (!parse_double(fields[i + 1], values[i])) {
        throw FormatError("bad number '" + std::string(fields[i + 1]) + "'", line_no);
      }
    }
    table.insert(std::string(fields[0]), std::move(values), line_no);
  }
  return table;
}

EmbeddingTable load_word_embeddings(const std::string& path, std::size_t dim) {
  auto in = open(path);
  return parse_embeddings(in, dim, Fallback::kUniform, "word");
}

EmbeddingTable load_entity_embeddings(const std::string& path, std::size_t dim) {
  auto in = open(path);
  return parse_embeddings(in, dim, Fallback::kUnitNorm, "entity");
}

EmbeddingTable empty_word_embeddings(std::size_t dim) { return EmbeddingTable(dim, Fallback::kUniform, "word"); }
EmbeddingTable empty_entity_embeddings(std::size_t dim) {
  return EmbeddingTable(dim, Fallback::kUnitNorm, "entity");
}

std::vector<std::vector<double>> load_contextual_rows(const std::string& path, std::size_t dim) {
  auto in = open(path);
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    chomp(line);
    const auto fields = split_ws(line);
    if (fields.empty()) continue;
    if (fields.size() != dim) {
      throw FormatError("expected " + std::to_string(dim) + " values, got " + std::to_string(fields.size()), line_no);
    }
    std::vector<double> row(dim);
    for (std::size_t i = 0; i < dim; ++i) {
      if (!parse_double(fields[i], row[i])) throw FormatError("bad number '" + std::string(fields[i]) + "'", line_no);
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

void attach_contextual(std::vector<Document>& docs, const std::vector<std::vector<double>>& rows) {
  std::size_t total = 0;
  for (const Document& d : docs) total += d.token_count();
  if (total != rows.size()) {
    throw FormatError("contextual file has " + std::to_string(rows.size()) + " vectors but the corpus has " +
                          std::to_string(total) + " tokens", 0);
  }
  std::size_t next = 0;
  for (Document& d : docs) {
    d.contextual.clear();
    for (const auto& sentence : d.sentences) {
      auto& out = d.contextual.emplace_back();
      for (std::size_t t = 0; t < sentence.size(); ++t) out.push_back(rows[next++]);
    }
  }
}

}  // namespace jnel
