#include "jnel/eval.hpp"

#include <algorithm>
#include <cstdio>
#include <set>
#include <sstream>
#include <stdexcept>
#include <tuple>

namespace jnel {
namespace {

using NerKey = std::tuple<int, int, int, std::string>;
using ElKey = std::tuple<int, int, int, std::string>;

void check_aligned(const DocAnnotations& pred, const DocAnnotations& gold) {
  if (pred.size() != gold.size()) {
    throw std::invalid_argument("prediction covers " + std::to_string(pred.size()) + " documents, gold " +
                                std::to_string(gold.size()));
  }
}

template <typename Key>
void count(const std::multiset<Key>& pred, const std::multiset<Key>& gold, std::size_t& tp, std::size_t& fp,
           std::size_t& fn) {
  std::multiset<Key> remaining = gold;
  for (const Key& k : pred) {
    auto it = remaining.find(k);
    if (it != remaining.end()) {
      ++tp;
      remaining.erase(it);
    } else {
      ++fp;
    }
  }
  fn += remaining.size();
}

std::multiset<ElKey> el_keys(const std::vector<Annotation>& anns) {
  std::multiset<ElKey> out;
  for (const Annotation& a : anns) {
    if (a.entity) out.emplace(a.sentence, a.span.start, a.span.end, *a.entity);
  }
  return out;
}

std::string fixed(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", x);
  return buf;
}

}  // namespace

PRF PRF::from_counts(std::size_t tp, std::size_t fp, std::size_t fn) {
  PRF r;
  r.tp = tp;
  r.fp = fp;
  r.fn = fn;
  r.precision = tp + fp ? static_cast<double>(tp) / static_cast<double>(tp + fp) : 0.0;
  r.recall = tp + fn ? static_cast<double>(tp) / static_cast<double>(tp + fn) : 0.0;
  r.f1 = r.precision + r.recall > 0.0 ? 2.0 * r.precision * r.recall / (r.precision + r.recall) : 0.0;
  return r;
}

PRF ner_f1(const DocAnnotations& pred, const DocAnnotations& gold) {
  check_aligned(pred, gold);
  std::size_t tp = 0, fp = 0, fn = 0;
  for (std::size_t d = 0; d < gold.size(); ++d) {
    std::multiset<NerKey> p, g;
    for (const Annotation& a : pred[d]) p.emplace(a.sentence, a.span.start, a.span.end, a.span.type);
    for (const Annotation& a : gold[d]) g.emplace(a.sentence, a.span.start, a.span.end, a.span.type);
    count(p, g, tp, fp, fn);
  }
  return PRF::from_counts(tp, fp, fn);
}

ElScores el_strong_f1(const DocAnnotations& pred, const DocAnnotations& gold) {
  check_aligned(pred, gold);
  std::size_t tp = 0, fp = 0, fn = 0;
  double p_sum = 0.0, r_sum = 0.0, f_sum = 0.0;
  for (std::size_t d = 0; d < gold.size(); ++d) {
    const auto p = el_keys(pred[d]);
    const auto g = el_keys(gold[d]);
    std::size_t dtp = 0, dfp = 0, dfn = 0;
    count(p, g, dtp, dfp, dfn);
    tp += dtp;
    fp += dfp;
    fn += dfn;
    if (g.empty()) {
      const double score = p.empty() ? 1.0 : 0.0;
      p_sum += score;
      r_sum += score;
      f_sum += score;
    } else {
      const PRF doc = PRF::from_counts(dtp, dfp, dfn);
      p_sum += doc.precision;
      r_sum += doc.recall;
      f_sum += doc.f1;
    }
  }
  ElScores out;
  out.micro = PRF::from_counts(tp, fp, fn);
  out.macro.tp = tp;
  out.macro.fp = fp;
  out.macro.fn = fn;
  if (!gold.empty()) {
    const double n = static_cast<double>(gold.size());
    out.macro.precision = p_sum / n;
    out.macro.recall = r_sum / n;
    out.macro.f1 = f_sum / n;
  }
  return out;
}

double EvalReport::candidate_recall() const {
  return linkable_mentions ? static_cast<double>(gold_in_candidates) / static_cast<double>(linkable_mentions) : 0.0;
}

std::string format_report(const EvalReport& r) {
  std::ostringstream out;
  for (const auto& [k, v] : r.header) out << "# " << k << " = " << v << '\n';
  out << "metric          precision  recall     f1         tp     fp     fn\n";
  auto line = [&](const char* name, const PRF& p) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "%-15s %-10s %-10s %-10s %-6zu %-6zu %zu\n", name, fixed(p.precision).c_str(),
                  fixed(p.recall).c_str(), fixed(p.f1).c_str(), p.tp, p.fp, p.fn);
    out << buf;
  };
  line("ner", r.ner);
  line("el_micro", r.el.micro);
  line("el_macro", r.el.macro);
  out << "candidate recall: " << fixed(r.candidate_recall()) << " (" << r.gold_in_candidates << "/"
      << r.linkable_mentions << ")\n";
  char buf[64];
  auto kv = [&](const char* key, double v) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    out << key << '=' << buf << '\n';
  };
  kv("ner_precision", r.ner.precision);
  kv("ner_recall", r.ner.recall);
  kv("ner_f1", r.ner.f1);
  kv("el_micro_precision", r.el.micro.precision);
  kv("el_micro_recall", r.el.micro.recall);
  kv("el_micro_f1", r.el.micro.f1);
  kv("el_macro_precision", r.el.macro.precision);
  kv("el_macro_recall", r.el.macro.recall);
  kv("el_macro_f1", r.el.macro.f1);
  kv("candidate_recall", r.candidate_recall());
  return out.str();
}

}  // namespace jnel
