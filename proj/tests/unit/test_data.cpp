#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "jnel/data.hpp"
#include "test_support.hpp"

using namespace jnel;

namespace {

std::vector<Document> parse(const std::string& text) {
  std::istringstream in(text);
  return parse_corpus(in);
}

}  // namespace

TEST(Corpus, SingleMentionFixture) {
  const auto docs = parse("-DOCSTART- (d1)\n\nObama\tB-PER\tBarack_Obama\nspoke\tO\t—\n\n");
  ASSERT_EQ(docs.size(), 1u);
  EXPECT_EQ(docs[0].id, "d1");
  ASSERT_EQ(docs[0].gold.size(), 1u);
  const Annotation& a = docs[0].gold[0];
  EXPECT_EQ(a.span, (Span{0, 1, "PER"}));
  EXPECT_EQ(a.entity, "Barack_Obama");
}

TEST(Corpus, NoMentionsAndNilMentions) {
  const auto docs = parse("a\tO\t—\nb\tO\n\nLeeds\tB-LOC\t--NME--\n\n");
  ASSERT_EQ(docs.size(), 1u);
  EXPECT_EQ(docs[0].sentences.size(), 2u);
  EXPECT_TRUE(docs[0].spans_in(0).empty());
  ASSERT_EQ(docs[0].gold.size(), 1u);
  EXPECT_FALSE(docs[0].gold[0].linked());
}

TEST(Corpus, TwoMentionSentenceRoundTripsThroughOracle) {
  const auto docs = parse("Obama\tB-PER\tBarack_Obama\nmet\tO\t—\nDonald\tB-PER\tDonald_Trump\n"
                          "Trump\tI-PER\tDonald_Trump\n\n");
  const TypeInventory types = collect_types(docs);
  const auto spans = docs[0].spans_in(0);
  EXPECT_EQ(spans, (std::vector<Span>{{0, 1, "PER"}, {2, 4, "PER"}}));
  EXPECT_EQ(decode_spans(oracle_actions(4, spans, types), 4, types), spans);
}

TEST(Corpus, AdjacentMentionsAndLenientInside) {
  const auto docs = parse("A\tB-PER\tE1\nB\tB-PER\tE2\nC\tI-LOC\tE3\n\n");
  const auto spans = docs[0].spans_in(0);
  EXPECT_EQ(spans, (std::vector<Span>{{0, 1, "PER"}, {1, 2, "PER"}, {2, 3, "LOC"}}));
}

TEST(Corpus, MalformedInputReportsLine) {
  try {
    parse("ok\tO\t—\nbad\tX-PER\tE\n");
    FAIL();
  } catch (const FormatError& e) {
    EXPECT_EQ(e.line(), 2u);
    EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos);
  }
  EXPECT_THROW(parse("tok\n"), FormatError);
  EXPECT_THROW(parse("tok\tO\tE1\n"), FormatError);
  EXPECT_THROW(parse("A\tB-PER\tE1\nB\tI-PER\tE2\n"), FormatError);
}

TEST(Corpus, WriteThenParseIsIdentity) {
  Rng rng(3);
  const TypeInventory types({"LOC", "PER"});
  std::vector<Document> docs;
  for (int i = 0; i < 20; ++i) docs.push_back(jnel::testing::random_document(rng, types, "d" + std::to_string(i)));
  std::ostringstream out;
  write_corpus(out, docs);
  const auto back = parse(out.str());
  ASSERT_EQ(back.size(), docs.size());
  for (std::size_t i = 0; i < docs.size(); ++i) {
    EXPECT_EQ(back[i].id, docs[i].id);
    EXPECT_EQ(back[i].sentences, docs[i].sentences);
    auto a = back[i].gold, b = docs[i].gold;
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    EXPECT_EQ(a, b);
  }
  std::ostringstream again;
  write_corpus(again, back);
  EXPECT_EQ(again.str(), out.str());
}

TEST(Corpus, SyntheticCorpusShape) {
  const auto docs = load_corpus(jnel::testing::source_path("data/synthetic/corpus.tsv"));
  std::size_t sentences = 0;
  std::set<std::string> entities;
  for (const auto& d : docs) {
    sentences += d.sentences.size();
    for (const auto& a : d.gold) entities.insert(*a.entity);
  }
  EXPECT_EQ(sentences, 20u);
  EXPECT_EQ(collect_types(docs).size(), 3u);
  EXPECT_EQ(entities.size(), 10u);

  const auto dict = load_candidates(jnel::testing::source_path("data/synthetic/candidates.tsv"));
  for (const auto& d : docs) {
    for (const auto& a : d.gold) {
      const auto cands = compute_priors(dict, jnel::testing::mention_key(d, a));
      ASSERT_EQ(cands.size(), 3u);
      EXPECT_TRUE(std::any_of(cands.begin(), cands.end(), [&](const auto& c) { return c.entity_id == *a.entity; }));
    }
  }
}

TEST(Normalize, Examples) {
  EXPECT_EQ(normalize_mention(std::vector<std::string>{"Leeds"}), "leeds");
  EXPECT_EQ(normalize_mention(std::vector<std::string>{"Donald", "Trump"}), "donald trump");
  EXPECT_EQ(normalize_mention("LEEDS"), normalize_mention("Leeds"));
  EXPECT_EQ(normalize_mention("  New   York "), "new york");
}

TEST(Priors, NormalizationUnknownAndTruncation) {
  std::istringstream in("Leeds\tA\t80\nleeds\tB\t20\n");
  const auto dict = parse_candidates(in);
  const auto p = compute_priors(dict, "LEEDS");
  ASSERT_EQ(p.size(), 2u);
  EXPECT_EQ(p[0].entity_id, "A");
  EXPECT_DOUBLE_EQ(p[0].prior, 0.8);
  EXPECT_DOUBLE_EQ(p[1].prior, 0.2);
  EXPECT_TRUE(compute_priors(dict, "york").empty());

  CandidateDictionary big;
  for (int i = 0; i < 40; ++i) big.add("m", "E" + std::to_string(100 + i), 1.0 + i);
  const auto top = compute_priors(big, "m", 30);
  ASSERT_EQ(top.size(), 30u);
  EXPECT_EQ(top.front().entity_id, "E139");
  EXPECT_EQ(top.back().entity_id, "E110");
}

TEST(Priors, TiesBrokenByEntityId) {
  CandidateDictionary d;
  d.add("x", "Zed", 1.0);
  d.add("x", "Alpha", 1.0);
  d.add("x", "Mid", 1.0);
  const auto p = compute_priors(d, "x");
  EXPECT_EQ(p[0].entity_id, "Alpha");
  EXPECT_EQ(p[2].entity_id, "Zed");
  std::istringstream bad("x\tE\tzero\n");
  EXPECT_THROW(parse_candidates(bad), FormatError);
}

TEST(Embeddings, LookupFallbackAndDuplicates) {
  std::istringstream in("e1 0.5 0.5 0\ne2 1 2 3\ne1 3 0 4\n");
  const auto t = parse_embeddings(in, 3, Fallback::kUnitNorm, "entity");
  EXPECT_EQ(t.size(), 2u);
  EXPECT_EQ(t.lookup("e2"), (std::vector<double>{1, 2, 3}));
  EXPECT_EQ(t.lookup("e1"), (std::vector<double>{3, 0, 4}));
  ASSERT_EQ(t.warnings().size(), 1u);
  EXPECT_NE(t.warnings()[0].find("line 3"), std::string::npos);

  const auto miss = t.lookup("unknown");
  EXPECT_EQ(miss, t.lookup("unknown"));
  EXPECT_EQ(miss, empty_entity_embeddings(3).lookup("unknown"));
  double norm = 0.0;
  for (double x : miss) norm += x * x;
  EXPECT_NEAR(norm, 1.0, 1e-12);
  EXPECT_NE(miss, t.lookup("unknown2"));

  std::istringstream short_row("e1 1 2\n");
  EXPECT_THROW(parse_embeddings(short_row, 3, Fallback::kUniform), FormatError);
}

TEST(Contextual, AttachChecksTokenCount) {
  auto docs = parse("a\tO\nb\tO\n\nc\tO\n\n");
  const auto dir = jnel::testing::scratch_dir("data_contextual");
  {
    std::ofstream f(dir / "ctx.txt");
    f << "1 2\n3 4\n5 6\n";
  }
  const auto rows = load_contextual_rows((dir / "ctx.txt").string(), 2);
  attach_contextual(docs, rows);
  EXPECT_EQ(docs[0].contextual[1][0], (std::vector<double>{5, 6}));
  std::vector<std::vector<double>> fewer(rows.begin(), rows.begin() + 2);
  EXPECT_THROW(attach_contextual(docs, fewer), FormatError);
  EXPECT_THROW(load_contextual_rows((dir / "ctx.txt").string(), 3), FormatError);
}
