#include <gtest/gtest.h>

#include "jnel/encoder.hpp"
#include "test_support.hpp"

using namespace jnel;
using jnel::testing::projected_grad_error;
using jnel::testing::random_param;

namespace {

std::vector<double> values(Graph& g, Var v) {
  auto s = g.value(v);
  return {s.begin(), s.end()};
}

std::vector<Var> random_inputs(Graph& g, std::size_t n, std::size_t dim, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<Var> xs;
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> v(dim);
    for (double& x : v) x = rng.uniform(-1.0, 1.0);
    xs.push_back(g.constant(v));
  }
  return xs;
}

}  // namespace

TEST(TokenEmbedder, KnownWordsOovAndCharShape) {
  ParameterSet ps;
  const TokenEmbedder emb(ps, "embed", 3, 25, 50, 0, 1);
  EXPECT_EQ(emb.output_dim(), 53u);
  std::istringstream in("Leeds 1 2 3\n");
  const EmbeddingTable words = parse_embeddings(in, 3, Fallback::kUniform, "word");
  Graph g;
  const std::vector<std::string> toks = {"Leeds", "x", "zzz"};
  const auto out = embed_tokens(g, emb, toks, words);
  EXPECT_EQ(values(g, out[0].word), (std::vector<double>{1, 2, 3}));
  EXPECT_EQ(values(g, out[2].word), words.lookup("zzz"));
  EXPECT_EQ(values(g, out[2].word), words.lookup("zzz"));
  EXPECT_EQ(g.size(out[1].chars), 50u);
  EXPECT_EQ(g.size(out[1].full), 53u);
}

TEST(TokenEmbedder, ContextualVectorsAreAppended) {
  ParameterSet ps;
  const TokenEmbedder emb(ps, "embed", 2, 4, 4, 3, 1);
  const EmbeddingTable words = empty_word_embeddings(2);
  Graph g;
  const std::vector<std::string> toks = {"a", "b"};
  const std::vector<std::vector<double>> ctx = {{1, 2, 3}, {4, 5, 6}};
  const auto out = embed_tokens(g, emb, toks, words, &ctx);
  const auto full = values(g, out[1].full);
  EXPECT_EQ(std::vector<double>(full.end() - 3, full.end()), (std::vector<double>{4, 5, 6}));
  EXPECT_THROW(embed_tokens(g, emb, toks, words), std::invalid_argument);
  const std::vector<std::vector<double>> short_ctx = {{1, 2, 3}};
  EXPECT_THROW(embed_tokens(g, emb, toks, words, &short_ctx), FormatError);
}

TEST(SentenceEncoder, ShapesAndOrderSensitivity) {
  ParameterSet ps;
  const auto enc = SentenceEncoder::create(ps, "s", 3, 4, true, 2);
  Graph g;
  auto xs = random_inputs(g, 5, 3, 1);
  const auto a = encode_sentence(g, enc, xs);
  EXPECT_EQ(a.h1.size(), 5u);
  EXPECT_EQ(a.h2.size(), 5u);
  EXPECT_EQ(g.size(a.h1[0]), 8u);
  std::swap(xs[1], xs[2]);
  const auto b = encode_sentence(g, enc, xs);
  EXPECT_NE(values(g, a.h1[0]), values(g, b.h1[0]));
  EXPECT_THROW(encode_sentence(g, enc, std::vector<Var>{}), std::invalid_argument);
}

TEST(SentenceEncoder, GradientThroughBothLayers) {
  ParameterSet ps;
  const auto enc = SentenceEncoder::create(ps, "s", 2, 3, true, 3);
  ad::Parameter& x = random_param(ps, "x", {3, 2}, 4);
  auto build = [&](Graph& g) {
    const Var t = g.param(x);
    const std::vector<Var> xs = {ad::row(g, t, 0), ad::row(g, t, 1), ad::row(g, t, 2)};
    const auto e = encode_sentence(g, enc, xs);
    std::vector<Var> all = e.h1;
    all.insert(all.end(), e.h2.begin(), e.h2.end());
    return ad::concat(g, all);
  };
  EXPECT_LT(projected_grad_error(ps, build), 1e-4);
}

TEST(StackSummary, Examples) {
  ParameterSet ps;
  const auto enc = SentenceEncoder::create(ps, "s", 3, 2, false, 5);
  Graph g;
  const auto e = encode_sentence(g, enc, random_inputs(g, 4, 3, 6));
  const std::vector<int> three = {3};
  EXPECT_EQ(values(g, stack_summary(g, e, three)), values(g, e.h1[3]));
  for (double v : values(g, stack_summary(g, e, std::vector<int>{}))) EXPECT_EQ(v, 0.0);
  const auto avg = values(g, stack_summary(g, e, std::vector<int>{0, 1}));
  const auto h0 = values(g, e.h1[0]), h1 = values(g, e.h1[1]);
  for (std::size_t i = 0; i < avg.size(); ++i) EXPECT_NEAR(avg[i], (h0[i] + h1[i]) / 2, 1e-15);
}

TEST(SentenceRep, SingletonAndUniformCases) {
  ParameterSet ps;
  const auto att = AttentionParams::create(ps, "att", 4, 3, 7);
  Graph g;
  SentenceEncoding one;
  one.h1 = random_inputs(g, 1, 4, 8);
  const Var q = g.constant({0.1, 0.2, 0.3, 0.4});
  const SentenceRep r1 = sentence_rep(g, one, q, att);
  EXPECT_EQ(values(g, r1.alpha), (std::vector<double>{1.0}));
  EXPECT_EQ(values(g, r1.v), values(g, one.h1[0]));

  SentenceEncoding same;
  same.h1 = std::vector<Var>(5, one.h1[0]);
  for (double a : values(g, sentence_rep(g, same, q, att).alpha)) EXPECT_NEAR(a, 0.2, 1e-15);
}

TEST(SentenceRep, WeightedSumAndQueryShiftInvariance) {
  ParameterSet ps;
  const auto att = AttentionParams::create(ps, "att", 3, 5, 9);
  Graph g;
  SentenceEncoding e;
  e.h1 = random_inputs(g, 4, 3, 10);
  const SentenceRep r = sentence_rep(g, e, g.constant({0.5, -0.5, 1.0}), att);
  const auto alpha = values(g, r.alpha);
  double total = 0.0;
  for (double a : alpha) {
    EXPECT_GE(a, 0.0);
    total += a;
  }
  EXPECT_NEAR(total, 1.0, 1e-9);
  std::vector<double> expect(3, 0.0);
  for (std::size_t w = 0; w < 4; ++w) {
    const auto h = values(g, e.h1[w]);
    for (std::size_t k = 0; k < 3; ++k) expect[k] += alpha[w] * h[k];
  }
  const auto v = values(g, r.v);
  for (std::size_t k = 0; k < 3; ++k) EXPECT_NEAR(v[k], expect[k], 1e-15);

  // the query term adds the same score to every position
  const SentenceRep other = sentence_rep(g, e, g.constant({9.0, 2.0, -4.0}), att);
  const auto alpha2 = values(g, other.alpha);
  for (std::size_t w = 0; w < 4; ++w) EXPECT_NEAR(alpha[w], alpha2[w], 1e-12);
}

TEST(MentionRep, Examples) {
  ParameterSet ps;
  const auto enc = SentenceEncoder::create(ps, "s", 3, 2, true, 11);
  Graph g;
  auto e = encode_sentence(g, enc, random_inputs(g, 4, 3, 12));
  EXPECT_EQ(values(g, mention_rep(g, e, std::vector<int>{2})), values(g, e.h2[2]));
  const auto m = values(g, mention_rep(g, e, std::vector<int>{0, 1, 3}));
  for (std::size_t k = 0; k < m.size(); ++k) {
    const double direct = (values(g, e.h2[0])[k] + values(g, e.h2[1])[k] + values(g, e.h2[3])[k]) / 3;
    EXPECT_NEAR(m[k], direct, 1e-15);
  }
  e.h2[1] = e.h2[0];
  EXPECT_EQ(values(g, mention_rep(g, e, std::vector<int>{0, 1})), values(g, e.h2[0]));
  EXPECT_THROW(mention_rep(g, e, std::vector<int>{}), std::invalid_argument);
}
