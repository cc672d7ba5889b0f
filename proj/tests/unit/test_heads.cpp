#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "jnel/heads.hpp"
#include "test_support.hpp"

using namespace jnel;
using jnel::testing::projected_grad_error;

namespace {

const TypeInventory kTypes({"LOC", "PER"});

std::vector<double> values(ad::Graph& g, ad::Var v) {
  auto s = g.value(v);
  return {s.begin(), s.end()};
}

StepContext random_context(ad::Graph& g, std::size_t dim, std::uint64_t seed) {
  Rng rng(seed);
  auto vec = [&] {
    std::vector<double> v(dim);
    for (double& x : v) x = rng.uniform(-1.0, 1.0);
    return g.constant(v);
  };
  StepContext c;
  c.b = vec();
  c.s = vec();
  c.a = vec();
  c.o = vec();
  return c;
}

std::vector<Candidate> random_candidates(std::size_t n, std::size_t dim, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<Candidate> out;
  for (std::size_t i = 0; i < n; ++i) {
    Candidate c;
    c.entity_id = "E" + std::to_string(i);
    for (std::size_t k = 0; k < dim; ++k) c.embedding.push_back(rng.uniform(-1.0, 1.0));
    c.prior = rng.uniform(0.0, 1.0);
    out.push_back(c);
  }
  return out;
}

void zero(ad::Parameter* p) { std::fill(p->tensor.values.begin(), p->tensor.values.end(), 0.0); }

}  // namespace

TEST(NerHead, ZeroWeightsGiveUniformProbsAndFirstLegalAction) {
  ad::ParameterSet ps;
  const ActionAlphabet alphabet(kTypes);
  const NerHead head = NerHead::create(ps, "ner", 12, alphabet.size(), 1);
  zero(head.w);
  ad::Graph g;
  const StepContext ctx = random_context(g, 3, 2);
  const std::vector<Action> legal = {Action::reduce(1), Action::reduce(0)};
  const ActionScores s = score_actions(g, ctx, std::nullopt, head, legal, alphabet);
  for (double p : values(g, s.probs)) EXPECT_NEAR(p, 0.25, 1e-15);
  EXPECT_EQ(s.chosen, Action::reduce(0));
  EXPECT_THROW(score_actions(g, ctx, std::nullopt, head, std::vector<Action>{}, alphabet), std::invalid_argument);
}

TEST(NerHead, SingleLegalActionIsAlwaysChosen) {
  ad::ParameterSet ps;
  const ActionAlphabet alphabet(kTypes);
  const NerHead head = NerHead::create(ps, "ner", 15, alphabet.size(), 3);
  ad::Graph g;
  const ad::Var v = g.constant({0.1, 0.2, 0.3});
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const std::vector<Action> legal = {Action::out()};
    EXPECT_EQ(score_actions(g, random_context(g, 3, seed), v, head, legal, alphabet).chosen, Action::out());
  }
}

TEST(NerHead, ShiftingLogitsKeepsProbabilities) {
  ad::ParameterSet ps;
  const ActionAlphabet alphabet(kTypes);
  const NerHead head = NerHead::create(ps, "ner", 12, alphabet.size(), 4);
  ad::Graph g;
  const StepContext ctx = random_context(g, 3, 5);
  const std::vector<Action> legal = {Action::shift(), Action::out()};
  const auto a = values(g, score_actions(g, ctx, std::nullopt, head, legal, alphabet).probs);
  for (double& b : head.b->tensor.values) b += 7.5;
  const auto b = values(g, score_actions(g, ctx, std::nullopt, head, legal, alphabet).probs);
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_NEAR(a[i], b[i], 1e-12);
}

TEST(NerHead, BestLegalTieBreaksOnAlphabetIndex) {
  const ActionAlphabet alphabet(kTypes);
  const std::vector<double> logits = {1.0, 3.0, 3.0, 3.0};
  const std::vector<Action> legal = {Action::reduce(1), Action::reduce(0), Action::shift()};
  EXPECT_EQ(best_legal(logits, legal, alphabet), Action::reduce(0));
}

TEST(NerHead, GradientCheck) {
  ad::ParameterSet ps;
  const ActionAlphabet alphabet(kTypes);
  const NerHead head = NerHead::create(ps, "ner", 14, alphabet.size(), 6);
  const std::vector<Action> legal = {Action::shift(), Action::out()};
  auto build = [&](ad::Graph& g) {
    const StepContext ctx = random_context(g, 3, 7);
    return score_actions(g, ctx, g.constant({0.4, -0.2}), head, legal, alphabet).probs;
  };
  EXPECT_LT(projected_grad_error(ps, build), 1e-4);
}

TEST(ElHead, SingleCandidateAndEmptyList) {
  ad::ParameterSet ps;
  const ElHead head = ElHead::create(ps, "el", 3, 2, 0, 2, 6, 1);
  ad::Graph g;
  const auto cands = random_candidates(1, 3, 2);
  const auto s = score_candidates(g, cands, g.constant({1, 2}), std::nullopt, g.constant({0, 1}), head);
  ASSERT_TRUE(s);
  EXPECT_EQ(values(g, s->probs), (std::vector<double>{1.0}));
  EXPECT_EQ(s->chosen, 0u);
  EXPECT_FALSE(score_candidates(g, std::vector<Candidate>{}, g.constant({1, 2}), std::nullopt, g.constant({0, 1}), head));
}

TEST(ElHead, DuplicateCandidatesSplitEvenly) {
  ad::ParameterSet ps;
  const ElHead head = ElHead::create(ps, "el", 3, 0, 2, 2, 6, 3);
  ad::Graph g;
  auto cands = random_candidates(1, 3, 4);
  cands.push_back(cands[0]);
  cands[1].entity_id = "A";
  const auto s = score_candidates(g, cands, std::nullopt, g.constant({1, 2}), g.constant({0, 1}), head);
  for (double p : values(g, s->probs)) EXPECT_NEAR(p, 0.5, 1e-15);
  EXPECT_EQ(s->chosen, 1u);
}

TEST(ElHead, PermutationEquivariant) {
  ad::ParameterSet ps;
  const ElHead head = ElHead::create(ps, "el", 4, 2, 2, 2, 8, 5);
  ad::Graph g;
  const auto cands = random_candidates(5, 4, 6);
  std::vector<Candidate> rev(cands.rbegin(), cands.rend());
  const ad::Var m = g.constant({0.3, 0.1}), v = g.constant({-0.2, 0.9}), a = g.constant({0.5, 0.5});
  const auto p = values(g, score_candidates(g, cands, m, v, a, head)->probs);
  const auto q = values(g, score_candidates(g, rev, m, v, a, head)->probs);
  for (std::size_t i = 0; i < p.size(); ++i) EXPECT_NEAR(p[i], q[p.size() - 1 - i], 1e-15);
}

TEST(ElHead, MatchesFullConcatenationRoute) {
  ad::ParameterSet ps;
  const ElHead head = ElHead::create(ps, "el", 4, 3, 2, 2, 7, 7);
  Rng rng(8);
  for (double& b : head.b1->tensor.values) b = rng.uniform(-0.5, 0.5);
  ad::Graph g;
  const auto cands = random_candidates(4, 4, 9);
  const ad::Var m = g.constant({0.3, 0.1, -1.0}), v = g.constant({-0.2, 0.9}), a = g.constant({0.5, 0.25});
  const auto fast = values(g, score_candidates(g, cands, m, v, a, head)->logits);
  for (std::size_t i = 0; i < cands.size(); ++i) {
    std::vector<double> own = cands[i].embedding;
    own.push_back(cands[i].prior);
    const ad::Var parts[] = {g.constant(own), m, v, a};
    const ad::Var x = ad::concat(g, parts);
    const ad::Var h = ad::tanh(g, ad::affine(g, g.param(*head.w1), x, g.param(*head.b1)));
    const double slow = g.scalar(ad::affine(g, g.param(*head.w2), h, g.param(*head.b2)));
    EXPECT_NEAR(fast[i], slow, 1e-12);
  }
}

TEST(ElHead, LayoutMismatchesAreRejected) {
  ad::ParameterSet ps;
  const ElHead head = ElHead::create(ps, "el", 3, 2, 0, 2, 4, 10);
  ad::Graph g;
  const auto cands = random_candidates(2, 3, 11);
  EXPECT_THROW(score_candidates(g, cands, std::nullopt, std::nullopt, g.constant({0, 1}), head),
               std::invalid_argument);
  EXPECT_THROW(score_candidates(g, cands, g.constant({1, 2, 3}), std::nullopt, g.constant({0, 1}), head),
               ad::DimensionError);
  const auto bad = random_candidates(2, 5, 12);
  EXPECT_THROW(score_candidates(g, bad, g.constant({1, 2}), std::nullopt, g.constant({0, 1}), head),
               ad::DimensionError);
}

TEST(ElHead, GradientCheck) {
  ad::ParameterSet ps;
  const ElHead head = ElHead::create(ps, "el", 3, 2, 2, 2, 5, 13);
  const auto cands = random_candidates(3, 3, 14);
  auto build = [&](ad::Graph& g) {
    return score_candidates(g, cands, g.constant({0.2, 0.4}), g.constant({-0.3, 0.1}), g.constant({1, -1}), head)
        ->probs;
  };
  EXPECT_LT(projected_grad_error(ps, build), 1e-4);
}

TEST(NilHead, ZeroWeightsSitOnTheThreshold) {
  ad::ParameterSet ps;
  const NilHead head = NilHead::create(ps, "nil", 3, 4, 0.5, 1);
  zero(head.w2);
  ad::Graph g;
  const NilDecision d = nil_gate(g, g.constant({1, -2, 3}), head);
  EXPECT_DOUBLE_EQ(d.value, 0.5);
  EXPECT_TRUE(d.linkable);
}

TEST(NilHead, MonotoneInOutputBias) {
  ad::ParameterSet ps;
  const NilHead head = NilHead::create(ps, "nil", 3, 4, 0.5, 2);
  ad::Graph g;
  const ad::Var s = g.constant({0.2, 0.7, -0.1});
  double last = -1.0;
  for (double b = -5.0; b <= 5.0; b += 1.0) {
    head.b2->tensor.values[0] = b;
    const NilDecision d = nil_gate(g, s, head);
    EXPECT_GT(d.value, last);
    EXPECT_EQ(d.linkable, d.value >= 0.5);
    last = d.value;
  }
}

TEST(JointLoss, SumsNonEmptyGroups) {
  ad::Graph g;
  const std::vector<ad::Var> ner = {g.constant({1.5}), g.constant({0.5})};
  const std::vector<ad::Var> el = {g.constant({0.25})};
  const std::vector<ad::Var> nil = {g.constant({0.125})};
  const LossBreakdown all = joint_loss(g, ner, el, nil);
  EXPECT_DOUBLE_EQ(all.value, 2.375);
  EXPECT_DOUBLE_EQ(all.ner, 2.0);
  EXPECT_DOUBLE_EQ(all.el, 0.25);
  EXPECT_DOUBLE_EQ(all.nil, 0.125);

  const LossBreakdown only = joint_loss(g, ner, std::vector<ad::Var>{}, std::vector<ad::Var>{});
  EXPECT_DOUBLE_EQ(only.value, 2.0);
  EXPECT_EQ(only.el, 0.0);
  const LossBreakdown none = joint_loss(g, std::vector<ad::Var>{}, std::vector<ad::Var>{}, std::vector<ad::Var>{});
  EXPECT_EQ(none.value, 0.0);
}
