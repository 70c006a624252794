#include <cmath>
#include <map>
#include <numeric>
#include <random>

#include <gtest/gtest.h>

#include "support.hpp"

using namespace bardo;
using namespace bardo::test;

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

Token tok(int id) { return Token::from_id(id); }

/// Six-token vocabulary: four content ids, TS = 4, END = 5.
Vocabulary small_vocab() { return {6, tok(4), tok(5)}; }

std::shared_ptr<const EmotionScorer> constant(double v) {
  return std::make_shared<FunctionEmotionScorer<std::function<double(std::span<const Token>)>>>(
      [v](std::span<const Token>) { return v; });
}

template <typename Fn>
std::shared_ptr<const EmotionScorer> scorer(Fn fn) {
  return std::make_shared<FunctionEmotionScorer<Fn>>(std::move(fn));
}

ScorerBundle small_bundle(std::shared_ptr<const LanguageModel> lm) {
  ScorerBundle b;
  b.lm = std::move(lm);
  b.valence = constant(0.5);
  b.arousal = constant(0.5);
  b.vocab = small_vocab();
  return b;
}

std::shared_ptr<const NGramModel> random_small_lm(std::mt19937_64& rng) {
  std::vector<TokenSeq> corpus(static_cast<std::size_t>(uniform_int(rng, 1, 6)));
  for (auto& s : corpus) {
    s.resize(static_cast<std::size_t>(uniform_int(rng, 1, 12)));
    for (auto& t : s) t = tok(uniform_int(rng, 0, 5));
  }
  const double alphas[] = {0.0, 0.05, 0.5, 2.0};
  return std::make_shared<NGramModel>(train_lm(corpus, uniform_int(rng, 1, 3), alphas[uniform_int(rng, 0, 3)], 6));
}

Candidate with_scores(double p_l, double ev, double ea) {
  Candidate c;
  c.lm_logprob = std::log(p_l);
  c.valence_score = ev;
  c.arousal_score = ea;
  return c;
}

SearchParams params_for(Emotion target, double seconds, int b, int k, std::uint64_t seed, int rate = 4) {
  SearchParams p;
  p.target = target;
  p.target_seconds = seconds;
  p.beam_size = b;
  p.expansion_k = k;
  p.rng_seed = seed;
  p.timestep_rate = rate;
  return p;
}

// Chi-square survival function for three degrees of freedom.
double chi2_sf_3(double x) {
  return std::erfc(std::sqrt(x / 2)) + std::sqrt(2 * x / M_PI) * std::exp(-x / 2);
}

}  // namespace

// ---------------------------------------------------------------------------
// candidate_logweight
// ---------------------------------------------------------------------------

TEST(Logweight, ProductOfFactors) {
  const Candidate c = with_scores(0.5, 0.8, 0.3);
  const auto p = params_for({1, 0}, 1.0, 5, 10, 0);
  EXPECT_NEAR(candidate_logweight(c, p), std::log(0.28), 1e-12);
  EXPECT_NEAR(std::exp(candidate_logweight(c, p)), 0.28, 1e-12);
}

TEST(Logweight, PerfectMatchIsLmProbability) {
  const Candidate c = with_scores(0.37, 1.0, 0.0);
  EXPECT_EQ(candidate_logweight(c, params_for({1, 0}, 1.0, 5, 10, 0)), c.lm_logprob);
}

TEST(Logweight, ZeroFactorIsNegativeInfinity) {
  EXPECT_EQ(candidate_logweight(with_scores(0.5, 1.0, 0.5), params_for({0, 1}, 1.0, 5, 10, 0)), kNegInf);
  EXPECT_EQ(candidate_logweight(with_scores(0.5, 0.5, 0.0), params_for({0, 1}, 1.0, 5, 10, 0)), kNegInf);
}

// ---------------------------------------------------------------------------
// expand_topk
// ---------------------------------------------------------------------------

TEST(ExpandTopk, FullWidthReturnsEveryChild) {
  const UniformLanguageModel lm;
  Candidate root;
  const auto children = expand_topk(lm, root, kVocabSize);
  ASSERT_EQ(children.size(), 314u);
  for (int id = 0; id < kVocabSize; ++id) EXPECT_EQ(children[static_cast<std::size_t>(id)].seq.back().id(), id);
}

TEST(ExpandTopk, GreedyOnToyModel) {
  const std::vector<TokenSeq> corpus = {{tok(0), tok(1), tok(0), tok(1)}};
  const auto lm = train_lm(corpus, 2, 0.0, 6);
  Candidate parent;
  parent.seq = {tok(0)};
  parent.lm_logprob = lm.logprob(parent.seq);
  const auto children = expand_topk(lm, parent, 1, small_vocab());
  ASSERT_EQ(children.size(), 1u);
  EXPECT_EQ(children[0].seq, (TokenSeq{tok(0), tok(1)}));
  EXPECT_EQ(children[0].lm_logprob, parent.lm_logprob);
  EXPECT_EQ(children[0].new_tokens, 1);
}

TEST(ExpandTopk, TiesGoToLowerIds) {
  const UniformLanguageModel lm(6);
  const auto children = expand_topk(lm, Candidate{}, 3, small_vocab());
  ASSERT_EQ(children.size(), 3u);
  for (int i = 0; i < 3; ++i) EXPECT_EQ(children[static_cast<std::size_t>(i)].seq.back().id(), i);
}

TEST(ExpandTopk, MatchesBruteForceOnRandomModels) {
  std::mt19937_64 rng(1);
  std::vector<TokenSeq> corpus;
  for (int i = 0; i < 10; ++i) corpus.push_back(encode(random_piece(rng, 4, 15, 20)));
  for (int trial = 0; trial < 30; ++trial) {
    const auto lm = train_lm(corpus, uniform_int(rng, 1, 4), trial % 3 == 0 ? 0.0 : 0.01);
    Candidate parent;
    const auto& src = corpus[static_cast<std::size_t>(trial) % corpus.size()];
    parent.seq.assign(src.begin(), src.begin() + uniform_int(rng, 0, static_cast<int>(src.size()) - 1));
    parent.lm_logprob = lm.logprob(parent.seq);
    const int k = uniform_int(rng, 1, 40);
    const auto children = expand_topk(lm, parent, k);

    std::vector<std::pair<double, int>> all;
    for (int id = 0; id < kVocabSize; ++id) {
      TokenSeq s = parent.seq;
      s.push_back(tok(id));
      all.push_back({lm.logprob(s), id});
    }
    std::sort(all.begin(), all.end(), [](auto a, auto b) { return a.first > b.first || (a.first == b.first && a.second < b.second); });
    ASSERT_EQ(children.size(), static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i) {
      const auto& c = children[static_cast<std::size_t>(i)];
      EXPECT_EQ(c.seq.back().id(), all[static_cast<std::size_t>(i)].second);
      const double want = all[static_cast<std::size_t>(i)].first;
      if (std::isinf(want)) {
        EXPECT_EQ(c.lm_logprob, want);
      } else {
        EXPECT_NEAR(c.lm_logprob, want, 1e-9);
      }
    }
    // Soundness: every kept child is at least as likely as every dropped one.
    if (k < kVocabSize) {
      EXPECT_GE(children.back().lm_logprob, all[static_cast<std::size_t>(k)].first - 1e-12);
    }
  }
}

// ---------------------------------------------------------------------------
// sample_beam
// ---------------------------------------------------------------------------

TEST(SampleBeam, ZeroWeightsNeverDrawnFirst) {
  const std::vector<double> w = {0.0, kNegInf, kNegInf};
  const std::vector<double> fallback = {0.0, 0.0, 0.0};
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    SearchRng rng(seed);
    EXPECT_EQ(sample_indices(w, fallback, 1, rng), (std::vector<std::size_t>{0}));
  }
}

TEST(SampleBeam, ExhaustionReturnsAll) {
  std::vector<Candidate> c = {with_scores(0.1, 0.5, 0.5), with_scores(0.9, 0.5, 0.5)};
  const std::vector<double> w = {std::log(0.01), kNegInf};
  SearchRng rng(3);
  EXPECT_EQ(sample_beam(c, w, 2, rng).size(), 2u);
  EXPECT_EQ(sample_beam(c, w, 5, rng).size(), 2u);
}

TEST(SampleBeam, ThreeToOneProportion) {
  const std::vector<double> w = {std::log(3.0), std::log(1.0)};
  const std::vector<double> fallback = {0.0, 0.0};
  SearchRng rng(12345);
  int first = 0;
  constexpr int kDraws = 100000;
  for (int i = 0; i < kDraws; ++i) first += sample_indices(w, fallback, 1, rng)[0] == 0;
  EXPECT_NEAR(static_cast<double>(first) / kDraws, 0.75, 0.01);
}

TEST(SampleBeam, ChiSquareGoodnessOfFit) {
  const std::vector<double> linear = {1, 2, 3, 4};
  std::vector<double> w;
  for (double x : linear) w.push_back(std::log(x) - 700.0);  // far below exp underflow without max-subtraction
  const std::vector<double> fallback(4, 0.0);
  SearchRng rng(777);
  std::vector<int> counts(4, 0);
  constexpr int kDraws = 100000;
  for (int i = 0; i < kDraws; ++i) ++counts[sample_indices(w, fallback, 2, rng)[0]];
  double chi2 = 0.0;
  for (std::size_t i = 0; i < 4; ++i) {
    const double expected = kDraws * linear[i] / 10.0;
    chi2 += (counts[i] - expected) * (counts[i] - expected) / expected;
    EXPECT_NEAR(counts[i] / static_cast<double>(kDraws), linear[i] / 10.0, 0.01);
  }
  EXPECT_GT(chi2_sf_3(chi2), 0.01) << "chi2 " << chi2;
}

TEST(SampleBeam, WithoutReplacement) {
  const std::vector<double> w = {0.0, 0.0, 0.0, 0.0, 0.0, 0.0};
  SearchRng rng(4);
  for (int i = 0; i < 100; ++i) {
    auto idx = sample_indices(w, w, 4, rng);
    std::sort(idx.begin(), idx.end());
    EXPECT_EQ(std::adjacent_find(idx.begin(), idx.end()), idx.end());
  }
}

TEST(SampleBeam, FallsBackToLmWeights) {
  const std::vector<double> w = {kNegInf, kNegInf, kNegInf};
  const std::vector<double> lm = {kNegInf, std::log(1.0), kNegInf};
  SearchRng rng(5);
  for (int i = 0; i < 50; ++i) EXPECT_EQ(sample_indices(w, lm, 1, rng)[0], 1u);
  const std::vector<double> dead = {kNegInf, kNegInf, kNegInf};
  std::vector<int> counts(3, 0);
  for (int i = 0; i < 3000; ++i) ++counts[sample_indices(w, dead, 1, rng)[0]];
  for (int c : counts) EXPECT_GT(c, 800);
}

TEST(SampleBeam, FiniteWeightsDrawnBeforeFallback) {
  const std::vector<double> w = {kNegInf, -2.0, kNegInf, -1.0};
  const std::vector<double> lm = {0.0, 0.0, 0.0, 0.0};
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    SearchRng rng(seed);
    const auto idx = sample_indices(w, lm, 3, rng);
    std::set<std::size_t> first_two(idx.begin(), idx.begin() + 2);
    EXPECT_EQ(first_two, (std::set<std::size_t>{1, 3}));
  }
}

TEST(SampleBeam, EmptyPool) {
  SearchRng rng(1);
  try {
    sample_beam(std::vector<Candidate>{}, std::vector<double>{}, 3, rng);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::EmptyCandidateSet);
  }
}

TEST(Uniform01, Range) {
  SearchRng rng(9);
  for (int i = 0; i < 10000; ++i) {
    const double u = uniform01(rng);
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
  }
}

// ---------------------------------------------------------------------------
// sbbs
// ---------------------------------------------------------------------------

TEST(Sbbs, GreedyChain) {
  // A B TS A B TS: after A always B, after B always TS.
  const std::vector<TokenSeq> corpus = {{tok(0), tok(1), tok(4), tok(0), tok(1), tok(4)}};
  const auto bundle = small_bundle(std::make_shared<NGramModel>(train_lm(corpus, 2, 0.0, 6)));
  const TokenSeq seed = {tok(0)};
  const auto r = sbbs(bundle, seed, params_for({1, 1}, 1.0, 1, 1, 0, 1));
  EXPECT_FALSE(r.is_short);
  EXPECT_EQ(TokenSeq(r.suffix().begin(), r.suffix().end()), (TokenSeq{tok(1), tok(4)}));
  EXPECT_EQ(r.seed_length, 1u);
  EXPECT_EQ(r.iterations, 2);
}

TEST(Sbbs, GreedyChainLonger) {
  const std::vector<TokenSeq> corpus = {{tok(0), tok(1), tok(4), tok(0), tok(1), tok(4)}};
  const auto bundle = small_bundle(std::make_shared<NGramModel>(train_lm(corpus, 2, 0.0, 6)));
  const auto r = sbbs(bundle, TokenSeq{tok(0)}, params_for({1, 1}, 2.0, 1, 1, 0, 1));
  EXPECT_EQ(TokenSeq(r.suffix().begin(), r.suffix().end()), (TokenSeq{tok(1), tok(4), tok(0), tok(1), tok(4)}));
}

TEST(Sbbs, DeterministicForSeed) {
  const auto& m = toy_models();
  const TokenSeq seed = m.library->entries({1, 1})[0];
  const auto p = params_for({1, 1}, 2.0, 5, 10, 42);
  const auto a = sbbs(*m.bundle, seed, p);
  const auto b = sbbs(*m.bundle, seed, p);
  EXPECT_EQ(a.tokens, b.tokens);
  EXPECT_EQ(a.lm_logprob, b.lm_logprob);
  bool differs = false;
  for (std::uint64_t s = 1; s < 6 && !differs; ++s) differs = sbbs(*m.bundle, seed, params_for({1, 1}, 2.0, 5, 10, s)).tokens != a.tokens;
  EXPECT_TRUE(differs);
}

TEST(Sbbs, ResultCachesLogprob) {
  const auto& m = toy_models();
  const TokenSeq seed = m.library->entries({0, 1})[0];
  const auto r = sbbs(*m.bundle, seed, params_for({0, 1}, 1.5, 5, 10, 3));
  EXPECT_NEAR(r.lm_logprob, m.bundle->lm->logprob(r.tokens), 1e-9);
  EXPECT_TRUE(std::equal(seed.begin(), seed.end(), r.tokens.begin()));
}

TEST(Sbbs, MeetsDurationOnTrainedModel) {
  const auto& m = toy_models();
  for (std::uint64_t s = 0; s < 10; ++s) {
    const Emotion e{static_cast<int>(s % 2), static_cast<int>(s / 2 % 2)};
    const auto r = sbbs(*m.bundle, m.library->entries(e)[0], params_for(e, 2.0, 5, 10, s));
    if (!r.is_short) {
      EXPECT_GE(duration_seconds(r.suffix(), 4), 2.0);
    }
  }
}

TEST(Sbbs, DurationContractOnRandomModels) {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 100; ++trial) {
    const auto bundle = small_bundle(random_small_lm(rng));
    const auto p = params_for({uniform_int(rng, 0, 1), uniform_int(rng, 0, 1)}, 0.25 * uniform_int(rng, 1, 6),
                              uniform_int(rng, 1, 6), uniform_int(rng, 1, 6), rng(), 4);
    SearchParams capped = p;
    capped.max_new_tokens = uniform_int(rng, 1, 40);
    const auto r = sbbs(bundle, TokenSeq{}, capped);
    EXPECT_TRUE(r.is_short || duration_seconds(r.suffix(), 4, bundle.vocab.ts) >= p.target_seconds);
    EXPECT_LE(r.suffix().size(), static_cast<std::size_t>(capped.max_new_tokens));
  }
}

TEST(Sbbs, EndTerminatedBeamIsShort) {
  // The only continuation is END.
  const std::vector<TokenSeq> corpus = {{tok(0), tok(5)}};
  const auto bundle = small_bundle(std::make_shared<NGramModel>(train_lm(corpus, 2, 0.0, 6)));
  const auto r = sbbs(bundle, TokenSeq{tok(0)}, params_for({0, 0}, 1.0, 3, 1, 1));
  EXPECT_TRUE(r.is_short);
  EXPECT_EQ(r.tokens.back(), tok(5));
}

TEST(Sbbs, TokenCapIsShort) {
  const auto bundle = small_bundle(std::make_shared<UniformLanguageModel>(6));
  SearchParams p = params_for({0, 0}, 100.0, 2, 2, 1);
  p.max_new_tokens = 7;
  const auto r = sbbs(bundle, TokenSeq{}, p);
  EXPECT_TRUE(r.is_short);
  EXPECT_EQ(r.suffix().size(), 7u);
  EXPECT_EQ(r.iterations, 7);
}

TEST(Sbbs, SoleCompatibleChildAlwaysKept) {
  // Only token 0 keeps a nonzero valence factor for target v = 1.
  ScorerBundle b = small_bundle(std::make_shared<UniformLanguageModel>(6));
  b.valence = scorer([](std::span<const Token> s) { return s.empty() || s.back().id() == 0 ? 1.0 : 0.0; });
  SearchParams p = params_for({1, 0}, 10.0, 1, 6, 3);
  p.max_new_tokens = 12;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    p.rng_seed = seed;
    const auto r = sbbs(b, TokenSeq{}, p);
    EXPECT_EQ(TokenSeq(r.suffix().begin(), r.suffix().end()), TokenSeq(12, tok(0)));
  }
}

TEST(Sbbs, ExpandableMembersShareLength) {
  struct Recording final : LanguageModel {
    mutable std::vector<std::size_t> lengths;
    int vocab_size() const override { return 6; }
    std::vector<double> next_distribution(std::span<const Token> prefix) const override {
      lengths.push_back(prefix.size());
      return std::vector<double>(6, 1.0 / 6);
    }
  };
  auto lm = std::make_shared<Recording>();
  const auto b = small_bundle(lm);
  std::vector<std::string> trace;
  const auto r = sbbs(b, TokenSeq{tok(1), tok(2)}, params_for({1, 1}, 0.75, 4, 3, 8),
                      [&](std::string_view line) { trace.emplace_back(line); });
  lm->lengths.erase(lm->lengths.begin(), lm->lengths.begin() + 2);  // the seed's own logprob
  EXPECT_TRUE(std::is_sorted(lm->lengths.begin(), lm->lengths.end()));
  EXPECT_EQ(trace.size(), static_cast<std::size_t>(r.iterations));
  EXPECT_EQ(trace.front().rfind("iter 1 ", 0), 0u);
}

TEST(Sbbs, RejectsBadInput) {
  const auto& m = toy_models();
  auto code_of = [](auto fn) {
    try {
      fn();
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::Io;
  };
  EXPECT_EQ(code_of([&] { sbbs(*m.bundle, TokenSeq{Token::end()}, params_for({0, 0}, 1, 5, 10, 0)); }),
            ErrorCode::InvalidSeed);
  EXPECT_EQ(code_of([&] { sbbs(*m.bundle, TokenSeq{}, params_for({0, 0}, 0.0, 5, 10, 0)); }), ErrorCode::InvalidParams);
  EXPECT_EQ(code_of([&] { sbbs(*m.bundle, TokenSeq{}, params_for({0, 0}, 1, 0, 10, 0)); }), ErrorCode::InvalidParams);
  EXPECT_EQ(code_of([&] { sbbs(*m.bundle, TokenSeq{}, params_for({0, 0}, 1, 5, 315, 0)); }), ErrorCode::InvalidParams);
  EXPECT_EQ(code_of([&] { sbbs(*m.bundle, TokenSeq{}, params_for({2, 0}, 1, 5, 10, 0)); }), ErrorCode::InvalidParams);
  ScorerBundle mismatched = small_bundle(std::make_shared<UniformLanguageModel>(7));
  EXPECT_EQ(code_of([&] { sbbs(mismatched, TokenSeq{}, params_for({0, 0}, 1, 5, 6, 0)); }),
            ErrorCode::VocabularyMismatch);
}

// ---------------------------------------------------------------------------
// exhaustive_oracle
// ---------------------------------------------------------------------------

TEST(Oracle, MinimalDurationPicksLikeliestTimestepChild) {
  // P(TS | start) = 0.5 via counts; the depth-1 answer is the TS child.
  const std::vector<TokenSeq> corpus = {{tok(4)}, {tok(4)}, {tok(0)}, {tok(1)}};
  const auto bundle = small_bundle(std::make_shared<NGramModel>(train_lm(corpus, 1, 0.0, 6)));
  const auto r = exhaustive_oracle(bundle, TokenSeq{}, params_for({0, 0}, 0.25, 1, 6, 0), 1);
  EXPECT_FALSE(r.is_short);
  EXPECT_EQ(r.tokens, TokenSeq{tok(4)});
  EXPECT_NEAR(r.lm_logprob, std::log(0.5), 1e-12);
}

TEST(Oracle, ShortWhenNothingMeets) {
  const auto bundle = small_bundle(std::make_shared<UniformLanguageModel>(6));
  const auto r = exhaustive_oracle(bundle, TokenSeq{}, params_for({0, 0}, 1.0, 1, 6, 0), 2);
  EXPECT_TRUE(r.is_short);
  EXPECT_EQ(r.tokens, TokenSeq{tok(5)});  // END at depth 1 beats every depth-2 leaf
}

TEST(Oracle, RaisingTargetNeverRaisesLikelihood) {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 40; ++trial) {
    const auto bundle = small_bundle(random_small_lm(rng));
    double previous = std::numeric_limits<double>::infinity();
    for (double l : {0.25, 0.5, 0.75}) {
      const auto r = exhaustive_oracle(bundle, TokenSeq{}, params_for({0, 0}, l, 1, 6, 0), 3);
      if (r.is_short) break;
      EXPECT_LE(r.lm_logprob, previous);
      previous = r.lm_logprob;
    }
  }
}

TEST(Oracle, AgreesWithFullWidthSearch) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 30; ++trial) {
    const auto bundle = small_bundle(random_small_lm(rng));
    const int depth = uniform_int(rng, 1, 3);
    SearchParams p = params_for({1, 0}, 0.25 * uniform_int(rng, 1, depth), 216, 6, rng());
    p.max_new_tokens = depth;
    TokenSeq seed;
    for (int i = uniform_int(rng, 0, 2); i > 0; --i) seed.push_back(tok(uniform_int(rng, 0, 4)));
    const auto expected = exhaustive_oracle(bundle, seed, p, depth);
    const auto got = sbbs(bundle, seed, p);
    ASSERT_EQ(got.tokens, expected.tokens) << "trial " << trial;
    ASSERT_EQ(got.is_short, expected.is_short);
  }
}

TEST(Oracle, Guardrail) {
  const auto& m = toy_models();
  try {
    exhaustive_oracle(*m.bundle, TokenSeq{}, params_for({0, 0}, 1, 1, 10, 0), 3);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::SearchSpaceTooLarge);
  }
}

// ---------------------------------------------------------------------------
// Steering
// ---------------------------------------------------------------------------

TEST(Sbbs, SteersTowardTargetValence) {
  // Ids below 19 raise valence, 19..37 lower it; TS = 38, END = 39.
  auto ev = [](std::span<const Token> s) {
    double x = 0, y = 0;
    for (Token t : s) {
      if (t.id() < 19) ++x;
      else if (t.id() < 38) ++y;
    }
    return x + y == 0 ? 0.5 : x / (x + y);
  };
  ScorerBundle b;
  b.lm = std::make_shared<UniformLanguageModel>(40);
  b.valence = scorer(ev);
  b.arousal = constant(0.5);
  b.vocab = {40, tok(38), tok(39)};
  double high = 0, low = 0;
  constexpr int kSeeds = 20;
  for (int s = 0; s < kSeeds; ++s) {
    high += ev(sbbs(b, TokenSeq{}, params_for({1, 0}, 0.25, 5, 40, static_cast<std::uint64_t>(s))).tokens);
    low += ev(sbbs(b, TokenSeq{}, params_for({0, 0}, 0.25, 5, 40, static_cast<std::uint64_t>(s))).tokens);
  }
  EXPECT_GT((high - low) / kSeeds, 0.2);
}
