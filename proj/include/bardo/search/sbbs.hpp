#ifndef BARDO_SEARCH_SBBS_HPP
#define BARDO_SEARCH_SBBS_HPP

// Stochastic bi-objective beam search: a beam search over token sequences
// whose next beam is sampled, without replacement, proportionally to
//
//   p_L(y) * (1 - |v - E_v(y)|) * (1 - |a - E_a(y)|)
//
// among the top-k children of every beam member. Generation stops once the
// newly generated suffix spans the requested number of seconds.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numeric>
#include <optional>
#include <random>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "bardo/codec/token.hpp"
#include "bardo/scorers/bundle.hpp"
#include "bardo/scorers/emotion.hpp"

namespace bardo {

inline constexpr int kDefaultBeamSize = 5;
inline constexpr int kDefaultExpansionK = 10;
inline constexpr int kDefaultMaxNewTokens = 2048;

struct SearchParams {
  int beam_size = kDefaultBeamSize;
  int expansion_k = kDefaultExpansionK;
  Emotion target;
  double target_seconds = 1.0;
  int timestep_rate = kDefaultTimestepRate;
  std::uint64_t rng_seed = 0;
  int max_new_tokens = kDefaultMaxNewTokens;
};

inline void validate(const SearchParams& p, int vocab_size) {
  auto fail = [](const std::string& msg) { throw Error(ErrorCode::InvalidParams, msg); };
  if (p.beam_size < 1) fail("beam size must be >= 1");
  if (p.expansion_k < 1 || p.expansion_k > vocab_size)
    fail("expansion k must be in [1, " + std::to_string(vocab_size) + "]");
  if (!(p.target_seconds > 0.0) || !std::isfinite(p.target_seconds)) fail("target seconds must be > 0");
  if (p.timestep_rate < 1) fail("timestep rate must be >= 1");
  if (p.max_new_tokens < 1) fail("max_new_tokens must be >= 1");
  if (!is_valid(p.target)) fail("target emotion must be in {0,1}^2");
}

/// A sequence in the search tree with its cached scores. `new_tokens` and
/// `new_ts` count only what the search appended to the seed.
struct Candidate {
  TokenSeq seq;
  double lm_logprob = 0.0;
  int new_tokens = 0;
  int new_ts = 0;
  bool ended = false;  // last appended token is END
  double valence_score = 0.5;
  double arousal_score = 0.5;
};

inline double suffix_seconds(const Candidate& c, int timestep_rate) {
  return static_cast<double>(c.new_ts) / timestep_rate;
}

inline bool meets_duration(const Candidate& c, const SearchParams& p) {
  return suffix_seconds(c, p.timestep_rate) >= p.target_seconds;
}

/// log of the sampling weight; -inf when an emotion factor is zero.
inline double candidate_logweight(const Candidate& c, const SearchParams& p) {
  const double fv = 1.0 - std::abs(p.target.valence - c.valence_score);
  const double fa = 1.0 - std::abs(p.target.arousal - c.arousal_score);
  constexpr double kNegInf = -std::numeric_limits<double>::infinity();
  if (!(fv > 0.0) || !(fa > 0.0)) return kNegInf;
  return c.lm_logprob + std::log(fv) + std::log(fa);
}

/// The k children of `parent` with the largest p_L. Since every child shares
/// the parent's prefix this is the top-k of the next-token distribution;
/// ties go to the smaller token id. Children come back best first.
inline std::vector<Candidate> expand_topk(const LanguageModel& lm, const Candidate& parent, int k,
                                          const Vocabulary& vocab = Vocabulary::music()) {
  if (k < 1) throw Error(ErrorCode::InvalidParams, "k must be >= 1");
  const std::vector<double> dist = lm.next_distribution(parent.seq);
  std::vector<int> ids(dist.size());
  std::iota(ids.begin(), ids.end(), 0);
  const auto take = std::min<std::size_t>(static_cast<std::size_t>(k), ids.size());
  std::partial_sort(ids.begin(), ids.begin() + static_cast<std::ptrdiff_t>(take), ids.end(),
                    [&](int a, int b) { return dist[a] > dist[b] || (dist[a] == dist[b] && a < b); });
  std::vector<Candidate> children;
  children.reserve(take);
  for (std::size_t i = 0; i < take; ++i) {
    const Token tok(static_cast<Token::Id>(ids[i]));
    Candidate child;
    child.seq.reserve(parent.seq.size() + 1);
    child.seq = parent.seq;
    child.seq.push_back(tok);
    child.lm_logprob = parent.lm_logprob + std::log(dist[ids[i]]);
    child.new_tokens = parent.new_tokens + 1;
    child.new_ts = parent.new_ts + (tok == vocab.ts ? 1 : 0);
    child.ended = tok == vocab.end;
    children.push_back(std::move(child));
  }
  return children;
}

// ---------------------------------------------------------------------------
// Sampling
// ---------------------------------------------------------------------------

using SearchRng = std::mt19937_64;

/// Uniform double in [0, 1) from the top 53 bits; portable, unlike
/// std::uniform_real_distribution.
inline double uniform01(SearchRng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

/// Draws min(b, n) distinct indices. Each draw is proportional to
/// exp(logweight) over the remaining indices, after subtracting their
/// maximum. -inf weights are never drawn while a finite one remains; once
/// none remains, draws use `fallback` log-weights, and uniform if those are
/// all -inf too. When n <= b every index is returned in order.
inline std::vector<std::size_t> sample_indices(std::span<const double> logweights,
                                               std::span<const double> fallback, std::size_t b,
                                               SearchRng& rng) {
  const std::size_t n = logweights.size();
  if (n == 0) throw Error(ErrorCode::EmptyCandidateSet, "cannot sample from an empty candidate set");
  if (fallback.size() != n) throw Error(ErrorCode::InvalidParams, "fallback weights must parallel logweights");
  std::vector<std::size_t> remaining(n);
  std::iota(remaining.begin(), remaining.end(), 0);
  if (n <= b) return remaining;

  auto finite = [](double w) { return std::isfinite(w); };
  std::vector<std::size_t> chosen;
  chosen.reserve(b);
  std::vector<double> w(n);
  while (chosen.size() < b) {
    std::span<const double> source = logweights;
    if (std::none_of(remaining.begin(), remaining.end(), [&](std::size_t i) { return finite(logweights[i]); }))
      source = fallback;
    double top = -std::numeric_limits<double>::infinity();
    for (std::size_t i : remaining)
      if (finite(source[i])) top = std::max(top, source[i]);
    double total = 0.0;
    for (std::size_t r = 0; r < remaining.size(); ++r) {
      const double lw = source[remaining[r]];
      if (!finite(top)) {
        w[r] = 1.0;  // nothing finite at all: uniform
      } else {
        w[r] = finite(lw) ? std::exp(lw - top) : 0.0;
      }
      total += w[r];
    }
    const double u = uniform01(rng) * total;
    double acc = 0.0;
    std::size_t pick = remaining.size();
    for (std::size_t r = 0; r < remaining.size(); ++r) {
      if (w[r] <= 0.0) continue;
      pick = r;  // last positive entry absorbs rounding at the top end
      acc += w[r];
      if (u < acc) break;
    }
    chosen.push_back(remaining[pick]);
    remaining.erase(remaining.begin() + static_cast<std::ptrdiff_t>(pick));
  }
  return chosen;
}

/// Samples up to b candidates without replacement; see sample_indices. The
/// fallback weight is each candidate's lm_logprob.
inline std::vector<Candidate> sample_beam(std::span<const Candidate> candidates,
                                          std::span<const double> logweights, std::size_t b,
                                          SearchRng& rng) {
  if (candidates.size() != logweights.size())
    throw Error(ErrorCode::InvalidParams, "candidates and logweights must be parallel");
  std::vector<double> fallback;
  fallback.reserve(candidates.size());
  for (const auto& c : candidates) fallback.push_back(c.lm_logprob);
  std::vector<Candidate> out;
  for (std::size_t i : sample_indices(logweights, fallback, b, rng)) out.push_back(candidates[i]);
  return out;
}

// ---------------------------------------------------------------------------
// Search
// ---------------------------------------------------------------------------

struct SearchResult {
  TokenSeq tokens;  // seed followed by the generated suffix
  std::size_t seed_length = 0;
  double lm_logprob = 0.0;
  /// Set when no beam member reached the target duration (END or token cap).
  bool is_short = false;
  int iterations = 0;

  std::span<const Token> suffix() const { return std::span<const Token>(tokens).subspan(seed_length); }
};

/// Receives one line per search iteration.
using TraceSink = std::function<void(std::string_view)>;

namespace detail {

/// Higher p_L first; equal p_L falls back to lexicographic token order.
inline bool better(const Candidate& a, const Candidate& b) {
  if (a.lm_logprob != b.lm_logprob) return a.lm_logprob > b.lm_logprob;
  return std::lexicographical_compare(a.seq.begin(), a.seq.end(), b.seq.begin(), b.seq.end());
}

inline void check_seed(const ScorerBundle& bundle, std::span<const Token> seed) {
  for (Token t : seed) {
    if (t == bundle.vocab.end) throw Error(ErrorCode::InvalidSeed, "seed contains END");
    if (t.id() >= bundle.vocab.size) throw Error(ErrorCode::InvalidSeed, "seed token outside vocabulary");
  }
}

inline SearchResult finish(std::span<const Candidate> finals, std::size_t seed_length,
                           const SearchParams& params, int iterations) {
  const Candidate* best = nullptr;
  for (const auto& c : finals)
    if (meets_duration(c, params) && (!best || better(c, *best))) best = &c;
  const bool is_short = best == nullptr;
  if (is_short)
    for (const auto& c : finals)
      if (!best || better(c, *best)) best = &c;
  return {best->seq, seed_length, best->lm_logprob, is_short, iterations};
}

}  // namespace detail

/// Runs the search from `seed`.
///
/// A beam member is frozen once its suffix reaches the target duration or it
/// ends in END; frozen members are not expanded but stay in the sampling
/// pool with their cached weights. Each iteration pools the frozen members
/// and the top-k children of every other member, then samples the next beam.
/// The loop ends when every member is frozen or max_new_tokens tokens have
/// been generated. The result is the member with the largest p_L among those
/// meeting the duration; failing that, the largest p_L overall, flagged
/// short. Identical inputs and rng_seed give identical output.
inline SearchResult sbbs(const ScorerBundle& bundle, std::span<const Token> seed,
                         const SearchParams& params, const TraceSink& trace = {}) {
  bundle.validate();
  validate(params, bundle.vocab.size);
  detail::check_seed(bundle, seed);

  SearchRng rng(params.rng_seed);
  const auto b = static_cast<std::size_t>(params.beam_size);
  auto frozen = [&](const Candidate& c) { return c.ended || meets_duration(c, params); };

  Candidate root;
  root.seq.assign(seed.begin(), seed.end());
  root.lm_logprob = bundle.lm->logprob(seed);
  std::vector<Candidate> beam{std::move(root)};

  int j = 0;
  while (j < params.max_new_tokens && !std::all_of(beam.begin(), beam.end(), frozen)) {
    std::vector<Candidate> pool;
    for (auto& member : beam) {
      if (frozen(member)) {
        pool.push_back(std::move(member));
        continue;
      }
      for (auto& child : expand_topk(*bundle.lm, member, params.expansion_k, bundle.vocab)) {
        child.valence_score = bundle.valence->score(child.seq);
        child.arousal_score = bundle.arousal->score(child.seq);
        pool.push_back(std::move(child));
      }
    }
    std::vector<double> logweights;
    logweights.reserve(pool.size());
    for (const auto& c : pool) logweights.push_back(candidate_logweight(c, params));
    beam = sample_beam(pool, logweights, b, rng);
    ++j;

    if (trace) {
      std::ostringstream line;
      line << "iter " << j << " pool " << pool.size() << " beam";
      for (const auto& c : beam)
        line << " [lp " << c.lm_logprob << " w " << candidate_logweight(c, params) << " ts " << c.new_ts
             << (frozen(c) ? " frozen" : "") << ']';
      trace(line.str());
    }
  }
  return detail::finish(beam, seed.size(), params, j);
}

inline constexpr double kOracleNodeLimit = 5e6;

/// Enumerates every continuation of `seed` up to depth_cap new tokens (no
/// token follows END) and returns the sequence with the largest p_L whose
/// suffix meets the duration, ties to the lexicographically smaller. When
/// none does, returns the best END-terminated or depth_cap-long sequence,
/// flagged short. p_L is accumulated exactly as sbbs does, so results are
/// comparable bit for bit. Test-scale only.
inline SearchResult exhaustive_oracle(const ScorerBundle& bundle, std::span<const Token> seed,
                                      const SearchParams& params, int depth_cap) {
  bundle.validate();
  validate(params, bundle.vocab.size);
  detail::check_seed(bundle, seed);
  if (depth_cap < 1) throw Error(ErrorCode::InvalidParams, "depth_cap must be >= 1");
  if (std::pow(static_cast<double>(bundle.vocab.size), depth_cap) > kOracleNodeLimit)
    throw Error(ErrorCode::SearchSpaceTooLarge, "vocab_size^depth_cap exceeds the enumeration limit");

  Candidate root;
  root.seq.assign(seed.begin(), seed.end());
  root.lm_logprob = bundle.lm->logprob(seed);

  std::optional<Candidate> best_meeting;
  std::optional<Candidate> best_short;
  const Vocabulary& vocab = bundle.vocab;
  std::function<void(Candidate&)> visit = [&](Candidate& node) {
    if (node.new_tokens > 0 && meets_duration(node, params)) {
      // Extensions can only lower p_L and sort after their prefix.
      if (!best_meeting || detail::better(node, *best_meeting)) best_meeting = node;
      return;
    }
    if (node.ended || node.new_tokens == depth_cap) {
      if (!best_short || detail::better(node, *best_short)) best_short = node;
      return;
    }
    const std::vector<double> dist = bundle.lm->next_distribution(node.seq);
    for (int id = 0; id < vocab.size; ++id) {
      const Token tok(static_cast<Token::Id>(id));
      Candidate child;
      child.seq = node.seq;
      child.seq.push_back(tok);
      child.lm_logprob = node.lm_logprob + std::log(dist[id]);
      child.new_tokens = node.new_tokens + 1;
      child.new_ts = node.new_ts + (tok == vocab.ts ? 1 : 0);
      child.ended = tok == vocab.end;
      visit(child);
    }
  };
  visit(root);

  const Candidate& pick = best_meeting ? *best_meeting : *best_short;
  return {pick.seq, seed.size(), pick.lm_logprob, !best_meeting.has_value(), 0};
}

}  // namespace bardo

#endif  // BARDO_SEARCH_SBBS_HPP
