#ifndef BARDO_SCORERS_LANGUAGE_MODEL_HPP
#define BARDO_SCORERS_LANGUAGE_MODEL_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <memory>
#include <span>
#include <sstream>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "bardo/codec/token.hpp"
#include "bardo/scorers/model_io.hpp"

namespace bardo {

/// Next-token model over a fixed id space [0, vocab_size).
class LanguageModel {
 public:
  virtual ~LanguageModel() = default;

  virtual int vocab_size() const = 0;

  /// P(. | prefix); vocab_size() entries summing to one.
  virtual std::vector<double> next_distribution(std::span<const Token> prefix) const = 0;

  /// Natural-log probability of `seq` from an empty history. Empty -> 0.
  virtual double logprob(std::span<const Token> seq) const {
    double total = 0.0;
    for (std::size_t i = 0; i < seq.size(); ++i)
      total += std::log(next_distribution(seq.first(i))[seq[i].id()]);
    return total;
  }
};

/// Every token equally likely in every context.
class UniformLanguageModel final : public LanguageModel {
 public:
  explicit UniformLanguageModel(int vocab_size = kVocabSize) : size_(vocab_size) {}

  int vocab_size() const override { return size_; }

  std::vector<double> next_distribution(std::span<const Token>) const override {
    return std::vector<double>(static_cast<std::size_t>(size_), 1.0 / size_);
  }

 private:
  int size_;
};

/// Add-alpha smoothed n-gram model. Histories shorter than order-1 are
/// left-padded with a start marker whose id (vocab_size) lies outside the
/// token space.
///
///   P(t | h) = (c(h, t) + alpha) / (c(h) + alpha * V)
///
/// With alpha = 0 and an unseen history the distribution falls back to
/// uniform.
class NGramModel final : public LanguageModel {
 public:
  static constexpr int kMaxOrder = 6;

  NGramModel(int order, double alpha, int vocab_size = kVocabSize)
      : order_(order), alpha_(alpha), size_(vocab_size) {
    if (order < 1 || order > kMaxOrder)
      throw Error(ErrorCode::InvalidParams, "n-gram order must be in [1, " + std::to_string(kMaxOrder) + "]");
    if (!(alpha >= 0.0) || !std::isfinite(alpha))
      throw Error(ErrorCode::InvalidParams, "smoothing alpha must be finite and >= 0");
    if (vocab_size < 1 || vocab_size >= kStartLimit)
      throw Error(ErrorCode::InvalidParams, "vocabulary size out of range");
  }

  int order() const { return order_; }
  double alpha() const { return alpha_; }
  int vocab_size() const override { return size_; }
  std::size_t context_count() const { return counts_.size(); }

  /// Counts every position of every sequence, histories starting at the
  /// start marker.
  void add(std::span<const Token> seq) {
    std::uint64_t key = start_key();
    for (Token t : seq) {
      check_id(t);
      auto& ctx = counts_[key];
      ++ctx.total;
      ++ctx.next[t.id()];
      key = shift(key, t.id());
    }
  }

  std::vector<double> next_distribution(std::span<const Token> prefix) const override {
    const auto* ctx = find(context_key(prefix));
    const double total = ctx ? static_cast<double>(ctx->total) : 0.0;
    const double denom = total + alpha_ * size_;
    if (denom <= 0.0) return std::vector<double>(static_cast<std::size_t>(size_), 1.0 / size_);
    std::vector<double> dist(static_cast<std::size_t>(size_), alpha_ / denom);
    if (ctx)
      for (const auto& [id, count] : ctx->next) dist[id] = (static_cast<double>(count) + alpha_) / denom;
    return dist;
  }

  double logprob(std::span<const Token> seq) const override {
    double total = 0.0;
    std::uint64_t key = start_key();
    for (Token t : seq) {
      check_id(t);
      total += std::log(probability(key, t.id()));
      key = shift(key, t.id());
    }
    return total;
  }

  std::string to_text() const {
    std::ostringstream out;
    model_io::write_header(out, "ngram-lm", true);
    out << "vocab-size " << size_ << '\n'
        << "order " << order_ << '\n'
        << "alpha " << alpha_ << '\n'
        << "contexts " << counts_.size() << '\n';
    // Sorted for byte-stable output.
    std::map<std::uint64_t, const Context*> sorted;
    for (const auto& [key, ctx] : counts_) sorted.emplace(key, &ctx);
    for (const auto& [key, ctx] : sorted) {
      out << key << ' ' << ctx->next.size();
      std::map<int, std::uint64_t> next(ctx->next.begin(), ctx->next.end());
      for (const auto& [id, count] : next) out << ' ' << id << ':' << count;
      out << '\n';
    }
    return out.str();
  }

  static NGramModel from_text(const std::string& text) {
    std::istringstream in(text);
    model_io::expect_header(in, "ngram-lm", true);
    const int size = model_io::read_field<int>(in, "vocab-size");
    const int order = model_io::read_field<int>(in, "order");
    in >> std::ws;
    std::string key_name;
    in >> key_name;
    if (key_name != "alpha") throw Error(ErrorCode::ModelFormat, "expected field 'alpha'");
    const double alpha = model_io::read_double(in);
    const auto n = model_io::read_field<std::size_t>(in, "contexts");
    NGramModel model(order, alpha, size);
    for (std::size_t i = 0; i < n; ++i) {
      std::uint64_t key = 0;
      std::size_t entries = 0;
      if (!(in >> key >> entries)) throw Error(ErrorCode::ModelFormat, "truncated context table");
      auto& ctx = model.counts_[key];
      for (std::size_t e = 0; e < entries; ++e) {
        int id = 0;
        char colon = 0;
        std::uint64_t count = 0;
        if (!(in >> id >> colon >> count) || colon != ':' || id < 0 || id >= size)
          throw Error(ErrorCode::ModelFormat, "bad count entry");
        ctx.next[id] = count;
        ctx.total += count;
      }
    }
    return model;
  }

 private:
  static constexpr int kBits = 10;
  static constexpr int kStartLimit = (1 << kBits) - 1;

  struct Context {
    std::uint64_t total = 0;
    std::unordered_map<int, std::uint64_t> next;
  };

  void check_id(Token t) const {
    if (t.id() >= size_)
      throw Error(ErrorCode::MalformedTokenSeq, "token id " + std::to_string(t.id()) + " outside vocabulary");
  }

  std::uint64_t mask() const {
    const int width = (order_ - 1) * kBits;
    return width == 0 ? 0 : ((std::uint64_t{1} << width) - 1);
  }

  std::uint64_t start_key() const {
    std::uint64_t key = 0;
    for (int i = 0; i < order_ - 1; ++i) key = (key << kBits) | static_cast<std::uint64_t>(size_);
    return key;
  }

  std::uint64_t shift(std::uint64_t key, int id) const {
    return ((key << kBits) | static_cast<std::uint64_t>(id)) & mask();
  }

  std::uint64_t context_key(std::span<const Token> prefix) const {
    const std::size_t h = static_cast<std::size_t>(order_ - 1);
    std::uint64_t key = start_key();
    const std::size_t from = prefix.size() > h ? prefix.size() - h : 0;
    for (std::size_t i = from; i < prefix.size(); ++i) {
      check_id(prefix[i]);
      key = shift(key, prefix[i].id());
    }
    return key;
  }

  const Context* find(std::uint64_t key) const {
    auto it = counts_.find(key);
    return it == counts_.end() ? nullptr : &it->second;
  }

  double probability(std::uint64_t key, int id) const {
    const auto* ctx = find(key);
    const double total = ctx ? static_cast<double>(ctx->total) : 0.0;
    const double denom = total + alpha_ * size_;
    if (denom <= 0.0) return 1.0 / size_;
    double count = 0.0;
    if (ctx) {
      auto it = ctx->next.find(id);
      if (it != ctx->next.end()) count = static_cast<double>(it->second);
    }
    return (count + alpha_) / denom;
  }

  int order_;
  double alpha_;
  int size_;
  std::unordered_map<std::uint64_t, Context> counts_;
};

inline constexpr int kDefaultLmOrder = 4;
inline constexpr double kDefaultLmAlpha = 0.01;

/// Trains an n-gram model on a corpus of token sequences.
inline NGramModel train_lm(std::span<const TokenSeq> corpus, int order = kDefaultLmOrder,
                           double alpha = kDefaultLmAlpha, int vocab_size = kVocabSize) {
  if (corpus.empty()) throw Error(ErrorCode::EmptyCorpus, "language model corpus is empty");
  NGramModel model(order, alpha, vocab_size);
  for (const auto& seq : corpus) model.add(seq);
  return model;
}

}  // namespace bardo

#endif  // BARDO_SCORERS_LANGUAGE_MODEL_HPP
