#ifndef BARDO_SCORERS_EMOTION_SCORER_HPP
#define BARDO_SCORERS_EMOTION_SCORER_HPP

#include <array>
#include <cmath>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "bardo/codec/token.hpp"
#include "bardo/codec/tokenizer.hpp"
#include "bardo/corpus/corpus.hpp"
#include "bardo/scorers/model_io.hpp"

namespace bardo {

/// Probability that a token sequence expresses the high pole of one emotion
/// dimension.
class EmotionScorer {
 public:
  virtual ~EmotionScorer() = default;
  /// In [0, 1]; empty input is uninformative (0.5).
  virtual double score(std::span<const Token> seq) const = 0;
};

enum class EmotionDimension { Valence, Arousal };

inline std::string_view to_string(EmotionDimension d) {
  return d == EmotionDimension::Valence ? "valence" : "arousal";
}

// ---------------------------------------------------------------------------
// Features
// ---------------------------------------------------------------------------

// Feature layout:
//   0..11  pitch-class histogram, normalized to sum 1 (zeros without notes)
//   12     mean velocity / 127
//   13     velocity standard deviation / 127
//   14     notes per timestep (timesteps = max(1, TS count))
//   15     mean duration / 56
//   16     fraction of tokens that are TS
// A note is a VELOCITY, DURATION, PITCH run; stray tokens are skipped.
inline constexpr std::size_t kFeatureCount = 17;
using FeatureVector = std::array<double, kFeatureCount>;

inline FeatureVector music_features(std::span<const Token> seq) {
  FeatureVector f{};
  double notes = 0, ts = 0, vel_sum = 0, vel_sq = 0, dur_sum = 0;
  int stage = 0;
  int velocity = 0, duration = 0;
  for (Token t : seq) {
    if (t.id() >= kVocabSize) continue;
    switch (t.kind()) {
      case TokenKind::Velocity:
        velocity = t.value();
        stage = 1;
        break;
      case TokenKind::Duration:
        if (stage == 1) {
          duration = t.value();
          stage = 2;
        } else {
          stage = 0;
        }
        break;
      case TokenKind::Pitch:
        if (stage == 2) {
          f[static_cast<std::size_t>(t.value() % 12)] += 1;
          notes += 1;
          vel_sum += velocity;
          vel_sq += static_cast<double>(velocity) * velocity;
          dur_sum += duration;
        }
        stage = 0;
        break;
      case TokenKind::TimeStep:
        ts += 1;
        stage = 0;
        break;
      case TokenKind::End:
        stage = 0;
        break;
    }
  }
  if (notes > 0) {
    for (std::size_t i = 0; i < 12; ++i) f[i] /= notes;
    const double mean = vel_sum / notes;
    f[12] = mean / kMaxVelocity;
    f[13] = std::sqrt(std::max(0.0, vel_sq / notes - mean * mean)) / kMaxVelocity;
    f[15] = dur_sum / notes / kMaxDuration;
  }
  f[14] = notes / std::max(1.0, ts);
  f[16] = seq.empty() ? 0.0 : ts / static_cast<double>(seq.size());
  return f;
}

// ---------------------------------------------------------------------------
// Logistic model
// ---------------------------------------------------------------------------

/// Weights and bias of a logistic model over standardized features.
struct LogisticParams {
  FeatureVector weights{};
  double bias = 0.0;
};

inline double sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

/// Mean binary cross-entropy of `params` on (features, labels) and its
/// gradient. Written for numerical stability with log1p.
inline double logistic_loss(const LogisticParams& params, std::span<const FeatureVector> x,
                            std::span<const int> y, LogisticParams* gradient = nullptr) {
  if (gradient) *gradient = LogisticParams{};
  double loss = 0.0;
  const double n = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    double z = params.bias;
    for (std::size_t j = 0; j < kFeatureCount; ++j) z += params.weights[j] * x[i][j];
    // -log sigmoid(z) for y=1, -log(1 - sigmoid(z)) for y=0.
    const double s = y[i] ? z : -z;
    loss += s >= 0 ? std::log1p(std::exp(-s)) : -s + std::log1p(std::exp(s));
    if (gradient) {
      const double residual = sigmoid(z) - y[i];
      for (std::size_t j = 0; j < kFeatureCount; ++j) gradient->weights[j] += residual * x[i][j] / n;
      gradient->bias += residual / n;
    }
  }
  return loss / n;
}

struct ScorerTrainOptions {
  double learning_rate = 0.5;
  int max_epochs = 10000;
  double tolerance = 1e-6;  // stop when the relative loss change drops below
};

class LogisticEmotionScorer final : public EmotionScorer {
 public:
  LogisticEmotionScorer() { scale_.fill(1.0); }

  LogisticEmotionScorer(EmotionDimension dimension, LogisticParams params, FeatureVector mean,
                        FeatureVector scale)
      : dimension_(dimension), params_(params), mean_(mean), scale_(scale) {}

  EmotionDimension dimension() const { return dimension_; }
  const LogisticParams& params() const { return params_; }

  FeatureVector standardize(const FeatureVector& raw) const {
    FeatureVector out;
    for (std::size_t j = 0; j < kFeatureCount; ++j) out[j] = (raw[j] - mean_[j]) / scale_[j];
    return out;
  }

  double score(std::span<const Token> seq) const override {
    if (seq.empty()) return 0.5;
    const FeatureVector x = standardize(music_features(seq));
    double z = params_.bias;
    for (std::size_t j = 0; j < kFeatureCount; ++j) z += params_.weights[j] * x[j];
    return sigmoid(z);
  }

  std::string to_text() const {
    std::ostringstream out;
    model_io::write_header(out, "music-emotion", true);
    out << "dimension " << to_string(dimension_) << '\n'
        << "features " << kFeatureCount << '\n';
    out << "bias " << params_.bias << '\n';
    auto row = [&](const char* name, const FeatureVector& v) {
      out << name;
      for (double d : v) out << ' ' << d;
      out << '\n';
    };
    row("weights", params_.weights);
    row("mean", mean_);
    row("scale", scale_);
    return out.str();
  }

  static LogisticEmotionScorer from_text(const std::string& text) {
    std::istringstream in(text);
    model_io::expect_header(in, "music-emotion", true);
    const auto dim = model_io::read_field<std::string>(in, "dimension");
    if (dim != "valence" && dim != "arousal")
      throw Error(ErrorCode::ModelFormat, "unknown dimension " + dim);
    if (model_io::read_field<std::size_t>(in, "features") != kFeatureCount)
      throw Error(ErrorCode::ModelFormat, "feature count mismatch");
    LogisticEmotionScorer s;
    s.dimension_ = dim == "valence" ? EmotionDimension::Valence : EmotionDimension::Arousal;
    auto expect = [&](const char* name) {
      std::string got;
      if (!(in >> got) || got != name) throw Error(ErrorCode::ModelFormat, std::string("expected ") + name);
    };
    expect("bias");
    s.params_.bias = model_io::read_double(in);
    auto row = [&](const char* name, FeatureVector& v) {
      expect(name);
      for (double& d : v) d = model_io::read_double(in);
    };
    row("weights", s.params_.weights);
    row("mean", s.mean_);
    row("scale", s.scale_);
    return s;
  }

 private:
  EmotionDimension dimension_ = EmotionDimension::Valence;
  LogisticParams params_;
  FeatureVector mean_{};
  FeatureVector scale_{};
};

/// Full-batch gradient descent on mean cross-entropy from zero weights.
/// Features are standardized with the training mean and standard deviation
/// (constant features keep scale 1).
inline LogisticEmotionScorer train_emotion_scorer(std::span<const LabeledPiece> data,
                                                  EmotionDimension dimension,
                                                  const ScorerTrainOptions& options = {}) {
  std::vector<FeatureVector> raw;
  std::vector<int> labels;
  bool seen[2] = {false, false};
  for (const auto& lp : data) {
    const int label = dimension == EmotionDimension::Valence ? lp.valence : lp.arousal;
    if (label != 0 && label != 1) throw Error(ErrorCode::UnknownLabel, "emotion labels must be 0 or 1");
    seen[label] = true;
    raw.push_back(music_features(encode(lp.piece)));
    labels.push_back(label);
  }
  if (!seen[0] || !seen[1])
    throw Error(ErrorCode::SingleClassData, "training data for " + std::string(to_string(dimension)) +
                                                " needs both classes");

  FeatureVector mean{}, scale{};
  const double n = static_cast<double>(raw.size());
  for (const auto& r : raw)
    for (std::size_t j = 0; j < kFeatureCount; ++j) mean[j] += r[j] / n;
  for (const auto& r : raw)
    for (std::size_t j = 0; j < kFeatureCount; ++j) scale[j] += (r[j] - mean[j]) * (r[j] - mean[j]) / n;
  for (double& s : scale) s = s > 1e-24 ? std::sqrt(s) : 1.0;

  LogisticEmotionScorer shape(dimension, {}, mean, scale);
  std::vector<FeatureVector> x;
  x.reserve(raw.size());
  for (const auto& r : raw) x.push_back(shape.standardize(r));

  LogisticParams params;
  LogisticParams grad;
  double previous = logistic_loss(params, x, labels, &grad);
  for (int epoch = 0; epoch < options.max_epochs; ++epoch) {
    for (std::size_t j = 0; j < kFeatureCount; ++j) params.weights[j] -= options.learning_rate * grad.weights[j];
    params.bias -= options.learning_rate * grad.bias;
    const double loss = logistic_loss(params, x, labels, &grad);
    const double change = std::abs(previous - loss) / std::max(std::abs(previous), 1e-300);
    previous = loss;
    if (change < options.tolerance) break;
  }
  return LogisticEmotionScorer(dimension, params, mean, scale);
}

/// Scores with a fixed function; handy for synthetic bundles.
template <typename Fn>
class FunctionEmotionScorer final : public EmotionScorer {
 public:
  explicit FunctionEmotionScorer(Fn fn) : fn_(std::move(fn)) {}
  double score(std::span<const Token> seq) const override { return fn_(seq); }

 private:
  Fn fn_;
};

}  // namespace bardo

#endif  // BARDO_SCORERS_EMOTION_SCORER_HPP
