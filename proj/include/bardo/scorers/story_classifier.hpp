#ifndef BARDO_SCORERS_STORY_CLASSIFIER_HPP
#define BARDO_SCORERS_STORY_CLASSIFIER_HPP

#include <array>
#include <cctype>
#include <cmath>
#include <map>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "bardo/csv.hpp"
#include "bardo/scorers/emotion.hpp"
#include "bardo/scorers/model_io.hpp"

namespace bardo {

/// Lowercased runs of ASCII letters and digits.
inline std::vector<std::string> tokenize_words(std::string_view text) {
  std::vector<std::string> words;
  std::string current;
  for (unsigned char c : text) {
    if (std::isalnum(c)) {
      current += static_cast<char>(std::tolower(c));
    } else if (!current.empty()) {
      words.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) words.push_back(std::move(current));
  return words;
}

struct StorySentence {
  std::string text;
  StoryLabel label;
};

struct StoryPrediction {
  Emotion emotion;
  double confidence_valence = 0.5;  // posterior of the predicted valence class
  double confidence_arousal = 0.5;
};

/// Two independent binary multinomial Naive Bayes models (valence, arousal)
/// over L2-normalized tf-idf vectors, with smoothed idf
///   idf(w) = ln((1 + N) / (1 + df(w))) + 1
/// and additive smoothing 1 on the class-conditional word weights.
class StoryClassifier {
 public:
  static constexpr double kSmoothing = 1.0;

  struct Word {
    double idf = 1.0;
    // log P(w | class) indexed [dimension][class]; dimension 0 = valence.
    std::array<std::array<double, 2>, 2> loglik{};
  };

  /// Sparse tf-idf vector over the training vocabulary, L2-normalized.
  /// Out-of-vocabulary words are ignored.
  std::map<std::string, double> vectorize(std::string_view text) const {
    std::map<std::string, double> tf;
    for (auto& w : tokenize_words(text))
      if (words_.count(w)) tf[w] += 1.0;
    return normalize(tf, [&](const std::string& w) { return words_.at(w).idf; });
  }

  /// Per-dimension class log-scores for an already weighted vector.
  std::array<std::array<double, 2>, 2> log_scores(const std::map<std::string, double>& x) const {
    auto scores = log_prior_;
    for (const auto& [w, weight] : x) {
      const auto& word = words_.at(w);
      for (int d = 0; d < 2; ++d)
        for (int c = 0; c < 2; ++c) scores[d][c] += weight * word.loglik[d][c];
    }
    return scores;
  }

  StoryPrediction classify(std::string_view sentence) const { return predict(vectorize(sentence)); }

  StoryPrediction predict(const std::map<std::string, double>& x) const {
    const auto scores = log_scores(x);
    StoryPrediction p;
    std::array<double, 2> confidence{};
    std::array<int, 2> cls{};
    for (int d = 0; d < 2; ++d) {
      cls[d] = scores[d][1] > scores[d][0] ? 1 : 0;
      // Posterior of the winning class: 1 / (1 + exp(loser - winner)).
      confidence[d] = 1.0 / (1.0 + std::exp(scores[d][1 - cls[d]] - scores[d][cls[d]]));
    }
    p.emotion = {cls[0], cls[1]};
    p.confidence_valence = confidence[0];
    p.confidence_arousal = confidence[1];
    return p;
  }

  const std::map<std::string, Word>& words() const { return words_; }
  const std::array<std::array<double, 2>, 2>& log_prior() const { return log_prior_; }
  std::size_t document_count() const { return documents_; }

  std::string to_text() const {
    std::ostringstream out;
    model_io::write_header(out, "story-nb", false);
    out << "documents " << documents_ << '\n' << "words " << words_.size() << '\n';
    out << "prior valence " << log_prior_[0][0] << ' ' << log_prior_[0][1] << '\n';
    out << "prior arousal " << log_prior_[1][0] << ' ' << log_prior_[1][1] << '\n';
    for (const auto& [w, word] : words_)
      out << w << ' ' << word.idf << ' ' << word.loglik[0][0] << ' ' << word.loglik[0][1] << ' '
          << word.loglik[1][0] << ' ' << word.loglik[1][1] << '\n';
    return out.str();
  }

  static StoryClassifier from_text(const std::string& text) {
    std::istringstream in(text);
    model_io::expect_header(in, "story-nb", false);
    StoryClassifier clf;
    clf.documents_ = model_io::read_field<std::size_t>(in, "documents");
    const auto n = model_io::read_field<std::size_t>(in, "words");
    for (const char* dim : {"valence", "arousal"}) {
      std::string key, name;
      if (!(in >> key >> name) || key != "prior" || name != dim)
        throw Error(ErrorCode::ModelFormat, std::string("expected prior ") + dim);
      const int d = name == "valence" ? 0 : 1;
      clf.log_prior_[d][0] = model_io::read_double(in);
      clf.log_prior_[d][1] = model_io::read_double(in);
    }
    for (std::size_t i = 0; i < n; ++i) {
      std::string w;
      if (!(in >> w)) throw Error(ErrorCode::ModelFormat, "truncated word table");
      Word word;
      word.idf = model_io::read_double(in);
      for (auto& dim : word.loglik)
        for (double& v : dim) v = model_io::read_double(in);
      clf.words_.emplace(std::move(w), word);
    }
    return clf;
  }

  template <typename IdfFn>
  static std::map<std::string, double> normalize(std::map<std::string, double> tf, IdfFn idf) {
    double norm = 0.0;
    for (auto& [w, v] : tf) {
      v *= idf(w);
      norm += v * v;
    }
    if (norm > 0.0) {
      norm = std::sqrt(norm);
      for (auto& [w, v] : tf) v /= norm;
    }
    return tf;
  }

 private:
  friend StoryClassifier train_story_classifier(std::span<const StorySentence>);

  std::map<std::string, Word> words_;
  std::array<std::array<double, 2>, 2> log_prior_{};
  std::size_t documents_ = 0;
};

inline StoryClassifier train_story_classifier(std::span<const StorySentence> sentences) {
  StoryClassifier clf;
  const std::size_t n = sentences.size();
  clf.documents_ = n;

  std::vector<std::map<std::string, double>> tf(n);
  std::map<std::string, double> df;
  std::array<std::array<double, 2>, 2> class_docs{};
  for (std::size_t i = 0; i < n; ++i) {
    for (auto& w : tokenize_words(sentences[i].text)) tf[i][w] += 1.0;
    for (const auto& [w, c] : tf[i]) df[w] += 1.0;
    const Emotion e = map_emotion(sentences[i].label);
    class_docs[0][e.valence] += 1;
    class_docs[1][e.arousal] += 1;
  }
  for (int d = 0; d < 2; ++d)
    for (int c = 0; c < 2; ++c)
      if (class_docs[d][c] == 0)
        throw Error(ErrorCode::MissingClass, std::string("no training sentence with ") +
                                                 (d == 0 ? "valence " : "arousal ") + std::to_string(c));

  for (const auto& [w, count] : df)
    clf.words_[w].idf = std::log((1.0 + static_cast<double>(n)) / (1.0 + count)) + 1.0;

  // Class-conditional sums of tf-idf weights.
  std::map<std::string, std::array<std::array<double, 2>, 2>> mass;
  std::array<std::array<double, 2>, 2> total{};
  for (std::size_t i = 0; i < n; ++i) {
    const Emotion e = map_emotion(sentences[i].label);
    const int cls[2] = {e.valence, e.arousal};
    const auto x = StoryClassifier::normalize(tf[i], [&](const std::string& w) { return clf.words_[w].idf; });
    for (const auto& [w, v] : x)
      for (int d = 0; d < 2; ++d) {
        mass[w][d][cls[d]] += v;
        total[d][cls[d]] += v;
      }
  }
  const double vocab = static_cast<double>(clf.words_.size());
  for (auto& [w, word] : clf.words_)
    for (int d = 0; d < 2; ++d)
      for (int c = 0; c < 2; ++c)
        word.loglik[d][c] = std::log((mass[w][d][c] + StoryClassifier::kSmoothing) /
                                     (total[d][c] + StoryClassifier::kSmoothing * vocab));
  for (int d = 0; d < 2; ++d)
    for (int c = 0; c < 2; ++c) clf.log_prior_[d][c] = std::log(class_docs[d][c] / static_cast<double>(n));
  return clf;
}

/// CSV with header "text,label" and labels Happy, Calm, Agitated or
/// Suspenseful.
inline std::vector<StorySentence> read_story_csv(const std::string& text) {
  std::vector<StorySentence> out;
  for (auto& row : csv::read(text, {"text", "label"}))
    out.push_back({row[0], parse_story_label(row[1])});
  return out;
}

}  // namespace bardo

#endif  // BARDO_SCORERS_STORY_CLASSIFIER_HPP
