// bardo: corpus preparation, model training, batch composition and the
// session service.

#include <algorithm>
#include <csignal>
#include <filesystem>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "bardo/bardo.hpp"
#include "bardo/service/http.hpp"

namespace fs = std::filesystem;
using namespace bardo;

namespace {

/// Raised for unusable paths; maps to exit status 2.
struct PathError {
  std::string path;
  std::string what;
};

void require_dir(const std::string& path) {
  if (!fs::is_directory(path)) throw PathError{path, "not a directory"};
}

void require_file(const std::string& path) {
  if (!fs::is_regular_file(path)) throw PathError{path, "no such file"};
}

std::vector<std::uint8_t> read_bytes(const fs::path& path) {
  const std::string s = model_io::read_file(path.string());
  return {s.begin(), s.end()};
}

void write_bytes(const fs::path& path, const std::vector<std::uint8_t>& bytes) {
  model_io::write_file(path.string(), std::string(bytes.begin(), bytes.end()));
}

bool is_midi(const fs::path& p) {
  auto ext = p.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  return ext == ".mid" || ext == ".midi";
}

/// MIDI files under `dir`, recursively, in path order.
std::vector<fs::path> list_midi(const std::string& dir) {
  require_dir(dir);
  std::vector<fs::path> out;
  for (const auto& e : fs::recursive_directory_iterator(dir))
    if (e.is_regular_file() && is_midi(e.path())) out.push_back(e.path());
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<LabeledPiece> load_labeled(const std::string& labels_csv, int rate) {
  require_file(labels_csv);
  const fs::path base = fs::path(labels_csv).parent_path();
  std::vector<LabeledPiece> out;
  for (const auto& row : read_labels(model_io::read_file(labels_csv))) {
    const fs::path p = fs::path(row.path).is_absolute() ? fs::path(row.path) : base / row.path;
    require_file(p.string());
    out.push_back({parse_midi(read_bytes(p), rate), row.valence, row.arousal, row.path});
  }
  return out;
}

struct ModelPaths {
  std::string lm, valence, arousal, story, library;

  void add_options(CLI::App* app, bool env) {
    auto opt = [&](const char* flag, std::string& target, const char* help, const char* env_name) {
      auto* o = app->add_option(flag, target, help)->required();
      if (env) o->envname(env_name);
    };
    opt("--lm", lm, "language model file", "COMPOSER_LM");
    opt("--valence-model", valence, "music valence model file", "COMPOSER_VALENCE_MODEL");
    opt("--arousal-model", arousal, "music arousal model file", "COMPOSER_AROUSAL_MODEL");
    opt("--story-model", story, "story classifier file", "COMPOSER_STORY_MODEL");
    opt("--library", library, "seed library file", "COMPOSER_LIBRARY");
  }
};

struct LoadedModels {
  std::shared_ptr<const ScorerBundle> bundle;
  std::shared_ptr<const StoryClassifier> classifier;
  std::shared_ptr<const SeedLibrary> library;
};

LoadedModels load_models(const ModelPaths& paths) {
  for (const auto* p : {&paths.lm, &paths.valence, &paths.arousal, &paths.story, &paths.library})
    require_file(*p);
  auto bundle = std::make_shared<ScorerBundle>();
  bundle->lm = std::make_shared<NGramModel>(NGramModel::from_text(model_io::read_file(paths.lm)));
  bundle->valence = std::make_shared<LogisticEmotionScorer>(
      LogisticEmotionScorer::from_text(model_io::read_file(paths.valence)));
  bundle->arousal = std::make_shared<LogisticEmotionScorer>(
      LogisticEmotionScorer::from_text(model_io::read_file(paths.arousal)));
  bundle->validate();
  auto classifier = std::make_shared<StoryClassifier>(StoryClassifier::from_text(model_io::read_file(paths.story)));
  auto library = std::make_shared<SeedLibrary>(SeedLibrary::from_text(model_io::read_file(paths.library)));
  library->validate();
  return {bundle, classifier, library};
}

void add_session_options(CLI::App* app, SessionConfig& cfg, bool env) {
  auto maybe_env = [&](CLI::Option* o, const char* name) {
    if (env) o->envname(name);
  };
  maybe_env(app->add_option("-b,--beam-size", cfg.beam_size, "beam size")->check(CLI::PositiveNumber)->capture_default_str(),
            "COMPOSER_BEAM_SIZE");
  maybe_env(app->add_option("-k,--expansion-k", cfg.expansion_k, "children kept per beam member")
                ->check(CLI::Range(1, kVocabSize))
                ->capture_default_str(),
            "COMPOSER_EXPANSION_K");
  maybe_env(app->add_option("--timestep-rate", cfg.timestep_rate, "timesteps per second")
                ->check(CLI::PositiveNumber)
                ->capture_default_str(),
            "COMPOSER_TIMESTEP_RATE");
  maybe_env(app->add_option("--sentence-seconds", cfg.sentence_seconds, "default excerpt length in seconds")
                ->check(CLI::PositiveNumber)
                ->capture_default_str(),
            "COMPOSER_SENTENCE_SECONDS");
  maybe_env(app->add_option("--max-new-tokens", cfg.max_new_tokens, "token cap per excerpt")
                ->check(CLI::PositiveNumber)
                ->capture_default_str(),
            "COMPOSER_MAX_NEW_TOKENS");
}

// ---------------------------------------------------------------------------
// corpus
// ---------------------------------------------------------------------------

void corpus_extract(const std::string& in, const std::string& out) {
  const auto files = list_midi(in);
  fs::create_directories(out);
  std::size_t kept = 0, skipped = 0;
  for (const auto& p : files) {
    try {
      auto piano = extract_piano_tracks(read_bytes(p));
      if (!piano) {
        ++skipped;
        continue;
      }
      write_bytes(fs::path(out) / fs::relative(p, in).filename(), *piano);
      ++kept;
    } catch (const Error& e) {
      std::cerr << p.string() << ": " << e.what() << '\n';
      ++skipped;
    }
  }
  std::cout << "kept " << kept << " of " << files.size() << " files (" << skipped << " without piano tracks or unreadable)\n";
}

void corpus_dedup(const std::string& in, const std::string& out, int rate) {
  std::vector<SourceFile> files;
  for (const auto& p : list_midi(in)) files.push_back({fs::relative(p, in).string(), read_bytes(p)});
  const CorpusManifest manifest = dedup(files, rate);
  fs::create_directories(out);
  for (const auto& e : manifest.entries) {
    const fs::path target = fs::path(out) / e.path;
    fs::create_directories(target.parent_path());
    fs::copy_file(fs::path(in) / e.path, target, fs::copy_options::overwrite_existing);
  }
  model_io::write_file((fs::path(out) / "manifest.txt").string(), to_text(manifest));
  std::cout << manifest.piece_count << " unique of " << files.size() << " files, " << manifest.token_count
            << " tokens\n";
}

void corpus_augment(const std::string& in, const std::string& out, int rate) {
  fs::create_directories(out);
  std::size_t written = 0;
  for (const auto& p : list_midi(in)) {
    const Piece piece = parse_midi(read_bytes(p), rate);
    if (piece.empty()) {
      std::cerr << p.string() << ": no notes, skipped\n";
      continue;
    }
    const auto variants = augment(piece);
    for (std::size_t i = 0; i < variants.size(); ++i) {
      const fs::path target = fs::path(out) / (p.stem().string() + "_aug" + std::to_string(i) + ".mid");
      write_bytes(target, write_midi(variants[i]));
      ++written;
    }
  }
  std::cout << "wrote " << written << " augmented files\n";
}

void corpus_slice(const std::string& labels, const std::string& out, int rate) {
  fs::create_directories(out);
  std::vector<LabelRow> rows;
  for (const auto& lp : load_labeled(labels, rate)) {
    std::vector<LabeledPiece> slices;
    try {
      slices = slice_all(lp);
    } catch (const Error& e) {
      std::cerr << lp.source_id << ": " << e.what() << '\n';
      continue;
    }
    for (const auto& s : slices) {
      std::string name = fs::path(s.source_id).filename().string();
      std::replace(name.begin(), name.end(), '#', '_');
      name += ".mid";
      write_bytes(fs::path(out) / name, write_midi(s.piece));
      rows.push_back({name, s.valence, s.arousal});
    }
  }
  model_io::write_file((fs::path(out) / "labels.csv").string(), write_labels(rows));
  std::cout << "wrote " << rows.size() << " slices\n";
}

// ---------------------------------------------------------------------------
// train
// ---------------------------------------------------------------------------

void train_lm_cmd(const std::string& dir, int order, double alpha, int rate, bool with_augment,
                  const std::string& out) {
  std::vector<TokenSeq> corpus;
  for (const auto& p : list_midi(dir)) {
    try {
      const Piece piece = parse_midi(read_bytes(p), rate);
      if (with_augment && !piece.empty()) {
        for (const auto& v : augment(piece)) corpus.push_back(encode(v));
      } else {
        corpus.push_back(encode(piece));
      }
    } catch (const Error& e) {
      std::cerr << p.string() << ": " << e.what() << '\n';
    }
  }
  // Hold out every fifth sequence for a perplexity report.
  std::vector<TokenSeq> train, held;
  for (std::size_t i = 0; i < corpus.size(); ++i) (i % 5 == 4 ? held : train).push_back(corpus[i]);
  if (!train.empty() && !held.empty()) {
    const NGramModel probe = train_lm(train, order, alpha);
    double lp = 0.0;
    std::size_t n = 0;
    for (const auto& s : held) {
      lp += probe.logprob(s);
      n += s.size();
    }
    std::cout << "held-out perplexity " << std::exp(-lp / static_cast<double>(n)) << " over " << n << " tokens\n";
  }
  const NGramModel model = train_lm(corpus, order, alpha);
  model_io::write_file(out, model.to_text());
  std::cout << "trained order-" << order << " model on " << corpus.size() << " sequences, " << model.context_count()
            << " contexts -> " << out << '\n';
}

double accuracy(const EmotionScorer& scorer, std::span<const LabeledPiece> data, EmotionDimension dim) {
  if (data.empty()) return 0.0;
  std::size_t hit = 0;
  for (const auto& lp : data) {
    const int label = dim == EmotionDimension::Valence ? lp.valence : lp.arousal;
    if ((scorer.score(encode(lp.piece)) >= 0.5 ? 1 : 0) == label) ++hit;
  }
  return static_cast<double>(hit) / static_cast<double>(data.size());
}

void train_music_emotion_cmd(const std::string& labels, const std::string& dimension, int rate, bool slices,
                             const std::string& out) {
  const EmotionDimension dim = dimension == "valence" ? EmotionDimension::Valence : EmotionDimension::Arousal;
  const auto data = load_labeled(labels, rate);
  auto expand = [&](std::span<const LabeledPiece> pieces) {
    std::vector<LabeledPiece> all(pieces.begin(), pieces.end());
    if (slices)
      for (const auto& lp : pieces) {
        try {
          auto s = slice_all(lp);
          all.insert(all.end(), s.begin(), s.end());
        } catch (const Error&) {
        }
      }
    return all;
  };
  std::vector<LabeledPiece> train, held;
  for (std::size_t i = 0; i < data.size(); ++i) (i % 5 == 4 ? held : train).push_back(data[i]);
  try {
    const auto probe = train_emotion_scorer(expand(train), dim);
    std::cout << "held-out " << dimension << " accuracy " << accuracy(probe, held, dim) << " on " << held.size()
              << " pieces\n";
  } catch (const Error& e) {
    std::cout << "no held-out report: " << e.what() << '\n';
  }
  const auto model = train_emotion_scorer(expand(data), dim);
  model_io::write_file(out, model.to_text());
  std::cout << "training " << dimension << " accuracy " << accuracy(model, data, dim) << " -> " << out << '\n';
}

void train_story_cmd(const std::string& csv_path, const std::string& out) {
  require_file(csv_path);
  const auto sentences = read_story_csv(model_io::read_file(csv_path));
  // 5-fold cross-validation when every fold can train.
  constexpr std::size_t kFolds = 5;
  std::size_t hit_v = 0, hit_a = 0, tested = 0;
  for (std::size_t fold = 0; fold < kFolds && sentences.size() >= kFolds; ++fold) {
    std::vector<StorySentence> train, test;
    for (std::size_t i = 0; i < sentences.size(); ++i) (i % kFolds == fold ? test : train).push_back(sentences[i]);
    try {
      const auto clf = train_story_classifier(train);
      for (const auto& s : test) {
        const auto p = clf.classify(s.text);
        const auto truth = map_emotion(s.label);
        hit_v += p.emotion.valence == truth.valence;
        hit_a += p.emotion.arousal == truth.arousal;
        ++tested;
      }
    } catch (const Error&) {
    }
  }
  if (tested)
    std::cout << "cross-validated accuracy: valence " << static_cast<double>(hit_v) / tested << ", arousal "
              << static_cast<double>(hit_a) / tested << " over " << tested << " sentences\n";
  const auto clf = train_story_classifier(sentences);
  model_io::write_file(out, clf.to_text());
  std::cout << "trained on " << sentences.size() << " sentences, " << clf.words().size() << " words -> " << out << '\n';
}

void library_build_cmd(const std::string& labels, int rate, const std::string& out) {
  SeedLibrary lib;
  for (const auto& lp : load_labeled(labels, rate))
    if (!lp.piece.empty()) lib.add(lp);
  lib.validate();
  model_io::write_file(out, lib.to_text());
  std::cout << "seed library with " << lib.size() << " entries -> " << out << '\n';
}

// ---------------------------------------------------------------------------
// compose / serve
// ---------------------------------------------------------------------------

void compose_cmd(const ModelPaths& paths, SessionConfig cfg, const std::string& transcript, const std::string& out,
                 std::string log_path) {
  require_file(transcript);
  const auto models = load_models(paths);
  const auto lines = parse_transcript(model_io::read_file(transcript));
  ComposerSession session(models.bundle, models.classifier, models.library, cfg);
  for (const auto& line : lines) {
    const auto ex = session.process_sentence(line.text, line.seconds);
    std::cout << "(" << ex.emotion.valence << "," << ex.emotion.arousal << ") " << (ex.reseeded ? "reseed " : "")
              << ex.seconds << "s" << (ex.is_short ? " short" : "") << "  " << line.text << '\n';
  }
  write_bytes(out, session.export_piece());
  if (log_path.empty()) log_path = out + ".log.tsv";
  model_io::write_file(log_path, session.log_text());
  std::cout << "wrote " << out << " and " << log_path << '\n';
}

httplib::Server* g_server = nullptr;

void on_signal(int) {
  if (g_server) g_server->stop();
}

void serve_cmd(const ModelPaths& paths, const ServiceOptions& options, const std::string& host, int port) {
  const auto models = load_models(paths);
  SessionService service(models.bundle, models.classifier, models.library, options);
  httplib::Server server;
  mount(server, service);
  g_server = &server;
  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);
  std::cout << "listening on " << host << ":" << port << std::endl;
  if (!server.listen(host, port)) {
    g_server = nullptr;
    throw Error(ErrorCode::Io, "cannot listen on " + host + ":" + std::to_string(port));
  }
  g_server = nullptr;
  service.flush_all();
  std::cout << "shut down\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"bardo: emotion-steered music composition from story sentences"};
  app.require_subcommand(1);
  int rate = kDefaultTimestepRate;

  app.add_subcommand("vocab", "print the token id table")->callback([] { std::cout << token_table(); });

  // corpus
  auto* corpus = app.add_subcommand("corpus", "dataset construction and augmentation");
  corpus->require_subcommand(1);
  std::string in_dir, out_dir, labels;
  auto add_io = [&](CLI::App* cmd, bool need_in) {
    if (need_in) cmd->add_option("--in", in_dir, "input directory")->required();
    cmd->add_option("--out", out_dir, "output directory")->required();
    cmd->add_option("--timestep-rate", rate, "timesteps per second")->check(CLI::PositiveNumber)->capture_default_str();
  };
  auto* extract = corpus->add_subcommand("extract-piano", "keep piano-family tracks");
  add_io(extract, true);
  auto* dedup_cmd = corpus->add_subcommand("dedup", "drop byte-identical files (MD5) and write manifest.txt");
  add_io(dedup_cmd, true);
  auto* augment_cmd = corpus->add_subcommand("augment", "write 108 transposed/tempo/velocity variants per file");
  add_io(augment_cmd, true);
  auto* slice_cmd = corpus->add_subcommand("slice", "slice labeled pieces into 2, 4, 8 and 16 parts");
  add_io(slice_cmd, false);
  slice_cmd->add_option("--labels", labels, "CSV path,valence,arousal")->required();

  // train
  auto* train = app.add_subcommand("train", "train models");
  train->require_subcommand(1);
  std::string model_out, source;
  int order = kDefaultLmOrder;
  double alpha = kDefaultLmAlpha;
  bool with_augment = false, with_slices = false;
  std::string dimension = "valence";
  auto* train_lm_sub = train->add_subcommand("lm", "n-gram music language model");
  train_lm_sub->add_option("dir", source, "directory of MIDI files")->required();
  train_lm_sub->add_option("--order", order, "n-gram order")->check(CLI::Range(1, NGramModel::kMaxOrder))->capture_default_str();
  train_lm_sub->add_option("--alpha", alpha, "additive smoothing")->check(CLI::NonNegativeNumber)->capture_default_str();
  train_lm_sub->add_flag("--augment", with_augment, "train on the 108 augmented variants of each piece");
  train_lm_sub->add_option("--timestep-rate", rate, "timesteps per second")->check(CLI::PositiveNumber)->capture_default_str();
  train_lm_sub->add_option("-o,--out", model_out, "model file")->required();

  auto* train_me = train->add_subcommand("music-emotion", "logistic valence or arousal scorer");
  train_me->add_option("labels", source, "CSV path,valence,arousal")->required();
  train_me->add_option("--dimension", dimension, "valence or arousal")
      ->check(CLI::IsMember({"valence", "arousal"}))
      ->capture_default_str();
  train_me->add_flag("--slices", with_slices, "add 2/4/8/16-part slices of each training piece");
  train_me->add_option("--timestep-rate", rate, "timesteps per second")->check(CLI::PositiveNumber)->capture_default_str();
  train_me->add_option("-o,--out", model_out, "model file")->required();

  auto* train_story = train->add_subcommand("story", "Naive Bayes story emotion classifier");
  train_story->add_option("csv", source, "CSV text,label")->required();
  train_story->add_option("-o,--out", model_out, "model file")->required();

  // library
  auto* library = app.add_subcommand("library", "seed libraries");
  library->require_subcommand(1);
  auto* library_build = library->add_subcommand("build", "first 4 timesteps of each labeled piece");
  library_build->add_option("labels", source, "CSV path,valence,arousal")->required();
  library_build->add_option("--timestep-rate", rate, "timesteps per second")->check(CLI::PositiveNumber)->capture_default_str();
  library_build->add_option("-o,--out", model_out, "library file")->required();

  // compose
  ModelPaths compose_paths;
  SessionConfig compose_cfg;
  std::string transcript, midi_out, log_out;
  auto* compose = app.add_subcommand("compose", "compose a piece for a transcript");
  compose_paths.add_options(compose, false);
  add_session_options(compose, compose_cfg, false);
  compose->add_option("--transcript", transcript, "one sentence per line, optional TAB seconds")->required();
  compose->add_option("-o,--out", midi_out, "output MIDI file")->required();
  compose->add_option("--log", log_out, "sidecar log (default <out>.log.tsv)");
  compose->add_option("--seed", compose_cfg.rng_seed, "random seed")->capture_default_str();

  // serve
  ModelPaths serve_paths;
  ServiceOptions serve_options;
  std::string host = "127.0.0.1";
  int port = 8080;
  std::string seed_policy = "random";
  auto* serve = app.add_subcommand("serve", "run the session service (env overrides: COMPOSER_*)");
  serve_paths.add_options(serve, true);
  add_session_options(serve, serve_options.defaults, true);
  serve->add_option("--host", host, "bind address")->envname("COMPOSER_HOST")->capture_default_str();
  serve->add_option("--port", port, "bind port")->envname("COMPOSER_PORT")->capture_default_str();
  serve->add_option("--seed-policy", seed_policy, "fixed or random per session")
      ->check(CLI::IsMember({"fixed", "random"}))
      ->envname("COMPOSER_SEED_POLICY")
      ->capture_default_str();
  serve->add_option("--seed", serve_options.defaults.rng_seed, "seed for the fixed policy")->envname("COMPOSER_SEED");
  serve->add_option("--log-dir", serve_options.log_dir, "where finished sessions are flushed")->envname("COMPOSER_LOG_DIR");

  CLI11_PARSE(app, argc, argv);

  try {
    if (extract->parsed()) corpus_extract(in_dir, out_dir);
    if (dedup_cmd->parsed()) corpus_dedup(in_dir, out_dir, rate);
    if (augment_cmd->parsed()) corpus_augment(in_dir, out_dir, rate);
    if (slice_cmd->parsed()) corpus_slice(labels, out_dir, rate);
    if (train_lm_sub->parsed()) train_lm_cmd(source, order, alpha, rate, with_augment, model_out);
    if (train_me->parsed()) train_music_emotion_cmd(source, dimension, rate, with_slices, model_out);
    if (train_story->parsed()) train_story_cmd(source, model_out);
    if (library_build->parsed()) library_build_cmd(source, rate, model_out);
    if (compose->parsed()) compose_cmd(compose_paths, compose_cfg, transcript, midi_out, log_out);
    if (serve->parsed()) {
      serve_options.seed_policy = seed_policy == "fixed" ? SeedPolicy::Fixed : SeedPolicy::PerSession;
      serve_cmd(serve_paths, serve_options, host, port);
    }
  } catch (const PathError& e) {
    std::cerr << "error: " << e.path << ": " << e.what << '\n';
    return 2;
  } catch (const Error& e) {
    std::cerr << "error (" << to_string(e.code()) << "): " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
