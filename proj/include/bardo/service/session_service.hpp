#ifndef BARDO_SERVICE_SESSION_SERVICE_HPP
#define BARDO_SERVICE_SESSION_SERVICE_HPP

// Request handling for the session API, independent of the HTTP transport.
// Bodies are JSON; errors are {"error": {"code": ..., "message": ...}}.

#include <atomic>
#include <condition_variable>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <random>
#include <string>

#include <json.hpp>

#include "bardo/composer/session.hpp"
#include "bardo/corpus/digest.hpp"

namespace bardo {

enum class SeedPolicy { Fixed, PerSession };

struct ServiceOptions {
  SessionConfig defaults;
  SeedPolicy seed_policy = SeedPolicy::PerSession;
  std::string log_dir;  // flushed sessions land here when non-empty
  int max_tokens_limit = 8192;
};

struct ServiceResponse {
  int status = 200;
  std::string content_type = "application/json";
  std::string body;
};

class SessionService {
 public:
  SessionService(std::shared_ptr<const ScorerBundle> bundle, std::shared_ptr<const StoryClassifier> classifier,
                 std::shared_ptr<const SeedLibrary> library, ServiceOptions options)
      : bundle_(std::move(bundle)),
        classifier_(std::move(classifier)),
        library_(std::move(library)),
        options_(std::move(options)) {
    // Fail at startup rather than on the first session.
    ComposerSession probe(bundle_, classifier_, library_, options_.defaults);
  }

  ServiceResponse health() const { return json_response(200, {{"status", "ok"}}); }

  ServiceResponse create_session(const std::string& body) {
    nlohmann::json req = nlohmann::json::object();
    if (!body.empty() && body.find_first_not_of(" \t\r\n") != std::string::npos) {
      auto parsed = parse_body(body);
      if (!parsed) return error(400, "bad_json", "request body is not valid JSON");
      req = std::move(*parsed);
      if (!req.is_object()) return error(400, "bad_request", "request body must be a JSON object");
    }
    SessionConfig config = options_.defaults;
    try {
      read_int(req, "beam_size", config.beam_size, 1, 1024);
      read_int(req, "expansion_k", config.expansion_k, 1, bundle_->vocab.size);
      read_int(req, "timestep_rate", config.timestep_rate, 1, 1000);
      read_int(req, "max_new_tokens", config.max_new_tokens, 1, options_.max_tokens_limit);
      if (req.contains("sentence_seconds")) {
        const auto& v = req["sentence_seconds"];
        if (!v.is_number() || !(v.get<double>() > 0.0))
          throw FieldError{"sentence_seconds must be a positive number"};
        config.sentence_seconds = v.get<double>();
      }
      if (req.contains("seed")) {
        if (!req["seed"].is_number_unsigned()) throw FieldError{"seed must be a non-negative integer"};
        config.rng_seed = req["seed"].get<std::uint64_t>();
      } else if (options_.seed_policy == SeedPolicy::PerSession) {
        std::random_device rd;
        config.rng_seed = (static_cast<std::uint64_t>(rd()) << 32) | rd();
      }
    } catch (const FieldError& e) {
      return error(400, "invalid_field", e.message);
    }

    auto entry = std::make_shared<Entry>(ComposerSession(bundle_, classifier_, library_, config));
    std::string id;
    {
      std::lock_guard lock(registry_mutex_);
      id = "s" + std::to_string(++next_id_);
      sessions_.emplace(id, entry);
    }
    return json_response(201, {{"session_id", id}});
  }

  ServiceResponse post_sentence(const std::string& id, const std::string& body) {
    auto entry = find(id);
    if (!entry) return not_found(id);
    auto parsed = parse_body(body);
    if (!parsed) return error(400, "bad_json", "request body is not valid JSON");
    const auto& req = *parsed;
    if (!req.is_object()) return error(400, "bad_request", "request body must be a JSON object");
    if (!req.contains("text") || !req["text"].is_string())
      return error(400, "missing_field", "field 'text' (string) is required");
    std::optional<double> duration;
    if (req.contains("duration_seconds") && !req["duration_seconds"].is_null()) {
      const auto& d = req["duration_seconds"];
      if (!d.is_number() || !(d.get<double>() > 0.0))
        return error(400, "invalid_field", "duration_seconds must be a positive number");
      duration = d.get<double>();
    }
    std::optional<Emotion> override_emotion;
    if (req.contains("emotion_override") && !req["emotion_override"].is_null()) {
      const auto& o = req["emotion_override"];
      auto bit = [&](const char* key) -> std::optional<int> {
        if (!o.is_object() || !o.contains(key) || !o[key].is_number_integer()) return std::nullopt;
        const int v = o[key].get<int>();
        return (v == 0 || v == 1) ? std::optional<int>(v) : std::nullopt;
      };
      const auto v = bit("v");
      const auto a = bit("a");
      if (!v || !a) return error(400, "invalid_field", "emotion_override must be {\"v\": 0|1, \"a\": 0|1}");
      override_emotion = Emotion{*v, *a};
    }

    Turn turn(*entry);
    if (entry->closed) return not_found(id);
    try {
      const Excerpt ex = entry->session.process_sentence(req["text"].get<std::string>(), duration, override_emotion);
      return json_response(200, {{"valence", ex.emotion.valence},
                                 {"arousal", ex.emotion.arousal},
                                 {"confidence_v", ex.confidence_valence},
                                 {"confidence_a", ex.confidence_arousal},
                                 {"reseeded", ex.reseeded},
                                 {"short", ex.is_short},
                                 {"excerpt_midi_b64", base64_encode(ex.midi)},
                                 {"excerpt_seconds", ex.seconds}});
    } catch (const Error& e) {
      return error(422, std::string(to_string(e.code())), e.what());
    }
  }

  ServiceResponse get_session(const std::string& id) {
    auto entry = find(id);
    if (!entry) return not_found(id);
    std::lock_guard lock(entry->mutex);
    const auto& s = entry->session;
    nlohmann::json sentences = nlohmann::json::array();
    for (const auto& r : s.log())
      sentences.push_back({{"text", r.text},
                           {"valence", r.emotion.valence},
                           {"arousal", r.emotion.arousal},
                           {"override", r.overridden},
                           {"event", std::string(to_string(r.event))},
                           {"reseeded", r.event == SentenceEvent::Reseed},
                           {"short", r.is_short},
                           {"target_seconds", r.target_seconds},
                           {"excerpt_seconds", r.excerpt_seconds}});
    return json_response(200, {{"session_id", id}, {"sentences", sentences}, {"total_seconds", s.total_seconds()}});
  }

  ServiceResponse get_piece(const std::string& id) {
    auto entry = find(id);
    if (!entry) return not_found(id);
    std::lock_guard lock(entry->mutex);
    const auto bytes = entry->session.export_piece();
    return {200, "audio/midi", std::string(bytes.begin(), bytes.end())};
  }

  ServiceResponse delete_session(const std::string& id) {
    std::shared_ptr<Entry> entry;
    {
      std::lock_guard lock(registry_mutex_);
      auto it = sessions_.find(id);
      if (it == sessions_.end()) return not_found(id);
      entry = it->second;
      sessions_.erase(it);
    }
    Turn turn(*entry);
    entry->closed = true;
    const bool flushed = flush(id, entry->session);
    return json_response(200, {{"session_id", id}, {"flushed", flushed}});
  }

  /// Flushes and drops every open session; used on shutdown.
  void flush_all() {
    std::map<std::string, std::shared_ptr<Entry>> open;
    {
      std::lock_guard lock(registry_mutex_);
      open.swap(sessions_);
    }
    for (auto& [id, entry] : open) {
      Turn turn(*entry);
      entry->closed = true;
      flush(id, entry->session);
    }
  }

  std::size_t session_count() const {
    std::lock_guard lock(registry_mutex_);
    return sessions_.size();
  }

 private:
  // Requests against one session take turns in arrival order.
  struct Entry {
    explicit Entry(ComposerSession s) : session(std::move(s)) {}
    std::mutex mutex;
    std::condition_variable cv;
    std::uint64_t next_ticket = 0;
    std::uint64_t serving = 0;
    bool closed = false;
    ComposerSession session;
  };

  class Turn {
   public:
    explicit Turn(Entry& e) : entry_(e), lock_(e.mutex) {
      const std::uint64_t ticket = entry_.next_ticket++;
      entry_.cv.wait(lock_, [&] { return entry_.serving == ticket; });
    }
    ~Turn() {
      ++entry_.serving;
      lock_.unlock();
      entry_.cv.notify_all();
    }
    Turn(const Turn&) = delete;
    Turn& operator=(const Turn&) = delete;

   private:
    Entry& entry_;
    std::unique_lock<std::mutex> lock_;
  };

  struct FieldError {
    std::string message;
  };

  static void read_int(const nlohmann::json& req, const char* key, int& out, int lo, int hi) {
    if (!req.contains(key)) return;
    const auto& v = req[key];
    if (!v.is_number_integer() || v.get<long long>() < lo || v.get<long long>() > hi)
      throw FieldError{std::string(key) + " must be an integer in [" + std::to_string(lo) + ", " +
                       std::to_string(hi) + "]"};
    out = v.get<int>();
  }

  static std::optional<nlohmann::json> parse_body(const std::string& body) {
    auto j = nlohmann::json::parse(body, nullptr, false);
    if (j.is_discarded()) return std::nullopt;
    return j;
  }

  static ServiceResponse json_response(int status, const nlohmann::json& j) { return {status, "application/json", j.dump()}; }

  static ServiceResponse error(int status, const std::string& code, const std::string& message) {
    return json_response(status, {{"error", {{"code", code}, {"message", message}}}});
  }

  static ServiceResponse not_found(const std::string& id) {
    return error(404, "not_found", "no session with id '" + id + "'");
  }

  std::shared_ptr<Entry> find(const std::string& id) const {
    std::lock_guard lock(registry_mutex_);
    auto it = sessions_.find(id);
    return it == sessions_.end() ? nullptr : it->second;
  }

  bool flush(const std::string& id, const ComposerSession& session) const {
    if (options_.log_dir.empty()) return false;
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(options_.log_dir, ec);
    const fs::path base = fs::path(options_.log_dir) / id;
    try {
      const auto midi = session.export_piece();
      model_io::write_file(base.string() + ".mid", std::string(midi.begin(), midi.end()));
      model_io::write_file(base.string() + ".log.tsv", session.log_text());
      return true;
    } catch (const Error& e) {
      logger()->error("flushing session {} failed: {}", id, e.what());
      return false;
    }
  }

  std::shared_ptr<const ScorerBundle> bundle_;
  std::shared_ptr<const StoryClassifier> classifier_;
  std::shared_ptr<const SeedLibrary> library_;
  ServiceOptions options_;
  mutable std::mutex registry_mutex_;
  std::map<std::string, std::shared_ptr<Entry>> sessions_;
  std::uint64_t next_id_ = 0;
};

}  // namespace bardo

#endif  // BARDO_SERVICE_SESSION_SERVICE_HPP
