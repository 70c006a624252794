#ifndef BARDO_LOG_HPP
#define BARDO_LOG_HPP

#include <memory>

#include <spdlog/sinks/stdout_sinks.h>
#include <spdlog/spdlog.h>

namespace bardo {

// Shared library logger; writes to stderr at warn level unless reconfigured.
inline std::shared_ptr<spdlog::logger> logger() {
  static std::shared_ptr<spdlog::logger> instance = [] {
    auto existing = spdlog::get("bardo");
    if (existing) return existing;
    auto created = spdlog::stderr_logger_mt("bardo");
    created->set_level(spdlog::level::warn);
    return created;
  }();
  return instance;
}

}  // namespace bardo

#endif  // BARDO_LOG_HPP
