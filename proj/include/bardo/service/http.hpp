#ifndef BARDO_SERVICE_HTTP_HPP
#define BARDO_SERVICE_HTTP_HPP

#include <httplib.h>

#include "bardo/service/session_service.hpp"

namespace bardo {

/// Registers the /api/v1 routes of `service` on `server`.
inline void mount(httplib::Server& server, SessionService& service) {
  auto send = [](httplib::Response& res, const ServiceResponse& r) {
    res.status = r.status;
    res.set_content(r.body, r.content_type);
  };
  for (const char* path : {"/api/v1/healthz", "/healthz"})
    server.Get(path, [&service, send](const httplib::Request&, httplib::Response& res) {
      send(res, service.health());
    });
  server.Post("/api/v1/sessions", [&service, send](const httplib::Request& req, httplib::Response& res) {
    send(res, service.create_session(req.body));
  });
  server.Post(R"(/api/v1/sessions/([^/]+)/sentences)",
              [&service, send](const httplib::Request& req, httplib::Response& res) {
                send(res, service.post_sentence(req.matches[1], req.body));
              });
  server.Get(R"(/api/v1/sessions/([^/]+)/piece)", [&service, send](const httplib::Request& req, httplib::Response& res) {
    send(res, service.get_piece(req.matches[1]));
  });
  server.Get(R"(/api/v1/sessions/([^/]+))", [&service, send](const httplib::Request& req, httplib::Response& res) {
    send(res, service.get_session(req.matches[1]));
  });
  server.Delete(R"(/api/v1/sessions/([^/]+))", [&service, send](const httplib::Request& req, httplib::Response& res) {
    send(res, service.delete_session(req.matches[1]));
  });
  server.set_exception_handler([](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
    std::string message = "internal error";
    try {
      if (ep) std::rethrow_exception(ep);
    } catch (const std::exception& e) {
      message = e.what();
    } catch (...) {
    }
    res.status = 500;
    res.set_content(nlohmann::json{{"error", {{"code", "internal"}, {"message", message}}}}.dump(), "application/json");
  });
  server.set_error_handler([](const httplib::Request&, httplib::Response& res) {
    if (!res.body.empty()) return;
    res.set_content(nlohmann::json{{"error", {{"code", res.status == 404 ? "not_found" : "http_error"},
                                              {"message", "no such route"}}}}.dump(),
                    "application/json");
  });
}

}  // namespace bardo

#endif  // BARDO_SERVICE_HTTP_HPP
