// Copyright 2026 The Casewall Authors
//
//    Licensed under the Apache License, Version 2.0 (the "License");
//    you may not use this file except in compliance with the License.
//    You may obtain a copy of the License at
//
//        http://www.apache.org/licenses/LICENSE-2.0
//
//    Unless required by applicable law or agreed to in writing, software
//    distributed under the License is distributed on an "AS IS" BASIS,
//    WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
//    See the License for the specific language governing permissions and
//    limitations under the License.

// HTTP and WebSocket front end for a SessionService, on one port.
//
//   GET  /corpora
//   POST /sessions                          {"corpus_id", "condition"}
//   GET  /sessions
//   GET  /sessions/{id}
//   POST /sessions/{id}/join                {"role"}
//   POST /sessions/{id}/leave               bearer
//   POST /sessions/{id}/ops                 bearer, operation JSON
//   GET  /sessions/{id}/documents           bearer
//   GET  /sessions/{id}/documents/{doc_id}  bearer
//   GET  /sessions/{id}/graph
//   GET  /sessions/{id}/log
//   GET  /sessions/{id}/snapshot
//   WS   /sessions/{id}/live                wire messages
//
// Bearer means "Authorization: Bearer <token>" with the token from join.

#pragma once

#include <cstdint>
#include <memory>
#include <string>

#include <json.hpp>

#include "casewall/session.hpp"

namespace casewall {

struct ServerOptions {
  std::string address = "127.0.0.1";
  std::uint16_t port = 8080;  // 0 picks a free port
  int threads = 1;
};

struct HttpResponse {
  int status = 200;
  std::string content_type = "application/json";
  std::string body;
};

/// Routes one request. Transport-free so the routing can be unit tested.
HttpResponse handle_http(SessionService& service, const std::string& method, const std::string& target,
                         const std::string& authorization, const std::string& body);

class Server {
 public:
  /// Binds immediately; throws Error when the address is unusable.
  Server(SessionService& service, ServerOptions options);
  ~Server();
  Server(const Server&) = delete;
  Server& operator=(const Server&) = delete;

  std::uint16_t port() const;
  /// Serves until stop(); blocks the calling thread.
  void run();
  /// Safe from any thread.
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace casewall
