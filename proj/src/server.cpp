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

#include "casewall/server.hpp"

#include <boost/asio/dispatch.hpp>
#include <boost/asio/ip/tcp.hpp>
#include <boost/asio/post.hpp>
#include <boost/asio/strand.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/http.hpp>
#include <boost/beast/websocket.hpp>

#include <chrono>
#include <deque>
#include <thread>
#include <vector>

#include "casewall/graph.hpp"
#include "casewall/wire.hpp"

namespace casewall {

namespace beast = boost::beast;
namespace http = beast::http;
namespace websocket = beast::websocket;
namespace net = boost::asio;
using tcp = net::ip::tcp;
using json = nlohmann::json;

// --- routing ----------------------------------------------------------------------

namespace {

std::vector<std::string> path_segments(const std::string& target) {
  const auto path = target.substr(0, target.find('?'));
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < path.size()) {
    if (path[i] == '/') {
      ++i;
      continue;
    }
    const auto j = path.find('/', i);
    out.push_back(path.substr(i, j == std::string::npos ? std::string::npos : j - i));
    if (j == std::string::npos) break;
    i = j;
  }
  return out;
}

std::string bearer_token(const std::string& authorization) {
  static constexpr std::string_view kPrefix = "Bearer ";
  if (authorization.rfind(kPrefix, 0) != 0)
    throw ServiceError(ServiceError::Kind::Forbidden, "missing bearer token");
  return authorization.substr(kPrefix.size());
}

json parse_body(const std::string& body) {
  try {
    auto j = json::parse(body.empty() ? "{}" : body);
    if (!j.is_object()) throw ServiceError(ServiceError::Kind::BadRequest, "request body must be a JSON object");
    return j;
  } catch (const json::exception&) {
    throw ServiceError(ServiceError::Kind::BadRequest, "request body is not valid JSON");
  }
}

std::string string_field(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || !it->is_string())
    throw ServiceError(ServiceError::Kind::BadRequest, std::string("missing string field '") + key + "'");
  return it->get<std::string>();
}

json document_meta(const Document& d) {
  return {{"doc_id", d.doc_id},
          {"case_id", d.case_id},
          {"title", d.title},
          {"assigned_role", to_string(d.assigned_role)}};
}

json verdict_json(const Verdict& v) {
  switch (v.kind) {
    case Verdict::Kind::Accepted: return {{"verdict", "accepted"}, {"seq", v.seq}};
    case Verdict::Kind::Duplicate: return {{"verdict", "duplicate"}, {"seq", v.seq}};
    case Verdict::Kind::Rejected: return {{"verdict", "rejected"}, {"reason", v.reason}};
  }
  return {};
}

HttpResponse ok(const json& j, int status = 200) { return {status, "application/json", j.dump()}; }

HttpResponse error_response(int status, const std::string& message) {
  return {status, "application/json", json{{"error", message}}.dump()};
}

int status_for(ServiceError::Kind kind) {
  switch (kind) {
    case ServiceError::Kind::NotFound: return 404;
    case ServiceError::Kind::Conflict: return 409;
    case ServiceError::Kind::Forbidden: return 403;
    case ServiceError::Kind::BadRequest: return 400;
  }
  return 500;
}

HttpResponse route(SessionService& svc, const std::string& method, const std::vector<std::string>& seg,
                   const std::string& authorization, const std::string& body) {
  using Kind = ServiceError::Kind;
  const bool get = method == "GET";
  const bool post = method == "POST";

  if (seg.size() == 1 && seg[0] == "corpora" && get) return ok(json{{"corpora", svc.corpus_ids()}});

  if (seg.empty() || seg[0] != "sessions") throw ServiceError(Kind::NotFound, "no such endpoint");

  if (seg.size() == 1) {
    if (get) {
      json list = json::array();
      for (const auto& s : svc.list_sessions()) list.push_back(to_json(s));
      return ok(json{{"sessions", std::move(list)}});
    }
    if (post) {
      const auto j = parse_body(body);
      const auto condition = parse_condition(string_field(j, "condition"));
      if (!condition) throw ServiceError(Kind::BadRequest, "condition must be standard or translucence");
      const auto id = svc.create_session(string_field(j, "corpus_id"), *condition);
      return ok(to_json(svc.session_info(id)), 201);
    }
    throw ServiceError(Kind::BadRequest, "method not allowed");
  }

  const auto& id = seg[1];
  if (seg.size() == 2 && get) return ok(to_json(svc.session_info(id)));
  if (seg.size() < 3) throw ServiceError(Kind::NotFound, "no such endpoint");
  const auto& what = seg[2];

  if (seg.size() == 3 && post && what == "join") {
    const auto role = parse_role(string_field(parse_body(body), "role"));
    if (!role) throw ServiceError(Kind::BadRequest, "role must be analyst-A or analyst-B");
    const auto r = svc.join(id, *role);
    json docs = json::array();
    for (const auto& d : r.documents) docs.push_back(document_meta(d));
    return ok(json{{"token", r.token},
                   {"role", to_string(r.role)},
                   {"condition", to_string(r.condition)},
                   {"timer_minutes", wire::kTimerMinutes},
                   {"snapshot", wire::to_json(wire::snapshot_message(r.snapshot, r.condition))},
                   {"documents", std::move(docs)}});
  }
  if (seg.size() == 3 && post && what == "leave") {
    svc.leave(id, bearer_token(authorization));
    return ok(json{{"left", true}});
  }
  if (seg.size() == 3 && post && what == "ops") {
    const auto token = bearer_token(authorization);
    Operation op;
    try {
      op = operation_from_json(parse_body(body));
    } catch (const MalformedOperation& e) {
      throw ServiceError(Kind::BadRequest, e.what());
    }
    return ok(verdict_json(svc.submit(id, token, std::move(op))));
  }
  if (get && what == "documents") {
    const auto token = bearer_token(authorization);
    if (seg.size() == 3) {
      json docs = json::array();
      for (const auto& d : svc.documents(id, token)) docs.push_back(document_meta(d));
      return ok(json{{"documents", std::move(docs)}});
    }
    if (seg.size() == 4) {
      const auto d = svc.fetch_document(id, token, seg[3]);
      auto j = document_meta(d);
      j["body"] = d.body;
      return ok(j);
    }
  }
  if (seg.size() == 3 && get && what == "graph") return {200, "application/json", graph_to_text(svc.graph(id))};
  if (seg.size() == 3 && get && what == "log") return {200, "application/x-ndjson", svc.export_log(id)};
  if (seg.size() == 3 && get && what == "snapshot") {
    const auto info = svc.session_info(id);
    return ok(wire::to_json(wire::snapshot_message(svc.snapshot(id), info.condition)));
  }
  throw ServiceError(Kind::NotFound, "no such endpoint");
}

}  // namespace

HttpResponse handle_http(SessionService& service, const std::string& method, const std::string& target,
                         const std::string& authorization, const std::string& body) {
  try {
    return route(service, method, path_segments(target), authorization, body);
  } catch (const ServiceError& e) {
    return error_response(status_for(e.kind()), e.what());
  } catch (const std::exception& e) {
    return error_response(500, e.what());
  }
}

// --- live connections -------------------------------------------------------------

namespace {

class LiveSession : public std::enable_shared_from_this<LiveSession> {
 public:
  LiveSession(tcp::socket&& socket, SessionService& service, std::string session_id)
      : ws_(std::move(socket)), service_(service), session_id_(std::move(session_id)) {}

  ~LiveSession() { release(); }

  void run(http::request<http::string_body> req) {
    ws_.set_option(websocket::stream_base::timeout::suggested(beast::role_type::server));
    ws_.async_accept(req, beast::bind_front_handler(&LiveSession::on_accept, shared_from_this()));
  }

 private:
  void on_accept(beast::error_code ec) {
    if (ec) return;
    do_read();
  }

  void do_read() { ws_.async_read(buffer_, beast::bind_front_handler(&LiveSession::on_read, shared_from_this())); }

  void on_read(beast::error_code ec, std::size_t) {
    if (ec) {
      release();
      return;
    }
    const auto text = beast::buffers_to_string(buffer_.data());
    buffer_.consume(buffer_.size());
    handle(text);
    do_read();
  }

  void handle(const std::string& text) {
    try {
      auto message = wire::decode(text);
      if (auto* hello = std::get_if<wire::Hello>(&message)) {
        on_hello(*hello);
      } else if (auto* submit = std::get_if<wire::Submit>(&message)) {
        if (!connection_) throw Error("send hello first");
        const auto op_id = submit->op.op_id;
        const auto verdict = service_.submit(session_id_, token_, std::move(submit->op));
        if (auto reply = wire::verdict_message(op_id, verdict)) send(wire::encode(*reply));
      } else {
        throw Error("unexpected message type '" + std::string(wire::type_name(message)) + "'");
      }
    } catch (const std::exception& e) {
      send(wire::encode(wire::ErrorMsg{e.what()}));
    }
  }

  void on_hello(const wire::Hello& hello) {
    if (connection_) throw Error("already joined");
    if (hello.session != session_id_) throw Error("hello names a different session");
    bool implicit = false;
    if (hello.token) {
      token_ = *hello.token;
    } else {
      token_ = service_.join(session_id_, hello.role).token;
      implicit = true;
    }
    std::weak_ptr<LiveSession> weak = shared_from_this();
    auto executor = ws_.get_executor();
    auto sink = [weak, executor](const wire::Message& m) {
      net::post(executor, [weak, text = wire::encode(m)]() mutable {
        if (auto self = weak.lock()) self->send(std::move(text));
      });
    };
    SessionService::ConnectionId id = 0;
    wire::SnapshotMsg snap;
    try {
      snap = service_.connect(session_id_, token_, sink, id);
    } catch (...) {
      if (implicit) service_.leave(session_id_, token_);
      throw;
    }
    connection_ = id;
    if (implicit) snap.token = token_;
    send(wire::encode(snap));
  }

  void send(std::string text) {
    queue_.push_back(std::move(text));
    if (queue_.size() == 1) do_write();
  }

  void do_write() {
    ws_.text(true);
    ws_.async_write(net::buffer(queue_.front()), beast::bind_front_handler(&LiveSession::on_write, shared_from_this()));
  }

  void on_write(beast::error_code ec, std::size_t) {
    if (ec) {
      release();
      return;
    }
    queue_.pop_front();
    if (!queue_.empty()) do_write();
  }

  void release() {
    if (connection_) {
      service_.disconnect(*connection_);
      connection_.reset();
    }
  }

  websocket::stream<beast::tcp_stream> ws_;
  SessionService& service_;
  std::string session_id_;
  std::string token_;
  std::optional<SessionService::ConnectionId> connection_;
  beast::flat_buffer buffer_;
  std::deque<std::string> queue_;
};

class HttpSession : public std::enable_shared_from_this<HttpSession> {
 public:
  HttpSession(tcp::socket&& socket, SessionService& service) : stream_(std::move(socket)), service_(service) {}

  void run() { net::dispatch(stream_.get_executor(), beast::bind_front_handler(&HttpSession::do_read, shared_from_this())); }

 private:
  void do_read() {
    req_ = {};
    stream_.expires_after(std::chrono::seconds(60));
    http::async_read(stream_, buffer_, req_, beast::bind_front_handler(&HttpSession::on_read, shared_from_this()));
  }

  void on_read(beast::error_code ec, std::size_t) {
    if (ec == http::error::end_of_stream) {
      stream_.socket().shutdown(tcp::socket::shutdown_send, ec);
      return;
    }
    if (ec) return;

    if (websocket::is_upgrade(req_)) {
      const auto seg = path_segments(std::string(req_.target()));
      if (seg.size() == 3 && seg[0] == "sessions" && seg[2] == "live") {
        stream_.expires_never();
        std::make_shared<LiveSession>(stream_.release_socket(), service_, seg[1])->run(std::move(req_));
        return;
      }
    }

    const auto r = handle_http(service_, std::string(req_.method_string()), std::string(req_.target()),
                               std::string(req_[http::field::authorization]), req_.body());
    auto res = std::make_shared<http::response<http::string_body>>(static_cast<http::status>(r.status), req_.version());
    res->set(http::field::server, "casewall");
    res->set(http::field::content_type, r.content_type);
    res->keep_alive(req_.keep_alive());
    res->body() = r.body;
    res->prepare_payload();
    res_ = res;
    http::async_write(stream_, *res_,
                      beast::bind_front_handler(&HttpSession::on_write, shared_from_this(), res_->need_eof()));
  }

  void on_write(bool close, beast::error_code ec, std::size_t) {
    if (ec) return;
    if (close) {
      stream_.socket().shutdown(tcp::socket::shutdown_send, ec);
      return;
    }
    res_.reset();
    do_read();
  }

  beast::tcp_stream stream_;
  SessionService& service_;
  beast::flat_buffer buffer_;
  http::request<http::string_body> req_;
  std::shared_ptr<http::response<http::string_body>> res_;
};

}  // namespace

// --- listener ---------------------------------------------------------------------

struct Server::Impl {
  Impl(SessionService& svc, ServerOptions opts) : service(svc), options(std::move(opts)), acceptor(ioc) {}

  void do_accept() {
    acceptor.async_accept(net::make_strand(ioc), [this](beast::error_code ec, tcp::socket socket) {
      if (!ec) std::make_shared<HttpSession>(std::move(socket), service)->run();
      if (acceptor.is_open()) do_accept();
    });
  }

  SessionService& service;
  ServerOptions options;
  net::io_context ioc;
  tcp::acceptor acceptor;
};

Server::Server(SessionService& service, ServerOptions options)
    : impl_(std::make_unique<Impl>(service, std::move(options))) {
  beast::error_code ec;
  const auto address = net::ip::make_address(impl_->options.address, ec);
  if (ec) throw Error("bad listen address " + impl_->options.address);
  const tcp::endpoint endpoint(address, impl_->options.port);
  auto& a = impl_->acceptor;
  a.open(endpoint.protocol(), ec);
  if (!ec) a.set_option(net::socket_base::reuse_address(true), ec);
  if (!ec) a.bind(endpoint, ec);
  if (!ec) a.listen(net::socket_base::max_listen_connections, ec);
  if (ec) throw Error("cannot listen on " + impl_->options.address + ":" + std::to_string(impl_->options.port) + ": " +
                      ec.message());
}

Server::~Server() { stop(); }

std::uint16_t Server::port() const { return impl_->acceptor.local_endpoint().port(); }

void Server::run() {
  impl_->do_accept();
  std::vector<std::thread> extra;
  for (int i = 1; i < impl_->options.threads; ++i) extra.emplace_back([this] { impl_->ioc.run(); });
  impl_->ioc.run();
  for (auto& t : extra) t.join();
}

void Server::stop() { impl_->ioc.stop(); }

}  // namespace casewall
