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

// casewall_server: serves sessions over HTTP and WebSocket.
//
// Exit codes: 0 clean shutdown, 1 usage, 2 corpus error, 3 session log
// error, 5 I/O or listen failure.

#include <csignal>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <thread>

#include <CLI11.hpp>

#include "casewall/server.hpp"
#include "casewall/session.hpp"

namespace {

std::string env_or(const char* name, std::string fallback) {
  const char* v = std::getenv(name);
  return v && *v ? std::string(v) : std::move(fallback);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Casewall collaborative analysis server"};
  std::string listen = env_or("CASEWALL_LISTEN", "127.0.0.1:8080");
  std::string corpus_root = env_or("CASEWALL_CORPUS_ROOT", "");
  std::string data_dir = env_or("CASEWALL_DATA_DIR", "");
  std::string port_file;
  bool strict = false;
  int threads = 1;
  app.add_option("--listen", listen, "host:port to listen on; port 0 picks a free one (env CASEWALL_LISTEN)");
  app.add_option("--corpus-root", corpus_root, "corpus directory, or a directory of corpora (env CASEWALL_CORPUS_ROOT)");
  app.add_option("--data-dir", data_dir, "where session logs live; empty keeps sessions in memory (env CASEWALL_DATA_DIR)");
  app.add_option("--port-file", port_file, "write the bound port here once listening");
  app.add_option("--threads", threads, "I/O threads")->check(CLI::Range(1, 64));
  app.add_flag("--strict-gazetteer", strict, "only count gazetteer names; no partial or new-name matching");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }
  if (corpus_root.empty()) {
    std::cerr << "casewall_server: --corpus-root is required\n";
    return 1;
  }
  const auto colon = listen.rfind(':');
  if (colon == std::string::npos) {
    std::cerr << "casewall_server: --listen must be host:port\n";
    return 1;
  }

  casewall::ServerOptions server_options;
  server_options.address = listen.substr(0, colon);
  server_options.threads = threads;
  try {
    const int port = std::stoi(listen.substr(colon + 1));
    if (port < 0 || port > 65535) throw std::out_of_range("port");
    server_options.port = static_cast<std::uint16_t>(port);
  } catch (const std::exception&) {
    std::cerr << "casewall_server: bad port in --listen\n";
    return 1;
  }

  casewall::ServiceOptions options;
  options.corpus_root = corpus_root;
  if (!data_dir.empty()) options.data_dir = data_dir;
  if (strict) options.analysis.extractor = casewall::ExtractorConfig::strict_gazetteer();

  // Signals are taken by a dedicated thread; every other thread blocks them.
  sigset_t signals;
  sigemptyset(&signals);
  sigaddset(&signals, SIGINT);
  sigaddset(&signals, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &signals, nullptr);

  std::unique_ptr<casewall::SessionService> service;
  try {
    service = std::make_unique<casewall::SessionService>(options);
  } catch (const casewall::CorpusError& e) {
    std::cerr << "casewall_server: corpus error: " << e.what();
    if (!e.offending_id().empty()) std::cerr << " (" << e.offending_id() << ")";
    std::cerr << "\n";
    return 2;
  } catch (const casewall::LogError& e) {
    std::cerr << "casewall_server: session log error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "casewall_server: " << e.what() << "\n";
    return 5;
  }

  std::unique_ptr<casewall::Server> server;
  try {
    server = std::make_unique<casewall::Server>(*service, server_options);
  } catch (const std::exception& e) {
    std::cerr << "casewall_server: " << e.what() << "\n";
    return 5;
  }

  if (!port_file.empty()) {
    const auto tmp = port_file + ".tmp";
    {
      std::ofstream out(tmp);
      out << server->port() << "\n";
      if (!out) {
        std::cerr << "casewall_server: cannot write " << port_file << "\n";
        return 5;
      }
    }
    std::filesystem::rename(tmp, port_file);
  }
  std::cerr << "casewall_server: listening on " << server_options.address << ":" << server->port() << "\n";

  std::thread waiter([&] {
    int sig = 0;
    sigwait(&signals, &sig);
    server->stop();
  });
  server->run();  // returns once the waiter has called stop()
  waiter.join();
  return 0;
}
