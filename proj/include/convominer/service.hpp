#pragma once

#include <memory>
#include <mutex>
#include <string>

#include "convominer/corpus.hpp"

namespace convominer {

struct ApiRequest {
  std::string method;  // "GET", "POST", ...
  std::string path;    // decoded path, e.g. "/api/conversation/S01/T3"
  std::string body;
};

struct ApiResponse {
  int status = 200;
  std::string body;
  std::string content_type = "application/json";
};

/// Pure request dispatch against one snapshot. A null snapshot answers 503
/// with error code "no_corpus". Identical (snapshot, request) pairs produce
/// byte-identical bodies.
ApiResponse handle_request(const Corpus* snapshot, const ApiRequest& request);

/// Holds the current snapshot and swaps it atomically on reload. Requests keep
/// the snapshot they started with alive until they finish.
class AnalyticsService {
 public:
  AnalyticsService() = default;
  explicit AnalyticsService(std::shared_ptr<const Corpus> snapshot) : snapshot_(std::move(snapshot)) {}

  std::shared_ptr<const Corpus> snapshot() const;
  void swap_snapshot(std::shared_ptr<const Corpus> next);
  /// Loads a corpus file and swaps it in; the old snapshot stays on failure.
  void reload(const std::string& path, LoadOptions options = {});

  ApiResponse handle(const ApiRequest& request) const;

 private:
  mutable std::mutex mu_;
  std::shared_ptr<const Corpus> snapshot_;
};

struct ServerOptions {
  std::string host = "127.0.0.1";
  int port = 8080;
  std::string cors_origin = "*";
};

/// Port from CONVO_MINER_PORT when set and valid, else `fallback`.
int resolve_port(int fallback);

class HttpServer {
 public:
  HttpServer(AnalyticsService& service, ServerOptions options);
  ~HttpServer();
  HttpServer(const HttpServer&) = delete;
  HttpServer& operator=(const HttpServer&) = delete;

  /// Binds and serves until stop(). Returns false when binding fails.
  bool listen();
  /// Binds to an ephemeral port; returns it, or -1 on failure. Call
  /// listen_after_bind() afterwards.
  int bind_any_port();
  bool listen_after_bind();
  void stop();
  bool running() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace convominer
