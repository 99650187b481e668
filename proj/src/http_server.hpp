#pragma once

#include <memory>
#include <string>

namespace attrscope {

class Engine;

/// Serves Engine::handle over HTTP. listen() blocks until stop().
class HttpServer {
 public:
  explicit HttpServer(Engine& engine);
  ~HttpServer();

  /// Binds and serves; port 0 picks a free port. Returns false if binding
  /// failed.
  bool listen(const std::string& host, int port);
  /// Binds without serving; returns the bound port or -1.
  int bind(const std::string& host, int port);
  /// Serves on a socket bound by bind().
  bool serve();
  void stop();
  bool running() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace attrscope
