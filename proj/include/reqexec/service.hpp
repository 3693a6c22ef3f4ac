#pragma once

// HTTP facade over one executor. Requests are handled by `Service::handle`,
// which funnels every call through a single worker thread so that store
// access is serialized regardless of how many connections are open.

#include <condition_variable>
#include <deque>
#include <functional>
#include <future>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>

#include "json.hpp"
#include "reqexec/executor.hpp"
#include "reqexec/pipeline.hpp"

namespace reqexec {

inline constexpr int kDefaultPort = 7468;

/// Runs submitted jobs one at a time on a dedicated thread.
class ExecutionQueue {
 public:
  ExecutionQueue();
  ~ExecutionQueue();
  ExecutionQueue(const ExecutionQueue&) = delete;
  ExecutionQueue& operator=(const ExecutionQueue&) = delete;

  template <typename F>
  auto run(F&& f) -> decltype(f()) {
    using R = decltype(f());
    auto task = std::make_shared<std::packaged_task<R()>>(std::forward<F>(f));
    std::future<R> result = task->get_future();
    post([task] { (*task)(); });
    return result.get();
  }

 private:
  void post(std::function<void()> job);

  std::mutex mu_;
  std::condition_variable cv_;
  std::deque<std::function<void()>> jobs_;
  bool stopping_ = false;
  std::thread worker_;
};

struct HttpResponse {
  int status = 200;
  std::string body;
  std::string contentType = "application/json";
};

nlohmann::json model_json(const Executor& ex);
nlohmann::json state_json(const ObjectStore& store);
nlohmann::json invariants_json(const InvariantReport& report);
nlohmann::json outcome_json(const Outcome& o, const InvariantReport& current);

class Service {
 public:
  Service() = default;
  explicit Service(const LoadedModel& model) { load_model(model); }

  /// Replaces model, store and sessions.
  void load_model(const LoadedModel& model);
  /// Directory served under /ui; unset means /ui answers 404.
  void set_ui_dir(std::string dir) { uiDir_ = std::move(dir); }
  /// Direct access for hook registration and tests; not serialized.
  Executor* executor() { return executor_.get(); }

  HttpResponse handle(const std::string& method, const std::string& path, const std::string& body);

 private:
  HttpResponse dispatch(const std::string& method, const std::string& path, const std::string& body);
  HttpResponse create_session(const std::string& body);
  HttpResponse invoke(const std::string& body);
  HttpResponse load_checkpoint_doc(const std::string& body);
  HttpResponse static_file(const std::string& path) const;

  std::unique_ptr<Executor> executor_;
  std::map<std::string, Session> sessions_;
  std::uint64_t nextSession_ = 1;
  std::optional<std::string> uiDir_;
  ExecutionQueue queue_;
};

/// cpp-httplib server bound to a Service.
class HttpServer {
 public:
  explicit HttpServer(Service& service);
  ~HttpServer();

  /// Binds; port 0 picks a free port. Returns false if the port is taken.
  bool bind(const std::string& host, int port);
  int port() const { return port_; }
  /// Blocks until `stop`.
  void listen();
  /// Starts `listen` on a background thread and waits until it accepts.
  void start_background();
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  int port_ = 0;
};

}  // namespace reqexec
