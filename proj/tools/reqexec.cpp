// reqexec command-line entry point: check, metrics, run, serve, bench.
//
// Exit codes: 0 success, 1 model errors, 2 usage or environment errors.

#include <pthread.h>

#include <chrono>
#include <csignal>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "reqexec/analyzer.hpp"
#include "reqexec/checkpoint.hpp"
#include "reqexec/pipeline.hpp"
#include "reqexec/repl.hpp"
#include "reqexec/service.hpp"

using namespace reqexec;

namespace {

constexpr int kOk = 0;
constexpr int kModelError = 1;
constexpr int kEnvError = 2;

std::optional<LoadedModel> load(const std::vector<std::string>& files, bool includeCrud) {
  BuildResult r = build_model_files(files, {includeCrud});
  for (const auto& d : r.diagnostics) std::cerr << to_string(d) << "\n";
  return std::move(r.model);
}

/// Flag value if given, else REQEXEC_TOLERANCE, else the default. nullopt on a
/// malformed environment value.
std::optional<double> tolerance(const std::optional<double>& flag) {
  if (flag) return flag;
  const char* env = std::getenv("REQEXEC_TOLERANCE");
  if (!env || !*env) return kDefaultTolerance;
  char* end = nullptr;
  double t = std::strtod(env, &end);
  if (*end != '\0' || t < 0) {
    std::cerr << "REQEXEC_TOLERANCE is not a non-negative number: " << env << "\n";
    return std::nullopt;
  }
  return t;
}

int cmd_check(const std::vector<std::string>& files, bool trace, bool includeCrud) {
  auto model = load(files, includeCrud);
  if (!model) return kModelError;
  ExecutabilityReport report = analyze_executability(model->operations);
  for (const auto& op : model->operations) {
    if (trace) {
      std::cout << op.useCase() << "::" << op.signature().name << "\n" << print_trace(op.ruleTrace);
    }
    for (const auto& h : op.hooks) {
      std::cout << "warning: " << op.useCase() << "::" << op.signature().name << " needs hook "
                << h.name << " for: " << h.text << "\n";
    }
  }
  char rate[32];
  std::snprintf(rate, sizeof rate, "%.2f", report.success_rate());
  std::cout << report.executable() << "/" << report.total() << " executable (" << rate << "%)\n";
  return kOk;
}

int cmd_metrics(const std::vector<std::string>& files, const std::string& format, bool includeCrud) {
  auto fmt = parse_report_format(format);
  if (!fmt) {
    std::cerr << "unknown format '" << format << "' (expected text or json)\n";
    return kEnvError;
  }
  auto model = load(files, includeCrud);
  if (!model) return kModelError;
  std::cout << render_report(complexity_metrics(model->parsed, model->operations),
                             analyze_executability(model->operations), *fmt);
  return kOk;
}

int cmd_run(const std::vector<std::string>& files, const std::string& checkpoint,
            const std::string& script, std::optional<double> tolFlag) {
  auto tol = tolerance(tolFlag);
  if (!tol) return kEnvError;
  auto model = load(files, true);
  if (!model) return kModelError;
  Executor ex(model->resolved, model->operations);
  ex.set_tolerance(*tol);
  if (!checkpoint.empty()) {
    std::ifstream f(checkpoint, std::ios::binary);
    if (!f) {
      std::cerr << "cannot read checkpoint " << checkpoint << "\n";
      return kEnvError;
    }
    std::ostringstream ss;
    ss << f.rdbuf();
    try {
      load_checkpoint(ex.store(), ss.str());
    } catch (const CheckpointError& e) {
      std::cerr << "checkpoint " << checkpoint << ": " << e.what() << "\n";
      return kEnvError;
    }
  }
  Repl repl(ex, std::cout);
  if (script.empty()) {
    repl.run(std::cin);
    return kOk;
  }
  std::ifstream in(script);
  if (!in) {
    std::cerr << "cannot read script " << script << "\n";
    return kEnvError;
  }
  repl.run(in);
  return kOk;
}

int cmd_serve(const std::vector<std::string>& files, int port, const std::string& host,
              const std::string& uiDir, std::optional<double> tolFlag) {
  auto tol = tolerance(tolFlag);
  if (!tol) return kEnvError;
  auto model = load(files, true);
  if (!model) return kModelError;

  // Block termination signals in every thread; a dedicated thread waits for them.
  sigset_t sigs;
  sigemptyset(&sigs);
  sigaddset(&sigs, SIGTERM);
  sigaddset(&sigs, SIGINT);
  pthread_sigmask(SIG_BLOCK, &sigs, nullptr);

  Service service(*model);
  service.executor()->set_tolerance(*tol);
  if (!uiDir.empty()) service.set_ui_dir(uiDir);
  HttpServer server(service);
  if (!server.bind(host, port)) {
    std::cerr << "cannot bind " << host << ":" << port << "\n";
    return kEnvError;
  }
  std::cout << "listening on http://" << host << ":" << server.port() << std::endl;
  std::thread waiter([&] {
    int sig = 0;
    sigwait(&sigs, &sig);
    server.stop();
  });
  server.listen();
  // Wake the waiter if the server stopped for another reason.
  pthread_kill(waiter.native_handle(), SIGTERM);
  waiter.join();
  std::cout << "stopped" << std::endl;
  return kOk;
}

int cmd_bench(const std::vector<std::string>& files, int repeat) {
  double total = 0;
  bool failed = false;
  for (const auto& path : files) {
    std::ifstream f(path, std::ios::binary);
    if (!f) {
      std::cerr << "cannot read " << path << "\n";
      return kEnvError;
    }
    std::ostringstream ss;
    ss << f.rdbuf();
    std::vector<SourceFile> src{{path, ss.str()}};
    double best = 0;
    for (int i = 0; i < repeat; ++i) {
      auto t0 = std::chrono::steady_clock::now();
      BuildResult r = build_model(src);
      auto t1 = std::chrono::steady_clock::now();
      if (!r.ok()) {
        for (const auto& d : r.diagnostics) std::cerr << to_string(d) << "\n";
        failed = true;
        break;
      }
      double ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
      best = i == 0 ? ms : std::min(best, ms);
    }
    total += best;
    std::printf("%-40s %10.2f ms\n", path.c_str(), best);
  }
  std::printf("%-40s %10.2f ms\n", "total", total);
  return failed ? kModelError : kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Executable requirements: parse, compile and run OCL contracts"};
  app.require_subcommand(1);

  std::vector<std::string> files;
  bool trace = false;
  bool includeCrud = false;
  std::string format = "text";
  std::string checkpoint;
  std::string script;
  std::string host = "127.0.0.1";
  std::string uiDir;
  int port = kDefaultPort;
  int repeat = 1;
  std::optional<double> tol;

  auto* check = app.add_subcommand("check", "Report diagnostics, hooks and executability");
  check->add_option("files", files, "Model files")->required()->check(CLI::ExistingFile);
  check->add_flag("--trace", trace, "Print the post-condition rule trace of every operation");
  check->add_flag("--include-crud", includeCrud, "Synthesize CRUD operations for crud classes");

  auto* metrics = app.add_subcommand("metrics", "Complexity and executability report");
  metrics->add_option("files", files, "Model files")->required()->check(CLI::ExistingFile);
  metrics->add_option("--format", format, "text or json");
  metrics->add_flag("--include-crud", includeCrud, "Synthesize CRUD operations for crud classes");

  auto* run = app.add_subcommand("run", "Interactive validation session");
  run->add_option("files", files, "Model files")->required()->check(CLI::ExistingFile);
  run->add_option("--checkpoint", checkpoint, "Checkpoint to load at start-up");
  run->add_option("--script", script, "Read commands from a file instead of stdin");
  run->add_option("--tolerance", tol, "Absolute tolerance for Real comparisons");

  auto* serve = app.add_subcommand("serve", "Serve the model over HTTP");
  serve->add_option("files", files, "Model files")->required()->check(CLI::ExistingFile);
  serve->add_option("--port", port, "TCP port")->capture_default_str();
  serve->add_option("--host", host, "Bind address")->capture_default_str();
  serve->add_option("--ui-dir", uiDir, "Static files served under /ui");
  serve->add_option("--tolerance", tol, "Absolute tolerance for Real comparisons");

  auto* bench = app.add_subcommand("bench", "Parse+resolve+compile wall time per model");
  bench->add_option("files", files, "Model files")->required()->check(CLI::ExistingFile);
  bench->add_option("--repeat", repeat, "Runs per file; the fastest is reported")
      ->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? kOk : kEnvError;
  }

  try {
    if (*check) return cmd_check(files, trace, includeCrud);
    if (*metrics) return cmd_metrics(files, format, includeCrud);
    if (*run) return cmd_run(files, checkpoint, script, tol);
    if (*serve) return cmd_serve(files, port, host, uiDir, tol);
    return cmd_bench(files, repeat);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kEnvError;
  }
}
