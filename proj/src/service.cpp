#include "reqexec/service.hpp"

#include <fstream>
#include <sstream>

#include "httplib.h"
#include "reqexec/checkpoint.hpp"

namespace reqexec {

using nlohmann::json;

ExecutionQueue::ExecutionQueue() {
  worker_ = std::thread([this] {
    while (true) {
      std::function<void()> job;
      {
        std::unique_lock lock(mu_);
        cv_.wait(lock, [this] { return stopping_ || !jobs_.empty(); });
        if (jobs_.empty()) return;
        job = std::move(jobs_.front());
        jobs_.pop_front();
      }
      job();
    }
  });
}

ExecutionQueue::~ExecutionQueue() {
  {
    std::lock_guard lock(mu_);
    stopping_ = true;
  }
  cv_.notify_all();
  worker_.join();
}

void ExecutionQueue::post(std::function<void()> job) {
  {
    std::lock_guard lock(mu_);
    jobs_.push_back(std::move(job));
  }
  cv_.notify_one();
}

namespace {

HttpResponse reply(int status, const json& body) { return {status, body.dump(2) + "\n"}; }

HttpResponse error(int status, const std::string& message,
                   const std::optional<std::string>& location = std::nullopt) {
  json body{{"error", message}};
  if (location) body["location"] = *location;
  return reply(status, body);
}

json ids_json(const std::vector<ObjectId>& ids) {
  json out = json::array();
  for (ObjectId id : ids) out.push_back(id.value);
  return out;
}

}  // namespace

json model_json(const Executor& ex) {
  const RequirementsModel& m = ex.model().model();
  json useCases = json::array();
  for (const auto& uc : m.useCases) {
    json ops = json::array();
    for (const auto& name : uc.operations) {
      const CompiledOperation* op = ex.find(uc.name, name);
      if (!op) continue;
      const auto& sig = op->signature();
      json params = json::array();
      for (const auto& p : sig.params) params.push_back({{"name", p.name}, {"type", to_string(p.type)}});
      json hooks = json::array();
      for (const auto& h : op->hooks) hooks.push_back(h.name);
      ops.push_back({{"name", sig.name},
                     {"params", params},
                     {"returnType", sig.returnType ? json(to_string(*sig.returnType)) : json(nullptr)},
                     {"guard", op->guardText},
                     {"executable", op->executable()},
                     {"hooks", hooks}});
    }
    useCases.push_back({{"name", uc.name}, {"actor", uc.primaryActor}, {"operations", ops}});
  }
  json classes = json::array();
  for (const auto& c : m.classes) classes.push_back(c.name);
  json invariants = json::array();
  for (const auto& inv : m.invariants) invariants.push_back(inv.name);
  return {{"actors", m.actors},
          {"useCases", useCases},
          {"classes", classes},
          {"invariants", invariants}};
}

json state_json(const ObjectStore& store) {
  const Schema& schema = store.schema();
  json counts = json::object();
  json attrs = json::object();
  json links = json::array();
  for (const auto& cls : schema.class_names()) {
    auto it = store.instance_lists().find(cls);
    const std::vector<ObjectId> none;
    const auto& ids = it == store.instance_lists().end() ? none : it->second;
    counts[cls] = ids.size();
    json rows = json::array();
    for (ObjectId id : ids) {
      const ObjectRecord& rec = store.at(id);
      json values = json::object();
      for (const auto& [name, v] : rec.attributes) values[name] = value_to_json(v);
      rows.push_back({{"id", id.value}, {"attrs", values}});
      for (const auto& [role, slot] : rec.links) {
        json targets = json::array();
        const char* mult = "one";
        if (const auto* one = std::get_if<OneLink>(&slot)) {
          if (one->target) targets.push_back(one->target->value);
        } else {
          mult = "many";
          targets = ids_json(std::get<ManyLink>(slot).targets.ids());
        }
        links.push_back(
            {{"sourceId", id.value}, {"role", role}, {"targetIds", targets}, {"multiplicity", mult}});
      }
    }
    attrs[cls] = rows;
  }
  return {{"objectCounts", counts}, {"attributeTable", attrs}, {"linkTable", links}};
}

json invariants_json(const InvariantReport& report) {
  json list = json::array();
  for (const auto& r : report.results) {
    json item{{"name", r.name}, {"holds", r.holds}, {"witnesses", ids_json(r.witnesses)}};
    if (r.fault) item["fault"] = *r.fault;
    list.push_back(item);
  }
  return {{"allHold", report.all_hold()}, {"invariants", list}};
}

json outcome_json(const Outcome& o, const InvariantReport& current) {
  json out{{"kind", outcome_kind(o)}};
  if (const auto* ok = std::get_if<outcome::Ok>(&o)) {
    out["returnValue"] = value_to_json(ok->returnValue);
    out["invariantReport"] = invariants_json(ok->report);
    return out;
  }
  if (const auto* p = std::get_if<outcome::PreconditionViolated>(&o)) out["guardText"] = p->guardText;
  if (const auto* h = std::get_if<outcome::HookUnbound>(&o)) out["hookName"] = h->hookName;
  if (const auto* f = std::get_if<outcome::RuntimeFault>(&o)) out["message"] = f->message;
  out["invariantReport"] = invariants_json(current);
  return out;
}

void Service::load_model(const LoadedModel& model) {
  queue_.run([&] {
    executor_ = std::make_unique<Executor>(model.resolved, model.operations);
    sessions_.clear();
    return 0;
  });
}

HttpResponse Service::handle(const std::string& method, const std::string& path,
                             const std::string& body) {
  return queue_.run([&] { return dispatch(method, path, body); });
}

HttpResponse Service::dispatch(const std::string& method, const std::string& path,
                               const std::string& body) {
  if (path == "/ui" || path.rfind("/ui/", 0) == 0) {
    if (method != "GET") return error(405, "method not allowed");
    return static_file(path);
  }
  static const char* kRoutes[] = {"/model", "/sessions", "/invoke", "/state", "/invariants",
                                  "/checkpoint/save", "/checkpoint/load"};
  bool known = path.rfind("/sessions/", 0) == 0;
  for (const char* r : kRoutes) known |= path == r;
  if (!known) return error(404, "no route " + path);
  if (!executor_) return error(503, "no model loaded");

  auto only = [&](const char* m) { return method == m; };
  if (path == "/model") return only("GET") ? reply(200, model_json(*executor_)) : error(405, "use GET");
  if (path == "/state")
    return only("GET") ? reply(200, state_json(executor_->store())) : error(405, "use GET");
  if (path == "/invariants") {
    return only("GET") ? reply(200, invariants_json(executor_->check_invariants()))
                       : error(405, "use GET");
  }
  if (path == "/sessions") return only("POST") ? create_session(body) : error(405, "use POST");
  if (path.rfind("/sessions/", 0) == 0) {
    if (!only("DELETE")) return error(405, "use DELETE");
    std::string id = path.substr(10);
    if (!sessions_.erase(id)) return error(404, "unknown session " + id);
    return reply(200, {{"deleted", id}});
  }
  if (path == "/invoke") return only("POST") ? invoke(body) : error(405, "use POST");
  if (path == "/checkpoint/save") {
    if (!only("POST")) return error(405, "use POST");
    return {200, save_checkpoint(executor_->store())};
  }
  return only("POST") ? load_checkpoint_doc(body) : error(405, "use POST");
}

HttpResponse Service::create_session(const std::string& body) {
  json req = json::parse(body, nullptr, false);
  if (req.is_discarded() || !req.is_object() || !req.contains("useCase") || !req["useCase"].is_string())
    return error(400, "expected {\"useCase\": name}", "useCase");
  std::string uc = req["useCase"].get<std::string>();
  if (!executor_->model().model().find_use_case(uc)) return error(404, "unknown use case " + uc, "useCase");
  std::string id = "s" + std::to_string(nextSession_++);
  sessions_.emplace(id, executor_->open_session(uc));
  return reply(201, {{"sessionId", id}, {"useCase", uc}});
}

HttpResponse Service::invoke(const std::string& body) {
  json req = json::parse(body, nullptr, false);
  if (req.is_discarded() || !req.is_object()) return error(400, "request body is not a JSON object");
  for (const char* key : {"sessionId", "operation"}) {
    if (!req.contains(key) || !req[key].is_string())
      return error(400, std::string("missing string '") + key + "'", key);
  }
  auto it = sessions_.find(req["sessionId"].get<std::string>());
  if (it == sessions_.end()) return error(404, "unknown session", "sessionId");
  Session& session = it->second;
  if (req.contains("useCase")) {
    if (!req["useCase"].is_string() || req["useCase"].get<std::string>() != session.useCase)
      return error(400, "session belongs to use case " + session.useCase, "useCase");
  }
  std::vector<Value> args;
  if (req.contains("args")) {
    if (!req["args"].is_array()) return error(400, "'args' must be an array", "args");
    for (std::size_t i = 0; i < req["args"].size(); ++i) {
      try {
        args.push_back(value_from_json(req["args"][i]));
      } catch (const CheckpointError& e) {
        return error(400, e.what(), "args[" + std::to_string(i) + "]");
      }
    }
  }
  try {
    Outcome o = executor_->invoke(session, req["operation"].get<std::string>(), args);
    InvariantReport current;
    if (!std::holds_alternative<outcome::Ok>(o)) current = executor_->check_invariants();
    return reply(200, outcome_json(o, current));
  } catch (const InvocationError& e) {
    bool notFound = e.kind() == InvocationError::Kind::UnknownOperation ||
                    e.kind() == InvocationError::Kind::UnknownUseCase;
    return error(notFound ? 404 : 400, e.what(), notFound ? "operation" : "args");
  }
}

HttpResponse Service::load_checkpoint_doc(const std::string& body) {
  try {
    load_checkpoint(executor_->store(), body);
  } catch (const CheckpointError& e) {
    return error(422, e.what());
  }
  sessions_.clear();
  return reply(200, {{"loaded", executor_->store().records().size()}});
}

HttpResponse Service::static_file(const std::string& path) const {
  if (!uiDir_) return error(404, "no UI directory configured");
  std::string rel = path.size() <= 4 ? "index.html" : path.substr(4);
  if (rel.empty()) rel = "index.html";
  if (rel.find("..") != std::string::npos) return error(404, "not found");
  std::ifstream f(*uiDir_ + "/" + rel, std::ios::binary);
  if (!f) return error(404, "not found: " + rel);
  std::ostringstream ss;
  ss << f.rdbuf();
  std::string type = "application/octet-stream";
  auto ends = [&](const char* ext) {
    std::string e(ext);
    return rel.size() >= e.size() && rel.compare(rel.size() - e.size(), e.size(), e) == 0;
  };
  if (ends(".html")) type = "text/html";
  else if (ends(".js")) type = "text/javascript";
  else if (ends(".css")) type = "text/css";
  else if (ends(".json")) type = "application/json";
  return {200, ss.str(), type};
}

struct HttpServer::Impl {
  httplib::Server server;
  std::thread thread;
};

HttpServer::HttpServer(Service& service) : impl_(std::make_unique<Impl>()) {
  auto handler = [&service](const httplib::Request& req, httplib::Response& res) {
    HttpResponse r = service.handle(req.method, req.path, req.body);
    res.status = r.status;
    res.set_content(r.body, r.contentType);
  };
  const std::string any = ".*";
  impl_->server.Get(any, handler);
  impl_->server.Post(any, handler);
  impl_->server.Put(any, handler);
  impl_->server.Delete(any, handler);
  impl_->server.Patch(any, handler);
  // httplib's defaults add SO_REUSEPORT, which lets a second server share a
  // busy port instead of failing to bind.
  impl_->server.set_socket_options([](socket_t sock) {
    int yes = 1;
    setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, reinterpret_cast<const void*>(&yes), sizeof(yes));
  });
}

HttpServer::~HttpServer() { stop(); }

bool HttpServer::bind(const std::string& host, int port) {
  if (port == 0) {
    port_ = impl_->server.bind_to_any_port(host);
    return port_ > 0;
  }
  if (!impl_->server.bind_to_port(host, port)) return false;
  port_ = port;
  return true;
}

void HttpServer::listen() { impl_->server.listen_after_bind(); }

void HttpServer::start_background() {
  impl_->thread = std::thread([this] { listen(); });
  impl_->server.wait_until_ready();
}

void HttpServer::stop() {
  if (impl_->server.is_running()) impl_->server.stop();
  if (impl_->thread.joinable()) impl_->thread.join();
}

}  // namespace reqexec
