#include "server.hpp"

#include <openssl/rand.h>

#include <atomic>
#include <condition_variable>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <ostream>
#include <regex>
#include <set>
#include <sstream>

#include <httplib.h>

#include "psg/lint.hpp"

namespace psg::server {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

constexpr const char* kDocSuffix = ".psg.json";

json goal_json(const Goal& g) { return {{"id", g.id.str()}, {"text", pretty(g)}}; }

json diagnostics_json(const std::vector<Diagnostic>& diags) {
  json out = json::array();
  for (const Diagnostic& d : diags) {
    out.push_back({{"code", std::string(code_name(d.code))},
                   {"severity", d.severity() == Severity::Error ? "error" : "warning"},
                   {"message", d.message},
                   {"graph", d.graph},
                   {"node", d.node},
                   {"wire", d.wire}});
  }
  return out;
}

void send_json(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void send_error(httplib::Response& res, int status, const std::string& message, json extra = json::object()) {
  extra["error"] = message;
  send_json(res, status, extra);
}

bool safe_name(const std::string& name) {
  static const std::regex re("[A-Za-z0-9_][A-Za-z0-9_.-]{0,127}");
  return std::regex_match(name, re) && name.find("..") == std::string::npos;
}

std::string strip_suffix(std::string name) {
  std::string_view suffix(kDocSuffix);
  if (name.size() > suffix.size() && name.compare(name.size() - suffix.size(), suffix.size(), suffix) == 0) {
    name.resize(name.size() - suffix.size());
  }
  return name;
}

std::optional<std::string> read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) return std::nullopt;
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

json snapshot_json(const EvalSession& s) {
  json j;
  j["status"] = std::string(status_name(s.status()));
  json frames = json::array();
  for (const Frame& f : s.frames()) {
    json wires = json::object();
    for (const auto& [wire, goals] : f.occupancy) {
      json list = json::array();
      for (const Goal& g : goals) list.push_back(goal_json(g));
      wires[wire] = std::move(list);
    }
    frames.push_back({{"graph", f.graph},
                      {"via_node", f.via_node ? json(*f.via_node) : json(nullptr)},
                      {"wires", std::move(wires)}});
  }
  j["frames"] = std::move(frames);
  j["selected_goal"] = s.selected_goal() ? json(s.selected_goal()->str()) : json(nullptr);
  if (auto next = s.next_goal()) {
    j["next"] = {{"wire", next->first}, {"goal", next->second.str()}};
  } else {
    j["next"] = nullptr;
  }
  j["at_nested_node"] = s.at_nested_node();
  j["choice_depth"] = s.choice_depth();
  j["steps"] = s.steps();
  json results = json::array();
  for (const Goal& g : s.results()) results.push_back(goal_json(g));
  j["results"] = std::move(results);
  if (const auto& f = s.failure()) {
    j["failure"] = {{"reason", std::string(fail_reason_name(f->reason))},
                    {"graph", f->graph},
                    {"node", f->node},
                    {"goal", f->goal_text},
                    {"message", f->message}};
  } else {
    j["failure"] = nullptr;
  }
  j["current_graph"] = s.current_graph().name;
  j["document"] = json::parse(save_document(s.document()));
  return j;
}

int http_status(EngineError::Code c) {
  using C = EngineError::Code;
  switch (c) {
    case C::UnknownGoal:
    case C::UnknownWire: return 422;
    case C::LintFailed:
    case C::NoMatchingInputWire:
    case C::TraceMismatch: return 400;
    case C::NotAtNestedNode:
    case C::AtTopLevel:
    case C::InvalidStatus:
    case C::NoGoalSelected:
    case C::NothingToBacktrack: return 409;
  }
  return 500;
}

std::string random_session_id() {
  unsigned char bytes[16];
  if (RAND_bytes(bytes, sizeof bytes) != 1) throw std::runtime_error("random source unavailable");
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned char b : bytes) {
    out += hex[b >> 4];
    out += hex[b & 15];
  }
  return out;
}

// ---------------------------------------------------------------------------

struct Session {
  std::mutex mu;  // serializes commands and guards everything below
  std::condition_variable cv;
  std::optional<EvalSession> engine;
  std::vector<json> events;  // events[i] has seq i + 1
  bool closed = false;
};

struct SessionServer::Impl {
  ServerOptions opts;
  httplib::Server http;
  int bound_port = -1;
  std::atomic<bool> stopping{false};

  mutable std::mutex registry_mu;
  struct Entry {
    std::shared_ptr<Session> session;
    Clock::time_point last_used;
  };
  std::map<std::string, Entry> sessions;
  std::set<std::string> expired;
  std::mutex log_mu;

  explicit Impl(ServerOptions o) : opts(std::move(o)) { routes(); }

  // Looks a session up, expiring idle ones first. Sets the HTTP error on failure.
  std::shared_ptr<Session> find(const std::string& id, httplib::Response& res) {
    std::shared_ptr<Session> found;
    std::vector<std::shared_ptr<Session>> dropped;
    {
      std::lock_guard lk(registry_mu);
      auto now = opts.now();
      for (auto it = sessions.begin(); it != sessions.end();) {
        if (now - it->second.last_used > opts.idle_timeout) {
          expired.insert(it->first);
          dropped.push_back(it->second.session);
          it = sessions.erase(it);
        } else {
          ++it;
        }
      }
      if (auto it = sessions.find(id); it != sessions.end()) {
        it->second.last_used = now;
        found = it->second.session;
      } else if (expired.count(id)) {
        send_error(res, 410, "session expired after being idle");
      } else {
        send_error(res, 404, "no such session");
      }
    }
    for (auto& s : dropped) {
      std::lock_guard lk(s->mu);
      s->closed = true;
      s->cv.notify_all();
    }
    return found;
  }

  fs::path doc_path(const std::string& name) const { return fs::path(opts.root) / (name + kDocSuffix); }

  void routes() {
    http.Get("/health", [](const httplib::Request&, httplib::Response& res) { send_json(res, 200, {{"ok", true}}); });
    http.Get("/graphs", [this](const httplib::Request&, httplib::Response& res) { list_graphs(res); });
    http.Get(R"(/graphs/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) { get_graph(req, res); });
    http.Put(R"(/graphs/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) { put_graph(req, res); });
    http.Post("/sessions", [this](const httplib::Request& req, httplib::Response& res) { create(req, res); });
    http.Post(R"(/sessions/([^/]+)/command)",
              [this](const httplib::Request& req, httplib::Response& res) { command(req, res); });
    http.Get(R"(/sessions/([^/]+)/state)", [this](const httplib::Request& req, httplib::Response& res) {
      auto s = find(req.matches[1], res);
      if (!s) return;
      std::lock_guard lk(s->mu);
      send_json(res, 200, state_of(req.matches[1], *s));
    });
    http.Get(R"(/sessions/([^/]+)/events)",
             [this](const httplib::Request& req, httplib::Response& res) { events(req, res); });
    http.Options(R"(.*)", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });

    http.set_post_routing_handler([this](const httplib::Request&, httplib::Response& res) {
      if (opts.cors_origin.empty()) return;
      res.set_header("Access-Control-Allow-Origin", opts.cors_origin);
      res.set_header("Vary", "Origin");
      res.set_header("Access-Control-Allow-Methods", "GET, POST, PUT, OPTIONS");
      res.set_header("Access-Control-Allow-Headers", "Content-Type, Last-Event-ID");
    });
    // The default options set SO_REUSEPORT, which would let a second server share an occupied port.
    http.set_socket_options([](socket_t sock) {
      int yes = 1;
      setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof(yes));
    });
    http.set_logger([this](const httplib::Request& req, const httplib::Response& res) {
      if (!opts.log) return;
      std::lock_guard lk(log_mu);
      *opts.log << req.method << " " << req.path << " " << res.status << std::endl;
    });
    http.set_exception_handler([](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
      std::string what = "internal error";
      try {
        std::rethrow_exception(ep);
      } catch (const std::exception& e) {
        what = e.what();
      } catch (...) {
      }
      send_error(res, 500, what);
    });
  }

  json state_of(const std::string& id, const Session& s) const {
    json j = snapshot_json(*s.engine);
    j["session_id"] = id;
    j["seq"] = s.events.size();
    return j;
  }

  // -- documents ------------------------------------------------------------

  void list_graphs(httplib::Response& res) {
    std::vector<std::string> names;
    std::error_code ec;
    for (const auto& entry : fs::directory_iterator(opts.root, ec)) {
      std::string file = entry.path().filename().string();
      std::string name = strip_suffix(file);
      if (entry.is_regular_file() && name != file && safe_name(name)) names.push_back(name);
    }
    if (ec) return send_error(res, 500, "cannot list documents: " + ec.message());
    std::sort(names.begin(), names.end());
    send_json(res, 200, {{"graphs", names}});
  }

  void get_graph(const httplib::Request& req, httplib::Response& res) {
    std::string name = strip_suffix(req.matches[1]);
    if (!safe_name(name)) return send_error(res, 400, "invalid document name");
    auto bytes = read_file(doc_path(name));
    if (!bytes) return send_error(res, 404, "no document named '" + name + "'");
    try {
      res.set_content(canonicalize(*bytes), "application/json");
    } catch (const LoadError& e) {
      send_error(res, 500, std::string("stored document is invalid: ") + e.what());
    }
  }

  void put_graph(const httplib::Request& req, httplib::Response& res) {
    std::string name = strip_suffix(req.matches[1]);
    if (!safe_name(name)) return send_error(res, 400, "invalid document name");
    GraphDocument d;
    try {
      d = load_document(req.body);
    } catch (const LoadError& e) {
      if (e.kind() == LoadError::Kind::Invariant) {
        return send_error(res, 422, e.what(), {{"diagnostics", diagnostics_json(e.diagnostics())}});
      }
      return send_error(res, 400, e.what(), {{"pointer", e.pointer()}});
    }
    auto diags = lint(d, builtin_registry());
    if (has_errors(diags)) {
      return send_error(res, 422, "document has lint errors", {{"diagnostics", diagnostics_json(diags)}});
    }
    fs::path target = doc_path(name);
    fs::path tmp = fs::path(opts.root) / ("." + name + ".tmp-" + random_session_id());
    {
      std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
      if (!out || !(out << save_document(d)) || !out.flush()) {
        std::error_code ignore;
        fs::remove(tmp, ignore);
        return send_error(res, 500, "cannot write document");
      }
    }
    std::error_code ec;
    fs::rename(tmp, target, ec);
    if (ec) {
      fs::remove(tmp, ec);
      return send_error(res, 500, "cannot store document");
    }
    res.status = 204;
  }

  // -- sessions -------------------------------------------------------------

  void create(const httplib::Request& req, httplib::Response& res) {
    json body;
    try {
      body = json::parse(req.body);
    } catch (const json::parse_error& e) {
      return send_error(res, 400, std::string("request body is not JSON: ") + e.what());
    }
    if (!body.is_object()) return send_error(res, 400, "request body must be an object");

    GraphDocument d;
    auto graph = body.find("graph");
    if (graph == body.end()) return send_error(res, 400, "missing 'graph'");
    try {
      if (graph->is_string()) {
        std::string name = strip_suffix(graph->get<std::string>());
        if (!safe_name(name)) return send_error(res, 400, "invalid document name");
        auto bytes = read_file(doc_path(name));
        if (!bytes) return send_error(res, 404, "no document named '" + name + "'");
        d = load_document(*bytes);
      } else if (graph->is_object()) {
        d = load_document(graph->dump());
      } else {
        return send_error(res, 400, "'graph' must be a document name or an inline document");
      }
    } catch (const LoadError& e) {
      json extra = {{"pointer", e.pointer()}};
      if (!e.diagnostics().empty()) extra["diagnostics"] = diagnostics_json(e.diagnostics());
      return send_error(res, 400, e.what(), extra);
    }

    std::vector<Goal> goals;
    auto texts = body.find("goals");
    if (texts == body.end() || !texts->is_array()) return send_error(res, 400, "'goals' must be an array of strings");
    for (std::size_t i = 0; i < texts->size(); ++i) {
      const json& t = (*texts)[i];
      if (!t.is_string()) return send_error(res, 400, "'goals' must be an array of strings");
      try {
        goals.push_back(parse_goal(t.get<std::string>()));
      } catch (const SyntaxError& e) {
        return send_error(res, 400, e.what(),
                          {{"goal_index", i}, {"offset", e.offset()}, {"expected", e.expected()}});
      }
    }

    EvalPolicy policy;
    EvalLimits limits;
    try {
      if (auto p = body.find("policy"); p != body.end() && !p->is_null()) {
        std::string sel = p->value("goal_selection", "fifo");
        if (sel == "manual") {
          policy.goal_selection = GoalSelection::Manual;
        } else if (sel != "fifo") {
          return send_error(res, 400, "goal_selection must be 'fifo' or 'manual'");
        }
      }
      if (auto l = body.find("limits"); l != body.end() && !l->is_null()) {
        limits.max_steps = l->value("max_steps", limits.max_steps);
        limits.max_choice_depth = l->value("max_choice_depth", limits.max_choice_depth);
      }
    } catch (const json::exception& e) {
      return send_error(res, 400, std::string("invalid policy or limits: ") + e.what());
    }

    auto session = std::make_shared<Session>();
    try {
      session->engine.emplace(EvalSession::init(d, std::move(goals), policy, limits));
    } catch (const EngineError& e) {
      json extra = {{"code", std::string(error_code_name(e.code()))}};
      if (!e.diagnostics().empty()) extra["diagnostics"] = diagnostics_json(e.diagnostics());
      return send_error(res, http_status(e.code()), e.what(), extra);
    }
    std::string id = random_session_id();
    {
      std::lock_guard lk(registry_mu);
      sessions[id] = Entry{session, opts.now()};
    }
    std::lock_guard lk(session->mu);
    send_json(res, 201, {{"session_id", id}, {"state", state_of(id, *session)}});
  }

  void command(const httplib::Request& req, httplib::Response& res) {
    std::string id = req.matches[1];
    auto s = find(id, res);
    if (!s) return;
    json body;
    try {
      body = json::parse(req.body);
    } catch (const json::parse_error& e) {
      return send_error(res, 400, std::string("request body is not JSON: ") + e.what());
    }
    if (!body.is_object() || !body.contains("cmd") || !body["cmd"].is_string()) {
      return send_error(res, 400, "body must be {\"cmd\": string, \"args\"?: object}");
    }
    std::string cmd = body["cmd"];
    json args = body.value("args", json::object());
    if (args.is_null()) args = json::object();
    if (!args.is_object()) return send_error(res, 400, "'args' must be an object");

    std::lock_guard lk(s->mu);
    if (s->closed) return send_error(res, 410, "session expired after being idle");
    EvalSession& e = *s->engine;
    const std::size_t trace_before = e.trace().size();
    try {
      if (cmd == "step") {
        e.step();
      } else if (cmd == "step_into") {
        e.step_into();
      } else if (cmd == "step_over") {
        e.step_over();
      } else if (cmd == "finish_node") {
        e.finish_node();
      } else if (cmd == "finish") {
        auto flag = args.find("ignore_breakpoints");
        if (flag != args.end() && !flag->is_boolean()) return send_error(res, 422, "'ignore_breakpoints' must be a boolean");
        e.finish(flag != args.end() && flag->get<bool>());
      } else if (cmd == "run_to_breakpoint") {
        e.run_to_breakpoint();
      } else if (cmd == "select_goal") {
        auto goal = args.find("goal");
        if (goal == args.end() || !goal->is_string()) return send_error(res, 422, "select_goal needs args.goal");
        GoalId gid;
        try {
          gid = GoalId::parse(goal->get<std::string>());
        } catch (const std::invalid_argument& ex) {
          return send_error(res, 422, ex.what(), {{"code", "UnknownGoal"}});
        }
        e.select_goal(gid);
      } else if (cmd == "toggle_breakpoint") {
        auto wire = args.find("wire");
        if (wire == args.end() || !wire->is_string()) return send_error(res, 422, "toggle_breakpoint needs args.wire");
        e.toggle_breakpoint(wire->get<std::string>());
      } else if (cmd == "backtrack") {
        e.backtrack();
      } else {
        return send_error(res, 400, "unknown command '" + cmd + "'");
      }
    } catch (const EngineError& ex) {
      return send_error(res, http_status(ex.code()), ex.what(), {{"code", std::string(error_code_name(ex.code()))}});
    }

    json delta = json::array();
    for (std::size_t i = trace_before; i < e.trace().size(); ++i) delta.push_back(json::parse(to_json_text(e.trace()[i])));
    json state = snapshot_json(e);
    push_event(*s, {{"kind", "command"}, {"command", cmd}, {"status", state["status"]}, {"trace", std::move(delta)}},
               state);
    if (e.status() == Status::PausedAtBreakpoint) {
      auto next = e.next_goal();
      push_event(*s, {{"kind", "paused"}, {"wire", next->first}, {"goal", next->second.str()}}, state);
    }
    s->cv.notify_all();
    send_json(res, 200, state_of(id, *s));
  }

  void push_event(Session& s, json event, const json& state) {
    event["seq"] = s.events.size() + 1;
    event["state"] = state;
    s.events.push_back(std::move(event));
  }

  void events(const httplib::Request& req, httplib::Response& res) {
    auto s = find(req.matches[1], res);
    if (!s) return;
    std::size_t after = 0;
    std::string last = req.get_header_value("Last-Event-ID");
    if (last.empty() && req.has_param("lastEventId")) last = req.get_param_value("lastEventId");
    if (!last.empty()) {
      try {
        after = std::stoul(last);
      } catch (const std::exception&) {
        return send_error(res, 400, "Last-Event-ID must be a sequence number");
      }
    }
    res.set_header("Cache-Control", "no-cache");
    res.set_chunked_content_provider(
        "text/event-stream", [this, s, next = after + 1](std::size_t, httplib::DataSink& sink) mutable {
          std::unique_lock lk(s->mu);
          s->cv.wait_for(lk, std::chrono::seconds(1),
                         [&] { return s->events.size() >= next || s->closed || stopping.load(); });
          std::string chunk;
          for (; next <= s->events.size(); ++next) {
            const json& ev = s->events[next - 1];
            chunk += "id: " + std::to_string(next) + "\nevent: " + ev["kind"].get<std::string>() +
                     "\ndata: " + ev.dump() + "\n\n";
          }
          bool done = s->closed || stopping.load();
          lk.unlock();
          if (chunk.empty()) chunk = ": keep-alive\n\n";
          if (!sink.write(chunk.data(), chunk.size())) return false;
          if (done) sink.done();
          return true;
        });
  }
};

SessionServer::SessionServer(ServerOptions opts) : impl_(std::make_unique<Impl>(std::move(opts))) {}

SessionServer::~SessionServer() { stop(); }

bool SessionServer::bind(const std::string& host, int port) {
  if (port == 0) {
    impl_->bound_port = impl_->http.bind_to_any_port(host);
    return impl_->bound_port > 0;
  }
  if (!impl_->http.bind_to_port(host, port)) return false;
  impl_->bound_port = port;
  return true;
}

int SessionServer::port() const { return impl_->bound_port; }

void SessionServer::run() { impl_->http.listen_after_bind(); }

void SessionServer::stop() {
  impl_->stopping = true;
  {
    std::lock_guard lk(impl_->registry_mu);
    for (auto& [id, entry] : impl_->sessions) entry.session->cv.notify_all();
  }
  impl_->http.stop();
}

std::size_t SessionServer::live_sessions() const {
  std::lock_guard lk(impl_->registry_mu);
  return impl_->sessions.size();
}

}  // namespace psg::server
