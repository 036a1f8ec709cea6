#include "navth/server.hpp"

#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "httplib.h"

#include "navth/io.hpp"

namespace navth {

std::string format_timestamp(WallClock::time_point t) {
  const auto ms = std::chrono::duration_cast<Millis>(t.time_since_epoch()).count();
  const std::time_t secs = static_cast<std::time_t>(ms >= 0 ? ms / 1000 : (ms - 999) / 1000);
  const long frac = static_cast<long>(ms - static_cast<long long>(secs) * 1000);
  std::tm tm{};
  gmtime_r(&secs, &tm);
  char buf[96];
  std::snprintf(buf, sizeof buf, "%04d-%02d-%02dT%02d:%02d:%02d.%03ldZ", tm.tm_year + 1900, tm.tm_mon + 1,
                tm.tm_mday, tm.tm_hour, tm.tm_min, tm.tm_sec, frac);
  return buf;
}

WallClock::time_point parse_timestamp(const std::string& s) {
  std::tm tm{};
  int ms = 0;
  if (std::sscanf(s.c_str(), "%4d-%2d-%2dT%2d:%2d:%2d.%3dZ", &tm.tm_year, &tm.tm_mon, &tm.tm_mday, &tm.tm_hour,
                  &tm.tm_min, &tm.tm_sec, &ms) != 7)
    throw SchemaError("expires_at", "not an ISO-8601 UTC timestamp: " + s);
  tm.tm_year -= 1900;
  tm.tm_mon -= 1;
  return WallClock::time_point(std::chrono::seconds(timegm(&tm))) + Millis(ms);
}

// ---------------------------------------------------------------------------
// Leases

LeaseTable::LeaseTable(ClockFn clock) : clock_(std::move(clock)) {
  std::random_device rd;
  token_rng_.reseed((static_cast<std::uint64_t>(rd()) << 32) ^ rd());
}

void LeaseTable::add_env(const std::string& env_id) {
  std::lock_guard lock(mu_);
  leases_.emplace(env_id, std::nullopt);
}

bool LeaseTable::has_env(const std::string& env_id) const {
  std::lock_guard lock(mu_);
  return leases_.count(env_id) > 0;
}

std::string LeaseTable::new_token() {
  char buf[33];
  std::snprintf(buf, sizeof buf, "%016llx%016llx", static_cast<unsigned long long>(token_rng_.next_u64()),
                static_cast<unsigned long long>(token_rng_.next_u64()));
  return buf;
}

void LeaseTable::emit(LeaseEvent::Kind kind, const std::string& env, const std::string& token,
                      WallClock::time_point at) {
  if (audit_) audit_({kind, env, token, at});
}

void LeaseTable::expire_locked(const std::string& env_id, WallClock::time_point now) {
  auto& slot = leases_.at(env_id);
  if (slot && slot->expires_at <= now) {
    emit(LeaseEvent::Kind::expire, env_id, slot->token, now);
    by_token_.erase(slot->token);
    slot.reset();
  }
}

namespace {

void check_duration(Millis d) {
  if (d <= Millis(0) || d > kMaxLease)
    throw PreconditionError("invalid_duration", "lease duration must lie in (0, 24 h]");
}

}  // namespace

SessionLease LeaseTable::acquire(const std::string& env_id, Millis duration) {
  check_duration(duration);
  std::lock_guard lock(mu_);
  if (!leases_.count(env_id)) throw PreconditionError("unknown_env", "no environment named " + env_id);
  const auto now = clock_();
  expire_locked(env_id, now);
  auto& slot = leases_.at(env_id);
  if (slot) throw BusyError(env_id, slot->expires_at);
  slot = SessionLease{new_token(), env_id, now + duration, true};
  by_token_[slot->token] = env_id;
  emit(LeaseEvent::Kind::grant, env_id, slot->token, now);
  return *slot;
}

SessionLease LeaseTable::renew(const std::string& token, Millis duration) {
  check_duration(duration);
  std::lock_guard lock(mu_);
  const auto it = by_token_.find(token);
  if (it == by_token_.end()) throw AuthError("unknown or released lease token");
  const std::string env = it->second;
  const auto now = clock_();
  expire_locked(env, now);
  auto& slot = leases_.at(env);
  if (!slot || slot->token != token) throw AuthError("lease expired");
  slot->expires_at = now + duration;
  emit(LeaseEvent::Kind::renew, env, token, now);
  return *slot;
}

bool LeaseTable::release(const std::string& token) {
  std::lock_guard lock(mu_);
  const auto it = by_token_.find(token);
  if (it == by_token_.end()) return false;
  const std::string env = it->second;
  const auto now = clock_();
  expire_locked(env, now);
  auto& slot = leases_.at(env);
  if (!slot || slot->token != token) return false;
  emit(LeaseEvent::Kind::release, env, token, now);
  by_token_.erase(token);
  slot.reset();
  return true;
}

std::string LeaseTable::authorize(const std::string& token, bool step) {
  std::lock_guard lock(mu_);
  const auto it = by_token_.find(token);
  if (it == by_token_.end()) throw AuthError("unknown or released lease token");
  const std::string env = it->second;
  const auto now = clock_();
  expire_locked(env, now);
  const auto& slot = leases_.at(env);
  if (!slot || slot->token != token) throw AuthError("lease expired");
  if (step) emit(LeaseEvent::Kind::step, env, token, now);
  return env;
}

std::optional<SessionLease> LeaseTable::holder(const std::string& env_id) {
  std::lock_guard lock(mu_);
  if (!leases_.count(env_id)) throw PreconditionError("unknown_env", "no environment named " + env_id);
  expire_locked(env_id, clock_());
  return leases_.at(env_id);
}

void LeaseTable::set_audit(std::function<void(const LeaseEvent&)> sink) {
  std::lock_guard lock(mu_);
  audit_ = std::move(sink);
}

// ---------------------------------------------------------------------------
// Service

struct EnvService::Instance {
  std::string env_id;
  Scene scene;
  TaskSpec spec;
  MotionNoiseModel noise;
  Rng rng;
  std::optional<EpisodeState> ep;
  long episodes = 0;
  std::map<std::string, std::unique_ptr<NavGraph>> graphs;
  std::mutex mu;

  const NavGraph& graph(const TaskSpec& task) {
    auto& g = graphs[task.target_category];
    if (!g) g = std::make_unique<NavGraph>(scene, task);
    return *g;
  }
};

EnvService::EnvService(std::vector<EnvSetup> envs, ServiceOptions options, ClockFn clock)
    : options_(std::move(options)), leases_(std::move(clock)), started_(WallClock::now()) {
  if (envs.empty()) throw PreconditionError("empty_scenes", "the service needs at least one environment");
  for (auto& e : envs) {
    e.spec.validate();
    if (instances_.count(e.env_id)) throw PreconditionError("duplicate_env", "duplicate env id " + e.env_id);
    auto inst = std::make_unique<Instance>();
    inst->env_id = e.env_id;
    inst->scene = std::move(e.scene);
    inst->spec = e.spec;
    inst->noise = e.noise;
    inst->rng.reseed(e.seed);
    leases_.add_env(e.env_id);
    instances_.emplace(e.env_id, std::move(inst));
  }
  if (!options_.results_path.empty()) {
    std::ofstream os(options_.results_path);
    if (!os) throw Error("unwritable_path", "cannot write " + options_.results_path);
    write_results(os, {});
  }
}

EnvService::~EnvService() = default;

std::vector<std::string> EnvService::env_ids() const {
  std::vector<std::string> out;
  for (const auto& [id, _] : instances_) out.push_back(id);
  return out;
}

EnvService::Instance& EnvService::instance(const std::string& env_id) const {
  const auto it = instances_.find(env_id);
  if (it == instances_.end()) throw PreconditionError("unknown_env", "no environment named " + env_id);
  return *it->second;
}

namespace {

json lease_json(const SessionLease& l) {
  return {{"token", l.token}, {"env_id", l.env_id}, {"expires_at", format_timestamp(l.expires_at)},
          {"renewable", l.renewable}};
}

json step_json(const EpisodeState& ep, const Observation& obs, double reward) {
  return {{"observation", observation_to_json(obs)},
          {"reward", reward},
          {"terminated", ep.terminated()},
          {"outcome", to_string(ep.outcome)},
          {"t", ep.t}};
}

json task_json(const TaskSpec& spec) {
  json acts = json::array();
  for (Action a : actions_of(spec.action_space)) acts.push_back(to_string(a));
  return {{"target_category", spec.target_category},
          {"success_distance", spec.success_distance},
          {"visibility_distance", spec.visibility_distance},
          {"max_steps", spec.max_steps},
          {"action_space", to_string(spec.action_space)},
          {"actions", acts},
          {"reward", {{"success_reward", spec.reward.success_reward}, {"step_penalty", spec.reward.step_penalty}}},
          {"camera",
           {{"fov", spec.camera.fov}, {"ray_count", spec.camera.ray_count}, {"max_range", spec.camera.max_range}}}};
}

}  // namespace

json EnvService::acquire(const std::string& env_id, std::optional<Millis> duration) {
  return lease_json(leases_.acquire(env_id, duration.value_or(options_.default_lease)));
}

json EnvService::renew(const std::string& token, std::optional<Millis> duration) {
  return lease_json(leases_.renew(token, duration.value_or(options_.default_lease)));
}

json EnvService::release(const std::string& token) { return {{"released", leases_.release(token)}}; }

json EnvService::reset(const std::string& token, const std::optional<std::string>& target,
                       std::optional<std::uint64_t> seed) {
  Instance& inst = instance(leases_.authorize(token));
  std::lock_guard lock(inst.mu);
  TaskSpec task = inst.spec;
  if (target) {
    const auto targets = default_catalog().target_categories();
    if (std::find(targets.begin(), targets.end(), *target) == targets.end())
      throw PreconditionError("unknown_target", "not a target category: " + *target);
    task.target_category = *target;
  }
  if (!inst.scene.has_category(task.target_category))
    throw PreconditionError("unknown_target", "scene has no " + task.target_category);
  leases_.authorize(token, true);
  if (seed) inst.rng.reseed(*seed);
  inst.ep = navth::reset(inst.scene, task, inst.rng);
  ++inst.episodes;
  return {{"episode_id", inst.env_id + "/" + std::to_string(inst.episodes)},
          {"observation", observation_to_json(episode_observation(*inst.ep, false))}};
}

json EnvService::step(const std::string& token, const std::string& action) {
  Instance& inst = instance(leases_.authorize(token));
  std::lock_guard lock(inst.mu);
  const Action a = action_from_string(action);
  if (!inst.ep) throw PreconditionError("no_episode", "reset an episode first");
  if (inst.ep->terminated()) throw PreconditionError("episode_terminated", "the episode has already ended");
  if (!permits(inst.ep->spec.action_space, a))
    throw PreconditionError("action_not_permitted", std::string(to_string(a)) + " is not in the action space");
  leases_.authorize(token, true);
  const auto r = episode_step(*inst.ep, a, inst.noise, inst.rng);
  if (r.terminated) record(inst);
  return step_json(*inst.ep, r.observation, r.reward);
}

void EnvService::record(Instance& inst) {
  const EpisodeState& ep = *inst.ep;
  double l = shortest_path_length_m(inst.graph(ep.spec), ep.start.position);
  if (!std::isfinite(l)) l = 0.0;  // unreachable: S = 0 either way
  EpisodeResult r = summarize_episode(ep, l, std::nullopt);
  std::lock_guard lock(results_mu_);
  results_.push_back(r);
  if (!options_.results_path.empty()) {
    std::ofstream os(options_.results_path, std::ios::app);
    os << result_to_json(r).dump() << '\n';
  }
}

json EnvService::pose(const std::string& token) {
  Instance& inst = instance(leases_.authorize(token));
  std::lock_guard lock(inst.mu);
  leases_.authorize(token);
  if (!inst.ep) throw PreconditionError("no_episode", "reset an episode first");
  return {{"pose", pose_to_json(inst.ep->agent)}, {"t", inst.ep->t}, {"eval_only", true}};
}

std::string EnvService::trajectory(const std::string& token) {
  Instance& inst = instance(leases_.authorize(token));
  std::lock_guard lock(inst.mu);
  leases_.authorize(token);
  if (!inst.ep) throw PreconditionError("no_episode", "reset an episode first");
  std::ostringstream os;
  write_trajectory(os, trajectory_of(*inst.ep));
  return os.str();
}

json EnvService::scene_meta(const std::string& env_id) const {
  const Instance& inst = instance(env_id);
  json targets = json::array();
  for (const auto& t : default_catalog().target_categories())
    if (inst.scene.has_category(t)) targets.push_back(t);
  return {{"env_id", env_id},
          {"scene_id", inst.scene.id},
          {"layout_id", inst.scene.layout_id},
          {"width", inst.scene.width},
          {"depth", inst.scene.depth},
          {"resolution", kStepSize},
          {"targets", targets},
          {"task", task_json(inst.spec)}};
}

json EnvService::health() const {
  return {{"status", "ok"},
          {"envs", env_ids()},
          {"uptime_s", std::chrono::duration<double>(WallClock::now() - started_).count()},
          {"schemas", {kObservationSchema, kTrajectorySchema, kResultsSchema}}};
}

json EnvService::upload_trajectory(const std::string& text) {
  std::istringstream is(text);
  const TrajectoryFile traj = read_trajectory(is);
  const Instance* found = nullptr;
  for (const auto& [_, inst] : instances_)
    if (inst->scene.id == traj.scene_id) found = inst.get();
  if (!found) throw PreconditionError("unknown_scene", "no environment serves scene " + traj.scene_id);
  TaskSpec task = found->spec;
  task.target_category = traj.target;
  if (!found->scene.has_category(traj.target))
    throw PreconditionError("unknown_target", "scene has no " + traj.target);
  if (traj.steps.empty()) throw SchemaError("$", "trajectory has no steps");
  if (static_cast<int>(traj.steps.size()) > task.max_steps) throw SchemaError("$", "more steps than max_steps");
  for (std::size_t i = 0; i + 1 < traj.steps.size(); ++i)
    if (traj.steps[i].action == Action::Done) throw SchemaError("$[" + std::to_string(i + 1) + "]", "Done before the end");
  const bool done = traj.steps.back().action == Action::Done;
  if (done != (traj.outcome == Outcome::success || traj.outcome == Outcome::failed_done))
    throw SchemaError("$", "outcome does not match the final action");

  const NavGraph graph(found->scene, task);
  json optimal = json::array(), taken = json::array();
  double l = shortest_path_length_m(graph, traj.start.position);
  int optimal_actions = -1;
  if (std::isfinite(l)) {
    optimal_actions = static_cast<int>(shortest_path_actions(graph, traj.start, PathObjective::actions).size()) + 1;
    for (const auto& p : shortest_path_poses(graph, found->scene, traj.start)) optimal.push_back(pose_to_json(p));
  }
  taken.push_back(pose_to_json(traj.start));
  for (const auto& e : traj.steps)
    if (e.action != Action::Done) taken.push_back(pose_to_json(e.state));

  json stored = nullptr;
  long n;
  {
    std::lock_guard lock(results_mu_);
    n = ++uploads_;
  }
  if (!options_.upload_dir.empty()) {
    std::filesystem::create_directories(options_.upload_dir);
    const auto path = std::filesystem::path(options_.upload_dir) / ("trajectory-" + std::to_string(n) + ".jsonl");
    std::ofstream(path) << text;
    stored = path.string();
  }
  return {{"upload", n},
          {"stored", stored},
          {"steps", traj.steps.size()},
          {"outcome", to_string(traj.outcome)},
          {"optimal_actions", optimal_actions >= 0 ? json(optimal_actions) : json(nullptr)},
          {"shortest_path_m", std::isfinite(l) ? json(l) : json(nullptr)},
          {"shortest_path", optimal},
          {"taken_path", taken}};
}

std::vector<EpisodeResult> EnvService::results() const {
  std::lock_guard lock(results_mu_);
  return results_;
}

// ---------------------------------------------------------------------------
// HTTP

int http_status(const std::string& code) {
  if (code == "unauthorized") return 401;
  if (code == "busy" || code == "episode_terminated" || code == "no_episode") return 409;
  if (code == "unknown_env" || code == "unknown_scene" || code == "not_found") return 404;
  if (code == "internal") return 500;
  return 400;
}

json error_body(const std::string& code, const std::string& message, const json& extra) {
  json err{{"code", code}, {"message", message}};
  for (auto it = extra.begin(); it != extra.end(); ++it) err[it.key()] = it.value();
  return {{"error", err}};
}

namespace {

std::string bearer(const httplib::Request& req) {
  const std::string h = req.get_header_value("Authorization");
  const std::string prefix = "Bearer ";
  if (h.rfind(prefix, 0) != 0 || h.size() == prefix.size()) throw AuthError("missing bearer token");
  return h.substr(prefix.size());
}

json body_json(const httplib::Request& req) {
  if (req.body.empty()) return json::object();
  json j = json::parse(req.body);
  if (!j.is_object()) throw SchemaError("$", "request body must be an object");
  return j;
}

std::optional<Millis> duration_of(const json& body) {
  if (!body.contains("duration_s")) return std::nullopt;
  if (!body["duration_s"].is_number()) throw SchemaError("$.duration_s", "expected a number");
  const double s = body["duration_s"].get<double>();
  if (!(s > 0.0) || s * 1000.0 > static_cast<double>(kMaxLease.count()))
    throw PreconditionError("invalid_duration", "lease duration must lie in (0, 24 h]");
  return Millis(static_cast<long long>(std::llround(s * 1000.0)));
}

void send_json(httplib::Response& res, const json& j, int status = 200) {
  res.status = status;
  res.set_content(j.dump(), "application/json");
}

template <class F>
void guarded(httplib::Response& res, F&& f) {
  try {
    f();
  } catch (const BusyError& e) {
    send_json(res, error_body(e.code(), e.what(), {{"expires_at", format_timestamp(e.expires_at())}}), 409);
  } catch (const Error& e) {
    send_json(res, error_body(e.code(), e.what()), http_status(e.code()));
  } catch (const json::exception& e) {
    send_json(res, error_body("schema_violation", e.what()), 400);
  } catch (const std::exception& e) {
    send_json(res, error_body("internal", e.what()), 500);
  }
}

}  // namespace

HttpServer::HttpServer(EnvService& service, int threads)
    : service_(service), http_(std::make_unique<httplib::Server>()) {
  const auto n = static_cast<std::size_t>(std::max(1, threads));
  http_->new_task_queue = [n] { return new httplib::ThreadPool(n); };
  http_->set_tcp_nodelay(true);
  http_->set_keep_alive_timeout(1);
  routes();
}

HttpServer::~HttpServer() { stop(); }

void HttpServer::routes() {
  auto& s = *http_;
  s.Post("/v1/lease", [this](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      const json body = body_json(req);
      if (req.has_header("Authorization")) {
        send_json(res, service_.renew(bearer(req), duration_of(body)));
        return;
      }
      const std::string env = body.contains("env_id") ? body["env_id"].get<std::string>() : service_.env_ids().front();
      send_json(res, service_.acquire(env, duration_of(body)));
    });
  });
  s.Delete("/v1/lease", [this](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] { send_json(res, service_.release(bearer(req))); });
  });
  s.Post("/v1/episode/reset", [this](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      const std::string token = bearer(req);
      const json body = body_json(req);
      std::optional<std::string> target;
      std::optional<std::uint64_t> seed;
      if (body.contains("target")) target = body["target"].get<std::string>();
      if (body.contains("seed")) seed = body["seed"].get<std::uint64_t>();
      send_json(res, service_.reset(token, target, seed));
    });
  });
  s.Post("/v1/episode/step", [this](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      const std::string token = bearer(req);
      const json body = body_json(req);
      if (!body.contains("action") || !body["action"].is_string())
        throw SchemaError("$.action", "expected an action name");
      send_json(res, service_.step(token, body["action"].get<std::string>()));
    });
  });
  s.Get("/v1/episode/trajectory", [this](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] { res.set_content(service_.trajectory(bearer(req)), "application/x-ndjson"); });
  });
  s.Post("/v1/trajectory", [this](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] { send_json(res, service_.upload_trajectory(req.body)); });
  });
  s.Get("/v1/pose", [this](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] { send_json(res, service_.pose(bearer(req))); });
  });
  s.Get("/v1/scene/meta", [this](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      const std::string env = req.has_param("env_id") ? req.get_param_value("env_id") : service_.env_ids().front();
      send_json(res, service_.scene_meta(env));
    });
  });
  s.Get("/v1/health", [this](const httplib::Request&, httplib::Response& res) {
    guarded(res, [&] { send_json(res, service_.health()); });
  });
  s.set_error_handler([](const httplib::Request&, httplib::Response& res) {
    if (res.body.empty()) {
      const std::string code = res.status == 404 ? "not_found" : "bad_request";
      send_json(res, error_body(code, "no such endpoint or method"), res.status);
    }
  });
}

int HttpServer::bind(const std::string& host, int port) {
  const int bound = port == 0 ? http_->bind_to_any_port(host) : (http_->bind_to_port(host, port) ? port : -1);
  if (bound < 0) throw Error("bind_failed", "cannot bind " + host + ":" + std::to_string(port));
  return bound;
}

void HttpServer::start() {
  thread_ = std::thread([this] { http_->listen_after_bind(); });
  http_->wait_until_ready();
}

void HttpServer::run() { http_->listen_after_bind(); }

void HttpServer::stop() {
  if (http_) http_->stop();
  if (thread_.joinable()) thread_.join();
}

// ---------------------------------------------------------------------------
// Client

RemoteEnvClient::RemoteEnvClient(std::string host, int port)
    : http_(std::make_unique<httplib::Client>(host, port)) {
  http_->set_keep_alive(false);
  http_->set_tcp_nodelay(true);
  http_->set_read_timeout(60, 0);
}

RemoteEnvClient::~RemoteEnvClient() = default;

std::string RemoteEnvClient::raw(const std::string& method, const std::string& path, const std::string& body,
                                 const std::string& content_type) {
  httplib::Headers headers;
  if (!token_.empty()) headers.emplace("Authorization", "Bearer " + token_);
  httplib::Result r = method == "GET"    ? http_->Get(path, headers)
                      : method == "POST" ? http_->Post(path, headers, body, content_type)
                                         : http_->Delete(path, headers);
  if (!r) throw RemoteError(0, "transport", "HTTP " + method + " " + path + " failed: " + httplib::to_string(r.error()), {});
  if (r->status != 200) {
    json j = json::parse(r->body, nullptr, false);
    const bool keyed = j.is_object() && j.contains("error");
    throw RemoteError(r->status, keyed ? j["error"].value("code", "unknown") : "http_" + std::to_string(r->status),
                      keyed ? j["error"].value("message", "") : r->body, keyed ? j : json());
  }
  return r->body;
}

json RemoteEnvClient::call(const std::string& method, const std::string& path, const json* body) {
  return json::parse(raw(method, path, body ? body->dump() : std::string(), "application/json"));
}

json RemoteEnvClient::acquire(const std::string& env_id, std::optional<double> duration_s) {
  json body{{"env_id", env_id}};
  if (duration_s) body["duration_s"] = *duration_s;
  token_.clear();
  json lease = call("POST", "/v1/lease", &body);
  token_ = lease.at("token").get<std::string>();
  return lease;
}

json RemoteEnvClient::release() {
  json out = call("DELETE", "/v1/lease", nullptr);
  token_.clear();
  return out;
}

json RemoteEnvClient::reset(const std::optional<std::string>& target, std::optional<std::uint64_t> seed) {
  json body = json::object();
  if (target) body["target"] = *target;
  if (seed) body["seed"] = *seed;
  return call("POST", "/v1/episode/reset", &body);
}

json RemoteEnvClient::step(const std::string& action) {
  const json body{{"action", action}};
  return call("POST", "/v1/episode/step", &body);
}

json RemoteEnvClient::pose() { return call("GET", "/v1/pose", nullptr); }

std::string RemoteEnvClient::trajectory() { return raw("GET", "/v1/episode/trajectory", "", ""); }

json RemoteEnvClient::upload_trajectory(const std::string& text) {
  return json::parse(raw("POST", "/v1/trajectory", text, "application/x-ndjson"));
}

json RemoteEnvClient::scene_meta(const std::string& env_id) {
  return call("GET", "/v1/scene/meta?env_id=" + env_id, nullptr);
}

json RemoteEnvClient::health() { return call("GET", "/v1/health", nullptr); }

}  // namespace navth
