#pragma once

#include <chrono>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "json.hpp"

#include "navth/error.hpp"
#include "navth/metrics.hpp"
#include "navth/pathing.hpp"
#include "navth/random.hpp"
#include "navth/task.hpp"

namespace httplib {
class Server;
class Client;
}

namespace navth {

using json = nlohmann::json;
using WallClock = std::chrono::system_clock;
using ClockFn = std::function<WallClock::time_point()>;
using Millis = std::chrono::milliseconds;

inline constexpr Millis kDefaultLease = std::chrono::minutes(10);
inline constexpr Millis kMaxLease = std::chrono::hours(24);

/// ISO-8601 UTC with millisecond precision, e.g. 2026-01-02T03:04:05.006Z.
std::string format_timestamp(WallClock::time_point t);
WallClock::time_point parse_timestamp(const std::string& s);

struct SessionLease {
  std::string token;  // 128-bit, lowercase hex
  std::string env_id;
  WallClock::time_point expires_at;
  bool renewable = true;
};

class BusyError : public Error {
 public:
  BusyError(const std::string& env_id, WallClock::time_point expires_at)
      : Error("busy", "environment " + env_id + " is leased until " + format_timestamp(expires_at)),
        expires_at_(expires_at) {}
  WallClock::time_point expires_at() const { return expires_at_; }

 private:
  WallClock::time_point expires_at_;
};

class AuthError : public Error {
 public:
  explicit AuthError(const std::string& message) : Error("unauthorized", message) {}
};

struct LeaseEvent {
  enum class Kind { grant, renew, release, expire, step };
  Kind kind = Kind::grant;
  std::string env_id;
  std::string token;
  WallClock::time_point at;
};

/// Exclusive per-environment leases. All table updates happen under one lock;
/// the optional audit sink observes them in that same linear order.
class LeaseTable {
 public:
  explicit LeaseTable(ClockFn clock = [] { return WallClock::now(); });

  void add_env(const std::string& env_id);
  bool has_env(const std::string& env_id) const;

  /// Grants iff no unexpired lease exists on env_id; throws BusyError or
  /// PreconditionError("unknown_env" / "invalid_duration").
  SessionLease acquire(const std::string& env_id, Millis duration = kDefaultLease);
  /// Extends a live lease to now + duration.
  SessionLease renew(const std::string& token, Millis duration = kDefaultLease);
  /// Idempotent; false when the token held nothing.
  bool release(const std::string& token);
  /// Env of a live lease, else AuthError. With `step`, records an accepted
  /// step atomically with the check.
  std::string authorize(const std::string& token, bool step = false);
  std::optional<SessionLease> holder(const std::string& env_id);

  void set_audit(std::function<void(const LeaseEvent&)> sink);
  WallClock::time_point now() const { return clock_(); }

 private:
  void expire_locked(const std::string& env_id, WallClock::time_point now);
  void emit(LeaseEvent::Kind kind, const std::string& env, const std::string& token, WallClock::time_point at);
  std::string new_token();

  ClockFn clock_;
  mutable std::mutex mu_;
  std::map<std::string, std::optional<SessionLease>> leases_;
  std::map<std::string, std::string> by_token_;
  Rng token_rng_;
  std::function<void(const LeaseEvent&)> audit_;
};

struct EnvSetup {
  std::string env_id = "env-0";
  Scene scene;
  TaskSpec spec;
  MotionNoiseModel noise = MotionNoiseModel::robot();
  std::uint64_t seed = 1;
};

struct ServiceOptions {
  Millis default_lease = kDefaultLease;
  /// Finished episodes are appended here as a results file; empty = memory only.
  std::string results_path;
  /// Uploaded trajectories are stored here; empty = not stored.
  std::string upload_dir;
};

/// Transport-independent environment service. Every request on one
/// environment runs under that environment's lock, in arrival order.
class EnvService {
 public:
  EnvService(std::vector<EnvSetup> envs, ServiceOptions options = {},
             ClockFn clock = [] { return WallClock::now(); });
  ~EnvService();

  LeaseTable& leases() { return leases_; }
  std::vector<std::string> env_ids() const;

  json acquire(const std::string& env_id, std::optional<Millis> duration);
  json renew(const std::string& token, std::optional<Millis> duration);
  json release(const std::string& token);
  /// Reseeds the environment stream when `seed` is given, then resets as
  /// task reset does.
  json reset(const std::string& token, const std::optional<std::string>& target,
             std::optional<std::uint64_t> seed);
  json step(const std::string& token, const std::string& action);
  json pose(const std::string& token);
  /// Current episode as navth-traj/1 text.
  std::string trajectory(const std::string& token);
  json scene_meta(const std::string& env_id) const;
  json health() const;
  /// Validates a navth-traj/1 upload against its scene and returns the
  /// step count next to the optimal plan.
  json upload_trajectory(const std::string& text);

  std::vector<EpisodeResult> results() const;

 private:
  struct Instance;
  Instance& instance(const std::string& env_id) const;
  void record(Instance& inst);

  ServiceOptions options_;
  LeaseTable leases_;
  std::map<std::string, std::unique_ptr<Instance>> instances_;
  mutable std::mutex results_mu_;
  std::vector<EpisodeResult> results_;
  long uploads_ = 0;
  WallClock::time_point started_;
};

/// HTTP status for an error code on the wire.
int http_status(const std::string& code);
/// {"error": {"code", "message"}} plus extra fields (e.g. expires_at).
json error_body(const std::string& code, const std::string& message, const json& extra = json::object());

/// HTTP front end for an EnvService (cpp-httplib), one worker pool.
class HttpServer {
 public:
  explicit HttpServer(EnvService& service, int threads = 32);
  ~HttpServer();
  HttpServer(const HttpServer&) = delete;
  HttpServer& operator=(const HttpServer&) = delete;

  /// Binds and returns the port; port 0 picks a free one.
  int bind(const std::string& host, int port);
  /// Serves on a background thread.
  void start();
  /// Serves on the calling thread until stop().
  void run();
  void stop();

 private:
  void routes();

  EnvService& service_;
  std::unique_ptr<httplib::Server> http_;
  std::thread thread_;
};

class RemoteError : public Error {
 public:
  RemoteError(int status, std::string code, const std::string& message, json body)
      : Error(std::move(code), message), status_(status), body_(std::move(body)) {}
  int status() const { return status_; }
  const json& body() const { return body_; }

 private:
  int status_;
  json body_;
};

/// Blocking HTTP client for the v1 protocol; one handle per thread.
class RemoteEnvClient {
 public:
  RemoteEnvClient(std::string host, int port);
  ~RemoteEnvClient();

  json acquire(const std::string& env_id, std::optional<double> duration_s = std::nullopt);
  json release();
  json reset(const std::optional<std::string>& target = std::nullopt,
             std::optional<std::uint64_t> seed = std::nullopt);
  json step(const std::string& action);
  json pose();
  std::string trajectory();
  json upload_trajectory(const std::string& text);
  json scene_meta(const std::string& env_id);
  json health();

  const std::string& token() const { return token_; }
  void set_token(std::string token) { token_ = std::move(token); }

 private:
  json call(const std::string& method, const std::string& path, const json* body);
  std::string raw(const std::string& method, const std::string& path, const std::string& body,
                  const std::string& content_type);

  std::unique_ptr<httplib::Client> http_;
  std::string token_;
};

}  // namespace navth
