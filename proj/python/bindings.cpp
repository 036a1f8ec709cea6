#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "navth/agents.hpp"
#include "navth/io.hpp"
#include "navth/pathing.hpp"
#include "navth/server.hpp"

namespace py = pybind11;
using namespace navth;

namespace {

py::object to_py(const json& j) { return py::module_::import("json").attr("loads")(j.dump()); }

json from_py(const py::handle& obj) {
  return json::parse(py::module_::import("json").attr("dumps")(obj).cast<std::string>());
}

TaskSpec make_spec(const std::string& target, double fov) {
  TaskSpec spec;
  spec.target_category = target;
  spec.camera.fov = fov;
  spec.validate();
  return spec;
}

/// One in-process episode stream over a scene.
class Env {
 public:
  Env(Scene scene, std::string target, double fov, bool noise, std::uint64_t seed)
      : scene_(std::move(scene)), spec_(make_spec(target, fov)),
        noise_(noise ? MotionNoiseModel::robot() : MotionNoiseModel::none()), rng_(seed) {}

  py::object reset(std::optional<std::uint64_t> seed) {
    if (seed) rng_ = Rng(*seed);
    ep_ = navth::reset(scene_, spec_, rng_);
    return to_py(observation_to_json(episode_observation(*ep_, false)));
  }

  py::object step(const std::string& action) {
    if (!ep_) throw PreconditionError("no_episode", "call reset first");
    if (ep_->terminated()) throw PreconditionError("episode_terminated", "episode has terminated");
    const auto r = episode_step(*ep_, action_from_string(action), noise_, rng_);
    return to_py({{"observation", observation_to_json(r.observation)},
                  {"reward", r.reward},
                  {"terminated", ep_->terminated()},
                  {"outcome", to_string(ep_->outcome)},
                  {"t", ep_->t}});
  }

  py::object pose() const {
    if (!ep_) throw PreconditionError("no_episode", "call reset first");
    return to_py(pose_to_json(ep_->agent));
  }

  std::string trajectory() const {
    if (!ep_) throw PreconditionError("no_episode", "call reset first");
    std::ostringstream os;
    write_trajectory(os, trajectory_of(*ep_));
    return os.str();
  }

  /// Noise-free metric-optimal plan from the current pose, without the final Done.
  std::vector<std::string> shortest_path() const {
    if (!ep_) throw PreconditionError("no_episode", "call reset first");
    std::vector<std::string> out;
    for (Action a : shortest_path_actions(scene_, ep_->agent, spec_, PathObjective::metric_then_actions))
      out.emplace_back(to_string(a));
    return out;
  }

  const Scene& scene() const { return scene_; }

 private:
  Scene scene_;
  TaskSpec spec_;
  MotionNoiseModel noise_;
  Rng rng_;
  std::optional<EpisodeState> ep_;
};

/// EnvService behind an HTTP listener on a background thread.
class Server {
 public:
  Server(const std::vector<Scene>& scenes, std::uint64_t seed, const std::string& results_path,
         const std::string& upload_dir) {
    if (scenes.empty()) throw PreconditionError("empty_corpus", "at least one scene is required");
    std::vector<EnvSetup> envs;
    for (std::size_t i = 0; i < scenes.size(); ++i) {
      EnvSetup e;
      e.env_id = "env-" + std::to_string(i);
      e.scene = scenes[i];
      e.seed = mix_seed(seed, i);
      envs.push_back(std::move(e));
    }
    ServiceOptions opts;
    opts.results_path = results_path;
    opts.upload_dir = upload_dir;
    service_ = std::make_unique<EnvService>(std::move(envs), opts);
    http_ = std::make_unique<HttpServer>(*service_, 8);
  }
  ~Server() { stop(); }

  int start(const std::string& host, int port) {
    port_ = http_->bind(host, port);
    http_->start();
    return port_;
  }
  void stop() {
    if (http_) http_->stop();
  }
  int port() const { return port_; }
  std::vector<py::object> results() const {
    std::vector<py::object> out;
    for (const auto& r : service_->results()) out.push_back(to_py(result_to_json(r)));
    return out;
  }

 private:
  std::unique_ptr<EnvService> service_;
  std::unique_ptr<HttpServer> http_;
  int port_ = 0;
};

std::unique_ptr<Agent> baseline(const std::string& name) {
  if (name == "random") return policy_agent(std::shared_ptr<const Policy>(random_policy()));
  if (name == "instant_done") return policy_agent(std::shared_ptr<const Policy>(instant_done_policy()));
  if (name == "oracle") return oracle_agent();
  throw PreconditionError("invalid_argument", "unknown agent: " + name);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Native core of the navth navigation benchmark";

  static py::exception<Error> error_type(m, "NavthError");
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::object exc = static_cast<const py::object&>(error_type)(std::string(e.what()));
      exc.attr("code") = e.code();
      PyErr_SetObject(error_type.ptr(), exc.ptr());
    }
  });

  py::class_<Scene>(m, "Scene")
      .def_readonly("id", &Scene::id)
      .def_readonly("layout_id", &Scene::layout_id)
      .def_readonly("seed", &Scene::seed)
      .def_readonly("width", &Scene::width)
      .def_readonly("depth", &Scene::depth)
      .def("categories", [](const Scene& s) {
        std::vector<std::string> out;
        for (const auto& o : s.objects) out.push_back(o.category);
        return out;
      })
      .def("to_json", [](const Scene& s) { return save_scene(s); })
      .def_static("from_json", [](const std::string& text) { return load_scene(text); }, py::arg("text"))
      .def("__eq__", [](const Scene& a, const Scene& b) { return a == b; });

  m.def("layouts", [](const std::string& split) {
    const auto& sp = default_catalog().splits;
    if (split == "train_val") return sp.train_val;
    if (split == "test_dev") return sp.test_dev;
    if (split == "test_standard") return sp.test_standard;
    throw PreconditionError("invalid_argument", "unknown layout pool: " + split);
  }, py::arg("pool"));
  m.def("target_categories", [] { return default_catalog().target_categories(); });
  m.def("generate_scene", [](const std::string& layout, std::uint64_t seed) {
    return generate_scene(default_catalog(), layout, seed);
  }, py::arg("layout_id"), py::arg("seed"), py::call_guard<py::gil_scoped_release>());
  m.def("shortest_path_length", [](const Scene& s, double x, double y, const std::string& target) {
    return shortest_path_length_m(s, {x, y}, make_spec(target, 42.5));
  }, py::arg("scene"), py::arg("x"), py::arg("y"), py::arg("target") = "Television");
  m.def("spl", [](const py::list& results) {
    std::vector<EpisodeResult> rs;
    for (const auto& r : results) rs.push_back(result_from_json(from_py(r)));
    return spl(rs);
  }, py::arg("results"));
  m.def("evaluate_baseline",
        [](const std::vector<Scene>& scenes, const std::string& agent, int starts_per_scene, std::uint64_t seed,
           bool noise) {
          std::vector<const Scene*> ptrs;
          for (const auto& s : scenes) ptrs.push_back(&s);
          const TaskSpec spec;
          std::vector<EpisodeResult> results;
          {
            py::gil_scoped_release release;
            const auto starts = make_eval_starts(ptrs, spec, starts_per_scene, seed);
            results = evaluate(*baseline(agent), starts, spec,
                               noise ? MotionNoiseModel::robot() : MotionNoiseModel::none(), 1, mix_seed(seed, 1));
          }
          std::vector<py::object> out;
          for (const auto& r : results) out.push_back(to_py(result_to_json(r)));
          return out;
        },
        py::arg("scenes"), py::arg("agent"), py::arg("starts_per_scene") = 50, py::arg("seed") = 1,
        py::arg("noise") = true);

  py::class_<Env>(m, "Env")
      .def(py::init<Scene, std::string, double, bool, std::uint64_t>(), py::arg("scene"),
           py::arg("target") = "Television", py::arg("fov") = 42.5, py::arg("noise") = true, py::arg("seed") = 1)
      .def("reset", &Env::reset, py::arg("seed") = py::none())
      .def("step", &Env::step, py::arg("action"))
      .def("pose", &Env::pose)
      .def("trajectory", &Env::trajectory)
      .def("shortest_path", &Env::shortest_path)
      .def_property_readonly("scene", &Env::scene);

  py::class_<Server>(m, "Server")
      .def(py::init<const std::vector<Scene>&, std::uint64_t, std::string, std::string>(), py::arg("scenes"),
           py::arg("seed") = 1, py::arg("results_path") = "", py::arg("upload_dir") = "")
      .def("start", &Server::start, py::arg("host") = "127.0.0.1", py::arg("port") = 0)
      .def("stop", &Server::stop, py::call_guard<py::gil_scoped_release>())
      .def_property_readonly("port", &Server::port)
      .def("results", &Server::results);
}
