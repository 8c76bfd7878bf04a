#include <sstream>

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "netspill/cli.hpp"
#include "netspill/errors.hpp"
#include "netspill/graph.hpp"
#include "netspill/meanfield.hpp"
#include "netspill/params.hpp"
#include "netspill/rng.hpp"
#include "netspill/spectral.hpp"
#include "netspill/spillover.hpp"
#include "netspill/stochastic.hpp"

namespace py = pybind11;
using namespace netspill;

namespace {

// pybind11 holders cannot be pointers to const
using GraphPtr = std::shared_ptr<Graph>;

GraphPtr share(Graph g) { return std::make_shared<Graph>(std::move(g)); }

GraphPtr unconst(const std::shared_ptr<const Graph>& g) { return std::const_pointer_cast<Graph>(g); }

std::vector<std::pair<NodeId, NodeId>> edge_pairs(const Graph& g) {
  std::vector<std::pair<NodeId, NodeId>> out;
  for (const auto& e : g.edges()) out.emplace_back(e.u, e.v);
  return out;
}

LinkSpec link_spec(const std::string& mode, double value) {
  if (mode == "probability") return LinkSpec::probability(value);
  if (mode == "count") return LinkSpec::count(static_cast<std::uint64_t>(value));
  if (mode == "fraction") return LinkSpec::fraction(value);
  throw ParameterError("link mode must be probability, count or fraction");
}

spillover::SweepOptions sweep_options(std::size_t realizations, std::uint64_t seeds_per_run, Seed master_seed,
                                      const std::string& mode, NodeId num_hubs, const std::string& draw,
                                      unsigned threads) {
  spillover::SweepOptions o;
  o.realizations = realizations;
  o.seeds_per_run = seeds_per_run;
  o.master_seed = master_seed;
  if (mode == "hubs") {
    o.mode = spillover::CouplingMode::hubs;
  } else if (mode != "random") {
    throw ParameterError("coupling mode must be random or hubs");
  }
  o.num_hubs = num_hubs;
  if (draw == "fixed") {
    o.draw = spillover::CouplingDraw::fixed;
  } else if (draw != "redraw") {
    throw ParameterError("coupling draw must be redraw or fixed");
  }
  o.threads = threads;
  return o;
}

py::dict sweep_dict(const spillover::SweepResult& r) {
  py::dict d;
  d["parameter"] = r.parameter;
  d["grid"] = r.grid();
  d["probability"] = r.probabilities();
  std::vector<double> se;
  std::vector<std::vector<std::uint64_t>> sizes;
  for (const auto& p : r.points) {
    se.push_back(p.standard_error);
    sizes.push_back(p.raw_sizes);
  }
  d["stderr"] = se;
  d["raw_sizes"] = sizes;
  d["critical"] = r.critical;
  return d;
}

}  // namespace

PYBIND11_MODULE(_netspill, m) {
  m.doc() = "Two-layer SIR epidemics on coupled networks";
  m.attr("__version__") = NETSPILL_VERSION;

  auto base_numeric = py::register_exception<NumericError>(m, "NumericError", PyExc_RuntimeError);
  py::register_exception<CalibrationError>(m, "CalibrationError", base_numeric.ptr());
  py::register_exception<ParameterError>(m, "ParameterError", PyExc_ValueError);
  py::register_exception<IoError>(m, "IoError", PyExc_OSError);

  m.def("derive_seed", &derive_seed, py::arg("master"), py::arg("index"));

  py::class_<Graph, GraphPtr>(m, "Graph")
      .def(py::init([](NodeId n, const std::vector<std::pair<NodeId, NodeId>>& edges) {
             std::vector<Edge> list;
             for (const auto& [u, v] : edges) list.push_back({u, v});
             return share(Graph::from_edges(n, list));
           }),
           py::arg("n"), py::arg("edges") = std::vector<std::pair<NodeId, NodeId>>{})
      .def_property_readonly("size", &Graph::size)
      .def_property_readonly("num_edges", &Graph::num_edges)
      .def("degree", &Graph::degree)
      .def("neighbors", [](const Graph& g, NodeId v) {
        const auto nb = g.neighbors(v);
        return std::vector<NodeId>(nb.begin(), nb.end());
      })
      .def("edges", &edge_pairs)
      .def("__len__", &Graph::size);

  m.def("erdos_renyi", [](NodeId n, double p, Seed seed) { return share(gen_erdos_renyi(n, p, seed)); },
        py::arg("n"), py::arg("p"), py::arg("seed"));
  m.def("erdos_renyi_gnm",
        [](NodeId n, std::uint64_t edges, Seed seed) { return share(gen_erdos_renyi_gnm(n, edges, seed)); },
        py::arg("n"), py::arg("edges"), py::arg("seed"));
  m.def("watts_strogatz",
        [](NodeId n, NodeId k, double p, Seed seed) { return share(gen_watts_strogatz(n, k, p, seed)); },
        py::arg("n"), py::arg("k"), py::arg("p_rewire"), py::arg("seed"));
  m.def(
      "barabasi_albert",
      [](NodeId n, NodeId m_attach, std::optional<std::uint64_t> edges, Seed seed) {
        return share(edges ? gen_barabasi_albert_edges(n, m_attach, *edges, seed)
                           : gen_barabasi_albert(n, m_attach, seed));
      },
      py::arg("n"), py::arg("m"), py::arg("edges") = py::none(), py::arg("seed") = 0);

  py::class_<LayeredNetwork>(m, "LayeredNetwork")
      .def(py::init([](GraphPtr g1, GraphPtr g2, const std::vector<std::pair<NodeId, NodeId>>& links) {
             std::vector<InterLink> list;
             for (const auto& [u, w] : links) list.push_back({u, w});
             return LayeredNetwork(std::move(g1), std::move(g2), std::move(list));
           }),
           py::arg("layer1"), py::arg("layer2"), py::arg("interlinks"))
      .def_property_readonly("n1", &LayeredNetwork::n1)
      .def_property_readonly("n2", &LayeredNetwork::n2)
      .def_property_readonly("layer1", [](const LayeredNetwork& net) { return unconst(net.layer1_ptr()); })
      .def_property_readonly("layer2", [](const LayeredNetwork& net) { return unconst(net.layer2_ptr()); })
      .def("interlinks", [](const LayeredNetwork& net) {
        std::vector<std::pair<NodeId, NodeId>> out;
        for (const auto& l : net.interlinks()) out.emplace_back(l.u, l.w);
        return out;
      });

  m.def(
      "couple_random",
      [](GraphPtr g1, GraphPtr g2, const std::string& mode, double value, Seed seed) {
        return couple_random(std::move(g1), std::move(g2), link_spec(mode, value), seed);
      },
      py::arg("layer1"), py::arg("layer2"), py::arg("mode"), py::arg("value"), py::arg("seed"));
  m.def(
      "couple_to_hubs",
      [](GraphPtr g1, GraphPtr g2, std::uint64_t count, NodeId num_hubs, Seed seed) {
        return couple_to_hubs(std::move(g1), std::move(g2), count, num_hubs, seed);
      },
      py::arg("layer1"), py::arg("layer2"), py::arg("count"), py::arg("num_hubs"), py::arg("seed"));

  py::class_<EpidemicParams>(m, "EpidemicParams")
      .def(py::init([](double beta11, double beta12, double beta21, double beta22, double mu, double alpha) {
             return EpidemicParams{beta11, beta12, beta21, beta22, mu, alpha};
           }),
           py::arg("beta11") = 0.0, py::arg("beta12") = 0.0, py::arg("beta21") = 0.0, py::arg("beta22") = 0.0,
           py::arg("mu") = 1.0, py::arg("alpha") = 1.0)
      .def_static("coupled", &EpidemicParams::coupled, py::arg("beta11"), py::arg("beta22"), py::arg("alpha"),
                  py::arg("mu") = 1.0)
      .def_readwrite("beta11", &EpidemicParams::beta11)
      .def_readwrite("beta12", &EpidemicParams::beta12)
      .def_readwrite("beta21", &EpidemicParams::beta21)
      .def_readwrite("beta22", &EpidemicParams::beta22)
      .def_readwrite("mu", &EpidemicParams::mu)
      .def_readwrite("alpha", &EpidemicParams::alpha)
      .def("validate", &EpidemicParams::validate, py::arg("enforce_constraint") = false);

  m.def("adjacency_spectral_radius", [](const Graph& g) { return spectral::adjacency_spectral_radius(g); });
  m.def(
      "epidemic_threshold",
      [](const LayeredNetwork& net, double tau22, double alpha) {
        return spectral::epidemic_threshold(net, tau22, alpha);
      },
      py::arg("net"), py::arg("tau22"), py::arg("alpha") = 1.0);
  m.def(
      "block_spectral_radius",
      [](const LayeredNetwork& net, double t11, double t12, double t21, double t22) {
        return spectral::block_spectral_radius(net, t11, t12, t21, t22);
      },
      py::arg("net"), py::arg("tau11"), py::arg("tau12"), py::arg("tau21"), py::arg("tau22"));
  m.def(
      "jacobian_leading_eigenvalue",
      [](const LayeredNetwork& net, const EpidemicParams& p) { return spectral::jacobian_leading_eigenvalue(net, p); },
      py::arg("net"), py::arg("params"));
  m.def(
      "threshold_curve",
      [](const LayeredNetwork& net, double alpha, const std::vector<double>& grid, unsigned threads) {
        spectral::CurveOptions opts;
        opts.threads = threads;
        const auto curve = spectral::threshold_curve(net, alpha, grid, opts);
        std::vector<std::pair<double, double>> out;
        for (const auto& p : curve.points) out.emplace_back(p.tau2, p.tau_c1);
        return out;
      },
      py::arg("net"), py::arg("alpha"), py::arg("tau2_grid"), py::arg("threads") = 1,
      "List of (tau2, tau_c1) pairs.");

  m.def(
      "integrate_meanfield",
      [](const LayeredNetwork& net, const EpidemicParams& p, double init_fraction, Seed seed, double t_end,
         double dt, std::size_t sample_every) {
        const auto init = meanfield::seeded_initial_state(net, init_fraction, seed);
        const auto traj = meanfield::integrate(net, p, init, {t_end, dt, sample_every, false});
        py::dict d;
        d["t"] = traj.times;
        for (int m = 0; m < 2; ++m) {
          std::vector<double> s, i, r;
          for (const auto& layers : traj.layers) {
            s.push_back(layers[m].s);
            i.push_back(layers[m].i);
            r.push_back(layers[m].r);
          }
          const std::string suffix = std::to_string(m + 1);
          d[("S" + suffix).c_str()] = s;
          d[("I" + suffix).c_str()] = i;
          d[("R" + suffix).c_str()] = r;
        }
        return d;
      },
      py::arg("net"), py::arg("params"), py::arg("init_fraction") = 0.01, py::arg("seed") = 0,
      py::arg("t_end") = 30.0, py::arg("dt") = 0.01, py::arg("sample_every") = 1,
      "Aggregate trajectories t, S1, I1, R1, S2, I2, R2.");

  m.def(
      "simulate",
      [](const LayeredNetwork& net, const EpidemicParams& p, const std::vector<std::pair<int, NodeId>>& seeds,
         Seed seed) {
        std::vector<stochastic::NodeRef> refs;
        for (const auto& [layer, node] : seeds) {
          if (layer != 1 && layer != 2) throw ParameterError("seed layer must be 1 or 2");
          refs.push_back({layer == 1 ? stochastic::Layer::first : stochastic::Layer::second, node});
        }
        const auto out = stochastic::simulate(net, p, refs, seed);
        return py::make_tuple(out.ever_infected[0], out.ever_infected[1], out.extinction_time);
      },
      py::arg("net"), py::arg("params"), py::arg("seeds"), py::arg("seed"),
      "One realization from (layer, node) seeds; returns (ever_infected_1, ever_infected_2, extinction_time).");
  m.def(
      "run_ensemble",
      [](const LayeredNetwork& net, const EpidemicParams& p, int seed_layer, std::uint64_t seed_count,
         std::size_t realizations, Seed master_seed, unsigned threads) {
        if (seed_layer != 1 && seed_layer != 2) throw ParameterError("seed layer must be 1 or 2");
        const stochastic::SeedStrategy strategy{
            seed_layer == 1 ? stochastic::Layer::first : stochastic::Layer::second, seed_count};
        stochastic::EnsembleOptions opts;
        opts.threads = threads;
        const auto outcomes = stochastic::run_ensemble(net, p, strategy, realizations, master_seed, opts);
        std::vector<std::pair<std::uint64_t, std::uint64_t>> sizes;
        for (const auto& o : outcomes) sizes.emplace_back(o.ever_infected[0], o.ever_infected[1]);
        return sizes;
      },
      py::arg("net"), py::arg("params"), py::arg("seed_layer") = 2, py::arg("seed_count") = 10,
      py::arg("realizations") = 2000, py::arg("master_seed") = 0, py::arg("threads") = 0);

  m.def(
      "sweep_links",
      [](GraphPtr host, GraphPtr reservoir, const EpidemicParams& p, const std::vector<double>& fractions,
         std::size_t realizations, std::uint64_t seeds_per_run, Seed master_seed, const std::string& mode,
         NodeId num_hubs, const std::string& draw, unsigned threads) {
        return sweep_dict(spillover::sweep_links(
            host, reservoir, p, fractions,
            sweep_options(realizations, seeds_per_run, master_seed, mode, num_hubs, draw, threads)));
      },
      py::arg("host"), py::arg("reservoir"), py::arg("params"), py::arg("fractions"), py::arg("realizations") = 2000,
      py::arg("seeds_per_run") = 10, py::arg("master_seed") = 0, py::arg("mode") = "random", py::arg("num_hubs") = 5,
      py::arg("draw") = "redraw", py::arg("threads") = 0);
  m.def(
      "sweep_beta12",
      [](GraphPtr host, GraphPtr reservoir, const EpidemicParams& p, const std::vector<double>& grid,
         std::uint64_t link_count, std::size_t realizations, std::uint64_t seeds_per_run, Seed master_seed,
         unsigned threads) {
        return sweep_dict(spillover::sweep_beta12(
            host, reservoir, p, grid, link_count,
            sweep_options(realizations, seeds_per_run, master_seed, "random", 5, "redraw", threads)));
      },
      py::arg("host"), py::arg("reservoir"), py::arg("params"), py::arg("beta12_grid"), py::arg("link_count") = 1000,
      py::arg("realizations") = 2000, py::arg("seeds_per_run") = 10, py::arg("master_seed") = 0,
      py::arg("threads") = 0);
  m.def(
      "detect_transition",
      [](const std::vector<double>& grid, const std::vector<double>& probs, double p_threshold) {
        return spillover::detect_transition(grid, probs, p_threshold);
      },
      py::arg("grid"), py::arg("probabilities"), py::arg("p_threshold") = 0.1);
  m.def(
      "calibrate_reservoir_rate",
      [](GraphPtr reservoir, double lo, double hi, std::size_t realizations, Seed master_seed, unsigned threads) {
        spillover::CalibrationOptions opts;
        opts.target_lo = lo;
        opts.target_hi = hi;
        opts.realizations = realizations;
        opts.master_seed = master_seed;
        opts.threads = threads;
        const auto r = spillover::calibrate_reservoir_rate(reservoir, opts);
        return py::make_tuple(r.beta22, r.mean);
      },
      py::arg("reservoir"), py::arg("target_lo") = 51.0, py::arg("target_hi") = 53.0,
      py::arg("realizations") = 2000, py::arg("master_seed") = 0, py::arg("threads") = 0,
      "Returns (beta22, achieved mean).");

  m.def(
      "run_cli",
      [](const std::vector<std::string>& args) {
        std::vector<std::string> full{"netspill"};
        full.insert(full.end(), args.begin(), args.end());
        std::vector<const char*> argv;
        for (const auto& a : full) argv.push_back(a.c_str());
        std::ostringstream out, err;
        const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
        return py::make_tuple(code, out.str(), err.str());
      },
      py::arg("args"), "Runs the command-line tool in process; returns (exit_code, stdout, stderr).");
}
