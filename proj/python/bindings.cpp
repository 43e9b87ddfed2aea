#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "cli/commands.hpp"
#include "mwg/error.hpp"
#include "mwg/experiments.hpp"
#include "mwg/selftest.hpp"
#include "mwg/theory.hpp"

namespace py = pybind11;
using namespace mwg;

namespace {

Algorithm algorithm(const std::string& name) {
  if (auto k = parse_algorithm(name)) return *k;
  throw InvalidParameter("kind must be 'rwm' or 'mala'");
}

TargetSpec target_spec(const std::string& kind, std::size_t d, double rho, double nu) {
  auto k = parse_target_kind(kind);
  if (!k) throw InvalidParameter("unknown target kind '" + kind + "'");
  return {*k, d, rho, nu};
}

py::dict sweep_dict(const SweepResult& r) {
  py::dict out;
  std::vector<double> s2, l, acc, se, raw, norm;
  for (const auto& rec : r.records) {
    s2.push_back(rec.sigma2);
    l.push_back(rec.l);
    acc.push_back(rec.accept_hat);
    se.push_back(rec.accept_se);
    raw.push_back(rec.fose_raw);
    norm.push_back(rec.fose_norm);
  }
  out["sigma2"] = s2;
  out["l"] = l;
  out["accept_hat"] = acc;
  out["accept_se"] = se;
  out["fose_raw"] = raw;
  out["fose_norm"] = norm;
  out["accept_star"] = r.optimum.accept_star;
  out["fose_star"] = r.optimum.fose_star;
  out["theory_accept_star"] = r.theory_accept_star;
  out["theory_speed"] = r.theory_speed;
  return out;
}

// Runs a CLI subcommand in memory and returns {file name: contents}.
py::dict command(const std::string& name, const std::string& config_text) {
  const auto cfg = cli::RunConfig::parse_text(config_text);
  cli::CommandOutput out;
  {
    py::gil_scoped_release release;
    if (name == "theory-curve") out = cli::theory_curve_command(cfg);
    else if (name == "sweep") out = cli::sweep_command(cfg);
    else if (name == "tune") out = cli::tune_command(cfg);
    else if (name == "mixing") out = cli::mixing_command(cfg);
    else throw InvalidParameter("unknown command '" + name + "'");
  }
  py::dict files;
  for (const auto& [file, body] : out.files) files[py::str(file)] = body;
  return files;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Metropolis-within-Gibbs samplers and optimal-scaling theory";

  py::register_exception<InvalidParameter>(m, "InvalidParameter", PyExc_ValueError);
  py::register_exception<cli::ConfigError>(m, "ConfigError", PyExc_ValueError);

  auto theory = m.def_submodule("theory", "limiting acceptance and speed");
  theory.def("rwm_accept", &theory::rwm_accept, py::arg("c"), py::arg("l"), py::arg("I") = 1.0);
  theory.def("rwm_speed", &theory::rwm_speed, py::arg("c"), py::arg("l"), py::arg("I") = 1.0);
  theory.def("mala_accept", &theory::mala_accept, py::arg("c"), py::arg("l"), py::arg("K") = 0.25);
  theory.def("mala_speed", &theory::mala_speed, py::arg("c"), py::arg("l"), py::arg("K") = 0.25);
  theory.def(
      "optimal_l",
      [](const std::string& kind, double c, double constant) {
        const auto o = theory::optimal_l(algorithm(kind), c, constant);
        py::dict d;
        d["l_hat"] = o.l_hat;
        d["speed"] = o.speed;
        d["accept"] = o.accept;
        return d;
      },
      py::arg("kind"), py::arg("c"), py::arg("constant"));
  theory.def("cost_optimal_c", &theory::cost_optimal_c, py::arg("a"), py::arg("b"));
  theory.def("expected_accept_gaussian", &theory::expected_accept_gaussian, py::arg("mu"), py::arg("s"));
  theory.def(
      "exchangeable_overlay",
      [](const std::string& kind, double c, double rho, double l) {
        const auto r = theory::exchangeable_overlay(algorithm(kind), c, rho, l);
        return py::make_tuple(r.accept, r.speed);
      },
      py::arg("kind"), py::arg("c"), py::arg("rho"), py::arg("l"));

  m.def(
      "log_density",
      [](const std::vector<double>& x, const std::string& kind, double rho, double nu) {
        return log_density(make_target(target_spec(kind, x.size(), rho, nu)), x);
      },
      py::arg("x"), py::arg("kind") = "normal_iid", py::arg("rho") = 0.0, py::arg("nu") = 50.0);
  m.def(
      "grad_log_density",
      [](const std::vector<double>& x, const std::string& kind, double rho, double nu) {
        return grad_log_density(make_target(target_spec(kind, x.size(), rho, nu)), x);
      },
      py::arg("x"), py::arg("kind") = "normal_iid", py::arg("rho") = 0.0, py::arg("nu") = 50.0);
  m.def(
      "exact_sample",
      [](std::size_t d, const std::string& kind, double rho, double nu, std::uint64_t seed) {
        RandomStream rng(seed);
        return exact_sample(make_target(target_spec(kind, d, rho, nu)), rng);
      },
      py::arg("d"), py::arg("kind") = "normal_iid", py::arg("rho") = 0.0, py::arg("nu") = 50.0,
      py::arg("seed") = 0);

  m.def(
      "run_chain",
      [](std::size_t d, const std::string& target, const std::string& kind, double c, double sigma2,
         std::uint64_t steps, double rho, double nu, std::uint64_t seed) {
        const Target t = make_target(target_spec(target, d, rho, nu));
        ChainStats s;
        {
          py::gil_scoped_release release;
          s = run_chain_stats(t, algorithm(kind), c, sigma2, steps, RandomStream(seed));
        }
        return py::make_tuple(s.accept_hat, s.fose_raw);
      },
      py::arg("d"), py::arg("target") = "normal_iid", py::arg("kind") = "rwm", py::arg("c") = 1.0,
      py::arg("sigma2") = 0.1, py::arg("steps") = 10000, py::arg("rho") = 0.0, py::arg("nu") = 50.0,
      py::arg("seed") = 1,
      "Stationary chain from an exact draw; returns (acceptance rate, mean squared jump of coordinate 1).");

  m.def(
      "sweep",
      [](std::size_t d, const std::string& target, const std::string& kind, double c, std::size_t points,
         std::uint64_t iterations, double rho, double nu, std::uint64_t seed, unsigned threads) {
        SweepSpec spec;
        spec.target = target_spec(target, d, rho, nu);
        spec.kind = algorithm(kind);
        spec.c = c;
        spec.grid_points = points;
        spec.iterations = iterations;
        spec.seed = seed;
        spec.threads = threads;
        SweepResult r;
        {
          py::gil_scoped_release release;
          r = run_sweep(spec);
        }
        return sweep_dict(r);
      },
      py::arg("d"), py::arg("target") = "normal_iid", py::arg("kind") = "rwm", py::arg("c") = 1.0,
      py::arg("points") = 50, py::arg("iterations") = 100000, py::arg("rho") = 0.0, py::arg("nu") = 50.0,
      py::arg("seed") = 1, py::arg("threads") = 0);

  m.def(
      "tune",
      [](std::size_t d, const std::string& target, const std::string& kind, double c, double target_accept,
         std::uint64_t budget, double rho, double nu, std::uint64_t seed) {
        TuneSpec spec;
        spec.target = target_spec(target, d, rho, nu);
        spec.kind = algorithm(kind);
        spec.c = c;
        spec.target_accept = target_accept;
        spec.budget = budget;
        spec.seed = seed;
        TuneResult r;
        {
          py::gil_scoped_release release;
          r = tune_scale(spec);
        }
        py::dict out;
        out["l_tuned"] = r.l_tuned;
        out["sigma2"] = r.sigma2;
        out["accept_final"] = r.accept_final;
        out["converged"] = r.converged;
        return out;
      },
      py::arg("d"), py::arg("target") = "normal_iid", py::arg("kind") = "rwm", py::arg("c") = 1.0,
      py::arg("target_accept") = 0.234, py::arg("budget") = 200000, py::arg("rho") = 0.0, py::arg("nu") = 50.0,
      py::arg("seed") = 1);

  m.def(
      "selftest",
      [] {
        std::vector<py::tuple> out;
        for (const auto& r : run_selftest()) out.push_back(py::make_tuple(r.name, r.passed, r.detail));
        return out;
      },
      "Fast invariant suite; list of (name, passed, detail).");

  m.def("command", &command, py::arg("name"), py::arg("config") = "",
        "Runs a CLI subcommand on key = value config text; returns {file name: contents}.");
}
