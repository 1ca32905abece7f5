// Python bindings for the main operations: model builders, partitions,
// constrained/unconstrained minimization, exact oracles, and the
// experiment runner.

#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <fstream>
#include <sstream>

#include "sepmps/dmrg.hpp"
#include "sepmps/ed.hpp"
#include "sepmps/experiment.hpp"
#include "sepmps/mps.hpp"

namespace py = pybind11;
using namespace sepmps;

namespace {

SolverConfig make_solver(std::size_t bond_dim, std::size_t max_sweeps,
                         double rel_tol, std::size_t restarts,
                         std::uint64_t base_seed, std::size_t dense_threshold,
                         std::size_t max_krylov_iters) {
  SolverConfig cfg;
  cfg.bond_dim = bond_dim;
  cfg.max_sweeps = max_sweeps;
  cfg.rel_tol = rel_tol;
  cfg.restarts = restarts;
  cfg.base_seed = base_seed;
  cfg.dense_threshold = dense_threshold;
  cfg.max_krylov_iters = max_krylov_iters;
  return cfg;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Spin-chain ground energies over partially separable states";

  py::register_exception<ShapeError>(m, "ShapeError", PyExc_ValueError);
  py::register_exception<NumericalError>(m, "NumericalError",
                                         PyExc_ArithmeticError);
  py::register_exception<ConvergenceError>(m, "ConvergenceError",
                                           PyExc_RuntimeError);
  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);

  py::class_<Hamiltonian>(m, "Hamiltonian")
      .def_readonly("n", &Hamiltonian::n)
      .def_readonly("d", &Hamiltonian::d)
      .def_readonly("label", &Hamiltonian::label)
      .def_property_readonly(
          "term_count", [](const Hamiltonian& h) { return h.terms.size(); })
      .def("__repr__", [](const Hamiltonian& h) {
        std::ostringstream out;
        out << "<Hamiltonian " << h.label << " n=" << h.n << " d=" << h.d
            << " terms=" << h.terms.size() << ">";
        return out.str();
      });

  py::class_<PartitionSpec>(m, "PartitionSpec")
      .def_readonly("parts", &PartitionSpec::parts)
      .def_readonly("n", &PartitionSpec::n)
      .def("__repr__", [](const PartitionSpec& spec) {
        std::ostringstream out;
        out << "<PartitionSpec";
        for (const auto& part : spec.parts) {
          out << " [";
          for (std::size_t i = 0; i < part.size(); ++i) {
            if (i) out << ",";
            out << part[i];
          }
          out << "]";
        }
        out << ">";
        return out.str();
      });

  py::class_<SweepReport>(m, "SweepReport")
      .def_readonly("energies_per_update", &SweepReport::energies_per_update)
      .def_readonly("sweeps_used", &SweepReport::sweeps_used)
      .def_readonly("converged", &SweepReport::converged)
      .def_readonly("restart_index", &SweepReport::restart_index);

  py::class_<MinimizeResult>(m, "MinimizeResult")
      .def_readonly("energy", &MinimizeResult::energy)
      .def_readonly("converged", &MinimizeResult::converged)
      .def_readonly("best_restart", &MinimizeResult::best_restart)
      .def_readonly("report", &MinimizeResult::report)
      .def_property_readonly("factor_count",
                             [](const MinimizeResult& r) {
                               return extract_factors(r.state).size();
                             })
      .def("__repr__", [](const MinimizeResult& r) {
        std::ostringstream out;
        out << "<MinimizeResult energy=" << r.energy
            << " converged=" << (r.converged ? "True" : "False") << ">";
        return out.str();
      });

  m.def("dimerised_heisenberg", &build_dimerised_heisenberg, py::arg("n"),
        py::arg("delta"), "Open-chain dimerised spin-1/2 Heisenberg model");
  m.def("blbq", &build_blbq, py::arg("n"), py::arg("alpha"),
        "Open-chain spin-1 bilinear-biquadratic model");

  m.def("p_step_partition", &p_step_partition, py::arg("n"), py::arg("p"));
  m.def("parse_partition", &parse_partition, py::arg("text"), py::arg("n"),
        "Parse 'p=<int>' or 'parts=1,2|3,4'");

  m.def(
      "minimize_energy",
      [](const Hamiltonian& h, std::size_t bond_dim, std::size_t max_sweeps,
         double rel_tol, std::size_t restarts, std::uint64_t seed,
         std::size_t dense_threshold, std::size_t max_krylov_iters) {
        SolverConfig cfg =
            make_solver(bond_dim, max_sweeps, rel_tol, restarts, seed,
                        dense_threshold, max_krylov_iters);
        return minimize(h, uniform_profile(h.n, bond_dim), cfg);
      },
      py::arg("hamiltonian"), py::arg("bond_dim") = 16,
      py::arg("max_sweeps") = 200, py::arg("rel_tol") = 1e-10,
      py::arg("restarts") = 8, py::arg("seed") = 1,
      py::arg("dense_threshold") = 512, py::arg("max_krylov_iters") = 400,
      "Unconstrained variational ground-state energy");

  m.def(
      "constrained_energy",
      [](const Hamiltonian& h, const PartitionSpec& spec,
         std::size_t bond_dim, std::size_t max_sweeps, double rel_tol,
         std::size_t restarts, std::uint64_t seed,
         std::size_t dense_threshold, std::size_t max_krylov_iters) {
        SolverConfig cfg =
            make_solver(bond_dim, max_sweeps, rel_tol, restarts, seed,
                        dense_threshold, max_krylov_iters);
        return constrained_ground_energy(h, spec, cfg);
      },
      py::arg("hamiltonian"), py::arg("partition"), py::arg("bond_dim") = 16,
      py::arg("max_sweeps") = 200, py::arg("rel_tol") = 1e-10,
      py::arg("restarts") = 8, py::arg("seed") = 1,
      py::arg("dense_threshold") = 512, py::arg("max_krylov_iters") = 400,
      "Minimal energy over states separable under the given partition");

  m.def("dense_ground_energy", &dense_ground_energy, py::arg("hamiltonian"),
        "Exact ground energy by dense diagonalization (d^n <= 4096)");
  m.def("krylov_ground_energy", &krylov_ground_energy, py::arg("hamiltonian"));
  m.def(
      "block_oracle_energy",
      [](const Hamiltonian& h, const PartitionSpec& spec,
         std::size_t multistarts, std::uint64_t seed) {
        return alternating_block_oracle(h, spec, multistarts, seed).energy;
      },
      py::arg("hamiltonian"), py::arg("partition"), py::arg("multistarts") = 20,
      py::arg("seed") = 1,
      "Best product-state energy over a bipartition (exact per-part solves)");

  m.def(
      "run_experiment_file",
      [](const std::string& config_path, const std::string& out_path,
         std::size_t threads) {
        ExperimentConfig config = load_config_file(config_path);
        if (threads > 0) config.threads = threads;
        auto records = run_experiment(config);
        const std::string path =
            out_path.empty() ? config.output_path : out_path;
        if (!path.empty()) {
          std::ofstream out(path);
          if (!out) throw ConfigError(0, "cannot write '" + path + "'");
          write_csv(records, out);
        }
        std::size_t bad = 0;
        for (const auto& r : records) {
          if (!r.converged) ++bad;
        }
        return py::make_tuple(records.size(), bad);
      },
      py::arg("config_path"), py::arg("out_path") = std::string(),
      py::arg("threads") = 0,
      "Run a config-file experiment; returns (records, non_converged)");
}
