#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "sepmps/dmrg.hpp"
#include "sepmps/partition.hpp"

namespace sepmps {

// One partition entry of an experiment: unconstrained, a p-step
// bipartition, or an explicit parts list. Labels are the stable CSV keys:
// "none", "p1", "p2", ..., "parts:1,2|3,4".
struct PartitionChoice {
  enum class Kind { None, PStep, Explicit };
  Kind kind = Kind::None;
  std::size_t p = 0;
  std::optional<PartitionSpec> spec;  // set for PStep and Explicit
  std::string label = "none";
};

struct ScanSpec {
  std::string param;  // "delta" or "alpha"
  double start = 0.0;
  double stop = 0.0;
  std::size_t steps = 1;  // number of grid points
};

struct ExperimentConfig {
  std::string model;  // "dim_heisenberg" or "blbq"
  std::size_t n = 0;
  ScanSpec scan;
  std::vector<PartitionChoice> partitions;
  SolverConfig solver;
  std::string output_path;
  std::size_t threads = 1;
};

// Line-oriented "key = value" grammar with [section] headers; sections
// model, scan, partitions, solver, output. Unknown keys are rejected with
// their line number.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config_file(const std::string& path);

// Canonical form: sections in fixed order, one key per line. Parsing the
// output reproduces the config.
std::string serialize_config(const ExperimentConfig& config);

struct EnergyRecord {
  std::string model;
  std::size_t n = 0;
  std::string param_name;
  double param_value = 0.0;
  std::string partition_label;
  std::size_t bond_dim = 0;
  double energy = 0.0;
  std::size_t sweeps = 0;
  bool converged = false;
  std::size_t restart_index = 0;
  std::uint64_t seed = 0;
  double wall_seconds = 0.0;
};

inline constexpr const char* kCsvHeader =
    "model,n,param_name,param_value,partition,D,energy,sweeps,converged,"
    "restart_index,seed,wall_seconds";

// Grid value k of the scan (k = 0..steps-1).
double scan_value(const ScanSpec& scan, std::size_t k);

// Seed for one grid point, derived from the solver base seed and the
// (point, partition) indices; reproducible regardless of threading.
std::uint64_t point_seed(const SolverConfig& solver, std::size_t point_index,
                         std::size_t partition_index);

// One record per (scan point x partition), computed with `threads` workers
// and returned sorted by (param_value, partition label). Identical configs
// give identical records no matter the thread count.
std::vector<EnergyRecord> run_experiment(const ExperimentConfig& config);

void write_csv(const std::vector<EnergyRecord>& records, std::ostream& out);

struct OracleRow {
  double param_value = 0.0;
  std::string partition_label;
  double dmrg_energy = 0.0;
  double oracle_energy = 0.0;
  double abs_diff = 0.0;
  bool converged = false;
};

struct OracleReport {
  std::vector<OracleRow> rows;
  double max_abs_diff = 0.0;
  bool all_converged = true;
};

// Re-run the config grid and compare each point against the matching
// exact oracle: dense diagonalization for unconstrained points, the
// alternating block optimizer for bipartitions.
OracleReport oracle_compare(const ExperimentConfig& config,
                            std::size_t oracle_multistarts = 20);

// Built-in fast invariant suite; prints one line per check and returns a
// process exit code (0 pass, 2 non-convergence, 3 mismatch).
int run_verify(std::ostream& out);

}  // namespace sepmps
