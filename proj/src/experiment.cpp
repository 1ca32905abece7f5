#include "sepmps/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>
#include <thread>

#include "sepmps/ed.hpp"
#include "sepmps/rng.hpp"

namespace sepmps {

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

double parse_double(const std::string& value, std::size_t line) {
  try {
    std::size_t used = 0;
    double v = std::stod(value, &used);
    if (used != value.size()) throw std::invalid_argument("");
    if (!std::isfinite(v)) {
      throw ConfigError(line, "value '" + value + "' is not finite");
    }
    return v;
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception&) {
    throw ConfigError(line, "malformed number '" + value + "'");
  }
}

std::uint64_t parse_uint(const std::string& value, std::size_t line) {
  try {
    std::size_t used = 0;
    unsigned long long v = std::stoull(value, &used);
    if (used != value.size()) throw std::invalid_argument("");
    return v;
  } catch (const std::exception&) {
    throw ConfigError(line, "malformed integer '" + value + "'");
  }
}

std::string format_double(const char* fmt, double v) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), fmt, v);
  return buffer;
}

std::string csv_field(const std::string& s) {
  if (s.find(',') == std::string::npos) return s;
  return "\"" + s + "\"";
}

PartitionChoice make_partition_choice(const std::string& value, std::size_t n,
                                      std::size_t line) {
  PartitionChoice choice;
  if (value == "none") {
    choice.kind = PartitionChoice::Kind::None;
    choice.label = "none";
    return choice;
  }
  try {
    if (value.rfind("p=", 0) == 0) {
      choice.kind = PartitionChoice::Kind::PStep;
      choice.spec = parse_partition(value, n);
      choice.p = std::stoul(value.substr(2));
      choice.label = "p" + std::to_string(choice.p);
    } else if (value.rfind("parts=", 0) == 0) {
      choice.kind = PartitionChoice::Kind::Explicit;
      choice.spec = parse_partition(value, n);
      choice.label = "parts:" + value.substr(6);
    } else {
      throw ShapeError("expected 'none', 'p=<int>' or 'parts=...'");
    }
  } catch (const ShapeError& e) {
    throw ConfigError(line, std::string(e.what()));
  }
  return choice;
}

struct RawPartitionEntry {
  std::string value;
  std::size_t line;
};

}  // namespace

double scan_value(const ScanSpec& scan, std::size_t k) {
  if (scan.steps <= 1) return scan.start;
  return scan.start +
         (scan.stop - scan.start) *
             (static_cast<double>(k) / static_cast<double>(scan.steps - 1));
}

std::uint64_t point_seed(const SolverConfig& solver, std::size_t point_index,
                         std::size_t partition_index) {
  return mix_seed(solver.base_seed,
                  splitmix64(point_index) ^
                      (partition_index * 0x9e3779b97f4a7c15ULL));
}

ExperimentConfig parse_config(const std::string& text) {
  ExperimentConfig config;
  bool have_model_name = false, have_n = false;
  bool have_param = false, have_start = false, have_stop = false,
       have_steps = false;
  std::vector<RawPartitionEntry> raw_partitions;

  std::istringstream stream(text);
  std::string raw_line;
  std::string section;
  std::size_t line_no = 0;

  while (std::getline(stream, raw_line)) {
    ++line_no;
    std::string line = trim(raw_line);
    if (line.empty() || line[0] == '#') continue;
    if (line.front() == '[') {
      if (line.back() != ']') {
        throw ConfigError(line_no, "unterminated section header");
      }
      section = trim(line.substr(1, line.size() - 2));
      if (section != "model" && section != "scan" && section != "partitions" &&
          section != "solver" && section != "output") {
        throw ConfigError(line_no, "unknown section [" + section + "]");
      }
      continue;
    }
    const auto equals = line.find('=');
    if (equals == std::string::npos) {
      throw ConfigError(line_no, "expected 'key = value', got '" + line + "'");
    }
    const std::string key = trim(line.substr(0, equals));
    const std::string value = trim(line.substr(equals + 1));
    if (key.empty()) throw ConfigError(line_no, "empty key");
    if (section.empty()) {
      throw ConfigError(line_no, "key '" + key + "' outside any section");
    }

    if (section == "model") {
      if (key == "name") {
        if (value != "dim_heisenberg" && value != "blbq") {
          throw ConfigError(line_no, "unknown model '" + value + "'");
        }
        config.model = value;
        have_model_name = true;
      } else if (key == "n") {
        config.n = parse_uint(value, line_no);
        have_n = true;
      } else {
        throw ConfigError(line_no, "unknown key '" + key + "' in [model]");
      }
    } else if (section == "scan") {
      if (key == "param") {
        if (value != "delta" && value != "alpha") {
          throw ConfigError(line_no, "unknown scan parameter '" + value + "'");
        }
        config.scan.param = value;
        have_param = true;
      } else if (key == "start") {
        config.scan.start = parse_double(value, line_no);
        have_start = true;
      } else if (key == "stop") {
        config.scan.stop = parse_double(value, line_no);
        have_stop = true;
      } else if (key == "steps") {
        config.scan.steps = parse_uint(value, line_no);
        if (config.scan.steps < 1) {
          throw ConfigError(line_no, "steps must be >= 1");
        }
        have_steps = true;
      } else {
        throw ConfigError(line_no, "unknown key '" + key + "' in [scan]");
      }
    } else if (section == "partitions") {
      if (key == "partition") {
        raw_partitions.push_back({value, line_no});
      } else {
        throw ConfigError(line_no, "unknown key '" + key + "' in [partitions]");
      }
    } else if (section == "solver") {
      if (key == "D") {
        config.solver.bond_dim = parse_uint(value, line_no);
      } else if (key == "max_sweeps") {
        config.solver.max_sweeps = parse_uint(value, line_no);
      } else if (key == "rel_tol") {
        config.solver.rel_tol = parse_double(value, line_no);
      } else if (key == "restarts") {
        config.solver.restarts = parse_uint(value, line_no);
      } else if (key == "base_seed") {
        config.solver.base_seed = parse_uint(value, line_no);
      } else if (key == "dense_threshold") {
        config.solver.dense_threshold = parse_uint(value, line_no);
      } else if (key == "max_krylov_iters") {
        config.solver.max_krylov_iters = parse_uint(value, line_no);
      } else if (key == "threads") {
        config.threads = parse_uint(value, line_no);
        if (config.threads < 1) throw ConfigError(line_no, "threads must be >= 1");
      } else {
        throw ConfigError(line_no, "unknown key '" + key + "' in [solver]");
      }
    } else if (section == "output") {
      if (key == "path") {
        config.output_path = value;
      } else {
        throw ConfigError(line_no, "unknown key '" + key + "' in [output]");
      }
    }
  }

  if (!have_model_name) throw ConfigError(line_no, "missing model.name");
  if (!have_n) throw ConfigError(line_no, "missing model.n");
  if (config.n < 2) throw ConfigError(line_no, "model.n must be >= 2");
  if (!have_param || !have_start || !have_stop || !have_steps) {
    throw ConfigError(line_no, "incomplete [scan] section");
  }
  const bool heisenberg = config.model == "dim_heisenberg";
  if (heisenberg && config.scan.param != "delta") {
    throw ConfigError(line_no, "dim_heisenberg scans 'delta'");
  }
  if (!heisenberg && config.scan.param != "alpha") {
    throw ConfigError(line_no, "blbq scans 'alpha'");
  }
  try {
    config.solver.validate();
  } catch (const ShapeError& e) {
    throw ConfigError(line_no, e.what());
  }

  for (const auto& entry : raw_partitions) {
    config.partitions.push_back(
        make_partition_choice(entry.value, config.n, entry.line));
  }
  return config;
}

ExperimentConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(0, "cannot open config file '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str());
}

std::string serialize_config(const ExperimentConfig& config) {
  std::ostringstream out;
  out << "[model]\n";
  out << "name = " << config.model << "\n";
  out << "n = " << config.n << "\n";
  out << "\n[scan]\n";
  out << "param = " << config.scan.param << "\n";
  out << "start = " << format_double("%.17g", config.scan.start) << "\n";
  out << "stop = " << format_double("%.17g", config.scan.stop) << "\n";
  out << "steps = " << config.scan.steps << "\n";
  out << "\n[partitions]\n";
  for (const auto& choice : config.partitions) {
    switch (choice.kind) {
      case PartitionChoice::Kind::None:
        out << "partition = none\n";
        break;
      case PartitionChoice::Kind::PStep:
        out << "partition = p=" << choice.p << "\n";
        break;
      case PartitionChoice::Kind::Explicit: {
        out << "partition = parts=";
        const auto& parts = choice.spec->parts;
        for (std::size_t p = 0; p < parts.size(); ++p) {
          if (p) out << "|";
          for (std::size_t i = 0; i < parts[p].size(); ++i) {
            if (i) out << ",";
            out << parts[p][i];
          }
        }
        out << "\n";
        break;
      }
    }
  }
  out << "\n[solver]\n";
  out << "D = " << config.solver.bond_dim << "\n";
  out << "max_sweeps = " << config.solver.max_sweeps << "\n";
  out << "rel_tol = " << format_double("%.17g", config.solver.rel_tol) << "\n";
  out << "restarts = " << config.solver.restarts << "\n";
  out << "base_seed = " << config.solver.base_seed << "\n";
  out << "dense_threshold = " << config.solver.dense_threshold << "\n";
  out << "max_krylov_iters = " << config.solver.max_krylov_iters << "\n";
  out << "threads = " << config.threads << "\n";
  out << "\n[output]\n";
  if (!config.output_path.empty()) {
    out << "path = " << config.output_path << "\n";
  }
  return out.str();
}

namespace {

Hamiltonian build_model(const ExperimentConfig& config, double value) {
  if (config.model == "dim_heisenberg") {
    return build_dimerised_heisenberg(config.n, value);
  }
  return build_blbq(config.n, value);
}

EnergyRecord run_point(const ExperimentConfig& config, std::size_t point_index,
                       std::size_t partition_index) {
  const auto start_time = std::chrono::steady_clock::now();
  const double value = scan_value(config.scan, point_index);
  const auto& choice = config.partitions[partition_index];

  SolverConfig solver = config.solver;
  solver.base_seed = point_seed(config.solver, point_index, partition_index);

  const Hamiltonian h = build_model(config, value);
  MinimizeResult result =
      (choice.kind == PartitionChoice::Kind::None)
          ? minimize(h, uniform_profile(config.n, solver.bond_dim), solver)
          : constrained_ground_energy(h, *choice.spec, solver);

  EnergyRecord record;
  record.model = config.model;
  record.n = config.n;
  record.param_name = config.scan.param;
  record.param_value = value;
  record.partition_label = choice.label;
  record.bond_dim = solver.bond_dim;
  record.energy = result.energy;
  record.sweeps = result.report.sweeps_used;
  record.converged = result.converged;
  record.restart_index = result.best_restart;
  record.seed = solver.base_seed;
  record.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                    start_time)
          .count();
  return record;
}

}  // namespace

std::vector<EnergyRecord> run_experiment(const ExperimentConfig& config) {
  const std::size_t points = config.scan.steps;
  const std::size_t parts = config.partitions.size();
  const std::size_t jobs = points * parts;
  std::vector<EnergyRecord> records(jobs);

  auto run_job = [&](std::size_t job) {
    records[job] = run_point(config, job / parts, job % parts);
  };

  if (config.threads <= 1 || jobs <= 1) {
    for (std::size_t job = 0; job < jobs; ++job) run_job(job);
  } else {
    std::atomic<std::size_t> next{0};
    const std::size_t workers = std::min(config.threads, jobs);
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        while (true) {
          const std::size_t job = next.fetch_add(1);
          if (job >= jobs) return;
          run_job(job);
        }
      });
    }
    for (auto& t : pool) t.join();
  }

  std::stable_sort(records.begin(), records.end(),
                   [](const EnergyRecord& a, const EnergyRecord& b) {
                     if (a.param_value != b.param_value) {
                       return a.param_value < b.param_value;
                     }
                     return a.partition_label < b.partition_label;
                   });
  return records;
}

void write_csv(const std::vector<EnergyRecord>& records, std::ostream& out) {
  out << kCsvHeader << "\n";
  for (const auto& r : records) {
    out << csv_field(r.model) << "," << r.n << "," << r.param_name << ","
        << format_double("%.10g", r.param_value) << ","
        << csv_field(r.partition_label) << "," << r.bond_dim << ","
        << format_double("%.12g", r.energy) << "," << r.sweeps << ","
        << (r.converged ? "true" : "false") << "," << r.restart_index << ","
        << r.seed << "," << format_double("%.3f", r.wall_seconds) << "\n";
  }
}

OracleReport oracle_compare(const ExperimentConfig& config,
                            std::size_t oracle_multistarts) {
  OracleReport report;
  for (std::size_t point = 0; point < config.scan.steps; ++point) {
    const double value = scan_value(config.scan, point);
    const Hamiltonian h = build_model(config, value);
    for (std::size_t q = 0; q < config.partitions.size(); ++q) {
      const auto& choice = config.partitions[q];
      EnergyRecord record = run_point(config, point, q);

      double oracle_energy = 0.0;
      bool oracle_converged = true;
      if (choice.kind == PartitionChoice::Kind::None) {
        const double dim = std::pow(static_cast<double>(h.d),
                                    static_cast<double>(h.n));
        if (dim <= static_cast<double>(kDenseDimensionCap)) {
          oracle_energy = dense_ground_energy(h);
        } else if (dim <= 2.0e6) {
          oracle_energy = krylov_ground_energy(h);
        } else {
          throw ShapeError("oracle_compare: Hilbert dimension too large");
        }
      } else {
        BlockOracleResult block = alternating_block_oracle(
            h, *choice.spec, oracle_multistarts,
            mix_seed(record.seed, 0xACEDULL));
        oracle_energy = block.energy;
        oracle_converged = block.converged;
      }

      OracleRow row;
      row.param_value = value;
      row.partition_label = choice.label;
      row.dmrg_energy = record.energy;
      row.oracle_energy = oracle_energy;
      row.abs_diff = std::abs(record.energy - oracle_energy);
      row.converged = record.converged && oracle_converged;
      report.max_abs_diff = std::max(report.max_abs_diff, row.abs_diff);
      report.all_converged = report.all_converged && row.converged;
      report.rows.push_back(std::move(row));
    }
  }
  return report;
}

}  // namespace sepmps
