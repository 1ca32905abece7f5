#include <cmath>
#include <ostream>

#include "sepmps/dmrg.hpp"
#include "sepmps/ed.hpp"
#include "sepmps/experiment.hpp"
#include "sepmps/mps.hpp"
#include "sepmps/rng.hpp"

namespace sepmps {

namespace {

struct VerifyState {
  int failures = 0;
  bool convergence_trouble = false;

  void check(std::ostream& out, const char* name, bool ok,
             const std::string& detail = "") {
    out << (ok ? "PASS" : "FAIL") << "  " << name;
    if (!detail.empty()) out << "  (" << detail << ")";
    out << "\n";
    if (!ok) ++failures;
  }
};

bool monotone(const std::vector<SweepReport>& reports, double slack = 1e-10) {
  for (const auto& report : reports) {
    const auto& e = report.energies_per_update;
    for (std::size_t i = 1; i < e.size(); ++i) {
      if (e[i] > e[i - 1] + slack) return false;
    }
  }
  return true;
}

std::string delta_str(double d) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "|delta| = %.3g", d);
  return buf;
}

}  // namespace

int run_verify(std::ostream& out) {
  VerifyState v;
  std::vector<SweepReport> collected;

  auto absorb = [&](const MinimizeResult& r) {
    collected.insert(collected.end(), r.all_reports.begin(),
                     r.all_reports.end());
    if (!r.converged) v.convergence_trouble = true;
    return r.energy;
  };

  // two-site singlet at D = 2
  {
    SolverConfig cfg;
    cfg.bond_dim = 2;
    cfg.restarts = 2;
    cfg.base_seed = 11;
    const Hamiltonian h = build_dimerised_heisenberg(2, 0.0);
    const double e = absorb(minimize(h, uniform_profile(2, 2), cfg));
    v.check(out, "two-site Heisenberg singlet energy -3/4",
            std::abs(e + 0.75) < 1e-9, delta_str(e + 0.75));
  }

  // decoupled dimers at delta = 1 under the p=2 partition
  {
    SolverConfig cfg;
    cfg.bond_dim = 4;
    cfg.restarts = 2;
    cfg.base_seed = 12;
    const Hamiltonian h = build_dimerised_heisenberg(4, 1.0);
    const MinimizeResult r =
        constrained_ground_energy(h, p_step_partition(4, 2), cfg);
    const double e = absorb(r);
    v.check(out, "n=4 delta=1 p=2 energy -3", std::abs(e + 3.0) < 1e-8,
            delta_str(e + 3.0));

    const auto factors = extract_factors(r.state);
    const double m =
        std::abs(overlap(r.state, tensor_product(factors)));
    v.check(out, "constrained state factorizes into 2 parts",
            factors.size() == 2 && std::abs(m - 1.0) < 1e-9);
  }

  // unconstrained DMRG against dense diagonalization
  {
    SolverConfig cfg;
    cfg.bond_dim = 16;
    cfg.restarts = 2;
    cfg.base_seed = 13;
    const Hamiltonian h = build_dimerised_heisenberg(8, 0.3);
    const double e = absorb(minimize(h, uniform_profile(8, 16), cfg));
    const double exact = dense_ground_energy(h);
    v.check(out, "n=8 unconstrained matches dense ED",
            std::abs(e - exact) < 1e-8, delta_str(e - exact));
  }

  // AKLT point of the BLBQ chain
  {
    const Hamiltonian h = build_blbq(4, 1.0 / 3.0);
    const double exact = dense_ground_energy(h);
    v.check(out, "BLBQ n=4 alpha=1/3 dense energy -2",
            std::abs(exact + 2.0) < 1e-9, delta_str(exact + 2.0));

    SolverConfig cfg;
    cfg.bond_dim = 9;
    cfg.restarts = 2;
    cfg.base_seed = 14;
    const double e = absorb(minimize(h, uniform_profile(4, 9), cfg));
    v.check(out, "BLBQ n=4 alpha=1/3 DMRG matches", std::abs(e + 2.0) < 1e-7,
            delta_str(e + 2.0));
  }

  // variational bound on random small instances
  {
    bool ok = true;
    double worst = 0.0;
    RandomStream rng(0xbead5);
    for (int k = 0; k < 10 && ok; ++k) {
      const std::size_t n = 4 + 2 * (k % 2);
      const double delta = rng.uniform(-1.0, 1.0);
      const Hamiltonian h = build_dimerised_heisenberg(n, delta);
      const std::size_t p = (k % 3 == 0) ? 1 : ((n % 4 == 0) ? 2 : 1);
      SolverConfig cfg;
      cfg.bond_dim = 4;
      cfg.restarts = 2;
      cfg.max_sweeps = 80;
      cfg.base_seed = 500 + k;
      const MinimizeResult r =
          constrained_ground_energy(h, p_step_partition(n, p), cfg);
      absorb(r);
      const double exact = dense_ground_energy(h);
      worst = std::min(worst, r.energy - exact);
      ok = r.energy >= exact - 1e-8;
    }
    v.check(out, "constrained energies bound dense ED from above", ok,
            delta_str(worst));
  }

  // cross-check against the alternating block oracle
  {
    const Hamiltonian h = build_dimerised_heisenberg(4, 0.0);
    const PartitionSpec spec = p_step_partition(4, 1);
    SolverConfig cfg;
    cfg.bond_dim = 4;
    cfg.restarts = 20;
    cfg.base_seed = 15;
    const MinimizeResult r = constrained_ground_energy(h, spec, cfg);
    absorb(r);
    const BlockOracleResult oracle =
        alternating_block_oracle(h, spec, 20, 0xf00d);
    v.check(out, "DMRG agrees with alternating block oracle",
            std::abs(r.energy - oracle.energy) < 1e-6,
            delta_str(r.energy - oracle.energy));
  }

  v.check(out, "per-update energies non-increasing", monotone(collected));

  if (v.failures == 0 && !v.convergence_trouble) {
    out << "verify: all checks passed\n";
    return 0;
  }
  if (v.failures == 0 && v.convergence_trouble) {
    out << "verify: checks passed but some solves did not converge\n";
    return 2;
  }
  out << "verify: " << v.failures << " check(s) failed\n";
  return 3;
}

}  // namespace sepmps
