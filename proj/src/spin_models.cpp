#include "sepmps/spin_models.hpp"

#include <cmath>

namespace sepmps {

namespace {

constexpr Complex kI{0.0, 1.0};

LocalOperator make_op(std::size_t d, std::vector<Complex> entries) {
  return LocalOperator{Tensor({d, d}, std::move(entries)), d};
}

// Matrix product of two local operators on the same site.
LocalOperator multiply(const LocalOperator& a, const LocalOperator& b) {
  return LocalOperator{contract(a.matrix, {1}, b.matrix, {0}), a.dim};
}

void check_chain_length(std::size_t n, const char* model) {
  if (n < 2) {
    throw ShapeError(std::string(model) + ": need at least 2 sites, got " +
                     std::to_string(n));
  }
}

}  // namespace

SpinTriple spin_matrices(Spin s) {
  if (s == Spin::Half) {
    return SpinTriple{
        make_op(2, {0.0, 0.5, 0.5, 0.0}),
        make_op(2, {0.0, -0.5 * kI, 0.5 * kI, 0.0}),
        make_op(2, {0.5, 0.0, 0.0, -0.5}),
    };
  }
  const double r = 1.0 / std::sqrt(2.0);
  return SpinTriple{
      make_op(3, {0.0, r, 0.0, r, 0.0, r, 0.0, r, 0.0}),
      make_op(3, {0.0, -r * kI, 0.0, r * kI, 0.0, -r * kI, 0.0, r * kI, 0.0}),
      make_op(3, {1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, -1.0}),
  };
}

Hamiltonian build_dimerised_heisenberg(std::size_t n, double delta) {
  check_chain_length(n, "build_dimerised_heisenberg");
  const SpinTriple s = spin_matrices(Spin::Half);
  Hamiltonian h{n, 2, {}, "dim_heisenberg"};
  h.terms.reserve(n - 1);
  for (std::size_t bond = 1; bond < n; ++bond) {
    const double sign = (bond % 2 == 0) ? 1.0 : -1.0;  // (-1)^bond
    const double coeff = 1.0 - sign * delta;
    TwoSiteTerm term{bond, bond + 1, {}};
    term.summands = {
        {coeff, s.sx, s.sx},
        {coeff, s.sy, s.sy},
        {coeff, s.sz, s.sz},
    };
    h.terms.push_back(std::move(term));
  }
  return h;
}

Hamiltonian build_blbq(std::size_t n, double alpha) {
  check_chain_length(n, "build_blbq");
  const SpinTriple t = spin_matrices(Spin::One);
  const LocalOperator generators[3] = {t.sx, t.sy, t.sz};

  Hamiltonian h{n, 3, {}, "blbq"};
  h.terms.reserve(n - 1);
  for (std::size_t bond = 1; bond < n; ++bond) {
    TwoSiteTerm term{bond, bond + 1, {}};
    for (const auto& g : generators) {
      term.summands.push_back({1.0, g, g});
    }
    // (S.S)^2 = sum_{a,b} (S_a S_b) (x) (S_a S_b)
    for (const auto& ga : generators) {
      for (const auto& gb : generators) {
        LocalOperator prod = multiply(ga, gb);
        term.summands.push_back({alpha, prod, prod});
      }
    }
    h.terms.push_back(std::move(term));
  }
  return h;
}

Tensor assemble_bond_matrix(const TwoSiteTerm& term) {
  if (term.summands.empty()) {
    throw ShapeError("assemble_bond_matrix: term has no summands");
  }
  const std::size_t d = term.summands.front().op_a.dim;
  Tensor out({d * d, d * d});
  for (const auto& summand : term.summands) {
    const Tensor& a = summand.op_a.matrix;
    const Tensor& b = summand.op_b.matrix;
    for (std::size_t i = 0; i < d; ++i) {
      for (std::size_t ip = 0; ip < d; ++ip) {
        const Complex av = summand.coefficient * a.at({i, ip});
        if (av == Complex{}) continue;
        for (std::size_t j = 0; j < d; ++j) {
          for (std::size_t jp = 0; jp < d; ++jp) {
            out.at({i * d + j, ip * d + jp}) += av * b.at({j, jp});
          }
        }
      }
    }
  }
  return out;
}

}  // namespace sepmps
