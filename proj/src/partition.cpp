#include "sepmps/partition.hpp"

#include <algorithm>
#include <sstream>

namespace sepmps {

void PartitionSpec::validate() const {
  if (n == 0) throw ShapeError("partition: n must be >= 1");
  std::vector<bool> seen(n + 1, false);
  std::size_t covered = 0;
  for (const auto& part : parts) {
    if (part.empty()) throw ShapeError("partition: empty part");
    for (std::size_t i = 0; i < part.size(); ++i) {
      std::size_t site = part[i];
      if (site < 1 || site > n) {
        throw ShapeError("partition: site " + std::to_string(site) +
                         " outside 1.." + std::to_string(n));
      }
      if (seen[site]) {
        throw ShapeError("partition: site " + std::to_string(site) +
                         " listed twice");
      }
      if (i > 0 && part[i - 1] >= site) {
        throw ShapeError("partition: sites within a part must be ascending");
      }
      seen[site] = true;
      ++covered;
    }
  }
  if (covered != n) {
    throw ShapeError("partition: parts cover " + std::to_string(covered) +
                     " of " + std::to_string(n) + " sites");
  }
}

PartitionSpec p_step_partition(std::size_t n, std::size_t p) {
  if (p < 1) throw ShapeError("p_step_partition: p must be >= 1");
  if (n == 0 || n % p != 0 || (n / p) % 2 != 0) {
    throw ShapeError("p_step_partition: n = " + std::to_string(n) +
                     " is not an even multiple of p = " + std::to_string(p));
  }
  PartitionSpec spec;
  spec.n = n;
  spec.parts.assign(2, {});
  const std::size_t blocks = n / p;
  for (std::size_t block = 0; block < blocks; ++block) {
    auto& part = spec.parts[block % 2];
    for (std::size_t k = 0; k < p; ++k) {
      part.push_back(block * p + k + 1);
    }
  }
  return spec;
}

PartitionSpec trivial_partition(std::size_t n) {
  PartitionSpec spec;
  spec.n = n;
  spec.parts.emplace_back();
  for (std::size_t site = 1; site <= n; ++site) spec.parts[0].push_back(site);
  return spec;
}

std::vector<std::size_t> site_ordering(const PartitionSpec& spec) {
  spec.validate();
  std::vector<std::size_t> ordering;
  ordering.reserve(spec.n);
  for (const auto& part : spec.parts) {
    ordering.insert(ordering.end(), part.begin(), part.end());
  }
  return ordering;
}

BondProfile bond_profile(const PartitionSpec& spec, std::size_t max_dim) {
  spec.validate();
  if (max_dim < 1) throw ShapeError("bond_profile: D must be >= 1");
  // part id per MPS position
  std::vector<std::size_t> part_at;
  part_at.reserve(spec.n);
  for (std::size_t p = 0; p < spec.parts.size(); ++p) {
    part_at.insert(part_at.end(), spec.parts[p].size(), p);
  }
  BondProfile profile;
  profile.dims.assign(spec.n + 1, 1);
  for (std::size_t bond = 1; bond < spec.n; ++bond) {
    profile.dims[bond] = (part_at[bond - 1] == part_at[bond]) ? max_dim : 1;
  }
  return profile;
}

BondProfile uniform_profile(std::size_t n, std::size_t max_dim) {
  if (n == 0) throw ShapeError("uniform_profile: n must be >= 1");
  if (max_dim < 1) throw ShapeError("uniform_profile: D must be >= 1");
  BondProfile profile;
  profile.dims.assign(n + 1, max_dim);
  profile.dims.front() = 1;
  profile.dims.back() = 1;
  return profile;
}

Hamiltonian permute_hamiltonian(const Hamiltonian& h,
                                const std::vector<std::size_t>& ordering) {
  if (ordering.size() != h.n) {
    throw ShapeError("permute_hamiltonian: ordering length " +
                     std::to_string(ordering.size()) + " vs n = " +
                     std::to_string(h.n));
  }
  // invert: physical site -> MPS position
  std::vector<std::size_t> position(h.n + 1, 0);
  for (std::size_t pos = 0; pos < ordering.size(); ++pos) {
    std::size_t site = ordering[pos];
    if (site < 1 || site > h.n || position[site] != 0) {
      throw ShapeError("permute_hamiltonian: ordering is not a bijection");
    }
    position[site] = pos + 1;
  }

  Hamiltonian out{h.n, h.d, {}, h.label};
  out.terms.reserve(h.terms.size());
  for (const auto& term : h.terms) {
    std::size_t a = position[term.site_a];
    std::size_t b = position[term.site_b];
    TwoSiteTerm mapped{a, b, term.summands};
    if (a > b) {
      mapped.site_a = b;
      mapped.site_b = a;
      for (auto& summand : mapped.summands) {
        std::swap(summand.op_a, summand.op_b);
      }
    }
    out.terms.push_back(std::move(mapped));
  }
  return out;
}

PartitionSpec parse_partition(const std::string& text, std::size_t n) {
  if (text.rfind("p=", 0) == 0) {
    std::size_t p = 0;
    std::size_t pos = 0;
    try {
      p = std::stoul(text.substr(2), &pos);
    } catch (const std::exception&) {
      throw ShapeError("parse_partition: bad p value in '" + text + "'");
    }
    if (pos + 2 != text.size()) {
      throw ShapeError("parse_partition: trailing characters in '" + text + "'");
    }
    return p_step_partition(n, p);
  }
  if (text.rfind("parts=", 0) == 0) {
    PartitionSpec spec;
    spec.n = n;
    std::stringstream parts_stream(text.substr(6));
    std::string part_text;
    while (std::getline(parts_stream, part_text, '|')) {
      std::vector<std::size_t> part;
      std::stringstream site_stream(part_text);
      std::string site_text;
      while (std::getline(site_stream, site_text, ',')) {
        try {
          std::size_t parsed_len = 0;
          std::size_t site = std::stoul(site_text, &parsed_len);
          if (parsed_len != site_text.size()) throw std::invalid_argument("");
          part.push_back(site);
        } catch (const std::exception&) {
          throw ShapeError("parse_partition: bad site '" + site_text +
                           "' in '" + text + "'");
        }
      }
      spec.parts.push_back(std::move(part));
    }
    spec.validate();
    return spec;
  }
  throw ShapeError("parse_partition: expected 'p=<int>' or 'parts=...', got '" +
                   text + "'");
}

}  // namespace sepmps
