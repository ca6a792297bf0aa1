#pragma once

#include <cstdint>
#include <set>
#include <string>
#include <vector>

namespace exsp {

struct VerifyCheck {
  std::string module;
  std::string name;
  bool pass = false;
  std::string detail;
};

/// Module names accepted by run_verify's filter.
const std::vector<std::string>& verify_modules();

/// Quick oracle suite (seconds): cone kernels against grid oracles, SIMD
/// against scalar, overlap identity, power iteration against dense SVD,
/// solver cross-checks against ISTA and subgradient references, and the
/// margin tuning against the Gaussian formula. An empty `only` runs all.
/// Throws InvalidArgument for an unknown module name.
std::vector<VerifyCheck> run_verify(const std::set<std::string>& only, std::uint64_t seed);

}  // namespace exsp
