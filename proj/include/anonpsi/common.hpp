#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace anonpsi {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Bad caller-supplied value (counts, ranges, grids).
struct ArgumentError : Error {
  using Error::Error;
};

// Malformed input file.
struct ParseError : Error {
  using Error::Error;
};

// Session wired up inconsistently (missing payloads, noisy oracle fed to a
// deterministic attack, ...).
struct ConfigError : Error {
  using Error::Error;
};

// Query issued past the budget. Attacks catch this and finalize.
struct BudgetExhausted : Error {
  using Error::Error;
};

// Memo table lookup outside the built (n_max, tau_max) box.
struct OutOfRange : Error {
  using Error::Error;
};

// Corrupt or incompatible memo/result file.
struct FormatError : Error {
  using Error::Error;
};

// splitmix64; used to derive per-trial seeds from a master seed.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace anonpsi
