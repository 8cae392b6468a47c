#pragma once

#include <optional>
#include <string>
#include <vector>

#include "anonpsi/data_model.hpp"

namespace anonpsi {

struct TraceEntry {
  std::vector<ElementId> query;
  int cardinality = 0;
  std::optional<long long> sum;
  std::optional<int> surviving_combos;  // TreeSumExplorer only
  std::string note;                     // fallbacks, degradations
};

struct AttackResult {
  std::string algo;
  std::uint64_t seed = 0;
  int tau = 0;
  int queries_used = 0;
  std::vector<ElementId> z_pos;
  std::vector<ElementId> z_neg;
  std::vector<TraceEntry> trace;

  std::size_t leakage() const { return z_pos.size() + z_neg.size(); }
  std::string to_json() const;
};

}  // namespace anonpsi
