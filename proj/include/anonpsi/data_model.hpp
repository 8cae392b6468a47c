#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "anonpsi/common.hpp"

namespace anonpsi {

using ElementId = std::string;

/// Attacker-side set X. Element order is preserved from input; attacks that
/// shuffle do so on their own copies.
struct Dataset {
  std::vector<ElementId> elements;

  std::size_t size() const { return elements.size(); }
  bool contains(const ElementId& id) const;
  std::unordered_set<ElementId> id_set() const;
};

/// Victim-side set Y with integer payloads (PSI-SUM). Payloads are integers
/// by construction: subset-sum matching needs exact equality, so currency
/// values are pre-scaled.
struct TargetSet {
  std::unordered_set<ElementId> members;
  std::unordered_map<ElementId, long long> payloads;
};

/// Partition of X into X∩Y and X\Y. Owned by the oracle/evaluation layer;
/// never handed to attack engines.
struct GroundTruth {
  std::unordered_set<ElementId> positives;
  std::unordered_set<ElementId> negatives;
};

struct PayloadSpec {
  enum class Kind { None, Uniform, DistinctPowers };
  Kind kind = Kind::None;
  long long lo = 0;
  long long hi = 0;

  static PayloadSpec none() { return {Kind::None, 0, 0}; }
  static PayloadSpec uniform(long long lo, long long hi);
  static PayloadSpec distinct_powers() { return {Kind::DistinctPowers, 0, 0}; }
};

struct SyntheticInstance {
  Dataset attacker;
  TargetSet target;
  GroundTruth truth;
  // Attacker-side payload knowledge: a value for every element of X. The
  // target's payload map is the restriction of this to members of Y.
  std::unordered_map<ElementId, long long> attacker_payloads;
};

enum class DatasetRole { Attacker, Target };

Dataset load_attacker_csv(const std::string& path);
TargetSet load_target_csv(const std::string& path);
/// Payload column of a dataset CSV, keyed by id. Used for attacker-side
/// payload knowledge in PSI-SUM attacks.
std::unordered_map<ElementId, long long> load_payload_column(
    const std::string& path);
GroundTruth load_truth_csv(const std::string& path, const Dataset& x);

void save_attacker_csv(const Dataset& d, const std::string& path);
void save_target_csv(const TargetSet& t, const std::string& path,
                     const std::vector<ElementId>& order);
void save_truth_csv(const GroundTruth& truth, const Dataset& x,
                    const std::string& path);

/// Deterministic synthetic instance: n elements, exactly n_positive of them
/// in the target set. distinct_powers assigns payload 2^rank (shuffled), so
/// every subset sum is unique.
SyntheticInstance generate_synthetic(int n, int n_positive,
                                     const PayloadSpec& payloads,
                                     std::uint64_t seed);

}  // namespace anonpsi
