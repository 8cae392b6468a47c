#pragma once

#include <unordered_map>

#include "anonpsi/attack_result.hpp"
#include "anonpsi/oracle.hpp"

namespace anonpsi {

struct SumProblem {
  std::vector<long long> values;  // payloads of the pool, by position
  long long target_sum = 0;
  int target_count = 0;
};

struct CandidateSet {
  // position subsets of the pool, each of size target_count summing exactly
  // to target_sum; positions sorted ascending within a combo
  std::vector<std::vector<int>> combos;
  bool truncated = false;
};

/// All size-count position subsets with the exact sum. count = 2 runs a
/// sorted two-pointer scan; larger counts recurse on the reduced target.
/// Duplicate values yield distinct position combos. Enumeration stops at
/// combo_cap with the result flagged truncated.
CandidateSet nsum_solve(const SumProblem& problem, long long combo_cap);

struct TreeSumParams {
  int tau = 1;
  long long combo_cap = 1'000'000;
  int pool_size = 24;  // working pool bound; capped at |X|
  std::uint64_t seed = 0;
};

/// PSI-SUM attack: sum side-information collapses candidate combinations;
/// a node with a single surviving combo classifies wholesale. Nodes whose
/// candidate enumeration overflows degrade to cardinality-only splitting.
AttackResult treesum_explorer(
    Oracle& oracle, const Dataset& x,
    const std::unordered_map<ElementId, long long>& payloads,
    const TreeSumParams& params);

}  // namespace anonpsi
