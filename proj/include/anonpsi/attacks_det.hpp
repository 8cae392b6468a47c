#pragma once

#include <optional>

#include "anonpsi/attack_result.hpp"
#include "anonpsi/oracle.hpp"
#include "anonpsi/planner.hpp"

namespace anonpsi {

/// Hierarchical baseline: even halving, child counts deduced from the
/// parent, subtrees prioritized by positive-count/size ratio. Exact labels
/// only; refuses noisy oracles.
AttackResult guo_attack(Oracle& oracle, const Dataset& x, int tau,
                        std::uint64_t seed);

struct DyPathOptions {
  // Overrides the planner's Theta at every split (used for the fixed-K
  // comparison experiments).
  std::optional<int> forced_k;
};

/// Planner-driven attack: partition factor from Theta, branch choice by
/// comparing expected leakage of committing to either child, the other child
/// parked in a max-heap keyed by its expected leakage.
AttackResult dypathblazer(Oracle& oracle, const Dataset& x, int tau,
                          const MemoTables& tables, std::uint64_t seed,
                          const DyPathOptions& options = {});

}  // namespace anonpsi
