#pragma once

#include <string>
#include <vector>

#include "anonpsi/common.hpp"

namespace anonpsi {

/// One node of the hierarchical attack: n unresolved elements known to
/// contain c positives, with tau protocol calls remaining.
struct AttackState {
  int n = 1;
  int c = 0;
  int tau = 0;
};

/// Exact hypergeometric pmf: probability that a uniformly drawn k-subset of
/// an n-set with c positives contains exactly c_left of them. Out-of-support
/// arguments return 0; out-of-range arguments throw.
double hypergeom_pmf(int c_left, int n, int c, int k);

constexpr int kPhiUnresolvable = -1;

/// Offline memo tables over all states with n <= n_max, tau <= tau_max.
///   gamma(n,c,tau)  best expected leakage from state (n,c,tau)
///   theta(n,c,tau)  leakage-maximizing partition factor K (smallest on ties)
///   phi(n,c)        minimal budget guaranteeing full resolution, or the
///                   kPhiUnresolvable sentinel if none <= tau_max
/// Values are immutable once built; safe to share across attack sessions.
class MemoTables {
 public:
  static MemoTables build(int n_max, int tau_max);
  static MemoTables load(const std::string& path);
  void save(const std::string& path) const;

  int n_max() const { return n_max_; }
  int tau_max() const { return tau_max_; }
  bool covers(int n, int tau) const {
    return n >= 1 && n <= n_max_ && tau >= 0 && tau <= tau_max_;
  }

  double gamma(int n, int c, int tau) const;
  int theta(int n, int c, int tau) const;
  int phi(int n, int c) const;

  // Expected leakage of committing to the left/right child under partition
  // factor k, before the split query is spent. Building blocks of gamma.
  double expected_left(int n, int c, int tau, int k) const;
  double expected_right(int n, int c, int tau, int k) const;

  // The same case split evaluated at one realized left count. The split
  // query costs 1; a child resolvable within the remainder credits its full
  // size plus the sibling continuation on the residual budget.
  double outcome_left(int n, int c, int tau, int k, int c_left) const;
  double outcome_right(int n, int c, int tau, int k, int c_left) const;

 private:
  MemoTables(int n_max, int tau_max);
  void check(int n, int c, int tau) const;
  std::size_t idx3(int n, int c, int tau) const {
    return (static_cast<std::size_t>(n) * (n_max_ + 1) + c) * (tau_max_ + 1) +
           tau;
  }
  std::size_t idx2(int n, int c) const {
    return static_cast<std::size_t>(n) * (n_max_ + 1) + c;
  }

  int n_max_;
  int tau_max_;
  std::vector<double> gamma_;
  std::vector<std::int32_t> theta_;
  std::vector<std::int32_t> phi_;
};

/// Theta lookup with the planner preconditions enforced: 0 < c < n, tau >= 1.
int optimal_k(const AttackState& state, const MemoTables& tables);

}  // namespace anonpsi
