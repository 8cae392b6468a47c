#pragma once

#include <random>

#include "anonpsi/attack_result.hpp"
#include "anonpsi/oracle.hpp"

namespace anonpsi {

struct StatParams {
  double theta_u = 0.9;  // classify positive at p >= theta_u
  double theta_l = 0.1;  // classify negative at p <= theta_l
  double tol = 0.1;      // candidate-set tolerance band
  double rate = 0.5;     // per-element Bernoulli sampling rate r
  int tau = 20;
  std::uint64_t seed = 0;

  void validate() const;
};

/// Per-element membership beliefs, aligned with Dataset order; start at 0.5.
struct PosteriorVector {
  std::vector<double> p;
};

struct ObservationLedger {
  struct Fact {
    std::vector<int> query;  // indices into X
    int observed = 0;
  };
  std::vector<Fact> facts;
  // most recent queried set known to contain the unresolved pool
  std::vector<int> containing;
  int containing_total = 0;
  bool has_containing = false;
};

/// Ratio update from one observation: members of s_t get o_t/|s_t|; the
/// complement of the containing set gets (o_tot - o_t)/|complement|, clamped
/// to [0,1]. Frozen (classified) entries are left untouched by the caller's
/// masking.
void update_posteriors(PosteriorVector& posterior,
                       const ObservationLedger& ledger,
                       const std::vector<int>& s_t, int o_t,
                       const std::vector<bool>& frozen);

struct CandidateSelection {
  std::vector<int> s_u, s_l;
  double d_u = 0.0, d_l = 0.0;  // averaged Manhattan distances
};

/// Threshold-proximity candidate sets with Bernoulli(r) thinning; an
/// empty-after-sampling set is repaired with its argmin-distance element.
CandidateSelection select_candidates(const PosteriorVector& posterior,
                                     const StatParams& params,
                                     const std::vector<int>& pool,
                                     double tol_override,
                                     std::mt19937_64& rng);

struct ActBayesOutput {
  AttackResult result;
  PosteriorVector posterior;
};

/// Bayesian statistical attack; works against noiseless and DP-noisy
/// PSI-CA oracles. Labels are probabilistic, not guaranteed.
ActBayesOutput actbayes_attack(Oracle& oracle, const Dataset& x,
                               const StatParams& params);

/// Final posteriors as CSV rows `id,posterior,label` (label 1/0/blank for
/// pos/neg/unclassified).
std::string posterior_csv(const Dataset& x, const ActBayesOutput& out);

}  // namespace anonpsi
