#pragma once

#include <optional>
#include <random>
#include <string>
#include <vector>

#include "anonpsi/data_model.hpp"

namespace anonpsi {

enum class Protocol { CA, SUM };

struct OracleConfig {
  int budget = 0;                    // tau: total permitted protocol calls
  std::optional<double> epsilon;     // total DP budget; absent = noiseless
  double sensitivity = 1.0;          // Delta f
  Protocol protocol = Protocol::CA;
  std::uint64_t noise_seed = 0;

  // lambda = Delta_f * tau / epsilon (basic composition over tau calls).
  double noise_scale() const;
  bool noisy() const { return epsilon.has_value(); }
  void validate() const;
};

struct OracleResponse {
  int cardinality = 0;               // clamped to [0, |query|] when noisy
  std::optional<long long> sum;      // PSI-SUM only
  int query_index = 0;               // t, 1-based
};

struct QueryLogEntry {
  int t = 0;
  int size = 0;
  int cardinality = 0;
  std::optional<long long> sum;
};

// One Laplace(0, scale) draw via inverse CDF.
double laplace_sample(std::mt19937_64& rng, double scale);

/// Simulated PSI endpoint. Stateful session: budget counter plus noise
/// stream. Single-threaded access per session; run independent sessions for
/// parallel trials.
class Oracle {
 public:
  Oracle(const Dataset& x, TargetSet target, OracleConfig config);

  OracleResponse psi_ca(const std::vector<ElementId>& query);
  OracleResponse psi_sum(const std::vector<ElementId>& query);

  int remaining_budget() const { return config_.budget - queries_issued_; }
  bool noisy() const { return config_.noisy(); }
  Protocol protocol() const { return config_.protocol; }
  const std::vector<QueryLogEntry>& log() const { return log_; }
  std::string log_jsonl() const;

 private:
  int intersection_count(const std::vector<ElementId>& query) const;
  void check_query(const std::vector<ElementId>& query) const;
  int perturb(int true_count, int query_size);

  std::unordered_set<ElementId> domain_;
  TargetSet target_;
  OracleConfig config_;
  std::mt19937_64 noise_rng_;
  int queries_issued_ = 0;
  std::vector<QueryLogEntry> log_;
};

}  // namespace anonpsi
