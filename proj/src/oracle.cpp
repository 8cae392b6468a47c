#include "anonpsi/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace anonpsi {

double OracleConfig::noise_scale() const {
  if (!epsilon) return 0.0;
  return sensitivity * static_cast<double>(budget) / *epsilon;
}

void OracleConfig::validate() const {
  if (budget < 0) throw ArgumentError("budget must be >= 0");
  if (sensitivity <= 0) throw ArgumentError("sensitivity must be > 0");
  if (epsilon) {
    if (*epsilon <= 0) throw ArgumentError("epsilon must be > 0");
    double lambda = noise_scale();
    if (!std::isfinite(lambda) || lambda <= 0)
      throw ArgumentError("noise scale must be finite and positive");
  }
}

double laplace_sample(std::mt19937_64& rng, double scale) {
  std::uniform_real_distribution<double> unit(std::nextafter(-1.0, 0.0),
                                              std::nextafter(1.0, 0.0));
  double u = unit(rng);
  // inverse CDF, symmetric around 0
  return u < 0 ? scale * std::log1p(u) : -scale * std::log1p(-u);
}

Oracle::Oracle(const Dataset& x, TargetSet target, OracleConfig config)
    : domain_(x.id_set()),
      target_(std::move(target)),
      config_(config),
      noise_rng_(config.noise_seed) {
  config_.validate();
}

void Oracle::check_query(const std::vector<ElementId>& query) const {
  if (query.empty()) throw ArgumentError("query must be non-empty");
  if (remaining_budget() <= 0)
    throw BudgetExhausted("query budget exhausted");
  for (const auto& id : query)
    if (!domain_.count(id))
      throw ArgumentError("query element '" + id + "' not in registered X");
}

int Oracle::intersection_count(const std::vector<ElementId>& query) const {
  int c = 0;
  for (const auto& id : query) c += target_.members.count(id) ? 1 : 0;
  return c;
}

int Oracle::perturb(int true_count, int query_size) {
  double noisy = true_count + laplace_sample(noise_rng_, config_.noise_scale());
  long long rounded = std::llround(noisy);
  return static_cast<int>(
      std::clamp<long long>(rounded, 0, query_size));
}

OracleResponse Oracle::psi_ca(const std::vector<ElementId>& query) {
  check_query(query);
  int true_count = intersection_count(query);
  OracleResponse r;
  r.cardinality = config_.noisy()
                      ? perturb(true_count, static_cast<int>(query.size()))
                      : true_count;
  r.query_index = ++queries_issued_;
  log_.push_back({r.query_index, static_cast<int>(query.size()), r.cardinality,
                  std::nullopt});
  return r;
}

OracleResponse Oracle::psi_sum(const std::vector<ElementId>& query) {
  if (config_.protocol != Protocol::SUM)
    throw ConfigError("oracle is not configured for PSI-SUM");
  if (config_.noisy())
    throw ConfigError("PSI-SUM is not supported under DP noise");
  check_query(query);
  int true_count = 0;
  long long sum = 0;
  for (const auto& id : query) {
    if (!target_.members.count(id)) continue;
    ++true_count;
    auto it = target_.payloads.find(id);
    if (it == target_.payloads.end())
      throw ConfigError("member '" + id + "' has no payload");
    sum += it->second;
  }
  OracleResponse r;
  r.cardinality = true_count;
  r.sum = sum;
  r.query_index = ++queries_issued_;
  log_.push_back({r.query_index, static_cast<int>(query.size()), r.cardinality,
                  r.sum});
  return r;
}

std::string Oracle::log_jsonl() const {
  std::ostringstream out;
  for (const auto& e : log_) {
    out << "{\"t\": " << e.t << ", \"size\": " << e.size
        << ", \"cardinality\": " << e.cardinality << ", \"sum\": ";
    if (e.sum)
      out << *e.sum;
    else
      out << "null";
    out << "}\n";
  }
  return out.str();
}

}  // namespace anonpsi
