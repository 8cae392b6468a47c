#include <cmath>

#include "anonpsi/oracle.hpp"
#include "doctest.h"

using namespace anonpsi;

namespace {

Oracle make_oracle(const SyntheticInstance& inst, OracleConfig cfg) {
  return Oracle(inst.attacker, inst.target, cfg);
}

}  // namespace

TEST_CASE("exact cardinality counting") {
  auto inst = generate_synthetic(16, 6, PayloadSpec::none(), 1);
  auto oracle = make_oracle(inst, {.budget = 10});
  auto full = oracle.psi_ca(inst.attacker.elements);
  CHECK(full.cardinality == 6);
  CHECK(full.query_index == 1);

  std::vector<ElementId> negs(inst.truth.negatives.begin(),
                              inst.truth.negatives.end());
  CHECK(oracle.psi_ca(negs).cardinality == 0);
  std::vector<ElementId> poss(inst.truth.positives.begin(),
                              inst.truth.positives.end());
  CHECK(oracle.psi_ca(poss).cardinality == 6);
  CHECK(oracle.remaining_budget() == 7);
  CHECK(oracle.log().size() == 3);
}

TEST_CASE("budget runs out exactly at tau") {
  auto inst = generate_synthetic(8, 3, PayloadSpec::none(), 2);
  auto oracle = make_oracle(inst, {.budget = 2});
  oracle.psi_ca(inst.attacker.elements);
  oracle.psi_ca(inst.attacker.elements);
  CHECK(oracle.remaining_budget() == 0);
  CHECK_THROWS_AS(oracle.psi_ca(inst.attacker.elements), BudgetExhausted);
}

TEST_CASE("query validation") {
  auto inst = generate_synthetic(8, 3, PayloadSpec::none(), 3);
  auto oracle = make_oracle(inst, {.budget = 5});
  CHECK_THROWS_AS(oracle.psi_ca({}), ArgumentError);
  CHECK_THROWS_AS(oracle.psi_ca({"not_registered"}), ArgumentError);
  // failed validation does not burn budget
  CHECK(oracle.remaining_budget() == 5);
}

TEST_CASE("config validation") {
  OracleConfig cfg{.budget = -1};
  CHECK_THROWS_AS(cfg.validate(), ArgumentError);
  cfg = {.budget = 5, .epsilon = 0.0};
  CHECK_THROWS_AS(cfg.validate(), ArgumentError);
  cfg = {.budget = 5, .epsilon = 1.0, .sensitivity = 0.0};
  CHECK_THROWS_AS(cfg.validate(), ArgumentError);
  cfg = {.budget = 5, .epsilon = 1.0};
  CHECK_NOTHROW(cfg.validate());
  CHECK(cfg.noise_scale() == doctest::Approx(5.0));
}

TEST_CASE("psi_sum adds member payloads and refuses bad setups") {
  auto inst = generate_synthetic(10, 4, PayloadSpec::uniform(1, 20), 4);
  OracleConfig cfg{.budget = 10, .protocol = Protocol::SUM};
  auto oracle = make_oracle(inst, cfg);
  auto r = oracle.psi_sum(inst.attacker.elements);
  long long expected = 0;
  for (const auto& [id, v] : inst.target.payloads) expected += v;
  CHECK(r.cardinality == 4);
  CHECK(r.sum == expected);

  // cardinality queries still work on a SUM oracle
  CHECK(oracle.psi_ca(inst.attacker.elements).cardinality == 4);

  auto ca_oracle = make_oracle(inst, {.budget = 10});
  CHECK_THROWS_AS(ca_oracle.psi_sum(inst.attacker.elements), ConfigError);

  OracleConfig noisy{.budget = 10, .epsilon = 1.0, .protocol = Protocol::SUM};
  auto noisy_oracle = make_oracle(inst, noisy);
  CHECK_THROWS_AS(noisy_oracle.psi_sum(inst.attacker.elements), ConfigError);
}

TEST_CASE("psi_sum requires payloads for every member") {
  auto inst = generate_synthetic(10, 4, PayloadSpec::none(), 4);
  OracleConfig cfg{.budget = 10, .protocol = Protocol::SUM};
  auto oracle = make_oracle(inst, cfg);
  CHECK_THROWS_AS(oracle.psi_sum(inst.attacker.elements), ConfigError);
}

TEST_CASE("noisy responses stay in range and are seed-deterministic") {
  auto inst = generate_synthetic(12, 5, PayloadSpec::none(), 6);
  OracleConfig cfg{.budget = 200, .epsilon = 2.0, .noise_seed = 99};
  auto a = make_oracle(inst, cfg);
  auto b = make_oracle(inst, cfg);
  for (int i = 0; i < 200; ++i) {
    auto ra = a.psi_ca(inst.attacker.elements);
    auto rb = b.psi_ca(inst.attacker.elements);
    CHECK(ra.cardinality == rb.cardinality);
    CHECK(ra.cardinality >= 0);
    CHECK(ra.cardinality <= 12);
  }
}

TEST_CASE("laplace sample statistics match the requested scale") {
  std::mt19937_64 rng(123);
  const double scale = 4.0;
  const int n = 200000;
  double mean = 0.0, mean_abs = 0.0;
  for (int i = 0; i < n; ++i) {
    double v = laplace_sample(rng, scale);
    mean += v;
    mean_abs += std::abs(v);
  }
  mean /= n;
  mean_abs /= n;
  // E[x] = 0, E|x| = scale
  CHECK(std::abs(mean) < 0.1);
  CHECK(mean_abs == doctest::Approx(scale).epsilon(0.02));
}
