#include "anonpsi/analysis.hpp"
#include "doctest.h"

using namespace anonpsi;

namespace {

SyntheticInstance toy_instance() {
  // 6 elements, positives e0..e2
  SyntheticInstance inst;
  for (int i = 0; i < 6; ++i)
    inst.attacker.elements.push_back("e" + std::to_string(i));
  for (int i = 0; i < 3; ++i) {
    inst.truth.positives.insert("e" + std::to_string(i));
    inst.truth.negatives.insert("e" + std::to_string(i + 3));
  }
  return inst;
}

}  // namespace

TEST_CASE("metrics on a hand-built confusion matrix") {
  auto inst = toy_instance();
  AttackResult r;
  r.z_pos = {"e0", "e1", "e3"};  // two right, one wrong
  r.z_neg = {"e4", "e2"};        // one right, one wrong
  auto m = evaluate(r, inst.truth, inst.attacker);
  CHECK(m.total_leakage_pct == doctest::Approx(3.0 / 6.0));
  CHECK(*m.pos_leakage_pct == doctest::Approx(2.0 / 3.0));
  CHECK(*m.neg_leakage_pct == doctest::Approx(1.0 / 3.0));
  CHECK(*m.type1 == doctest::Approx(1.0 / 2.0));  // e2 among 2 labeled negative
  CHECK(*m.type2 == doctest::Approx(1.0 / 3.0));  // e3 among 3 labeled positive
  CHECK(*m.misclass == doctest::Approx(2.0 / 5.0));
  CHECK(*m.tp_rate == doctest::Approx(2.0 / 3.0));
  CHECK(*m.fp_rate == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("zero denominators yield absent metrics") {
  auto inst = toy_instance();
  AttackResult empty;
  auto m = evaluate(empty, inst.truth, inst.attacker);
  CHECK(m.total_leakage_pct == 0.0);
  CHECK_FALSE(m.type1.has_value());
  CHECK_FALSE(m.type2.has_value());
  CHECK_FALSE(m.misclass.has_value());
  CHECK(m.to_json().find("null") != std::string::npos);

  SyntheticInstance all_pos;
  all_pos.attacker.elements = {"a", "b"};
  all_pos.truth.positives = {"a", "b"};
  AttackResult r;
  r.z_pos = {"a"};
  auto m2 = evaluate(r, all_pos.truth, all_pos.attacker);
  CHECK_FALSE(m2.neg_leakage_pct.has_value());
  CHECK_FALSE(m2.fp_rate.has_value());
  CHECK(*m2.type2 == doctest::Approx(0.0));
}

TEST_CASE("misclassification ceiling") {
  CHECK(misclass_bound(0.9, 0.1) == doctest::Approx(0.2));
  CHECK(misclass_bound(1.0, 0.0) == doctest::Approx(0.0));
}

TEST_CASE("worst-case split outcome") {
  auto t = MemoTables::build(10, 4);
  // even proportions: c*k/n integral, no choice to make
  CHECK(worst_case_cl({10, 5, 2}, 4, t) == 2);
  // fractional expectation: the result is one of the two integer neighbours
  // and always inside the hypergeometric support
  int cl = worst_case_cl({8, 3, 2}, 4, t);
  CHECK(cl >= 1);
  CHECK(cl <= 2);
  int cl2 = worst_case_cl({10, 9, 2}, 4, t);
  CHECK(cl2 >= 3);
  CHECK(cl2 <= 4);
  CHECK_THROWS_AS(worst_case_cl({10, 0, 2}, 4, t), ArgumentError);
  CHECK_THROWS_AS(worst_case_cl({10, 5, 2}, 0, t), ArgumentError);
  CHECK_THROWS_AS(worst_case_cl({10, 5, 2}, 10, t), ArgumentError);
}

TEST_CASE("worst-case curves are monotone and planner-guided dominates") {
  auto t = MemoTables::build(24, 12);
  auto dy = lower_bound(24, 9, 12, BoundStrategy::DyPath, t);
  auto even = lower_bound(24, 9, 12, BoundStrategy::EvenBaseline, t);
  REQUIRE(dy.points.size() == 12);
  REQUIRE(even.points.size() == 12);
  for (std::size_t i = 0; i < 12; ++i) {
    CHECK(dy.points[i].second >= even.points[i].second - 1e-12);
    if (i > 0) {
      CHECK(dy.points[i].second >= dy.points[i - 1].second - 1e-12);
      CHECK(even.points[i].second >= even.points[i - 1].second - 1e-12);
    }
    CHECK(dy.points[i].second <= 24.0);
  }
  // a single query never resolves a mixed node
  CHECK(dy.points[0].second == 0.0);
}

TEST_CASE("lower_bound validates its inputs") {
  auto t = MemoTables::build(8, 4);
  CHECK_THROWS_AS(lower_bound(9, 3, 4, BoundStrategy::DyPath, t), OutOfRange);
  CHECK_THROWS_AS(lower_bound(8, 9, 4, BoundStrategy::DyPath, t),
                  ArgumentError);
  CHECK_THROWS_AS(lower_bound(8, 3, 0, BoundStrategy::DyPath, t),
                  ArgumentError);
}

TEST_CASE("ROC sweep and AUC") {
  auto inst = toy_instance();
  // perfectly separating posterior
  std::vector<double> perfect{0.9, 0.8, 0.95, 0.1, 0.2, 0.05};
  auto curve = roc_sweep(perfect, inst.attacker, inst.truth,
                         {0.0, 0.25, 0.5, 0.75, 1.0});
  REQUIRE(curve.size() == 5);
  CHECK(*curve[0].tpr == doctest::Approx(1.0));
  CHECK(*curve[0].fpr == doctest::Approx(1.0));
  CHECK(*curve[2].tpr == doctest::Approx(1.0));
  CHECK(*curve[2].fpr == doctest::Approx(0.0));
  CHECK(roc_auc(curve) == doctest::Approx(1.0));

  // uninformative posterior sits on the diagonal
  std::vector<double> flat(6, 0.5);
  auto flat_curve = roc_sweep(flat, inst.attacker, inst.truth,
                              {0.0, 0.25, 0.5, 0.75, 1.0});
  CHECK(roc_auc(flat_curve) == doctest::Approx(0.5));

  SUBCASE("grid validation") {
    CHECK_THROWS_AS(roc_sweep(perfect, inst.attacker, inst.truth, {0.5, 0.5}),
                    ArgumentError);
    CHECK_THROWS_AS(roc_sweep(perfect, inst.attacker, inst.truth, {-0.1, 0.5}),
                    ArgumentError);
    std::vector<double> short_posterior{0.5};
    CHECK_THROWS_AS(
        roc_sweep(short_posterior, inst.attacker, inst.truth, {0.5}),
        ArgumentError);
  }
}
