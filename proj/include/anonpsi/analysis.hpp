#pragma once

#include <optional>

#include "anonpsi/attack_result.hpp"
#include "anonpsi/planner.hpp"

namespace anonpsi {

/// Classification quality of one attack run. Zero-denominator rates are
/// absent rather than 0 or NaN.
struct Metrics {
  double total_leakage_pct = 0.0;          // correctly labeled / |X|
  std::optional<double> pos_leakage_pct;   // |z_pos ∩ positives| / |positives|
  std::optional<double> neg_leakage_pct;   // |z_neg ∩ negatives| / |negatives|
  std::optional<double> type1;             // Pr(true positive | labeled negative)
  std::optional<double> type2;             // Pr(true negative | labeled positive)
  std::optional<double> misclass;          // wrong labels / all labels
  std::optional<double> tp_rate;           // |z_pos ∩ positives| / |positives|
  std::optional<double> fp_rate;           // |z_pos ∩ negatives| / |negatives|

  std::string to_json() const;
};

Metrics evaluate(const AttackResult& result, const GroundTruth& truth,
                 const Dataset& x);

/// Prop-2 style misclassification ceiling for a threshold pair.
inline double misclass_bound(double theta_u, double theta_l) {
  return 1.0 - theta_u + theta_l;
}

enum class BoundStrategy { DyPath, EvenBaseline };

struct BoundCurve {
  std::vector<std::pair<int, double>> points;  // (tau, worst-case leakage)
};

/// Adversarial split outcome: the real-valued worst case is c*k/n; of its two
/// integer neighbours the one minimizing the attacker's continuation (scored
/// against the tables) is returned.
int worst_case_cl(const AttackState& state, int k, const MemoTables& tables);

/// Offline worst-case attack: the planner recursion re-evaluated with every
/// oracle draw replaced by the adversarial split count (both integer
/// neighbours of c*k/n expanded, leakage minimizer kept). DyPath takes K
/// from Theta; the even baseline always bisects.
BoundCurve lower_bound(int n, int c, int tau_max, BoundStrategy strategy,
                       const MemoTables& tables);

struct RocPoint {
  double threshold = 0.0;
  std::optional<double> fpr;
  std::optional<double> tpr;
};

/// Threshold sweep over final posteriors: label p >= threshold positive.
std::vector<RocPoint> roc_sweep(const std::vector<double>& posterior,
                                const Dataset& x, const GroundTruth& truth,
                                const std::vector<double>& grid);

/// Trapezoid AUC of an ROC sweep (points with absent rates are skipped).
double roc_auc(const std::vector<RocPoint>& curve);

}  // namespace anonpsi
