#include "anonpsi/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <unordered_map>

#include "json.hpp"

namespace anonpsi {

std::string Metrics::to_json() const {
  nlohmann::json j;
  j["total_leakage_pct"] = total_leakage_pct;
  auto put = [&](const char* key, const std::optional<double>& v) {
    if (v)
      j[key] = *v;
    else
      j[key] = nullptr;
  };
  put("pos_leakage_pct", pos_leakage_pct);
  put("neg_leakage_pct", neg_leakage_pct);
  put("type1", type1);
  put("type2", type2);
  put("misclass", misclass);
  put("tp_rate", tp_rate);
  put("fp_rate", fp_rate);
  return j.dump(2);
}

Metrics evaluate(const AttackResult& result, const GroundTruth& truth,
                 const Dataset& x) {
  std::size_t pos_right = 0, pos_wrong = 0;
  for (const auto& id : result.z_pos)
    (truth.positives.count(id) ? pos_right : pos_wrong) += 1;
  std::size_t neg_right = 0, neg_wrong = 0;
  for (const auto& id : result.z_neg)
    (truth.negatives.count(id) ? neg_right : neg_wrong) += 1;

  Metrics m;
  m.total_leakage_pct =
      static_cast<double>(pos_right + neg_right) / static_cast<double>(x.size());
  if (!truth.positives.empty()) {
    m.pos_leakage_pct =
        static_cast<double>(pos_right) / static_cast<double>(truth.positives.size());
    m.tp_rate = m.pos_leakage_pct;
  }
  if (!truth.negatives.empty()) {
    m.neg_leakage_pct =
        static_cast<double>(neg_right) / static_cast<double>(truth.negatives.size());
    m.fp_rate =
        static_cast<double>(pos_wrong) / static_cast<double>(truth.negatives.size());
  }
  std::size_t n_neg = neg_right + neg_wrong;
  std::size_t n_pos = pos_right + pos_wrong;
  if (n_neg > 0)
    m.type1 = static_cast<double>(neg_wrong) / static_cast<double>(n_neg);
  if (n_pos > 0)
    m.type2 = static_cast<double>(pos_wrong) / static_cast<double>(n_pos);
  if (n_pos + n_neg > 0)
    m.misclass = static_cast<double>(neg_wrong + pos_wrong) /
                 static_cast<double>(n_pos + n_neg);
  return m;
}

int worst_case_cl(const AttackState& state, int k, const MemoTables& tables) {
  if (k < 1 || k >= state.n)
    throw ArgumentError("worst_case_cl: k must lie in [1, n)");
  if (state.c <= 0 || state.c >= state.n)
    throw ArgumentError("worst_case_cl: state is already resolved");

  double exact = static_cast<double>(state.c) * k / state.n;
  int lo_support = std::max(0, k - (state.n - state.c));
  int hi_support = std::min(k, state.c);
  int lo = std::clamp(static_cast<int>(std::floor(exact)), lo_support, hi_support);
  int hi = std::clamp(static_cast<int>(std::ceil(exact)), lo_support, hi_support);
  if (lo == hi) return lo;

  // score both integerizations against the tables, keep the leakage minimizer
  int tau = std::clamp(state.tau, 1, tables.tau_max());
  auto score = [&](int cl) {
    if (!tables.covers(state.n, tau))
      return 0.0;  // off-table: no signal, fall through to the floor
    return std::max(tables.outcome_left(state.n, state.c, tau, k, cl),
                    tables.outcome_right(state.n, state.c, tau, k, cl));
  };
  return score(lo) <= score(hi) ? lo : hi;
}

namespace {

// The planner recursion with every oracle draw replaced by the adversarial
// C_L: both integer neighbours of c*k/n are expanded recursively and the
// leakage-minimizing one kept, while the attacker still takes the better of
// the two commit directions. The planner-guided variant re-optimizes the
// partition factor against the worst case (the expected-case Theta can be
// gamed by the adversarial split); the baseline is pinned to K = n/2, so
// dominance is structural. Memoised per (n, c, tau) — the partition factor
// is a function of the state, so the game tree is a DAG.
struct WorstCaseDp {
  const MemoTables& tables;
  BoundStrategy strategy;
  std::unordered_map<std::uint64_t, double> memo;

  static std::uint64_t key(int n, int c, int tau) {
    return (static_cast<std::uint64_t>(n) << 32) |
           (static_cast<std::uint64_t>(c) << 16) |
           static_cast<std::uint64_t>(tau);
  }

  double worst_for_k(int n, int c, int tau, int k) {
    double exact = static_cast<double>(c) * k / n;
    int lo_support = std::max(0, k - (n - c));
    int hi_support = std::min(k, c);
    int lo =
        std::clamp(static_cast<int>(std::floor(exact)), lo_support, hi_support);
    int hi =
        std::clamp(static_cast<int>(std::ceil(exact)), lo_support, hi_support);
    double worst = outcome(n, c, tau, k, lo);
    if (hi != lo) worst = std::min(worst, outcome(n, c, tau, k, hi));
    return worst;
  }

  double value(int n, int c, int tau) {
    if (c == 0 || c == n) return n;
    if (tau <= 0) return 0.0;
    auto it = memo.find(key(n, c, tau));
    if (it != memo.end()) return it->second;

    double v;
    if (strategy == BoundStrategy::EvenBaseline) {
      v = worst_for_k(n, c, tau, n / 2);
    } else {
      // k and n-k are interchangeable here, so the half range suffices
      v = 0.0;
      for (int k = 1; k <= (n + 1) / 2; ++k)
        v = std::max(v, worst_for_k(n, c, tau, k));
    }
    memo[key(n, c, tau)] = v;
    return v;
  }

  double outcome(int n, int c, int tau, int k, int cl) {
    int rest = tau - 1;
    int fl = tables.phi(k, cl);
    double left = (fl != kPhiUnresolvable && fl <= rest)
                      ? k + value(n - k, c - cl, rest - fl)
                      : value(k, cl, rest);
    int fr = tables.phi(n - k, c - cl);
    double right = (fr != kPhiUnresolvable && fr <= rest)
                       ? (n - k) + value(k, cl, rest - fr)
                       : value(n - k, c - cl, rest);
    return std::max(left, right);
  }
};

}  // namespace

BoundCurve lower_bound(int n, int c, int tau_max, BoundStrategy strategy,
                       const MemoTables& tables) {
  if (n < 1 || c < 0 || c > n) throw ArgumentError("lower_bound: bad (n, c)");
  if (tau_max < 1) throw ArgumentError("lower_bound: tau_max must be >= 1");
  if (!tables.covers(n, std::min(tau_max, tables.tau_max())) ||
      tables.n_max() < n)
    throw OutOfRange("lower_bound: tables do not cover n");

  WorstCaseDp dp{tables, strategy, {}};
  BoundCurve curve;
  for (int tau = 1; tau <= tau_max; ++tau) {
    // the root query itself costs one call and only reveals c
    double v = (c == 0 || c == n) ? n : dp.value(n, c, tau - 1);
    curve.points.emplace_back(tau, v);
  }
  return curve;
}

std::vector<RocPoint> roc_sweep(const std::vector<double>& posterior,
                                const Dataset& x, const GroundTruth& truth,
                                const std::vector<double>& grid) {
  if (posterior.size() != x.size())
    throw ArgumentError("roc_sweep: posterior length mismatch");
  for (std::size_t i = 0; i + 1 < grid.size(); ++i)
    if (grid[i] >= grid[i + 1])
      throw ArgumentError("roc_sweep: grid must be strictly increasing");
  for (double t : grid)
    if (t < 0.0 || t > 1.0)
      throw ArgumentError("roc_sweep: grid must lie within [0, 1]");

  std::vector<RocPoint> out;
  for (double t : grid) {
    std::size_t tp = 0, fp = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      if (posterior[i] < t) continue;
      if (truth.positives.count(x.elements[i]))
        ++tp;
      else
        ++fp;
    }
    RocPoint pt;
    pt.threshold = t;
    if (!truth.positives.empty())
      pt.tpr = static_cast<double>(tp) / truth.positives.size();
    if (!truth.negatives.empty())
      pt.fpr = static_cast<double>(fp) / truth.negatives.size();
    out.push_back(pt);
  }
  return out;
}

double roc_auc(const std::vector<RocPoint>& curve) {
  std::vector<std::pair<double, double>> pts{{0.0, 0.0}, {1.0, 1.0}};
  for (const auto& p : curve)
    if (p.fpr && p.tpr) pts.emplace_back(*p.fpr, *p.tpr);
  std::sort(pts.begin(), pts.end());
  double auc = 0.0;
  for (std::size_t i = 1; i < pts.size(); ++i)
    auc += (pts[i].first - pts[i - 1].first) *
           (pts[i].second + pts[i - 1].second) / 2.0;
  return auc;
}

}  // namespace anonpsi
