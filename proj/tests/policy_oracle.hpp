#pragma once

// Independent reference for the planner tables: top-down exhaustive policy
// search, written against the recurrence directly rather than sharing any
// production code. Differences on purpose:
//   - hypergeometric pmf by multiplicative double products (no Pascal rows)
//   - full partition range k in [1, n-1] (the production build exploits the
//     k <-> n-k symmetry and stops at the midpoint)
//   - phi from its own min-max characterisation: a split guarantees full
//     resolution iff the worst-case realisation leaves both children
//     resolvable in the remaining budget
// Results are memoised in hash maps; the search itself is exhaustive.

#include <cstdint>
#include <unordered_map>

namespace policy_oracle {

inline double choose(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  if (k > n - k) k = n - k;
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

inline double pmf(int cl, int n, int c, int k) {
  if (cl < 0 || cl > k || cl > c || k - cl > n - c) return 0.0;
  return choose(c, cl) * choose(n - c, k - cl) / choose(n, k);
}

inline std::uint64_t key(int n, int c, int tau) {
  return (static_cast<std::uint64_t>(n) << 32) |
         (static_cast<std::uint64_t>(c) << 16) | static_cast<std::uint64_t>(tau);
}

// Minimal budget that resolves (n, c) no matter how splits fall out. Mixed
// states always admit a finite answer (singleton splits), so no sentinel.
inline int phi(int n, int c) {
  static std::unordered_map<std::uint64_t, int> memo;
  if (c == 0 || c == n) return 0;
  auto it = memo.find(key(n, c, 0));
  if (it != memo.end()) return it->second;
  int best = 1 << 20;
  for (int k = 1; k <= n - 1; ++k) {
    int worst = 0;
    for (int cl = std::max(0, k - (n - c)); cl <= std::min(k, c); ++cl)
      worst = std::max(worst, phi(k, cl) + phi(n - k, c - cl));
    best = std::min(best, 1 + worst);
  }
  memo[key(n, c, 0)] = best;
  return best;
}

inline double gamma(int n, int c, int tau) {
  static std::unordered_map<std::uint64_t, double> memo;
  if (c == 0 || c == n) return n;
  if (tau == 0) return 0.0;
  auto it = memo.find(key(n, c, tau));
  if (it != memo.end()) return it->second;

  double best = 0.0;
  for (int k = 1; k <= n - 1; ++k) {
    double el = 0.0, er = 0.0;
    int rest = tau - 1;
    for (int cl = std::max(0, k - (n - c)); cl <= std::min(k, c); ++cl) {
      double p = pmf(cl, n, c, k);
      int fl = phi(k, cl);
      el += p * (fl <= rest ? k + gamma(n - k, c - cl, rest - fl)
                            : gamma(k, cl, rest));
      int fr = phi(n - k, c - cl);
      er += p * (fr <= rest ? (n - k) + gamma(k, cl, rest - fr)
                            : gamma(n - k, c - cl, rest));
    }
    best = std::max(best, std::max(el, er));
  }
  memo[key(n, c, tau)] = best;
  return best;
}

}  // namespace policy_oracle
