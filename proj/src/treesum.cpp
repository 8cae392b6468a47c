#include "anonpsi/treesum.hpp"

#include <algorithm>
#include <numeric>
#include <queue>
#include <random>

namespace anonpsi {

namespace {

// Enumerates into out; returns false once the cap is hit.
bool emit_combo(std::vector<std::vector<int>>& out, std::vector<int> combo,
                long long cap) {
  if (static_cast<long long>(out.size()) >= cap) return false;
  std::sort(combo.begin(), combo.end());
  out.push_back(std::move(combo));
  return true;
}

struct NSumCtx {
  const std::vector<int>& ord;       // positions sorted by value
  const std::vector<long long>& v;   // values in sorted order
  std::vector<long long> prefix;     // prefix sums over sorted values
  long long cap;
  std::vector<std::vector<int>> out;
  bool truncated = false;

  long long min_sum(int lo, int count) const {
    return prefix[lo + count] - prefix[lo];
  }
  long long max_sum(int count) const {
    int m = static_cast<int>(v.size());
    return prefix[m] - prefix[m - count];
  }

  bool two_sum(int lo, long long target, const std::vector<int>& chosen) {
    int i = lo, j = static_cast<int>(v.size()) - 1;
    while (i < j) {
      long long s = v[i] + v[j];
      if (s < target) {
        ++i;
      } else if (s > target) {
        --j;
      } else if (v[i] == v[j]) {
        // every pair inside [i, j] matches
        for (int a = i; a < j; ++a)
          for (int b = a + 1; b <= j; ++b) {
            auto combo = chosen;
            combo.push_back(ord[a]);
            combo.push_back(ord[b]);
            if (!emit_combo(out, std::move(combo), cap)) return false;
          }
        break;
      } else {
        int i2 = i, j2 = j;
        while (i2 < j && v[i2] == v[i]) ++i2;
        while (j2 > i && v[j2] == v[j]) --j2;
        for (int a = i; a < i2; ++a)
          for (int b = j2 + 1; b <= j; ++b) {
            auto combo = chosen;
            combo.push_back(ord[a]);
            combo.push_back(ord[b]);
            if (!emit_combo(out, std::move(combo), cap)) return false;
          }
        i = i2;
        j = j2;
      }
    }
    return true;
  }

  bool solve(int lo, int count, long long target, std::vector<int>& chosen) {
    int m = static_cast<int>(v.size());
    if (count == 0) {
      if (target == 0) return emit_combo(out, chosen, cap);
      return true;
    }
    if (m - lo < count) return true;
    if (target < min_sum(lo, count) || target > max_sum(count)) return true;
    if (count == 1) {
      for (int i = lo; i < m; ++i) {
        if (v[i] == target) {
          auto combo = chosen;
          combo.push_back(ord[i]);
          if (!emit_combo(out, std::move(combo), cap)) return false;
        }
        if (v[i] > target) break;
      }
      return true;
    }
    if (count == 2) return two_sum(lo, target, chosen);
    for (int f = lo; f <= m - count; ++f) {
      chosen.push_back(ord[f]);
      bool ok = solve(f + 1, count - 1, target - v[f], chosen);
      chosen.pop_back();
      if (!ok) return false;
    }
    return true;
  }
};

}  // namespace

CandidateSet nsum_solve(const SumProblem& problem, long long combo_cap) {
  if (combo_cap < 1) throw ArgumentError("combo_cap must be >= 1");
  int m = static_cast<int>(problem.values.size());
  if (problem.target_count < 0 || problem.target_count > m)
    throw ArgumentError("target_count must be in [0, |pool|]");

  std::vector<int> ord(m);
  std::iota(ord.begin(), ord.end(), 0);
  std::sort(ord.begin(), ord.end(), [&](int a, int b) {
    return problem.values[a] < problem.values[b];
  });
  std::vector<long long> sorted(m);
  for (int i = 0; i < m; ++i) sorted[i] = problem.values[ord[i]];

  NSumCtx ctx{ord, sorted, {}, combo_cap, {}, false};
  ctx.prefix.resize(m + 1, 0);
  for (int i = 0; i < m; ++i) ctx.prefix[i + 1] = ctx.prefix[i] + sorted[i];

  std::vector<int> chosen;
  ctx.truncated = !ctx.solve(0, problem.target_count, problem.target_sum, chosen);

  CandidateSet result;
  result.combos = std::move(ctx.out);
  result.truncated = ctx.truncated;
  std::sort(result.combos.begin(), result.combos.end());
  return result;
}

namespace {

struct TNode {
  std::vector<int> members;  // indices into X
  int count = 0;
  long long sum = 0;
  std::vector<std::vector<int>> combos;  // positions into members
  bool cardinality_mode = false;         // degraded: sums no longer trusted
};

struct TQueueItem {
  double priority;
  long order;
  TNode node;
};

struct TQueueCmp {
  bool operator()(const TQueueItem& a, const TQueueItem& b) const {
    if (a.priority != b.priority) return a.priority < b.priority;
    return a.order > b.order;
  }
};

struct TSession {
  Oracle& oracle;
  const Dataset& x;
  const std::unordered_map<ElementId, long long>& payloads;
  const TreeSumParams& params;
  std::mt19937_64 rng;
  AttackResult result;
  std::priority_queue<TQueueItem, std::vector<TQueueItem>, TQueueCmp> queue;
  long next_order = 0;

  int budget_left() const {
    return std::min(params.tau - result.queries_used,
                    oracle.remaining_budget());
  }

  long long value_of(int idx) const {
    auto it = payloads.find(x.elements[idx]);
    if (it == payloads.end())
      throw ConfigError("no attacker-side payload for '" + x.elements[idx] + "'");
    return it->second;
  }

  OracleResponse query(const std::vector<int>& idxs, int combos_after,
                       const std::string& note) {
    if (budget_left() <= 0) throw BudgetExhausted("attack budget exhausted");
    std::vector<ElementId> ids;
    ids.reserve(idxs.size());
    for (int i : idxs) ids.push_back(x.elements[i]);
    auto resp = oracle.psi_sum(ids);
    ++result.queries_used;
    TraceEntry e;
    e.query = std::move(ids);
    e.cardinality = resp.cardinality;
    e.sum = resp.sum;
    if (combos_after >= 0) e.surviving_combos = combos_after;
    e.note = note;
    result.trace.push_back(std::move(e));
    return resp;
  }

  CandidateSet solve(const TNode& n) const {
    SumProblem p;
    p.values.reserve(n.members.size());
    for (int i : n.members) p.values.push_back(value_of(i));
    p.target_sum = n.sum;
    p.target_count = n.count;
    return nsum_solve(p, params.combo_cap);
  }

  void classify(const TNode& n, const std::vector<int>& combo) {
    std::vector<char> pos(n.members.size(), 0);
    for (int p : combo) pos[p] = 1;
    for (std::size_t i = 0; i < n.members.size(); ++i)
      (pos[i] ? result.z_pos : result.z_neg).push_back(x.elements[n.members[i]]);
  }

  void flush_uniform(const TNode& n) {
    auto& out = n.count == 0 ? result.z_neg : result.z_pos;
    for (int i : n.members) out.push_back(x.elements[i]);
  }

  // Routes a freshly formed node: classify, enqueue, or degrade.
  void admit(TNode node) {
    if (node.cardinality_mode) {
      if (node.count == 0 || node.count == static_cast<int>(node.members.size())) {
        flush_uniform(node);
        return;
      }
      double pr =
          static_cast<double>(node.count) / static_cast<double>(node.members.size());
      queue.push({pr, next_order++, std::move(node)});
      return;
    }
    auto cand = solve(node);
    if (cand.truncated) {
      // candidate enumeration overflowed; fall back to count-only splitting
      node.cardinality_mode = true;
      node.combos.clear();
      if (!result.trace.empty() && result.trace.back().note.empty())
        result.trace.back().note = "combo_cap_exceeded";
      admit(std::move(node));
      return;
    }
    if (cand.combos.size() == 1) {
      classify(node, cand.combos.front());
      return;
    }
    double pr = static_cast<double>(node.members.size()) /
                static_cast<double>(cand.combos.size());
    node.combos = std::move(cand.combos);
    queue.push({pr, next_order++, std::move(node)});
  }

  void process_sum_node(TNode node) {
    while (node.combos.size() > 1 && budget_left() > 0) {
      // probe the first surviving combo
      const auto& probe = node.combos.front();
      TNode left, right;
      std::vector<char> in_probe(node.members.size(), 0);
      for (int p : probe) in_probe[p] = 1;
      for (std::size_t i = 0; i < node.members.size(); ++i)
        (in_probe[i] ? left.members : right.members).push_back(node.members[i]);

      auto resp = query(left.members, -1, "");
      left.count = resp.cardinality;
      left.sum = resp.sum.value_or(0);
      right.count = node.count - left.count;
      right.sum = node.sum - left.sum;

      auto cl = solve(left);
      auto cr = solve(right);
      if (!result.trace.empty())
        result.trace.back().surviving_combos =
            static_cast<int>(cl.combos.size() + cr.combos.size());

      auto settle = [&](TNode& child, CandidateSet& cand) -> bool {
        // true if the child still needs queries
        if (cand.truncated) {
          child.cardinality_mode = true;
          admit(std::move(child));
          return false;
        }
        if (cand.combos.size() == 1) {
          classify(child, cand.combos.front());
          return false;
        }
        child.combos = std::move(cand.combos);
        return true;
      };

      bool lneeds = settle(left, cl);
      bool rneeds = settle(right, cr);
      if (lneeds && rneeds) {
        double pl = static_cast<double>(left.members.size()) /
                    static_cast<double>(left.combos.size());
        double prr = static_cast<double>(right.members.size()) /
                     static_cast<double>(right.combos.size());
        // tie goes to the branch containing the probed combo
        if (pl >= prr) {
          queue.push({prr, next_order++, std::move(right)});
          node = std::move(left);
        } else {
          queue.push({pl, next_order++, std::move(left)});
          node = std::move(right);
        }
      } else if (lneeds) {
        node = std::move(left);
      } else if (rneeds) {
        node = std::move(right);
      } else {
        return;
      }
    }
    // budget ran dry with combos unresolved: nothing further to emit
  }

  void process_cardinality_node(TNode node) {
    while (0 < node.count &&
           node.count < static_cast<int>(node.members.size()) &&
           budget_left() > 0) {
      std::shuffle(node.members.begin(), node.members.end(), rng);
      int n = static_cast<int>(node.members.size());
      int k = n / 2;
      TNode left, right;
      left.cardinality_mode = right.cardinality_mode = true;
      left.members.assign(node.members.begin(), node.members.begin() + k);
      right.members.assign(node.members.begin() + k, node.members.end());
      auto resp = query(left.members, -1, "cardinality_fallback");
      left.count = resp.cardinality;
      right.count = node.count - left.count;

      bool lres = left.count == 0 || left.count == k;
      bool rres = right.count == 0 || right.count == n - k;
      if (lres) flush_uniform(left);
      if (rres) flush_uniform(right);
      if (lres && rres) return;
      if (lres) {
        node = std::move(right);
      } else if (rres) {
        node = std::move(left);
      } else {
        double lr = static_cast<double>(left.count) / k;
        double rr = static_cast<double>(right.count) / (n - k);
        if (lr >= rr) {
          queue.push({rr, next_order++, std::move(right)});
          node = std::move(left);
        } else {
          queue.push({lr, next_order++, std::move(left)});
          node = std::move(right);
        }
      }
    }
  }
};

}  // namespace

AttackResult treesum_explorer(
    Oracle& oracle, const Dataset& x,
    const std::unordered_map<ElementId, long long>& payloads,
    const TreeSumParams& params) {
  if (params.tau < 1) throw ArgumentError("tau must be >= 1");
  if (params.pool_size < 1) throw ArgumentError("pool_size must be >= 1");
  if (oracle.protocol() != Protocol::SUM)
    throw ConfigError("treesum_explorer requires a PSI-SUM oracle");
  if (oracle.noisy())
    throw ConfigError("deterministic attacks require a noiseless oracle");

  TSession s{oracle, x, payloads, params, std::mt19937_64(params.seed), {}, {}, 0};
  s.result.algo = "treesum";
  s.result.seed = params.seed;
  s.result.tau = params.tau;

  std::vector<int> order(x.size());
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), s.rng);
  std::size_t pool_size =
      std::min<std::size_t>(params.pool_size, x.size());

  try {
    for (std::size_t start = 0; start < order.size(); start += pool_size) {
      if (s.budget_left() <= 0) break;
      TNode pool;
      pool.members.assign(order.begin() + start,
                          order.begin() +
                              std::min(order.size(), start + pool_size));
      auto resp = s.query(pool.members, -1, "pool");
      pool.count = resp.cardinality;
      pool.sum = resp.sum.value_or(0);
      s.admit(std::move(pool));

      while (!s.queue.empty() && s.budget_left() > 0) {
        TNode node = s.queue.top().node;
        s.queue.pop();
        if (node.cardinality_mode)
          s.process_cardinality_node(std::move(node));
        else
          s.process_sum_node(std::move(node));
      }
    }
  } catch (const BudgetExhausted&) {
  }
  return s.result;
}

}  // namespace anonpsi
