#include "anonpsi/attacks_det.hpp"

#include <algorithm>
#include <queue>
#include <random>

namespace anonpsi {

namespace {

struct Node {
  std::vector<int> members;  // indices into X
  int count = 0;             // positives among members
};

struct QueueItem {
  double priority;
  long order;  // FIFO on priority ties
  Node node;
};

struct QueueCmp {
  bool operator()(const QueueItem& a, const QueueItem& b) const {
    if (a.priority != b.priority) return a.priority < b.priority;
    return a.order > b.order;
  }
};

struct Session {
  Oracle& oracle;
  const Dataset& x;
  int tau;
  std::mt19937_64 rng;
  AttackResult result;
  std::priority_queue<QueueItem, std::vector<QueueItem>, QueueCmp> queue;
  long next_order = 0;

  Session(Oracle& o, const Dataset& d, int t, std::uint64_t seed)
      : oracle(o), x(d), tau(t), rng(seed) {
    if (t < 1) throw ArgumentError("tau must be >= 1");
    if (o.noisy())
      throw ConfigError("deterministic attacks require a noiseless oracle");
    result.seed = seed;
    result.tau = t;
  }

  int budget_left() const {
    return std::min(tau - result.queries_used, oracle.remaining_budget());
  }

  std::vector<ElementId> ids_of(const std::vector<int>& idxs) const {
    std::vector<ElementId> out;
    out.reserve(idxs.size());
    for (int i : idxs) out.push_back(x.elements[i]);
    return out;
  }

  // Returns the exact cardinality; throws BudgetExhausted past the budget.
  int query(const std::vector<int>& idxs, const std::string& note) {
    if (budget_left() <= 0) throw BudgetExhausted("attack budget exhausted");
    auto ids = ids_of(idxs);
    auto resp = oracle.psi_ca(ids);
    ++result.queries_used;
    TraceEntry e;
    e.query = std::move(ids);
    e.cardinality = resp.cardinality;
    e.note = note;
    result.trace.push_back(std::move(e));
    return resp.cardinality;
  }

  bool resolved(const Node& n) const {
    return n.count == 0 || n.count == static_cast<int>(n.members.size());
  }

  void flush(const Node& n) {
    auto& out = n.count == 0 ? result.z_neg : result.z_pos;
    for (int i : n.members) out.push_back(x.elements[i]);
  }

  void enqueue(Node n, double priority) {
    queue.push({priority, next_order++, std::move(n)});
  }
};

}  // namespace

AttackResult guo_attack(Oracle& oracle, const Dataset& x, int tau,
                        std::uint64_t seed) {
  Session s(oracle, x, tau, seed);
  s.result.algo = "guo";

  Node root;
  root.members.resize(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) root.members[i] = static_cast<int>(i);

  try {
    root.count = s.query(root.members, "root");
    if (s.resolved(root)) {
      s.flush(root);
      return s.result;
    }
    s.enqueue(std::move(root), 1.0);

    while (!s.queue.empty() && s.budget_left() > 0) {
      Node node = s.queue.top().node;
      s.queue.pop();
      while (!s.resolved(node) && s.budget_left() > 0) {
        std::shuffle(node.members.begin(), node.members.end(), s.rng);
        int n = static_cast<int>(node.members.size());
        int k = n / 2;
        Node left{{node.members.begin(), node.members.begin() + k}, 0};
        Node right{{node.members.begin() + k, node.members.end()}, 0};
        left.count = s.query(left.members, "");
        right.count = node.count - left.count;  // deduced from the parent

        bool lres = s.resolved(left);
        bool rres = s.resolved(right);
        if (lres) s.flush(left);
        if (rres) s.flush(right);
        if (lres && rres) break;
        if (lres) {
          node = std::move(right);
        } else if (rres) {
          node = std::move(left);
        } else {
          double lr = static_cast<double>(left.count) / k;
          double rr = static_cast<double>(right.count) / (n - k);
          if (lr >= rr) {
            s.enqueue(std::move(right), rr);
            node = std::move(left);
          } else {
            s.enqueue(std::move(left), lr);
            node = std::move(right);
          }
        }
      }
    }
  } catch (const BudgetExhausted&) {
    // partial result is the outcome, not a failure
  }
  return s.result;
}

AttackResult dypathblazer(Oracle& oracle, const Dataset& x, int tau,
                          const MemoTables& tables, std::uint64_t seed,
                          const DyPathOptions& options) {
  Session s(oracle, x, tau, seed);
  s.result.algo = "dypath";

  // parked-node priority: table gamma where covered, count ratio otherwise
  auto node_priority = [&](const Node& n, int tau_left) {
    int sz = static_cast<int>(n.members.size());
    if (tables.covers(sz, std::min(tau_left, tables.tau_max())))
      return tables.gamma(sz, n.count, std::min(tau_left, tables.tau_max()));
    return static_cast<double>(n.count) / sz;
  };

  Node root;
  root.members.resize(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) root.members[i] = static_cast<int>(i);

  try {
    root.count = s.query(root.members, "root");
    if (s.resolved(root)) {
      s.flush(root);
      return s.result;
    }
    s.enqueue(std::move(root), 1.0);

    while (!s.queue.empty() && s.budget_left() > 0) {
      Node node = s.queue.top().node;
      s.queue.pop();
      while (!s.resolved(node) && s.budget_left() > 0) {
        int n = static_cast<int>(node.members.size());
        int tau_state = s.budget_left();
        int k = 0;
        bool covered = tables.covers(n, tau_state);
        std::string note;
        if (options.forced_k) {
          k = std::clamp(*options.forced_k, 1, n - 1);
        } else if (covered) {
          k = optimal_k({n, node.count, tau_state}, tables);
        } else {
          k = n / 2;  // even-split fallback for states off the table
          note = "fallback_even_split";
        }

        // commit direction before the outcome is seen, ties toward the left
        bool continue_left = true;
        if (covered)
          continue_left = tables.expected_left(n, node.count, tau_state, k) >=
                          tables.expected_right(n, node.count, tau_state, k);

        std::shuffle(node.members.begin(), node.members.end(), s.rng);
        Node left{{node.members.begin(), node.members.begin() + k}, 0};
        Node right{{node.members.begin() + k, node.members.end()}, 0};
        left.count = s.query(left.members, note);
        right.count = node.count - left.count;

        bool lres = s.resolved(left);
        bool rres = s.resolved(right);
        if (lres) s.flush(left);
        if (rres) s.flush(right);
        if (lres && rres) break;
        if (lres) {
          node = std::move(right);
        } else if (rres) {
          node = std::move(left);
        } else if (continue_left) {
          double pr = node_priority(right, s.budget_left());
          s.enqueue(std::move(right), pr);
          node = std::move(left);
        } else {
          double pl = node_priority(left, s.budget_left());
          s.enqueue(std::move(left), pl);
          node = std::move(right);
        }
      }
    }
  } catch (const BudgetExhausted&) {
  }
  return s.result;
}

}  // namespace anonpsi
