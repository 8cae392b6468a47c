#include "anonpsi/actbayes.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <unordered_set>

namespace anonpsi {

void StatParams::validate() const {
  if (!(theta_u > 0.5 && theta_u <= 1.0))
    throw ArgumentError("theta_u must lie in (0.5, 1]");
  if (!(theta_l >= 0.0 && theta_l < 0.5))
    throw ArgumentError("theta_l must lie in [0, 0.5)");
  if (theta_l >= theta_u) throw ArgumentError("theta_l must be < theta_u");
  if (tol < 0) throw ArgumentError("tol must be >= 0");
  if (!(rate > 0.0 && rate <= 1.0)) throw ArgumentError("rate must lie in (0, 1]");
  if (tau < 1) throw ArgumentError("tau must be >= 1");
}

void update_posteriors(PosteriorVector& posterior,
                       const ObservationLedger& ledger,
                       const std::vector<int>& s_t, int o_t,
                       const std::vector<bool>& frozen) {
  if (s_t.empty()) throw ArgumentError("update_posteriors: empty query set");
  double ratio = static_cast<double>(o_t) / static_cast<double>(s_t.size());
  ratio = std::clamp(ratio, 0.0, 1.0);
  for (int i : s_t)
    if (!frozen[i]) posterior.p[i] = ratio;

  if (!ledger.has_containing) return;
  std::unordered_set<int> in_s(s_t.begin(), s_t.end());
  std::vector<int> complement;
  for (int i : ledger.containing)
    if (!in_s.count(i)) complement.push_back(i);
  if (complement.empty()) return;
  double comp_ratio = static_cast<double>(ledger.containing_total - o_t) /
                      static_cast<double>(complement.size());
  comp_ratio = std::clamp(comp_ratio, 0.0, 1.0);
  for (int i : complement)
    if (!frozen[i]) posterior.p[i] = comp_ratio;
}

CandidateSelection select_candidates(const PosteriorVector& posterior,
                                     const StatParams& params,
                                     const std::vector<int>& pool,
                                     double tol_override,
                                     std::mt19937_64& rng) {
  if (pool.empty()) throw ArgumentError("select_candidates: empty pool");
  double tol = tol_override >= 0 ? tol_override : params.tol;

  double min_u = std::numeric_limits<double>::infinity();
  double min_l = std::numeric_limits<double>::infinity();
  int argmin_u = pool.front(), argmin_l = pool.front();
  for (int i : pool) {
    double du = std::abs(posterior.p[i] - params.theta_u);
    double dl = std::abs(posterior.p[i] - params.theta_l);
    if (du < min_u) {
      min_u = du;
      argmin_u = i;
    }
    if (dl < min_l) {
      min_l = dl;
      argmin_l = i;
    }
  }

  CandidateSelection sel;
  std::bernoulli_distribution keep(params.rate);
  double sum_u = 0.0, sum_l = 0.0;
  for (int i : pool) {
    double du = std::abs(posterior.p[i] - params.theta_u);
    if (du - min_u <= tol && keep(rng)) {
      sel.s_u.push_back(i);
      sum_u += du;
    }
    double dl = std::abs(posterior.p[i] - params.theta_l);
    if (dl - min_l <= tol && keep(rng)) {
      sel.s_l.push_back(i);
      sum_l += dl;
    }
  }
  if (sel.s_u.empty()) {
    sel.s_u.push_back(argmin_u);
    sum_u = min_u;
  }
  if (sel.s_l.empty()) {
    sel.s_l.push_back(argmin_l);
    sum_l = min_l;
  }
  sel.d_u = sum_u / static_cast<double>(sel.s_u.size());
  sel.d_l = sum_l / static_cast<double>(sel.s_l.size());
  return sel;
}

ActBayesOutput actbayes_attack(Oracle& oracle, const Dataset& x,
                               const StatParams& params) {
  params.validate();
  int n = static_cast<int>(x.size());

  ActBayesOutput out;
  out.result.algo = "actbayes";
  out.result.seed = params.seed;
  out.result.tau = params.tau;
  out.posterior.p.assign(n, 0.5);

  std::mt19937_64 rng(params.seed);
  std::vector<bool> frozen(n, false);
  std::vector<bool> labeled_pos(n, false);
  ObservationLedger ledger;

  std::vector<int> pool(n);
  for (int i = 0; i < n; ++i) pool[i] = i;

  auto budget_left = [&] {
    return std::min(params.tau - out.result.queries_used,
                    oracle.remaining_budget());
  };

  auto run_query = [&](const std::vector<int>& idxs) {
    std::vector<ElementId> ids;
    ids.reserve(idxs.size());
    for (int i : idxs) ids.push_back(x.elements[i]);
    auto resp = oracle.psi_ca(ids);
    ++out.result.queries_used;
    TraceEntry e;
    e.query = std::move(ids);
    e.cardinality = resp.cardinality;
    out.result.trace.push_back(std::move(e));
    return resp.cardinality;
  };

  int frozen_pos = 0;
  auto classify_pass = [&] {
    std::vector<int> still;
    still.reserve(pool.size());
    for (int i : pool) {
      if (out.posterior.p[i] >= params.theta_u) {
        frozen[i] = true;
        labeled_pos[i] = true;
        ++frozen_pos;
        out.result.z_pos.push_back(x.elements[i]);
      } else if (out.posterior.p[i] <= params.theta_l) {
        frozen[i] = true;
        out.result.z_neg.push_back(x.elements[i]);
      } else {
        still.push_back(i);
      }
    }
    pool = std::move(still);
  };

  // the containing set used for complement updates is the current unresolved
  // pool; its total starts from the opening full-pool count and is reduced by
  // every positive label frozen since that count was taken
  int base_total = 0;
  int frozen_pos_at_base = 0;
  auto refresh_containing = [&] {
    ledger.containing = pool;
    ledger.containing_total =
        std::max(0, base_total - (frozen_pos - frozen_pos_at_base));
    ledger.has_containing = true;
  };

  try {
    // opening full-pool query seeds the containing total
    int o0 = run_query(pool);
    base_total = o0;
    {
      ObservationLedger no_containing;  // no complement on the seed query
      update_posteriors(out.posterior, no_containing, pool, o0, frozen);
      ledger.facts.push_back({pool, o0});
    }
    classify_pass();
    refresh_containing();

    std::vector<int> last_query;
    double tol_override = -1.0;
    while (budget_left() > 0 && !pool.empty()) {
      auto sel =
          select_candidates(out.posterior, params, pool, tol_override, rng);
      tol_override = -1.0;
      const std::vector<int>& s =
          sel.d_u <= sel.d_l ? sel.s_u : sel.s_l;

      // stalled on an identical query with unchanged beliefs: widen the band
      // for one round
      if (s == last_query) tol_override = 2.0 * params.tol;
      last_query = s;

      int o_t = run_query(s);
      update_posteriors(out.posterior, ledger, s, o_t, frozen);
      ledger.facts.push_back({s, o_t});
      if (s.size() == pool.size()) {
        // a fresh full-pool observation resets the derived total
        base_total = o_t;
        frozen_pos_at_base = frozen_pos;
      }
      classify_pass();
      refresh_containing();
    }
  } catch (const BudgetExhausted&) {
  }
  return out;
}

std::string posterior_csv(const Dataset& x, const ActBayesOutput& out) {
  std::unordered_set<ElementId> pos(out.result.z_pos.begin(),
                                    out.result.z_pos.end());
  std::unordered_set<ElementId> neg(out.result.z_neg.begin(),
                                    out.result.z_neg.end());
  std::ostringstream os;
  os << "id,posterior,label\n";
  for (std::size_t i = 0; i < x.size(); ++i) {
    os << x.elements[i] << "," << out.posterior.p[i] << ",";
    if (pos.count(x.elements[i]))
      os << 1;
    else if (neg.count(x.elements[i]))
      os << 0;
    os << "\n";
  }
  return os.str();
}

}  // namespace anonpsi
