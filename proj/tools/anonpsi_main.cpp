// anonpsi: experiment harness wiring datasets, the simulated PSI oracle, the
// partition planner, the attack engines, and the metrics together.

#include <chrono>
#include <fstream>
#include <iostream>
#include <numeric>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "anonpsi/actbayes.hpp"
#include "anonpsi/analysis.hpp"
#include "anonpsi/attacks_det.hpp"
#include "anonpsi/treesum.hpp"

namespace {

using namespace anonpsi;

constexpr int kSchemaVersion = 1;

struct SynthSpec {
  int n = 0;
  int positives = 0;
  std::string payloads = "none";
  bool requested() const { return n > 0; }
};

PayloadSpec parse_payloads(const std::string& s) {
  if (s == "none") return PayloadSpec::none();
  if (s == "powers") return PayloadSpec::distinct_powers();
  if (s.rfind("uniform:", 0) == 0) {
    auto rest = s.substr(8);
    auto colon = rest.find(':');
    if (colon == std::string::npos)
      throw ArgumentError("expected uniform:lo:hi");
    return PayloadSpec::uniform(std::stoll(rest.substr(0, colon)),
                                std::stoll(rest.substr(colon + 1)));
  }
  throw ArgumentError("unknown payload spec '" + s + "'");
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path);
  out << content;
}

nlohmann::json metrics_json(const Metrics& m) {
  return nlohmann::json::parse(m.to_json());
}

int cmd_build_memo(int n_max, int tau_max, const std::string& out_path) {
  auto t0 = std::chrono::steady_clock::now();
  auto tables = MemoTables::build(n_max, tau_max);
  auto t1 = std::chrono::steady_clock::now();
  tables.save(out_path);
  double secs = std::chrono::duration<double>(t1 - t0).count();
  std::cout << "memo tables built: n_max=" << n_max << " tau_max=" << tau_max
            << " (" << secs << " s), written to " << out_path << "\n";
  return 0;
}

struct AttackArgs {
  std::string algo;
  int tau = 1;
  double epsilon = 0.0;  // 0 = noiseless
  int trials = 1;
  std::uint64_t seed = 0;
  std::string memo_path;
  std::string dataset_path;
  std::string target_path;
  std::string truth_path;
  std::string out_path;
  SynthSpec synth;
  long long combo_cap = 1'000'000;
  int pool_size = 24;
  StatParams stat;
};

int cmd_attack(const AttackArgs& a) {
  std::optional<MemoTables> tables;
  if (a.algo == "dypath") {
    if (a.memo_path.empty())
      throw ConfigError("--memo is required for the dypath attack");
    tables = MemoTables::load(a.memo_path);
  }

  SyntheticInstance file_inst;
  bool from_files = !a.synth.requested();
  bool have_truth = false;
  if (from_files) {
    if (a.dataset_path.empty() || a.target_path.empty())
      throw ConfigError("provide --dataset/--target or synthetic parameters");
    file_inst.attacker = load_attacker_csv(a.dataset_path);
    file_inst.target = load_target_csv(a.target_path);
    if (a.algo == "treesum")
      file_inst.attacker_payloads = load_payload_column(a.dataset_path);
    if (!a.truth_path.empty()) {
      file_inst.truth = load_truth_csv(a.truth_path, file_inst.attacker);
      have_truth = true;
    }
  } else {
    have_truth = true;
  }

  nlohmann::json trials_json = nlohmann::json::array();
  std::vector<double> leakages;
  std::vector<Metrics> per_trial_metrics;
  const bool keep_details = a.trials <= 1000;

  for (int trial = 0; trial < a.trials; ++trial) {
    SyntheticInstance inst;
    if (from_files)
      inst = file_inst;
    else
      inst = generate_synthetic(a.synth.n, a.synth.positives,
                                parse_payloads(a.synth.payloads),
                                mix_seed(a.seed, 2 * trial));
    std::uint64_t attack_seed = mix_seed(a.seed, 2 * trial + 1);

    OracleConfig cfg;
    cfg.budget = a.tau;
    cfg.protocol = a.algo == "treesum" ? Protocol::SUM : Protocol::CA;
    if (a.epsilon > 0) cfg.epsilon = a.epsilon;
    cfg.noise_seed = attack_seed ^ 0x5eedULL;
    Oracle oracle(inst.attacker, inst.target, cfg);

    AttackResult result;
    std::optional<std::vector<double>> posterior;
    if (a.algo == "guo") {
      result = guo_attack(oracle, inst.attacker, a.tau, attack_seed);
    } else if (a.algo == "dypath") {
      result = dypathblazer(oracle, inst.attacker, a.tau, *tables, attack_seed);
    } else if (a.algo == "treesum") {
      TreeSumParams tp;
      tp.tau = a.tau;
      tp.combo_cap = a.combo_cap;
      tp.pool_size = a.pool_size;
      tp.seed = attack_seed;
      result = treesum_explorer(oracle, inst.attacker, inst.attacker_payloads, tp);
    } else if (a.algo == "actbayes") {
      StatParams sp = a.stat;
      sp.tau = a.tau;
      sp.seed = attack_seed;
      auto out = actbayes_attack(oracle, inst.attacker, sp);
      result = std::move(out.result);
      posterior = std::move(out.posterior.p);
    } else {
      throw ArgumentError("unknown algo '" + a.algo + "'");
    }

    leakages.push_back(static_cast<double>(result.leakage()));
    nlohmann::json tj;
    tj["trial"] = trial;
    tj["attack_seed"] = attack_seed;
    tj["queries_used"] = result.queries_used;
    tj["leakage"] = result.leakage();
    if (have_truth) {
      auto m = evaluate(result, inst.truth, inst.attacker);
      per_trial_metrics.push_back(m);
      tj["metrics"] = metrics_json(m);
    }
    if (keep_details) tj["result"] = nlohmann::json::parse(result.to_json());
    trials_json.push_back(std::move(tj));
  }

  double mean_leakage =
      std::accumulate(leakages.begin(), leakages.end(), 0.0) / leakages.size();

  nlohmann::json out;
  out["schema_version"] = kSchemaVersion;
  out["spec"] = {{"algo", a.algo},       {"tau", a.tau},
                 {"epsilon", a.epsilon}, {"trials", a.trials},
                 {"seed", a.seed},       {"synthetic", !from_files}};
  if (!from_files)
    out["spec"]["synth"] = {{"n", a.synth.n},
                            {"positives", a.synth.positives},
                            {"payloads", a.synth.payloads}};
  out["aggregate"]["mean_leakage"] = mean_leakage;
  if (!per_trial_metrics.empty()) {
    auto mean_of = [&](auto getter) {
      double s = 0.0;
      int k = 0;
      for (const auto& m : per_trial_metrics) {
        auto v = getter(m);
        if (v) {
          s += *v;
          ++k;
        }
      }
      return k ? nlohmann::json(s / k) : nlohmann::json(nullptr);
    };
    out["aggregate"]["mean_total_leakage_pct"] =
        std::accumulate(per_trial_metrics.begin(), per_trial_metrics.end(), 0.0,
                        [](double acc, const Metrics& m) {
                          return acc + m.total_leakage_pct;
                        }) /
        per_trial_metrics.size();
    out["aggregate"]["mean_type1"] =
        mean_of([](const Metrics& m) { return m.type1; });
    out["aggregate"]["mean_type2"] =
        mean_of([](const Metrics& m) { return m.type2; });
    out["aggregate"]["mean_misclass"] =
        mean_of([](const Metrics& m) { return m.misclass; });
  }
  out["trials"] = std::move(trials_json);

  if (!a.out_path.empty()) write_file(a.out_path, out.dump(2));
  std::cout << a.algo << ": mean leakage " << mean_leakage << " over "
            << a.trials << " trial(s)\n";
  return 0;
}

int cmd_lower_bound(int n, int c, int tau_max, const std::string& memo_path,
                    const std::string& out_path) {
  auto tables = MemoTables::load(memo_path);
  auto dy = lower_bound(n, c, tau_max, BoundStrategy::DyPath, tables);
  auto even = lower_bound(n, c, tau_max, BoundStrategy::EvenBaseline, tables);
  std::ostringstream csv;
  csv << "tau,dypath,even_baseline\n";
  for (int i = 0; i < tau_max; ++i)
    csv << dy.points[i].first << "," << dy.points[i].second << ","
        << even.points[i].second << "\n";
  if (!out_path.empty())
    write_file(out_path, csv.str());
  else
    std::cout << csv.str();
  return 0;
}

int cmd_evaluate(const std::string& result_path, const std::string& truth_path,
                 const std::string& dataset_path, const std::string& out_path) {
  std::ifstream in(result_path);
  if (!in) throw Error("cannot open " + result_path);
  nlohmann::json j = nlohmann::json::parse(in);
  // accept either a bare attack result or the attack command's report, in
  // which case the first trial is scored
  if (j.contains("trials")) {
    if (j["trials"].empty() || !j["trials"][0].contains("result"))
      throw FormatError(result_path + ": no per-trial results to evaluate");
    j = j["trials"][0]["result"];
  }
  AttackResult result;
  result.z_pos = j.at("z_pos").get<std::vector<std::string>>();
  result.z_neg = j.at("z_neg").get<std::vector<std::string>>();
  auto x = load_attacker_csv(dataset_path);
  auto truth = load_truth_csv(truth_path, x);
  auto m = evaluate(result, truth, x);
  if (!out_path.empty())
    write_file(out_path, m.to_json());
  else
    std::cout << m.to_json() << "\n";
  return 0;
}

struct SweepArgs {
  std::string param;
  std::vector<double> values;
  int trials = 100;
  std::uint64_t seed = 0;
  SynthSpec synth{100, 30, "none"};
  double epsilon = 0.0;
  std::string out_path;
};

int cmd_sweep(const SweepArgs& a) {
  if (a.values.empty()) throw ArgumentError("sweep needs at least one value");
  std::ostringstream csv;
  csv << "param,value,tp_pct,tn_pct,type1,type2\n";
  for (double value : a.values) {
    StatParams sp;  // defaults per the parameter study
    int tau = 20;
    if (a.param == "theta-u")
      sp.theta_u = value;
    else if (a.param == "theta-l")
      sp.theta_l = value;
    else if (a.param == "tol")
      sp.tol = value;
    else if (a.param == "rate")
      sp.rate = value;
    else if (a.param == "tau")
      tau = static_cast<int>(value);
    else
      throw ArgumentError("unknown sweep parameter '" + a.param + "'");
    sp.tau = tau;

    double tp = 0, tn = 0, t1 = 0, t2 = 0;
    int t1_n = 0, t2_n = 0, tp_n = 0, tn_n = 0;
    for (int trial = 0; trial < a.trials; ++trial) {
      auto inst = generate_synthetic(a.synth.n, a.synth.positives,
                                     parse_payloads(a.synth.payloads),
                                     mix_seed(a.seed, 2 * trial));
      OracleConfig cfg;
      cfg.budget = tau;
      if (a.epsilon > 0) cfg.epsilon = a.epsilon;
      cfg.noise_seed = mix_seed(a.seed, 2 * trial + 1) ^ 0x5eedULL;
      Oracle oracle(inst.attacker, inst.target, cfg);
      StatParams tsp = sp;
      tsp.seed = mix_seed(a.seed, 2 * trial + 1);
      auto out = actbayes_attack(oracle, inst.attacker, tsp);
      auto m = evaluate(out.result, inst.truth, inst.attacker);
      if (m.pos_leakage_pct) {
        tp += *m.pos_leakage_pct;
        ++tp_n;
      }
      if (m.neg_leakage_pct) {
        tn += *m.neg_leakage_pct;
        ++tn_n;
      }
      if (m.type1) {
        t1 += *m.type1;
        ++t1_n;
      }
      if (m.type2) {
        t2 += *m.type2;
        ++t2_n;
      }
    }
    auto cell = [](double s, int k) {
      return k ? std::to_string(s / k) : std::string("");
    };
    csv << a.param << "," << value << "," << cell(tp, tp_n) << ","
        << cell(tn, tn_n) << "," << cell(t1, t1_n) << "," << cell(t2, t2_n)
        << "\n";
  }
  if (!a.out_path.empty())
    write_file(a.out_path, csv.str());
  else
    std::cout << csv.str();
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"anonymity assessment harness for intersection-size-revealing "
               "PSI protocols"};
  app.require_subcommand(1);

  // build-memo
  int n_max = 0, tau_max = 0;
  std::string memo_out;
  auto* bm = app.add_subcommand("build-memo", "build and persist planner tables");
  bm->add_option("--n-max", n_max, "largest node size")->required();
  bm->add_option("--tau-max", tau_max, "largest budget")->required();
  bm->add_option("--out", memo_out, "output file")->required();

  // synth
  SynthSpec synth;
  std::uint64_t synth_seed = 0;
  std::string out_attacker, out_target, out_truth;
  auto* sy = app.add_subcommand("synth", "generate a synthetic instance");
  sy->add_option("--n", synth.n, "dataset size")->required();
  sy->add_option("--positives", synth.positives, "number of positive members")
      ->required();
  sy->add_option("--payloads", synth.payloads,
                 "none | uniform:lo:hi | powers");
  sy->add_option("--seed", synth_seed, "generator seed");
  sy->add_option("--out-attacker", out_attacker, "attacker CSV")->required();
  sy->add_option("--out-target", out_target, "target CSV")->required();
  sy->add_option("--out-truth", out_truth, "ground-truth CSV");

  // attack
  AttackArgs at;
  auto* ak = app.add_subcommand("attack", "run attack trials");
  ak->add_option("--algo", at.algo, "guo | dypath | treesum | actbayes")
      ->required();
  ak->add_option("--tau", at.tau, "query budget")->required();
  ak->add_option("--epsilon", at.epsilon, "total DP budget (0 = noiseless)");
  ak->add_option("--trials", at.trials, "independent sessions");
  ak->add_option("--seed", at.seed, "master seed");
  ak->add_option("--memo", at.memo_path, "planner tables (dypath)");
  ak->add_option("--dataset", at.dataset_path, "attacker CSV");
  ak->add_option("--target", at.target_path, "target CSV");
  ak->add_option("--truth", at.truth_path, "ground-truth CSV");
  ak->add_option("--out", at.out_path, "result JSON");
  ak->add_option("--synth-n", at.synth.n, "synthetic dataset size");
  ak->add_option("--synth-positives", at.synth.positives,
                 "synthetic positive count");
  ak->add_option("--payloads", at.synth.payloads, "synthetic payload spec");
  ak->add_option("--combo-cap", at.combo_cap, "candidate enumeration cap");
  ak->add_option("--pool-size", at.pool_size, "treesum working pool size");
  ak->add_option("--theta-u", at.stat.theta_u, "upper stop threshold");
  ak->add_option("--theta-l", at.stat.theta_l, "lower stop threshold");
  ak->add_option("--tol", at.stat.tol, "tolerance factor");
  ak->add_option("--rate", at.stat.rate, "sampling rate");

  // lower-bound
  int lb_n = 0, lb_c = 0, lb_tau = 0;
  std::string lb_memo, lb_out;
  auto* lb = app.add_subcommand("lower-bound", "worst-case leakage curves");
  lb->add_option("--n", lb_n)->required();
  lb->add_option("--c", lb_c)->required();
  lb->add_option("--tau-max", lb_tau)->required();
  lb->add_option("--memo", lb_memo)->required();
  lb->add_option("--out", lb_out, "CSV output (stdout if omitted)");

  // evaluate
  std::string ev_result, ev_truth, ev_dataset, ev_out;
  auto* ev = app.add_subcommand("evaluate", "score a stored attack result");
  ev->add_option("--result", ev_result)->required();
  ev->add_option("--truth", ev_truth)->required();
  ev->add_option("--dataset", ev_dataset)->required();
  ev->add_option("--out", ev_out, "metrics JSON (stdout if omitted)");

  // sweep
  SweepArgs sw;
  auto* sp = app.add_subcommand("sweep", "statistical-attack parameter study");
  sp->add_option("--param", sw.param, "theta-u | theta-l | tol | rate | tau")
      ->required();
  sp->add_option("--values", sw.values, "grid values (comma separated)")
      ->required()
      ->delimiter(',');
  sp->add_option("--trials", sw.trials);
  sp->add_option("--seed", sw.seed);
  sp->add_option("--n", sw.synth.n);
  sp->add_option("--positives", sw.synth.positives);
  sp->add_option("--epsilon", sw.epsilon);
  sp->add_option("--out", sw.out_path, "CSV output (stdout if omitted)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (bm->parsed()) return cmd_build_memo(n_max, tau_max, memo_out);
    if (sy->parsed()) {
      auto inst = generate_synthetic(synth.n, synth.positives,
                                     parse_payloads(synth.payloads), synth_seed);
      // attacker CSV carries the payload column so PSI-SUM attacks can read it
      if (!inst.attacker_payloads.empty()) {
        std::ofstream out(out_attacker);
        if (!out) throw Error("cannot write " + out_attacker);
        out << "id,payload\n";
        for (const auto& id : inst.attacker.elements)
          out << id << "," << inst.attacker_payloads.at(id) << "\n";
      } else {
        save_attacker_csv(inst.attacker, out_attacker);
      }
      save_target_csv(inst.target, out_target, inst.attacker.elements);
      if (!out_truth.empty())
        save_truth_csv(inst.truth, inst.attacker, out_truth);
      std::cout << "wrote instance: n=" << synth.n
                << " positives=" << synth.positives << "\n";
      return 0;
    }
    if (ak->parsed()) return cmd_attack(at);
    if (lb->parsed())
      return cmd_lower_bound(lb_n, lb_c, lb_tau, lb_memo, lb_out);
    if (ev->parsed()) return cmd_evaluate(ev_result, ev_truth, ev_dataset, ev_out);
    if (sp->parsed()) return cmd_sweep(sw);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
