#include "anonpsi/planner.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <mutex>
#include <sstream>

#include "json.hpp"

namespace anonpsi {

namespace {

constexpr double kEps = 1e-9;

// Binomial coefficients in long double, grown on demand. C(n,k) up to
// n ~ 1000 stays well inside the exponent range.
long double binom(int n, int k) {
  static std::vector<std::vector<long double>> table;
  static std::mutex mu;
  if (k < 0 || k > n) return 0.0L;
  std::lock_guard<std::mutex> lock(mu);
  while (static_cast<int>(table.size()) <= n) {
    int row = static_cast<int>(table.size());
    std::vector<long double> r(row + 1, 1.0L);
    for (int j = 1; j < row; ++j) r[j] = table[row - 1][j - 1] + table[row - 1][j];
    table.push_back(std::move(r));
  }
  return table[n][k];
}

}  // namespace

double hypergeom_pmf(int c_left, int n, int c, int k) {
  if (n < 0 || c < 0 || c > n || k < 0 || k > n)
    throw ArgumentError("hypergeom_pmf: arguments out of range");
  if (c_left < 0 || c_left > k || c_left > c || k - c_left > n - c) return 0.0;
  return static_cast<double>(binom(c, c_left) * binom(n - c, k - c_left) /
                             binom(n, k));
}

MemoTables::MemoTables(int n_max, int tau_max)
    : n_max_(n_max),
      tau_max_(tau_max),
      gamma_(static_cast<std::size_t>(n_max + 1) * (n_max + 1) * (tau_max + 1),
             0.0),
      theta_(gamma_.size(), 0),
      phi_(static_cast<std::size_t>(n_max + 1) * (n_max + 1), kPhiUnresolvable) {
}

void MemoTables::check(int n, int c, int tau) const {
  if (n < 1 || n > n_max_ || tau < 0 || tau > tau_max_ || c < 0 || c > n)
    throw OutOfRange("state (" + std::to_string(n) + "," + std::to_string(c) +
                     "," + std::to_string(tau) + ") outside table bounds");
}

double MemoTables::gamma(int n, int c, int tau) const {
  check(n, c, tau);
  return gamma_[idx3(n, c, tau)];
}

int MemoTables::theta(int n, int c, int tau) const {
  check(n, c, tau);
  return theta_[idx3(n, c, tau)];
}

int MemoTables::phi(int n, int c) const {
  check(n, c, 0);
  return phi_[idx2(n, c)];
}

double MemoTables::outcome_left(int n, int c, int tau, int k, int c_left) const {
  int rest = tau - 1;
  int f = phi(k, c_left);
  if (f != kPhiUnresolvable && f <= rest)
    return k + gamma(n - k, c - c_left, rest - f);
  return gamma(k, c_left, rest);
}

double MemoTables::outcome_right(int n, int c, int tau, int k, int c_left) const {
  int rest = tau - 1;
  int f = phi(n - k, c - c_left);
  if (f != kPhiUnresolvable && f <= rest)
    return (n - k) + gamma(k, c_left, rest - f);
  return gamma(n - k, c - c_left, rest);
}

double MemoTables::expected_left(int n, int c, int tau, int k) const {
  double total = 0.0;
  int lo = std::max(0, k - (n - c));
  int hi = std::min(k, c);
  for (int cl = lo; cl <= hi; ++cl)
    total += hypergeom_pmf(cl, n, c, k) * outcome_left(n, c, tau, k, cl);
  return total;
}

double MemoTables::expected_right(int n, int c, int tau, int k) const {
  double total = 0.0;
  int lo = std::max(0, k - (n - c));
  int hi = std::min(k, c);
  for (int cl = lo; cl <= hi; ++cl)
    total += hypergeom_pmf(cl, n, c, k) * outcome_right(n, c, tau, k, cl);
  return total;
}

MemoTables MemoTables::build(int n_max, int tau_max) {
  if (n_max < 1) throw ArgumentError("n_max must be >= 1");
  if (tau_max < 0) throw ArgumentError("tau_max must be >= 0");

  MemoTables t(n_max, tau_max);
  // Children of a split are strictly smaller, so one ascending pass over n
  // sees every dependency (including phi of the children) already final.
  for (int n = 1; n <= n_max; ++n) {
    for (int c = 0; c <= n; ++c) {
      if (c == 0 || c == n) {
        // uniform node: resolved with zero further queries
        for (int tau = 0; tau <= tau_max; ++tau)
          t.gamma_[t.idx3(n, c, tau)] = n;
        t.phi_[t.idx2(n, c)] = 0;
        continue;
      }
      int phi = kPhiUnresolvable;
      for (int tau = 1; tau <= tau_max; ++tau) {
        double best = -1.0;
        int best_k = 1;
        for (int k = 1; k <= (n + 1) / 2; ++k) {
          double g = std::max(t.expected_left(n, c, tau, k),
                              t.expected_right(n, c, tau, k));
          if (g > best + kEps) {
            best = g;
            best_k = k;
          }
        }
        t.gamma_[t.idx3(n, c, tau)] = best;
        t.theta_[t.idx3(n, c, tau)] = best_k;
        if (phi == kPhiUnresolvable && best >= n - kEps) phi = tau;
      }
      t.phi_[t.idx2(n, c)] = phi;
    }
  }
  return t;
}

int optimal_k(const AttackState& state, const MemoTables& tables) {
  if (state.c <= 0 || state.c >= state.n)
    throw ArgumentError("optimal_k: state is already resolved");
  if (state.tau < 1) throw ArgumentError("optimal_k: tau must be >= 1");
  return tables.theta(state.n, state.c, state.tau);
}

namespace {
constexpr char kMagic[4] = {'A', 'P', 'S', 'I'};
constexpr std::int32_t kFormatVersion = 1;

template <typename T>
void write_pod(std::ofstream& out, const T& v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(v));
}

template <typename T>
void read_pod(std::ifstream& in, T& v) {
  in.read(reinterpret_cast<char*>(&v), sizeof(v));
  if (!in) throw FormatError("memo file truncated");
}
}  // namespace

void MemoTables::save(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path);
  out.write(kMagic, 4);
  write_pod(out, kFormatVersion);
  nlohmann::json header{{"n_max", n_max_}, {"tau_max", tau_max_}};
  std::string hs = header.dump();
  write_pod(out, static_cast<std::int32_t>(hs.size()));
  out.write(hs.data(), static_cast<std::streamsize>(hs.size()));
  out.write(reinterpret_cast<const char*>(gamma_.data()),
            static_cast<std::streamsize>(gamma_.size() * sizeof(double)));
  out.write(reinterpret_cast<const char*>(theta_.data()),
            static_cast<std::streamsize>(theta_.size() * sizeof(std::int32_t)));
  out.write(reinterpret_cast<const char*>(phi_.data()),
            static_cast<std::streamsize>(phi_.size() * sizeof(std::int32_t)));
  if (!out) throw Error("short write to " + path);
}

MemoTables MemoTables::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path);
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, kMagic, 4) != 0)
    throw FormatError("bad magic header in " + path);
  std::int32_t version = 0;
  read_pod(in, version);
  if (version != kFormatVersion)
    throw FormatError("unsupported memo format version " +
                      std::to_string(version));
  std::int32_t header_len = 0;
  read_pod(in, header_len);
  if (header_len <= 0 || header_len > 1 << 20)
    throw FormatError("bad header length in " + path);
  std::string hs(static_cast<std::size_t>(header_len), '\0');
  in.read(hs.data(), header_len);
  if (!in) throw FormatError("memo file truncated");
  nlohmann::json header;
  try {
    header = nlohmann::json::parse(hs);
  } catch (const nlohmann::json::exception&) {
    throw FormatError("bad JSON header in " + path);
  }
  int n_max = header.at("n_max").get<int>();
  int tau_max = header.at("tau_max").get<int>();
  if (n_max < 1 || tau_max < 0) throw FormatError("bad dimensions in " + path);

  MemoTables t(n_max, tau_max);
  in.read(reinterpret_cast<char*>(t.gamma_.data()),
          static_cast<std::streamsize>(t.gamma_.size() * sizeof(double)));
  in.read(reinterpret_cast<char*>(t.theta_.data()),
          static_cast<std::streamsize>(t.theta_.size() * sizeof(std::int32_t)));
  in.read(reinterpret_cast<char*>(t.phi_.data()),
          static_cast<std::streamsize>(t.phi_.size() * sizeof(std::int32_t)));
  if (!in) throw FormatError("memo file truncated");
  return t;
}

}  // namespace anonpsi
