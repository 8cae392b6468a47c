#include "anonpsi/data_model.hpp"

#include <algorithm>
#include <fstream>
#include <random>
#include <sstream>

namespace anonpsi {

bool Dataset::contains(const ElementId& id) const {
  return std::find(elements.begin(), elements.end(), id) != elements.end();
}

std::unordered_set<ElementId> Dataset::id_set() const {
  return {elements.begin(), elements.end()};
}

PayloadSpec PayloadSpec::uniform(long long lo, long long hi) {
  if (lo > hi) throw ArgumentError("uniform payload spec requires lo <= hi");
  if (lo < 0) throw ArgumentError("payloads must be non-negative");
  return {Kind::Uniform, lo, hi};
}

namespace {

std::vector<std::string> split_row(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.push_back("");
  return out;
}

long long parse_payload(const std::string& s, int line_no) {
  std::size_t pos = 0;
  long long v = 0;
  try {
    v = std::stoll(s, &pos);
  } catch (const std::exception&) {
    throw ParseError("line " + std::to_string(line_no) + ": bad payload '" + s + "'");
  }
  if (pos != s.size())
    throw ParseError("line " + std::to_string(line_no) + ": bad payload '" + s + "'");
  if (v < 0)
    throw ParseError("line " + std::to_string(line_no) + ": negative payload");
  return v;
}

std::ifstream open_or_throw(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path);
  return in;
}

// Strips a trailing \r so CRLF files parse cleanly.
bool read_line(std::ifstream& in, std::string& line) {
  if (!std::getline(in, line)) return false;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return true;
}

}  // namespace

Dataset load_attacker_csv(const std::string& path) {
  auto in = open_or_throw(path);
  Dataset d;
  std::unordered_set<ElementId> seen;
  std::string line;
  int line_no = 0;
  bool header_skipped = false;
  while (read_line(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    auto fields = split_row(line);
    if (!header_skipped && fields[0] == "id") {
      header_skipped = true;
      continue;
    }
    header_skipped = true;
    if (fields[0].empty())
      throw ParseError("line " + std::to_string(line_no) + ": empty id");
    if (!seen.insert(fields[0]).second)
      throw ParseError("line " + std::to_string(line_no) + ": duplicate id '" +
                       fields[0] + "'");
    d.elements.push_back(fields[0]);
  }
  if (d.elements.empty()) throw ParseError(path + ": dataset is empty");
  return d;
}

TargetSet load_target_csv(const std::string& path) {
  auto in = open_or_throw(path);
  TargetSet t;
  std::string line;
  int line_no = 0;
  bool header_skipped = false;
  while (read_line(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    auto fields = split_row(line);
    if (!header_skipped && fields[0] == "id") {
      header_skipped = true;
      continue;
    }
    header_skipped = true;
    if (fields[0].empty())
      throw ParseError("line " + std::to_string(line_no) + ": empty id");
    if (t.members.count(fields[0]))
      throw ParseError("line " + std::to_string(line_no) + ": duplicate id '" +
                       fields[0] + "'");
    t.members.insert(fields[0]);
    if (fields.size() > 1 && !fields[1].empty())
      t.payloads[fields[0]] = parse_payload(fields[1], line_no);
  }
  return t;
}

std::unordered_map<ElementId, long long> load_payload_column(
    const std::string& path) {
  auto in = open_or_throw(path);
  std::unordered_map<ElementId, long long> out;
  std::string line;
  int line_no = 0;
  bool header_skipped = false;
  while (read_line(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    auto fields = split_row(line);
    if (!header_skipped && fields[0] == "id") {
      header_skipped = true;
      continue;
    }
    header_skipped = true;
    if (fields.size() < 2 || fields[1].empty())
      throw ParseError("line " + std::to_string(line_no) + ": missing payload");
    if (!out.emplace(fields[0], parse_payload(fields[1], line_no)).second)
      throw ParseError("line " + std::to_string(line_no) + ": duplicate id '" +
                       fields[0] + "'");
  }
  return out;
}

GroundTruth load_truth_csv(const std::string& path, const Dataset& x) {
  auto in = open_or_throw(path);
  GroundTruth truth;
  auto ids = x.id_set();
  std::string line;
  int line_no = 0;
  bool header_skipped = false;
  while (read_line(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    auto fields = split_row(line);
    if (!header_skipped && fields[0] == "id") {
      header_skipped = true;
      continue;
    }
    header_skipped = true;
    if (fields.size() < 2)
      throw ParseError("line " + std::to_string(line_no) + ": expected id,label");
    if (!ids.count(fields[0]))
      throw ParseError("line " + std::to_string(line_no) + ": id '" + fields[0] +
                       "' not in dataset");
    if (fields[1] == "1")
      truth.positives.insert(fields[0]);
    else if (fields[1] == "0")
      truth.negatives.insert(fields[0]);
    else
      throw ParseError("line " + std::to_string(line_no) + ": label must be 0 or 1");
  }
  if (truth.positives.size() + truth.negatives.size() != x.size())
    throw ParseError(path + ": truth does not cover the dataset");
  return truth;
}

void save_attacker_csv(const Dataset& d, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path);
  out << "id\n";
  for (const auto& id : d.elements) out << id << "\n";
}

void save_target_csv(const TargetSet& t, const std::string& path,
                     const std::vector<ElementId>& order) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path);
  out << "id,payload\n";
  auto emit = [&](const ElementId& id) {
    out << id;
    auto it = t.payloads.find(id);
    if (it != t.payloads.end()) out << "," << it->second;
    out << "\n";
  };
  std::unordered_set<ElementId> done;
  for (const auto& id : order)
    if (t.members.count(id) && done.insert(id).second) emit(id);
  for (const auto& id : t.members)
    if (done.insert(id).second) emit(id);
}

void save_truth_csv(const GroundTruth& truth, const Dataset& x,
                    const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path);
  out << "id,label\n";
  for (const auto& id : x.elements)
    out << id << "," << (truth.positives.count(id) ? 1 : 0) << "\n";
}

SyntheticInstance generate_synthetic(int n, int n_positive,
                                     const PayloadSpec& payloads,
                                     std::uint64_t seed) {
  if (n < 1) throw ArgumentError("n must be >= 1");
  if (n_positive < 0 || n_positive > n)
    throw ArgumentError("n_positive must be in [0, n]");
  if (payloads.kind == PayloadSpec::Kind::Uniform && payloads.lo > payloads.hi)
    throw ArgumentError("uniform payload spec requires lo <= hi");

  SyntheticInstance inst;
  inst.attacker.elements.reserve(n);
  for (int i = 0; i < n; ++i)
    inst.attacker.elements.push_back("e" + std::to_string(i));

  std::mt19937_64 rng(seed);
  std::vector<int> order(n);
  for (int i = 0; i < n; ++i) order[i] = i;
  std::shuffle(order.begin(), order.end(), rng);

  for (int i = 0; i < n; ++i) {
    const ElementId& id = inst.attacker.elements[order[i]];
    if (i < n_positive) {
      inst.target.members.insert(id);
      inst.truth.positives.insert(id);
    } else {
      inst.truth.negatives.insert(id);
    }
  }

  if (payloads.kind != PayloadSpec::Kind::None) {
    if (payloads.kind == PayloadSpec::Kind::DistinctPowers && n > 62)
      throw ArgumentError("distinct_powers payloads overflow beyond n = 62");
    std::vector<int> rank(n);
    for (int i = 0; i < n; ++i) rank[i] = i;
    std::shuffle(rank.begin(), rank.end(), rng);
    for (int i = 0; i < n; ++i) {
      long long v = 0;
      if (payloads.kind == PayloadSpec::Kind::Uniform) {
        std::uniform_int_distribution<long long> dist(payloads.lo, payloads.hi);
        v = dist(rng);
      } else {
        v = 1LL << rank[i];  // 2^rank: all subset sums distinct
      }
      const ElementId& id = inst.attacker.elements[i];
      inst.attacker_payloads[id] = v;
      if (inst.target.members.count(id)) inst.target.payloads[id] = v;
    }
  }
  return inst;
}

}  // namespace anonpsi
