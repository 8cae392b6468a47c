#include <cstdio>
#include <fstream>
#include <set>

#include "anonpsi/data_model.hpp"
#include "doctest.h"

using namespace anonpsi;

namespace {

struct TempFile {
  std::string path;
  explicit TempFile(const std::string& name) : path("tmp_dm_" + name) {}
  ~TempFile() { std::remove(path.c_str()); }
  void write(const std::string& content) {
    std::ofstream out(path);
    out << content;
  }
};

}  // namespace

TEST_CASE("synthetic instance partitions X exactly") {
  auto inst = generate_synthetic(20, 7, PayloadSpec::none(), 42);
  CHECK(inst.attacker.size() == 20);
  CHECK(inst.truth.positives.size() == 7);
  CHECK(inst.truth.negatives.size() == 13);
  CHECK(inst.target.members == inst.truth.positives);
  for (const auto& id : inst.attacker.elements)
    CHECK((inst.truth.positives.count(id) + inst.truth.negatives.count(id)) == 1);
  CHECK(inst.attacker_payloads.empty());
}

TEST_CASE("synthetic generation is deterministic in the seed") {
  auto a = generate_synthetic(30, 11, PayloadSpec::uniform(1, 50), 7);
  auto b = generate_synthetic(30, 11, PayloadSpec::uniform(1, 50), 7);
  auto c = generate_synthetic(30, 11, PayloadSpec::uniform(1, 50), 8);
  CHECK(a.truth.positives == b.truth.positives);
  CHECK(a.attacker_payloads == b.attacker_payloads);
  CHECK(a.truth.positives != c.truth.positives);
}

TEST_CASE("distinct powers give unique payloads covering 2^0..2^(n-1)") {
  auto inst = generate_synthetic(12, 5, PayloadSpec::distinct_powers(), 3);
  REQUIRE(inst.attacker_payloads.size() == 12);
  std::set<long long> values;
  for (const auto& [id, v] : inst.attacker_payloads) values.insert(v);
  CHECK(values.size() == 12);
  CHECK(*values.begin() == 1);
  CHECK(*values.rbegin() == (1LL << 11));
  // target payloads are exactly the restriction to members
  CHECK(inst.target.payloads.size() == inst.target.members.size());
  for (const auto& [id, v] : inst.target.payloads)
    CHECK(inst.attacker_payloads.at(id) == v);
}

TEST_CASE("synthetic argument validation") {
  CHECK_THROWS_AS(generate_synthetic(0, 0, PayloadSpec::none(), 1),
                  ArgumentError);
  CHECK_THROWS_AS(generate_synthetic(5, 6, PayloadSpec::none(), 1),
                  ArgumentError);
  CHECK_THROWS_AS(generate_synthetic(63, 5, PayloadSpec::distinct_powers(), 1),
                  ArgumentError);
  CHECK_THROWS_AS(PayloadSpec::uniform(5, 2), ArgumentError);
  CHECK_NOTHROW(generate_synthetic(62, 5, PayloadSpec::distinct_powers(), 1));
}

TEST_CASE("attacker CSV round trip") {
  auto inst = generate_synthetic(9, 4, PayloadSpec::none(), 11);
  TempFile f("attacker.csv");
  save_attacker_csv(inst.attacker, f.path);
  auto loaded = load_attacker_csv(f.path);
  CHECK(loaded.elements == inst.attacker.elements);
}

TEST_CASE("target CSV round trip keeps payloads") {
  auto inst = generate_synthetic(10, 4, PayloadSpec::uniform(1, 9), 5);
  TempFile f("target.csv");
  save_target_csv(inst.target, f.path, inst.attacker.elements);
  auto loaded = load_target_csv(f.path);
  CHECK(loaded.members == inst.target.members);
  CHECK(loaded.payloads == inst.target.payloads);
}

TEST_CASE("truth CSV round trip") {
  auto inst = generate_synthetic(10, 3, PayloadSpec::none(), 2);
  TempFile f("truth.csv");
  save_truth_csv(inst.truth, inst.attacker, f.path);
  auto loaded = load_truth_csv(f.path, inst.attacker);
  CHECK(loaded.positives == inst.truth.positives);
  CHECK(loaded.negatives == inst.truth.negatives);
}

TEST_CASE("payload column loader") {
  TempFile f("payloads.csv");
  f.write("id,payload\na,5\nb,12\n");
  auto m = load_payload_column(f.path);
  CHECK(m.size() == 2);
  CHECK(m.at("a") == 5);
  CHECK(m.at("b") == 12);
}

TEST_CASE("CSV parse errors") {
  TempFile f("bad.csv");

  SUBCASE("missing file") {
    CHECK_THROWS_AS(load_attacker_csv("does_not_exist.csv"), ParseError);
  }
  SUBCASE("duplicate id") {
    f.write("id\nx\nx\n");
    CHECK_THROWS_AS(load_attacker_csv(f.path), ParseError);
  }
  SUBCASE("bad label") {
    f.write("id,label\ne0,2\n");
    Dataset x{{"e0"}};
    CHECK_THROWS_AS(load_truth_csv(f.path, x), ParseError);
  }
  SUBCASE("truth must cover the dataset") {
    f.write("id,label\ne0,1\n");
    Dataset x{{"e0", "e1"}};
    CHECK_THROWS_AS(load_truth_csv(f.path, x), ParseError);
  }
  SUBCASE("truth id outside the dataset") {
    f.write("id,label\nzz,1\n");
    Dataset x{{"e0"}};
    CHECK_THROWS_AS(load_truth_csv(f.path, x), ParseError);
  }
  SUBCASE("negative payload") {
    f.write("id,payload\na,-3\n");
    CHECK_THROWS_AS(load_payload_column(f.path), ParseError);
  }
  SUBCASE("missing payload column") {
    f.write("id\na\n");
    CHECK_THROWS_AS(load_payload_column(f.path), ParseError);
  }
}
