#include "anonpsi/attack_result.hpp"

#include "json.hpp"

namespace anonpsi {

std::string AttackResult::to_json() const {
  nlohmann::json j;
  j["algo"] = algo;
  j["seed"] = seed;
  j["tau"] = tau;
  j["queries_used"] = queries_used;
  j["z_pos"] = z_pos;
  j["z_neg"] = z_neg;
  auto& t = j["trace"] = nlohmann::json::array();
  for (const auto& e : trace) {
    nlohmann::json je;
    je["size"] = e.query.size();
    je["query"] = e.query;
    je["cardinality"] = e.cardinality;
    if (e.sum) je["sum"] = *e.sum;
    if (e.surviving_combos) je["surviving_combos"] = *e.surviving_combos;
    if (!e.note.empty()) je["note"] = e.note;
    t.push_back(std::move(je));
  }
  return j.dump(2);
}

}  // namespace anonpsi
