// Acceptance runner: prints one PASS/FAIL line per criterion and exits
// nonzero when any of them fails. Without --criterion the whole matrix runs.
#include "canham/acceptance.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

int main(int argc, char** argv) {
  CLI::App app{"Acceptance criteria for the comparison-surface construction"};
  int id = 0;
  int m = 0;
  std::uint64_t seed = canham::AcceptanceOptions{}.seed;
  std::string json_path;
  app.add_option("--criterion", id, "criterion number (1-10); 0 runs all")->check(CLI::Range(0, 10));
  app.add_option("--m", m, "m for criterion 6 (1-4); 0 runs all four")->check(CLI::Range(0, 4));
  app.add_option("--seed", seed, "seed for sampled checks");
  app.add_option("--json", json_path, "also write the results as JSON");
  CLI11_PARSE(app, argc, argv);

  std::vector<canham::CriterionKey> keys;
  for (const auto& k : canham::acceptance_matrix())
    if ((id == 0 || k.id == id) && (k.id != 6 || m == 0 || k.m == m)) keys.push_back(k);

  canham::AcceptanceOptions options;
  options.seed = seed;
  bool all = true;
  nlohmann::json out = nlohmann::json::array();
  for (const auto& k : keys) {
    const canham::CriterionResult r = canham::run_criterion(k, options);
    std::cout << canham::format_result(r) << std::endl;
    all = all && r.passed;
    out.push_back(canham::to_json(r));
  }
  if (!json_path.empty()) std::ofstream(json_path) << out.dump(2) << "\n";
  return all ? 0 : 1;
}
