#pragma once

#include <json.hpp>

#include <cstdint>
#include <string>
#include <vector>

namespace canham {

struct CriterionResult {
  int id = 0;
  int m = 0;             // flagship check: the m it ran for (0 otherwise)
  std::string name;
  bool passed = false;
  std::string summary;   // one-line human-readable measurement
  nlohmann::json metrics;
  double seconds = 0.0;
  double budget_seconds = 0.0;
};

struct AcceptanceOptions {
  std::uint64_t seed = 20240607;  // sample points of the pointwise checks
};

// The acceptance matrix: criteria 1..10; criterion 6 runs once per m in {1, 2, 3, 4}.
struct CriterionKey {
  int id;
  int m;  // 0 unless id == 6
};
std::vector<CriterionKey> acceptance_matrix();
// The quick subset: m <= 2 and a single tau.
std::vector<CriterionKey> quick_matrix();

CriterionResult run_criterion(const CriterionKey& key, const AcceptanceOptions& options = {});

// "PASS [6 m=2] flagship inequality: ... (1.2 s)".
std::string format_result(const CriterionResult& result);
// Wall-clock time is left out so that reruns produce identical JSON.
nlohmann::json to_json(const CriterionResult& result);

}  // namespace canham
