#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <json.hpp>
#include <string>
#include <vector>

#include "sdgp/bigreal.hpp"
#include "sdgp/nystrom.hpp"

namespace sdgp::acceptance {

struct Options {
  Precision precision{};
  GridSpec grid{};
  std::size_t count = 160;
  std::size_t n_target = 2000;
  std::size_t mc_samples = 100000;
  std::size_t path_samples = 20000;
  std::uint64_t seed = 1;
  /// Receives one line per stage (spectra, Monte Carlo runs).
  std::function<void(const std::string&)> progress;
};

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  nlohmann::ordered_json measured = nlohmann::ordered_json::object();
  std::string detail;
};

inline constexpr int kCriterionCount = 10;

/// Evaluates the listed criteria (1-based ids) in order. Spectra are shared
/// between criteria. A criterion that throws is reported as failed with the
/// error message as detail.
std::vector<CriterionResult> run(const Options& options, const std::vector<int>& ids);
std::vector<CriterionResult> run_all(const Options& options);

/// {"criteria": [...], "all_pass": bool}
nlohmann::ordered_json to_json(const std::vector<CriterionResult>& results);

/// "criterion 3 PASS laptev-slope: ..." style summary.
std::string verdict_line(const CriterionResult& r);

}  // namespace sdgp::acceptance
