// Runs the acceptance criteria at full scale and prints one verdict line per
// criterion. Optional arguments select criteria by number.

#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include "acceptance.hpp"
#include "sdgp/io.hpp"

int main(int argc, char** argv) {
  using namespace sdgp::acceptance;
  std::vector<int> ids;
  for (int i = 1; i < argc; ++i) ids.push_back(std::atoi(argv[i]));
  if (ids.empty()) {
    for (int i = 1; i <= kCriterionCount; ++i) ids.push_back(i);
  }
  Options o;
  o.progress = [](const std::string& line) { std::cerr << "  .. " << line << std::endl; };
  const std::vector<CriterionResult> results = run(o, ids);
  bool all = true;
  for (const auto& r : results) {
    std::cout << verdict_line(r) << '\n';
    all = all && r.pass;
  }
  const char* report = std::getenv("SDGP_ACCEPTANCE_REPORT");
  if (report != nullptr) sdgp::write_text_file(report, to_json(results).dump(2) + "\n");
  std::cout << (all ? "all criteria passed" : "some criteria failed") << std::endl;
  return all ? 0 : 1;
}
