#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "cli.hpp"

using sdgp::cli::run;
namespace fs = std::filesystem;

namespace {

struct Captured {
  int code = 0;
  std::string out;
  std::string err;
};

Captured call(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  Captured c;
  c.code = run(args, out, err);
  c.out = out.str();
  c.err = err.str();
  return c;
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "sdgp-cli-test";
  fs::create_directories(dir);
  return dir / name;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("constants") {
    const Captured c = call({"constants", "--alpha", "1", "--beta", "0"});
    REQUIRE(c.code == sdgp::cli::kOk);
    const auto j = nlohmann::json::parse(c.out);
    CHECK(j["kappa_l2"].get<double>() == doctest::Approx(0.033773).epsilon(1e-5));
    CHECK(j["d_l2"].get<double>() == doctest::Approx(std::cbrt(3 * M_PI * M_PI * std::log(2.0))));
    CHECK(j["sup_valid"].get<bool>());
    CHECK(j["lambda"].get<double>() == doctest::Approx(0.5));
  }

  TEST_CASE("validation errors exit with 1") {
    CHECK(call({"constants", "--alpha", "0.5", "--beta", "0.5"}).code == sdgp::cli::kValidation);
    CHECK(call({"constants", "--alpha", "x"}).code == sdgp::cli::kValidation);
    CHECK(call({"no-such-command"}).code == sdgp::cli::kValidation);
    CHECK(call({}).code == sdgp::cli::kValidation);
    const Captured bad_eps = call({"smallball-s", "--epsilon", "-1", "--samples", "1000"});
    CHECK(bad_eps.code == sdgp::cli::kValidation);
    CHECK(bad_eps.err.find("error:") != std::string::npos);
  }

  TEST_CASE("config files") {
    const fs::path cfg = scratch("constants.json");
    std::ofstream(cfg) << R"({"command": "constants", "alpha": 2, "beta": 0.5})";
    const Captured ok = call({"--config", cfg.string()});
    REQUIRE(ok.code == 0);
    CHECK(nlohmann::json::parse(ok.out)["H"].get<double>() == doctest::Approx(1.0));

    // flags override the file
    const Captured over = call({"--config", cfg.string(), "constants", "--beta", "0"});
    REQUIRE(over.code == 0);
    CHECK(nlohmann::json::parse(over.out)["H"].get<double>() == doctest::Approx(1.5));

    const fs::path unknown = scratch("unknown.json");
    std::ofstream(unknown) << R"({"command": "constants", "alpha": 1, "betta": 0})";
    CHECK(call({"--config", unknown.string()}).code == sdgp::cli::kValidation);

    const fs::path garbled = scratch("garbled.json");
    std::ofstream(garbled) << R"({"command": "constants", "alpha": )";
    CHECK(call({"--config", garbled.string()}).code == sdgp::cli::kValidation);
  }

  TEST_CASE("i/o errors exit with 3") {
    CHECK(call({"--config", "/nonexistent/dir/cfg.json"}).code == sdgp::cli::kIo);
    CHECK(call({"constants", "-o", "/nonexistent/dir/out.json"}).code == sdgp::cli::kIo);
  }

  TEST_CASE("artifacts and summaries are routed separately") {
    const fs::path path = scratch("s.csv");
    const std::vector<std::string> args{"smallball-s", "--epsilon", "0.3,0.5", "--samples",
                                        "2000",       "--points",  "40",      "--seed",
                                        "4",          "-o",        path.string()};
    const Captured c = call(args);
    REQUIRE(c.code == 0);
    const std::string csv = slurp(path);
    CHECK(csv.rfind("#schema=sdgp.v1\nepsilon,minus_log_p,method,std_error,seed,n_samples\n", 0) == 0);
    // the summary is JSON on stdout when an output file is given
    CHECK_NOTHROW((void)nlohmann::json::parse(c.out));

    // identical bytes for identical seeds, regardless of the thread cap
    std::vector<std::string> threaded{"--threads", "3"};
    threaded.insert(threaded.end(), args.begin(), args.end());
    const fs::path again = scratch("s2.csv");
    threaded.back() = again.string();
    REQUIRE(call(threaded).code == 0);
    CHECK(slurp(again) == csv);

    const Captured inline_run = call(std::vector<std::string>(args.begin(), args.end() - 2));
    REQUIRE(inline_run.code == 0);
    CHECK(inline_run.out == csv);
  }

  TEST_CASE("simulate with the integral generator") {
    const fs::path path = scratch("paths.bin");
    const Captured c = call({"simulate", "--generator", "integral", "--times", "0.25,0.5,1",
                             "--samples", "1000", "--format", "binary", "-o", path.string()});
    REQUIRE(c.code == 0);
    const std::string bytes = slurp(path);
    CHECK(bytes.substr(0, 4) == "SDGP");
    CHECK(bytes.size() == 14 + 8 * (3 + 3000));
  }
}
