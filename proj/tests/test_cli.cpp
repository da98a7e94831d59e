#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "ginibre/cli.hpp"
#include "ginibre/errors.hpp"

using namespace ginibre;
using namespace ginibre::cli;
using nlohmann::json;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run_cli(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / ("ginibre_test_" + name)).string();
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace

TEST_CASE("parse_complex") {
  CHECK(parse_complex("2") == std::complex<double>(2, 0));
  CHECK(parse_complex("0.7+0.3i") == std::complex<double>(0.7, 0.3));
  CHECK(parse_complex("0.7-0.3i") == std::complex<double>(0.7, -0.3));
  CHECK(parse_complex("-1.5e-3+2e+1j") == std::complex<double>(-1.5e-3, 20));
  CHECK(parse_complex("3i") == std::complex<double>(0, 3));
  CHECK(parse_complex("-i") == std::complex<double>(0, -1));
  CHECK(parse_complex(" 1 - i ") == std::complex<double>(1, -1));
  CHECK(parse_complex("1e-5") == std::complex<double>(1e-5, 0));
  for (const char* bad : {"", "abc", "1+", "+", "1+2", "1..2i", "i2"})
    CHECK_THROWS_AS(parse_complex(bad), ValidationError);
}

TEST_CASE("config JSON round trip") {
  RunConfig c;
  c.command = "density";
  c.ensemble = "chiral";
  c.N = 4;
  c.nu = 2;
  c.mu = 0.1 + 0.2;
  c.n = 1.0 / 3.0;
  c.lambda = {0.1, -1.0 / 7.0};
  c.seed = 0xffffffffffffffffULL;
  c.samples = 123456789012LL;
  c.grid = {-1.25, 2.5, 7, -3.0, 3.0, 9};
  c.weight = "identity";
  c.compare_mc = true;
  c.format = "csv";
  CHECK(config_from_json(json::parse(to_json(c).dump())) == c);
  json broken = to_json(c);
  broken.erase("grid");
  CHECK_THROWS_AS(config_from_json(broken), ValidationError);
}

TEST_CASE("kernel examples") {
  const Result a = run_cli({"kernel", "--ensemble", "elliptic", "--N", "1", "--tau", "0", "--lambda",
                            "2", "--gamma", "3"});
  REQUIRE(a.code == kOk);
  const json ja = json::parse(a.out);
  CHECK(ja["schema"] == 1);
  CHECK(ja["result"]["F"]["re"].get<double>() == 7.0);
  CHECK(ja["config"]["command"] == "kernel");

  const Result b = run_cli({"kernel", "--ensemble", "chiral", "--N", "1", "--nu", "0", "--mu", "1",
                            "--n", "2", "--lambda", "1", "--gamma", "1"});
  REQUIRE(b.code == kOk);
  CHECK(json::parse(b.out)["result"]["F"]["re"].get<double>() == doctest::Approx(2.0).epsilon(1e-14));

  const Result k = run_cli({"kernel", "--N", "3", "--tau", "0.4", "--lambda", "1", "--gamma", "1",
                            "--which", "K"});
  const json jk = json::parse(k.out);
  CHECK(jk["result"]["K"]["re"].get<double>() == 0.0);
  CHECK_FALSE(jk["result"].contains("F"));

  const Result parts = run_cli({"kernel", "--lambda-re", "0.7", "--lambda-im", "0.3", "--gamma",
                                "0.7-0.3i", "--format", "csv"});
  CHECK(parts.code == kOk);
  CHECK(parts.out.rfind("# schema=1\n# config=", 0) == 0);
  CHECK(parts.out.find("\"lambda\":[0.7,0.3]") != std::string::npos);
}

TEST_CASE("exit codes") {
  CHECK(run_cli({"kernel", "--N", "0"}).code == kValidation);
  CHECK(run_cli({"kernel", "--tau", "2"}).code == kValidation);
  CHECK(run_cli({"kernel", "--lambda", "oops"}).code == kValidation);
  CHECK(run_cli({"kernel", "--lambda", "1", "--lambda-re", "1"}).code == kValidation);
  CHECK(run_cli({"kernel", "--ensemble", "circular"}).code == kValidation);
  CHECK(run_cli({"frobnicate"}).code == kValidation);
  CHECK(run_cli({}).code == kValidation);
  CHECK(run_cli({"verify", "--samples", "1"}).code == kValidation);
  CHECK(run_cli({"density", "--weight", "nope"}).code == kValidation);
  CHECK(run_cli({"density", "--re-bins", "0"}).code == kValidation);
  CHECK(run_cli({"kernel", "--ensemble", "chiral", "--nu", "1.5"}).code == kValidation);
  // determinant overflow in the Monte-Carlo loop
  const Result overflow = run_cli({"verify", "--N", "2", "--lambda", "1e200", "--gamma", "1e200",
                                   "--samples", "1000"});
  CHECK(overflow.code == kNumerical);
  CHECK(overflow.err.find("numerical error") != std::string::npos);
  const Result strict = run_cli({"verify", "--N", "2", "--tau", "0.4", "--lambda", "0.7+0.3i",
                                 "--gamma", "0.7-0.3i", "--samples", "2000", "--threshold", "1e-12"});
  CHECK(strict.code == kVerificationFailed);
  CHECK(json::parse(strict.out)["result"]["pass"] == false);
  const Result help = run_cli({"--help"});
  CHECK(help.code == kOk);
  CHECK(help.out.find("selftest") != std::string::npos);
  CHECK(help.out.find("inject") == std::string::npos);
}

TEST_CASE("verify examples") {
  const Result e = run_cli({"verify", "--ensemble", "elliptic", "--N", "2", "--tau", "0.4",
                            "--lambda", "0.7+0.3i", "--gamma", "0.7-0.3i", "--samples", "1000000",
                            "--seed", "11"});
  REQUIRE(e.code == kOk);
  const json je = json::parse(e.out)["result"];
  CHECK(je["pass"] == true);
  CHECK(je["samples"] == 1000000);
  for (const char* key : {"closed_form", "mc_mean", "stderr", "z_score"}) CHECK(je.contains(key));

  const Result c = run_cli({"verify", "--ensemble", "chiral", "--N", "2", "--nu", "1", "--mu", "0.5",
                            "--n", "1", "--lambda", "0.9+0.2i", "--gamma", "0.9-0.2i", "--samples",
                            "1000000", "--seed", "12"});
  CHECK(c.code == kOk);
  CHECK(json::parse(c.out)["result"]["pass"] == true);
}

TEST_CASE("density outputs") {
  const Result sym = run_cli({"density", "--tau", "1", "--N", "4"});
  REQUIRE(sym.code == kOk);
  CHECK(sym.err.find("warning") != std::string::npos);
  std::istringstream lines(sym.out);
  std::string line;
  int rows = 0;
  while (std::getline(lines, line)) {
    if (line.empty() || line[0] == '#' || line == "re,im,value") continue;
    ++rows;
    CHECK(line.substr(line.rfind(',') + 1) == "0");
  }
  CHECK(rows == 256);

  const Result cmp = run_cli({"density", "--N", "8", "--compare-mc", "--samples", "20000",
                              "--cell-order", "4", "--min-count", "200", "--format", "json"});
  REQUIRE(cmp.code == kOk);
  const json jc = json::parse(cmp.out);
  CHECK(jc["comparison"]["cells_used"].get<int>() > 20);
  CHECK(jc["comparison"]["max_relative_deviation"].get<double>() < 0.25);
  CHECK(jc["result"]["cells"].size() == 256);
}

TEST_CASE("spectrum rows carry the zero modes") {
  const Result r = run_cli({"spectrum", "--ensemble", "chiral", "--N", "5", "--nu", "3", "--mu",
                            "0.7", "--samples", "20", "--shards", "3"});
  REQUIRE(r.code == kOk);
  std::map<std::string, int> zeros, rows;
  std::istringstream lines(r.out);
  std::string line;
  bool header_seen = false;
  while (std::getline(lines, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (!header_seen) {
      CHECK(line == "sample_index,re,im,class");
      header_seen = true;
      continue;
    }
    const std::string index = line.substr(0, line.find(','));
    ++rows[index];
    zeros[index] += line.back() == 'Z';
  }
  CHECK(rows.size() == 20);
  for (const auto& [index, count] : rows) {
    CHECK(count == 13);
    CHECK(zeros[index] == 3);
  }
}

TEST_CASE("artifacts rerun from their embedded config") {
  for (const std::string format : {"csv", "json"}) {
    const std::string first = temp_path("first." + format);
    const std::string second = temp_path("second." + format);
    const Result a = run_cli({"verify", "--N", "2", "--tau", "0.3", "--lambda", "0.2+0.9i",
                              "--gamma", "0.2-0.9i", "--samples", "5000", "--seed", "9", "--shards",
                              "3", "--format", format, "--out", first});
    REQUIRE(a.code == kOk);
    CHECK(a.out.empty());
    const RunConfig loaded = load_config(first);
    CHECK(loaded.command == "verify");
    CHECK(loaded.shards == 3);
    CHECK(loaded.lambda == std::complex<double>(0.2, 0.9));

    const Result b = run_cli({"verify", "--config", first, "--out", second});
    REQUIRE(b.code == kOk);
    const std::string text_a = slurp(first), text_b = slurp(second);
    // identical apart from the echoed output path
    CHECK(load_config(second).out == second);
    RunConfig reloaded = load_config(second);
    reloaded.out = first;
    CHECK(reloaded == loaded);
    const auto strip = [](std::string s, const std::string& path) {
      const auto pos = s.find(path);
      if (pos != std::string::npos) s.erase(pos, path.size());
      return s;
    };
    CHECK(strip(text_a, first) == strip(text_b, second));
    std::filesystem::remove(first);
    std::filesystem::remove(second);
  }
  const std::string path = temp_path("spectrum.csv");
  REQUIRE(run_cli({"spectrum", "--N", "4", "--samples", "3", "--out", path}).code == kOk);
  CHECK(run_cli({"verify", "--config", path}).code == kValidation);
  CHECK(run_cli({"spectrum", "--config", path, "--N", "5"}).code == kValidation);
  const Result again = run_cli({"spectrum", "--config", path});
  CHECK(again.code == kOk);
  CHECK(again.out.empty());
  std::filesystem::remove(path);
  CHECK(run_cli({"kernel", "--config", temp_path("missing.json")}).code == kValidation);
}

TEST_CASE("repeated runs are identical") {
  const std::vector<std::string> spectrum{"spectrum", "--N", "6", "--tau", "0.2", "--samples", "50",
                                          "--seed", "3", "--shards", "4"};
  CHECK(run_cli(spectrum).out == run_cli(spectrum).out);
  const std::vector<std::string> verify{"verify", "--N", "3", "--lambda", "0.5i", "--gamma", "-0.5i",
                                        "--samples", "20000", "--shards", "2"};
  CHECK(run_cli(verify).out == run_cli(verify).out);
}

TEST_CASE("selftest") {
  const Result a = run_cli({"selftest", "--seed", "5"});
  CHECK(a.code == kOk);
  CHECK(a.out.find("FAIL") == std::string::npos);
  CHECK(a.err.find("timing") != std::string::npos);
  CHECK(run_cli({"selftest", "--seed", "5"}).out == a.out);
  const Result fault = run_cli({"selftest", "--seed", "5", "--inject-fault"});
  CHECK(fault.code == kVerificationFailed);
  CHECK(fault.out.find("FAIL") != std::string::npos);
}
