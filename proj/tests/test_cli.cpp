#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "cli/commands.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const fs::path kData = G2MU_DATA_DIR;

struct Outcome {
  int code;
  std::string out;
  std::string err;
  json report() const { return json::parse(out); }
};

Outcome run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "g2mu");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = g2mu::cli::main_entry(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string config(const std::string& name) { return (kData / (name + ".json")).string(); }

class TempConfig {
 public:
  explicit TempConfig(const json& doc) {
    path_ = fs::temp_directory_path() / ("g2mu_cli_test_" + std::to_string(counter_++) + "_" +
                                         std::to_string(reinterpret_cast<std::uintptr_t>(this)) + ".json");
    std::ofstream(path_) << doc.dump();
  }
  explicit TempConfig(const std::string& raw) {
    path_ = fs::temp_directory_path() / ("g2mu_cli_raw_" + std::to_string(counter_++) + ".json");
    std::ofstream(path_) << raw;
  }
  ~TempConfig() { fs::remove(path_); }
  std::string path() const { return path_.string(); }

 private:
  static inline int counter_ = 0;
  fs::path path_;
};

json diagonal_matrix(std::array<int, 7> d) {
  json m = json::array();
  for (int i = 0; i < 7; ++i) {
    json row = json::array();
    for (int j = 0; j < 7; ++j) row.push_back(i == j ? d[i] : 0);
    m.push_back(row);
  }
  return m;
}

json single_generator(const json& matrix) {
  return {{"name", "test"}, {"generators", json::array({{{"matrix", matrix}}})}};
}

json without_timing(json report) {
  report.erase("wall_time_s");
  return report;
}

// Structural equality with a relative tolerance on floating values.
void expect_close(const json& got, const json& want, const std::string& path = "$") {
  if (want.is_number_float() || got.is_number_float()) {
    ASSERT_TRUE(got.is_number()) << path;
    const double g = got.get<double>(), w = want.get<double>();
    EXPECT_NEAR(g, w, 1e-9 * std::max(1.0, std::abs(w))) << path;
    return;
  }
  ASSERT_EQ(got.type(), want.type()) << path;
  if (want.is_object()) {
    ASSERT_EQ(got.size(), want.size()) << path;
    for (const auto& [key, value] : want.items()) {
      ASSERT_TRUE(got.contains(key)) << path << "." << key;
      expect_close(got.at(key), value, path + "." + key);
    }
  } else if (want.is_array()) {
    ASSERT_EQ(got.size(), want.size()) << path;
    for (std::size_t i = 0; i < want.size(); ++i) expect_close(got[i], want[i], path + "[" + std::to_string(i) + "]");
  } else {
    EXPECT_EQ(got, want) << path;
  }
}

}  // namespace

TEST(Cli, Version) {
  const auto r = run_cli({"--version"});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("0.1.0"), std::string::npos);
}

TEST(Cli, InvariantsOfTheExamples) {
  const std::vector<std::tuple<std::string, std::string, std::string, int>> cases = {
      {"t7", "-8", "-12", 1}, {"m1", "-4", "-8", 2}, {"m2", "-2", "-6", 4}, {"m3", "-1", "-5", 8}};
  for (const auto& [name, mu3, mu4, order] : cases) {
    const auto r = run_cli({"invariants", "--config", config(name)});
    ASSERT_EQ(r.code, 0) << name << r.err;
    const auto rep = r.report();
    EXPECT_EQ(rep["tool"], "g2mu");
    EXPECT_EQ(rep["command"], "invariants");
    EXPECT_TRUE(rep["ok"].get<bool>());
    EXPECT_EQ(rep["result"]["mu3"], mu3) << name;
    EXPECT_EQ(rep["result"]["mu4"], mu4) << name;
    EXPECT_EQ(rep["result"]["group_order"], order) << name;
    EXPECT_LE(rep["result"]["zeta_deviation"].get<double>(), 1e-6);
    EXPECT_GE(rep["wall_time_s"].get<double>(), 0.0);
  }
}

TEST(Cli, InvariantsMatchGoldenReports) {
  for (const std::string name : {"t7", "m1", "m2", "m3"}) {
    std::ifstream in(kData / "golden" / ("invariants_" + name + ".json"));
    ASSERT_TRUE(in) << name;
    const json golden = json::parse(in);
    const auto r = run_cli({"invariants", "--config", config(name)});
    ASSERT_EQ(r.code, 0);
    auto got = without_timing(r.report());
    expect_close(got, golden, name);
  }
}

TEST(Cli, ReportsAreDeterministicApartFromTiming) {
  for (const std::vector<std::string>& args :
       {std::vector<std::string>{"identities", "--config", config("m2"), "--trials", "1", "--seed", "7"},
        std::vector<std::string>{"spectrum", "--config", config("m3"), "--radius-sq", "2"},
        std::vector<std::string>{"zeta", "--config", config("m1")}}) {
    const auto a = run_cli(args), b = run_cli(args);
    ASSERT_EQ(a.code, 0) << a.err;
    EXPECT_EQ(without_timing(a.report()), without_timing(b.report())) << args[0];
  }
}

TEST(Cli, SeedChangesTrialsButNotTheVerdict) {
  const auto a = run_cli({"identities", "--config", config("t7"), "--trials", "2", "--seed", "1"});
  const auto b = run_cli({"identities", "--config", config("t7"), "--trials", "2", "--seed", "2"});
  ASSERT_EQ(a.code, 0);
  ASSERT_EQ(b.code, 0);
  EXPECT_EQ(a.report()["result"]["seed"], 1);
  EXPECT_EQ(b.report()["result"]["seed"], 2);
  EXPECT_TRUE(a.report()["ok"].get<bool>());
  EXPECT_TRUE(b.report()["ok"].get<bool>());
}

TEST(Cli, IdentitiesStrictTypes) {
  const auto r = run_cli({"identities", "--config", config("m1"), "--trials", "3", "--strict-types"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto res = r.report()["result"];
  EXPECT_TRUE(res["strict_types"].get<bool>());
  EXPECT_EQ(res["tolerance"].get<double>(), 1e-9);
  for (const auto& row : res["identities"]) EXPECT_LE(row["max_residual"].get<double>(), 1e-9) << row["identity"];
}

TEST(Cli, SpectrumOfTheTorusAtRadiusOne) {
  const auto r = run_cli({"spectrum", "--config", config("t7"), "--radius-sq", "1"});
  ASSERT_EQ(r.code, 0);
  const auto records = r.report()["result"]["records"];
  ASSERT_EQ(records.size(), 2u);
  EXPECT_EQ(records[0]["kind"], "H");
  EXPECT_EQ(records[0]["dim_bruteforce"], 112);
  EXPECT_EQ(records[1]["kind"], "H'");
  EXPECT_EQ(records[1]["dim_formula"], 168);
  EXPECT_EQ(r.report()["result"]["mismatches"], 0);
}

TEST(Cli, SpectrumAtRadiusZeroIsEmpty) {
  const auto r = run_cli({"spectrum", "--config", config("m3"), "--radius-sq", "0"});
  ASSERT_EQ(r.code, 0);
  EXPECT_TRUE(r.report()["result"]["records"].empty());
  EXPECT_TRUE(r.report()["ok"].get<bool>());
}

TEST(Cli, EmptyGeneratorListIsTheTorus) {
  TempConfig c(json{{"name", "bare"}, {"generators", json::array()}});
  const auto r = run_cli({"invariants", "--config", c.path()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.report()["result"]["group_order"], 1);
  EXPECT_EQ(r.report()["result"]["mu3"], "-8");
}

TEST(Cli, ZetaValuesAreMinusOne) {
  const auto r = run_cli({"zeta", "--config", config("m3")});
  ASSERT_EQ(r.code, 0);
  const auto res = r.report()["result"];
  ASSERT_EQ(res["terms"].size(), 8u);
  for (const auto& t : res["terms"]) EXPECT_NEAR(t["value_at_zero"].get<double>(), -1.0, 1e-6);
  EXPECT_NEAR(res["mu3"].get<double>(), -1.0, 1e-6);
  EXPECT_NEAR(res["mu4"].get<double>(), -5.0, 1e-6);
}

TEST(Cli, CsvOutput) {
  const auto r = run_cli({"invariants", "--config", config("m1"), "--output", "csv"});
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(r.out.substr(0, r.out.find('\n')), "quantity,exact,decimal");
  EXPECT_NE(r.out.find("mu3,-4,-4"), std::string::npos);
  EXPECT_EQ(r.out.find("wall_time"), std::string::npos);
  const auto s = run_cli({"spectrum", "--config", config("m1"), "--radius-sq", "1", "--output", "csv"});
  ASSERT_EQ(s.code, 0);
  EXPECT_EQ(std::count(s.out.begin(), s.out.end(), '\n'), 3);
}

TEST(Cli, CheckReportsEveryElement) {
  const auto r = run_cli({"check", "--config", config("m3")});
  ASSERT_EQ(r.code, 0);
  const auto elements = r.report()["result"]["elements"];
  ASSERT_EQ(elements.size(), 8u);
  for (const auto& e : elements) EXPECT_TRUE(e["g2_compatible"].get<bool>());
}

TEST(Cli, NonG2ElementExitsOneAndNamesIt) {
  // Flips θ¹²³, so it is not in G2.
  TempConfig c(single_generator(diagonal_matrix({-1, 1, 1, 1, 1, 1, -1})));
  const auto r = run_cli({"check", "--config", c.path()});
  EXPECT_EQ(r.code, 1);
  const auto rep = r.report();
  EXPECT_FALSE(rep["ok"].get<bool>());
  EXPECT_EQ(rep["error"]["type"], "NotG2Compatible");
  EXPECT_EQ(rep["error"]["element"], 1);
  EXPECT_FALSE(rep["result"]["elements"][1]["g2_compatible"].get<bool>());

  const auto inv = run_cli({"invariants", "--config", c.path()});
  EXPECT_EQ(inv.code, 1);
  EXPECT_NE(inv.err.find("NotG2Compatible"), std::string::npos);
}

TEST(Cli, NonUnimodularExitsOne) {
  TempConfig c(single_generator(diagonal_matrix({1, 1, 1, 1, 1, 1, -1})));
  const auto r = run_cli({"invariants", "--config", c.path()});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("NonUnimodular"), std::string::npos);
  EXPECT_NE(r.err.find("generators[0]"), std::string::npos);
}

TEST(Cli, InfiniteGroupExitsOne) {
  auto m = diagonal_matrix({1, 1, 1, 1, 1, 1, 1});
  m[0][1] = 1;
  TempConfig c(single_generator(m));
  const auto r = run_cli({"invariants", "--config", c.path()});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("NonFinite"), std::string::npos);
}

TEST(Cli, InputErrorsExitTwo) {
  auto unknown = single_generator(diagonal_matrix({1, 1, 1, -1, -1, -1, -1}));
  unknown["colour"] = "blue";
  TempConfig a(unknown);
  EXPECT_EQ(run_cli({"invariants", "--config", a.path()}).code, 2);

  auto fractional = single_generator(diagonal_matrix({1, 1, 1, -1, -1, -1, -1}));
  fractional["generators"][0]["matrix"][0][0] = "1/2";
  TempConfig b(fractional);
  EXPECT_EQ(run_cli({"invariants", "--config", b.path()}).code, 2);

  auto short_rows = single_generator(json::array({json::array({1, 0})}));
  TempConfig c(short_rows);
  EXPECT_EQ(run_cli({"invariants", "--config", c.path()}).code, 2);

  TempConfig d(std::string("{ not json"));
  EXPECT_EQ(run_cli({"invariants", "--config", d.path()}).code, 2);

  auto singular = json{{"name", "x"}, {"generators", json::array()}, {"frame", diagonal_matrix({1, 1, 1, 1, 1, 1, 0})}};
  TempConfig e(singular);
  EXPECT_EQ(run_cli({"invariants", "--config", e.path()}).code, 2);

  auto bad_translation = single_generator(diagonal_matrix({1, 1, 1, -1, -1, -1, -1}));
  bad_translation["generators"][0]["translation"] = json::array({0, 0, 0, 0, 0, 0, "1/0"});
  TempConfig f(bad_translation);
  EXPECT_EQ(run_cli({"invariants", "--config", f.path()}).code, 2);

  EXPECT_EQ(run_cli({"invariants", "--config", "/nonexistent/config.json"}).code, 2);
  EXPECT_EQ(run_cli({"invariants", "--config", config("m1"), "--output", "xml"}).code, 2);
  EXPECT_EQ(run_cli({"invariants"}).code, 2);
  EXPECT_EQ(run_cli({}).code, 2);
  EXPECT_EQ(run_cli({"frobnicate", "--config", config("m1")}).code, 2);
  EXPECT_EQ(run_cli({"spectrum", "--config", config("m1"), "--radius-sq", "abc"}).code, 2);
  EXPECT_EQ(run_cli({"invariants", "--config", config("m1"), "--radius-sq", "1"}).code, 2);
}

TEST(Cli, ErrorsGoToStderrWithTheirType) {
  const auto r = run_cli({"invariants", "--config", "/nonexistent/config.json"});
  EXPECT_EQ(r.err.rfind("error: InputError: ", 0), 0u) << r.err;
}

TEST(Cli, ExecutableExitCodes) {
  const std::string exe = G2MU_EXECUTABLE;
  const auto status = [&](const std::string& args) {
    const int raw = std::system((exe + " " + args + " > /dev/null 2>&1").c_str());
    return WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  };
  EXPECT_EQ(status("invariants --config " + config("m2")), 0);
  EXPECT_EQ(status("invariants --config /nonexistent.json"), 2);
  TempConfig c(single_generator(diagonal_matrix({-1, 1, 1, 1, 1, 1, -1})));
  EXPECT_EQ(status("check --config " + c.path()), 1);
}
