#include <doctest.h>

#include <atomic>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "cli_commands.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Run {
  int code;
  std::string out, err;
};

Run cli(std::vector<std::string> args, const std::string& input = {}) {
  args.insert(args.begin(), "prefel");
  std::istringstream in(input);
  std::ostringstream out, err;
  const int code = prefel::cli::run(args, in, out, err);
  return {code, out.str(), err.str()};
}

struct TempDir {
  fs::path path;
  TempDir() {
    static std::atomic<int> counter{0};
    path = fs::temp_directory_path() / ("prefel_cli_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string operator/(const std::string& name) const { return (path / name).string(); }
};

std::string slurp(const std::string& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

void write(const std::string& p, const std::string& text) { std::ofstream(p) << text; }

}  // namespace

TEST_CASE("list parsing") {
  using prefel::cli::parse_list;
  CHECK(parse_list("10,20,30") == std::vector<double>{10, 20, 30});
  CHECK(parse_list(" 1, 2 ,...,5") == std::vector<double>{1, 2, 3, 4, 5});
  CHECK(parse_list("0.25,0.5,...,1") == std::vector<double>{0.25, 0.5, 0.75, 1.0});
  const auto g = parse_list("0.001,0.2,...,1");
  CHECK(g.front() == 0.001);
  CHECK(g.back() == 1.0);
  CHECK(std::is_sorted(g.begin(), g.end()));
  CHECK_THROWS_AS(parse_list(""), std::invalid_argument);
  CHECK_THROWS_AS(parse_list("1,x"), std::invalid_argument);
  CHECK_THROWS_AS(parse_list("1,...,3"), std::invalid_argument);
  CHECK_THROWS_AS(parse_list("2,1,...,3"), std::invalid_argument);
}

TEST_CASE("validation errors exit with code 2") {
  TempDir t;
  CHECK(cli({}).code == 2);
  CHECK(cli({"bogus"}).code == 2);
  CHECK(cli({"elicit", "--M", "-1"}).code == 2);
  CHECK(cli({"elicit", "--utility", "nope", "--M", "1"}).code == 2);
  CHECK(cli({"elicit", "--range", "1"}).code == 2);
  CHECK(cli({"elicit", "--p-bounds", "0,0.5"}).code == 2);
  CHECK(cli({"elicit", "--M", "three"}).code == 2);
  CHECK(cli({"pro", "--session", t / "missing.json", "--returns", t / "r.csv"}).code == 2);
  CHECK(cli({"metrics", "--session", t / "missing.json"}).code == 2);
  write(t / "bad.json", "{not json");
  CHECK(cli({"metrics", "--session", t / "bad.json"}).code == 2);
  const Run r = cli({"elicit", "--M", "-1"});
  CHECK(r.err.find("error") != std::string::npos);
}

TEST_CASE("elicit: writes a session, continues it, and M = 0 leaves the file alone") {
  TempDir t;
  const std::string f = t / "s.json";
  Run r = cli({"elicit", "--utility", "exp10", "--M", "6", "--seed", "7", "--out", f, "--every", "3"});
  REQUIRE(r.code == 0);
  CHECK(r.out.find("d_AC") != std::string::npos);
  const json doc = json::parse(slurp(f));
  CHECK(doc["seed"] == 7);

  const std::string before = slurp(f);
  r = cli({"elicit", "--in", f, "--out", f, "--M", "0"});
  REQUIRE(r.code == 0);
  CHECK(slurp(f) == before);

  r = cli({"elicit", "--in", f, "--out", f, "--M", "2", "--quiet"});
  REQUIRE(r.code == 0);
  CHECK(r.out.empty());
  int answers = 0;
  const json events = json::parse(slurp(f))["events"];
  for (const json& e : events) answers += e["event"] == "answer_recorded";
  CHECK(answers == 8);

  r = cli({"metrics", "--session", f});
  REQUIRE(r.code == 0);
  CHECK(r.out.find("u_lo") != std::string::npos);
  r = cli({"metrics", "--session", f, "--json"});
  REQUIRE(r.code == 0);
  CHECK(json::parse(r.out)["history"].size() == 8);
}

TEST_CASE("elicit: interactive answers from stdin") {
  TempDir t;
  const std::string f = t / "i.json";
  const Run r = cli({"elicit", "--interactive", "--M", "2", "--range", "0,1", "--out", f}, "x\nA\nB\n");
  REQUIRE(r.code == 0);
  CHECK(r.out.find("Please answer A or B") != std::string::npos);
  const json doc = json::parse(slurp(f));
  CHECK(doc["events"].size() == 5);
  CHECK(cli({"elicit", "--interactive", "--M", "1", "--range", "0,1"}, "").code == 2);
}

TEST_CASE("pro: full budget equals the unreduced scheme") {
  TempDir t;
  const std::string f = t / "s.json";
  REQUIRE(cli({"elicit", "--M", "12", "--out", f, "--quiet"}).code == 0);
  const int n = static_cast<int>(json::parse(cli({"metrics", "--session", f, "--json"}).out)["band"].size());
  const std::string csv = t / "r.csv";
  write(csv, "AAA,BBB,CCC\n-0.2,0.3,0.05\n0.1,0.0,-0.3\n0.25,-0.1,0.2\n-0.05,0.15,0.1\n");

  auto value = [&](const std::string& scheme, const std::string& param) {
    const Run r = cli({"pro", "--session", f, "--returns", csv, "--scheme", scheme, "--param", param, "--json"});
    REQUIRE(r.code == 0);
    return json::parse(r.out)["value"].get<double>();
  };
  const double none = value("none", "0");
  CHECK(std::abs(value("budget", std::to_string(n - 1)) - none) <= 1e-7);
  CHECK(value("budget", "0") >= none - 1e-9);
  CHECK(value("gamma", "0.5") >= none - 1e-9);
  CHECK(std::abs(value("classic", "0") - none) <= 1e-7);

  const Run text = cli({"pro", "--session", f, "--returns", csv});
  REQUIRE(text.code == 0);
  CHECK(text.out.rfind("value ", 0) == 0);
  CHECK(cli({"pro", "--session", f, "--returns", csv, "--scheme", "budget", "--param", std::to_string(n)}).code == 2);
  CHECK(cli({"pro", "--session", f, "--returns", csv, "--scheme", "gamma", "--param", "0"}).code == 2);
  write(t / "wide.csv", "AAA\n0.9\n");
  CHECK(cli({"pro", "--session", f, "--returns", t / "wide.csv"}).code == 2);
}

TEST_CASE("sweep: CSV layout") {
  TempDir t;
  const std::string out = t / "curves.csv";
  const Run r = cli({"sweep", "--grid-M", "0,3", "--grid-gamma", "0.5,1", "--out", out, "--jobs", "1"});
  REQUIRE(r.code == 0);
  std::istringstream lines(slurp(out));
  std::string header;
  std::getline(lines, header);
  CHECK(header == "M,scheme,param,value,z_A1,z_A2");
  int rows = 0;
  double prev_value = INFINITY;
  for (std::string line; std::getline(lines, line);) {
    ++rows;
    std::istringstream ls(line);
    std::string m, scheme, param, value;
    std::getline(ls, m, ',');
    std::getline(ls, scheme, ',');
    std::getline(ls, param, ',');
    std::getline(ls, value, ',');
    CHECK(scheme == "gamma");
    // Within one M the value falls as gamma grows.
    if (param == "1") CHECK(std::stod(value) <= prev_value + 1e-7);
    prev_value = std::stod(value);
  }
  CHECK(rows == 4);
  CHECK(cli({"sweep", "--grid-M", "1.5"}).code == 2);
}
