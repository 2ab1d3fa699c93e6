#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "cli.hpp"

namespace fs = std::filesystem;
using pmsched::cli::run;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result call(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("pmsched_cli_" + std::to_string(std::random_device{}()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string operator/(const std::string& name) const { return (path / name).string(); }
};

std::size_t count_lines(const std::string& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("usage errors exit 1") {
    CHECK(call({}).code == 1);
    const Result r = call({"solve"});
    CHECK(r.code == 1);
    CHECK(r.err.find("--instance") != std::string::npos);
    CHECK(call({"bogus"}).code == 1);
    CHECK(call({"generate", "--jobs", "abc"}).code == 1);
  }

  TEST_CASE("help lists every flag with its default") {
    const Result r = call({"solve", "--help"});
    CHECK(r.code == 0);
    for (const char* flag : {"--instance", "--algorithm", "--rule", "--k1", "--k2", "--k3", "--machine-policy", "--seed",
                             "--structure", "--cooling", "--max-iters", "--trace", "--out"}) {
      CHECK_MESSAGE(r.out.find(flag) != std::string::npos, flag);
    }
    CHECK(r.out.find("atcoee") != std::string::npos);
    CHECK(r.out.find("0.95") != std::string::npos);
    CHECK(r.out.find("15000") != std::string::npos);
    CHECK(r.out.find("op_pa") != std::string::npos);
    const Result e = call({"experiment", "--help"});
    CHECK(e.out.find("--parallel") != std::string::npos);
    CHECK(e.out.find("--master-seed") != std::string::npos);
  }

  TEST_CASE("generate, solve and validate") {
    TempDir dir;
    const std::string inst = dir / "i.json", sched = dir / "s.json", trace = dir / "t.csv";
    REQUIRE(call({"generate", "--jobs", "20", "--unchecked", "--seed", "3", "--out", inst}).code == 0);
    CHECK(call({"generate", "--jobs", "20", "--seed", "3", "--out", dir / "x.json"}).code == 1);

    const Result s = call({"solve", "--instance", inst, "--out", sched});
    REQUIRE(s.code == 0);
    CHECK(s.out.find("total_tardiness=") != std::string::npos);
    const Result v = call({"validate", "--instance", inst, "--schedule", sched});
    CHECK(v.code == 0);
    CHECK(v.out.find("feasible") != std::string::npos);

    const std::string first = slurp(sched);
    REQUIRE(call({"solve", "--instance", inst, "--out", sched}).code == 0);
    CHECK(slurp(sched) == first);

    const Result sa = call({"solve", "--instance", inst, "--algorithm", "sa", "--max-iters", "500", "--seed", "4",
                            "--out", sched, "--trace", trace});
    REQUIRE(sa.code == 0);
    CHECK(sa.out.find("sa_stop=") != std::string::npos);
    CHECK(slurp(trace).rfind("iteration,temperature,current,best\n", 0) == 0);
    CHECK(call({"validate", "--instance", inst, "--schedule", sched}).code == 0);

    // tamper with the schedule: validation fails with exit 2
    std::string text = slurp(sched);
    const auto pos = text.find("\"start\": ");
    REQUIRE(pos != std::string::npos);
    text.insert(pos + 9, "1");
    std::ofstream(sched) << text;
    CHECK(call({"validate", "--instance", inst, "--schedule", sched}).code == 2);

    CHECK(call({"solve", "--instance", dir / "missing.json"}).code == 2);
    CHECK(call({"solve", "--instance", inst, "--rule", "fifo"}).code == 1);
  }

  TEST_CASE("malformed instance names the field") {
    TempDir dir;
    std::ofstream(dir / "bad.json") << R"({"machines": [1], "column_types": [], "operator_windows": [], "jobs": [{"id": 1}]})";
    const Result r = call({"solve", "--instance", dir / "bad.json"});
    CHECK(r.code == 2);
    CHECK(r.err.find("jobs[0]") != std::string::npos);
  }

  TEST_CASE("experiment and report") {
    TempDir dir;
    const std::string csv = dir / "e.csv";
    const std::vector<std::string> args{"experiment", "--cells", "16", "--seeds", "2", "--algorithms", "atcoee,op_pa_sa",
                                        "--omit-runtime", "--out", csv};
    REQUIRE(call(args).code == 0);
    const std::string first = slurp(csv);
    CHECK(count_lines(first) == 1 + 64);
    REQUIRE(call(args).code == 0);
    CHECK(slurp(csv) == first);
    auto parallel = args;
    parallel.insert(parallel.end(), {"--parallel", "3"});
    REQUIRE(call(parallel).code == 0);
    CHECK(slurp(csv) == first);

    const Result rep = call({"report", "--input", csv, "--out", dir / "r.csv"});
    CHECK(rep.code == 0);
    CHECK(rep.out.find("algorithm") != std::string::npos);
    CHECK(slurp(dir / "r.csv").rfind("section,", 0) == 0);

    CHECK(call({"experiment", "--cells", "0"}).code == 1);
    CHECK(call({"experiment", "--algorithms", "nope"}).code == 1);
  }
}
