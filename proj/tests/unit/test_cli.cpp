#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

namespace fs = std::filesystem;

namespace {

int run(const std::string& args) {
  const std::string cmd = std::string(CAVITY_SCATTER_EXE) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int lines(const fs::path& p) {
  const std::string s = slurp(p);
  return int(std::count(s.begin(), s.end(), '\n'));
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("cavity_cli_" + name);
  fs::remove_all(p);
  return p;
}

}  // namespace

TEST_CASE("preset commands") {
  CHECK(run("preset list") == 0);
  CHECK(run("preset emit example1_lossy") == 0);
  CHECK(run("preset emit nope") == 2);
}

TEST_CASE("usage and validation errors exit with 2") {
  CHECK(run("run --preset nope") == 2);
  CHECK(run("run") == 2);
  CHECK(run("run --preset example1_empty --tau 1.5") == 2);
  CHECK(run("bogus") == 2);
  CHECK(run("sweep --preset example1_empty --angles 10:5:5") == 2);
  CHECK(run("compare --preset example1_empty --angles 0:5:0 --polarization TE") == 2);
  CHECK(run("run --scenario /nonexistent.json") == 2);
}

TEST_CASE("numerical failures exit with 3") {
  // At kappa0 = 1e-3 no admissible layer reaches the PML error cap.
  const fs::path dir = scratch("lowfreq");
  fs::create_directories(dir);
  REQUIRE(std::system((std::string(CAVITY_SCATTER_EXE) + " preset emit example1_empty > " + (dir / "a.json").string()).c_str()) == 0);
  std::string doc = slurp(dir / "a.json");
  const auto pos = doc.find("\"kappa0\":");
  REQUIRE(pos != std::string::npos);
  const auto end = doc.find(',', pos);
  doc.replace(pos, end - pos, "\"kappa0\": 0.001");
  std::ofstream(dir / "b.json") << doc;
  CHECK(run("run --scenario " + (dir / "b.json").string() + " --out " + dir.string()) == 3);
  fs::remove_all(dir);
}

TEST_CASE("run writes all artifacts, deterministically") {
  const fs::path a = scratch("run_a"), b = scratch("run_b");
  const std::string args = " --preset example1_lossy --theta 0.7853981634 --max-dof 3000 --deterministic --out ";
  REQUIRE(run("run" + args + a.string()) == 0);
  REQUIRE(run("run" + args + b.string()) == 0);
  for (auto f : {"history.csv", "estimate.csv", "field.vtk", "summary.txt"}) {
    CHECK(fs::file_size(a / f) > 0);
    CHECK(slurp(a / f) == slurp(b / f));
  }
  CHECK(slurp(a / "history.csv").rfind("iteration,dof_count,dof_physical,eps_h,eps_pml,wall_time_s\n", 0) == 0);
  CHECK(slurp(a / "summary.txt").find("method pml") != std::string::npos);

  const fs::path t = scratch("run_tbc");
  REQUIRE(run("run --preset example1_lossy --method tbc --max-dof 2000 --out " + t.string()) == 0);
  CHECK(slurp(t / "summary.txt").find("method tbc") != std::string::npos);
  fs::remove_all(a);
  fs::remove_all(b);
  fs::remove_all(t);
}

TEST_CASE("sweep and compare outputs") {
  const fs::path s = scratch("sweep");
  REQUIRE(run("sweep --preset example1_empty --angles -10:10:10 --max-dof 1500 --threads 2 --out " + s.string()) == 0);
  CHECK(lines(s / "rcs.csv") == 4);
  const fs::path c = scratch("compare");
  REQUIRE(run("compare --preset example1_empty --angles 30:5:30 --max-dof 1500 --out " + c.string()) == 0);
  CHECK(lines(c / "delta.csv") == 2);
  CHECK(lines(c / "rcs_pml.csv") == 2);
  CHECK(lines(c / "rcs_tbc.csv") == 2);
  CHECK(slurp(c / "summary.txt").find("max_abs_delta_db") != std::string::npos);
  fs::remove_all(s);
  fs::remove_all(c);
}
