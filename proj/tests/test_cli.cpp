// End-to-end tests of the command line tool. The binary path arrives as
// argv[1] (wired up by CTest), so this translation unit owns main().
#define DOCTEST_CONFIG_IMPLEMENT
#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"

namespace {

std::string g_cli;

struct RunResult {
  int code = -1;
  std::string output;  // stdout + stderr interleaved
};

RunResult run(const std::string& args) {
  const std::string cmd = "\"" + g_cli + "\" " + args + " 2>&1";
  RunResult res;
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  char buf[4096];
  while (std::size_t n = std::fread(buf, 1, sizeof(buf), pipe)) res.output.append(buf, n);
  const int status = pclose(pipe);
  res.code = (status >= 0 && WIFEXITED(status)) ? WEXITSTATUS(status) : -1;
  return res;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string first_line(const std::string& s) { return s.substr(0, s.find('\n')); }

struct TempFile {
  std::string path;
  explicit TempFile(const std::string& name) : path("/tmp/contactflow_cli_" + name) {}
  ~TempFile() { std::remove(path.c_str()); }
};

}  // namespace

TEST_CASE("validate passes on every built-in model") {
  for (const std::string model : {"heisenberg", "heisenberg-quotient", "s3"}) {
    CAPTURE(model);
    const RunResult r = run("validate --model " + model);
    CHECK(r.code == 0);
    CHECK(r.output.find("PASS") != std::string::npos);
    CHECK(first_line(r.output).rfind("# command=validate model=" + model, 0) == 0);
  }
}

TEST_CASE("usage errors exit with code 1") {
  CHECK(run("validate --model torus").code == 1);
  CHECK(run("validate").code == 1);  // no model given
  CHECK(run("geodesic --model heisenberg --q0 1,2").code == 1);
  CHECK(run("polyalg solve 1,0,1").code == 1);  // invariant part not solvable
  CHECK(run("polyalg bracket 1,oops 1,0").code == 1);
  CHECK(run("nonsense").code != 0);
}

TEST_CASE("numerical failures exit with code 2") {
  // The unquotiented Reeb orbit never closes.
  const RunResult r = run("monodromy --model heisenberg --tmax 5");
  CHECK(r.code == 2);
  CHECK(r.output.find("does not close") != std::string::npos);
}

TEST_CASE("geodesic CSV carries the resolved configuration") {
  TempFile csv("geo.csv");
  const RunResult r =
      run("geodesic --model heisenberg --hz 10 --T 2 --out " + csv.path);
  CHECK(r.code == 0);
  CHECK(r.output.find("samples=") != std::string::npos);
  const std::string data = slurp(csv.path);
  CHECK(first_line(data).rfind("# command=geodesic model=heisenberg", 0) == 0);
  CHECK(data.find("\nt,chart,q1,q2,q3,p1,p2,p3,gstar,h_reeb\n") != std::string::npos);
}

TEST_CASE("monodromy reports the s3 fiber data") {
  const RunResult r = run("monodromy --model s3 --tmax 10");
  CHECK(r.code == 0);
  CHECK(r.output.find("period=3.14159265") != std::string::npos);
  CHECK(r.output.find("alpha=12.56637") != std::string::npos);
  CHECK(r.output.find("return_distance=") != std::string::npos);
}

TEST_CASE("repeated runs are byte-identical") {
  TempFile a("rep_a.csv"), b("rep_b.csv");
  const std::string args = "spiral-scan --model heisenberg --h0 10,20,40 --c 0.5";
  CHECK(run(args + " --out " + a.path).code == 0);
  CHECK(run(args + " --out " + b.path).code == 0);
  const std::string ca = slurp(a.path);
  CHECK(!ca.empty());
  CHECK(ca == slurp(b.path));
  // The config comment must not mention the output path, or reruns to
  // different files would differ.
  CHECK(ca.find("rep_a") == std::string::npos);
}

TEST_CASE("config files feed defaults and flags override them") {
  TempFile cfg("opts.ini");
  {
    std::ofstream out(cfg.path);
    out << "# experiment defaults\nmodel = s3\npoints = 25\n";
  }
  const RunResult file_only = run("validate --config " + cfg.path);
  CHECK(file_only.code == 0);
  CHECK(first_line(file_only.output).find("model=s3") != std::string::npos);
  CHECK(first_line(file_only.output).find("points=25") != std::string::npos);

  const RunResult overridden = run("validate --config " + cfg.path + " --model heisenberg");
  CHECK(overridden.code == 0);
  CHECK(first_line(overridden.output).find("model=heisenberg") != std::string::npos);
  CHECK(first_line(overridden.output).find("points=25") != std::string::npos);

  CHECK(run("validate --config /nonexistent.ini").code == 1);
}

TEST_CASE("polyalg subcommands print coefficient lists") {
  RunResult r = run("polyalg bracket 0,1 1,0");
  CHECK(r.code == 0);
  CHECK(r.output == "-1\n");

  r = run("polyalg aop 0,0,1,0");  // A(u v^2) = 2 u^2 v - v^3
  CHECK(r.code == 0);
  CHECK(r.output == "0,2,0,-1\n");

  r = run("polyalg decompose 1,0,1");
  CHECK(r.code == 0);
  CHECK(r.output == "Q0=0,0,0\nc=1\n");

  r = run("polyalg solve 1,0,-1");
  CHECK(r.code == 0);
  CHECK(r.output == "0,1,0\n");
}

TEST_CASE("spectrum summarizes convergence") {
  const RunResult r =
      run("spectrum --model heisenberg-quotient --T0 6.283185307179586 --jmax 1 --kmin 3 --kmax 5");
  CHECK(r.code == 0);
  CHECK(r.output.find("converged=3/3") != std::string::npos);
  CHECK(r.output.find("trend_non_increasing=yes") != std::string::npos);
}

int main(int argc, char** argv) {
  if (argc < 2) {
    std::fprintf(stderr, "usage: test_cli <path-to-cli-binary> [doctest args]\n");
    return 1;
  }
  g_cli = argv[1];
  doctest::Context ctx;
  ctx.applyCommandLine(argc - 1, argv + 1);
  return ctx.run();
}
