#include "commands.hpp"
#include "config.hpp"

#include "quenchlab/io.hpp"

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include <sys/wait.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

using namespace quenchlab;
using namespace quenchlab::cli;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("quenchlab_cli_test_" + name);
  fs::remove_all(p);
  return p;
}

struct ToolRun {
  int code;
  std::string out;
};

ToolRun run_tool(const std::string& args) {
  const fs::path log = scratch("stdout.txt");
  const std::string cmd = std::string(QUENCHLAB_BIN) + " " + args + " > " + log.string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  std::ifstream in(log);
  std::stringstream ss;
  ss << in.rdbuf();
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, ss.str()};
}

std::string config(const std::string& name) { return (fs::path(QUENCHLAB_CONFIGS) / name).string(); }

nlohmann::json read_json(const fs::path& p) {
  std::ifstream in(p);
  return nlohmann::json::parse(in);
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST(Config, DefaultsAndOverrides) {
  const RunConfig c = parse_config("[model]\nlambda = 2\nf = exp\n", {"model.mu=3", "run.horizon=1.5"});
  EXPECT_EQ(c.params.lambda, 2.0);
  EXPECT_EQ(c.params.mu, 3.0);
  EXPECT_EQ(c.model.f.family, NonlinearityFamily::Exp);
  EXPECT_EQ(c.horizon, 1.5);
  EXPECT_EQ(c.domain.nx, 199);
  EXPECT_EQ(c.echo()["model"]["lambda"], "2");
  const auto lines = c.comment_lines();
  EXPECT_NE(std::find(lines.begin(), lines.end(), "config model.mu = 3"), lines.end());
}

TEST(Config, OverrideWinsOverFile) {
  const RunConfig c = parse_config("[model]\nlambda = 2\n", {"model.lambda=4"});
  EXPECT_EQ(c.params.lambda, 4.0);
}

TEST(Config, ErrorsNameTheKey) {
  try {
    parse_config("[model]\nlamda = 2\n", {});
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.key(), "model.lamda");
  }
  try {
    parse_config("", {"run.dt_init=abc"});
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.key(), "run.dt_init");
  }
  EXPECT_THROW(parse_config("[domain]\ndimension = 3\n", {}), ConfigError);
  EXPECT_THROW(parse_config("[model]\nf = cubic\n", {}), ConfigError);
  EXPECT_THROW(parse_config("[init]\nrecipe = random\n", {}), ConfigError);
  EXPECT_THROW(parse_config("", {"nonsense"}), ConfigError);
}

TEST(Config, LambdaSamples) {
  EXPECT_EQ(parse_config("[run]\nlambda_samples = 0.5, 1.0\n", {}).lambda_samples,
            (std::vector<double>{0.5, 1.0}));
  EXPECT_EQ(parse_config("[run]\nlambda_count = 3\n", {}).lambda_samples.size(), 3u);
}

TEST(Config, ShippedFilesParse) {
  for (const auto& entry : fs::directory_iterator(QUENCHLAB_CONFIGS)) {
    if (entry.path().extension() == ".ini") {
      EXPECT_NO_THROW(load_config(entry.path(), {})) << entry.path();
    }
  }
}

TEST(Commands, StationaryInside) {
  const fs::path out = scratch("stationary_in");
  CommandContext ctx{load_config(config("minimal_symmetric.ini"), {"domain.nx=49"}), out, 1};
  EXPECT_EQ(run_command("stationary", ctx), kOk);
  const nlohmann::json j = read_json(out / "verdict.json");
  EXPECT_EQ(j["membership"]["verdict"], "InLambda");
  EXPECT_TRUE(j.contains("config"));
  const CsvTable f = read_csv(out / "fields.csv");
  EXPECT_EQ(f.rows.size(), 49u);
  double mx = 0.0;
  for (const auto& r : f.rows) mx = std::max(mx, r[f.column("w")]);
  EXPECT_LT(mx, 1.0);
  EXPECT_FALSE(f.comments.empty());
}

TEST(Commands, StationaryOutside) {
  const fs::path out = scratch("stationary_out");
  CommandContext ctx{load_config(config("quench_outside.ini"), {"domain.nx=49"}), out, 1};
  EXPECT_EQ(run_command("stationary", ctx), kOk);
  const nlohmann::json j = read_json(out / "verdict.json");
  EXPECT_EQ(j["membership"]["verdict"], "NotInLambda");
  EXPECT_EQ(j["membership"]["evidence"], "AnalyticBound");
  EXPECT_FALSE(fs::exists(out / "fields.csv"));
}

TEST(Commands, CurveSingleSample) {
  const fs::path out = scratch("curve_one");
  CommandContext ctx{parse_config("", {"domain.nx=49", "run.lambda_samples=0.5"}), out, 2};
  EXPECT_EQ(run_command("curve", ctx), kOk);
  const CsvTable t = read_csv(out / "curve.csv");
  ASSERT_EQ(t.rows.size(), 1u);
  EXPECT_EQ(t.rows[0][0], 0.5);
  EXPECT_EQ(t.rows[0][t.column("status")], 0.0);
}

TEST(Commands, DecoupledEigen) {
  const fs::path out = scratch("eigen");
  CommandContext ctx{load_config(config("decoupled_eigen.ini"), {}), out, 1};
  EXPECT_EQ(run_command("eigen", ctx), kOk);
  const nlohmann::json j = read_json(out / "eigen.json");
  EXPECT_NEAR(j["nu1"].get<double>(), 9.8696, 2e-3);
  EXPECT_EQ(read_csv(out / "eigenfunctions.csv").columns,
            (std::vector<std::string>{"x", "phi1", "psi1"}));
}

TEST(Commands, SimulateQuench) {
  const fs::path out = scratch("simulate_quench");
  CommandContext ctx{load_config(config("quench_outside.ini"), {"domain.nx=49"}), out, 1};
  EXPECT_EQ(run_command("simulate", ctx), kOk);
  const nlohmann::json j = read_json(out / "summary.json");
  EXPECT_EQ(j["trajectory"]["status"], "Quenched");
  const CsvTable t = read_csv(out / "trajectory.csv");
  EXPECT_GT(t.rows.size(), 2u);
  EXPECT_TRUE(std::isnan(t.rows[0][t.column("dist2_u")]));
}

TEST(Commands, CertifyCases) {
  {
    const fs::path out = scratch("certify_c");
    CommandContext ctx{load_config(config("quench_large_data.ini"), {}), out, 1};
    EXPECT_EQ(run_command("certify", ctx), kOk);
    const nlohmann::json j = read_json(out / "certificate.json");
    EXPECT_EQ(j["case"]["case"], "c");
    EXPECT_EQ(j["outcome"], "pass");
  }
  {
    const fs::path out = scratch("certify_a22");
    CommandContext ctx{parse_config("[init]\nrecipe = above_second\neps = 0.05\n", {"domain.nx=49"}), out, 1};
    EXPECT_EQ(run_command("certify", ctx), kInapplicable);
    EXPECT_EQ(read_json(out / "certificate.json")["outcome"], "inapplicable");
  }
}

TEST(Binary, ExitCodes) {
  const fs::path out = scratch("bin_ok");
  EXPECT_EQ(run_tool("stationary --config " + config("minimal_symmetric.ini") + " --out " + out.string() +
                     " --override domain.nx=49")
                .code,
            0);
  const ToolRun bad = run_tool("stationary --out " + out.string() + " --override model.lamda=1");
  EXPECT_EQ(bad.code, 2);
  const nlohmann::json body = nlohmann::json::parse(bad.out);
  EXPECT_EQ(body["error"], "config");
  EXPECT_EQ(body["key"], "model.lamda");
  EXPECT_EQ(run_tool("nonsense").code, 2);
  EXPECT_EQ(run_tool("stationary --config /nonexistent.ini --out " + out.string()).code, 2);
  // eigen needs a stationary solution
  const ToolRun rt = run_tool("eigen --out " + out.string() + " --override model.lambda=12 --override domain.nx=49");
  EXPECT_EQ(rt.code, 3);
  EXPECT_TRUE(nlohmann::json::parse(rt.out).contains("error"));
}

TEST(Binary, CertifyQuenchExample) {
  const fs::path out = scratch("bin_certify");
  EXPECT_EQ(run_tool("certify --config " + config("quench_large_data.ini") + " --out " + out.string()).code, 0);
}

TEST(Binary, RerunsAreBitIdentical) {
  const fs::path a = scratch("rerun_a"), b = scratch("rerun_b");
  const std::string common = " --config " + config("minimal_symmetric.ini") + " --override domain.nx=49 --override run.horizon=1";
  ASSERT_EQ(run_tool("simulate" + common + " --out " + a.string()).code, 0);
  ASSERT_EQ(run_tool("simulate" + common + " --out " + b.string()).code, 0);
  for (const char* f : {"trajectory.csv", "snapshots.csv", "summary.json"}) {
    EXPECT_EQ(slurp(a / f), slurp(b / f)) << f;
  }
  const fs::path c1 = scratch("curve_a"), c2 = scratch("curve_b");
  const std::string curve = " --override domain.nx=29 --override run.lambda_count=4";
  ASSERT_EQ(run_tool("curve" + curve + " --threads 1 --out " + c1.string()).code, 0);
  ASSERT_EQ(run_tool("curve" + curve + " --threads 3 --out " + c2.string()).code, 0);
  EXPECT_EQ(slurp(c1 / "curve.csv"), slurp(c2 / "curve.csv"));
  EXPECT_EQ(slurp(c1 / "curve.json"), slurp(c2 / "curve.json"));
}
