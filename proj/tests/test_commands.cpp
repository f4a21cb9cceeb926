#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

#include "anoma/commands.hpp"

using namespace anoma;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name) {
  const fs::path d = fs::temp_directory_path() / ("anoma_test_" + name);
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

CommonOptions options(const fs::path& out) {
  CommonOptions o;
  o.out = out.string();
  return o;
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(ANOMA_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST(Commands, ParseList) {
  EXPECT_EQ(parse_list("-10,-5,0"), (std::vector<double>{-10.0, -5.0, 0.0}));
  EXPECT_EQ(parse_list(" 1.5"), (std::vector<double>{1.5}));
  EXPECT_THROW(parse_list("1,x"), ParamError);
  EXPECT_THROW(parse_list("1,2y"), ParamError);
  EXPECT_THROW(parse_list(""), ParamError);
}

TEST(Commands, MomentWritesCsvAndManifest) {
  const auto dir = fresh_dir("moment");
  MomentOptions mo;
  ASSERT_EQ(cmd_moment(options(dir), mo), kExitOk);
  const std::string csv = slurp(dir / "moment_mobile_noma.csv");
  EXPECT_EQ(csv.rfind("# manifest: moment.manifest.txt\nbeta_db,value,abs_error,status\n", 0), 0u);
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 7);
  const std::string man = slurp(dir / "moment.manifest.txt");
  EXPECT_NE(man.find("status: complete\n"), std::string::npos);
  EXPECT_NE(man.find("  - moment_mobile_noma.csv\n"), std::string::npos);
  EXPECT_NE(man.find("seed: 20210601\n"), std::string::npos);
  EXPECT_NE(man.find("moment_rel_tol: 1e-09\n"), std::string::npos);
}

TEST(Commands, RepeatedRunsAreBitIdentical) {
  const auto a = fresh_dir("repeat_a");
  const auto b = fresh_dir("repeat_b");
  CommonOptions oa = options(a), ob = options(b);
  oa.engine = ob.engine = "both";
  oa.n_geo = ob.n_geo = 100;
  oa.beta_grid = ob.beta_grid = "-5,5";
  ob.threads = 3;
  MomentOptions mo;
  mo.device = "iot";
  ASSERT_EQ(cmd_moment(oa, mo), kExitOk);
  ASSERT_EQ(cmd_moment(ob, mo), kExitOk);
  EXPECT_EQ(slurp(a / "moment_iot_noma.csv"), slurp(b / "moment_iot_noma.csv"));
}

TEST(Commands, ConfigErrorsExitWithTwo) {
  const auto dir = fresh_dir("config_err");
  CommonOptions o = options(dir);
  o.config = (dir / "missing.cfg").string();
  EXPECT_EQ(cmd_moment(o, {}), kExitConfig);

  std::ofstream(dir / "bad.cfg") << "alpha = 1.5\n";
  o.config = (dir / "bad.cfg").string();
  EXPECT_EQ(cmd_rate(o, "both"), kExitConfig);

  o = options(dir);
  o.eps_m = 2.0;
  EXPECT_EQ(cmd_delay(o, {}), kExitConfig);

  o = options(dir);
  o.beta_grid = "0,-5";
  EXPECT_EQ(cmd_moment(o, {}), kExitConfig);
  EXPECT_NE(slurp(dir / "moment.manifest.txt").find("status: failed"), std::string::npos);
}

TEST(Commands, BudgetExhaustionExitsWithFour) {
  const auto dir = fresh_dir("budget");
  CommonOptions o = options(dir);
  o.budget = 1e-9;
  EXPECT_EQ(cmd_delay(o, {}), kExitBudget);
  EXPECT_NE(slurp(dir / "delay.manifest.txt").find("status: incomplete"), std::string::npos);
}

TEST(Commands, DivergentDelayExitsWithThree) {
  const auto dir = fresh_dir("diverge");
  CommonOptions o = options(dir);
  o.eps_t = 0.25;
  o.beta_grid = "0";
  EXPECT_EQ(cmd_delay(o, {}), kExitDiverged);
  EXPECT_NE(slurp(dir / "delay.csv").find("inf"), std::string::npos);
}

TEST(Commands, DelayEtaSweep) {
  const auto dir = fresh_dir("delay_eta");
  CommonOptions o = options(dir);
  o.eps_t = 1.0;
  o.beta_grid = "-5";
  DelayOptions d;
  d.scheme = "oma";
  d.eta_grid = "0.2,0.6";
  ASSERT_EQ(cmd_delay(o, d), kExitOk);
  std::istringstream in(slurp(dir / "delay.csv"));
  std::string line;
  std::getline(in, line);
  std::getline(in, line);
  EXPECT_EQ(line, "beta_t_db,scheme,eps_m,eps_t,eta,engine,delay,error,status");
  std::vector<double> delays;
  while (std::getline(in, line)) {
    std::vector<std::string> f;
    std::stringstream ls(line);
    for (std::string x; std::getline(ls, x, ',');) f.push_back(x);
    delays.push_back(std::stod(f[6]));
  }
  ASSERT_EQ(delays.size(), 2u);
  EXPECT_NEAR(delays[1] / delays[0], 0.8 / 0.4, 1e-9);
}

TEST(Commands, SnapshotDump) {
  const auto dir = fresh_dir("snapshot");
  CommonOptions o = options(dir);
  o.seed = 5;
  ASSERT_EQ(cmd_snapshot(o), kExitOk);
  const std::string csv = slurp(dir / "snapshot.csv");
  EXPECT_NE(csv.find("role,R,D,cell\ntypical_mobile,"), std::string::npos);
  EXPECT_NE(slurp(dir / "snapshot.manifest.txt").find("bs_count: "), std::string::npos);
}

TEST(Commands, UnknownFigureIsConfigError) {
  EXPECT_EQ(cmd_reproduce(options(fresh_dir("figure")), "top"), kExitConfig);
}

TEST(Cli, ExitCodes) {
  const auto dir = fresh_dir("cli");
  EXPECT_EQ(run_cli("--help"), 0);
  EXPECT_EQ(run_cli(""), kExitConfig);
  EXPECT_EQ(run_cli("moment --no-such-flag"), kExitConfig);
  EXPECT_EQ(run_cli("moment --device car"), kExitConfig);
  EXPECT_EQ(run_cli("moment --eps-m 3 --out " + dir.string()), kExitConfig);
  EXPECT_EQ(run_cli("snapshot --seed 3 --out " + dir.string()), kExitOk);
  EXPECT_TRUE(fs::exists(dir / "snapshot.csv"));
}
