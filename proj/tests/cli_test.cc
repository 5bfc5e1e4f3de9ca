#include "trolleypack/cli.h"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "gtest/gtest.h"
#include "json.hpp"

namespace trolleypack {
namespace {

namespace fs = std::filesystem;

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome Invoke(std::vector<std::string> args) {
  std::ostringstream out, err;
  int code = Dispatch(args, out, err);
  return {code, out.str(), err.str()};
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("trolleypack_cli_" +
            std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string Write(const std::string& name, const std::string& text) {
    std::ofstream(dir_ / name) << text;
    return (dir_ / name).string();
  }
  std::string Path(const std::string& name) const { return (dir_ / name).string(); }
  static std::string Data(const std::string& name) {
    return (fs::path(TROLLEYPACK_DATA_DIR) / name).string();
  }
  static std::string Slurp(const std::string& path) {
    std::ifstream in(path);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
  }

  fs::path dir_;
};

TEST_F(CliTest, PackFeasibleExitsZero) {
  std::string parts = Write("p.csv", "id,length,width\n1,9,9\n2,10,10\n");
  std::string modules = Write("m.csv", "id,length,width,capacity\n1,10,10,1\n2,12,12,1\n");
  Outcome r = Invoke({"pack", "--algo", "bestfit", "--parts", parts, "--modules",
                  modules, "--out", Path("sol.csv")});
  EXPECT_EQ(r.code, kExitOk) << r.err;
  EXPECT_EQ(Slurp(Path("sol.csv")), "part_id,module_id\n1,1\n2,2\n");
  auto sidecar = nlohmann::json::parse(Slurp(Path("sol.csv") + ".json"));
  EXPECT_EQ(sidecar["total_waste"], 63.0);
  EXPECT_EQ(sidecar["feasible"], true);

  for (const char* algo : {"exact-bnb", "exact-flow"}) {
    Outcome e = Invoke({"pack", "--algo", algo, "--parts", parts, "--modules", modules});
    EXPECT_EQ(e.code, kExitOk) << algo << e.err;
    EXPECT_NE(e.out.find("part_id,module_id"), std::string::npos);
    auto side = nlohmann::json::parse(e.err);
    EXPECT_EQ(side["total_waste"], 63.0);
    EXPECT_EQ(side["status"], "optimal");
  }
}

TEST_F(CliTest, UnplaceablePartExitsOneWithJson) {
  std::string parts = Write("p.csv", "id,length,width\n1,5,5\n7,500,5\n");
  std::string modules = Write("m.csv", "id,length,width,capacity\n1,10,10,4\n");
  Outcome r = Invoke({"pack", "--algo", "bestfit", "--parts", parts, "--modules",
                  modules, "--out", Path("sol.csv")});
  EXPECT_EQ(r.code, kExitInfeasible);
  auto doc = nlohmann::json::parse(r.err.substr(r.err.find('{')));
  EXPECT_EQ(doc["error"], "infeasible");
  EXPECT_EQ(doc["unplaceable_parts"], nlohmann::json::array({7}));
  EXPECT_EQ(doc["violations"]["unassigned"], nlohmann::json::array({7}));

  Outcome flow = Invoke({"pack", "--algo", "exact-flow", "--parts", parts,
                     "--modules", modules});
  EXPECT_EQ(flow.code, kExitInfeasible);
  EXPECT_NE(flow.err.find("\"unplaceable_parts\":[7]"), std::string::npos);

  Outcome autok = Invoke({"pack", "--algo", "bestfit", "--parts", parts,
                      "--modules", modules, "--trolleys", "auto"});
  EXPECT_EQ(autok.code, kExitInfeasible);
  EXPECT_NE(autok.err.find("\"part_id\":7"), std::string::npos);
}

TEST_F(CliTest, AutoTrolleysScalesCapacity) {
  std::string parts =
      Write("p.csv", "id,length,width\n1,5,5\n2,5,5\n3,5,5\n4,5,5\n5,5,5\n");
  std::string modules = Write("m.csv", "id,length,width,capacity\n1,10,10,4\n");
  Outcome fixed = Invoke({"pack", "--algo", "bestfit", "--parts", parts, "--modules", modules});
  EXPECT_EQ(fixed.code, kExitInfeasible);
  Outcome autok = Invoke({"pack", "--algo", "bestfit", "--parts", parts,
                      "--modules", modules, "--trolleys", "auto"});
  EXPECT_EQ(autok.code, kExitOk);
  EXPECT_EQ(nlohmann::json::parse(autok.err)["trolleys"], 2);
}

TEST_F(CliTest, UsageErrorsExitTwo) {
  std::string parts = Write("p.csv", "id,length,width\n1,5,5\n");
  std::string modules = Write("m.csv", "id,length,width,capacity\n1,10,10,4\n");
  EXPECT_EQ(Invoke({"pack", "--algo", "foo", "--parts", parts, "--modules", modules}).code,
            kExitUsage);
  EXPECT_EQ(Invoke({"pack", "--algo", "bestfit", "--parts", parts, "--modules",
                    modules, "--bogus"}).code,
            kExitUsage);
  EXPECT_EQ(Invoke({"pack", "--algo", "bestfit", "--parts", parts}).code, kExitUsage);
  EXPECT_EQ(Invoke({"pack", "--algo", "bestfit", "--parts", parts, "--modules",
                    modules, "--trolleys", "0"}).code,
            kExitUsage);
  EXPECT_EQ(Invoke({"pack", "--algo", "dqn", "--parts", parts, "--modules", modules}).code,
            kExitUsage);
  EXPECT_EQ(Invoke({"frobnicate"}).code, kExitUsage);
  EXPECT_EQ(Invoke({}).code, kExitUsage);
  std::string bad = Write("bad.csv", "id,width\n1,5\n");
  EXPECT_EQ(Invoke({"pack", "--algo", "bestfit", "--parts", bad, "--modules", modules}).code,
            kExitUsage);
  EXPECT_EQ(Invoke({"bench", "--modules", modules, "--outdir", Path("b"),
                    "--algos", "bestfit,nope"}).code,
            kExitUsage);
}

TEST_F(CliTest, GenIsDeterministic) {
  Outcome a = Invoke({"gen", "--seed", "3", "--count", "25", "--modules",
                  Data("modules_default.csv")});
  Outcome b = Invoke({"gen", "--seed", "3", "--count", "25", "--modules",
                  Data("modules_default.csv")});
  Outcome c = Invoke({"gen", "--seed", "4", "--count", "25", "--modules",
                  Data("modules_default.csv")});
  ASSERT_EQ(a.code, kExitOk);
  EXPECT_EQ(a.out, b.out);
  EXPECT_NE(a.out, c.out);
  EXPECT_EQ(std::count(a.out.begin(), a.out.end(), '\n'), 26);
  EXPECT_EQ(a.out.rfind("id,length,width\n", 0), 0u);
}

TEST_F(CliTest, TrainPackWithCheckpointBenchAndReport) {
  Outcome t = Invoke({"train", "--modules", Data("modules_default.csv"), "--episodes",
                  "2", "--seed", "1", "--checkpoint", Path("ckpt.json"),
                  "--parts-per-episode", "10", "--log", Path("log.csv")});
  ASSERT_EQ(t.code, kExitOk) << t.err;
  EXPECT_EQ(Slurp(Path("log.csv")).rfind(
                "episode,cumulative_reward,epsilon_or_temperature,steps\n", 0),
            0u);

  Invoke({"gen", "--seed", "1", "--count", "10", "--modules",
          Data("modules_default.csv"), "--out", Path("parts.csv")});
  Outcome p = Invoke({"pack", "--algo", "dqn", "--parts", Path("parts.csv"),
                  "--modules", Data("modules_default.csv"), "--trolleys", "auto",
                  "--checkpoint", Path("ckpt.json")});
  EXPECT_TRUE(p.code == kExitOk || p.code == kExitInfeasible) << p.err;
  EXPECT_NE(p.out.find("part_id,module_id"), std::string::npos);

  Outcome b = Invoke({"bench", "--modules", Data("modules_default.csv"), "--seeds",
                  "1,2", "--max-parts", "12", "--algos", "bestfit,exact-flow,dqn",
                  "--checkpoint", Path("ckpt.json"), "--outdir", Path("bench"),
                  "--probe-trials", "200"});
  ASSERT_EQ(b.code, kExitOk) << b.err;
  for (const char* f : {"Best_Fit_wasted_space_sum1.csv", "Exact_Flow_run_time2.csv",
                        "DQN_run_time1.csv", "summary.json", "counterexamples.json"}) {
    EXPECT_TRUE(fs::exists(dir_ / "bench" / f)) << f;
  }
  auto summary = nlohmann::json::parse(Slurp(Path("bench/summary.json")));
  EXPECT_EQ(summary["algorithms"]["bestfit"]["feasibility_rate"], 1.0);

  Outcome rep = Invoke({"report", "--indir", Path("bench")});
  EXPECT_EQ(rep.code, kExitOk);
  EXPECT_EQ(rep.out, b.out);
  EXPECT_EQ(Invoke({"report", "--indir", Path("missing")}).code, kExitUsage);
}

}  // namespace
}  // namespace trolleypack
