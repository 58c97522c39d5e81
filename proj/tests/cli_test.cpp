#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <sstream>

#include "cli.hpp"

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  int code = fairdiv::cli::dispatch(args, out, err);
  return {code, out.str(), err.str()};
}

std::string data(const std::string& rel) { return std::string(FAIRDIV_DATA_DIR) + "/" + rel; }

std::string temp(const std::string& name) { return (std::filesystem::temp_directory_path() / name).string(); }

}  // namespace

TEST(Cli, MinimizeSmallFixture) {
  auto r = run({"minimize", data("instances/gini_vs_envy_free_2x2.json"), "--index", "gini"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("value: 0\n"), std::string::npos);
  EXPECT_NE(r.out.find("allocation: o1->a1 o2->a2\n"), std::string::npos);
  auto all = run({"minimize", data("instances/subjgini_manipulation_misreport.json"), "--index", "subjgini", "--all"});
  ASSERT_EQ(all.code, 0) << all.err;
  EXPECT_NE(all.out.find("value: 1/26\n"), std::string::npos);
  EXPECT_NE(all.out.find("minimizers: 2\n"), std::string::npos);
}

TEST(Cli, MinimizeFallsBackToMatching) {
  auto path = temp("fairdiv_cli_square.json");
  ASSERT_EQ(run({"gen", "--agents", "12", "--items", "12", "--seed", "4", "-o", path}).code, 0);
  auto r = run({"minimize", path, "--index", "subjgini"});
  std::remove(path.c_str());
  if (r.code == 0) {
    EXPECT_NE(r.out.find("method: matching"), std::string::npos);
  } else {
    EXPECT_NE(r.err.find("SearchSpaceTooLarge"), std::string::npos) << r.err;
  }
}

TEST(Cli, EvalCarExample) {
  auto r = run({"eval", data("instances/cars.json"), data("allocations/cars_everyone_1.json")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("subjective_gini: 23/55\n"), std::string::npos);
  EXPECT_NE(r.out.find("allocation: Renault->Alice Skoda->Carol Toyota->Bob\n"), std::string::npos);
  EXPECT_NE(r.out.find("envy_free: no\n"), std::string::npos);
  auto d = run({"--decimal", "eval", data("instances/cars.json"), data("allocations/cars_everyone_1.json")});
  EXPECT_NE(d.out.find("subjective_gini: 0.418182\n"), std::string::npos);
  auto full = run({"eval", data("instances/cars.json"), data("allocations/cars_least_envy.json"), "--envy-norm",
                   "full"});
  EXPECT_NE(full.out.find("envy: 6/55\n"), std::string::npos);
}

TEST(Cli, GenIsDeterministic) {
  auto a = run({"gen", "--agents", "3", "--items", "5", "--seed", "9"});
  auto b = run({"gen", "--agents", "3", "--items", "5", "--seed", "9"});
  ASSERT_EQ(a.code, 0);
  EXPECT_EQ(a.out, b.out);
  auto inst = fairdiv::parse_instance(a.out);
  EXPECT_EQ(inst.num_items(), 5u);
  auto empty = run({"gen", "--agents", "1", "--items", "0", "--seed", "1"});
  ASSERT_EQ(empty.code, 0) << empty.err;
  EXPECT_EQ(fairdiv::parse_instance(empty.out).num_items(), 0u);
}

TEST(Cli, OnlineAndSupport) {
  auto cars = data("instances/cars.json");
  auto trace_path = temp("fairdiv_cli_trace.txt");
  auto r = run({"online", cars, "--mechanism", "envy", "--seed", "1", "--order", "given", "--trace", trace_path});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("allocation: Renault->Carol Skoda->Bob Toyota->Alice\n"), std::string::npos);
  std::ifstream tf(trace_path);
  std::string first;
  std::getline(tf, first);
  EXPECT_EQ(first, "step=0 item=0 feasible=2 chosen=2 index=1/6");
  std::remove(trace_path.c_str());

  auto a = run({"online", cars, "--mechanism", "gini", "--seed", "5", "--samples", "100"});
  auto b = run({"online", cars, "--mechanism", "gini", "--seed", "5", "--samples", "100"});
  ASSERT_EQ(a.code, 0) << a.err;
  EXPECT_EQ(a.out, b.out);
  EXPECT_NE(a.out.find("utilitarian: mean="), std::string::npos);

  auto s = run({"support", data("instances/gini_online_ratio.json"), "--mechanism", "gini"});
  ASSERT_EQ(s.code, 0) << s.err;
  EXPECT_NE(s.out.find("outcomes: 2\n"), std::string::npos);
  EXPECT_NE(s.out.find("1/2 o1->a1 o2->a2\n"), std::string::npos);
}

TEST(Cli, Experiment) {
  auto out = temp("fairdiv_cli_smoke.csv");
  auto r = run({"experiment", "--config", data("configs/smoke.json"), "-o", out, "--quiet", "--threads", "2"});
  ASSERT_EQ(r.code, 0) << r.err;
  std::ifstream in(out);
  auto rows = fairdiv::read_csv(in);
  EXPECT_EQ(rows.size(), 6u);
  std::remove(out.c_str());
}

TEST(Cli, ExitCodes) {
  EXPECT_EQ(run({}).code, 2);
  EXPECT_EQ(run({"frobnicate"}).code, 2);
  EXPECT_EQ(run({"minimize", data("instances/cars.json"), "--index", "theil"}).code, 2);
  EXPECT_EQ(run({"gen", "--agents", "0", "--items", "2", "--seed", "1"}).code, 2);
  EXPECT_EQ(run({"--help"}).code, 0);
  auto missing = run({"eval", "/nonexistent.json", data("allocations/cars_least_envy.json")});
  EXPECT_EQ(missing.code, 1);
  EXPECT_NE(missing.err.find("IoFailure"), std::string::npos);
  auto bad_alloc = run({"eval", data("instances/gini_vs_envy_free_2x2.json"), data("allocations/cars_least_envy.json")});
  EXPECT_EQ(bad_alloc.code, 1);
  auto bad_order = run({"support", data("instances/cars.json"), "--mechanism", "envy", "--order", "0,0,1"});
  EXPECT_EQ(bad_order.code, 1);
}
