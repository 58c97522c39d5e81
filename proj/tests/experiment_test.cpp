#include <gtest/gtest.h>

#include <set>
#include <sstream>

#include "fairdiv/experiment.hpp"
#include "fairdiv/io.hpp"

using namespace fairdiv;

namespace {

ExperimentConfig tiny() {
  ExperimentConfig c;
  c.agents = 3;
  c.item_counts = {3, 5};
  c.instances = 4;
  c.samples = 40;
  c.seed = 11;
  return c;
}

}  // namespace

TEST(Generate, DeterministicAndInRange) {
  auto a = generate_instance(4, 9, 9, 123);
  auto b = generate_instance(4, 9, 9, 123);
  auto c = generate_instance(4, 9, 9, 124);
  EXPECT_EQ(a.bids(), b.bids());
  EXPECT_NE(a.bids(), c.bids());
  std::set<std::string> seen;
  for (const auto& v : a.bids().data()) {
    EXPECT_TRUE(v.is_integer());
    EXPECT_GE(v, Rational(0));
    EXPECT_LE(v, Rational(9));
  }
  for (std::uint64_t s = 0; s < 50; ++s) {
    auto inst = generate_instance(2, 10, 3, s);
    for (const auto& v : inst.bids().data()) seen.insert(v.str());
  }
  EXPECT_EQ(seen, (std::set<std::string>{"0", "1", "2", "3"}));
  EXPECT_EQ(generate_instance(1, 0, 5, 1).num_items(), 0u);
  EXPECT_THROW(generate_instance(0, 3, 5, 1), Error);
}

TEST(Config, Validation) {
  EXPECT_NO_THROW(ExperimentConfig::desk_scale().validate());
  EXPECT_NO_THROW(ExperimentConfig::full_scale().validate());
  EXPECT_EQ(ExperimentConfig::full_scale().item_counts.back(), 100u);
  auto bad = tiny();
  bad.item_counts.clear();
  EXPECT_THROW(bad.validate(), Error);
  bad = tiny();
  bad.samples = 0;
  EXPECT_THROW(bad.validate(), Error);
  bad = tiny();
  bad.mechanisms.clear();
  EXPECT_THROW(run_experiment(bad), Error);
  EXPECT_EQ(tiny().max_util_for(7), 7u);
}

TEST(Experiment, RowsAndRanges) {
  auto c = tiny();
  auto rows = run_experiment(c);
  ASSERT_EQ(rows.size(), 6u);
  EXPECT_EQ(rows[0].mechanism, "gini");
  EXPECT_EQ(rows[1].m, 5u);
  EXPECT_EQ(rows[5].mechanism, "envy");
  for (const auto& r : rows) {
    EXPECT_EQ(r.n, 3u);
    EXPECT_TRUE(r.egalitarian_exact);
    for (double v : {r.gini, r.subjective_gini, r.envy}) {
      EXPECT_GE(v, 0.0);
      EXPECT_LE(v, 1.0);
    }
    EXPECT_GE(r.utilitarian_ratio, 0.0);
    EXPECT_LE(r.utilitarian_ratio, 1.0 + 1e-12);
  }
}

TEST(Experiment, ThreadCountDoesNotChangeOutput) {
  auto c = tiny();
  c.threads = 1;
  std::ostringstream one, many;
  write_csv(run_experiment(c), one);
  c.threads = 4;
  std::size_t calls = 0;
  write_csv(run_experiment(c, [&](std::size_t done, std::size_t total) {
              ++calls;
              EXPECT_LE(done, total);
            }),
            many);
  EXPECT_EQ(one.str(), many.str());
  EXPECT_EQ(calls, 8u);
}

TEST(Experiment, GivenOrder) {
  auto c = tiny();
  c.random_order = false;
  c.mechanisms = {MechanismKind::Envy};
  auto rows = run_experiment(c);
  EXPECT_EQ(rows.size(), 2u);
}

TEST(Csv, RoundTrip) {
  auto rows = run_experiment(tiny());
  std::stringstream ss;
  write_csv(rows, ss);
  EXPECT_EQ(ss.str().substr(0, ss.str().find('\n')), kCsvHeader);
  auto back = read_csv(ss);
  ASSERT_EQ(back.size(), rows.size());
  for (std::size_t k = 0; k < rows.size(); ++k) {
    EXPECT_EQ(back[k].mechanism, rows[k].mechanism);
    EXPECT_EQ(back[k].m, rows[k].m);
    EXPECT_NEAR(back[k].envy, rows[k].envy, 1e-6);
    EXPECT_NEAR(back[k].egalitarian_ratio, rows[k].egalitarian_ratio, 1e-6);
    EXPECT_EQ(back[k].seed, 11u);
  }
  std::istringstream bad_header("mechanism,n\n");
  EXPECT_THROW(read_csv(bad_header), Error);
  std::istringstream short_row(std::string(kCsvHeader) + "\ngini,1,2\n");
  EXPECT_THROW(read_csv(short_row), Error);
}

TEST(Experiment, SmokeConfig) {
  auto c = load_experiment_config(std::string(FAIRDIV_DATA_DIR) + "/configs/smoke.json");
  auto rows = run_experiment(c);
  EXPECT_EQ(rows.size(), c.mechanisms.size() * c.item_counts.size());
}
