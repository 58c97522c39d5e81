#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>

#include "fairdiv/io.hpp"

using namespace fairdiv;

namespace {

std::string data(const std::string& rel) { return std::string(FAIRDIV_DATA_DIR) + "/" + rel; }

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::InvalidArgument;
}

}  // namespace

TEST(InstanceJson, ParsesNamesAndEntries) {
  auto inst = parse_instance(R"({"agents": ["A", "B"], "items": 3,
                                 "bids": [[1, "3/2", "0.25"], [0, 2.5, "7"]]})");
  EXPECT_EQ(inst.num_agents(), 2u);
  EXPECT_EQ(inst.num_items(), 3u);
  EXPECT_EQ(inst.agent_label(1), "B");
  EXPECT_EQ(inst.item_label(2), "o3");
  EXPECT_EQ(inst.bids()(0, 1), Rational(3, 2));
  EXPECT_EQ(inst.bids()(0, 2), Rational(1, 4));
  EXPECT_EQ(inst.bids()(1, 1), Rational(5, 2));
  EXPECT_FALSE(inst.has_true_utilities());
}

TEST(InstanceJson, RoundTrip) {
  auto inst = load_instance(data("instances/gini_misreport_first.json"));
  EXPECT_TRUE(inst.has_true_utilities());
  auto back = parse_instance(serialize_instance(inst));
  EXPECT_EQ(back.bids(), inst.bids());
  EXPECT_EQ(back.utilities(), inst.utilities());
  auto cars = load_instance(data("instances/cars.json"));
  auto again = parse_instance(serialize_instance(cars));
  EXPECT_EQ(again.agent_names(), cars.agent_names());
  EXPECT_EQ(again.item_names(), cars.item_names());
  EXPECT_EQ(again.bids(), cars.bids());
  auto path = (std::filesystem::temp_directory_path() / "fairdiv_io_test.json").string();
  auto frac = parse_instance(R"({"agents": 1, "items": 2, "bids": [["1/3", "99999999999999999999999"]]})");
  save_instance(frac, path);
  EXPECT_EQ(load_instance(path).bids(), frac.bids());
  std::remove(path.c_str());
}

TEST(InstanceJson, Errors) {
  EXPECT_EQ(code_of([] { parse_instance("{"); }), ErrorCode::IoFailure);
  EXPECT_EQ(code_of([] { parse_instance("[]"); }), ErrorCode::DimensionMismatch);
  EXPECT_EQ(code_of([] { parse_instance(R"({"agents": 1, "items": 1})"); }), ErrorCode::DimensionMismatch);
  EXPECT_EQ(code_of([] { parse_instance(R"({"agents": 1, "items": 2, "bids": [[1]]})"); }),
            ErrorCode::DimensionMismatch);
  EXPECT_EQ(code_of([] { parse_instance(R"({"agents": 2, "items": 1, "bids": [[1]]})"); }),
            ErrorCode::DimensionMismatch);
  EXPECT_EQ(code_of([] { parse_instance(R"({"agents": 1, "items": 1, "bids": [[-1]]})"); }),
            ErrorCode::NegativeValue);
  EXPECT_EQ(code_of([] { parse_instance(R"({"agents": 1, "items": 1, "bids": [["x"]]})"); }),
            ErrorCode::MalformedRational);
  EXPECT_EQ(code_of([] { parse_instance(R"({"agents": 1, "items": 1, "bids": [[true]]})"); }),
            ErrorCode::MalformedRational);
  EXPECT_EQ(code_of([] { parse_instance(R"({"agents": 1, "items": 1, "bids": [[1e300]]})"); }),
            ErrorCode::MalformedRational);
  EXPECT_EQ(code_of([] { parse_instance(R"({"agents": ["a", "b"], "items": 1, "bids": [[1]]})"); }),
            ErrorCode::DimensionMismatch);
  EXPECT_EQ(code_of([] { load_instance("/nonexistent/x.json"); }), ErrorCode::IoFailure);
}

TEST(AllocationJson, RoundTrip) {
  auto a = load_allocation(data("allocations/cars_least_envy.json"));
  EXPECT_EQ(a, Allocation(std::vector<int>{2, 1, 0}));
  Allocation partial(std::vector<int>{1, kUnallocated, 0});
  EXPECT_EQ(allocation_to_json(partial).dump(), "[1,null,0]");
  EXPECT_EQ(allocation_from_json(allocation_to_json(partial)), partial);
  EXPECT_EQ(code_of([] { allocation_from_json(json::parse("[-1]")); }), ErrorCode::IndexOutOfRange);
  EXPECT_EQ(code_of([] { allocation_from_json(json::parse("{}")); }), ErrorCode::DimensionMismatch);
}

TEST(ConfigJson, Parses) {
  auto c = load_experiment_config(data("configs/desk.json"));
  EXPECT_EQ(c.agents, 5u);
  EXPECT_EQ(c.item_counts, (std::vector<std::size_t>{10, 20, 30}));
  EXPECT_FALSE(c.max_util.has_value());
  EXPECT_EQ(c.seed, 20190101u);
  EXPECT_EQ(c.mechanisms.size(), 3u);
  EXPECT_EQ(c.egalitarian_budget.count(), 60000);
  auto full = load_experiment_config(data("configs/full.json"));
  EXPECT_EQ(full.item_counts.size(), 10u);
  EXPECT_EQ(full.samples, 100000u);
  auto g = experiment_config_from_json(
      json::parse(R"({"max_util": 4, "order": "given", "mechanisms": ["envy"], "envy_norm": "full"})"));
  EXPECT_EQ(g.max_util_for(100), 4u);
  EXPECT_FALSE(g.random_order);
  EXPECT_EQ(g.envy_norm, EnvyNormalization::Full);
}

TEST(ConfigJson, Errors) {
  for (const char* text : {R"([])", R"({"agents": "x"})", R"({"max_util": "n"})", R"({"order": "sorted"})",
                           R"({"mechanisms": ["random"]})", R"({"instances": 0})", R"({"item_counts": []})",
                           R"({"envy_norm": "double"})"}) {
    EXPECT_EQ(code_of([&] { experiment_config_from_json(json::parse(text)); }), ErrorCode::InvalidConfig) << text;
  }
}
