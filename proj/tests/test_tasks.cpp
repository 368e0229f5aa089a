#include <qmem/commands.hpp>
#include <qmem/reservoir.hpp>
#include <qmem/stats.hpp>
#include <qmem/tasks.hpp>

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <string>
#include <vector>

using namespace qmem;

namespace {

std::filesystem::path temp_file(const std::string& name, const std::string& content) {
  const auto dir = std::filesystem::temp_directory_path() / "qmem_tasks_test";
  std::filesystem::create_directories(dir);
  const auto p = dir / name;
  std::ofstream(p, std::ios::binary) << content;
  return p;
}

}  // namespace

TEST(Narma, ZeroInputRecurrence) {
  const Dataset ds = narma_from_inputs(std::vector<double>(5, 0.0));
  EXPECT_NEAR(ds.targets[0], 0.1, 1e-15);
  EXPECT_NEAR(ds.targets[1], 0.14, 1e-15);
  EXPECT_NEAR(ds.targets[2], 0.1616, 1e-15);
}

TEST(Narma, ZeroInputFixedPoint) {
  const Dataset ds = narma_from_inputs(std::vector<double>(400, 0.0));
  EXPECT_NEAR(ds.targets.back(), 0.19098300562505258, 1e-12);
  EXPECT_NEAR(narma_zero_input_fixed_point(), (0.6 - std::sqrt(0.2)) / 0.8, 0.0);
}

TEST(Narma, SeededAndInRange) {
  const Dataset a = narma(1000, 7), b = narma(1000, 7), c = narma(1000, 8);
  EXPECT_EQ(a.inputs, b.inputs);
  EXPECT_EQ(a.targets, b.targets);
  EXPECT_NE(a.inputs, c.inputs);
  for (double x : a.inputs) {
    EXPECT_GT(x, 0.0);
    EXPECT_LT(x, 0.5);
  }
  EXPECT_EQ(a.split.washout, 20u);
  EXPECT_EQ(a.split.train, 480u);
  EXPECT_EQ(a.split.test, 500u);
  EXPECT_THROW(narma(2, 1), DomainError);
}

// The recurrence computed here independently from the (x_t, y_{t+1}) pairing.
TEST(Narma, PairingMatchesRecurrence) {
  const Dataset ds = narma(50, 3);
  std::vector<double> y{0.0, 0.0};
  for (double x : ds.inputs) {
    const std::size_t n = y.size();
    y.push_back(0.4 * y[n - 1] + 0.4 * y[n - 1] * y[n - 2] + 0.6 * std::pow(x, 3) + 0.1);
  }
  for (std::size_t t = 0; t < ds.size(); ++t) EXPECT_NEAR(ds.targets[t], y[t + 2], 1e-15);
}

TEST(Narma, InitializationIrrelevantAfterWashout) {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const auto xs = uniform_inputs(1000, 1e-9, 0.5 - 1e-9, seed);
    const Dataset a = narma_from_inputs(xs, {0.0, 0.0});
    const Dataset b = narma_from_inputs(xs, {0.3, 0.2});
    const ReservoirConfig cfg = task_preset("narma");
    const FeatureMatrix fm = run(xs, cfg);
    EXPECT_NEAR(fit(fm, a.targets, a.split).mse_test, fit(fm, b.targets, b.split).mse_test, 1e-8);
  }
}

TEST(Narma, LagCorrelationDecays) {
  double c1 = 0.0, c5 = 0.0;
  for (std::uint64_t s = 0; s < 20; ++s) {
    const Dataset ds = narma(1000, s);
    c1 += stats::lag_correlation(ds.targets, 1) / 20.0;
    c5 += stats::lag_correlation(ds.targets, 5) / 20.0;
  }
  EXPECT_LT(std::abs(c5), std::abs(c1));
  EXPECT_LT(std::abs(c5), 0.1);
}

TEST(MackeyGlass, PureDecayMatchesExponential) {
  MackeyGlassParams p;
  p.beta = 0.0;
  const auto raw = integrate_mackey_glass(10, p);
  EXPECT_NEAR(raw[10], 1.2 * std::exp(-1.0), 1e-8);  // t = 10
}

TEST(MackeyGlass, NoDynamicsGivesConstant) {
  MackeyGlassParams p;
  p.beta = 0.0;
  p.gamma = 0.0;
  const Dataset ds = mackey_glass(50, p);
  for (double x : ds.inputs) EXPECT_EQ(x, 1.0);
  for (double y : ds.targets) EXPECT_EQ(y, 1.0);
}

TEST(MackeyGlass, ChaoticDefaultsBoundedAperiodic) {
  const Dataset ds = mackey_glass(1000);
  ASSERT_EQ(ds.size(), 1000u);
  for (double x : ds.inputs) {
    EXPECT_GT(x, 0.0);
    EXPECT_LE(x, 1.0);
  }
  EXPECT_LE(ds.targets.back(), 1.0);
  const std::set<double> distinct(ds.inputs.begin() + 100, ds.inputs.end());
  EXPECT_EQ(distinct.size(), 900u);
  for (std::size_t t = 0; t + 1 < ds.size(); ++t) EXPECT_EQ(ds.targets[t], ds.inputs[t + 1]);
}

TEST(MackeyGlass, SmoothAtUnitLag) {
  const Dataset ds = mackey_glass(1000);
  EXPECT_GT(stats::lag_correlation(ds.targets, 1), 0.9);
  EXPECT_LT(stats::lag_correlation(ds.targets, 10), stats::lag_correlation(ds.targets, 1));
}

TEST(MackeyGlass, InvalidParams) {
  MackeyGlassParams p;
  p.dt = 0.3;  // 17 / 0.3 not integral
  EXPECT_THROW(mackey_glass(10, p), DomainError);
  p = {};
  p.sample_stride = 0;
  EXPECT_THROW(mackey_glass(10, p), DomainError);
}

TEST(SantaFe, MaxScalingExample) {
  const auto path = temp_file("three.txt", "3\n1\n4\n");
  const auto s = santa_fe_series(path);
  ASSERT_EQ(s.size(), 3u);
  EXPECT_EQ(s[0], 0.75);
  EXPECT_EQ(s[1], 0.25);
  EXPECT_EQ(s[2], 1.0);
  const Dataset ds = santa_fe_load(path);
  EXPECT_EQ(ds.inputs, (std::vector<double>{0.75, 0.25}));
  EXPECT_EQ(ds.targets, (std::vector<double>{0.25, 1.0}));
}

TEST(SantaFe, EmptyAndMissingFiles) {
  EXPECT_THROW(santa_fe_load(temp_file("empty.txt", "")), IoError);
  EXPECT_THROW(santa_fe_load(temp_file("blank.txt", "\n\n")), IoError);
  EXPECT_THROW(santa_fe_load("/nonexistent/santafe.txt"), IoError);
}

TEST(SantaFe, ParseErrorReportsLine) {
  try {
    santa_fe_load(temp_file("bad.txt", "5\n7\nx9\n"));
    FAIL() << "expected IoError";
  } catch (const IoError& e) {
    EXPECT_EQ(e.line(), 3u);
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos);
  }
  EXPECT_THROW(santa_fe_load(temp_file("neg.txt", "5\n-2\n")), IoError);
}

TEST(SantaFe, ThousandLinesGive999Pairs) {
  std::string content;
  for (int i = 0; i < 1000; ++i) content += std::to_string((i * 37) % 255 + 1) + "\n";
  EXPECT_EQ(santa_fe_load(temp_file("k.txt", content)).size(), 999u);
}

TEST(SantaFe, FixtureExcerpt) {
  const Dataset ds = santa_fe_load(default_santa_fe_path(), 0, 1001);
  ASSERT_EQ(ds.size(), 1000u);
  EXPECT_EQ(ds.split.washout, 20u);
  EXPECT_EQ(ds.split.train, 480u);
  EXPECT_EQ(ds.split.test, 500u);
  for (double x : ds.inputs) EXPECT_TRUE(x >= 0.0 && x <= 1.0);
}

TEST(Monomial, TargetsAndSplit) {
  const Dataset one = monomial(4, {0.5});
  EXPECT_EQ(one.targets[0], 0.0625);
  EXPECT_EQ(monomial(3, {1.0}).targets[0], 1.0);
  const Dataset ds = monomial(4, uniform_grid(101), 0.9);
  EXPECT_EQ(ds.split.washout, 0u);
  EXPECT_EQ(ds.split.train, 90u);
  EXPECT_EQ(ds.split.test, 11u);
  EXPECT_THROW(monomial(4, {0.5, 0.2}), DomainError);
  EXPECT_THROW(monomial(4, {0.5}, 1.0), DomainError);
}

TEST(TasksProperty, SplitsPartitionAndInputsInRange) {
  for (std::size_t n : {3u, 10u, 57u, 1000u, 1001u}) {
    const Dataset ds = narma(n, n);
    EXPECT_EQ(ds.split.total(), ds.size());
    for (double x : ds.inputs) EXPECT_TRUE(x >= 0.0 && x <= 1.0);
  }
  const Dataset mg = mackey_glass(333);
  EXPECT_EQ(mg.split.total(), mg.size());
}

TEST(DatasetCsv, RoundTrip) {
  const Dataset ds = narma(30, 5);
  const Dataset back = dataset_from_csv(dataset_csv(ds));
  EXPECT_EQ(back.inputs, ds.inputs);
  EXPECT_EQ(back.targets, ds.targets);
  EXPECT_THROW(dataset_from_csv("a,b,c\n"), IoError);
  try {
    dataset_from_csv("t,x,y\n0,0.1,0.2\n1,zz,0.3\n");
    FAIL();
  } catch (const IoError& e) {
    EXPECT_EQ(e.line(), 3u);
  }
}
