/*
 * Copyright 2026 The dpfl-pareto Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "dpfl/experiment.h"

#include <filesystem>
#include <string>

#include "dpfl/io.h"
#include "gmock/gmock.h"
#include "gtest/gtest.h"

namespace dpfl {
namespace {

using ::testing::HasSubstr;
using json = nlohmann::json;

json SmallConfig() {
  return json::parse(R"({
    "dataset": {"kind": "synthetic", "num_classes": 2, "feature_dim": 5,
                "n_train": 200, "n_test": 100, "seed": 3},
    "model": {"kind": "lr"},
    "fed": {"K": 4, "E": 2, "q": 1.0, "sigma": 0.0, "eta": 0.05,
            "momentum": 0.0, "B": 16, "c_clip": 1.0},
    "grid": {"sigma_list": [0.0, 0.1], "q_list": [0.5, 1.0]},
    "privacy": {"C": 1.0, "delta": 1e-5},
    "theory": {"k": 25, "c_t": 1, "eff_budget": 6},
    "seeds": [0, 1]
  })");
}

TEST(ParseExperimentConfigTest, ReadsAllSections) {
  auto cfg = ParseExperimentConfig(SmallConfig());
  ASSERT_TRUE(cfg.ok()) << cfg.status();
  ASSERT_TRUE(cfg->dataset.has_value());
  EXPECT_EQ(cfg->dataset->feature_dim, 5);
  EXPECT_EQ(cfg->fed.num_clients, 4);
  EXPECT_EQ(cfg->fed.max_rounds, 6);
  EXPECT_EQ(cfg->sigma_list.size(), 2u);
  EXPECT_EQ(*cfg->k, 25.0);
  EXPECT_EQ(cfg->seeds.size(), 2u);
  EXPECT_EQ(cfg->utility, UtilityMode::kRaw);
  EXPECT_EQ(MakeTheoryParams(*cfg).MaxRounds(), 6);
  EXPECT_EQ(MakePrivacyParams(*cfg).num_clients, 4);
}

TEST(ParseExperimentConfigTest, RoundTripsThroughJson) {
  auto cfg = ParseExperimentConfig(SmallConfig());
  ASSERT_TRUE(cfg.ok());
  auto again = ParseExperimentConfig(ExperimentConfigJson(*cfg));
  ASSERT_TRUE(again.ok()) << again.status();
  EXPECT_EQ(ExperimentConfigJson(*again), ExperimentConfigJson(*cfg));
}

TEST(ParseExperimentConfigTest, RejectsUnknownKeys) {
  json j = SmallConfig();
  j["fed"]["sigmaa"] = 0.1;
  auto cfg = ParseExperimentConfig(j);
  EXPECT_EQ(cfg.status().code(), absl::StatusCode::kInvalidArgument);
  EXPECT_THAT(std::string(cfg.status().message()), HasSubstr("sigmaa"));
  json top = SmallConfig();
  top["extra"] = 1;
  EXPECT_FALSE(ParseExperimentConfig(top).ok());
}

TEST(ParseExperimentConfigTest, RejectsBadValues) {
  json no_theory = SmallConfig();
  no_theory.erase("theory");
  EXPECT_FALSE(ParseExperimentConfig(no_theory).ok());
  json bad_q = SmallConfig();
  bad_q["grid"]["q_list"] = {0.0};
  EXPECT_FALSE(ParseExperimentConfig(bad_q).ok());
  json bad_budget = SmallConfig();
  bad_budget["theory"]["eff_budget"] = 0.5;
  EXPECT_FALSE(ParseExperimentConfig(bad_budget).ok());
  json bad_type = SmallConfig();
  bad_type["fed"]["K"] = "four";
  EXPECT_FALSE(ParseExperimentConfig(bad_type).ok());
  json bad_utility = SmallConfig();
  bad_utility["utility"] = "median";
  EXPECT_FALSE(ParseExperimentConfig(bad_utility).ok());
}

TEST(LoadExperimentConfigTest, MissingFile) {
  EXPECT_FALSE(LoadExperimentConfig("/nonexistent/config.json").ok());
}

TEST(RunEmpiricalGridTest, CountsAndDeterminism) {
  auto cfg = ParseExperimentConfig(SmallConfig());
  ASSERT_TRUE(cfg.ok());
  auto data = LoadDataset(*cfg);
  ASSERT_TRUE(data.ok()) << data.status();
  EXPECT_EQ(data->train_shards.size(), 4u);
  auto a = RunEmpiricalGrid(*cfg, *data, 1);
  auto b = RunEmpiricalGrid(*cfg, *data, 3);
  ASSERT_TRUE(a.ok() && b.ok());
  EXPECT_EQ(a->grid.points.size(), 2u * 2u * 6u);
  EXPECT_EQ(a->grid.cells_evaluated, 4);
  EXPECT_EQ(a->simulations, 4);
  EXPECT_EQ(a->traces.size(), 4u);
  ASSERT_EQ(a->grid.points.size(), b->grid.points.size());
  for (size_t i = 0; i < a->grid.points.size(); ++i) {
    EXPECT_EQ(a->grid.points[i].utility, b->grid.points[i].utility);
    EXPECT_EQ(a->grid.points[i].source, ObjectiveSource::kEmpirical);
  }
}

TEST(RunEmpiricalGridTest, BaselineDifferenceZeroAtZeroNoise) {
  json j = SmallConfig();
  j["utility"] = "baseline_difference";
  auto cfg = ParseExperimentConfig(j);
  ASSERT_TRUE(cfg.ok());
  auto data = LoadDataset(*cfg);
  ASSERT_TRUE(data.ok());
  auto grid = RunEmpiricalGrid(*cfg, *data, 1);
  ASSERT_TRUE(grid.ok());
  for (const auto& p : grid->grid.points) {
    if (p.origin.sigma == 0.0) EXPECT_EQ(p.utility, 0.0);
  }
}

TEST(RunTheoreticalGridTest, NeedsK) {
  auto cfg = ParseExperimentConfig(SmallConfig());
  ASSERT_TRUE(cfg.ok());
  auto grid = RunTheoreticalGrid(*cfg, 1);
  ASSERT_TRUE(grid.ok());
  EXPECT_EQ(grid->points.size(), 24u);
  cfg->k.reset();
  EXPECT_EQ(RunTheoreticalGrid(*cfg, 1).status().code(),
            absl::StatusCode::kFailedPrecondition);
}

TEST(RunManifestTest, WritesIndexAndChecksFiles) {
  const std::string dir = ::testing::TempDir() + "/manifest_test";
  std::filesystem::create_directories(dir);
  ASSERT_TRUE(WriteFileAtomic(dir + "/a.csv", "x\n").ok());
  RunManifest m("grid", json{{"k", 1}});
  m.AddFile("a.csv", "trace");
  m.AddTiming("total", 1.5);
  ASSERT_TRUE(m.Write(dir).ok());
  auto text = ReadFile(dir + "/manifest.json");
  ASSERT_TRUE(text.ok());
  const json manifest = json::parse(*text);
  EXPECT_EQ(manifest["tool"], "dpfl");
  EXPECT_EQ(manifest["files"].size(), 2u);
  EXPECT_FALSE(json::parse(*ReadFile(dir + "/timings.json")).empty());

  RunManifest missing("grid", json::object());
  missing.AddFile("nope.csv", "trace");
  EXPECT_FALSE(missing.Write(dir).ok());
}

}  // namespace
}  // namespace dpfl
