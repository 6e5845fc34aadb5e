// Copyright 2026 The vgrounding Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "vgrounding/cli.hpp"

#include <sstream>

#include <gtest/gtest.h>

#include "test_util.hpp"

namespace vgrounding {
namespace {

using testing::read_file;
using testing::read_lines;
using testing::TempDir;
using testing::write_file;

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

std::string last_line(const std::string& text) {
  const auto end = text.find_last_not_of('\n');
  const auto newline = text.rfind('\n', end);
  const std::size_t start = newline == std::string::npos ? 0 : newline + 1;
  return text.substr(start, end + 1 - start);
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    const Result r = run({"synth", "--seed", "42", "--n-train", "120", "--n-test", "40", "--p", "8",
                          "--d-img", "16", "--d-txt", "8", "--noise", "0.05", "--out",
                          (tmp_ / "data").string()});
    ASSERT_EQ(r.code, 0) << r.err;
  }
  std::string data(const char* split) const { return (tmp_ / "data" / split).string(); }

  TempDir tmp_;
};

TEST_F(CliTest, SynthPrintsBothDirectories) {
  const Result r = run({"synth", "--out", (tmp_ / "again").string(), "--n-train", "3",
                        "--n-test", "2"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out, (tmp_ / "again/train").string() + "\n" + (tmp_ / "again/test").string() + "\n");
}

TEST_F(CliTest, TrainDefaultsMatchPublishedSetup) {
  const Result r = run({"train", "--train", data("train"), "--val", data("test"), "--epochs", "1",
                        "--out", (tmp_ / "m.ckpt").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.err.find("lr=0.01 momentum=0.9 weight_decay=0.0001 lr_decay_factor=10 "
                       "lr_decay_every=4 epochs=1 batch_size=8"),
            std::string::npos)
      << r.err;
  EXPECT_NE(r.err.find("top_k=32"), std::string::npos);
  EXPECT_TRUE(std::filesystem::exists(tmp_ / "m.ckpt"));
}

TEST_F(CliTest, HelpListsDefaults) {
  const Result r = run({"train", "--help"});
  EXPECT_EQ(r.code, 0);
  for (const char* needle : {"--lr", "0.01", "--momentum", "0.9", "--weight-decay", "0.0001",
                             "--epochs", "20", "--batch-size", "8", "--top-k", "32", "--config"}) {
    EXPECT_NE(r.err.find(needle), std::string::npos) << needle;
  }
}

TEST_F(CliTest, TrainEvalPredictPipeline) {
  const std::string ckpt = (tmp_ / "m.ckpt").string();
  const std::string log = (tmp_ / "log.csv").string();
  Result r = run({"train", "--train", data("train"), "--val", data("test"), "--epochs", "2",
                  "--out", ckpt, "--log", log});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out, ckpt + "\n" + log + "\n");
  const auto lines = read_lines(log);
  ASSERT_EQ(lines.size(), 3u);
  EXPECT_EQ(lines[0], "epoch,lr,mean_train_loss,val_ap50,skipped_samples");

  r = run({"eval", "--model", ckpt, "--data", data("test")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out.substr(0, r.out.find('\n')), "ap50,oracle_recall,n_samples");

  const std::string preds = (tmp_ / "p.jsonl").string();
  r = run({"predict", "--model", ckpt, "--data", data("test"), "--out", preds});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(read_lines(preds).size(), 40u);
}

TEST_F(CliTest, ConfigFileWithFlagOverride) {
  const std::string cfg = (tmp_ / "cfg.json").string();
  write_file(cfg, R"({"epochs": 1, "batch_size": 4, "lr": 0.5})");
  const Result r = run({"train", "--config", cfg, "--lr", "0.02", "--train", data("train"),
                        "--out", (tmp_ / "m.ckpt").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.err.find("lr=0.02 "), std::string::npos) << r.err;
  EXPECT_NE(r.err.find("epochs=1 batch_size=4"), std::string::npos) << r.err;
}

TEST_F(CliTest, UnknownConfigKeyRejected) {
  const std::string cfg = (tmp_ / "cfg.json").string();
  write_file(cfg, R"({"learning_speed": 3})");
  const Result r = run({"train", "--config", cfg, "--train", data("train"), "--out", "x"});
  EXPECT_EQ(r.code, 2);
}

TEST_F(CliTest, BadFlagsExitTwo) {
  Result r = run({"train", "--bogus", "1"});
  EXPECT_EQ(r.code, 2);
  EXPECT_EQ(r.err.rfind("error: kind=config", 0), 0u) << r.err;
  EXPECT_EQ(std::count(r.err.begin(), r.err.end(), '\n'), 1);

  r = run({"train", "--train", data("train"), "--out", "x", "--momentum", "1.5"});
  EXPECT_EQ(r.code, 2);
  r = run({"frobnicate"});
  EXPECT_EQ(r.code, 2);
}

TEST_F(CliTest, DatasetErrorsExitThree) {
  Result r = run({"train", "--train", (tmp_ / "missing").string(), "--out", "x"});
  EXPECT_EQ(r.code, 3);
  EXPECT_NE(last_line(r.err).find("error: kind=dataset message="), std::string::npos) << r.err;

  // Checkpoint trained on one dimensionality, evaluated on another.
  ASSERT_EQ(run({"synth", "--out", (tmp_ / "wide").string(), "--n-train", "5", "--n-test", "5",
                 "--d-img", "16", "--d-txt", "12"})
                .code,
            0);
  const std::string ckpt = (tmp_ / "m.ckpt").string();
  ASSERT_EQ(run({"train", "--train", data("train"), "--epochs", "1", "--out", ckpt}).code, 0);
  r = run({"eval", "--model", ckpt, "--data", (tmp_ / "wide/test").string()});
  EXPECT_EQ(r.code, 3);
  EXPECT_EQ(last_line(r.err).rfind("error: kind=dimension", 0), 0u) << r.err;
}

TEST_F(CliTest, AblateTopKWritesCsv) {
  const Result r = run({"ablate-topk", "--train", data("train"), "--val", data("test"), "--ks",
                        "2,4,8", "--epochs", "1"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto lines_end = std::count(r.out.begin(), r.out.end(), '\n');
  EXPECT_EQ(lines_end, 4);
  EXPECT_EQ(r.out.substr(0, 11), "label,ap50\n");
  EXPECT_NE(r.err.find("top_k=4"), std::string::npos);
}

TEST_F(CliTest, AblateEncodersAcceptsRootAndPairs) {
  const std::string csv = (tmp_ / "enc.csv").string();
  const Result r = run({"ablate-encoders", "--dataset", "root=" + (tmp_ / "data").string(),
                        "--dataset", "pair=" + data("train") + "," + data("test"), "--epochs",
                        "1", "--out", csv});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto lines = read_lines(csv);
  ASSERT_EQ(lines.size(), 3u);
  EXPECT_EQ(lines[1].substr(0, 5), "root,");
  EXPECT_EQ(lines[2].substr(0, 5), "pair,");
  EXPECT_EQ(lines[1].substr(5), lines[2].substr(5));
}

TEST(CliGradcheckTest, SmallRunSucceeds) {
  std::ostringstream out, err;
  EXPECT_EQ(run_cli({"gradcheck", "--trials", "3", "--seed", "7"}, out, err), 0) << err.str();
  EXPECT_EQ(out.str().rfind("max_rel_error=", 0), 0u);
}

}  // namespace
}  // namespace vgrounding
