/*
 * Copyright 2026 The sessrank Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <gtest/gtest.h>

#include "sessrank.hpp"

namespace sessrank {
namespace {

namespace fs = std::filesystem;

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("sessrank_cli_" +
            std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  // Runs the CLI with the given arguments; stdout lands in out_.
  int run(const std::string& args) {
    const std::string cmd = std::string(SESSRANK_CLI_PATH) + " " + args + " > " +
                            (dir_ / "stdout.txt").string() + " 2> " +
                            (dir_ / "stderr.txt").string();
    const int status = std::system(cmd.c_str());
    out_ = read_file(dir_ / "stdout.txt");
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  void write(const std::string& name, const std::string& text) {
    std::ofstream(dir_ / name) << text;
  }

  void generate(double p, std::size_t sessions = 300) {
    ASSERT_EQ(run("generate --sessions " + std::to_string(sessions) +
                  " --items 80 --p " + std::to_string(p) + " --seed 3 --holdout 0.25 --out " +
                  path("data")),
              0);
  }

  static std::string value(const std::string& text, const std::string& key) {
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
      if (line.rfind(key + " = ", 0) == 0) return line.substr(key.size() + 3);
    }
    return {};
  }

  fs::path dir_;
  std::string out_;
};

TEST_F(CliTest, StatsOfTwoSessions) {
  write("s.csv", std::string(kSessionHeader) +
                     "\nu,a,1,1,clickout item,1,US,,desktop,,1|2,3|4\n"
                     "u,b,5,1,interaction item image,1,US,,mobile,,,\n");
  ASSERT_EQ(run("stats " + path("s.csv") + " --out " + path("stats.txt")), 0);
  EXPECT_EQ(value(out_, "n_sessions"), "2");
  EXPECT_EQ(value(out_, "clickout_last_ratio"), "0.5");
  EXPECT_EQ(read_file(dir_ / "stats.txt"), out_);
}

TEST_F(CliTest, RejectReport) {
  write("s.csv", std::string(kSessionHeader) +
                     "\nu,a,1,1,clickout item,1,US,,desktop,,1|2,3|4\nbroken,row\n");
  ASSERT_EQ(run("stats " + path("s.csv") + " --rejects " + path("rejects.txt")), 0);
  EXPECT_EQ(read_file(dir_ / "rejects.txt").rfind("3: ", 0), 0u);
}

TEST_F(CliTest, UsageErrorsExitWithOne) {
  EXPECT_EQ(run(""), 1);
  EXPECT_EQ(run("stats --bogus-flag x"), 1);
  EXPECT_EQ(run("evaluate --method nope --data x --report y"), 1);
  generate(0.5);
  EXPECT_EQ(run("evaluate --method ar --data " + path("data/valid.csv") + " --report " +
                path("r.txt")),
            1);
}

TEST_F(CliTest, MissingInputFails) {
  EXPECT_NE(run("stats " + path("nope.csv")), 0);
}

TEST_F(CliTest, DataErrorsExitWithTwo) {
  generate(0.5);
  write("bad.bin", "not a checkpoint");
  EXPECT_EQ(run("evaluate --method rnn --model " + path("bad.bin") + " --data " +
                path("data/valid.csv") + " --report " + path("r.txt")),
            2);
  write("header_only.csv", std::string(kSessionHeader) + "\n");
  EXPECT_EQ(run("stats " + path("header_only.csv")), 2);
}

TEST_F(CliTest, RulesBeatIdentityOnPlantedData) {
  generate(1.0);
  ASSERT_EQ(run("evaluate --method rules --data " + path("data/sessions.csv") +
                " --report " + path("rules.txt")),
            0);
  EXPECT_EQ(value(out_, "mrr"), "1");
  ASSERT_EQ(run("evaluate --method identity --data " + path("data/sessions.csv") +
                " --report " + path("id.txt")),
            0);
  EXPECT_LT(std::stod(value(out_, "mrr")), 0.5);
}

TEST_F(CliTest, FitThenEvaluateBaselines) {
  generate(0.5);
  for (const std::string m : {"ar", "mc", "sr", "iknn"}) {
    ASSERT_EQ(run("fit --method " + m + " --train " + path("data/train.csv") + " --out " +
                  path(m + ".model")),
              0)
        << m;
    ASSERT_EQ(run("evaluate --method " + m + " --model " + path(m + ".model") +
                  " --data " + path("data/valid.csv") + " --report " + path(m + ".txt") +
                  " --submission " + path(m + ".sub.csv")),
              0)
        << m;
    EXPECT_EQ(value(out_, "method"), m);
    std::ifstream sub(dir_ / (m + ".sub.csv"));
    EXPECT_EQ(read_submission(sub).size(), std::stoul(value(out_, "n_instances")));
  }
  EXPECT_EQ(run("evaluate --method mc --model " + path("ar.model") + " --data " +
                path("data/valid.csv") + " --report " + path("x.txt")),
            1);
  EXPECT_FALSE(fs::exists(dir_ / "ar.model.tmp"));
}

TEST_F(CliTest, SplitWritesBothParts) {
  generate(0.5, 100);
  ASSERT_EQ(run("split --data " + path("data/sessions.csv") +
                " --fraction 0.3 --seed 2 --out " + path("split")),
            0);
  EXPECT_EQ(value(out_, "train"), "70");
  EXPECT_EQ(value(out_, "validation"), "30");
  EXPECT_EQ(run("split --data " + path("data/sessions.csv") +
                " --fraction 1.5 --out " + path("split2")),
            1);
}

TEST_F(CliTest, TrainAndEvaluateRnn) {
  generate(0.9);
  write("hp.cfg", "embedding_size = 8\nhidden_size = 8\nepochs = 2\nlearning_rate = 0.01\n"
                  "mlp_layer_sizes = 4x4\n");
  ASSERT_EQ(run("train-rnn --train " + path("data/train.csv") + " --metadata " +
                path("data/metadata.csv") + " --context --config " + path("hp.cfg") +
                " --out " + path("rnn.ckpt") + " --loss-log " + path("loss.txt")),
            0);
  EXPECT_FALSE(value(read_file(dir_ / "loss.txt"), "epoch.2").empty());
  EXPECT_EQ(run("evaluate --method rnn --model " + path("rnn.ckpt") + " --data " +
                path("data/valid.csv") + " --report " + path("r.txt")),
            1);
  ASSERT_EQ(run("evaluate --method rnn+rules --model " + path("rnn.ckpt") + " --metadata " +
                path("data/metadata.csv") + " --data " + path("data/valid.csv") +
                " --report " + path("r.txt") + " --threads 3"),
            0);
  EXPECT_EQ(value(out_, "method"), "rnn+rules");
}

TEST_F(CliTest, BadConfigIsUsageError) {
  generate(0.5, 50);
  write("hp.cfg", "embeding_size = 8\n");
  EXPECT_EQ(run("train-rnn --train " + path("data/train.csv") + " --config " +
                path("hp.cfg") + " --out " + path("m.ckpt")),
            1);
}

TEST_F(CliTest, DivergenceExitsWithThree) {
  generate(0.5, 100);
  write("hp.cfg", "embedding_size = 4\nhidden_size = 4\nepochs = 2\n"
                  "learning_rate = 1e300\ngrad_clip_norm = 0\n");
  EXPECT_EQ(run("train-rnn --train " + path("data/train.csv") + " --config " +
                path("hp.cfg") + " --out " + path("m.ckpt")),
            3);
}

TEST_F(CliTest, GridSearchReport) {
  generate(0.9, 200);
  write("grid.cfg", "embedding_size = 4\nhidden_size = 4\nbatch_size = 64\nepochs = 1\n"
                    "learning_rate = 0.01, 0.001\nmlp_layer_sizes = 4x2\n");
  ASSERT_EQ(run("grid-search --train " + path("data/train.csv") + " --valid " +
                path("data/valid.csv") + " --grid " + path("grid.cfg") + " --out " +
                path("grid.txt")),
            0);
  EXPECT_EQ(value(read_file(dir_ / "grid.txt"), "n_configs"), "2");
}

}  // namespace
}  // namespace sessrank
