/*
 * Copyright 2026 The fedgbt Authors
 *
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

#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <string>

namespace {

int ExitCode(const std::string& args) {
  const std::string cmd = std::string(FEDGBT_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

TEST(CliTest, HelpSucceeds) { EXPECT_EQ(ExitCode("--help"), 0); }

TEST(CliTest, ConfigurationErrorsExitWithTwo) {
  EXPECT_EQ(ExitCode("train --bogus-flag"), 2);
  EXPECT_EQ(ExitCode("train --set nonsense=1"), 2);
  EXPECT_EQ(ExitCode("train --users 2 --edges 5 --dataset synthetic"), 2);
  EXPECT_EQ(ExitCode("train --config /nonexistent/fedgbt.cfg"), 2);
  EXPECT_EQ(ExitCode("sweep --axis latency"), 2);
}

TEST(CliTest, SyntheticTrainRuns) {
  const auto out = std::filesystem::temp_directory_path() / "fedgbt_cli_test";
  std::filesystem::remove_all(out);
  EXPECT_EQ(ExitCode("train --dataset synthetic --subsample 120 --users 4 --edges 2 "
                     "--set rounds=1 --out " + out.string()),
            0);
  EXPECT_TRUE(std::filesystem::exists(out / "model.json"));
  std::filesystem::remove_all(out);
}

}  // namespace
