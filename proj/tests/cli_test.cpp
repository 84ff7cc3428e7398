// Copyright 2026 The Crossing Scenarios Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>
#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "crossing/feature_model.hpp"

namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
};

// Runs the CLI with stderr folded into the captured output.
Run run(const std::string& args) {
  const std::string command = std::string(CROSSING_CLI_PATH) + " " + args + " 2>&1";
  FILE* pipe = ::popen(command.c_str(), "r");
  if (!pipe) return {-1, ""};
  std::string out;
  std::array<char, 4096> buf{};
  while (std::size_t n = std::fread(buf.data(), 1, buf.size(), pipe)) out.append(buf.data(), n);
  const int status = ::pclose(pipe);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("crossing-cli-" + std::to_string(::getpid()) + "-" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

}  // namespace

TEST(Cli, UsageErrors) {
  EXPECT_EQ(run("").code, 1);
  EXPECT_EQ(run("frobnicate").code, 1);
  EXPECT_EQ(run("counts").code, 1);
  EXPECT_EQ(run("sample --profile profile-1 --cd abc").code, 1);
  EXPECT_EQ(run("analyze --profile profile-1 --out /tmp --format pdf").code, 1);
  EXPECT_EQ(run("--help").code, 0);
}

TEST(Cli, Schema) {
  const auto r = run("schema");
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("Total combinations: 331776"), std::string::npos);
}

TEST(Cli, CountsBothPaths) {
  for (const char* flag : {"", " --fast"}) {
    const auto r = run(std::string("counts --profile profile-1") + flag);
    EXPECT_EQ(r.code, 0);
    EXPECT_NE(r.out.find("profile-1: 290304 / 331776 (87.5%)"), std::string::npos) << r.out;
  }
  const auto p2 = run("counts --profile profile-2-hard --fast");
  EXPECT_NE(p2.out.find("approximate preset"), std::string::npos);
}

TEST(Cli, DataErrors) {
  EXPECT_EQ(run("counts --profile no-such-profile").code, 2);
  const fs::path dir = scratch("data");
  std::ofstream(dir / "broken.json") << "{ \"id\": ";
  EXPECT_EQ(run("counts --profile " + (dir / "broken.json").string()).code, 2);
  auto doc = crossing::profile_to_json(*crossing::find_builtin_profile("profile-1"));
  doc["weights"]["2"] = 9;
  std::ofstream(dir / "heavy.json") << doc.dump();
  const auto r = run("counts --profile " + (dir / "heavy.json").string());
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.out.find("weight out of range"), std::string::npos);
  fs::remove_all(dir);
}

TEST(Cli, ProfileFromFileAndCustomSpace) {
  const fs::path dir = scratch("files");
  auto doc = crossing::profile_to_json(*crossing::find_builtin_profile("profile-4"));
  doc["id"] = "from-file";
  std::ofstream(dir / "p.json") << doc.dump();
  const auto r = run("counts --fast --profile " + (dir / "p.json").string());
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("from-file: 147456 / 331776 (44.4%)"), std::string::npos);
  std::ofstream(dir / "space.json") << crossing::serialize_space(crossing::builtin_crosswalk_space());
  EXPECT_EQ(run("schema --space " + (dir / "space.json").string()).code, 0);
  fs::remove_all(dir);
}

TEST(Cli, VarianceTable) {
  const auto r = run("variance --profile profile-3 --exclude-constrained");
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("excluded (fixed by constraint): f5"), std::string::npos);
  EXPECT_EQ(r.out.find("   0.167"), std::string::npos);  // empty bucket not listed
  EXPECT_NE(r.out.find("   0.333"), std::string::npos);
}

TEST(Cli, AnalyzeWritesRequestedFormats) {
  const fs::path dir = scratch("analyze");
  const auto r = run("analyze --profile profile-4 --out " + dir.string() + " --format csv,svg");
  EXPECT_EQ(r.code, 0);
  EXPECT_TRUE(fs::exists(dir / "profile-4.csv"));
  EXPECT_TRUE(fs::exists(dir / "profile-4.svg"));
  EXPECT_FALSE(fs::exists(dir / "profile-4.json"));
  fs::remove_all(dir);
}

TEST(Cli, SampleIsSeededAndWarnsOnSubstitution) {
  const auto a = run("sample --profile profile-3 --cd 0.1 --n 3 --seed 11");
  const auto b = run("sample --profile profile-3 --cd 0.1 --n 3 --seed 11");
  EXPECT_EQ(a.code, 0);
  EXPECT_EQ(a.out, b.out);
  EXPECT_NE(a.out.find("warning: no profile-3 scenarios at cd 1/10; using cd 1/3"), std::string::npos);
  EXPECT_EQ(run("sample --profile profile-3 --cd 0.5 --n 0").code, 1);
}

TEST(Cli, PaperReproPasses) {
  const fs::path dir = scratch("repro");
  const auto r = run("paper-repro --out " + dir.string());
  EXPECT_EQ(r.code, 0) << r.out;
  EXPECT_EQ(r.out.find("FAIL"), std::string::npos);
  EXPECT_NE(r.out.find("approximate preset"), std::string::npos);
  EXPECT_TRUE(fs::exists(dir / "profile-1.svg"));
  fs::remove_all(dir);
}
