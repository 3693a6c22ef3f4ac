#include <gtest/gtest.h>

#include <algorithm>
#include <cctype>
#include <filesystem>

#include "support.hpp"

using namespace reqexec::testing;

namespace {

std::vector<std::string> scenario_files() {
  std::vector<std::string> out;
  for (const auto& e : std::filesystem::directory_iterator(source_dir() + "/fixtures/scenarios")) {
    if (e.path().extension() == ".txt") out.push_back(e.path().filename().string());
  }
  std::sort(out.begin(), out.end());
  return out;
}

class Scenario : public ::testing::TestWithParam<std::string> {};

std::string param_name(const ::testing::TestParamInfo<std::string>& info) {
  std::string n = info.param.substr(0, info.param.size() - 4);
  for (char& c : n) {
    if (!std::isalnum(static_cast<unsigned char>(c))) c = '_';
  }
  return n;
}

}  // namespace

// Each scenario file is a recorded REPL transcript; replaying its commands
// must reproduce it byte for byte.
TEST_P(Scenario, ReplayMatchesTranscript) {
  std::string expected = read_file(source_dir() + "/fixtures/scenarios/" + GetParam());
  EXPECT_EQ(replay_transcript(expected), expected);
}

INSTANTIATE_TEST_SUITE_P(Transcripts, Scenario, ::testing::ValuesIn(scenario_files()), param_name);

TEST(Scenarios, AllPresent) { EXPECT_EQ(scenario_files().size(), 7u); }
