#include <cmath>
#include <fstream>

#include "doctest.h"
#include "orl/datastore/dataset_io.hpp"
#include "orl/error.hpp"
#include "test_util.hpp"

using testutil::toy_dataset;

namespace {

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

void spit(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

}  // namespace

TEST_CASE("toy dataset is valid") {
  const auto d = toy_dataset(12, 3, 4, 6, 1);
  const auto diag = orl::validate_dataset(d);
  CHECK(diag.ok());
  CHECK(diag.episode_count == 12);
  CHECK(diag.transition_count == d.transition_count());
  CHECK(diag.min_propensity == 0.25);
}

TEST_CASE("text encoding round trips bit-exactly") {
  auto d = toy_dataset(20, 5, 4, 8, 2);
  d.episodes[0].steps[0].state[0] = -0.0;
  d.episodes[0].steps[0].state[1] = 5e-324;
  d.episodes[0].steps[0].state[2] = 0.1 + 0.2;
  d.episodes[1].steps[0].reward.action_based = -1.7976931348623157e308;
  d.header.collection_seed = 0xffffffffffffffffULL;
  const std::string text = orl::encode_dataset(d);
  const orl::Dataset back = orl::decode_dataset(text);
  CHECK(back == d);
  CHECK(std::signbit(back.episodes[0].steps[0].state[0]));
  CHECK(orl::encode_dataset(back) == text);
}

TEST_CASE("plain and compressed files round trip") {
  testutil::TempDir dir("dataset");
  const auto d = toy_dataset(30, 4, 3, 10, 3);
  orl::write_dataset(dir / "d.orl.jsonl", d);
  orl::write_dataset(dir / "d.orl.jsonl.gz", d);
  CHECK(orl::read_dataset(dir / "d.orl.jsonl") == d);
  CHECK(orl::read_dataset(dir / "d.orl.jsonl.gz") == d);
  CHECK(slurp(dir / "d.orl.jsonl") == orl::encode_dataset(d));
  CHECK(std::filesystem::file_size(dir / "d.orl.jsonl.gz") < std::filesystem::file_size(dir / "d.orl.jsonl"));
}

TEST_CASE("a dataset with zero episodes is a header line") {
  orl::Dataset d;
  d.header.feature_names = {"x"};
  d.header.action_count = 2;
  d.sync_counts();
  const std::string text = orl::encode_dataset(d);
  CHECK(std::count(text.begin(), text.end(), '\n') == 1);
  CHECK(orl::decode_dataset(text) == d);
}

TEST_CASE("malformed lines name the line number") {
  const auto d = toy_dataset(3, 2, 2, 3, 4);
  std::string text = orl::encode_dataset(d);
  // Break the third line.
  std::size_t pos = 0;
  for (int i = 0; i < 2; ++i) pos = text.find('\n', pos) + 1;
  text.insert(pos, "{oops");
  try {
    orl::decode_dataset(text);
    FAIL("expected a ValidationError");
  } catch (const orl::ValidationError& e) {
    CHECK(std::string(e.what()).find("line 3") != std::string::npos);
  }
  const std::string good = orl::encode_dataset(d);
  CHECK_THROWS_AS(orl::decode_dataset(good.substr(0, good.size() - 1)), orl::ValidationError);
  CHECK_THROWS_AS(orl::decode_dataset(""), orl::ValidationError);
}

TEST_CASE("files with errors are rejected whole") {
  testutil::TempDir dir("dataset_bad");
  CHECK_THROWS_AS(orl::read_dataset(dir / "missing.orl.jsonl"), orl::IoError);
  spit(dir / "garbage.orl.jsonl.gz", "not gzip at all");
  CHECK_THROWS_AS(orl::read_dataset(dir / "garbage.orl.jsonl.gz"), orl::Error);
  auto d = toy_dataset(2, 2, 2, 3, 5);
  std::string text = orl::encode_dataset(d);
  const auto at = text.find("\"propensity\":0.5");
  REQUIRE(at != std::string::npos);
  text.replace(at, 16, "\"propensity\":1.5");
  spit(dir / "p.orl.jsonl", text);
  try {
    orl::read_dataset(dir / "p.orl.jsonl");
    FAIL("expected a ValidationError");
  } catch (const orl::ValidationError& e) {
    const std::string what = e.what();
    CHECK(what.find("p.orl.jsonl") != std::string::npos);
    CHECK(what.find("propensity") != std::string::npos);
  }
}

TEST_CASE("invariant violations are reported") {
  auto base = toy_dataset(4, 2, 3, 4, 6);
  SUBCASE("action out of range") { base.episodes[0].steps[0].action = 3; }
  SUBCASE("zero propensity") { base.episodes[1].steps[0].propensity = 0.0; }
  SUBCASE("non-contiguous steps") {
    if (base.episodes[2].steps.size() < 2) base.episodes[2].steps.push_back(base.episodes[2].steps[0]);
    base.episodes[2].steps[0].t = 5;
  }
  SUBCASE("missing done") { base.episodes[0].steps.back().done = false; }
  SUBCASE("terminal reward mid-episode") {
    base.episodes[3].steps.back().done = false;
    base.episodes[3].steps.back().reward.terminal = 1.0;
  }
  SUBCASE("wrong feature length") { base.episodes[0].steps[0].next_state.push_back(1.0); }
  SUBCASE("non-finite") { base.episodes[0].steps[0].state[0] = NAN; }
  SUBCASE("stale counts") { base.header.transition_count += 1; }
  SUBCASE("duplicate id") { base.episodes[1].id = base.episodes[0].id; }
  CHECK_FALSE(orl::validate_dataset(base).ok());
  CHECK_THROWS_AS(orl::encode_dataset(base), orl::ValidationError);
}

TEST_CASE("component return summaries") {
  auto d = toy_dataset(5, 1, 2, 1, 7);
  for (auto& ep : d.episodes) ep.steps[0].reward = {1.0, -2.0, ep.steps[0].truncated ? 0.0 : 100.0};
  const auto diag = orl::validate_dataset(d);
  CHECK(diag.state_based_return.mean == 1.0);
  CHECK(diag.action_based_return.min == -2.0);
  CHECK(diag.terminal_return.max == 100.0);
  CHECK(diag.terminal_return.mean == doctest::Approx(80.0));
}
