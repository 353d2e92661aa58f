// Copyright 2026 the pirsim authors
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

#include <algorithm>
#include <set>
#include <string>
#include <vector>

#include <catch2/catch_amalgamated.hpp>

#include "pirsim/simulator.hpp"

using pirsim::draw_failures;
using pirsim::FailureModel;
using pirsim::MdsCode;
using pirsim::Rational;
using pirsim::Rng;
using pirsim::run_session;
using pirsim::SessionOutcome;
using pirsim::SessionPhase;
using pirsim::StorageSystem;
using pirsim::SystemConfig;

namespace {

StorageSystem make_store_5x2(int m, std::uint64_t seed) {
  const MdsCode code = pirsim::make_mds_code(5, 2, 5);
  Rng rng(seed);
  return pirsim::random_storage(code, 1, m, 3, rng);
}

}  // namespace

TEST_CASE("failure model text forms round-trip", "[simulator]") {
  CHECK(FailureModel::parse("none").kind == FailureModel::Kind::kNone);
  CHECK(FailureModel::parse("").kind == FailureModel::Kind::kNone);
  CHECK(FailureModel::parse("none").str() == "none");

  const FailureModel fixed = FailureModel::parse("fixed:1,3");
  CHECK(fixed.kind == FailureModel::Kind::kFixed);
  CHECK(fixed.fixed == std::vector<int>{0, 2});
  CHECK(fixed.str() == "fixed:1,3");
  CHECK(FailureModel::parse("fixed:3,1,3").str() == "fixed:1,3");

  const FailureModel random = FailureModel::parse("random:2");
  CHECK(random.kind == FailureModel::Kind::kRandom);
  CHECK(random.random_max == 2);
  CHECK(random.str() == "random:2");

  const FailureModel lat = FailureModel::parse("latency:0.5,2.0");
  CHECK(lat.kind == FailureModel::Kind::kLatency);
  CHECK(lat.latency_mean == 0.5);
  CHECK(lat.latency_timeout == 2.0);
  CHECK(lat.str() == "latency:0.5,2");

  CHECK_THROWS_AS(FailureModel::parse("bogus:1"), std::invalid_argument);
  CHECK_THROWS_AS(FailureModel::parse("fixed:0"), std::invalid_argument);
  CHECK_THROWS_AS(FailureModel::parse("random:-1"), std::invalid_argument);
  CHECK_THROWS_AS(FailureModel::parse("latency:1.0"), std::invalid_argument);
  CHECK_THROWS_AS(FailureModel::parse("latency:0,1"), std::invalid_argument);
}

TEST_CASE("failure draws respect each model's contract", "[simulator]") {
  Rng rng(41);

  CHECK(draw_failures(FailureModel{}, 5, 2, rng).empty());

  // Fixed sets pass through even when oversized; the session handles it.
  const FailureModel fixed = FailureModel::parse("fixed:1,2,3,4");
  CHECK(draw_failures(fixed, 5, 2, rng) == std::vector<int>{0, 1, 2, 3});

  const FailureModel random = FailureModel::parse("random:4");
  std::set<int> seen_sizes;
  for (int trial = 0; trial < 400; ++trial) {
    const auto failed = draw_failures(random, 5, 2, rng);
    CHECK(failed.size() <= 2);  // clamped to nu
    CHECK(std::is_sorted(failed.begin(), failed.end()));
    CHECK(std::adjacent_find(failed.begin(), failed.end()) == failed.end());
    for (int v : failed) CHECK((0 <= v && v < 5));
    seen_sizes.insert(static_cast<int>(failed.size()));
  }
  CHECK(seen_sizes == std::set<int>{0, 1, 2});

  const FailureModel generous = FailureModel::parse("latency:1.0,50.0");
  CHECK(draw_failures(generous, 5, 2, rng).empty());

  const FailureModel harsh = FailureModel::parse("latency:1.0,0.000001");
  for (int trial = 0; trial < 50; ++trial) {
    const auto failed = draw_failures(harsh, 5, 2, rng);
    CHECK(failed.size() <= 2);  // every node overruns, the cap still holds
    CHECK(std::is_sorted(failed.begin(), failed.end()));
  }
}

TEST_CASE("a healthy session walks the expected phases", "[simulator]") {
  const StorageSystem store = make_store_5x2(2, 404);
  const SystemConfig cfg{5, 2, 5, 1, 2, 2};
  const SessionOutcome out = run_session(store, cfg, 1, FailureModel{}, 99);
  REQUIRE(out.ok);
  CHECK(out.error.empty());
  CHECK(out.phases == std::vector<SessionPhase>{SessionPhase::kInit, SessionPhase::kLayer1Sent,
                                                SessionPhase::kFailuresObserved,
                                                SessionPhase::kDecoded});
  CHECK(out.decoded == store.files[1]);
  CHECK(out.cpop == Rational(5, 3));
  CHECK(out.equations_used == out.transcript.downloaded);
  CHECK(out.transcript.downloaded == 10);
}

TEST_CASE("failures add a repair round and raise the price", "[simulator]") {
  const StorageSystem store = make_store_5x2(2, 405);
  const SystemConfig cfg{5, 2, 5, 1, 2, 2};

  const SessionOutcome one = run_session(store, cfg, 0, FailureModel::parse("fixed:2"), 7);
  REQUIRE(one.ok);
  CHECK(one.phases == std::vector<SessionPhase>{
                          SessionPhase::kInit, SessionPhase::kLayer1Sent,
                          SessionPhase::kFailuresObserved, SessionPhase::kLayer2Sent,
                          SessionPhase::kDecoded});
  CHECK(one.cpop == Rational(2, 1));
  CHECK(one.transcript.failed == std::vector<int>{1});

  const SessionOutcome two = run_session(store, cfg, 0, FailureModel::parse("fixed:4,2"), 7);
  REQUIRE(two.ok);
  CHECK(two.cpop == Rational(3, 1));
  CHECK(two.transcript.failed == std::vector<int>{1, 3});

  // No query in the repair round addresses a failed node, and no response
  // is ever recorded for one.
  const auto& st = two.transcript.plan.structure;
  for (std::size_t s = st.layer1_count; s < two.transcript.plan.queries.size(); ++s)
    for (int v : two.transcript.failed)
      CHECK(two.transcript.plan.queries[s].count(v) == 0);
  for (const auto& per_sub : two.transcript.responses)
    for (int v : two.transcript.failed) CHECK(per_sub.count(v) == 0);
}

TEST_CASE("too many fixed failures aborts before anything is sent", "[simulator]") {
  const StorageSystem store = make_store_5x2(1, 406);
  const SystemConfig cfg{5, 2, 5, 1, 1, 2};
  const SessionOutcome out = run_session(store, cfg, 0, FailureModel::parse("fixed:1,2,3"), 1);
  CHECK_FALSE(out.ok);
  CHECK(out.error == "capacity exceeded: 3 failures with nu=2");
  CHECK(out.phases == std::vector<SessionPhase>{SessionPhase::kInit, SessionPhase::kAborted});
  CHECK(out.transcript.responses.empty());
}

TEST_CASE("mismatched store and config abort early", "[simulator]") {
  const StorageSystem store = make_store_5x2(1, 407);

  SystemConfig wrong_n{4, 2, 5, 1, 1, 2};
  CHECK(run_session(store, wrong_n, 0, FailureModel{}, 1).error ==
        "config does not match the store");

  // A store laid out for nu=0 has one stripe per file, not the three the
  // nu=2 scheme expects.
  const MdsCode code = pirsim::make_mds_code(5, 2, 5);
  Rng rng(3);
  const StorageSystem flat = pirsim::random_storage(code, 1, 1, 1, rng);
  SystemConfig cfg{5, 2, 5, 1, 1, 2};
  CHECK(run_session(flat, cfg, 0, FailureModel{}, 1).error ==
        "store alpha does not match scheme alpha");

  SystemConfig cfg_ok{5, 2, 5, 1, 1, 2};
  CHECK(run_session(store, cfg_ok, 5, FailureModel{}, 1).error == "file index out of range");
}

TEST_CASE("sessions are deterministic in the seed", "[simulator]") {
  const StorageSystem store = make_store_5x2(2, 408);
  const SystemConfig cfg{5, 2, 5, 1, 2, 2};
  const FailureModel model = FailureModel::parse("random:2");

  const SessionOutcome a = run_session(store, cfg, 1, model, 1234);
  const SessionOutcome b = run_session(store, cfg, 1, model, 1234);
  REQUIRE(a.ok);
  REQUIRE(b.ok);
  CHECK(a.transcript.failed == b.transcript.failed);
  CHECK(a.transcript.plan.pads == b.transcript.plan.pads);
  CHECK(a.transcript.responses == b.transcript.responses);
  CHECK(a.cpop == b.cpop);

  const SessionOutcome c = run_session(store, cfg, 1, model, 1235);
  REQUIRE(c.ok);
  CHECK_FALSE(a.transcript.plan.pads == c.transcript.plan.pads);
}

TEST_CASE("random failure pricing converges to its expectation", "[simulator]") {
  CHECK(pirsim::expected_random_cpop(5, 2, 2, 0) == Catch::Approx(5.0 / 3.0));
  CHECK(pirsim::expected_random_cpop(5, 2, 2, 2) == Catch::Approx(20.0 / 9.0));
  // random_max beyond nu is clamped
  CHECK(pirsim::expected_random_cpop(5, 2, 2, 7) == Catch::Approx(20.0 / 9.0));

  const StorageSystem store = make_store_5x2(1, 409);
  const SystemConfig cfg{5, 2, 5, 1, 1, 2};
  const FailureModel model = FailureModel::parse("random:2");
  double sum = 0.0;
  const int sessions = 10000;
  for (int s = 0; s < sessions; ++s) {
    const SessionOutcome out = run_session(store, cfg, 0, model, 50000 + s);
    REQUIRE(out.ok);
    sum += out.cpop.to_double();
  }
  const double mean = sum / sessions;
  const double expect = pirsim::expected_random_cpop(5, 2, 2, 2);
  CHECK(std::abs(mean - expect) / expect < 0.01);
}
