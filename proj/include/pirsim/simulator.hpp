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

#ifndef PIRSIM_SIMULATOR_HPP_
#define PIRSIM_SIMULATOR_HPP_

#include <algorithm>
#include <cstdint>
#include <functional>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "pirsim/decoder.hpp"
#include "pirsim/mds.hpp"
#include "pirsim/privacy.hpp"
#include "pirsim/robust_scheme.hpp"

namespace pirsim {

/// How nodes become unresponsive for a session. Random and latency models
/// never emit more than nu failures; a fixed set may, and the session then
/// reports capacity exceeded instead of running.
struct FailureModel {
  enum class Kind { kNone, kFixed, kRandom, kLatency };

  Kind kind = Kind::kNone;
  std::vector<int> fixed;       // 0-based node indices
  int random_max = 0;           // failure count drawn uniformly from [0, random_max]
  double latency_mean = 1.0;    // exponential latency per node
  double latency_timeout = 1.0; // nodes slower than this get cut, nu slowest at most

  /// Accepts "none", "fixed:1,3" (1-based nodes), "random:2",
  /// "latency:0.5,2.0" (mean, timeout).
  static FailureModel parse(const std::string& text) {
    FailureModel fm;
    if (text.empty() || text == "none") return fm;
    const auto colon = text.find(':');
    const std::string head = text.substr(0, colon);
    const std::string tail = colon == std::string::npos ? "" : text.substr(colon + 1);
    auto split_tail = [&tail]() {
      std::vector<std::string> out;
      std::stringstream ss(tail);
      std::string item;
      while (std::getline(ss, item, ',')) out.push_back(item);
      return out;
    };
    if (head == "fixed") {
      fm.kind = Kind::kFixed;
      for (const auto& item : split_tail()) {
        const int node = std::stoi(item);
        if (node < 1) throw std::invalid_argument("failure model: node indices are 1-based");
        fm.fixed.push_back(node - 1);
      }
      std::sort(fm.fixed.begin(), fm.fixed.end());
      fm.fixed.erase(std::unique(fm.fixed.begin(), fm.fixed.end()), fm.fixed.end());
    } else if (head == "random") {
      fm.kind = Kind::kRandom;
      fm.random_max = std::stoi(tail);
      if (fm.random_max < 0) throw std::invalid_argument("failure model: random count negative");
    } else if (head == "latency") {
      fm.kind = Kind::kLatency;
      const auto parts = split_tail();
      if (parts.size() != 2)
        throw std::invalid_argument("failure model: latency needs mean,timeout");
      fm.latency_mean = std::stod(parts[0]);
      fm.latency_timeout = std::stod(parts[1]);
      if (fm.latency_mean <= 0) throw std::invalid_argument("failure model: mean must be > 0");
    } else {
      throw std::invalid_argument("failure model: unknown kind '" + head + "'");
    }
    return fm;
  }

  std::string str() const {
    switch (kind) {
      case Kind::kNone:
        return "none";
      case Kind::kFixed: {
        std::string s = "fixed:";
        for (std::size_t i = 0; i < fixed.size(); ++i) {
          if (i) s.push_back(',');
          s += std::to_string(fixed[i] + 1);
        }
        return s;
      }
      case Kind::kRandom:
        return "random:" + std::to_string(random_max);
      case Kind::kLatency: {
        std::ostringstream os;
        os << "latency:" << latency_mean << "," << latency_timeout;
        return os.str();
      }
    }
    return "none";
  }
};

/// Draw this session's failure set. Random draws a uniform size in
/// [0, min(random_max, nu)] then a uniform subset; latency cuts nodes whose
/// exponential latency exceeds the timeout, keeping only the nu slowest cut
/// when more overrun. Fixed sets pass through unchecked (capacity handling
/// is the session's job).
inline std::vector<int> draw_failures(const FailureModel& fm, int n, int nu, Rng& rng) {
  switch (fm.kind) {
    case FailureModel::Kind::kNone:
      return {};
    case FailureModel::Kind::kFixed:
      return fm.fixed;
    case FailureModel::Kind::kRandom: {
      const int max = std::min(fm.random_max, nu);
      const int size = static_cast<int>(rng.uniform_below(max + 1));
      std::vector<int> idx(n);
      std::iota(idx.begin(), idx.end(), 0);
      for (int i = 0; i < size; ++i)
        std::swap(idx[i], idx[i + rng.uniform_below(n - i)]);
      std::vector<int> failed(idx.begin(), idx.begin() + size);
      std::sort(failed.begin(), failed.end());
      return failed;
    }
    case FailureModel::Kind::kLatency: {
      std::vector<std::pair<double, int>> slow;  // (latency, node), beyond timeout
      for (int v = 0; v < n; ++v) {
        const double lat = rng.exponential(fm.latency_mean);
        if (lat > fm.latency_timeout) slow.emplace_back(lat, v);
      }
      std::sort(slow.begin(), slow.end(), std::greater<>());
      if (static_cast<int>(slow.size()) > nu) slow.resize(nu);
      std::vector<int> failed;
      for (const auto& [lat, v] : slow) {
        (void)lat;
        failed.push_back(v);
      }
      std::sort(failed.begin(), failed.end());
      return failed;
    }
  }
  return {};
}

enum class SessionPhase { kInit, kLayer1Sent, kFailuresObserved, kLayer2Sent, kDecoded, kAborted };

inline const char* phase_name(SessionPhase p) {
  switch (p) {
    case SessionPhase::kInit: return "init";
    case SessionPhase::kLayer1Sent: return "layer1_sent";
    case SessionPhase::kFailuresObserved: return "failures_observed";
    case SessionPhase::kLayer2Sent: return "layer2_sent";
    case SessionPhase::kDecoded: return "decoded";
    case SessionPhase::kAborted: return "aborted";
  }
  return "?";
}

struct SessionOutcome {
  bool ok = false;
  std::string error;
  std::vector<SessionPhase> phases{SessionPhase::kInit};
  Transcript transcript;
  FileData decoded;
  Rational cpop;
  int equations_used = 0;
};

/// One node's answer to one query vector.
inline ExtSymbol node_respond(const std::vector<ExtSymbol>& store,
                              const std::vector<FieldElement>& qv) {
  return respond(store, qv);
}

/// Run one full retrieval session against the simulated store. Deterministic
/// in (storage, cfg, file, model, seed): the seed derives one stream for the
/// environment (failure realization) and one for the user (pads), so the
/// adaptive schedule cannot perturb either.
inline SessionOutcome run_session(const StorageSystem& storage, const SystemConfig& cfg,
                                  int file, const FailureModel& model, std::uint64_t seed) {
  SessionOutcome out;
  auto abort_with = [&out](const std::string& why) -> SessionOutcome& {
    out.ok = false;
    out.error = why;
    out.phases.push_back(SessionPhase::kAborted);
    return out;
  };

  if (storage.code.n != cfg.n || storage.code.k != cfg.k || storage.code.q != cfg.q ||
      storage.ell != cfg.ell || storage.m != cfg.m)
    return abort_with("config does not match the store");
  const UniversalParams up = universal_params(cfg.n, cfg.k, cfg.nu);
  if (storage.alpha != up.alpha) return abort_with("store alpha does not match scheme alpha");
  if (file < 0 || file >= cfg.m) return abort_with("file index out of range");

  Rng env_rng(seed);
  Rng user_rng(seed ^ 0x9e3779b97f4a7c15ull);

  std::vector<int> failed = draw_failures(model, cfg.n, cfg.nu, env_rng);
  std::sort(failed.begin(), failed.end());
  if (static_cast<int>(failed.size()) > cfg.nu)
    return abort_with("capacity exceeded: " + std::to_string(failed.size()) +
                      " failures with nu=" + std::to_string(cfg.nu));

  Transcript tr;
  tr.config = cfg;
  tr.seed = seed;
  tr.file = file;
  tr.failed = failed;
  try {
    const SessionStructure st = plan_structure(up, cfg.q, cfg.m, file, failed,
                                               decodability_validator(storage.code));
    tr.plan = realize_plan(st, user_rng);
  } catch (const std::exception& e) {
    return abort_with(std::string("planning failed: ") + e.what());
  }

  const SessionStructure& st = tr.plan.structure;
  tr.responses.resize(st.subqueries.size());
  for (int s = 0; s < st.layer1_count; ++s) {
    for (const auto& [node, qv] : tr.plan.queries[s]) {
      if (st.is_failed(node)) continue;
      tr.responses[s][node] = node_respond(storage.shares[node], qv.coeffs);
      ++tr.downloaded;
    }
  }
  out.phases.push_back(SessionPhase::kLayer1Sent);
  out.phases.push_back(SessionPhase::kFailuresObserved);
  if (!failed.empty()) {
    for (std::size_t s = st.layer1_count; s < st.subqueries.size(); ++s) {
      for (const auto& [node, qv] : tr.plan.queries[s]) {
        if (st.is_failed(node))
          return abort_with("layer-2 query addressed to a failed node");
        tr.responses[s][node] = node_respond(storage.shares[node], qv.coeffs);
        ++tr.downloaded;
      }
    }
    out.phases.push_back(SessionPhase::kLayer2Sent);
  }

  out.transcript = tr;
  try {
    const DecodeResult dec = decode(tr, storage.code);
    out.decoded = dec.file;
    out.cpop = dec.cpop;
    out.equations_used = dec.equations_used;
  } catch (const std::exception& e) {
    return abort_with(std::string("decode failed: ") + e.what());
  }
  if (!(out.decoded == storage.files[file]))
    return abort_with("decode mismatch against the stored file");
  out.ok = true;
  out.phases.push_back(SessionPhase::kDecoded);
  return out;
}

/// Expected download rate under the random failure model: the failure count
/// is uniform on [0, min(random_max, nu)] and the rate depends only on it.
inline double expected_random_cpop(int n, int k, int nu, int random_max) {
  const int max = std::min(random_max, nu);
  double sum = 0.0;
  for (int i = 0; i <= max; ++i) sum += optimal_cpop(n - i, k).to_double();
  return sum / (max + 1);
}

}  // namespace pirsim

#endif  // PIRSIM_SIMULATOR_HPP_
