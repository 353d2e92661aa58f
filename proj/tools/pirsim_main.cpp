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

// pirsim: encode MDS-coded stores, run robust private retrieval sessions,
// reproduce the reference query grids, audit privacy, and benchmark cPoP.
//
// Exit codes: 0 success, 1 usage or I/O error, 2 validation or protocol
// error, 3 session capacity exceeded, 4 requested checks failed.

#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "pirsim/decoder.hpp"
#include "pirsim/mds.hpp"
#include "pirsim/privacy.hpp"
#include "pirsim/rational.hpp"
#include "pirsim/repro.hpp"
#include "pirsim/robust_scheme.hpp"
#include "pirsim/serialization.hpp"
#include "pirsim/simulator.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitIo = 1;
constexpr int kExitValidation = 2;
constexpr int kExitCapacity = 3;
constexpr int kExitCheckFailed = 4;

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

pirsim::json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  pirsim::json j;
  in >> j;
  return j;
}

void write_json_file(const std::string& path, const pirsim::json& j) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  out << j.dump(2) << "\n";
}

std::uint64_t default_seed() {
  const char* env = std::getenv("PIRSIM_SEED");
  if (env == nullptr || *env == '\0') return 0;
  try {
    return std::stoull(env);
  } catch (const std::exception&) {
    throw IoError("PIRSIM_SEED is not an unsigned integer");
  }
}

// Largest robustness level whose stripe count matches the store; the store
// file does not record nu, so it is recovered from alpha.
int detect_nu(const pirsim::StorageSystem& s) {
  int best = -1;
  for (int nu = 0; nu <= s.code.n - s.code.k - 1; ++nu)
    if (pirsim::universal_params(s.code.n, s.code.k, nu).alpha == s.alpha) best = nu;
  return best;
}

int cmd_encode(const std::string& config_path, const std::string& files_path,
               const std::string& out_path) {
  const pirsim::RunConfig rc = pirsim::config_from_json(read_json_file(config_path));
  const pirsim::UniversalParams up =
      pirsim::universal_params(rc.sys.n, rc.sys.k, rc.sys.nu);
  const pirsim::MdsCode code = pirsim::make_mds_code(rc.sys.n, rc.sys.k, rc.sys.q);
  const std::vector<pirsim::FileData> files = pirsim::files_from_json(
      read_json_file(files_path), rc.sys.k, up.alpha, rc.sys.ell, rc.sys.q);
  if (static_cast<int>(files.size()) != rc.sys.m)
    throw std::invalid_argument("config expects m=" + std::to_string(rc.sys.m) + " files, got " +
                                std::to_string(files.size()));
  const pirsim::StorageSystem sys = pirsim::encode_storage(code, rc.sys.ell, up.alpha, files);
  write_json_file(out_path, pirsim::store_to_json(sys));
  std::cout << "encoded " << rc.sys.m << " file(s) across " << rc.sys.n << " nodes into "
            << out_path << "\n";
  return kExitOk;
}

int cmd_retrieve(const std::string& store_path, int f, const std::string& failures, int nu,
                 std::uint64_t seed, const std::string& transcript_out,
                 const std::string& report_out) {
  const pirsim::StorageSystem storage = pirsim::store_from_json(read_json_file(store_path));
  if (nu < 0) {
    nu = detect_nu(storage);
    if (nu < 0)
      throw std::invalid_argument("store stripe count matches no robustness level; pass --nu");
  }
  if (f < 1 || f > storage.m)
    throw std::invalid_argument("--f out of range 1.." + std::to_string(storage.m));
  const pirsim::FailureModel model = pirsim::FailureModel::parse(failures);
  const pirsim::SystemConfig cfg{storage.code.n, storage.code.k, storage.code.q, storage.ell,
                                 storage.m,      nu};
  const pirsim::SessionOutcome run = pirsim::run_session(storage, cfg, f - 1, model, seed);
  if (!run.ok) {
    std::cerr << "session failed: " << run.error << "\n";
    return run.error.rfind("capacity exceeded", 0) == 0 ? kExitCapacity : kExitValidation;
  }
  pirsim::DecodeResult dec;
  dec.file = run.decoded;
  dec.cpop = run.cpop;
  dec.equations_used = run.equations_used;
  const pirsim::json report = pirsim::decode_report_json(run.transcript, dec);
  if (!report_out.empty()) write_json_file(report_out, report);
  if (!transcript_out.empty())
    write_json_file(transcript_out, pirsim::transcript_to_json(run.transcript));
  std::cout << report.dump(2) << "\n";
  std::cout << "cPoP = " << run.cpop.str() << "\n";
  return kExitOk;
}

int cmd_repro(int grid) {
  const std::vector<pirsim::ReproCheck> checks =
      grid == 1 ? pirsim::repro_4x2() : pirsim::repro_5x2();
  int failed = 0;
  for (const auto& c : checks) {
    std::cout << (c.pass ? "PASS  " : "FAIL  ") << c.label << "\n";
    if (!c.pass) ++failed;
  }
  std::cout << checks.size() - failed << "/" << checks.size() << " checks passed\n";
  return failed == 0 ? kExitOk : kExitCheckFailed;
}

// Audits the planner as deployed: structures are built with the same decoder
// rank validator that live sessions use.
int cmd_audit(const std::string& config_path, const std::string& mode, std::uint64_t sessions,
              std::uint64_t seed, bool broken_planner) {
  const pirsim::RunConfig rc = pirsim::config_from_json(read_json_file(config_path));
  const pirsim::UniversalParams up =
      pirsim::universal_params(rc.sys.n, rc.sys.k, rc.sys.nu);
  const pirsim::MdsCode code = pirsim::make_mds_code(rc.sys.n, rc.sys.k, rc.sys.q);
  const pirsim::PlanValidator validate = pirsim::decodability_validator(code);

  pirsim::AuditReport merged;
  if (mode == "exact") {
    // Sweep every failure pattern within capacity; a node must see the same
    // query distribution whichever file is wanted, under every pattern.
    std::vector<pirsim::NodeAudit> per_node(rc.sys.n);
    for (int v = 0; v < rc.sys.n; ++v) {
      per_node[v].node = v;
      per_node[v].method = "exact";
      per_node[v].pass = true;
    }
    for (std::uint32_t mask = 0; mask < (1u << rc.sys.n); ++mask) {
      std::vector<int> failed;
      for (int v = 0; v < rc.sys.n; ++v)
        if (mask & (1u << v)) failed.push_back(v);
      if (static_cast<int>(failed.size()) > rc.sys.nu) continue;
      const pirsim::AuditReport one =
          pirsim::exact_audit(up, rc.sys, failed, validate, broken_planner);
      for (const auto& na : one.nodes) {
        pirsim::NodeAudit& acc = per_node[na.node];
        acc.pairs_compared += na.pairs_compared;
        acc.max_tv = std::max(acc.max_tv, na.max_tv);
        acc.pass = acc.pass && na.pass;
      }
    }
    merged.nodes = per_node;
    merged.all_pass = true;
    for (const auto& na : merged.nodes) merged.all_pass = merged.all_pass && na.pass;
  } else {
    std::vector<int> failed;
    switch (rc.model.kind) {
      case pirsim::FailureModel::Kind::kNone:
        break;
      case pirsim::FailureModel::Kind::kFixed:
        failed = rc.model.fixed;
        break;
      default:
        throw std::invalid_argument("sampled audit needs failure_model none or fixed:...");
    }
    pirsim::SampledAuditOptions opt;
    opt.sessions = sessions;
    opt.seed = seed != 0 ? seed : rc.seed;
    opt.unpadded_payload = broken_planner;
    merged = pirsim::sampled_audit(up, rc.sys, failed, opt, validate);
  }
  std::cout << pirsim::audit_report_json(merged).dump(2) << "\n";
  std::cout << (merged.all_pass ? "PASS" : "FAIL") << ": query distributions "
            << (merged.all_pass ? "indistinguishable" : "distinguishable") << " across files\n";
  return merged.all_pass ? kExitOk : kExitCheckFailed;
}

int cmd_bench(int n, int k, int nu, std::uint32_t q, std::uint64_t seed) {
  const pirsim::UniversalParams up = pirsim::universal_params(n, k, nu);
  if (q == 0) q = pirsim::smallest_mds_prime(n, k);
  const pirsim::MdsCode code = pirsim::make_mds_code(n, k, q);
  pirsim::Rng store_rng(seed);
  const pirsim::StorageSystem storage = pirsim::random_storage(code, 1, 1, up.alpha, store_rng);
  const pirsim::SystemConfig cfg{n, k, q, 1, 1, nu};

  std::cout << "n,k,nu,i,cpop_num,cpop_den,formula_num,formula_den,match\n";
  bool all_match = true;
  for (int i = 0; i <= nu; ++i) {
    pirsim::FailureModel model;
    if (i > 0) {
      model.kind = pirsim::FailureModel::Kind::kFixed;
      for (int v = 0; v < i; ++v) model.fixed.push_back(v);
    }
    const pirsim::SessionOutcome run =
        pirsim::run_session(storage, cfg, 0, model, seed + static_cast<std::uint64_t>(i) + 1);
    if (!run.ok) {
      std::cerr << "bench session i=" << i << " failed: " << run.error << "\n";
      return kExitValidation;
    }
    const pirsim::Rational formula = pirsim::optimal_cpop(n - i, k);
    const bool match = run.cpop == formula;
    all_match = all_match && match;
    std::cout << n << "," << k << "," << nu << "," << i << "," << run.cpop.num << ","
              << run.cpop.den << "," << formula.num << "," << formula.den << ","
              << (match ? 1 : 0) << "\n";
  }
  return all_match ? kExitOk : kExitCheckFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"robust private information retrieval on MDS-coded storage"};
  app.require_subcommand(1);

  std::string config_path, files_path, out_path, store_path, failures = "none";
  std::string transcript_out, report_out, mode = "exact";
  int f = 1, nu = -1, grid = 1;
  int bench_n = 0, bench_k = 0, bench_nu = 0;
  std::uint32_t q = 0;
  std::uint64_t seed = 0, sessions = 100000;
  bool broken_planner = false;

  CLI::App* enc = app.add_subcommand("encode", "encode plaintext files into a coded store");
  enc->add_option("--config", config_path, "system config JSON")->required();
  enc->add_option("--files", files_path, "plaintext files JSON")->required();
  enc->add_option("--out", out_path, "output store JSON")->required();

  CLI::App* ret = app.add_subcommand("retrieve", "privately retrieve one file from a store");
  ret->add_option("--store", store_path, "store JSON produced by encode")->required();
  ret->add_option("--f", f, "file index to retrieve (1-based)")->required();
  ret->add_option("--failures", failures, "failure model: none | fixed:a,b | random:c | latency:mean,timeout");
  ret->add_option("--nu", nu, "robustness level (default: inferred from the store)");
  ret->add_option("--seed", seed, "session seed (default: $PIRSIM_SEED or 0)");
  ret->add_option("--transcript-out", transcript_out, "write the full session transcript JSON here");
  ret->add_option("--report-out", report_out, "write the decode report JSON here");

  CLI::App* rep = app.add_subcommand("repro", "verify the embedded reference query grids");
  rep->add_option("grid", grid, "1 = (4,2) one-robust, 2 = (5,2) two-robust")
      ->required()
      ->check(CLI::Range(1, 2));

  CLI::App* aud = app.add_subcommand("audit", "verify query distributions leak nothing about the file index");
  aud->add_option("--config", config_path, "system config JSON")->required();
  aud->add_option("--mode", mode, "exact enumeration or sampled sessions")
      ->check(CLI::IsMember({"exact", "sample"}));
  aud->add_option("--sessions", sessions, "session count for --mode=sample");
  aud->add_option("--seed", seed, "sampling seed (default: config seed)");
  aud->add_flag("--broken-planner", broken_planner,
                "negative control: drop fresh pads from payload queries");

  CLI::App* ben = app.add_subcommand("bench", "measure cPoP against the n_i/(n_i-k) target");
  ben->add_option("--n", bench_n, "storage nodes")->required();
  ben->add_option("--k", bench_k, "code dimension")->required();
  ben->add_option("--nu", bench_nu, "robustness level")->required();
  ben->add_option("--q", q, "field size (default: smallest usable prime)");
  ben->add_option("--seed", seed, "store and session seed");

  try {
    seed = default_seed();
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitIo;
  }

  try {
    if (enc->parsed()) return cmd_encode(config_path, files_path, out_path);
    if (ret->parsed())
      return cmd_retrieve(store_path, f, failures, nu, seed, transcript_out, report_out);
    if (rep->parsed()) return cmd_repro(grid);
    if (aud->parsed()) return cmd_audit(config_path, mode, sessions, seed, broken_planner);
    if (ben->parsed()) return cmd_bench(bench_n, bench_k, bench_nu, q, seed);
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  }
  return kExitIo;
}
