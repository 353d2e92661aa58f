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

#ifndef PIRSIM_SERIALIZATION_HPP_
#define PIRSIM_SERIALIZATION_HPP_

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "pirsim/decoder.hpp"
#include "pirsim/mds.hpp"
#include "pirsim/privacy.hpp"
#include "pirsim/robust_scheme.hpp"
#include "pirsim/simulator.hpp"

// JSON boundary conventions: node, file, pad and unit indices are 1-based on
// the wire and 0-based in memory; symbols are arrays of ell coordinates.
// Emission is deterministic (nlohmann objects sort keys), which is what makes
// the round-trip guarantees byte-exact.

namespace pirsim {

using nlohmann::json;

namespace detail {

inline ExtSymbol symbol_from_json(const json& j, int ell, std::uint32_t q,
                                  const std::string& where) {
  std::vector<FieldElement> coords;
  if (j.is_number_integer() && ell == 1) {
    coords.push_back(FieldElement(j.get<std::uint64_t>() % q, q));
  } else if (j.is_array()) {
    if (static_cast<int>(j.size()) != ell)
      throw std::runtime_error(where + ": symbol must have ell=" + std::to_string(ell) +
                               " coordinates");
    for (const auto& c : j) {
      if (!c.is_number_integer() || c.get<std::int64_t>() < 0)
        throw std::runtime_error(where + ": coordinates must be nonnegative integers");
      const std::uint64_t v = c.get<std::uint64_t>();
      if (v >= q) throw std::runtime_error(where + ": coordinate " + std::to_string(v) +
                                           " not below q=" + std::to_string(q));
      coords.push_back(FieldElement(v, q));
    }
  } else {
    throw std::runtime_error(where + ": symbol must be an array of coordinates");
  }
  return ExtSymbol(std::move(coords));
}

inline json symbol_to_json(const ExtSymbol& s) {
  json j = json::array();
  for (const auto& c : s.coords()) j.push_back(c.value());
  return j;
}

inline json file_to_json(const FileData& fd) {
  json rows = json::array();
  for (int b = 0; b < fd.rows; ++b) {
    json row = json::array();
    for (int t = 0; t < fd.cols; ++t) row.push_back(symbol_to_json(fd.at(b, t)));
    rows.push_back(row);
  }
  return rows;
}

inline FileData file_from_json(const json& j, int k, int alpha, int ell, std::uint32_t q,
                               const std::string& where) {
  if (!j.is_array() || static_cast<int>(j.size()) != k)
    throw std::runtime_error(where + ": expected " + std::to_string(k) + " rows");
  FileData fd(k, alpha, ell, q);
  for (int b = 0; b < k; ++b) {
    const json& row = j.at(b);
    if (!row.is_array() || static_cast<int>(row.size()) != alpha)
      throw std::runtime_error(where + ": expected k x alpha = " + std::to_string(k) + " x " +
                               std::to_string(alpha) + " shape");
    for (int t = 0; t < alpha; ++t)
      fd.at(b, t) = symbol_from_json(row.at(t), ell, q,
                                     where + " row " + std::to_string(b + 1));
  }
  return fd;
}

template <typename T>
inline T require(const json& j, const std::string& key, const std::string& where) {
  if (!j.contains(key)) throw std::runtime_error(where + ": missing key '" + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw std::runtime_error(where + ": bad value for key '" + key + "'");
  }
}

}  // namespace detail

/// Files as handed to the encoder: {"files": [k x alpha x ell ints, ...]}.
inline std::vector<FileData> files_from_json(const json& j, int k, int alpha, int ell,
                                             std::uint32_t q) {
  if (!j.contains("files") || !j.at("files").is_array())
    throw std::runtime_error("files: missing 'files' array");
  const json& arr = j.at("files");
  if (arr.empty()) throw std::runtime_error("files: m >= 1 required");
  std::vector<FileData> out;
  for (std::size_t f = 0; f < arr.size(); ++f)
    out.push_back(detail::file_from_json(arr.at(f), k, alpha, ell, q,
                                         "file " + std::to_string(f + 1)));
  return out;
}

inline json store_to_json(const StorageSystem& sys) {
  json j;
  j["q"] = sys.code.q;
  j["ell"] = sys.ell;
  j["n"] = sys.code.n;
  j["k"] = sys.code.k;
  j["m"] = sys.m;
  j["alpha"] = sys.alpha;
  json gen = json::array();
  for (int b = 0; b < sys.code.k; ++b) {
    json row = json::array();
    for (int c = 0; c < sys.code.n; ++c) row.push_back(sys.code.generator.at(b, c).value());
    gen.push_back(row);
  }
  j["generator"] = gen;
  json files = json::array();
  for (const auto& fd : sys.files) files.push_back(detail::file_to_json(fd));
  j["files"] = files;
  return j;
}

/// Load and fully validate a store: shapes, coordinate ranges, systematic
/// identity block, the MDS property, then re-derive the node shares.
inline StorageSystem store_from_json(const json& j) {
  const std::string where = "store";
  const auto q = detail::require<std::uint32_t>(j, "q", where);
  const auto ell = detail::require<int>(j, "ell", where);
  const auto n = detail::require<int>(j, "n", where);
  const auto k = detail::require<int>(j, "k", where);
  const auto m = detail::require<int>(j, "m", where);
  const auto alpha = detail::require<int>(j, "alpha", where);
  if (!is_prime(q)) throw std::runtime_error(where + ": q must be prime");
  if (k < 1 || n <= k) throw std::runtime_error(where + ": need n > k >= 1");
  if (ell < 1 || alpha < 1) throw std::runtime_error(where + ": ell and alpha must be >= 1");
  if (m < 1) throw std::runtime_error(where + ": m >= 1 required");

  if (!j.contains("generator")) throw std::runtime_error(where + ": missing key 'generator'");
  const json& gen = j.at("generator");
  if (!gen.is_array() || static_cast<int>(gen.size()) != k)
    throw std::runtime_error(where + ": generator must have k rows");
  MdsCode code;
  code.n = n;
  code.k = k;
  code.q = q;
  code.generator = FieldMatrix(k, n, q);
  for (int b = 0; b < k; ++b) {
    const json& row = gen.at(b);
    if (!row.is_array() || static_cast<int>(row.size()) != n)
      throw std::runtime_error(where + ": generator row " + std::to_string(b + 1) +
                               " must have n entries");
    for (int c = 0; c < n; ++c) {
      const auto v = row.at(c).get<std::int64_t>();
      if (v < 0 || v >= static_cast<std::int64_t>(q))
        throw std::runtime_error(where + ": generator entries must lie in [0, q)");
      code.generator.at(b, c) = FieldElement(static_cast<std::uint64_t>(v), q);
    }
  }
  for (int b = 0; b < k; ++b)
    for (int c = 0; c < k; ++c)
      if (code.generator.at(b, c).value() != (b == c ? 1u : 0u))
        throw std::runtime_error(where + ": generator is not systematic");
  if (!is_mds(code.generator)) throw std::runtime_error(where + ": generator is not MDS");

  if (!j.contains("files") || !j.at("files").is_array() ||
      static_cast<int>(j.at("files").size()) != m)
    throw std::runtime_error(where + ": files must be an array of m entries");
  std::vector<FileData> files;
  for (int f = 0; f < m; ++f)
    files.push_back(detail::file_from_json(j.at("files").at(f), k, alpha, ell, q,
                                           where + " file " + std::to_string(f + 1)));
  return encode_storage(code, ell, alpha, files);
}

/// CLI/session configuration: the system constants plus the failure model
/// and the seed.
struct RunConfig {
  SystemConfig sys;
  FailureModel model;
  std::uint64_t seed = 0;
};

inline json config_to_json(const RunConfig& rc) {
  json j;
  j["n"] = rc.sys.n;
  j["k"] = rc.sys.k;
  j["q"] = rc.sys.q;
  j["ell"] = rc.sys.ell;
  j["m"] = rc.sys.m;
  j["nu"] = rc.sys.nu;
  j["failure_model"] = rc.model.str();
  j["seed"] = rc.seed;
  return j;
}

inline RunConfig config_from_json(const json& j) {
  const std::string where = "config";
  RunConfig rc;
  rc.sys.n = detail::require<int>(j, "n", where);
  rc.sys.k = detail::require<int>(j, "k", where);
  rc.sys.q = detail::require<std::uint32_t>(j, "q", where);
  rc.sys.ell = detail::require<int>(j, "ell", where);
  rc.sys.m = detail::require<int>(j, "m", where);
  rc.sys.nu = detail::require<int>(j, "nu", where);
  rc.model = FailureModel::parse(j.contains("failure_model")
                                     ? j.at("failure_model").get<std::string>()
                                     : "none");
  rc.seed = j.contains("seed") ? j.at("seed").get<std::uint64_t>() : 0;
  return rc;
}

namespace detail {

inline json query_to_json(const QueryVector& qv) {
  json q;
  json coeffs = json::array();
  for (const auto& c : qv.coeffs) coeffs.push_back(c.value());
  q["coeffs"] = coeffs;
  json pads = json::array();
  for (int p : qv.spec.pads()) pads.push_back(p + 1);
  q["pads"] = pads;
  json units = json::array();
  if (qv.spec.unit_pos >= 0) units.push_back(qv.spec.unit_pos + 1);
  q["units"] = units;
  return q;
}

inline QueryVector query_from_json(const json& j, std::uint32_t q, const std::string& where) {
  QueryVector qv;
  for (const auto& c : detail::require<std::vector<std::int64_t>>(j, "coeffs", where)) {
    if (c < 0 || c >= static_cast<std::int64_t>(q))
      throw std::runtime_error(where + ": coefficient out of field range");
    qv.coeffs.push_back(FieldElement(static_cast<std::uint64_t>(c), q));
  }
  const auto pads = detail::require<std::vector<int>>(j, "pads", where);
  if (pads.empty() || pads.size() > 2)
    throw std::runtime_error(where + ": query must carry one or two pads");
  qv.spec.fresh_pad = pads[0] - 1;
  if (pads.size() == 2) qv.spec.extra_pad = pads[1] - 1;
  const auto units = detail::require<std::vector<int>>(j, "units", where);
  if (units.size() > 1) throw std::runtime_error(where + ": query carries at most one unit");
  if (!units.empty()) qv.spec.unit_pos = units[0] - 1;
  return qv;
}

}  // namespace detail

inline json transcript_to_json(const Transcript& tr) {
  json j;
  j["config"] = json{{"n", tr.config.n},   {"k", tr.config.k}, {"q", tr.config.q},
                     {"ell", tr.config.ell}, {"m", tr.config.m}, {"nu", tr.config.nu}};
  j["seed"] = tr.seed;
  j["f"] = tr.file + 1;
  json failed = json::array();
  for (int v : tr.failed) failed.push_back(v + 1);
  j["failed"] = failed;
  json pads = json::array();
  for (const auto& pad : tr.plan.pads) {
    json p = json::array();
    for (const auto& c : pad) p.push_back(c.value());
    pads.push_back(p);
  }
  j["pads"] = pads;
  json subs = json::array();
  for (std::size_t s = 0; s < tr.plan.queries.size(); ++s) {
    json sq;
    sq["pad"] = tr.plan.structure.subqueries[s].pad + 1;
    json queries;
    for (const auto& [node, qv] : tr.plan.queries[s])
      queries[std::to_string(node + 1)] = detail::query_to_json(qv);
    sq["queries"] = queries;
    subs.push_back(sq);
  }
  j["subqueries"] = subs;
  json resp = json::array();
  for (const auto& per_sub : tr.responses) {
    json r;
    for (const auto& [node, sym] : per_sub)
      r[std::to_string(node + 1)] = detail::symbol_to_json(sym);
    resp.push_back(r);
  }
  j["responses"] = resp;
  j["downloaded"] = tr.downloaded;
  return j;
}

inline Transcript transcript_from_json(const json& j) {
  const std::string where = "transcript";
  Transcript tr;
  if (!j.contains("config")) throw std::runtime_error(where + ": missing key 'config'");
  const json& cj = j.at("config");
  tr.config.n = detail::require<int>(cj, "n", where);
  tr.config.k = detail::require<int>(cj, "k", where);
  tr.config.q = detail::require<std::uint32_t>(cj, "q", where);
  tr.config.ell = detail::require<int>(cj, "ell", where);
  tr.config.m = detail::require<int>(cj, "m", where);
  tr.config.nu = detail::require<int>(cj, "nu", where);
  tr.seed = detail::require<std::uint64_t>(j, "seed", where);
  tr.file = detail::require<int>(j, "f", where) - 1;
  for (int v : detail::require<std::vector<int>>(j, "failed", where))
    tr.failed.push_back(v - 1);
  tr.downloaded = detail::require<int>(j, "downloaded", where);

  const UniversalParams up = universal_params(tr.config.n, tr.config.k, tr.config.nu);
  SessionStructure& st = tr.plan.structure;
  st.n = tr.config.n;
  st.k = tr.config.k;
  st.nu = tr.config.nu;
  st.q = tr.config.q;
  st.m = tr.config.m;
  st.alpha = up.alpha;
  st.file = tr.file;
  st.d = up.d;
  st.failed = tr.failed;
  st.layer1_count = up.d[0];

  for (const auto& pj : detail::require<json>(j, "pads", where)) {
    std::vector<FieldElement> pad;
    for (const auto& c : pj)
      pad.push_back(FieldElement(c.get<std::uint64_t>() % tr.config.q, tr.config.q));
    tr.plan.pads.push_back(std::move(pad));
  }

  if (!j.contains("subqueries") || !j.at("subqueries").is_array())
    throw std::runtime_error(where + ": missing subqueries");
  for (const auto& sj : j.at("subqueries")) {
    SubquerySpec spec;
    spec.pad = detail::require<int>(sj, "pad", where) - 1;
    std::map<int, QueryVector> realized;
    if (!sj.contains("queries")) throw std::runtime_error(where + ": subquery missing 'queries'");
    const json& queries = sj.at("queries");
    for (auto it = queries.begin(); it != queries.end(); ++it) {
      const int node = std::stoi(it.key()) - 1;
      QueryVector qv = detail::query_from_json(it.value(), tr.config.q,
                                               where + " node " + it.key());
      spec.queries[node] = qv.spec;
      realized[node] = std::move(qv);
    }
    st.subqueries.push_back(std::move(spec));
    tr.plan.queries.push_back(std::move(realized));
  }

  if (!j.contains("responses") || !j.at("responses").is_array())
    throw std::runtime_error(where + ": missing responses");
  for (const auto& rj : j.at("responses")) {
    std::map<int, ExtSymbol> per_sub;
    for (auto it = rj.begin(); it != rj.end(); ++it)
      per_sub[std::stoi(it.key()) - 1] = detail::symbol_from_json(
          it.value(), tr.config.ell, tr.config.q, where + " response " + it.key());
    tr.responses.push_back(std::move(per_sub));
  }
  return tr;
}

inline json decode_report_json(const Transcript& tr, const DecodeResult& dec) {
  json j;
  j["f"] = tr.file + 1;
  j["file"] = detail::file_to_json(dec.file);
  j["cpop_num"] = dec.cpop.num;
  j["cpop_den"] = dec.cpop.den;
  j["equations_used"] = dec.equations_used;
  json failed = json::array();
  for (int v : tr.failed) failed.push_back(v + 1);
  j["failed"] = failed;
  return j;
}

inline json audit_report_json(const AuditReport& report) {
  json j;
  j["all_pass"] = report.all_pass;
  json nodes = json::array();
  for (const auto& na : report.nodes) {
    json nj;
    nj["node"] = na.node + 1;
    nj["pairs_compared"] = na.pairs_compared;
    nj["method"] = na.method;
    nj["verdict"] = na.pass ? "pass" : "fail";
    nj["max_tv"] = na.max_tv;
    nodes.push_back(nj);
  }
  j["nodes"] = nodes;
  return j;
}

}  // namespace pirsim

#endif  // PIRSIM_SERIALIZATION_HPP_
