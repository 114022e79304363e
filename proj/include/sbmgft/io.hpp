// Copyright 2026 The sbm-gft Authors.
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

#pragma once

#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "sbmgft/errors.hpp"
#include "sbmgft/fourier.hpp"
#include "sbmgft/group.hpp"
#include "sbmgft/sbm.hpp"

namespace sbmgft {

inline constexpr const char* kArtifactVersion = "0.1.0";

// ---------------------------------------------------------------------------
// Formatting and hashing.
// ---------------------------------------------------------------------------

/// Shortest round-trip decimal representation; stable across runs, so CSV
/// output is byte-identical for identical inputs.
inline std::string format_double(double value) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

inline std::uint64_t fnv1a64(std::string_view data) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::string hex64(std::uint64_t value) {
  static const char* digits = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[i] = digits[value & 0xf];
    value >>= 4;
  }
  return out;
}

/// Hash of the canonical (sorted-key) JSON dump of a config.
inline std::string config_hash(const nlohmann::json& config) {
  return hex64(fnv1a64(config.dump()));
}

// ---------------------------------------------------------------------------
// CSV emission. Every file starts with a manifest comment carrying the
// config hash and artifact version.
// ---------------------------------------------------------------------------

class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, const std::string& cfg_hash,
            const std::vector<std::string>& columns) {
    std::filesystem::create_directories(path.parent_path().empty()
                                            ? "."
                                            : path.parent_path());
    out_.open(path);
    if (!out_) throw validation_error("cannot open output file: " + path.string());
    out_ << "# manifest config_hash=" << cfg_hash << " version="
         << kArtifactVersion << "\n";
    write_row(columns);
  }

  void write_row(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out_ << ',';
      out_ << cells[i];
    }
    out_ << '\n';
  }

  /// Convenience for mixed label + numeric rows.
  void write_row(const std::string& label, const std::vector<double>& values) {
    out_ << label;
    for (double v : values) out_ << ',' << format_double(v);
    out_ << '\n';
  }

  void write_numeric_row(const std::vector<double>& values) {
    for (std::size_t i = 0; i < values.size(); ++i) {
      if (i) out_ << ',';
      out_ << format_double(values[i]);
    }
    out_ << '\n';
  }

 private:
  std::ofstream out_;
};

// ---------------------------------------------------------------------------
// Spec ingestion.
// ---------------------------------------------------------------------------

inline nlohmann::json load_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw validation_error("cannot open file: " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw validation_error("invalid JSON in " + path.string() + ": " + e.what());
  }
  return j;
}

/// Parses {"A": [[...]], "mu": [...], "N": 6000}.
inline SBMSpec parse_sbm_spec(const nlohmann::json& j) {
  try {
    const auto& rows = j.at("A");
    const int n = static_cast<int>(rows.size());
    Eigen::MatrixXd a(n, n);
    for (int i = 0; i < n; ++i) {
      if (static_cast<int>(rows[i].size()) != n)
        throw validation_error("spec: probability matrix is not square");
      for (int c = 0; c < n; ++c) a(i, c) = rows[i][c].get<double>();
    }
    const auto& mu_json = j.at("mu");
    if (static_cast<int>(mu_json.size()) != n)
      throw validation_error("spec: measure size does not match matrix");
    Eigen::VectorXd mu(n);
    for (int i = 0; i < n; ++i) mu(i) = mu_json[i].get<double>();
    return SBMSpec(a, mu, j.at("N").get<int>());
  } catch (const nlohmann::json::exception& e) {
    throw validation_error(std::string("spec: ") + e.what());
  }
}

/// A Cayley model read from configuration: the group, its connection
/// function, and optionally a measure/graph size.
struct CayleySpecConfig {
  AbelianGroup group;
  ConnectionFunction connection;
  std::optional<Eigen::VectorXd> mu;
  std::optional<int> n_vertices;

  SBMSpec to_sbm_spec() const {
    if (!n_vertices)
      throw validation_error("cayley spec: N is required for this operation");
    const int n = group.order();
    const Eigen::VectorXd measure =
        mu ? *mu : Eigen::VectorXd::Constant(n, 1.0 / n);
    return SBMSpec(cayley_matrix(group, connection), measure, *n_vertices);
  }
};

/// Parses {"group": [5], "connection": {"0": 0.2, "1": 0.8, ...},
/// "mu": [...]?, "N": ...?}. Connection keys are comma-joined coordinates.
inline CayleySpecConfig parse_cayley_spec(const nlohmann::json& j) {
  try {
    std::vector<int> factors;
    for (const auto& f : j.at("group")) factors.push_back(f.get<int>());
    AbelianGroup group(factors);

    const auto& conn = j.at("connection");
    std::vector<double> values(group.order(), -1.0);
    for (const auto& [key, value] : conn.items()) {
      std::vector<int> coords;
      std::stringstream ss(key);
      std::string part;
      while (std::getline(ss, part, ',')) {
        try {
          coords.push_back(std::stoi(part));
        } catch (const std::exception&) {
          throw validation_error("cayley spec: malformed element key: " + key);
        }
      }
      const int idx = group.index_of(GroupElement{coords});
      values[idx] = value.get<double>();
    }
    for (double v : values)
      if (v < 0.0)
        throw validation_error(
            "cayley spec: connection function is missing group elements");

    CayleySpecConfig cfg{std::move(group),
                         ConnectionFunction(AbelianGroup(factors),
                                            std::move(values)),
                         std::nullopt, std::nullopt};
    if (j.contains("mu")) {
      Eigen::VectorXd mu(j["mu"].size());
      for (std::size_t i = 0; i < j["mu"].size(); ++i)
        mu(i) = j["mu"][i].get<double>();
      cfg.mu = mu;
    } else if (j.contains("blocks")) {
      BlockSizes k;
      for (const auto& b : j["blocks"]) k.k.push_back(b.get<int>());
      cfg.mu = k.measure();
      cfg.n_vertices = k.total();
    }
    if (j.contains("N")) cfg.n_vertices = j["N"].get<int>();
    return cfg;
  } catch (const nlohmann::json::exception& e) {
    throw validation_error(std::string("cayley spec: ") + e.what());
  }
}

/// Either flavor of model description, keyed on the fields present.
using SpecConfig = std::variant<SBMSpec, CayleySpecConfig>;

inline SpecConfig parse_spec(const nlohmann::json& j) {
  if (j.contains("group")) return parse_cayley_spec(j);
  return parse_sbm_spec(j);
}

inline SBMSpec spec_from_config(const SpecConfig& cfg) {
  if (std::holds_alternative<SBMSpec>(cfg)) return std::get<SBMSpec>(cfg);
  return std::get<CayleySpecConfig>(cfg).to_sbm_spec();
}

// ---------------------------------------------------------------------------
// Graph persistence: edge list CSV (u,v with u < v, 0-based) plus a JSON
// header with the size, realized block sizes and seed.
// ---------------------------------------------------------------------------

inline void write_graph(const SampledGraph& g,
                        const std::filesystem::path& edges_path,
                        const std::filesystem::path& header_path,
                        const std::string& cfg_hash) {
  CsvWriter csv(edges_path, cfg_hash, {"u", "v"});
  for (int u = 0; u < g.n_vertices; ++u)
    for (std::uint32_t t = g.row_offsets[u]; t < g.row_offsets[u + 1]; ++t) {
      const std::uint32_t v = g.neighbors[t];
      if (v > static_cast<std::uint32_t>(u))
        csv.write_row({std::to_string(u), std::to_string(v)});
    }

  nlohmann::json header;
  header["N"] = g.n_vertices;
  header["k"] = g.k.k;
  header["seed"] = g.seed;
  std::ofstream out(header_path);
  if (!out)
    throw validation_error("cannot open output file: " + header_path.string());
  out << header.dump(2) << "\n";
}

// ---------------------------------------------------------------------------
// Spectrum / basis export.
// ---------------------------------------------------------------------------

inline void write_spectrum_csv(const std::filesystem::path& path,
                               const std::string& cfg_hash,
                               const Eigen::VectorXd& eigenvalues,
                               const Eigen::VectorXd& residuals) {
  CsvWriter csv(path, cfg_hash, {"index", "eigenvalue", "residual"});
  for (int i = 0; i < eigenvalues.size(); ++i)
    csv.write_numeric_row({static_cast<double>(i), eigenvalues(i),
                           i < residuals.size() ? residuals(i) : 0.0});
}

/// Basis CSV: one row per basis vector (eigen_index, W eigenvalue, then the
/// N vector entries), plus a JSON metadata file with the spec hash and the
/// tolerances that produced it.
inline void write_basis(const SBMFourierBasis& basis,
                        const std::filesystem::path& csv_path,
                        const std::filesystem::path& meta_path,
                        const std::string& cfg_hash) {
  std::vector<std::string> columns = {"eigen_index", "w_eigenvalue"};
  for (int i = 0; i < basis.dim(); ++i) columns.push_back("v" + std::to_string(i));
  CsvWriter csv(csv_path, cfg_hash, columns);
  for (int c = 0; c < basis.rank(); ++c) {
    std::vector<double> row;
    row.reserve(basis.dim() + 2);
    row.push_back(c);
    row.push_back(basis.eigenvalues(c) * basis.n_vertices);
    for (int i = 0; i < basis.dim(); ++i) row.push_back(basis.lifted(i, c));
    csv.write_numeric_row(row);
  }

  nlohmann::json meta;
  meta["config_hash"] = cfg_hash;
  meta["version"] = kArtifactVersion;
  meta["N"] = basis.n_vertices;
  meta["rank"] = basis.rank();
  meta["blocks"] = basis.k.k;
  meta["tolerances"] = {{"zero", basis.tolerances.zero},
                        {"group", basis.tolerances.group},
                        {"residual", basis.tolerances.residual}};
  std::ofstream out(meta_path);
  if (!out)
    throw validation_error("cannot open output file: " + meta_path.string());
  out << meta.dump(2) << "\n";
}

/// Signal ingestion: one real value per line (header lines starting with '#'
/// or a non-numeric first token are skipped).
inline Eigen::VectorXd read_signal_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw validation_error("cannot open signal file: " + path.string());
  std::vector<double> values;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    double v = 0.0;
    const auto res = std::from_chars(line.data(), line.data() + line.size(), v);
    if (res.ec != std::errc()) {
      if (values.empty()) continue;  // header row
      throw validation_error("signal file has a malformed line: " + line);
    }
    values.push_back(v);
  }
  if (values.empty())
    throw validation_error("signal file contains no values: " + path.string());
  return Eigen::Map<Eigen::VectorXd>(values.data(), values.size());
}

}  // namespace sbmgft
