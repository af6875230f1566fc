#pragma once

#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "tomo/estimator.hpp"
#include "tomo/measurement.hpp"
#include "tomo/sampling.hpp"
#include "tomo/states.hpp"

namespace tomo {

using nlohmann::json;

namespace detail {

inline const json& require_field(const json& j, const char* name,
                                 const char* context) {
  if (!j.is_object() || !j.contains(name)) {
    throw ParseError(std::string(context) + ": missing field '" + name + "'");
  }
  return j.at(name);
}

inline std::uint64_t fnv1a64(const unsigned char* data, std::size_t size,
                             std::uint64_t state = 0xcbf29ce484222325ULL) {
  for (std::size_t i = 0; i < size; ++i) {
    state ^= data[i];
    state *= 0x100000001b3ULL;
  }
  return state;
}

inline std::string hex64(std::uint64_t value) {
  char buffer[17];
  std::snprintf(buffer, sizeof(buffer), "%016llx",
                static_cast<unsigned long long>(value));
  return std::string(buffer);
}

// Digest of the design matrix recomputed from the projectors by the trace
// route. Both save and load hash the same recomputation, so the digest is
// stable across the JSON round-trip (doubles round-trip exactly).
inline std::string design_checksum(const std::vector<ComplexMatrix>& projectors) {
  const int n_qubits = qubits_for_dim(projectors.front().rows());
  const RealMatrix design =
      design_from_projectors(projectors, cached_pauli_basis(n_qubits));
  std::uint64_t state = 0xcbf29ce484222325ULL;
  for (Eigen::Index r = 0; r < design.rows(); ++r) {
    for (Eigen::Index c = 0; c < design.cols(); ++c) {
      const double value = design(r, c);
      unsigned char bytes[sizeof(double)];
      std::memcpy(bytes, &value, sizeof(double));
      state = fnv1a64(bytes, sizeof(double), state);
    }
  }
  return hex64(state);
}

}  // namespace detail

inline json matrix_to_json(const ComplexMatrix& m) {
  json re = json::array();
  json im = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json re_row = json::array();
    json im_row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      re_row.push_back(m(r, c).real());
      im_row.push_back(m(r, c).imag());
    }
    re.push_back(std::move(re_row));
    im.push_back(std::move(im_row));
  }
  return json{{"dim", m.rows()}, {"re", std::move(re)}, {"im", std::move(im)}};
}

inline ComplexMatrix matrix_from_json(const json& j, const char* context) {
  const auto& dim_field = detail::require_field(j, "dim", context);
  if (!dim_field.is_number_integer()) {
    throw ParseError(std::string(context) + ": field 'dim' must be an integer");
  }
  const Eigen::Index d = dim_field.get<Eigen::Index>();
  if (d < 1) throw ParseError(std::string(context) + ": field 'dim' must be positive");
  const auto& re = detail::require_field(j, "re", context);
  const auto& im = detail::require_field(j, "im", context);
  for (const auto* part : {&re, &im}) {
    if (!part->is_array() || static_cast<Eigen::Index>(part->size()) != d) {
      throw ParseError(std::string(context) +
                       ": fields 're'/'im' must be dim x dim arrays");
    }
  }
  ComplexMatrix m(d, d);
  for (Eigen::Index r = 0; r < d; ++r) {
    const auto& re_row = re.at(static_cast<std::size_t>(r));
    const auto& im_row = im.at(static_cast<std::size_t>(r));
    if (!re_row.is_array() || !im_row.is_array() ||
        static_cast<Eigen::Index>(re_row.size()) != d ||
        static_cast<Eigen::Index>(im_row.size()) != d) {
      throw ParseError(std::string(context) +
                       ": fields 're'/'im' must be dim x dim arrays");
    }
    for (Eigen::Index c = 0; c < d; ++c) {
      const auto& re_cell = re_row.at(static_cast<std::size_t>(c));
      const auto& im_cell = im_row.at(static_cast<std::size_t>(c));
      if (!re_cell.is_number() || !im_cell.is_number()) {
        throw ParseError(std::string(context) +
                         ": fields 're'/'im' must contain numbers");
      }
      m(r, c) = Complex(re_cell.get<double>(), im_cell.get<double>());
    }
  }
  return m;
}

inline json density_to_json(const DensityMatrix& rho) {
  return matrix_to_json(rho.matrix());
}

inline DensityMatrix density_from_json(const json& j,
                                       const char* context = "state") {
  return DensityMatrix(matrix_from_json(j, context));
}

inline json set_to_json(const MeasurementSet& set) {
  json projectors = json::array();
  for (const auto& p : set.projectors()) projectors.push_back(matrix_to_json(p));
  return json{{"label", set.label()},
              {"dim", set.dim()},
              {"projectors", std::move(projectors)},
              {"checksum", detail::design_checksum(set.projectors())}};
}

inline MeasurementSet set_from_json(const json& j) {
  const char* context = "measurement set";
  const auto& label = detail::require_field(j, "label", context);
  const auto& dim_field = detail::require_field(j, "dim", context);
  const auto& projectors_field = detail::require_field(j, "projectors", context);
  if (!label.is_string()) {
    throw ParseError("measurement set: field 'label' must be a string");
  }
  if (!dim_field.is_number_integer()) {
    throw ParseError("measurement set: field 'dim' must be an integer");
  }
  if (!projectors_field.is_array() || projectors_field.empty()) {
    throw ParseError("measurement set: field 'projectors' must be a non-empty array");
  }
  std::vector<ComplexMatrix> projectors;
  projectors.reserve(projectors_field.size());
  for (const auto& pj : projectors_field) {
    projectors.push_back(matrix_from_json(pj, "measurement set projector"));
  }
  if (projectors.front().rows() != dim_field.get<Eigen::Index>()) {
    throw ParseError("measurement set: field 'dim' does not match projectors");
  }
  const auto& checksum = detail::require_field(j, "checksum", context);
  const std::string recomputed = detail::design_checksum(projectors);
  if (!checksum.is_string() || checksum.get<std::string>() != recomputed) {
    throw ChecksumMismatch(
        "measurement set: field 'checksum' does not match the recomputed "
        "design matrix digest");
  }
  return MeasurementSet::from_projectors(label.get<std::string>(),
                                         std::move(projectors));
}

inline json record_to_json(const MeasurementRecord& record) {
  json out{{"set_label", record.set_label},
           {"trials_per_base", record.trials_per_base},
           {"frequencies", record.frequencies}};
  if (record.seed) out["seed"] = *record.seed;
  return out;
}

inline MeasurementRecord record_from_json(const json& j) {
  const char* context = "measurement record";
  MeasurementRecord record;
  const auto& label = detail::require_field(j, "set_label", context);
  const auto& trials = detail::require_field(j, "trials_per_base", context);
  const auto& freqs = detail::require_field(j, "frequencies", context);
  if (!label.is_string() || !trials.is_number() || !freqs.is_array()) {
    throw ParseError("measurement record: bad field types");
  }
  record.set_label = label.get<std::string>();
  record.trials_per_base = trials.get<double>();
  for (const auto& f : freqs) {
    if (!f.is_number()) {
      throw ParseError("measurement record: field 'frequencies' must contain numbers");
    }
    const double value = f.get<double>();
    if (value < 0.0 || value > 1.0) {
      throw ParseError("measurement record: frequencies must lie in [0,1]");
    }
    record.frequencies.push_back(value);
  }
  record.count = static_cast<int>(record.frequencies.size());
  if (j.contains("seed") && !j.at("seed").is_null()) {
    if (!j.at("seed").is_number_integer() && !j.at("seed").is_number_unsigned()) {
      throw ParseError("measurement record: field 'seed' must be an integer");
    }
    record.seed = j.at("seed").get<std::uint64_t>();
  }
  return record;
}

/// One frequency per line; blank lines and lines starting with '#' skipped.
inline MeasurementRecord record_from_csv(std::istream& in,
                                         const std::string& set_label,
                                         double trials_per_base) {
  MeasurementRecord record;
  record.set_label = set_label;
  record.trials_per_base = trials_per_base;
  std::string line;
  int line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (line.empty() || line[0] == '#') continue;
    try {
      std::size_t used = 0;
      const double value = std::stod(line, &used);
      if (value < 0.0 || value > 1.0) {
        throw ParseError("record csv line " + std::to_string(line_number) +
                         ": frequency outside [0,1]");
      }
      record.frequencies.push_back(value);
    } catch (const std::invalid_argument&) {
      throw ParseError("record csv line " + std::to_string(line_number) +
                       ": not a number");
    } catch (const std::out_of_range&) {
      throw ParseError("record csv line " + std::to_string(line_number) +
                       ": number out of range");
    }
  }
  if (record.frequencies.empty()) {
    throw ParseError("record csv: no frequencies found");
  }
  record.count = static_cast<int>(record.frequencies.size());
  return record;
}

inline json report_to_json(const EstimateReport& report) {
  json theta = json::array();
  for (Eigen::Index i = 0; i < report.theta_hat.size(); ++i) {
    theta.push_back(report.theta_hat(i));
  }
  json pre = json::array();
  json post = json::array();
  for (Eigen::Index i = 0; i < report.spectrum_pre.size(); ++i) {
    pre.push_back(report.spectrum_pre(i));
    post.push_back(report.spectrum_post(i));
  }
  json out{{"theta_hat", std::move(theta)},
           {"mu_hat", matrix_to_json(report.mu_hat)},
           {"rho_hat", density_to_json(report.rho_hat)},
           {"spectrum_pre", std::move(pre)},
           {"spectrum_post", std::move(post)},
           {"elapsed_ls_ns", report.elapsed_ls.count()},
           {"elapsed_projection_ns", report.elapsed_projection.count()}};
  if (report.mse_vs_truth) out["mse_vs_truth"] = *report.mse_vs_truth;
  return out;
}

inline json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open file: " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ParseError("file " + path + ": " + e.what());
  }
}

inline void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw TomoError("cannot open file for writing: " + path);
  out << text;
}

}  // namespace tomo
