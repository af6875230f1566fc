#pragma once

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <functional>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "tomo/estimator.hpp"
#include "tomo/io.hpp"
#include "tomo/measurement.hpp"
#include "tomo/mle.hpp"
#include "tomo/sampling.hpp"
#include "tomo/states.hpp"

namespace tomo {

enum class Experiment { scaling, werner, bound_report, single_shot };
enum class OutputFormat { csv, json };

struct BenchmarkConfig {
  Experiment experiment = Experiment::scaling;
  int qubits_min = 2;
  int qubits_max = 4;
  std::string copies_rule = "3^9*4^n";  // scaling only
  std::vector<double> q_grid;
  std::vector<std::int64_t> copies_list;
  int trials = 1;
  std::uint64_t base_seed = 0;
  std::string output_path;
  OutputFormat format = OutputFormat::csv;
  bool timestamp = true;
  int threads = 0;  // 0 = honor TOMO_THREADS, default serial
  int mle_iteration_cap = 500;
  bool keep_likelihood_traces = false;

  void validate() const {
    if (trials < 1) throw OutOfRange("BenchmarkConfig: trials must be >= 1");
    for (double q : q_grid) {
      if (q < 0.0 || q > 1.0) {
        throw OutOfRange("BenchmarkConfig: q grid values must lie in [0,1]");
      }
    }
  }
};

namespace detail {

inline constexpr std::uint64_t kSeedStride = 1000003;  // large prime

inline int resolve_threads(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("TOMO_THREADS")) {
    const int parsed = std::atoi(env);
    if (parsed < 1) throw OutOfRange("TOMO_THREADS must be a positive integer");
    return parsed;
  }
  return 1;
}

/// Index-parallel loop; each task writes only its own slot, so the result is
/// identical for every thread count. The first worker exception is rethrown
/// on the calling thread.
inline void parallel_for(std::size_t count, int threads,
                         const std::function<void(std::size_t)>& body) {
  if (threads <= 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  const auto worker_count =
      std::min<std::size_t>(static_cast<std::size_t>(threads), count);
  std::vector<std::thread> workers;
  workers.reserve(worker_count);
  std::exception_ptr failure;
  std::mutex failure_mutex;
  for (std::size_t w = 0; w < worker_count; ++w) {
    workers.emplace_back([&, w] {
      try {
        for (std::size_t i = w; i < count; i += worker_count) body(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    });
  }
  for (auto& t : workers) t.join();
  if (failure) std::rethrow_exception(failure);
}

inline std::string format_double(double value) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.12g", value);
  return std::string(buffer);
}

inline std::string utc_timestamp() {
  const std::time_t now = std::time(nullptr);
  std::tm tm_utc{};
  gmtime_r(&now, &tm_utc);
  char buffer[32];
  std::strftime(buffer, sizeof(buffer), "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
  return std::string(buffer);
}

struct SampleStats {
  double mean = 0.0;
  double standard_error = 0.0;
};

inline SampleStats sample_stats(const std::vector<double>& values) {
  SampleStats out;
  if (values.empty()) return out;
  double sum = 0.0;
  for (double v : values) sum += v;
  out.mean = sum / static_cast<double>(values.size());
  if (values.size() < 2) return out;
  double ss = 0.0;
  for (double v : values) ss += (v - out.mean) * (v - out.mean);
  const double variance = ss / static_cast<double>(values.size() - 1);
  out.standard_error = std::sqrt(variance / static_cast<double>(values.size()));
  return out;
}

inline double median(std::vector<double> values) {
  if (values.empty()) return 0.0;
  std::sort(values.begin(), values.end());
  const std::size_t mid = values.size() / 2;
  if (values.size() % 2 == 1) return values[mid];
  return (values[mid - 1] + values[mid]) / 2.0;
}

}  // namespace detail

/// Evaluates a copies rule such as "3^9*4^n", "2^n*100" or "36000" at a given
/// qubit count n. Grammar: product of factors, each factor an integer or 'n'
/// optionally raised to an integer-or-'n' exponent.
inline std::int64_t eval_copies_rule(const std::string& rule, int n) {
  std::size_t pos = 0;
  const auto skip_space = [&] {
    while (pos < rule.size() && std::isspace(static_cast<unsigned char>(rule[pos]))) ++pos;
  };
  const auto parse_atom = [&]() -> std::int64_t {
    skip_space();
    if (pos < rule.size() && (rule[pos] == 'n' || rule[pos] == 'N')) {
      ++pos;
      return n;
    }
    std::size_t start = pos;
    while (pos < rule.size() && std::isdigit(static_cast<unsigned char>(rule[pos]))) ++pos;
    if (start == pos) {
      throw ParseError("copies rule: expected integer or 'n' at position " +
                       std::to_string(start) + " in '" + rule + "'");
    }
    return std::stoll(rule.substr(start, pos - start));
  };
  const auto checked_multiply = [&](std::int64_t a, std::int64_t b) {
    if (a != 0 && std::abs(b) > std::numeric_limits<std::int64_t>::max() / std::abs(a)) {
      throw OutOfRange("copies rule: overflow in '" + rule + "'");
    }
    return a * b;
  };
  const auto parse_factor = [&]() -> std::int64_t {
    const std::int64_t base = parse_atom();
    skip_space();
    if (pos < rule.size() && rule[pos] == '^') {
      ++pos;
      const std::int64_t exponent = parse_atom();
      if (exponent < 0) throw ParseError("copies rule: negative exponent");
      std::int64_t out = 1;
      for (std::int64_t e = 0; e < exponent; ++e) out = checked_multiply(out, base);
      return out;
    }
    return base;
  };
  std::int64_t result = parse_factor();
  skip_space();
  while (pos < rule.size() && rule[pos] == '*') {
    ++pos;
    result = checked_multiply(result, parse_factor());
    skip_space();
  }
  if (pos != rule.size()) {
    throw ParseError("copies rule: unexpected character at position " +
                     std::to_string(pos) + " in '" + rule + "'");
  }
  if (result < 1) throw OutOfRange("copies rule: must evaluate to a positive count");
  return result;
}

inline MeasurementSet builtin_set(const std::string& name) {
  const auto parse_suffix = [&](std::size_t prefix_len) {
    const std::string digits = name.substr(prefix_len);
    if (digits.empty() ||
        !std::all_of(digits.begin(), digits.end(),
                     [](char c) { return std::isdigit(static_cast<unsigned char>(c)); })) {
      throw ParseError("unknown measurement set name: " + name);
    }
    return std::stoi(digits);
  };
  if (name.rfind("cube", 0) == 0) return cube_set(parse_suffix(4));
  if (name.rfind("tetra", 0) == 0) return tetrahedron_set(parse_suffix(5));
  if (name.rfind("mub", 0) == 0) return mub_set(parse_suffix(3));
  throw ParseError("unknown measurement set name: " + name);
}

// ---------------------------------------------------------------------------
// scaling experiment

struct ScalingRow {
  int n = 0;
  int trial = 0;
  double alpha = 0.0;
  std::int64_t time_lre_ns = 0;
  std::int64_t time_mle_ns = 0;
  double mse_lre = 0.0;
  double mse_plre = 0.0;
  double mse_mle = 0.0;
  int mle_iterations = 0;
  std::uint64_t seed = 0;
  std::vector<double> likelihood_trace;  // filled only on request
};

/// Runs the qubit-scaling study: per (n, trial) draw a random mixed-pure
/// state, simulate one cube-set record, and reconstruct it with both the
/// regression pipeline and the iterative MLE on the identical record.
/// Trials run serially so the timing columns stay meaningful. on_row fires
/// after each completed trial, so callers can flush partial results if a
/// later qubit count fails.
inline std::vector<ScalingRow> run_scaling(
    const BenchmarkConfig& config,
    const std::function<void(const ScalingRow&)>& on_row = {}) {
  config.validate();
  if (config.qubits_min < 1 || config.qubits_max < config.qubits_min) {
    throw OutOfRange("run_scaling: bad qubit range");
  }
  MleOptions mle_options;
  mle_options.max_iterations = config.mle_iteration_cap;
  std::vector<ScalingRow> rows;
  rows.reserve(static_cast<std::size_t>(
      (config.qubits_max - config.qubits_min + 1) * config.trials));
  for (int n = config.qubits_min; n <= config.qubits_max; ++n) {
    const auto& basis = cached_pauli_basis(n);
    const MeasurementSet set = cube_set(n);
    const std::int64_t copies = eval_copies_rule(config.copies_rule, n);
    for (int trial = 0; trial < config.trials; ++trial) {
      ScalingRow row;
      row.n = n;
      row.trial = trial;
      row.seed = config.base_seed + static_cast<std::uint64_t>(trial) +
                 detail::kSeedStride * static_cast<std::uint64_t>(n);
      Rng trial_rng(row.seed);
      row.alpha = trial_rng.uniform();
      const std::uint64_t state_seed = trial_rng.next_u64();
      const std::uint64_t record_seed = trial_rng.next_u64();
      const DensityMatrix truth = random_mixed_pure(n, row.alpha, state_seed);
      const MeasurementRecord record =
          simulate_record(truth, set, copies, record_seed);

      const EstimateReport report = lre_estimate(record, set, basis, &truth);
      row.time_lre_ns =
          (report.elapsed_ls + report.elapsed_projection).count();
      row.mse_lre = *report.mse_vs_truth;
      row.mse_plre = mse(report.mu_hat, truth);

      const auto t0 = std::chrono::steady_clock::now();
      const MleResult mle = mle_estimate(record, set, mle_options);
      const auto t1 = std::chrono::steady_clock::now();
      row.time_mle_ns =
          std::chrono::duration_cast<std::chrono::nanoseconds>(t1 - t0).count();
      row.mse_mle = mse(mle.rho, truth);
      row.mle_iterations = mle.iterations;
      if (config.keep_likelihood_traces) {
        row.likelihood_trace = mle.likelihood_trace;
      }
      if (on_row) on_row(row);
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

// ---------------------------------------------------------------------------
// werner experiment

struct WernerRow {
  double q = 0.0;
  std::int64_t copies = 0;
  int trial = 0;
  double mse_lre = 0.0;
  double mse_plre = 0.0;
  std::uint64_t seed = 0;
};

struct WernerSummary {
  double q = 0.0;
  std::int64_t copies = 0;
  int trials = 0;
  double mean_mse_lre = 0.0;
  double se_mse_lre = 0.0;
  double mean_mse_plre = 0.0;
  double se_mse_plre = 0.0;
  double bound = 0.0;
};

struct WernerResult {
  std::vector<WernerRow> rows;
  std::vector<WernerSummary> summaries;
};

/// Werner-family sweep over q and copy counts with the two-qubit cube set.
/// Trial seeds depend on (copies index, trial) but not on q, so all grid
/// points see the same underlying randomness and cross-q comparisons are
/// sharp.
inline WernerResult run_werner(const BenchmarkConfig& config) {
  config.validate();
  if (config.q_grid.empty() || config.copies_list.empty()) {
    throw OutOfRange("run_werner: need a q grid and a copies list");
  }
  const MeasurementSet set = cube_set(2);
  const auto& basis = cached_pauli_basis(2);
  std::vector<DensityMatrix> states;
  states.reserve(config.q_grid.size());
  for (double q : config.q_grid) states.push_back(werner(q));

  const std::size_t q_count = config.q_grid.size();
  const std::size_t c_count = config.copies_list.size();
  const std::size_t t_count = static_cast<std::size_t>(config.trials);
  const std::size_t total = q_count * c_count * t_count;
  std::vector<WernerRow> rows(total);
  const int threads = detail::resolve_threads(config.threads);
  detail::parallel_for(total, threads, [&](std::size_t task) {
    const std::size_t qi = task / (c_count * t_count);
    const std::size_t ci = (task / t_count) % c_count;
    const std::size_t trial = task % t_count;
    const std::int64_t copies = config.copies_list[ci];
    const std::uint64_t seed = config.base_seed +
                               static_cast<std::uint64_t>(trial) +
                               detail::kSeedStride * static_cast<std::uint64_t>(ci);
    const DensityMatrix& truth = states[qi];
    const MeasurementRecord record = simulate_record(truth, set, copies, seed);
    const EstimateReport report = lre_estimate(record, set, basis, &truth);
    WernerRow row;
    row.q = config.q_grid[qi];
    row.copies = copies;
    row.trial = static_cast<int>(trial);
    row.mse_lre = *report.mse_vs_truth;
    row.mse_plre = mse(report.mu_hat, truth);
    row.seed = seed;
    rows[task] = row;
  });

  WernerResult out;
  out.rows = std::move(rows);
  out.summaries.reserve(q_count * c_count);
  for (std::size_t qi = 0; qi < q_count; ++qi) {
    for (std::size_t ci = 0; ci < c_count; ++ci) {
      std::vector<double> lre_values, plre_values;
      lre_values.reserve(t_count);
      plre_values.reserve(t_count);
      for (std::size_t trial = 0; trial < t_count; ++trial) {
        const auto& row = out.rows[(qi * c_count + ci) * t_count + trial];
        lre_values.push_back(row.mse_lre);
        plre_values.push_back(row.mse_plre);
      }
      const auto lre_stats = detail::sample_stats(lre_values);
      const auto plre_stats = detail::sample_stats(plre_values);
      WernerSummary summary;
      summary.q = config.q_grid[qi];
      summary.copies = config.copies_list[ci];
      summary.trials = config.trials;
      summary.mean_mse_lre = lre_stats.mean;
      summary.se_mse_lre = lre_stats.standard_error;
      summary.mean_mse_plre = plre_stats.mean;
      summary.se_mse_plre = plre_stats.standard_error;
      summary.bound = mse_upper_bound(set, config.copies_list[ci]);
      out.summaries.push_back(summary);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// bound report

struct BoundReportRow {
  std::string set_label;
  int dim = 0;
  int count = 0;
  std::string gram_spectrum;  // "value x multiplicity" clusters
  double trace_gram_inverse = 0.0;
  double bound_coefficient = 0.0;  // N * bound, independent of N
  bool achieves_global_optimum = false;
  bool achieves_local_optimum_2qubit = false;
};

inline std::vector<std::string> default_bound_report_sets() {
  return {"cube1", "cube2", "cube3", "cube4", "tetra1", "tetra2",
          "tetra3", "tetra4", "mub1", "mub2"};
}

inline std::vector<BoundReportRow> run_bound_report(
    const std::vector<std::string>& set_names) {
  std::vector<BoundReportRow> rows;
  rows.reserve(set_names.size());
  for (const auto& name : set_names) {
    const MeasurementSet set = builtin_set(name);
    BoundReportRow row;
    row.set_label = set.label();
    row.dim = set.dim();
    row.count = set.count();
    const RealVector& eigenvalues = set.gram_eigenvalues();
    std::ostringstream spectrum;
    Eigen::Index i = 0;
    bool first = true;
    while (i < eigenvalues.size()) {
      Eigen::Index j = i;
      while (j + 1 < eigenvalues.size() &&
             std::abs(eigenvalues(j + 1) - eigenvalues(i)) <= 1e-9) {
        ++j;
      }
      if (!first) spectrum << ";";
      first = false;
      spectrum << detail::format_double(eigenvalues(i)) << "x" << (j - i + 1);
      i = j + 1;
    }
    row.gram_spectrum = spectrum.str();
    row.trace_gram_inverse = set.trace_gram_inverse();
    row.bound_coefficient =
        static_cast<double>(set.count()) / 4.0 * set.trace_gram_inverse();
    const double global_coefficient =
        static_cast<double>(set.dim()) * (set.dim() + 1) *
        (set.dim() * set.dim() - 1) / 4.0;
    row.achieves_global_optimum =
        std::abs(row.bound_coefficient - global_coefficient) <= 1e-9;
    row.achieves_local_optimum_2qubit =
        set.dim() == 4 && std::abs(row.bound_coefficient - 99.0) <= 1e-9;
    rows.push_back(std::move(row));
  }
  return rows;
}

// ---------------------------------------------------------------------------
// single shot

struct SingleShotParams {
  std::string state_path;
  std::string set_name;  // builtin name or path to a measurement-set JSON
  std::int64_t copies = 0;
  std::uint64_t seed = 0;
  std::string record_path;  // optional: skip simulation, estimate from file
};

inline json run_single_shot(const SingleShotParams& params) {
  const DensityMatrix truth =
      density_from_json(load_json_file(params.state_path), "state file");
  MeasurementSet set = [&] {
    if (params.set_name.find(".json") != std::string::npos ||
        params.set_name.find('/') != std::string::npos) {
      return set_from_json(load_json_file(params.set_name));
    }
    return builtin_set(params.set_name);
  }();
  if (set.dim() != truth.dim()) {
    throw ShapeMismatch("single shot: state and measurement set dimensions differ");
  }
  MeasurementRecord record = [&] {
    if (!params.record_path.empty()) {
      if (params.record_path.size() >= 4 &&
          params.record_path.substr(params.record_path.size() - 4) == ".csv") {
        std::ifstream in(params.record_path);
        if (!in) throw ParseError("cannot open file: " + params.record_path);
        const double trials_per_base =
            params.copies > 0
                ? static_cast<double>(params.copies / set.count())
                : 1.0;
        return record_from_csv(in, set.label(), trials_per_base);
      }
      return record_from_json(load_json_file(params.record_path));
    }
    return simulate_record(truth, set, params.copies, params.seed);
  }();
  if (record.count != set.count()) {
    throw ShapeMismatch("single shot: record and set base counts differ");
  }
  const auto& basis = cached_pauli_basis(qubits_for_dim(set.dim()));
  const EstimateReport report = lre_estimate(record, set, basis, &truth);
  json out = report_to_json(report);
  out["set_label"] = set.label();
  return out;
}

// ---------------------------------------------------------------------------
// emission

inline std::string emit_scaling_csv(const std::vector<ScalingRow>& rows,
                                    bool timestamp) {
  std::ostringstream out;
  if (timestamp) out << "# generated " << detail::utc_timestamp() << "\n";
  out << "n,trial,alpha,time_lre_ns,time_mle_ns,mse_lre,mse_plre,mse_mle,"
         "mle_iterations,seed\n";
  for (const auto& row : rows) {
    out << row.n << ',' << row.trial << ','
        << detail::format_double(row.alpha) << ',' << row.time_lre_ns << ','
        << row.time_mle_ns << ',' << detail::format_double(row.mse_lre) << ','
        << detail::format_double(row.mse_plre) << ','
        << detail::format_double(row.mse_mle) << ',' << row.mle_iterations
        << ',' << row.seed << "\n";
  }
  return out.str();
}

inline json scaling_to_json(const std::vector<ScalingRow>& rows,
                            bool timestamp) {
  json out;
  if (timestamp) out["generated"] = detail::utc_timestamp();
  out["experiment"] = "scaling";
  json array = json::array();
  for (const auto& row : rows) {
    json r{{"n", row.n},
           {"trial", row.trial},
           {"alpha", row.alpha},
           {"time_lre_ns", row.time_lre_ns},
           {"time_mle_ns", row.time_mle_ns},
           {"mse_lre", row.mse_lre},
           {"mse_plre", row.mse_plre},
           {"mse_mle", row.mse_mle},
           {"mle_iterations", row.mle_iterations},
           {"seed", row.seed}};
    array.push_back(std::move(r));
  }
  out["rows"] = std::move(array);
  return out;
}

inline std::string emit_werner_csv(const WernerResult& result, bool timestamp) {
  std::ostringstream out;
  if (timestamp) out << "# generated " << detail::utc_timestamp() << "\n";
  out << "row_type,q,copies,trial,mse_lre,mse_plre,seed,mean_mse_lre,"
         "se_mse_lre,mean_mse_plre,se_mse_plre,bound\n";
  for (const auto& row : result.rows) {
    out << "raw," << detail::format_double(row.q) << ',' << row.copies << ','
        << row.trial << ',' << detail::format_double(row.mse_lre) << ','
        << detail::format_double(row.mse_plre) << ',' << row.seed
        << ",,,,,\n";
  }
  for (const auto& s : result.summaries) {
    out << "summary," << detail::format_double(s.q) << ',' << s.copies << ','
        << s.trials << ",,,,"
        << detail::format_double(s.mean_mse_lre) << ','
        << detail::format_double(s.se_mse_lre) << ','
        << detail::format_double(s.mean_mse_plre) << ','
        << detail::format_double(s.se_mse_plre) << ','
        << detail::format_double(s.bound) << "\n";
  }
  return out.str();
}

inline json werner_to_json(const WernerResult& result, bool timestamp) {
  json out;
  if (timestamp) out["generated"] = detail::utc_timestamp();
  out["experiment"] = "werner";
  json rows = json::array();
  for (const auto& row : result.rows) {
    rows.push_back(json{{"q", row.q},
                        {"copies", row.copies},
                        {"trial", row.trial},
                        {"mse_lre", row.mse_lre},
                        {"mse_plre", row.mse_plre},
                        {"seed", row.seed}});
  }
  json summaries = json::array();
  for (const auto& s : result.summaries) {
    summaries.push_back(json{{"q", s.q},
                             {"copies", s.copies},
                             {"trials", s.trials},
                             {"mean_mse_lre", s.mean_mse_lre},
                             {"se_mse_lre", s.se_mse_lre},
                             {"mean_mse_plre", s.mean_mse_plre},
                             {"se_mse_plre", s.se_mse_plre},
                             {"bound", s.bound}});
  }
  out["rows"] = std::move(rows);
  out["summary"] = std::move(summaries);
  return out;
}

inline std::string emit_bound_report_csv(const std::vector<BoundReportRow>& rows,
                                         bool timestamp) {
  std::ostringstream out;
  if (timestamp) out << "# generated " << detail::utc_timestamp() << "\n";
  out << "set,dim,count,gram_spectrum,tr_gram_inverse,bound_coefficient,"
         "achieves_global_optimum,achieves_local_optimum_2qubit\n";
  for (const auto& row : rows) {
    out << row.set_label << ',' << row.dim << ',' << row.count << ','
        << row.gram_spectrum << ','
        << detail::format_double(row.trace_gram_inverse) << ','
        << detail::format_double(row.bound_coefficient) << ','
        << (row.achieves_global_optimum ? "true" : "false") << ','
        << (row.achieves_local_optimum_2qubit ? "true" : "false") << "\n";
  }
  return out.str();
}

inline json bound_report_to_json(const std::vector<BoundReportRow>& rows,
                                 bool timestamp) {
  json out;
  if (timestamp) out["generated"] = detail::utc_timestamp();
  out["experiment"] = "bound_report";
  json array = json::array();
  for (const auto& row : rows) {
    array.push_back(json{
        {"set", row.set_label},
        {"dim", row.dim},
        {"count", row.count},
        {"gram_spectrum", row.gram_spectrum},
        {"tr_gram_inverse", row.trace_gram_inverse},
        {"bound_coefficient", row.bound_coefficient},
        {"achieves_global_optimum", row.achieves_global_optimum},
        {"achieves_local_optimum_2qubit", row.achieves_local_optimum_2qubit}});
  }
  out["rows"] = std::move(array);
  return out;
}

}  // namespace tomo
