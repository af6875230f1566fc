// Command-line front end: measurement-set bound reports, scaling and
// Werner-state benchmarks, and single-state estimation.

#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "tomo/tomo.hpp"

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitNumerical = 3;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::pair<int, int> parse_qubit_range(const std::string& text) {
  const auto dots = text.find("..");
  try {
    if (dots == std::string::npos) {
      const int n = std::stoi(text);
      return {n, n};
    }
    const int lo = std::stoi(text.substr(0, dots));
    const int hi = std::stoi(text.substr(dots + 2));
    if (hi < lo) throw UsageError("qubit range upper bound below lower bound");
    return {lo, hi};
  } catch (const std::invalid_argument&) {
    throw UsageError("cannot parse qubit range '" + text + "' (expected e.g. 2..4)");
  }
}

std::vector<double> parse_q_grid(const std::string& text) {
  std::vector<double> grid;
  try {
    if (text.find(':') != std::string::npos) {
      // start:end:step, inclusive of the endpoint up to rounding
      const auto first = text.find(':');
      const auto second = text.find(':', first + 1);
      if (second == std::string::npos) {
        throw UsageError("q grid '" + text + "' must be start:end:step");
      }
      const double start = std::stod(text.substr(0, first));
      const double end = std::stod(text.substr(first + 1, second - first - 1));
      const double step = std::stod(text.substr(second + 1));
      if (step <= 0.0) throw UsageError("q grid step must be positive");
      const int count = static_cast<int>(std::round((end - start) / step)) + 1;
      for (int i = 0; i < count; ++i) grid.push_back(start + i * step);
    } else {
      std::stringstream stream(text);
      std::string token;
      while (std::getline(stream, token, ',')) grid.push_back(std::stod(token));
    }
  } catch (const std::invalid_argument&) {
    throw UsageError("cannot parse q grid '" + text + "'");
  }
  if (grid.empty()) throw UsageError("empty q grid");
  for (double& q : grid) {
    // step arithmetic may overshoot the endpoints by an ulp
    if (q > 1.0 && q < 1.0 + 1e-9) q = 1.0;
    if (q < 0.0 && q > -1e-9) q = 0.0;
  }
  return grid;
}

std::vector<std::int64_t> parse_copies_list(const std::string& text) {
  std::vector<std::int64_t> list;
  std::stringstream stream(text);
  std::string token;
  try {
    while (std::getline(stream, token, ',')) list.push_back(std::stoll(token));
  } catch (const std::invalid_argument&) {
    throw UsageError("cannot parse copies list '" + text + "'");
  }
  if (list.empty()) throw UsageError("empty copies list");
  return list;
}

std::vector<std::string> split_csv(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream stream(text);
  std::string token;
  while (std::getline(stream, token, ',')) {
    if (!token.empty()) out.push_back(token);
  }
  return out;
}

void write_output(const std::string& path, const std::string& text) {
  if (path.empty()) {
    std::cout << text;
  } else {
    tomo::write_text_file(path, text);
  }
}

tomo::OutputFormat parse_format(const std::string& text) {
  if (text == "csv") return tomo::OutputFormat::csv;
  if (text == "json") return tomo::OutputFormat::json;
  throw UsageError("format must be csv or json");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Quantum state tomography via linear regression: benchmarks and estimation"};
  app.require_subcommand(1);

  // bound-report
  auto* bound_cmd = app.add_subcommand(
      "bound-report", "Gram spectra and MSE bound coefficients for built-in sets");
  std::string bound_sets;
  std::string bound_out;
  std::string bound_format = "csv";
  bool bound_no_timestamp = false;
  bound_cmd->add_option("--sets", bound_sets, "comma list, e.g. cube1,cube2,tetra2,mub2");
  bound_cmd->add_option("--out", bound_out, "output path (default stdout)");
  bound_cmd->add_option("--format", bound_format, "csv|json")->capture_default_str();
  bound_cmd->add_flag("--no-timestamp", bound_no_timestamp);

  // scaling
  auto* scaling_cmd = app.add_subcommand(
      "scaling", "LRE vs MLE run time and error across qubit counts (cube sets)");
  std::string scaling_qubits = "2..4";
  int scaling_trials = 5;
  std::uint64_t scaling_seed = 0;
  std::string scaling_rule = "3^9*4^n";
  std::string scaling_out;
  std::string scaling_format = "csv";
  int scaling_mle_cap = 500;
  bool scaling_no_timestamp = false;
  scaling_cmd->add_option("--qubits", scaling_qubits, "range, e.g. 2..4")->capture_default_str();
  scaling_cmd->add_option("--trials", scaling_trials)->required();
  scaling_cmd->add_option("--seed", scaling_seed)->required();
  scaling_cmd->add_option("--copies-rule", scaling_rule, "copies as a product rule over n")
      ->capture_default_str();
  scaling_cmd->add_option("--mle-cap", scaling_mle_cap, "MLE iteration cap")
      ->capture_default_str();
  scaling_cmd->add_option("--out", scaling_out);
  scaling_cmd->add_option("--format", scaling_format, "csv|json")->capture_default_str();
  scaling_cmd->add_flag("--no-timestamp", scaling_no_timestamp);

  // werner
  auto* werner_cmd = app.add_subcommand(
      "werner", "MSE sweep over Werner states with the two-qubit cube set");
  std::string werner_q = "0:1:0.1";
  std::string werner_copies = "36000";
  int werner_trials = 500;
  std::uint64_t werner_seed = 0;
  std::string werner_out;
  std::string werner_format = "csv";
  bool werner_no_timestamp = false;
  werner_cmd->add_option("--q", werner_q, "grid start:end:step or comma list")
      ->capture_default_str();
  werner_cmd->add_option("--copies", werner_copies, "comma list of copy counts")
      ->capture_default_str();
  werner_cmd->add_option("--trials", werner_trials)->required();
  werner_cmd->add_option("--seed", werner_seed)->required();
  werner_cmd->add_option("--out", werner_out);
  werner_cmd->add_option("--format", werner_format, "csv|json")->capture_default_str();
  werner_cmd->add_flag("--no-timestamp", werner_no_timestamp);

  // estimate
  auto* estimate_cmd = app.add_subcommand(
      "estimate", "Reconstruct one state from a simulated or imported record");
  std::string estimate_state;
  std::string estimate_set;
  std::int64_t estimate_copies = 0;
  std::uint64_t estimate_seed = 0;
  std::string estimate_record;
  std::string estimate_out;
  estimate_cmd->add_option("--state", estimate_state, "density matrix JSON file")->required();
  estimate_cmd->add_option("--set", estimate_set, "built-in set name or set JSON path")->required();
  estimate_cmd->add_option("--copies", estimate_copies)->required();
  estimate_cmd->add_option("--seed", estimate_seed);
  estimate_cmd->add_option("--record-in", estimate_record,
                           "skip simulation, estimate from this record (json or csv)");
  estimate_cmd->add_option("--out", estimate_out);

  // make-state (convenience: produces input files for `estimate`)
  auto* state_cmd = app.add_subcommand("make-state", "Write a density-matrix JSON file");
  double state_werner_q = -1.0;
  std::string state_random;
  std::string state_out;
  state_cmd->add_option("--werner", state_werner_q, "two-qubit Werner state with this q");
  state_cmd->add_option("--random-mixed-pure", state_random,
                        "n:alpha:seed for a random pure state mixed with identity");
  state_cmd->add_option("--out", state_out);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (bound_cmd->parsed()) {
      const auto names = bound_sets.empty() ? tomo::default_bound_report_sets()
                                            : split_csv(bound_sets);
      const auto rows = tomo::run_bound_report(names);
      if (parse_format(bound_format) == tomo::OutputFormat::csv) {
        write_output(bound_out, tomo::emit_bound_report_csv(rows, !bound_no_timestamp));
      } else {
        write_output(bound_out,
                     tomo::bound_report_to_json(rows, !bound_no_timestamp).dump(2) + "\n");
      }
    } else if (scaling_cmd->parsed()) {
      tomo::BenchmarkConfig config;
      config.experiment = tomo::Experiment::scaling;
      std::tie(config.qubits_min, config.qubits_max) = parse_qubit_range(scaling_qubits);
      config.trials = scaling_trials;
      config.base_seed = scaling_seed;
      config.copies_rule = scaling_rule;
      config.mle_iteration_cap = scaling_mle_cap;
      config.timestamp = !scaling_no_timestamp;
      config.output_path = scaling_out;
      config.format = parse_format(scaling_format);
      const auto emit = [&](const std::vector<tomo::ScalingRow>& rows) {
        if (parse_format(scaling_format) == tomo::OutputFormat::csv) {
          write_output(scaling_out, tomo::emit_scaling_csv(rows, config.timestamp));
        } else {
          write_output(scaling_out,
                       tomo::scaling_to_json(rows, config.timestamp).dump(2) + "\n");
        }
      };
      std::vector<tomo::ScalingRow> completed;
      try {
        tomo::run_scaling(config,
                          [&](const tomo::ScalingRow& row) { completed.push_back(row); });
      } catch (...) {
        if (!completed.empty()) {
          emit(completed);
          std::cerr << "scaling: failure after " << completed.size()
                    << " trials; partial results flushed\n";
        }
        throw;
      }
      emit(completed);
    } else if (werner_cmd->parsed()) {
      tomo::BenchmarkConfig config;
      config.experiment = tomo::Experiment::werner;
      config.q_grid = parse_q_grid(werner_q);
      config.copies_list = parse_copies_list(werner_copies);
      config.trials = werner_trials;
      config.base_seed = werner_seed;
      config.timestamp = !werner_no_timestamp;
      config.output_path = werner_out;
      config.format = parse_format(werner_format);
      const auto result = tomo::run_werner(config);
      if (parse_format(werner_format) == tomo::OutputFormat::csv) {
        write_output(werner_out, tomo::emit_werner_csv(result, config.timestamp));
      } else {
        write_output(werner_out,
                     tomo::werner_to_json(result, config.timestamp).dump(2) + "\n");
      }
    } else if (estimate_cmd->parsed()) {
      tomo::SingleShotParams params;
      params.state_path = estimate_state;
      params.set_name = estimate_set;
      params.copies = estimate_copies;
      params.seed = estimate_seed;
      params.record_path = estimate_record;
      const tomo::json report = tomo::run_single_shot(params);
      write_output(estimate_out, report.dump(2) + "\n");
    } else if (state_cmd->parsed()) {
      if ((state_werner_q >= 0.0) == !state_random.empty()) {
        throw UsageError("make-state: pass exactly one of --werner, --random-mixed-pure");
      }
      tomo::json out;
      if (state_werner_q >= 0.0) {
        out = tomo::density_to_json(tomo::werner(state_werner_q));
      } else {
        std::string fields_text = state_random;
        std::replace(fields_text.begin(), fields_text.end(), ':', ',');
        const auto fields = split_csv(fields_text);
        if (fields.size() != 3) {
          throw UsageError("make-state: --random-mixed-pure expects n:alpha:seed");
        }
        out = tomo::density_to_json(tomo::random_mixed_pure(
            std::stoi(fields[0]), std::stod(fields[1]),
            std::stoull(fields[2])));
      }
      write_output(state_out, out.dump(2) + "\n");
    }
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const tomo::ParseError& e) {
    std::cerr << "ParseError: " << e.what() << "\n";
    return kExitData;
  } catch (const tomo::ShapeMismatch& e) {
    std::cerr << "ShapeMismatch: " << e.what() << "\n";
    return kExitData;
  } catch (const tomo::OutOfRange& e) {
    std::cerr << "OutOfRange: " << e.what() << "\n";
    return kExitUsage;
  } catch (const tomo::DimensionTooLarge& e) {
    std::cerr << "DimensionTooLarge: " << e.what() << "\n";
    return kExitUsage;
  } catch (const tomo::Unsupported& e) {
    std::cerr << "Unsupported: " << e.what() << "\n";
    return kExitUsage;
  } catch (const tomo::InsufficientCopies& e) {
    std::cerr << "InsufficientCopies: " << e.what() << "\n";
    return kExitUsage;
  } catch (const tomo::TomoError& e) {
    // numerical failures: singular Gram, non-Hermitian inputs, bad traces
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumerical;
  }
  return 0;
}
