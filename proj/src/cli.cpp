#include "ccopf/cli.hpp"

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "ccopf/errors.hpp"
#include "ccopf/experiment.hpp"
#include "ccopf/normal.hpp"
#include "ccopf/sample_size.hpp"
#include "ccopf/validation.hpp"

namespace ccopf::cli {

namespace {

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) parts.push_back(item);
  }
  return parts;
}

std::uint64_t parse_seed(const std::string& text, const char* origin) {
  std::size_t used = 0;
  unsigned long long v = 0;
  try {
    v = std::stoull(text, &used, 0);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != text.size() || text.front() == '-') {
    throw ParameterError(std::string(origin) + " is not a non-negative integer: '" + text + "'");
  }
  return v;
}

std::string shortest(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string read_text(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

// Writes to `path`, or to `out` when the path is empty or "-".
void emit(const std::string& path, const std::string& text, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << text;
    return;
  }
  std::ofstream file(path, std::ios::binary);
  if (!file || !(file << text)) throw ValidationError("cannot write " + path);
}

struct RunOptions {
  ExperimentConfig config;
  std::string methods = "sa-is";
  std::string scenarios = "600";
  std::string pi_mode = "union-bound";
  std::string format = "json";
  std::string out;
  std::string table;
  std::size_t jobs = 1;
};

int do_run(RunOptions& opt, std::ostream& out, std::ostream& err) {
  ExperimentConfig base = opt.config;
  if (opt.scenarios == "auto") {
    base.scenarios.reset();
  } else {
    base.scenarios = parse_seed(opt.scenarios, "--scenarios");
  }
  if (opt.pi_mode == "union-bound") {
    base.pi_mode = PiMode::union_bound;
  } else if (opt.pi_mode == "monte-carlo") {
    base.pi_mode = PiMode::monte_carlo;
  } else {
    throw ParameterError("--pi-mode must be union-bound or monte-carlo");
  }
  std::vector<Method> methods;
  for (const auto& m : split_list(opt.methods)) methods.push_back(parse_method(m));
  if (methods.empty()) throw ParameterError("--method lists no method");
  base.validate();

  const OpfModel model = OpfModel::build(load_case_file(base.case_path));
  for (const auto& w : model.grid.warnings) err << "warning: " << w << '\n';
  const GaussianSpec g = build_uncertainty(model.grid, base.sigma_fraction);

  std::vector<ExperimentReport> reports;
  for (Method m : methods) {
    ExperimentConfig config = base;
    config.method = m;
    if (!config.scenarios && m != Method::dc_opf) {
      const SampleSizeChoice choice = resolve_sample_size(config, model, g);
      err << "auto scenario count for " << to_string(m) << ": " << choice.scenarios << " (pi = " << choice.pi
          << ", M = " << choice.bound_m << ")\n";
    }
    reports.push_back(run_experiment(config, model, g, opt.jobs));
  }

  std::ostringstream text;
  if (opt.format == "json") {
    text << reports_to_json(reports);
  } else if (opt.format == "csv") {
    write_records_csv(text, reports);
  } else {
    write_table_csv(text, reports);
  }
  emit(opt.out, text.str(), out);
  if (!opt.table.empty()) {
    std::ostringstream table;
    write_table_csv(table, reports);
    emit(opt.table, table.str(), out);
  }

  std::size_t failed = 0;
  for (const auto& r : reports) failed += r.records.size() - r.optimal_count();
  if (failed > 0) {
    err << failed << " repetition(s) did not solve to optimality\n";
    return kSolverFailure;
  }
  return kOk;
}

std::vector<double> dispatch_from_json(const std::string& text, std::size_t record) {
  const auto j = nlohmann::json::parse(text);
  if (j.contains("dispatch_mw")) return j.at("dispatch_mw").get<std::vector<double>>();
  const auto reports = reports_from_json(text);
  const auto& records = reports.front().records;
  if (record >= records.size()) throw ParameterError("--record is out of range");
  if (records[record].dispatch_mw.empty()) throw ValidationError("selected record has no dispatch");
  return records[record].dispatch_mw;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Chance-constrained DC optimal power flow by scenario approximation", "ccopf"};
  app.require_subcommand(1);
  std::string seed_text = "0";

  RunOptions run_opt;
  auto* run_cmd = app.add_subcommand("run", "Run DC-OPF / SA / SA-IS repetitions on a case");
  run_cmd->add_option("--case", run_opt.config.case_path, "MATPOWER case file")->required();
  run_cmd->add_option("--method", run_opt.methods, "dc-opf, sa, sa-is or a comma list")->capture_default_str();
  run_cmd->add_option("--eta", run_opt.config.eta, "Violation probability")->capture_default_str();
  run_cmd->add_option("--delta", run_opt.config.delta, "Confidence parameter of the auto count")
      ->capture_default_str();
  run_cmd->add_option("--scenarios", run_opt.scenarios, "Scenario count or 'auto'")->capture_default_str();
  run_cmd->add_option("--sigma-frac", run_opt.config.sigma_fraction, "Fluctuation std dev / nominal injection")
      ->capture_default_str();
  run_cmd->add_option("--reps", run_opt.config.repetitions, "Repetitions")->capture_default_str();
  run_cmd->add_option("--n-test", run_opt.config.n_test, "Out-of-sample draws")->capture_default_str();
  run_cmd->add_option("--seed", seed_text, "Base seed")->capture_default_str();
  run_cmd->add_option("--pi-mode", run_opt.pi_mode, "union-bound or monte-carlo")->capture_default_str();
  run_cmd->add_option("--pi-samples", run_opt.config.pi_samples, "Draws for the monte-carlo pi estimate")
      ->capture_default_str();
  run_cmd->add_option("--format", run_opt.format, "Output format")
      ->check(CLI::IsMember({"json", "csv", "table"}))
      ->capture_default_str();
  run_cmd->add_option("--out", run_opt.out, "Output file (default stdout)");
  run_cmd->add_option("--table", run_opt.table, "Also write the per-case table CSV here");
  run_cmd->add_option("--jobs", run_opt.jobs, "Worker threads")->check(CLI::PositiveNumber)->capture_default_str();

  double ns_eta = 0.05, ns_delta = 0.01, ns_pi = 0.0, ns_m = 1.0;
  std::uint64_t ns_d = 1;
  auto* ns_cmd = app.add_subcommand("nsamples", "Scenario count for the importance-sampled problem");
  ns_cmd->add_option("--eta", ns_eta)->capture_default_str();
  ns_cmd->add_option("--delta", ns_delta)->capture_default_str();
  ns_cmd->add_option("--d", ns_d, "Number of decision variables")->capture_default_str();
  ns_cmd->add_option("--pi", ns_pi, "Mass of the redundant region")->capture_default_str();
  ns_cmd->add_option("--M", ns_m, "Density-ratio bound")->capture_default_str();

  double sw_a = 0.0, sw_eta = 0.05;
  std::vector<double> sw_b;
  std::vector<std::size_t> sw_n = {1, 10, 100, 1000};
  std::size_t sw_seeds = 50;
  std::string sw_out;
  auto* sw_cmd = app.add_subcommand("sweep1d", "Feasibility rate of the 1-D problem over (b, N)");
  sw_cmd->add_option("--a", sw_a)->capture_default_str();
  sw_cmd->add_option("--eta", sw_eta)->capture_default_str();
  sw_cmd->add_option("--b", sw_b, "Inner bounds (default: around the exact solution)")->delimiter(',');
  sw_cmd->add_option("--N", sw_n, "Scenario counts")->delimiter(',')->capture_default_str();
  sw_cmd->add_option("--seeds", sw_seeds)->capture_default_str();
  sw_cmd->add_option("--seed", seed_text)->capture_default_str();
  sw_cmd->add_option("--out", sw_out, "Output file (default stdout)");

  std::string va_case, va_dispatch, va_out;
  double va_sigma = 0.07;
  std::size_t va_n = 1000, va_record = 0;
  auto* va_cmd = app.add_subcommand("validate", "Out-of-sample check of a dispatch read from JSON");
  va_cmd->add_option("--case", va_case)->required();
  va_cmd->add_option("--dispatch", va_dispatch, "JSON with dispatch_mw, or a run report")->required();
  va_cmd->add_option("--record", va_record, "Record of a report to check")->capture_default_str();
  va_cmd->add_option("--sigma-frac", va_sigma)->capture_default_str();
  va_cmd->add_option("--n-test", va_n)->capture_default_str();
  va_cmd->add_option("--seed", seed_text)->capture_default_str();
  va_cmd->add_option("--out", va_out, "Output file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kOk : kUsage;
  }

  try {
    std::uint64_t seed = parse_seed(seed_text, "--seed");
    if (const char* env = std::getenv("CCOPF_SEED"); env != nullptr && *env != '\0') {
      seed = parse_seed(env, "CCOPF_SEED");
    }

    if (*run_cmd) {
      run_opt.config.seed = seed;
      return do_run(run_opt, out, err);
    }
    if (*ns_cmd) {
      out << sample_size_is(ns_eta, ns_delta, ns_d, ns_pi, ns_m) << '\n';
      return kOk;
    }
    if (*sw_cmd) {
      if (sw_b.empty()) {
        const double x_star = sw_a - margins::normal_quantile(1.0 - sw_eta);
        for (double off : {-1.0, -0.5, -0.25, -0.1, 0.0, 0.1, 0.25, 0.5}) sw_b.push_back(x_star + off);
      }
      std::ostringstream text;
      text << "b,feasibility_rate,N\n";
      for (const auto& p : sweep_1d(sw_a, sw_eta, sw_b, sw_n, sw_seeds, seed)) {
        text << shortest(p.bound) << ',' << shortest(p.feasibility_rate) << ',' << p.scenarios << '\n';
      }
      emit(sw_out, text.str(), out);
      return kOk;
    }
    const OpfModel model = OpfModel::build(load_case_file(va_case));
    const GaussianSpec g = build_uncertainty(model.grid, va_sigma);
    std::vector<double> dispatch;
    try {
      dispatch = dispatch_from_json(read_text(va_dispatch), va_record);
    } catch (const nlohmann::json::exception& e) {
      throw ValidationError(std::string("invalid dispatch JSON: ") + e.what());
    }
    const Confidence c = out_of_sample_confidence(injection_from_dispatch(model, dispatch), model.polytope, g,
                                                  va_n, seed);
    nlohmann::ordered_json j;
    j["case"] = model.grid.name;
    j["confidence"] = c.value;
    j["std_error"] = c.std_error;
    j["n_test"] = va_n;
    j["seed"] = seed;
    emit(va_out, j.dump(2) + "\n", out);
    return kOk;
  } catch (const ParameterError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kDataError;
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << '\n';
    return kDataError;
  } catch (const NumericalError& e) {
    err << "error: " << e.what() << '\n';
    return kSolverFailure;
  }
}

}  // namespace ccopf::cli
