#pragma once

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ccopf/gaussian.hpp"
#include "ccopf/margins.hpp"
#include "ccopf/scenario.hpp"

namespace ccopf {

enum class Method { dc_opf, sa, sa_is };

std::string to_string(Method method);
// Accepts "dc-opf", "sa", "sa-is"; throws ParameterError otherwise.
Method parse_method(const std::string& text);

struct ExperimentConfig {
  std::string case_path;
  double eta = 0.05;
  double delta = 0.01;
  Method method = Method::sa_is;
  // Empty selects the sample-size bound for the method.
  std::optional<std::size_t> scenarios = 600;
  double sigma_fraction = 0.07;
  std::size_t repetitions = 1;
  std::size_t n_test = 1000;
  std::uint64_t seed = 0;
  PiMode pi_mode = PiMode::union_bound;
  std::size_t pi_samples = 100000;

  // Throws ParameterError on out-of-range fields.
  void validate() const;
};

struct RepetitionRecord {
  std::size_t index = 0;
  std::uint64_t seed = 0;       // scenario stream
  std::uint64_t test_seed = 0;  // out-of-sample stream
  std::string status;           // optimal, infeasible, unbounded or numerical-error
  double cost = std::numeric_limits<double>::quiet_NaN();
  double confidence = std::numeric_limits<double>::quiet_NaN();
  double confidence_se = std::numeric_limits<double>::quiet_NaN();
  // Output of every generator in case order, MW. Empty unless optimal.
  std::vector<double> dispatch_mw;
  std::string message;
};

struct ExperimentReport {
  std::string case_name;
  ExperimentConfig config;
  std::size_t scenarios = 0;  // resolved N
  // Redundant-region mass and mixture bound; NaN when not computed.
  double pi = std::numeric_limits<double>::quiet_NaN();
  double bound_m = std::numeric_limits<double>::quiet_NaN();
  // Means over the optimal repetitions; NaN when there are none.
  double mean_cost = std::numeric_limits<double>::quiet_NaN();
  double mean_confidence = std::numeric_limits<double>::quiet_NaN();
  std::vector<RepetitionRecord> records;

  std::size_t optimal_count() const;
};

// NaN compares equal to NaN.
bool operator==(const ExperimentConfig& a, const ExperimentConfig& b);
bool operator==(const RepetitionRecord& a, const RepetitionRecord& b);
bool operator==(const ExperimentReport& a, const ExperimentReport& b);

// Diagonal covariance in p.u.: sigma_i = fraction * |p_i| on non-slack buses,
// zero elsewhere.
GaussianSpec build_uncertainty(const GridCase& grid, double sigma_fraction);

// Full p.u. injection vector for a dispatch of every generator (MW).
Eigen::VectorXd injection_from_dispatch(const OpfModel& model, const std::vector<double>& dispatch_mw);

struct SampleSizeChoice {
  std::size_t scenarios = 0;
  double pi = std::numeric_limits<double>::quiet_NaN();
  double bound_m = std::numeric_limits<double>::quiet_NaN();
};

// Scenario count from the bounds: Calafiore-Campi for SA, the mixture bound
// for SA-IS, zero for DC-OPF.
SampleSizeChoice resolve_sample_size(const ExperimentConfig& config, const OpfModel& model, const GaussianSpec& g);

// Loads the case and runs all repetitions on up to `jobs` threads. Case and
// parameter errors throw; solver failures of single repetitions are recorded.
// Records are ordered by repetition index whatever the thread count.
ExperimentReport run_experiment(const ExperimentConfig& config, std::size_t jobs = 1);
ExperimentReport run_experiment(const ExperimentConfig& config, const OpfModel& model, const GaussianSpec& g,
                                std::size_t jobs = 1);

std::string report_to_json(const ExperimentReport& report);
std::string reports_to_json(const std::vector<ExperimentReport>& reports);
// Accepts a single report object or {"reports": [...]}.
std::vector<ExperimentReport> reports_from_json(const std::string& text);

// One row per repetition: seed,method,cost,confidence,status.
void write_records_csv(std::ostream& out, const std::vector<ExperimentReport>& reports);
// case,confidence_level,dc_opf_cost,sa_cost,sa_is_cost,sa_conf,sa_is_conf per (case, eta).
void write_table_csv(std::ostream& out, const std::vector<ExperimentReport>& reports);

}  // namespace ccopf
