#include "ccopf/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <charconv>
#include <map>
#include <ostream>
#include <thread>

#include "json.hpp"

#include "ccopf/errors.hpp"
#include "ccopf/sample_size.hpp"
#include "ccopf/sampler.hpp"
#include "ccopf/validation.hpp"

namespace ccopf {

namespace {

using Json = nlohmann::ordered_json;

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr std::uint64_t kTestStream = 0x6f6f73;  // out-of-sample sub-stream
constexpr std::uint64_t kPiStream = 0x7069;

bool same(double a, double b) { return (std::isnan(a) && std::isnan(b)) || a == b; }

bool same(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!same(a[i], b[i])) return false;
  }
  return true;
}

Json number(double v) { return std::isnan(v) ? Json(nullptr) : Json(v); }

double number(const Json& j) { return j.is_null() ? kNaN : j.get<double>(); }

std::string pi_mode_name(PiMode mode) { return mode == PiMode::union_bound ? "union-bound" : "monte-carlo"; }

PiMode parse_pi_mode(const std::string& text) {
  if (text == "union-bound") return PiMode::union_bound;
  if (text == "monte-carlo") return PiMode::monte_carlo;
  throw ParameterError("unknown pi mode '" + text + "'");
}

std::string csv_number(double v) {
  if (std::isnan(v)) return "";
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

Json config_json(const ExperimentConfig& c) {
  Json j;
  j["case_path"] = c.case_path;
  j["eta"] = c.eta;
  j["delta"] = c.delta;
  j["method"] = to_string(c.method);
  j["scenarios"] = c.scenarios ? Json(*c.scenarios) : Json("auto");
  j["sigma_fraction"] = c.sigma_fraction;
  j["repetitions"] = c.repetitions;
  j["n_test"] = c.n_test;
  j["seed"] = c.seed;
  j["pi_mode"] = pi_mode_name(c.pi_mode);
  j["pi_samples"] = c.pi_samples;
  return j;
}

ExperimentConfig config_from(const Json& j) {
  ExperimentConfig c;
  c.case_path = j.at("case_path").get<std::string>();
  c.eta = j.at("eta").get<double>();
  c.delta = j.at("delta").get<double>();
  c.method = parse_method(j.at("method").get<std::string>());
  const Json& n = j.at("scenarios");
  if (n.is_string()) {
    if (n.get<std::string>() != "auto") throw ParameterError("scenarios must be a count or \"auto\"");
    c.scenarios.reset();
  } else {
    c.scenarios = n.get<std::size_t>();
  }
  c.sigma_fraction = j.at("sigma_fraction").get<double>();
  c.repetitions = j.at("repetitions").get<std::size_t>();
  c.n_test = j.at("n_test").get<std::size_t>();
  c.seed = j.at("seed").get<std::uint64_t>();
  c.pi_mode = parse_pi_mode(j.at("pi_mode").get<std::string>());
  c.pi_samples = j.at("pi_samples").get<std::size_t>();
  return c;
}

Json report_json(const ExperimentReport& r) {
  Json j;
  j["case"] = r.case_name;
  j["config"] = config_json(r.config);
  j["scenarios"] = r.scenarios;
  j["pi"] = number(r.pi);
  j["bound_m"] = number(r.bound_m);
  j["mean_cost"] = number(r.mean_cost);
  j["mean_confidence"] = number(r.mean_confidence);
  Json records = Json::array();
  for (const auto& rec : r.records) {
    Json jr;
    jr["index"] = rec.index;
    jr["seed"] = rec.seed;
    jr["test_seed"] = rec.test_seed;
    jr["status"] = rec.status;
    jr["cost"] = number(rec.cost);
    jr["confidence"] = number(rec.confidence);
    jr["confidence_se"] = number(rec.confidence_se);
    Json d = Json::array();
    for (double v : rec.dispatch_mw) d.push_back(number(v));
    jr["dispatch_mw"] = d;
    if (!rec.message.empty()) jr["message"] = rec.message;
    records.push_back(jr);
  }
  j["records"] = records;
  return j;
}

ExperimentReport report_from(const Json& j) {
  ExperimentReport r;
  r.case_name = j.at("case").get<std::string>();
  r.config = config_from(j.at("config"));
  r.scenarios = j.at("scenarios").get<std::size_t>();
  r.pi = number(j.at("pi"));
  r.bound_m = number(j.at("bound_m"));
  r.mean_cost = number(j.at("mean_cost"));
  r.mean_confidence = number(j.at("mean_confidence"));
  for (const auto& jr : j.at("records")) {
    RepetitionRecord rec;
    rec.index = jr.at("index").get<std::size_t>();
    rec.seed = jr.at("seed").get<std::uint64_t>();
    rec.test_seed = jr.at("test_seed").get<std::uint64_t>();
    rec.status = jr.at("status").get<std::string>();
    rec.cost = number(jr.at("cost"));
    rec.confidence = number(jr.at("confidence"));
    rec.confidence_se = number(jr.at("confidence_se"));
    for (const auto& v : jr.at("dispatch_mw")) rec.dispatch_mw.push_back(number(v));
    if (jr.contains("message")) rec.message = jr.at("message").get<std::string>();
    r.records.push_back(std::move(rec));
  }
  return r;
}

RepetitionRecord run_repetition(const ExperimentConfig& config, const OpfModel& model, const GaussianSpec& g,
                                std::size_t scenarios, std::size_t k) {
  RepetitionRecord rec;
  rec.index = k;
  rec.seed = derive_seed(config.seed, k);
  rec.test_seed = derive_seed(rec.seed, kTestStream);
  try {
    DispatchSolution sol;
    switch (config.method) {
      case Method::dc_opf: sol = run_dc_opf(model); break;
      case Method::sa: sol = run_sa(model, g, config.eta, scenarios, rec.seed); break;
      case Method::sa_is: sol = run_sa_is(model, g, config.eta, scenarios, rec.seed); break;
    }
    rec.status = to_string(sol.status);
    if (sol.status != SolveStatus::optimal) return rec;
    rec.cost = sol.objective;
    rec.dispatch_mw.assign(model.grid.generators.size(), 0.0);
    for (std::size_t c = 0; c < model.dispatchable.size(); ++c) {
      rec.dispatch_mw[model.dispatchable[c]] = sol.x(static_cast<Eigen::Index>(c));
    }
    if (model.has_balancing_unit()) rec.dispatch_mw[model.balancing] = model.balancing_output(sol.x);
    const Confidence conf =
        out_of_sample_confidence(model.injection(sol.x), model.polytope, g, config.n_test, rec.test_seed);
    rec.confidence = conf.value;
    rec.confidence_se = conf.std_error;
  } catch (const NumericalError& e) {
    RepetitionRecord failed;
    failed.index = rec.index;
    failed.seed = rec.seed;
    failed.test_seed = rec.test_seed;
    failed.status = "numerical-error";
    failed.message = e.what();
    rec = std::move(failed);
  }
  return rec;
}

}  // namespace

std::string to_string(Method method) {
  switch (method) {
    case Method::dc_opf: return "dc-opf";
    case Method::sa: return "sa";
    case Method::sa_is: return "sa-is";
  }
  return "?";
}

Method parse_method(const std::string& text) {
  if (text == "dc-opf") return Method::dc_opf;
  if (text == "sa") return Method::sa;
  if (text == "sa-is") return Method::sa_is;
  throw ParameterError("unknown method '" + text + "' (expected dc-opf, sa or sa-is)");
}

void ExperimentConfig::validate() const {
  if (!(eta > 0.0 && eta <= 0.5)) throw ParameterError("eta must lie in (0, 1/2]");
  if (!(delta > 0.0 && delta < 1.0)) throw ParameterError("delta must lie in (0, 1)");
  if (!(sigma_fraction >= 0.0) || !std::isfinite(sigma_fraction)) {
    throw ParameterError("sigma fraction must be finite and non-negative");
  }
  if (repetitions < 1) throw ParameterError("at least one repetition is required");
  if (n_test < 1) throw ParameterError("out-of-sample count must be positive");
  if (pi_mode == PiMode::monte_carlo && pi_samples < 1) throw ParameterError("pi estimate needs samples");
}

std::size_t ExperimentReport::optimal_count() const {
  std::size_t n = 0;
  for (const auto& r : records) n += r.status == "optimal";
  return n;
}

bool operator==(const ExperimentConfig& a, const ExperimentConfig& b) {
  return a.case_path == b.case_path && same(a.eta, b.eta) && same(a.delta, b.delta) && a.method == b.method &&
         a.scenarios == b.scenarios && same(a.sigma_fraction, b.sigma_fraction) &&
         a.repetitions == b.repetitions && a.n_test == b.n_test && a.seed == b.seed && a.pi_mode == b.pi_mode &&
         a.pi_samples == b.pi_samples;
}

bool operator==(const RepetitionRecord& a, const RepetitionRecord& b) {
  return a.index == b.index && a.seed == b.seed && a.test_seed == b.test_seed && a.status == b.status &&
         same(a.cost, b.cost) && same(a.confidence, b.confidence) && same(a.confidence_se, b.confidence_se) &&
         same(a.dispatch_mw, b.dispatch_mw) && a.message == b.message;
}

bool operator==(const ExperimentReport& a, const ExperimentReport& b) {
  return a.case_name == b.case_name && a.config == b.config && a.scenarios == b.scenarios && same(a.pi, b.pi) &&
         same(a.bound_m, b.bound_m) && same(a.mean_cost, b.mean_cost) &&
         same(a.mean_confidence, b.mean_confidence) && a.records == b.records;
}

GaussianSpec build_uncertainty(const GridCase& grid, double sigma_fraction) {
  if (!(sigma_fraction >= 0.0) || !std::isfinite(sigma_fraction)) {
    throw ParameterError("sigma fraction must be finite and non-negative");
  }
  const std::size_t slack = grid.slack_index();
  Eigen::VectorXd sd = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(grid.buses.size()));
  for (std::size_t i = 0; i < grid.buses.size(); ++i) {
    if (i == slack) continue;
    sd(static_cast<Eigen::Index>(i)) = sigma_fraction * std::abs(grid.buses[i].injection_mw) / grid.base_mva;
  }
  return GaussianSpec::from_stddev(sd);
}

Eigen::VectorXd injection_from_dispatch(const OpfModel& model, const std::vector<double>& dispatch_mw) {
  const GridCase& grid = model.grid;
  if (dispatch_mw.size() != grid.generators.size()) {
    throw ParameterError("dispatch has " + std::to_string(dispatch_mw.size()) + " entries, case has " +
                         std::to_string(grid.generators.size()) + " generators");
  }
  Eigen::VectorXd p = model.fixed_injection;
  for (std::size_t k = 0; k < dispatch_mw.size(); ++k) {
    if (!std::isfinite(dispatch_mw[k])) throw ParameterError("dispatch entries must be finite");
    p(static_cast<Eigen::Index>(grid.bus_index(grid.generators[k].bus))) += dispatch_mw[k] / grid.base_mva;
  }
  return p;
}

SampleSizeChoice resolve_sample_size(const ExperimentConfig& config, const OpfModel& model, const GaussianSpec& g) {
  SampleSizeChoice choice;
  const auto d = static_cast<std::uint64_t>(std::max<Eigen::Index>(model.decision_dim(), 1));
  switch (config.method) {
    case Method::dc_opf: return choice;
    case Method::sa:
      choice.scenarios = sample_size_cc(config.eta, config.delta, d);
      choice.pi = 0.0;
      choice.bound_m = 1.0;
      return choice;
    case Method::sa_is: break;
  }
  const MarginSet m = compute_margins(model.polytope, g, config.eta);
  if (m.stochastic_count() == 0) {
    choice.pi = 1.0;
    choice.bound_m = 1.0;
    return choice;
  }
  const MixtureSampler ms = build_mixture(model.polytope, m, g);
  const PiEstimate pi =
      estimate_pi(m, model.polytope, g, config.pi_mode, config.pi_samples, derive_seed(config.seed, kPiStream));
  choice.pi = pi.value;
  choice.bound_m = ms.bound_m;
  // A Monte Carlo estimate can reach 1; the bound needs pi < 1.
  const double pi_used = std::min(pi.value, std::nextafter(1.0, 0.0));
  choice.scenarios = sample_size_is(config.eta, config.delta, d, pi_used, ms.bound_m);
  return choice;
}

ExperimentReport run_experiment(const ExperimentConfig& config, std::size_t jobs) {
  config.validate();
  const OpfModel model = OpfModel::build(load_case_file(config.case_path));
  return run_experiment(config, model, build_uncertainty(model.grid, config.sigma_fraction), jobs);
}

ExperimentReport run_experiment(const ExperimentConfig& config, const OpfModel& model, const GaussianSpec& g,
                                std::size_t jobs) {
  config.validate();
  if (g.dim() != model.polytope.dim()) throw ParameterError("uncertainty dimension does not match the case");

  ExperimentReport report;
  report.case_name = model.grid.name;
  report.config = config;
  if (config.method == Method::dc_opf) {
    report.scenarios = 0;
  } else if (config.scenarios) {
    report.scenarios = *config.scenarios;
  } else {
    const SampleSizeChoice choice = resolve_sample_size(config, model, g);
    report.scenarios = choice.scenarios;
    report.pi = choice.pi;
    report.bound_m = choice.bound_m;
  }

  report.records.resize(config.repetitions);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k = next++; k < config.repetitions; k = next++) {
      report.records[k] = run_repetition(config, model, g, report.scenarios, k);
    }
  };
  const std::size_t threads = std::clamp<std::size_t>(jobs, 1, config.repetitions);
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  double cost = 0.0;
  double conf = 0.0;
  std::size_t n = 0;
  for (const auto& r : report.records) {
    if (r.status != "optimal") continue;
    cost += r.cost;
    conf += r.confidence;
    ++n;
  }
  if (n > 0) {
    report.mean_cost = cost / static_cast<double>(n);
    report.mean_confidence = conf / static_cast<double>(n);
  }
  return report;
}

std::string report_to_json(const ExperimentReport& report) { return report_json(report).dump(2) + "\n"; }

std::string reports_to_json(const std::vector<ExperimentReport>& reports) {
  if (reports.size() == 1) return report_to_json(reports.front());
  Json j;
  j["reports"] = Json::array();
  for (const auto& r : reports) j["reports"].push_back(report_json(r));
  return j.dump(2) + "\n";
}

std::vector<ExperimentReport> reports_from_json(const std::string& text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw ValidationError(std::string("malformed report JSON: ") + e.what());
  }
  std::vector<ExperimentReport> out;
  try {
    if (j.contains("reports")) {
      for (const auto& r : j.at("reports")) out.push_back(report_from(r));
    } else {
      out.push_back(report_from(j));
    }
  } catch (const Json::exception& e) {
    throw ValidationError(std::string("invalid report JSON: ") + e.what());
  }
  return out;
}

void write_records_csv(std::ostream& out, const std::vector<ExperimentReport>& reports) {
  out << "seed,method,cost,confidence,status\n";
  for (const auto& r : reports) {
    for (const auto& rec : r.records) {
      out << rec.seed << ',' << to_string(r.config.method) << ',' << csv_number(rec.cost) << ','
          << csv_number(rec.confidence) << ',' << rec.status << '\n';
    }
  }
}

void write_table_csv(std::ostream& out, const std::vector<ExperimentReport>& reports) {
  struct Row {
    double cost[3] = {kNaN, kNaN, kNaN};
    double conf[3] = {kNaN, kNaN, kNaN};
  };
  std::vector<std::pair<std::string, double>> order;
  std::map<std::pair<std::string, double>, Row> rows;
  for (const auto& r : reports) {
    const auto key = std::make_pair(r.case_name, r.config.eta);
    if (!rows.count(key)) order.push_back(key);
    const auto m = static_cast<std::size_t>(r.config.method);
    rows[key].cost[m] = r.mean_cost;
    rows[key].conf[m] = r.mean_confidence;
  }
  out << "case,confidence_level,dc_opf_cost,sa_cost,sa_is_cost,sa_conf,sa_is_conf\n";
  for (const auto& key : order) {
    const Row& row = rows[key];
    out << key.first << ',' << csv_number(1.0 - key.second) << ',' << csv_number(row.cost[0]) << ','
        << csv_number(row.cost[1]) << ',' << csv_number(row.cost[2]) << ',' << csv_number(row.conf[1]) << ','
        << csv_number(row.conf[2]) << '\n';
  }
}

}  // namespace ccopf
