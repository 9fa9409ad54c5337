// Acceptance checks. One PASS/FAIL line per criterion; exit status 1 if any fails.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "oracles.hpp"

#include "ccopf/cli.hpp"
#include "ccopf/experiment.hpp"
#include "ccopf/margins.hpp"
#include "ccopf/sample_size.hpp"
#include "ccopf/sampler.hpp"
#include "ccopf/scenario.hpp"
#include "ccopf/validation.hpp"

using namespace ccopf;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

int failures = 0;

void report(int id, const std::string& name, bool pass, const std::string& detail) {
  std::printf("%s %d %s: %s\n", pass ? "PASS" : "FAIL", id, name.c_str(), detail.c_str());
  std::fflush(stdout);
  if (!pass) ++failures;
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

std::string case_path(const std::string& name) { return std::string(CCOPF_DATA_DIR) + "/cases/" + name; }

FeasibilityPolytope polytope_of(const Eigen::MatrixXd& w, const Eigen::VectorXd& b) {
  FeasibilityPolytope p;
  p.normals = w;
  p.offsets = b;
  p.labels.assign(static_cast<std::size_t>(w.rows()), RowLabel{});
  return p;
}

void one_d_oracle() {
  const auto start = Clock::now();
  const FeasibilityPolytope line = polytope_of(Eigen::MatrixXd::Ones(1, 1), Eigen::VectorXd::Zero(1));
  const GaussianSpec g = GaussianSpec::from_stddev(Eigen::VectorXd::Ones(1));
  bool pass = true;
  std::ostringstream detail;
  for (double eta : {0.05, 0.01}) {
    const double x_star = -oracle::quantile(1.0 - eta);
    double worst_gap = -HUGE_VAL, worst_conf = 1.0;
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
      const SyntheticResult r = solve_1d_synthetic(0.0, eta, SyntheticMethod::sa_is, 100, seed);
      const Confidence c = out_of_sample_confidence(Eigen::VectorXd::Constant(1, r.x_hat), line, g, 100000,
                                                    derive_seed(seed, 1));
      worst_gap = std::max(worst_gap, r.x_hat - x_star);
      worst_conf = std::min(worst_conf, c.value);
      pass = pass && r.x_hat <= x_star + 1e-9 && c.value >= 1.0 - eta - 0.005;
    }
    detail << "eta " << eta << ": max(x-x*) " << fmt("%.3g", worst_gap) << ", min conf " << worst_conf << "; ";
  }
  const double t = seconds_since(start);
  pass = pass && t < 10.0;
  detail << fmt("%.2f s", t) << " (limit 10 s)";
  report(1, "1-D oracle", pass, detail.str());
}

double ks_statistic(std::vector<double> values, double beta) {
  std::sort(values.begin(), values.end());
  const double n = static_cast<double>(values.size());
  double d = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double f = oracle::truncated_cdf(values[i], beta);
    d = std::max({d, f - static_cast<double>(i) / n, static_cast<double>(i + 1) / n - f});
  }
  return d;
}

void sampler_law() {
  const auto start = Clock::now();
  // Tilted row in dimension 3 with a non-diagonal covariance; the law of the
  // standardized projection must still be the truncated normal.
  Eigen::MatrixXd w(1, 3);
  w << 0.8, -1.5, 0.4;
  Eigen::Matrix3d a;
  a << 1.0, 0.2, 0.0, 0.3, 0.7, 0.1, -0.2, 0.0, 1.2;
  const GaussianSpec g = GaussianSpec::from_covariance(a * a.transpose());
  const FeasibilityPolytope poly = polytope_of(w, Eigen::VectorXd::Ones(1));
  const double sd = g.row_stddev(w.row(0).transpose());
  const std::size_t n = 100000;
  bool pass = true;
  std::ostringstream detail;
  for (double beta : {0.0, 1.0, 2.0, 4.0}) {
    const MarginSet m = margins_from_offsets(poly, g, Eigen::VectorXd::Constant(1, beta * sd), 0.05);
    const MixtureSampler ms = build_mixture(poly, m, g);
    Rng rng(derive_seed(2024, static_cast<std::uint64_t>(beta)));
    std::vector<double> y(n);
    std::size_t inside = 0;
    for (auto& v : y) {
      const Eigen::VectorXd xi = sample_tail(ms, 0, rng);
      const double proj = w.row(0).dot(xi);
      if (proj >= m.delta(0)) ++inside;
      v = proj / sd;
    }
    const double d = ks_statistic(y, beta);
    const double crit = oracle::ks_critical_1pct(n);
    pass = pass && d < crit && inside == n;
    detail << "beta " << beta << ": D " << fmt("%.5f", d) << ", half-space " << inside << "/" << n << "; ";
  }
  const double t = seconds_since(start);
  pass = pass && t < 30.0;
  detail << "critical " << fmt("%.5f", oracle::ks_critical_1pct(n)) << ", " << fmt("%.2f s", t)
         << " (limit 30 s)";
  report(2, "sampler law", pass, detail.str());
}

void ratio_bound() {
  const auto start = Clock::now();
  std::mt19937_64 gen(31);
  std::normal_distribution<double> nd;
  Eigen::MatrixXd w(10, 5), a(5, 5);
  for (auto& v : w.reshaped()) v = nd(gen);
  for (auto& v : a.reshaped()) v = nd(gen);
  const GaussianSpec g = GaussianSpec::from_covariance(a * a.transpose() + 0.1 * Eigen::MatrixXd::Identity(5, 5));
  const FeasibilityPolytope poly = polytope_of(w, Eigen::VectorXd::Constant(10, 10.0));
  const MarginSet m = compute_margins(poly, g, 0.05);
  const MixtureSampler ms = build_mixture(poly, m, g);

  const std::size_t n_mc = 1000000;
  Rng mc(101);
  std::size_t outside = 0;
  for (std::size_t t = 0; t < n_mc; ++t) {
    if (!contains_inner(m, poly, g.sample(mc))) ++outside;
  }
  const double p_out = static_cast<double>(outside) / static_cast<double>(n_mc);
  const double se = std::sqrt(p_out * (1.0 - p_out) / static_cast<double>(n_mc));
  const double limit = ms.bound_m * (1.0 + 1e-6) * (p_out + 3.0 * se) / p_out;

  Rng rng(102);
  double max_ratio = 0.0;
  std::size_t in_support = 0;
  for (int t = 0; t < 10000; ++t) {
    const Eigen::VectorXd xi = sample_mixture(ms, rng).first;
    if (contains_inner(m, poly, xi)) ++in_support;
    max_ratio = std::max(max_ratio, g.pdf(xi) / p_out / mixture_pdf(ms, xi));
  }
  const double t = seconds_since(start);
  const bool pass = max_ratio <= limit && in_support == 0 && t < 60.0;
  report(3, "density-ratio bound", pass,
         "max p/q " + fmt("%.6f", max_ratio) + ", M " + fmt("%.6f", ms.bound_m) + ", limit " + fmt("%.6f", limit) +
             ", P(out) " + fmt("%.5f", p_out) + ", draws inside inner region " + std::to_string(in_support) + ", " +
             fmt("%.2f s", t) + " (limit 60 s)");
}

void formula_oracles() {
  const double etas[] = {0.2, 0.1, 0.05, 0.01, 0.001};
  const double deltas[] = {0.1, 0.01, 1e-6, 0.05};
  const std::uint64_t dims[] = {1, 5, 6, 53};
  const double pis[] = {0.0, 0.5, 0.9, 0.999};
  const double ms[] = {1.0, 2.5, 12.0, 150.0};
  int checked = 0, mismatched = 0;
  for (int i = 0; i < 20; ++i) {
    const double eta = etas[i % 5], delta = deltas[i % 4], pi = pis[(i / 5) % 4], m = ms[(i / 4) % 4];
    const std::uint64_t d = dims[(i / 2) % 4];
    const std::uint64_t cc = sample_size_cc(eta, delta, d);
    const std::uint64_t filtered = sample_size_filtered(eta, delta, d, pi);
    const std::uint64_t is = sample_size_is(eta, delta, d, pi, m);
    mismatched += cc != oracle::sample_size(eta, delta, d, 0.0, 1.0);
    mismatched += filtered != oracle::sample_size(eta, delta, d, pi, 1.0);
    mismatched += is != oracle::sample_size(eta, delta, d, pi, m);
    mismatched += sample_size_filtered(eta, delta, d, 0.0) != cc;
    mismatched += sample_size_is(eta, delta, d, pi, 1.0) != filtered;
    checked += 5;
  }
  report(4, "sample-size formulas", mismatched == 0,
         std::to_string(checked - mismatched) + "/" + std::to_string(checked) +
             " integer matches on 20 grid points (including pi = 0 and M = 1 reductions)");
}

void scenario_collapse() {
  std::mt19937_64 gen(4242);
  std::uniform_int_distribution<int> dim(2, 6), count(1, 50), decisions(1, 3);
  std::normal_distribution<double> nd;
  int agree = 0, optimal = 0;
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const int n = dim(gen), rows = dim(gen) + 2, d = std::min(decisions(gen), n), N = count(gen);
    Eigen::MatrixXd w(rows, n), map(n, d), a(n, n);
    for (auto& v : w.reshaped()) v = nd(gen);
    for (auto& v : map.reshaped()) v = nd(gen);
    for (auto& v : a.reshaped()) v = 0.3 * nd(gen);
    const FeasibilityPolytope poly = polytope_of(w, Eigen::VectorXd::Constant(rows, 3.0));
    const GaussianSpec g = GaussianSpec::from_covariance(a * a.transpose());
    const ScenarioSet scen = draw_nominal(g, static_cast<std::size_t>(N), static_cast<std::uint64_t>(trial));

    LinearProgram reduced;
    reduced.cost = Eigen::VectorXd(d);
    for (auto& v : reduced.cost) v = nd(gen);
    reduced.lower = Eigen::VectorXd::Constant(d, -5.0);
    reduced.upper = Eigen::VectorXd::Constant(d, 5.0);
    reduced.rows = w * map;
    reduced.rhs = reduce_scenarios(poly, scen);

    LinearProgram stacked = reduced;
    stacked.rows.resize(rows * N, d);
    stacked.rhs.resize(rows * N);
    for (int t = 0; t < N; ++t) {
      stacked.rows.middleRows(t * rows, rows) = w * map;
      stacked.rhs.segment(t * rows, rows) = poly.offsets - w * scen.scenarios.row(t).transpose();
    }
    const DispatchSolution x = solve(reduced);
    const DispatchSolution y = solve(stacked);
    bool same = x.status == y.status;
    if (same && x.status == SolveStatus::optimal) {
      ++optimal;
      const double diff = std::abs(x.objective - y.objective);
      worst = std::max(worst, diff);
      same = diff <= 1e-9;
    }
    agree += same;
  }
  report(5, "scenario collapse", agree == 100,
         std::to_string(agree) + "/100 instances agree (" + std::to_string(optimal) + " optimal), max |diff| " +
             fmt("%.3g", worst) + " (tol 1e-9)");
}

struct ReferenceRow {
  const char* file;
  const char* label;
  double dc_opf, sa, sa_is;
};

void benchmark_reproduction() {
  const auto start = Clock::now();
  const ReferenceRow rows[] = {{"case_ieee30.m", "IEEE 30", 5669, 5712, 5735},
                           {"case57.m", "IEEE 57", 25016, 25044, 25095}};
  const std::size_t jobs = std::max(1u, std::thread::hardware_concurrency());
  bool pass = true;
  std::vector<std::string> lines;
  for (const auto& row : rows) {
    ExperimentConfig config;
    config.case_path = case_path(row.file);
    config.eta = 0.05;
    config.scenarios = 600;
    config.repetitions = 50;
    config.sigma_fraction = 0.07;
    config.seed = 0;
    const OpfModel model = OpfModel::build(load_case_file(config.case_path));
    const GaussianSpec g = build_uncertainty(model.grid, config.sigma_fraction);
    ExperimentReport reports[3];
    const Method methods[] = {Method::dc_opf, Method::sa, Method::sa_is};
    for (int k = 0; k < 3; ++k) {
      config.method = methods[k];
      reports[k] = run_experiment(config, model, g, jobs);
    }
    const ExperimentReport& dc = reports[0];
    const ExperimentReport& sa = reports[1];
    const ExperimentReport& is = reports[2];
    const bool all_optimal = dc.optimal_count() == 50 && sa.optimal_count() == 50 && is.optimal_count() == 50;
    const bool coverage = is.mean_confidence >= 0.95;
    const bool ordering_conf = sa.mean_confidence < is.mean_confidence;
    bool ordering_cost = all_optimal;
    for (std::size_t r = 0; r < 50 && all_optimal; ++r) {
      const double floor = dc.records[r].cost;
      ordering_cost = ordering_cost && floor <= is.records[r].cost + 1e-9 * std::abs(floor);
    }
    const auto within = [](double v, double ref) { return std::abs(v - ref) <= 0.05 * ref; };
    // Costs are comparable only when the case's linear costs reproduce the
    // deterministic figure.
    const bool comparable = within(dc.mean_cost, row.dc_opf);
    const bool costs = !comparable || (within(sa.mean_cost, row.sa) && within(is.mean_cost, row.sa_is));
    pass = pass && all_optimal && coverage && ordering_conf && ordering_cost && costs;

    std::ostringstream s;
    s << row.label << ": cost dc-opf/sa/sa-is " << fmt("%.1f", dc.mean_cost) << "/" << fmt("%.1f", sa.mean_cost)
      << "/" << fmt("%.1f", is.mean_cost) << " (reference " << row.dc_opf << "/" << row.sa << "/" << row.sa_is
      << ", " << (comparable ? (costs ? "within 5%" : "NOT within 5%") : "not comparable") << "), conf sa/sa-is "
      << fmt("%.4f", sa.mean_confidence) << "/" << fmt("%.4f", is.mean_confidence) << " (a " << (coverage ? "ok" : "no")
      << ", b " << (ordering_conf ? "ok" : "no") << ", c " << (ordering_cost ? "ok" : "no") << ")";
    lines.push_back(s.str());
  }
  const double t = seconds_since(start);
  pass = pass && t < 600.0;
  std::string detail;
  for (const auto& l : lines) detail += l + "; ";
  detail += fmt("%.1f s", t) + " (limit 600 s)";
  report(6, "benchmark reproduction", pass, detail);
}

void margin_trivia() {
  bool pass = true;
  std::ostringstream detail;
  for (const char* file : {"case_ieee30.m", "case57.m", "case118.m"}) {
    const OpfModel model = OpfModel::build(load_case_file(case_path(file)));
    const GaussianSpec g = build_uncertainty(model.grid, 0.07);
    const MarginSet m = compute_margins(model.polytope, g, 0.5);
    const bool zero = (m.delta.array() == 0.0).all();
    const DispatchSolution is = run_sa_is(model, g, 0.5, 0, 1);
    const DispatchSolution dc = run_dc_opf(model);
    const bool same = is.status == dc.status && is.objective == dc.objective && is.x == dc.x;
    pass = pass && zero && same;
    detail << file << ": max Delta " << m.delta.maxCoeff() << ", SA-IS(N=0) " << fmt("%.6f", is.objective)
           << " vs DC-OPF " << fmt("%.6f", dc.objective) << (same ? " identical" : " DIFFERENT") << "; ";
  }
  report(7, "margins at eta = 0.5", pass, detail.str());
}

std::string cli_csv(const std::string& jobs) {
  const std::vector<std::string> args = {"ccopf",     "run",    "--case",       case_path("case_ieee30.m"),
                                         "--method",  "dc-opf,sa,sa-is", "--scenarios", "200",
                                         "--reps",    "6",      "--n-test",     "500",
                                         "--seed",    "17",     "--format",     "csv",
                                         "--jobs",    jobs};
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return code == 0 ? out.str() : std::string();
}

void determinism() {
  const std::string first = cli_csv("1");
  const std::string second = cli_csv("1");
  const std::string threaded = cli_csv("4");
  const bool pass = !first.empty() && first == second && first == threaded;
  report(8, "determinism", pass,
         std::to_string(first.size()) + "-byte CSV, repeat " + (first == second ? "identical" : "DIFFERENT") +
             ", 4 threads " + (first == threaded ? "identical" : "DIFFERENT"));
}

template <class F>
void guarded(int id, const char* name, F&& f) {
  try {
    f();
  } catch (const std::exception& e) {
    report(id, name, false, std::string("exception: ") + e.what());
  }
}

}  // namespace

int main() {
  guarded(1, "1-D oracle", one_d_oracle);
  guarded(2, "sampler law", sampler_law);
  guarded(3, "density-ratio bound", ratio_bound);
  guarded(4, "sample-size formulas", formula_oracles);
  guarded(5, "scenario collapse", scenario_collapse);
  guarded(6, "benchmark reproduction", benchmark_reproduction);
  guarded(7, "margins at eta = 0.5", margin_trivia);
  guarded(8, "determinism", determinism);
  std::printf("%d of 8 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
