#include <random>
#include <string>

#include "doctest.h"

#include "ccopf/errors.hpp"
#include "ccopf/grid_case.hpp"
#include "ccopf/grid_matrices.hpp"
#include "ccopf/polytope.hpp"

using namespace ccopf;

namespace {

const std::string kTwoBus = R"(function mpc = two_bus
mpc.baseMVA = 100;
% bus_i type Pd
mpc.bus = [
  1 3 0;
  2 1 50;
];
mpc.gen = [
  1 50 0 0 0 1 100 1 200 0;
];
mpc.branch = [
  1 2 0 0.1 0 0 0 0 0 0 1;
];
mpc.gencost = [
  2 0 0 2 10 0;
];
)";

// Three buses in a triangle with equal reactances, slack at bus 3.
const std::string kTriangle = R"(function mpc = triangle
mpc.baseMVA = 100;
mpc.bus = [
  1 2 0;
  2 1 0;
  3 3 0;
];
mpc.gen = [
  1 0 0 0 0 1 100 1 100 0;
  3 0 0 0 0 1 100 1 100 0;
];
mpc.branch = [
  1 2 0 0.2 0 0 0 0 0 0 1;
  2 3 0 0.2 0 0 0 0 0 0 1;
  1 3 0 0.2 0 0 0 0 0 0 1;
];
mpc.gencost = [
  2 0 0 2 10 0;
  2 0 0 2 20 0;
];
)";

std::string replace(std::string text, const std::string& from, const std::string& to) {
  const auto pos = text.find(from);
  REQUIRE(pos != std::string::npos);
  return text.replace(pos, from.size(), to);
}

GridCase load(const std::string& name) { return load_case_file(std::string(CCOPF_DATA_DIR) + "/cases/" + name); }

}  // namespace

TEST_CASE("two-bus case parses") {
  const GridCase g = parse_case(kTwoBus);
  CHECK(g.name == "two_bus");
  CHECK(g.bus_count() == 2);
  CHECK(g.branch_count() == 1);
  CHECK(g.buses[1].injection_mw == -50.0);
  CHECK(g.buses[0].injection_mw == 50.0);
  CHECK(g.slack_index() == 0);
  CHECK(g.generators.at(0).cost == 10.0);
  CHECK_FALSE(g.buses[1].has_limits);
  CHECK(g.buses[0].has_limits);
  CHECK(g.branches[0].limited() == false);
}

TEST_CASE("bundled cases parse with the expected sizes") {
  CHECK(load("case_ieee30.m").bus_count() == 30);
  CHECK(load("case30.m").bus_count() == 30);
  CHECK(load("case57.m").bus_count() == 57);
  CHECK(load("case118.m").bus_count() == 118);
  CHECK(load("case118.m").generators.size() == 54);
}

TEST_CASE("parser rejects invalid cases") {
  SUBCASE("unknown bus in a branch") {
    CHECK_THROWS_AS(parse_case(replace(kTwoBus, "1 2 0 0.1", "1 99 0 0.1")), ValidationError);
  }
  SUBCASE("zero reactance") {
    CHECK_THROWS_AS(parse_case(replace(kTwoBus, "1 2 0 0.1", "1 2 0 0")), ValidationError);
  }
  SUBCASE("negative reactance") {
    CHECK_THROWS_AS(parse_case(replace(kTwoBus, "1 2 0 0.1", "1 2 0 -0.1")), ValidationError);
  }
  SUBCASE("no slack bus") {
    CHECK_THROWS_AS(parse_case(replace(kTwoBus, "1 3 0;", "1 2 0;")), ValidationError);
  }
  SUBCASE("two slack buses") {
    CHECK_THROWS_AS(parse_case(replace(kTwoBus, "2 1 50;", "2 3 50;")), ValidationError);
  }
  SUBCASE("disconnected graph") {
    const std::string text = replace(kTwoBus, "2 1 50;", "2 1 50;\n  3 1 10;");
    CHECK_THROWS_AS(parse_case(text), ValidationError);
  }
  SUBCASE("Pmin above Pmax") {
    CHECK_THROWS_AS(parse_case(replace(kTwoBus, "1 100 1 200 0;", "1 100 1 200 300;")), ValidationError);
  }
  SUBCASE("unsupported cost model") {
    CHECK_THROWS_AS(parse_case(replace(kTwoBus, "2 0 0 2 10 0;", "1 0 0 2 10 0;")), ValidationError);
  }
  SUBCASE("missing table") {
    CHECK_THROWS_AS(parse_case(replace(kTwoBus, "mpc.gencost", "mpc.other")), ValidationError);
  }
}

TEST_CASE("malformed tables report the line") {
  SUBCASE("bad token") {
    try {
      parse_case(replace(kTwoBus, "2 1 50;", "2 1 5x0;"));
      FAIL("expected a parse error");
    } catch (const ParseError& e) {
      CHECK(e.line() == 6);
    }
  }
  SUBCASE("short row") {
    try {
      parse_case(replace(kTwoBus, "1 2 0 0.1 0 0 0 0 0 0 1;", "1 2 0;"));
      FAIL("expected a parse error");
    } catch (const ParseError& e) {
      CHECK(e.line() == 12);
    }
  }
  SUBCASE("unterminated matrix") { CHECK_THROWS_AS(parse_case("mpc.baseMVA = 100;\nmpc.bus = [\n 1 3 0;\n"), ParseError); }
}

TEST_CASE("comments, commas and out-of-service elements") {
  std::string text = replace(kTwoBus, "1 2 0 0.1 0 0 0 0 0 0 1;", "1, 2, 0, 0.1, 0, 0, 0, 0, 0, 0, 1; % in service\n  1 2 0 0.3 0 0 0 0 0 0 0;");
  text = replace(text, "mpc.gen = [", "mpc.gen = [\n  2 0 0 0 0 1 100 0 80 0; % off");
  text = replace(text, "mpc.gencost = [", "mpc.gencost = [\n  2 0 0 2 99 0;");
  const GridCase g = parse_case(text);
  CHECK(g.branch_count() == 1);
  CHECK(g.generators.size() == 1);
  CHECK(g.generators[0].cost == 10.0);
  CHECK_FALSE(g.buses[1].has_limits);
}

TEST_CASE("quadratic cost terms are dropped with a warning") {
  const GridCase g = parse_case(replace(kTwoBus, "2 0 0 2 10 0;", "2 0 0 3 0.01 10 0;"));
  CHECK(g.generators[0].cost == 10.0);
  CHECK(g.warnings.size() == 1);
}

TEST_CASE("tap ratio scales the reactance and the rating sets the angle limit") {
  const GridCase g = parse_case(replace(kTwoBus, "1 2 0 0.1 0 0 0 0 0 0 1;", "1 2 0 0.1 0 80 0 0 0.5 0 1;"));
  CHECK(g.branches[0].reactance == doctest::Approx(0.05));
  CHECK(g.branches[0].angle_limit == doctest::Approx(0.8 * 0.05));
}

TEST_CASE("two-bus Laplacian") {
  const GridMatrices m = build_matrices(parse_case(kTwoBus));
  Eigen::Matrix2d expected;
  expected << 10, -10, -10, 10;
  CHECK((m.laplacian - expected).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(m.incidence(0, 0) == 1.0);
  CHECK(m.incidence(0, 1) == -1.0);
}

TEST_CASE("triangle flow split") {
  const GridCase g = parse_case(kTriangle);
  const GridMatrices m = build_matrices(g);
  // One p.u. injected at bus 1 and withdrawn at the slack bus 3.
  Eigen::Vector3d p(1.0, 0.0, -1.0);
  const Eigen::VectorXd flows = (m.angle_sensitivity * p).array() / 0.2;
  CHECK(flows(0) == doctest::Approx(1.0 / 3.0).epsilon(1e-12));  // 1-2
  CHECK(flows(1) == doctest::Approx(1.0 / 3.0).epsilon(1e-12));  // 2-3
  CHECK(flows(2) == doctest::Approx(2.0 / 3.0).epsilon(1e-12));  // 1-3
}

TEST_CASE("matrix invariants on every bundled case") {
  for (const char* name : {"case_ieee30.m", "case30.m", "case57.m", "case118.m"}) {
    CAPTURE(name);
    const GridCase g = load(name);
    const GridMatrices m = build_matrices(g);
    const auto n = static_cast<Eigen::Index>(g.bus_count());
    const Eigen::MatrixXd& b = m.laplacian;
    const Eigen::MatrixXd& bp = m.laplacian_pinv;
    CHECK((b * Eigen::VectorXd::Ones(n)).cwiseAbs().maxCoeff() <= 1e-10);
    CHECK((b * bp * b - b).cwiseAbs().maxCoeff() <= 1e-8);
    CHECK((bp * b * bp - bp).cwiseAbs().maxCoeff() <= 1e-8 * std::max(1.0, bp.cwiseAbs().maxCoeff()));
    CHECK((bp - bp.transpose()).cwiseAbs().maxCoeff() <= 1e-8);
    for (Eigen::Index k = 0; k < m.incidence.rows(); ++k) {
      CHECK((m.incidence.row(k).array() == 1.0).count() == 1);
      CHECK((m.incidence.row(k).array() == -1.0).count() == 1);
      CHECK((m.incidence.row(k).array() != 0.0).count() == 2);
    }
    const auto s = static_cast<Eigen::Index>(g.slack_index());
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = 0; j < n; ++j) {
        double expected = 0.0;
        if (i == j && i != s) expected = 1.0;
        if (i == s && j != s) expected = -1.0;
        CHECK(m.balance(i, j) == expected);
      }
    }
  }
}

TEST_CASE("balance row gives the slack injection") {
  const GridCase g = load("case_ieee30.m");
  const GridMatrices m = build_matrices(g);
  const auto s = static_cast<Eigen::Index>(g.slack_index());
  std::mt19937_64 gen(11);
  std::normal_distribution<double> nd;
  for (int trial = 0; trial < 20; ++trial) {
    Eigen::VectorXd p(30);
    for (auto& v : p) v = nd(gen);
    const Eigen::VectorXd cp = m.balance * p;
    CHECK(cp(s) == doctest::Approx(-(p.sum() - p(s))).epsilon(1e-12));
  }
}

TEST_CASE("polytope row counts") {
  SUBCASE("two buses with limits and a rated branch") {
    std::string text = replace(kTwoBus, "1 2 0 0.1 0 0 0 0 0 0 1;", "1 2 0 0.1 0 80 0 0 0 0 1;");
    text = replace(text, "mpc.gen = [", "mpc.gen = [\n  2 0 0 0 0 1 100 1 10 0;");
    text = replace(text, "mpc.gencost = [", "mpc.gencost = [\n  2 0 0 2 30 0;");
    const GridCase g = parse_case(text);
    const FeasibilityPolytope p = build_polytope(g, build_matrices(g));
    CHECK(p.rows() == 6);
    CHECK(p.labels[0].kind == RowKind::angle_upper);
    CHECK(p.labels[1].kind == RowKind::angle_lower);
    CHECK(p.labels[2].kind == RowKind::injection_upper);
    CHECK(p.labels[5].kind == RowKind::injection_lower);
  }
  SUBCASE("load bus without limits drops its two rows") {
    const GridCase g = parse_case(replace(kTwoBus, "1 2 0 0.1 0 0 0 0 0 0 1;", "1 2 0 0.1 0 80 0 0 0 0 1;"));
    CHECK(build_polytope(g, build_matrices(g)).rows() == 4);
  }
  SUBCASE("unrated branches contribute nothing") {
    const GridCase g = parse_case(kTwoBus);
    CHECK(build_polytope(g, build_matrices(g)).rows() == 2);
  }
}

TEST_CASE("polytope rows are plus or minus the operator rows") {
  const GridCase g = load("case57.m");
  const GridMatrices m = build_matrices(g);
  const FeasibilityPolytope p = build_polytope(g, m);
  std::size_t limited = 0, with_limits = 0;
  for (const auto& br : g.branches) limited += br.limited();
  for (const auto& bus : g.buses) with_limits += bus.has_limits;
  CHECK(p.rows() == static_cast<Eigen::Index>(2 * limited + 2 * with_limits));
  for (Eigen::Index r = 0; r < p.rows(); ++r) {
    const RowLabel& l = p.labels[static_cast<std::size_t>(r)];
    const auto e = static_cast<Eigen::Index>(l.element);
    Eigen::VectorXd expected;
    switch (l.kind) {
      case RowKind::angle_upper: expected = m.angle_sensitivity.row(e); break;
      case RowKind::angle_lower: expected = -m.angle_sensitivity.row(e); break;
      case RowKind::injection_upper: expected = m.balance.row(e); break;
      case RowKind::injection_lower: expected = -m.balance.row(e); break;
    }
    CHECK((p.normals.row(r).transpose() - expected).cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("nominal IEEE 30 operating point lies in the polytope") {
  const GridCase g = load("case_ieee30.m");
  const FeasibilityPolytope p = build_polytope(g, build_matrices(g));
  Eigen::VectorXd x(30);
  for (std::size_t i = 0; i < 30; ++i) x(static_cast<Eigen::Index>(i)) = g.buses[i].injection_mw / g.base_mva;
  CHECK(p.contains(x, 1e-12));
}

TEST_CASE("membership is translation-consistent") {
  const GridCase g = load("case_ieee30.m");
  const FeasibilityPolytope p = build_polytope(g, build_matrices(g));
  std::mt19937_64 gen(3);
  std::normal_distribution<double> nd(0.0, 0.5);
  for (int trial = 0; trial < 200; ++trial) {
    Eigen::VectorXd x(30), xi(30);
    for (auto& v : x) v = nd(gen);
    for (auto& v : xi) v = nd(gen);
    const bool direct = p.contains(x + xi);
    FeasibilityPolytope shifted = p;
    shifted.offsets = p.offsets - p.normals * x;
    CHECK(direct == shifted.contains(xi));
  }
}

TEST_CASE("row kind names") {
  CHECK(to_string(RowKind::angle_upper) == "angle-upper");
  CHECK(to_string(RowKind::injection_lower) == "injection-lower");
}
