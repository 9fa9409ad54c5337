#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace ccopf {

enum class BusType { slack, generator, load };

struct Bus {
  int id = 0;
  BusType type = BusType::load;
  double load_mw = 0.0;
  // Nominal net injection: in-service generation setpoints minus load.
  double injection_mw = 0.0;
  // Injection limits, present only when at least one in-service generator sits
  // on the bus. Pure load buses are unbounded.
  bool has_limits = false;
  double p_min_mw = 0.0;
  double p_max_mw = 0.0;
};

struct Branch {
  int from_bus = 0;
  int to_bus = 0;
  // Series reactance in p.u., including the off-nominal tap ratio when present.
  double reactance = 0.0;
  // Flow rating in MW; zero means unlimited.
  double rating_mw = 0.0;
  // Phase-angle difference limit in rad, rating * reactance on the MVA base.
  double angle_limit = 0.0;

  bool limited() const { return rating_mw > 0.0; }
};

struct Generator {
  int bus = 0;
  double setpoint_mw = 0.0;
  double p_min_mw = 0.0;
  double p_max_mw = 0.0;
  // Linear cost coefficient in $/MWh.
  double cost = 0.0;
};

// Parsed network. Only in-service branches and generators are kept.
class GridCase {
 public:
  std::string name;
  double base_mva = 100.0;
  std::vector<Bus> buses;
  std::vector<Branch> branches;
  std::vector<Generator> generators;
  // Non-fatal notes gathered while parsing (dropped quadratic costs, ...).
  std::vector<std::string> warnings;

  std::size_t bus_count() const { return buses.size(); }
  std::size_t branch_count() const { return branches.size(); }

  // Position of a bus id in `buses`. Throws ValidationError for unknown ids.
  std::size_t bus_index(int id) const;
  std::size_t slack_index() const;

  // Rebuilds the id lookup and derived per-bus quantities (injection, limits)
  // and checks every invariant. Call after editing the tables by hand.
  void finalize();

 private:
  std::unordered_map<int, std::size_t> index_;
  std::size_t slack_ = 0;
};

// Parses the MATPOWER subset: mpc.baseMVA, mpc.bus, mpc.gen, mpc.branch,
// mpc.gencost. Throws ParseError on malformed tables and ValidationError when
// the resulting network breaks an invariant.
GridCase parse_case(std::string_view text);

GridCase load_case_file(const std::filesystem::path& path);

}  // namespace ccopf
