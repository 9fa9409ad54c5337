#include "ccopf/grid_case.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <optional>
#include <queue>
#include <sstream>

#include "ccopf/errors.hpp"

namespace ccopf {

namespace {

struct Row {
  std::size_t line = 0;
  std::vector<double> values;
};

struct Table {
  std::size_t line = 0;
  std::vector<Row> rows;
};

struct RawCase {
  std::string name;
  std::optional<double> base_mva;
  std::map<std::string, Table> tables;
};

std::string strip_comment(const std::string& line) {
  const auto pos = line.find('%');
  return pos == std::string::npos ? line : line.substr(0, pos);
}

std::string trim(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

double parse_number(const std::string& token, std::size_t line) {
  if (token == "Inf" || token == "inf") return HUGE_VAL;
  if (token == "-Inf" || token == "-inf") return -HUGE_VAL;
  char* end = nullptr;
  const double value = std::strtod(token.c_str(), &end);
  if (token.empty() || end != token.c_str() + token.size()) {
    throw ParseError(line, "expected a number, found '" + token + "'");
  }
  return value;
}

// Splits one matrix line into rows (';' terminates a row) and appends them.
// Returns true when the closing ']' was seen.
bool consume_matrix_text(const std::string& text, std::size_t line, Row& pending, Table& table) {
  std::string token;
  auto flush_token = [&] {
    if (!token.empty()) {
      pending.values.push_back(parse_number(token, line));
      if (pending.line == 0) pending.line = line;
      token.clear();
    }
  };
  auto flush_row = [&] {
    flush_token();
    if (!pending.values.empty()) table.rows.push_back(std::move(pending));
    pending = Row{};
  };
  for (char ch : text) {
    if (ch == ']') {
      flush_row();
      return true;
    }
    if (ch == ';') {
      flush_row();
    } else if (std::isspace(static_cast<unsigned char>(ch)) || ch == ',') {
      flush_token();
    } else {
      token.push_back(ch);
    }
  }
  // MATPOWER also allows a newline to end a row.
  flush_row();
  return false;
}

RawCase tokenize(std::string_view text) {
  RawCase raw;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;

  std::optional<std::string> open_table;
  Row pending;

  while (std::getline(in, line)) {
    ++line_no;
    const std::string body = trim(strip_comment(line));
    if (open_table) {
      if (consume_matrix_text(body, line_no, pending, raw.tables[*open_table])) open_table.reset();
      continue;
    }
    if (body.empty()) continue;

    if (body.rfind("function", 0) == 0) {
      const auto eq = body.find('=');
      if (eq != std::string::npos) raw.name = trim(std::string_view(body).substr(eq + 1));
      continue;
    }
    if (body.rfind("mpc.", 0) != 0) continue;

    const auto eq = body.find('=');
    if (eq == std::string::npos) throw ParseError(line_no, "assignment expected after 'mpc.'");
    const std::string field = trim(std::string_view(body).substr(4, eq - 4));
    std::string rhs = trim(std::string_view(body).substr(eq + 1));

    if (!rhs.empty() && rhs.front() == '[') {
      Table& table = raw.tables[field];
      table = Table{line_no, {}};
      pending = Row{};
      if (!consume_matrix_text(rhs.substr(1), line_no, pending, table)) open_table = field;
      continue;
    }
    if (field == "baseMVA") {
      if (!rhs.empty() && rhs.back() == ';') rhs.pop_back();
      raw.base_mva = parse_number(trim(rhs), line_no);
    }
    // Other scalar fields (version, areas, ...) are not needed.
  }
  if (open_table) throw ParseError(line_no, "unterminated matrix 'mpc." + *open_table + "'");
  return raw;
}

const Table& require_table(const RawCase& raw, const std::string& name) {
  const auto it = raw.tables.find(name);
  if (it == raw.tables.end()) throw ValidationError("case is missing table mpc." + name);
  return it->second;
}

void require_columns(const Row& row, std::size_t count, const std::string& table) {
  if (row.values.size() < count) {
    throw ParseError(row.line, "mpc." + table + " row has " + std::to_string(row.values.size()) +
                                   " columns, expected at least " + std::to_string(count));
  }
}

int as_id(double value, std::size_t line) {
  if (value != std::floor(value)) throw ParseError(line, "bus id must be an integer");
  return static_cast<int>(value);
}

// Linear coefficient of a MATPOWER polynomial cost row.
double linear_cost(const Row& row, std::size_t gen, std::vector<std::string>& warnings) {
  require_columns(row, 4, "gencost");
  const int model = static_cast<int>(row.values[0]);
  if (model != 2) {
    throw ValidationError("gencost row " + std::to_string(gen + 1) +
                          ": only polynomial (model 2) costs are supported");
  }
  const auto terms = static_cast<std::size_t>(row.values[3]);
  require_columns(row, 4 + terms, "gencost");
  if (terms < 2) return 0.0;
  for (std::size_t k = 0; k + 2 < terms; ++k) {
    if (row.values[4 + k] != 0.0) {
      warnings.push_back("generator " + std::to_string(gen + 1) +
                         ": nonlinear cost terms dropped, linear coefficient kept");
      break;
    }
  }
  return row.values[4 + terms - 2];
}

}  // namespace

std::size_t GridCase::bus_index(int id) const {
  const auto it = index_.find(id);
  if (it == index_.end()) throw ValidationError("unknown bus id " + std::to_string(id));
  return it->second;
}

std::size_t GridCase::slack_index() const { return slack_; }

void GridCase::finalize() {
  if (!(base_mva > 0.0)) throw ValidationError("baseMVA must be positive");
  if (buses.empty()) throw ValidationError("case has no buses");

  index_.clear();
  std::size_t slack_count = 0;
  for (std::size_t i = 0; i < buses.size(); ++i) {
    if (!index_.emplace(buses[i].id, i).second) {
      throw ValidationError("duplicate bus id " + std::to_string(buses[i].id));
    }
    if (buses[i].type == BusType::slack) {
      slack_ = i;
      ++slack_count;
    }
  }
  if (slack_count != 1) {
    throw ValidationError("expected exactly one slack bus, found " + std::to_string(slack_count));
  }

  for (auto& bus : buses) {
    bus.injection_mw = -bus.load_mw;
    bus.has_limits = false;
    bus.p_min_mw = -bus.load_mw;
    bus.p_max_mw = -bus.load_mw;
  }
  for (const auto& gen : generators) {
    if (!(gen.p_min_mw <= gen.p_max_mw)) {
      throw ValidationError("generator at bus " + std::to_string(gen.bus) + " has Pmin > Pmax");
    }
    auto& bus = buses[bus_index(gen.bus)];
    bus.injection_mw += gen.setpoint_mw;
    bus.has_limits = true;
    bus.p_min_mw += gen.p_min_mw;
    bus.p_max_mw += gen.p_max_mw;
  }

  std::vector<std::vector<std::size_t>> adjacency(buses.size());
  for (const auto& br : branches) {
    if (!(br.reactance > 0.0)) {
      throw ValidationError("branch " + std::to_string(br.from_bus) + "-" +
                            std::to_string(br.to_bus) + " has non-positive reactance");
    }
    const std::size_t f = bus_index(br.from_bus);
    const std::size_t t = bus_index(br.to_bus);
    if (f == t) throw ValidationError("branch connects bus " + std::to_string(br.from_bus) + " to itself");
    adjacency[f].push_back(t);
    adjacency[t].push_back(f);
  }

  std::vector<bool> seen(buses.size(), false);
  std::queue<std::size_t> frontier;
  frontier.push(slack_);
  seen[slack_] = true;
  std::size_t reached = 1;
  while (!frontier.empty()) {
    const std::size_t u = frontier.front();
    frontier.pop();
    for (std::size_t v : adjacency[u]) {
      if (!seen[v]) {
        seen[v] = true;
        ++reached;
        frontier.push(v);
      }
    }
  }
  if (reached != buses.size()) throw ValidationError("network graph is not connected");
}

GridCase parse_case(std::string_view text) {
  const RawCase raw = tokenize(text);
  GridCase grid;
  grid.name = raw.name;
  if (!raw.base_mva) throw ValidationError("case is missing mpc.baseMVA");
  grid.base_mva = *raw.base_mva;

  for (const Row& row : require_table(raw, "bus").rows) {
    require_columns(row, 3, "bus");
    Bus bus;
    bus.id = as_id(row.values[0], row.line);
    switch (static_cast<int>(row.values[1])) {
      case 1: bus.type = BusType::load; break;
      case 2: bus.type = BusType::generator; break;
      case 3: bus.type = BusType::slack; break;
      default:
        throw ValidationError("bus " + std::to_string(bus.id) + ": unsupported bus type " +
                              std::to_string(static_cast<int>(row.values[1])));
    }
    bus.load_mw = row.values[2];
    grid.buses.push_back(bus);
  }

  const Table& gen_table = require_table(raw, "gen");
  const Table& cost_table = require_table(raw, "gencost");
  if (cost_table.rows.size() < gen_table.rows.size()) {
    throw ValidationError("mpc.gencost has fewer rows than mpc.gen");
  }
  for (std::size_t k = 0; k < gen_table.rows.size(); ++k) {
    const Row& row = gen_table.rows[k];
    require_columns(row, 10, "gen");
    const double cost = linear_cost(cost_table.rows[k], k, grid.warnings);
    if (row.values[7] <= 0.0) continue;  // out of service
    Generator gen;
    gen.bus = as_id(row.values[0], row.line);
    gen.setpoint_mw = row.values[1];
    gen.p_max_mw = row.values[8];
    gen.p_min_mw = row.values[9];
    gen.cost = cost;
    grid.generators.push_back(gen);
  }

  for (const Row& row : require_table(raw, "branch").rows) {
    require_columns(row, 6, "branch");
    if (row.values.size() > 10 && row.values[10] <= 0.0) continue;  // out of service
    Branch br;
    br.from_bus = as_id(row.values[0], row.line);
    br.to_bus = as_id(row.values[1], row.line);
    const double tap = row.values.size() > 8 && row.values[8] != 0.0 ? row.values[8] : 1.0;
    br.reactance = row.values[3] * tap;
    br.rating_mw = row.values[5];
    br.angle_limit = br.limited() ? br.rating_mw / grid.base_mva * br.reactance : HUGE_VAL;
    grid.branches.push_back(br);
  }

  grid.finalize();
  return grid;
}

GridCase load_case_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open case file " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  GridCase grid = parse_case(buffer.str());
  if (grid.name.empty()) grid.name = path.stem().string();
  return grid;
}

}  // namespace ccopf
