#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <string_view>

#include "swflood/errors.hpp"
#include "swflood/simulation.hpp"

namespace swflood {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

struct Entry {
  std::string value;
  std::size_t line = 0;
};

std::optional<double> try_number(const std::string& text) {
  double v = 0.0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  if (first != last && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc{} || ptr != last) return std::nullopt;
  return v;
}

double number(const std::string& key, const Entry& e) {
  const auto v = try_number(e.value);
  if (!v || !std::isfinite(*v)) throw ParseError("'" + key + "' expects a number, got '" + e.value + "'", e.line);
  return *v;
}

bool boolean(const std::string& key, const Entry& e) {
  const std::string v = lower(e.value);
  if (v == "true" || v == "yes" || v == "1" || v == "on") return true;
  if (v == "false" || v == "no" || v == "0" || v == "off") return false;
  throw ParseError("'" + key + "' expects true or false", e.line);
}

boundary::BoundaryKind boundary_kind(const std::string& key, const Entry& e) {
  const std::string v = lower(e.value);
  if (v == "wall") return boundary::BoundaryKind::Wall;
  if (v == "outflow") return boundary::BoundaryKind::FreeOutflow;
  if (v == "discharge") return boundary::BoundaryKind::Discharge;
  throw ParseError("'" + key + "' must be wall, outflow or discharge", e.line);
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& value) {
  std::filesystem::path p(value);
  return p.is_absolute() || base.empty() ? p : base / p;
}

const std::map<std::string, Edge>& edge_keys() {
  static const std::map<std::string, Edge> keys = {{"boundary.north", Edge::North},
                                                   {"boundary.south", Edge::South},
                                                   {"boundary.east", Edge::East},
                                                   {"boundary.west", Edge::West}};
  return keys;
}

const std::vector<std::string>& known_keys() {
  static const std::vector<std::string> keys = {
      "dsm",           "riverbed_mask",  "boundary.north",  "boundary.south", "boundary.east",
      "boundary.west", "g",              "manning_n",       "cfl",            "h_dry",
      "spinup_q",      "spinup_duration", "hydrograph",     "total_duration", "snapshot_interval",
      "output_dir",    "initial_h",      "initial_level",   "nodata_walls",   "dt_min",
      "dt_max",        "blocks",         "friction_coupling", "order"};
  return keys;
}

// Errors inside referenced files already name their source; keep them out of the
// config file's line numbering.
template <class Fn>
auto nested(Fn&& fn) {
  try {
    return fn();
  } catch (const ParseError& e) {
    throw ConfigError(e.what());
  }
}

}  // namespace

Scenario parse_scenario(std::istream& in, const std::filesystem::path& base_dir) {
  std::map<std::string, Entry> entries;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    if (trim(line).empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ParseError("expected 'key = value'", line_no);
    const std::string key = lower(trim(std::string_view(line).substr(0, eq)));
    const std::string value = trim(std::string_view(line).substr(eq + 1));
    if (key.empty()) throw ParseError("empty key", line_no);
    if (std::find(known_keys().begin(), known_keys().end(), key) == known_keys().end()) {
      throw ParseError("unknown key '" + key + "'", line_no);
    }
    if (value.empty()) throw ParseError("'" + key + "' has no value", line_no);
    if (!entries.emplace(key, Entry{value, line_no}).second) throw ParseError("duplicate key '" + key + "'", line_no);
  }

  auto get = [&](const std::string& key) -> const Entry* {
    const auto it = entries.find(key);
    return it == entries.end() ? nullptr : &it->second;
  };

  Scenario scn;
  const Entry* dsm = get("dsm");
  if (!dsm) throw ConfigError("scenario has no 'dsm'");
  scn.dsm = nested([&] { return read_ascii_grid_file(resolve(base_dir, dsm->value)); });

  if (const Entry* e = get("nodata_walls")) scn.nodata_as_wall = boolean("nodata_walls", *e);
  if (const Entry* e = get("g")) scn.params.g = number("g", *e);
  if (const Entry* e = get("manning_n")) scn.params.manning_n = number("manning_n", *e);
  if (const Entry* e = get("cfl")) scn.params.cfl = number("cfl", *e);
  if (const Entry* e = get("h_dry")) scn.params.h_dry = number("h_dry", *e);
  if (scn.params.cfl > 1.0) scn.warnings.push_back("cfl > 1 exceeds the stability limit of the scheme");

  if (const Entry* e = get("dt_min")) scn.solver.dt_min = number("dt_min", *e);
  if (const Entry* e = get("dt_max")) scn.solver.dt_max = number("dt_max", *e);
  if (const Entry* e = get("blocks")) {
    const double b = number("blocks", *e);
    if (b < 1 || b != static_cast<int>(b)) throw ParseError("'blocks' must be a positive integer", e->line);
    scn.solver.blocks = static_cast<int>(b);
  }
  if (const Entry* e = get("friction_coupling")) {
    const std::string v = lower(e->value);
    if (v == "component") {
      scn.solver.friction = FrictionCoupling::PerComponent;
    } else if (v == "magnitude") {
      scn.solver.friction = FrictionCoupling::Magnitude;
    } else {
      throw ParseError("'friction_coupling' must be component or magnitude", e->line);
    }
  }
  if (const Entry* e = get("order")) {
    if (e->value == "1") {
      scn.solver.order = SpatialOrder::First;
    } else if (e->value == "2") {
      scn.solver.order = SpatialOrder::Second;
    } else {
      throw ParseError("'order' must be 1 or 2", e->line);
    }
  }

  if (const Entry* e = get("initial_h")) {
    if (const auto v = try_number(e->value)) {
      scn.initial_depth = *v;
    } else {
      scn.initial_depth_map = nested([&] { return read_ascii_grid_file(resolve(base_dir, e->value)); });
      if (!scn.initial_depth_map->same_geometry(scn.dsm)) {
        throw ConfigError("initial_h raster does not match the DSM geometry");
      }
    }
  }
  if (const Entry* e = get("initial_level")) scn.initial_level = number("initial_level", *e);

  for (const auto& [key, edge] : edge_keys()) {
    if (const Entry* e = get(key)) scn.boundaries[edge].kind = boundary_kind(key, *e);
  }
  bool has_discharge = false;
  for (const auto& c : scn.boundaries.edges) has_discharge |= c.kind == boundary::BoundaryKind::Discharge;
  if (const Entry* e = get("riverbed_mask")) {
    if (!has_discharge) throw ConfigError("'riverbed_mask' given but no boundary is 'discharge'");
    const auto cells = nested([&] { return boundary::parse_riverbed_mask_file(resolve(base_dir, e->value)); });
    boundary::assign_mask(scn.boundaries, cells, scn.dsm.nrows, scn.dsm.ncols);
  } else if (has_discharge) {
    throw ConfigError("a 'discharge' boundary needs a 'riverbed_mask'");
  }

  if (const Entry* e = get("spinup_q")) scn.spin_up.q_const = number("spinup_q", *e);
  if (const Entry* e = get("spinup_duration")) scn.spin_up.duration = number("spinup_duration", *e);
  if (const Entry* e = get("hydrograph")) scn.hydrograph = nested([&] { return parse_hydrograph_file(resolve(base_dir, e->value)); });

  const Entry* total = get("total_duration");
  if (!total) throw ConfigError("scenario has no 'total_duration'");
  scn.total_duration = number("total_duration", *total);
  scn.snapshot_interval = scn.total_duration;
  if (const Entry* e = get("snapshot_interval")) scn.snapshot_interval = number("snapshot_interval", *e);
  if (const Entry* e = get("output_dir")) scn.output_dir = resolve(base_dir, e->value);

  scn.validate();
  scn.boundaries.discharge = [](double) { return 0.0; };
  scn.boundaries.validate(scn.dsm.ncols, scn.dsm.nrows);
  scn.boundaries.discharge = nullptr;
  return scn;
}

Scenario load_scenario(const std::filesystem::path& config_path) {
  std::ifstream in(config_path);
  if (!in) throw ConfigError("cannot open scenario '" + config_path.string() + "'");
  try {
    return parse_scenario(in, config_path.parent_path());
  } catch (const ParseError& e) {
    throw ParseError(config_path.string(), e);
  }
}

}  // namespace swflood
