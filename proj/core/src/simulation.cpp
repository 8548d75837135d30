#include "swflood/simulation.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <istream>
#include <sstream>
#include <string>

#include "swflood/errors.hpp"

namespace swflood {

void Hydrograph::validate() const {
  if (knots.empty()) throw ConfigError("hydrograph needs at least one knot");
  for (std::size_t k = 0; k < knots.size(); ++k) {
    if (!std::isfinite(knots[k].first) || !std::isfinite(knots[k].second)) {
      throw ConfigError("hydrograph knot " + std::to_string(k) + " is not finite");
    }
    if (knots[k].second < 0.0) throw ConfigError("hydrograph discharge must be >= 0");
    if (k > 0 && !(knots[k].first > knots[k - 1].first)) {
      throw ConfigError("hydrograph times must be strictly increasing");
    }
  }
}

double interpolate_q(const Hydrograph& hg, double t) {
  const auto& k = hg.knots;
  if (k.empty()) return 0.0;
  if (t <= k.front().first) return k.front().second;
  if (t >= k.back().first) return k.back().second;
  const auto it = std::upper_bound(k.begin(), k.end(), t, [](double v, const auto& knot) { return v < knot.first; });
  const auto& [t1, q1] = *it;
  const auto& [t0, q0] = *(it - 1);
  if (t == t0) return q0;
  return q0 + (q1 - q0) * (t - t0) / (t1 - t0);
}

Hydrograph parse_hydrograph(std::istream& in) {
  Hydrograph hg;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::istringstream ls(line);
    ls.imbue(std::locale::classic());
    double t = 0.0;
    double q = 0.0;
    std::string rest;
    if (!(ls >> t >> q) || (ls >> rest)) throw ParseError("expected 't Q'", line_no);
    hg.knots.emplace_back(t, q);
  }
  try {
    hg.validate();
  } catch (const ConfigError& e) {
    throw ParseError(e.what(), line_no);
  }
  return hg;
}

Hydrograph parse_hydrograph_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open hydrograph '" + path.string() + "'");
  try {
    return parse_hydrograph(in);
  } catch (const ParseError& e) {
    throw ParseError(path.string(), e);
  }
}

void Scenario::validate() const {
  dsm.validate();
  params.validate();
  if (!(total_duration > 0.0)) throw ConfigError("total_duration must be > 0");
  if (!(spin_up.duration >= 0.0) || !(spin_up.q_const >= 0.0)) throw ConfigError("spin-up values must be >= 0");
  if (!(total_duration >= spin_up.duration)) throw ConfigError("total_duration must cover the spin-up");
  if (!(snapshot_interval > 0.0)) throw ConfigError("snapshot_interval must be > 0");
  bool has_discharge = false;
  for (const auto& e : boundaries.edges) has_discharge |= e.kind == boundary::BoundaryKind::Discharge;
  if (has_discharge && total_duration > spin_up.duration) hydrograph.validate();
  if (!hydrograph.knots.empty()) hydrograph.validate();
}

double scenario_discharge(const Scenario& scn, double t) {
  if (t < scn.spin_up.duration) return scn.spin_up.q_const;
  if (scn.hydrograph.knots.empty()) return scn.spin_up.q_const;
  return interpolate_q(scn.hydrograph, t - scn.spin_up.duration);
}

void MaximaMaps::update(const State& state, double t, double h_dry) {
  for (int j = 0; j < state.ny; ++j) {
    for (int i = 0; i < state.nx; ++i) {
      const double h = state.h(i, j);
      if (h > max_h(i, j)) {
        max_h(i, j) = h;
        time_of_max_h(i, j) = t;
      }
      const double u = velocity(h, state.hu(i, j), h_dry);
      const double v = velocity(h, state.hv(i, j), h_dry);
      max_speed(i, j) = std::max(max_speed(i, j), std::sqrt(u * u + v * v));
    }
  }
}

double MassBalance::relative_closure() const {
  const double denom = std::max(inflow, initial_storage);
  const double err = std::abs(imbalance());
  return denom > 0.0 ? err / denom : err;
}

namespace {

State initial_state(const Scenario& scn) {
  InitialDepth init;
  init.uniform = scn.initial_depth;
  if (scn.initial_depth_map) init.per_cell = &*scn.initial_depth_map;
  State s = from_dsm(scn.dsm, init, scn.nodata_as_wall);
  if (scn.initial_level) fill_to_level(s, *scn.initial_level);
  return s;
}

boundary::BoundarySpec with_discharge(const Scenario& scn) {
  boundary::BoundarySpec spec = scn.boundaries;
  spec.discharge = [spin = scn.spin_up, hg = scn.hydrograph](double t) {
    if (t < spin.duration || hg.knots.empty()) return spin.q_const;
    return interpolate_q(hg, t - spin.duration);
  };
  return spec;
}

Scenario validated(const Scenario& scn) {
  scn.validate();
  return scn;
}

std::string time_label(double t) {
  std::array<char, 32> buf{};
  std::snprintf(buf.data(), buf.size(), "%06lld", static_cast<long long>(std::llround(t)));
  return buf.data();
}

}  // namespace

Simulation::Simulation(const Scenario& scenario)
    : scenario_(validated(scenario)),
      solver_(initial_state(scenario_), scenario_.params, with_discharge(scenario_), scenario_.solver),
      maxima_(scenario_.dsm.ncols, scenario_.dsm.nrows) {
  const State s = solver_.state();
  initial_storage_ = solver_.volume();
  maxima_.update(s, 0.0, scenario_.params.h_dry);
  if (!scenario_.output_dir.empty()) {
    std::filesystem::create_directories(scenario_.output_dir);
    write_fields(s, time_label(0.0));
  }
}

double Simulation::next_stop(double t_end) const {
  double stop = t_end;
  const double snap = static_cast<double>(next_snapshot_) * scenario_.snapshot_interval;
  stop = std::min(stop, snap);
  if (time() < scenario_.spin_up.duration) stop = std::min(stop, scenario_.spin_up.duration);
  return stop;
}

void Simulation::advance_to(double t_end, const StepObserver& observer) {
  t_end = std::min(t_end, scenario_.total_duration);
  const double h_dry = scenario_.params.h_dry;
  while (time() < t_end) {
    const double stop = next_stop(t_end);
    StepDiagnostics diag;
    try {
      diag = solver_.step(stop - time());
    } catch (const NumericalError&) {
      if (!scenario_.output_dir.empty()) write_fields(solver_.last_good_state(), "lastgood");
      throw;
    }
    if (std::abs(time() - stop) <= 1e-9 * std::max(1.0, std::abs(stop))) solver_.snap_time(stop);
    inflow_ += diag.inflow_volume;
    outflow_ += diag.outflow_volume;
    critical_fallbacks_ += diag.critical_fallbacks;

    const State s = solver_.state();
    maxima_.update(s, time(), h_dry);
    const double snap = static_cast<double>(next_snapshot_) * scenario_.snapshot_interval;
    if (time() >= snap) {
      if (!scenario_.output_dir.empty()) write_fields(s, time_label(snap));
      ++next_snapshot_;
    }
    if (observer) observer(*this, diag);
  }
}

MassBalance Simulation::mass_balance() const {
  MassBalance mb;
  mb.initial_storage = initial_storage_;
  mb.final_storage = solver_.volume();
  mb.inflow = inflow_;
  mb.outflow = outflow_;
  return mb;
}

void Simulation::write_fields(const State& state, const std::string& label) {
  if (scenario_.output_dir.empty()) return;
  const double h_dry = scenario_.params.h_dry;
  Field2D u(state.nx, state.ny);
  Field2D v(state.nx, state.ny);
  for (int j = 0; j < state.ny; ++j) {
    for (int i = 0; i < state.nx; ++i) {
      u(i, j) = velocity(state.h(i, j), state.hu(i, j), h_dry);
      v(i, j) = velocity(state.h(i, j), state.hv(i, j), h_dry);
    }
  }
  const auto& dir = scenario_.output_dir;
  for (const auto& [name, field] : {std::pair<const char*, const Field2D*>{"h", &state.h}, {"u", &u}, {"v", &v}}) {
    const auto path = dir / (std::string(name) + "_" + label + ".asc");
    write_ascii_grid_file(path, to_raster(state, *field, scenario_.dsm));
    snapshots_.push_back(path);
  }
}

void Simulation::write_maxima() const {
  if (scenario_.output_dir.empty()) return;
  const State s = solver_.state();
  const auto& dir = scenario_.output_dir;
  write_ascii_grid_file(dir / "max_h.asc", to_raster(s, maxima_.max_h, scenario_.dsm));
  write_ascii_grid_file(dir / "max_speed.asc", to_raster(s, maxima_.max_speed, scenario_.dsm));
  write_ascii_grid_file(dir / "time_of_max_h.asc", to_raster(s, maxima_.time_of_max_h, scenario_.dsm));
}

std::uint64_t params_hash(const PhysicalParams& params) {
  std::uint64_t hash = 14695981039346656037ull;
  for (double v : {params.g, params.manning_n, params.h_dry, params.cfl}) {
    const auto bits = std::bit_cast<std::uint64_t>(v);
    for (int k = 0; k < 8; ++k) {
      hash ^= (bits >> (8 * k)) & 0xffu;
      hash *= 1099511628211ull;
    }
  }
  return hash;
}

namespace {

constexpr std::array<char, 8> kCheckpointMagic = {'S', 'W', 'F', 'C', 'K', 'P', 'T', '1'};

void put_u64(std::ostream& out, std::uint64_t v) {
  std::array<char, 8> bytes{};
  for (int k = 0; k < 8; ++k) bytes[k] = static_cast<char>((v >> (8 * k)) & 0xffu);
  out.write(bytes.data(), bytes.size());
}

std::uint64_t get_u64(std::istream& in) {
  std::array<unsigned char, 8> bytes{};
  in.read(reinterpret_cast<char*>(bytes.data()), bytes.size());
  if (!in) throw ConfigError("checkpoint is truncated");
  std::uint64_t v = 0;
  for (int k = 0; k < 8; ++k) v |= static_cast<std::uint64_t>(bytes[k]) << (8 * k);
  return v;
}

void put_f64(std::ostream& out, double v) { put_u64(out, std::bit_cast<std::uint64_t>(v)); }
double get_f64(std::istream& in) { return std::bit_cast<double>(get_u64(in)); }

void put_field(std::ostream& out, const Field2D& f) {
  for (int j = 0; j < f.ny(); ++j) {
    for (int i = 0; i < f.nx(); ++i) put_f64(out, f(i, j));
  }
}

void get_field(std::istream& in, Field2D& f) {
  for (int j = 0; j < f.ny(); ++j) {
    for (int i = 0; i < f.nx(); ++i) f(i, j) = get_f64(in);
  }
}

}  // namespace

void Simulation::write_checkpoint(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write checkpoint '" + path.string() + "'");
  const State s = solver_.state();
  out.write(kCheckpointMagic.data(), kCheckpointMagic.size());
  put_f64(out, time());
  put_u64(out, static_cast<std::uint64_t>(steps()));
  put_u64(out, params_hash(scenario_.params));
  put_u64(out, static_cast<std::uint64_t>(s.nx));
  put_u64(out, static_cast<std::uint64_t>(s.ny));
  put_u64(out, static_cast<std::uint64_t>(next_snapshot_));
  put_f64(out, initial_storage_);
  put_f64(out, inflow_);
  put_f64(out, outflow_);
  for (const Field2D* f : {&s.h, &s.hu, &s.hv, &maxima_.max_h, &maxima_.max_speed, &maxima_.time_of_max_h}) {
    put_field(out, *f);
  }
  if (!out) throw Error("I/O failure writing checkpoint '" + path.string() + "'");
}

void Simulation::read_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open checkpoint '" + path.string() + "'");
  std::array<char, 8> magic{};
  in.read(magic.data(), magic.size());
  if (!in || magic != kCheckpointMagic) throw ConfigError("'" + path.string() + "' is not a checkpoint");
  const double t = get_f64(in);
  const auto steps = static_cast<long>(get_u64(in));
  if (get_u64(in) != params_hash(scenario_.params)) {
    throw ConfigError("checkpoint was written with different physical parameters");
  }
  State s = solver_.state();
  if (get_u64(in) != static_cast<std::uint64_t>(s.nx) || get_u64(in) != static_cast<std::uint64_t>(s.ny)) {
    throw ConfigError("checkpoint grid size does not match the scenario");
  }
  next_snapshot_ = static_cast<long>(get_u64(in));
  initial_storage_ = get_f64(in);
  inflow_ = get_f64(in);
  outflow_ = get_f64(in);
  get_field(in, s.h);
  get_field(in, s.hu);
  get_field(in, s.hv);
  get_field(in, maxima_.max_h);
  get_field(in, maxima_.max_speed);
  get_field(in, maxima_.time_of_max_h);
  solver_.restore(s, t, steps);
}

RunResult run(const Scenario& scenario, const Simulation::StepObserver& observer) {
  Simulation sim(scenario);
  sim.advance_to(scenario.total_duration, observer);
  sim.write_maxima();
  RunResult result;
  result.maxima = sim.maxima();
  result.mass = sim.mass_balance();
  result.final_state = sim.solver().state();
  result.snapshots = sim.snapshots();
  result.steps = sim.steps();
  result.critical_fallbacks = sim.critical_fallbacks();
  result.end_time = sim.time();
  return result;
}

std::vector<double> steady_state_monitor(std::span<const Field2D> history) {
  std::vector<double> change;
  for (std::size_t k = 1; k < history.size(); ++k) {
    const Field2D& a = history[k - 1];
    const Field2D& b = history[k];
    double diff = 0.0;
    double scale = 0.0;
    for (int j = 0; j < a.ny(); ++j) {
      for (int i = 0; i < a.nx(); ++i) {
        diff = std::max(diff, std::abs(b(i, j) - a(i, j)));
        scale = std::max({scale, std::abs(a(i, j)), std::abs(b(i, j))});
      }
    }
    change.push_back(scale > 0.0 ? diff / scale : 0.0);
  }
  return change;
}

}  // namespace swflood
