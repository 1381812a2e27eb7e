#include "towermpc/io.hpp"

#include <charconv>
#include <fstream>
#include <limits>
#include <sstream>

namespace towermpc {

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::size_t CsvTable::column(const std::string& name) const {
  for (std::size_t i = 0; i < header.size(); ++i)
    if (header[i] == name) return i;
  throw IoError("missing column " + name);
}

std::vector<double> CsvTable::values(const std::string& name) const {
  const std::size_t c = column(name);
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back(r[c]);
  return out;
}

namespace {

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream is(line);
  while (std::getline(is, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double parse_double(const std::string& s) {
  double v = 0.0;
  const char* end = s.data() + s.size();
  const auto res = std::from_chars(s.data(), end, v);
  if (res.ec != std::errc() || res.ptr != end) throw IoError("not a number: '" + s + "'");
  return v;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::error_code ec;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
  if (ec) throw IoError("cannot create " + path.parent_path().string() + ": " + ec.message());
  std::ofstream os(path);
  if (!os) throw IoError("cannot write " + path.string());
  return os;
}

void write_table(const std::filesystem::path& path, const CsvTable& t) {
  auto os = open_out(path);
  for (std::size_t i = 0; i < t.header.size(); ++i) os << (i ? "," : "") << t.header[i];
  os << '\n';
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << format_double(row[i]);
    os << '\n';
  }
  if (!os) throw IoError("write failed for " + path.string());
}

}  // namespace

CsvTable read_csv(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open " + path.string());
  CsvTable t;
  std::string line;
  if (!std::getline(is, line)) throw IoError("empty file " + path.string());
  t.header = split(line);
  std::size_t lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto cells = split(line);
    if (cells.size() != t.header.size())
      throw IoError(path.string() + ":" + std::to_string(lineno) + ": wrong number of fields");
    std::vector<double> row;
    row.reserve(cells.size());
    for (const auto& c : cells) row.push_back(parse_double(c));
    t.rows.push_back(std::move(row));
  }
  return t;
}

CsvTable sim_csv_table(const SimResult& r) {
  CsvTable t;
  t.header = {"t[s]",          "omega_r[rad/s]",  "psi[rad]",           "x_dot[m/s]",
              "x[m]",          "U[m/s]",          "U_hat[m/s]",         "tau_g[N m]",
              "delta_tau_g[N m]", "P_g[W]",        "a_y[m]",             "mpc_iterations[-]",
              "mpc_converged[-]", "mpc_cost[-]",   "mpc_dtheta_norm[N m]", "mpc_sched_min[rad/s]",
              "mpc_sched_max[rad/s]", "mpc_clamped[-]"};
  t.rows.reserve(r.size());
  for (std::size_t i = 0; i < r.size(); ++i)
    t.rows.push_back({r.t[i], r.omega_r[i], r.psi[i], r.x_dot[i], r.x[i], r.wind[i],
                      r.wind_hat[i], r.tau_g[i], r.delta_tau[i], r.power[i], r.a_y[i],
                      double(r.mpc_iterations[i]), double(r.mpc_converged[i]), r.mpc_cost[i],
                      r.mpc_dtheta_norm[i], r.mpc_sched_min[i], r.mpc_sched_max[i],
                      double(r.mpc_clamped[i])});
  return t;
}

void write_sim_csv(const std::filesystem::path& path, const SimResult& r) {
  write_table(path, sim_csv_table(r));
}

void write_metadata(const std::filesystem::path& path, const std::string& section,
                    const std::vector<std::pair<std::string, std::string>>& entries,
                    const std::map<std::string, std::string>& comments) {
  auto os = open_out(path);
  for (const auto& [k, v] : comments) os << "# " << k << ": " << v << '\n';
  os << '[' << section << "]\n";
  for (const auto& [k, v] : entries) {
    double num = 0.0;
    const auto res = std::from_chars(v.data(), v.data() + v.size(), num);
    const bool numeric = !v.empty() && res.ec == std::errc() && res.ptr == v.data() + v.size();
    if (numeric || v == "true" || v == "false")
      os << k << " = " << v << '\n';
    else
      os << k << " = \"" << v << "\"\n";
  }
  if (!os) throw IoError("write failed for " + path.string());
}

namespace {

template <typename M>
void push_matrix(std::vector<std::string>& header, const std::string& name, const M& m) {
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      header.push_back(name + "_" + std::to_string(i) + std::to_string(j));
}

template <typename M>
void push_values(std::vector<double>& row, const M& m) {
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
}

template <typename M>
void pull_values(const std::vector<double>& row, std::size_t& k, M& m) {
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) m(i, j) = row.at(k++);
}

}  // namespace

void write_grid_csv(const std::filesystem::path& path, const ModelGrid& grid) {
  CsvTable t;
  t.header = {"p[rad/s]", "ts[s]", "U_bar[m/s]", "beta_bar[rad]", "k_omega", "k_wind", "k_torque",
              "y_off[m]"};
  const LinearModel& m0 = grid[0];
  push_matrix(t.header, "x_off", m0.x_off);
  push_matrix(t.header, "u_off", m0.u_off);
  push_matrix(t.header, "A", m0.A);
  push_matrix(t.header, "B", m0.B);
  push_matrix(t.header, "C", m0.C);
  push_matrix(t.header, "Ad", m0.Ad);
  push_matrix(t.header, "Bd", m0.Bd);
  for (const LinearModel& m : grid.models()) {
    std::vector<double> row{m.p,          m.ts,          m.gains.wind_speed, m.gains.pitch,
                            m.gains.k_omega, m.gains.k_wind, m.gains.k_torque, m.y_off};
    push_values(row, m.x_off);
    push_values(row, m.u_off);
    push_values(row, m.A);
    push_values(row, m.B);
    push_values(row, m.C);
    push_values(row, m.Ad);
    push_values(row, m.Bd);
    t.rows.push_back(std::move(row));
  }
  write_table(path, t);
}

ModelGrid read_grid_csv(const std::filesystem::path& path) {
  const CsvTable t = read_csv(path);
  constexpr std::size_t kColumns = 8 + 5 + 2 + 25 + 10 + 5 + 25 + 10;
  if (t.header.size() != kColumns) throw IoError("unexpected grid column count");
  if (t.rows.empty()) throw IoError("grid file holds no models");
  std::vector<LinearModel> models;
  for (const auto& row : t.rows) {
    LinearModel m;
    m.p = row[0];
    m.ts = row[1];
    m.gains.rotor_speed = row[0];
    m.gains.wind_speed = row[2];
    m.gains.pitch = row[3];
    m.gains.k_omega = row[4];
    m.gains.k_wind = row[5];
    m.gains.k_torque = row[6];
    m.y_off = row[7];
    std::size_t k = 8;
    pull_values(row, k, m.x_off);
    pull_values(row, k, m.u_off);
    pull_values(row, k, m.A);
    pull_values(row, k, m.B);
    pull_values(row, k, m.C);
    pull_values(row, k, m.Ad);
    pull_values(row, k, m.Bd);
    models.push_back(m);
  }
  double spacing = std::numeric_limits<double>::infinity();
  if (models.size() > 1) {
    spacing = 0.0;
    for (std::size_t i = 1; i < models.size(); ++i)
      spacing = std::max(spacing, models[i].p - models[i - 1].p);
  }
  try {
    return ModelGrid(std::move(models), spacing);
  } catch (const std::exception& e) {
    throw IoError(std::string("invalid grid file: ") + e.what());
  }
}

void write_bode_csv(const std::filesystem::path& path, const FrequencyResponse& nominal,
                    const std::vector<std::pair<double, FrequencyResponse>>& demod) {
  CsvTable t;
  t.header = {"omega[rad/s]", "G_mag[dB]", "G_phase[rad]"};
  for (const auto& [wr, _] : demod) t.header.push_back("H_mag_wr" + format_double(wr) + "[dB]");
  for (std::size_t i = 0; i < nominal.omega.size(); ++i) {
    std::vector<double> row{nominal.omega[i], nominal.magnitude_db[i], nominal.phase[i]};
    for (const auto& [_, h] : demod) row.push_back(h.magnitude_db.at(i));
    t.rows.push_back(std::move(row));
  }
  write_table(path, t);
}

void write_sweep_csv(const std::filesystem::path& path, const SweepResult& s, std::size_t stride) {
  if (stride == 0) stride = 1;
  CsvTable t;
  t.header = {"t[s]", "omega_r[rad/s]", "x[m]", "a_y[m]"};
  for (std::size_t i = 0; i < s.t.size(); i += stride)
    t.rows.push_back({s.t[i], s.omega_r[i], s.x[i], s.a_y[i]});
  write_table(path, t);
}

void write_cycles_csv(const std::filesystem::path& path, const CycleSet& cycles) {
  CsvTable t;
  t.header = {"range[m]", "mean[m]", "count[-]"};
  for (const Cycle& c : cycles) t.rows.push_back({c.range, c.mean, c.count});
  write_table(path, t);
}

void write_histogram_csv(const std::filesystem::path& path, const Histogram& h) {
  CsvTable t;
  t.header = {"lower", "upper", "count"};
  t.rows.push_back({-std::numeric_limits<double>::infinity(), h.edges.front(), double(h.underflow)});
  for (std::size_t i = 0; i < h.counts.size(); ++i)
    t.rows.push_back({h.edges[i], h.edges[i + 1], double(h.counts[i])});
  t.rows.push_back({h.edges.back(), std::numeric_limits<double>::infinity(), double(h.overflow)});
  write_table(path, t);
}

}  // namespace towermpc
