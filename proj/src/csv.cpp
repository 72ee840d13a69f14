#include "flocklab/csv.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <ostream>
#include <sstream>

namespace flocklab {

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void write_trajectory_csv(std::ostream& out, const Trajectory& trajectory) {
  const std::size_t dim =
      trajectory.mean_velocity.empty() ? 0 : trajectory.mean_velocity.front().size();
  out << "t,X,V";
  for (std::size_t k = 0; k < dim; ++k) out << ",vbar_" << (k + 1);
  out << "\n";
  for (std::size_t r = 0; r < trajectory.times.size(); ++r) {
    out << format_double(trajectory.times[r]) << ','
        << format_double(trajectory.position_dispersion[r]) << ','
        << format_double(trajectory.velocity_dispersion[r]);
    for (std::size_t k = 0; k < dim; ++k)
      out << ',' << format_double(trajectory.mean_velocity[r][k]);
    out << "\n";
  }
}

void write_grid_csv(std::ostream& out, const ProbabilityGrid& grid) {
  out << "X0,V0,probability,certified\n";
  for (std::size_t xi = 0; xi < grid.X_values.size(); ++xi)
    for (std::size_t vi = 0; vi < grid.V_values.size(); ++vi)
      out << format_double(grid.X_values[xi]) << ','
          << format_double(grid.V_values[vi]) << ','
          << format_double(grid.at(xi, vi)) << ','
          << (grid.certified_at(xi, vi) ? 1 : 0) << "\n";
}

void write_state_csv(std::ostream& out, const FlockState& state) {
  const std::size_t n = state.positions.agents();
  const std::size_t d = state.positions.dim();
  out << "agent";
  for (std::size_t k = 0; k < d; ++k) out << ",x_" << (k + 1);
  for (std::size_t k = 0; k < d; ++k) out << ",v_" << (k + 1);
  out << "\n";
  for (std::size_t i = 0; i < n; ++i) {
    out << i;
    for (std::size_t k = 0; k < d; ++k)
      out << ',' << format_double(state.positions(i, k));
    for (std::size_t k = 0; k < d; ++k)
      out << ',' << format_double(state.velocities(i, k));
    out << "\n";
  }
}

namespace {

std::vector<std::string> split_comma(const std::string& line) {
  std::vector<std::string> fields;
  std::string::size_type start = 0;
  for (;;) {
    const auto comma = line.find(',', start);
    if (comma == std::string::npos) {
      fields.push_back(line.substr(start));
      return fields;
    }
    fields.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
}

double parse_double(const std::string& field, std::size_t line_no) {
  const char* begin = field.c_str();
  char* end = nullptr;
  const double x = std::strtod(begin, &end);
  if (end == begin || *end != '\0')
    throw CsvError("state csv line " + std::to_string(line_no) +
                   ": bad numeric field '" + field + "'");
  return x;
}

}  // namespace

FlockState read_state_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw CsvError("state csv: empty input");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const auto header = split_comma(line);
  if (header.size() < 3 || header[0] != "agent" || (header.size() - 1) % 2 != 0)
    throw CsvError("state csv: expected header agent,x_1..x_d,v_1..v_d");
  const std::size_t d = (header.size() - 1) / 2;
  for (std::size_t k = 0; k < d; ++k) {
    if (header[1 + k] != "x_" + std::to_string(k + 1) ||
        header[1 + d + k] != "v_" + std::to_string(k + 1))
      throw CsvError("state csv: expected header agent,x_1..x_d,v_1..v_d");
  }

  std::vector<std::vector<double>> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = split_comma(line);
    if (fields.size() != header.size())
      throw CsvError("state csv line " + std::to_string(line_no) + ": expected " +
                     std::to_string(header.size()) + " fields, got " +
                     std::to_string(fields.size()));
    std::vector<double> row;
    row.reserve(2 * d);
    for (std::size_t k = 1; k < fields.size(); ++k)
      row.push_back(parse_double(fields[k], line_no));
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw CsvError("state csv: no agent rows");

  FlockState state = FlockState::zeros(rows.size(), d);
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t k = 0; k < d; ++k) {
      state.positions(i, k) = rows[i][k];
      state.velocities(i, k) = rows[i][d + k];
    }
  state.validate();
  return state;
}

FlockState read_state_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw CsvError("cannot open state file '" + path + "'");
  return read_state_csv(in);
}

void write_contour_csv(std::ostream& out, const std::vector<Polyline>& contours) {
  out << "contour_id,X,V\n";
  for (std::size_t c = 0; c < contours.size(); ++c) {
    if (c > 0) out << "\n";  // record break so line plotters lift the pen
    for (const ContourPoint& p : contours[c])
      out << c << ',' << format_double(p.x) << ',' << format_double(p.v) << "\n";
  }
}

std::string plot_script(const std::string& grid_csv, const std::string& contour_csv,
                        double contour_level) {
  std::ostringstream s;
  s << "# batch heatmap of the consensus-probability grid\n"
    << "# assumes evenly spaced X/V grid values (the sweep default)\n"
    << "set datafile separator \",\"\n"
    << "set terminal pngcairo size 900,700\n"
    << "set output \"probability.png\"\n"
    << "set xlabel \"X0\"\n"
    << "set ylabel \"V0\"\n"
    << "set cblabel \"consensus probability\"\n"
    << "set cbrange [0:1]\n";
  s << "plot \"" << grid_csv << "\" skip 1 using 1:2:3 with image notitle";
  if (!contour_csv.empty()) {
    s << ", \\\n     \"" << contour_csv
      << "\" skip 1 using 2:3 with lines lc rgb \"white\" lw 2 title \"p = "
      << format_double(contour_level) << "\"";
  }
  s << "\n";
  return s.str();
}

}  // namespace flocklab
