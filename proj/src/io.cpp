#include "selectlab/io.hpp"

#include <bit>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <istream>
#include <ostream>

namespace selectlab::io {

std::string fraction(const Rational& value) {
  Rational r(value);
  r.canonicalize();
  if (r.get_den() == 1) return r.get_num().get_str();
  return r.get_num().get_str() + "/" + r.get_den().get_str();
}

std::string decimal(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.15g", v);
  return buf;
}

std::string decimal(const Rational& r) { return decimal(r.get_d()); }

void write_rational_column(std::ostream& os, const std::vector<Rational>& column,
                           std::size_t first, const std::string& header) {
  os << header << '\n';
  for (std::size_t n = first; n < column.size(); ++n)
    os << n << ',' << decimal(column[n]) << ',' << fraction(column[n]) << '\n';
}

void write_run_csv(std::ostream& os, const std::vector<RunRecord>& runs) {
  os << "n,rank,exchanges,normalized\n";
  for (const auto& r : runs)
    os << r.n << ',' << r.rank << ',' << r.exchanges << ',' << decimal(r.normalized) << '\n';
}

void write_cdf_csv(std::ostream& os, const CdfGrid& grid) {
  os << "t,F\n";
  for (std::size_t i = 0; i < grid.points.size(); ++i)
    os << decimal(grid.points[i]) << ',' << decimal(grid.values[i]) << '\n';
}

void write_density_csv(std::ostream& os, const DensityGrid& grid) {
  os << "t,f\n";
  for (std::size_t i = 0; i < grid.points.size(); ++i)
    os << decimal(grid.points[i]) << ',' << decimal(grid.values[i]) << '\n';
}

void write_converge_csv(std::ostream& os, const ConvergenceReport& report) {
  os << "n,runs,ks,mean,nvar\n";
  for (const auto& r : report.rows)
    os << r.n << ',' << r.runs << ',' << decimal(r.ks_to_limit) << ',' << decimal(r.mean_normalized)
       << ',' << decimal(r.var_normalized_times_n) << '\n';
}

void write_fig1(std::ostream& os, const std::vector<std::vector<double>>& table) {
  char buf[32];
  os << "t";
  for (int c = 0; c < 8; ++c) {
    std::snprintf(buf, sizeof buf, ",%.1f", c / 10.0);
    os << buf;
  }
  os << '\n';
  for (int r = 0; r < 20; ++r) {
    std::snprintf(buf, sizeof buf, "%.3f", r / 200.0);
    os << buf;
    for (int c = 0; c < 8; ++c) {
      std::snprintf(buf, sizeof buf, ",%.4f", table[r][c]);
      os << buf;
    }
    os << '\n';
  }
}

void write_binary(std::ostream& os, const std::vector<double>& values) {
  for (double v : values) {
    auto bits = std::bit_cast<std::uint64_t>(v);
    unsigned char bytes[8];
    for (int b = 0; b < 8; ++b) bytes[b] = static_cast<unsigned char>(bits >> (8 * b));
    os.write(reinterpret_cast<const char*>(bytes), 8);
  }
}

std::vector<double> read_binary(std::istream& is) {
  std::vector<double> out;
  unsigned char bytes[8];
  while (is.read(reinterpret_cast<char*>(bytes), 8)) {
    std::uint64_t bits = 0;
    for (int b = 7; b >= 0; --b) bits = (bits << 8) | bytes[b];
    out.push_back(std::bit_cast<double>(bits));
  }
  return out;
}

}  // namespace selectlab::io
