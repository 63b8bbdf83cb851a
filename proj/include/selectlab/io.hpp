#pragma once

// Text and binary formats shared by the CLI and the tests.

#include <iosfwd>
#include <string>
#include <vector>

#include "selectlab/exact.hpp"
#include "selectlab/experiments.hpp"
#include "selectlab/limit_law.hpp"
#include "selectlab/perfect_sampler.hpp"
#include "selectlab/quickselect.hpp"

namespace selectlab::io {

/// "p/q" (or "p" when q = 1).
std::string fraction(const Rational& r);

/// 15 significant digits.
std::string decimal(double v);
std::string decimal(const Rational& r);

/// CSV: n,decimal,fraction for n = first..last of `column`.
void write_rational_column(std::ostream& os, const std::vector<Rational>& column,
                           std::size_t first, const std::string& header = "n,value,fraction");

void write_run_csv(std::ostream& os, const std::vector<RunRecord>& runs);
void write_cdf_csv(std::ostream& os, const CdfGrid& grid);
void write_density_csv(std::ostream& os, const DensityGrid& grid);
void write_converge_csv(std::ostream& os, const ConvergenceReport& report);

/// Twenty rows (0.000..0.095) by eight columns (0.0..0.7), four decimals.
void write_fig1(std::ostream& os, const std::vector<std::vector<double>>& table);

/// Raw little-endian IEEE-754 doubles.
void write_binary(std::ostream& os, const std::vector<double>& values);
std::vector<double> read_binary(std::istream& is);

}  // namespace selectlab::io
