#include <doctest.h>

#include <cmath>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "selectlab/io.hpp"

using namespace selectlab;

TEST_CASE("fractions and decimals") {
  CHECK(io::fraction(Rational(187, 1260)) == "187/1260");
  CHECK(io::fraction(Rational(4, 2)) == "2");
  CHECK(io::fraction(Rational(-1, 3)) == "-1/3");
  CHECK(io::decimal(0.1) == "0.1");
  CHECK(io::decimal(1.0 / 3.0) == "0.333333333333333");
  CHECK(io::decimal(Rational(1, 60)) == "0.0166666666666667");
}

TEST_CASE("rational column") {
  std::ostringstream os;
  io::write_rational_column(os, {Rational(0), Rational(1, 2), Rational(4, 15)}, 1, "k,value,fraction");
  CHECK(os.str() == "k,value,fraction\n1,0.5,1/2\n2,0.266666666666667,4/15\n");
}

TEST_CASE("run csv") {
  RunRecord r;
  r.n = 3;
  r.rank = 2;
  r.exchanges = 2;
  r.normalized = 2.0 / 3.0;
  std::ostringstream os;
  io::write_run_csv(os, {r});
  CHECK(os.str() == "n,rank,exchanges,normalized\n3,2,2,0.666666666666667\n");
}

TEST_CASE("grid csv headers") {
  CdfGrid g;
  g.points = {0.0, 1.0};
  g.values = {0.0, 1.0};
  std::ostringstream a;
  io::write_cdf_csv(a, g);
  CHECK(a.str() == "t,F\n0,0\n1,1\n");

  DensityGrid d;
  d.points = {0.0, 0.5};
  d.values = {0.0, 2.5};
  std::ostringstream b;
  io::write_density_csv(b, d);
  CHECK(b.str() == "t,f\n0,0\n0.5,2.5\n");

  ConvergenceReport rep;
  rep.rows.push_back({100, 1000, 0.04, 0.5, 0.001, 1.7, 0.2});
  std::ostringstream c;
  io::write_converge_csv(c, rep);
  CHECK(c.str() == "n,runs,ks,mean,nvar\n100,1000,0.04,0.5,1.7\n");
}

TEST_CASE("fig1 layout") {
  std::vector<std::vector<double>> t(20, std::vector<double>(8, 0.0));
  t[11][3] = 0.13764;
  t[19][7] = 0.99996;
  std::ostringstream os;
  io::write_fig1(os, t);
  std::istringstream is(os.str());
  std::vector<std::string> lines;
  for (std::string l; std::getline(is, l);) lines.push_back(l);
  REQUIRE(lines.size() == 21);
  CHECK(lines[0] == "t,0.0,0.1,0.2,0.3,0.4,0.5,0.6,0.7");
  CHECK(lines[1] == "0.000,0.0000,0.0000,0.0000,0.0000,0.0000,0.0000,0.0000,0.0000");
  CHECK(lines[12] == "0.055,0.0000,0.0000,0.0000,0.1376,0.0000,0.0000,0.0000,0.0000");
  CHECK(lines[20] == "0.095,0.0000,0.0000,0.0000,0.0000,0.0000,0.0000,0.0000,1.0000");
}

TEST_CASE("binary round trip") {
  const std::vector<double> v{0.0, 1.0, 0.125, -2.5, std::numeric_limits<double>::min(), 0.1};
  std::stringstream ss;
  io::write_binary(ss, v);
  CHECK(ss.str().size() == 8 * v.size());
  CHECK(static_cast<unsigned char>(ss.str()[15]) == 0x3f);  // 1.0, little-endian sign/exponent byte
  CHECK(io::read_binary(ss) == v);
}
