#pragma once

#include <vector>

namespace oracle {

// Positive solution of -c u'' = u^3 on (0, L), u(0) = u(L) = 0, by shooting on
// u'(0) with classical RK4 and bisection on the location of the first zero.
struct BumpSolution {
  double slope0 = 0.0;  // u'(0)
  double peak = 0.0;
  double c = 1.0;
  double length = 1.0;
};

BumpSolution solve_bump(double c, double length);

// Samples of the k-bump solution on (0,1) (alternating sign, each bump of width
// 1/k) at x_i = i/(n-1). Built by integrating the ODE directly through the
// whole interval, each node hit exactly by substeps of the grid spacing.
std::vector<double> sample_k_bump(double c, int k, int n, int substeps = 64);

// Energy int (c/2) u'^2 - u^4/4 of the k-bump solution on (0,1) by RK4 quadrature.
double k_bump_level(double c, int k, int steps = 200000);

}  // namespace oracle
