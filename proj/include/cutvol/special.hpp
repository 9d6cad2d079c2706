#pragma once

namespace cutvol {

// Volume of the N-ball of radius R.
double nball_volume(int dim, double radius);

// Surface area of the unit (m-1)-sphere in R^m: 2 pi^{m/2} / Gamma(m/2).
double unit_sphere_area(int m);

// ln B(a, b).
double log_beta(double a, double b);

// Regularized incomplete beta function I_x(a, b), continued-fraction
// evaluation with relative target 1e-15 (well inside the 1e-14 the volume
// oracles need).
double betainc(double a, double b, double x);

}  // namespace cutvol
