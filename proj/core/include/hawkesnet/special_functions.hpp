#pragma once

namespace hawkesnet {

// Regularized upper incomplete gamma Q(a, x), absolute error < 1e-12.
double gamma_q(double a, double x);

// Upper tail P(X > x) for X ~ chi-square with dof degrees of freedom.
double chi_square_upper_tail(double x, int dof);

}  // namespace hawkesnet
