#pragma once

// Test-only quadrature, independent of the library's own grids.

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace testing_support {

/// Adaptive 61-point Gauss-Kronrod on [a, b].
template <class F>
double integrate(F f, double a, double b, double tol = 1e-12) {
  double error = 0.0;
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, a, b, 12, tol, &error);
}

/// Composite 40-point Gauss-Legendre over `pieces` equal panels. Suited to smooth
/// peaked integrands whose support is already bracketed by [a, b].
template <class F>
double integrate_panels(F f, double a, double b, int pieces) {
  double acc = 0.0;
  for (int i = 0; i < pieces; ++i) {
    const double lo = a + (b - a) * i / pieces, hi = a + (b - a) * (i + 1) / pieces;
    acc += boost::math::quadrature::gauss<double, 40>::integrate(f, lo, hi);
  }
  return acc;
}

}  // namespace testing_support
