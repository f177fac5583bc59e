#pragma once

// Radial Laplace eigenfunctions on the unit ball from the Bessel power series,
// used as an oracle independent of both discretizations.
//
//   T(r) = sum_k (-1)^k (s/2)^{2k} / (k! Gamma(k+nu+1)) r^{l+2k},  nu = l + n/2 - 1,
//
// solves T'' + (n-1)/r T' - l(l+n-2)/r^2 T = -s^2 T. Dirichlet eigenvalues are
// s^2 at zeros of T(1), Neumann eigenvalues at zeros of T'(1).

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>

namespace bilap::bessel {

namespace detail {

// Sum over k of a_k * w(k) with a_k the series coefficients at r = 1.
inline double series(int n, int ell, double s, const std::function<double(int)>& weight) {
  const double nu = ell + n / 2.0 - 1.0;
  double term = 1.0 / std::tgamma(nu + 1.0);
  double sum = term * weight(0);
  const double q = s * s / 4.0;
  for (int k = 1; k < 200; ++k) {
    term *= -q / (k * (k + nu));
    const double add = term * weight(k);
    sum += add;
    if (std::fabs(term) < 1e-18 * std::max(1.0, std::fabs(sum)) && k > q) break;
  }
  return sum;
}

inline double first_root(const std::function<double(double)>& f, double from, double to) {
  const double step = 1e-2;
  double a = from, fa = f(a);
  for (double b = a + step; b <= to; b += step) {
    const double fb = f(b);
    if ((fa < 0) != (fb < 0)) {
      double lo = a, hi = b, flo = fa;
      for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double fm = f(mid);
        if ((fm < 0) == (flo < 0)) lo = mid, flo = fm;
        else hi = mid;
      }
      return 0.5 * (lo + hi);
    }
    a = b;
    fa = fb;
  }
  throw std::runtime_error("bessel: no sign change found");
}

}  // namespace detail

/// T(1) for the mode (n, l) at frequency s.
inline double radial_value(int n, int ell, double s) {
  return detail::series(n, ell, s, [](int) { return 1.0; });
}

/// T'(1) for the mode (n, l) at frequency s.
inline double radial_slope(int n, int ell, double s) {
  return detail::series(n, ell, s, [ell](int k) { return static_cast<double>(ell + 2 * k); });
}

/// First Dirichlet eigenvalue of the mode l on the unit ball in R^n.
inline double dirichlet_eigenvalue(int n, int ell = 0) {
  const double s = detail::first_root([&](double x) { return radial_value(n, ell, x); }, 1e-3, 40.0);
  return s * s;
}

/// First nonzero Neumann eigenvalue of the mode l (l >= 1) on the unit ball;
/// for l = 0 the trivial root s = 0 is skipped.
inline double neumann_eigenvalue(int n, int ell) {
  const double s = detail::first_root([&](double x) { return radial_slope(n, ell, x); }, ell == 0 ? 1e-1 : 1e-3, 40.0);
  return s * s;
}

/// First nonzero Neumann eigenvalue of the unit ball, minimized over modes.
inline double neumann_first(int n) {
  double best = neumann_eigenvalue(n, 0);
  for (int ell = 1; ell <= 3; ++ell) best = std::min(best, neumann_eigenvalue(n, ell));
  return best;
}

}  // namespace bilap::bessel
