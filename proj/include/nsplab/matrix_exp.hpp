#pragma once

// Dense matrix exponential by balancing + scaling-and-squaring of a
// truncated Taylor series.  This is deliberately a different algorithm from
// the closed-form mode propagator so the two can cross-check each other;
// do not replace either side with the other.
//
// Error control: after Osborne balancing the scaled matrix B = A / 2^s has
// ||B||_1 <= 1/4 and the series is summed until the next term falls below
// eps * ||partial sum||_1, so the truncation error is at machine level and
// the s squarings dominate.  For the stable (decaying) matrices this is
// used on, the observed relative accuracy is ~1e-13.

#include "nsplab/types.hpp"

namespace nsplab {

inline Mat4c matrix_exp(const Mat4c& a_in, double t = 1.0) {
  if (!a_in.allFinite() || !std::isfinite(t))
    throw std::invalid_argument("matrix_exp: non-finite input");

  Mat4c a = a_in * t;

  // Osborne balancing: diagonal similarity with powers of two equalizing
  // row/column 1-norms.  Exact in floating point, undone at the end.
  double d[4] = {1.0, 1.0, 1.0, 1.0};
  for (int sweep = 0; sweep < 8; ++sweep) {
    bool changed = false;
    for (int i = 0; i < 4; ++i) {
      double c = 0.0, r = 0.0;
      for (int j = 0; j < 4; ++j) {
        if (j == i) continue;
        c += std::abs(a(j, i));
        r += std::abs(a(i, j));
      }
      if (c == 0.0 || r == 0.0) continue;
      double f = 1.0;
      while (c * f < r / f / 2.0) f *= 2.0;
      while (c * f > r / f * 2.0) f /= 2.0;
      if (f != 1.0) {
        changed = true;
        d[i] *= f;
        for (int j = 0; j < 4; ++j) {
          a(j, i) *= f;
          a(i, j) /= f;
        }
      }
    }
    if (!changed) break;
  }

  const double norm1 = a.cwiseAbs().colwise().sum().maxCoeff();
  int s = 0;
  double scaled = norm1;
  while (scaled > 0.25) {
    scaled *= 0.5;
    ++s;
  }
  const Mat4c b = a / std::ldexp(1.0, s);

  Mat4c sum = Mat4c::Identity();
  Mat4c term = Mat4c::Identity();
  for (int k = 1; k < 40; ++k) {
    term = (term * b) / static_cast<double>(k);
    sum += term;
    const double tn = term.cwiseAbs().colwise().sum().maxCoeff();
    const double sn = sum.cwiseAbs().colwise().sum().maxCoeff();
    if (tn <= 1e-17 * sn) break;
  }
  for (int k = 0; k < s; ++k) sum = sum * sum;

  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) sum(i, j) *= d[i] / d[j];
  return sum;
}

}  // namespace nsplab
