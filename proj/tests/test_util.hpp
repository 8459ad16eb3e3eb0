#pragma once

#include <complex>
#include <initializer_list>

#include "tsqc/core.hpp"

namespace tsqc::test {

using C = std::complex<double>;

inline Vector<double> vec(std::initializer_list<C> values) {
  Vector<double> v(static_cast<long>(values.size()));
  long i = 0;
  for (const auto& x : values) v(i++) = x;
  return v;
}

/// Plain loop inner product, kept separate from Eigen's dot.
inline C braket(const Vector<double>& bra, const Vector<double>& ket) {
  C sum = 0;
  for (long i = 0; i < bra.size(); ++i) sum += std::conj(bra(i)) * ket(i);
  return sum;
}

inline double max_abs(const Matrix<double>& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace tsqc::test
