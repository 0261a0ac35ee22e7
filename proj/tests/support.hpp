#pragma once

#include <cmath>

#include "doctest.h"
#include "qbayes/matcore.hpp"
#include "qbayes/model.hpp"
#include "qbayes/rng.hpp"

namespace qbayes::test {

inline ComplexMatrix cm(std::initializer_list<std::initializer_list<cplx>> rows) {
  ComplexMatrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.begin()->size()));
  Eigen::Index r = 0;
  for (const auto& row : rows) {
    Eigen::Index c = 0;
    for (const auto& v : row) m(r, c++) = v;
    ++r;
  }
  return m;
}

inline RealVector vec(std::initializer_list<double> v) {
  return Eigen::Map<const RealVector>(v.begin(), static_cast<Eigen::Index>(v.size()));
}

inline ComplexMatrix eye(Eigen::Index d) { return ComplexMatrix::Identity(d, d); }

inline double max_diff(const ComplexMatrix& a, const ComplexMatrix& b) { return (a - b).cwiseAbs().maxCoeff(); }
inline double max_diff(const RealMatrix& a, const RealMatrix& b) { return (a - b).cwiseAbs().maxCoeff(); }

inline ComplexMatrix random_complex(Rng& rng, Eigen::Index r, Eigen::Index c) {
  ComplexMatrix m(r, c);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = cplx(rng.normal(), rng.normal());
  return m;
}

inline HermitianMatrix random_psd(Rng& rng, Eigen::Index d, Eigen::Index rank) {
  const ComplexMatrix g = random_complex(rng, d, rank);
  return HermitianMatrix(ComplexMatrix(g * g.adjoint()));
}

inline RealMatrix random_symmetric(Rng& rng, Eigen::Index n) {
  RealMatrix g = RealMatrix::NullaryExpr(n, n, [&] { return rng.normal(); });
  return 0.5 * (g + g.transpose());
}

inline RealMatrix random_antisymmetric(Rng& rng, Eigen::Index n) {
  RealMatrix g = RealMatrix::NullaryExpr(n, n, [&] { return rng.normal(); });
  return 0.5 * (g - g.transpose());
}

inline ExtendedOperator random_extended_hermitian(Rng& rng, Eigen::Index n, Eigen::Index d) {
  const ComplexMatrix g = random_complex(rng, n * d, n * d);
  return ExtendedOperator(n, d, 0.5 * (g + g.adjoint()));
}

}  // namespace qbayes::test
