#pragma once

// Assembly helpers shared by the bound and f-family programs.

#include <string_view>
#include <vector>

#include "qbayes/lmi.hpp"

namespace qbayes::detail {

/// Adds B as the coefficient of `var` in the d×d block at (r0, c0), and B† at (c0, r0).
void place(LmiBuilder& lmi, std::size_t blk, std::size_t var, Eigen::Index r0, Eigen::Index c0,
           const ComplexMatrix& b);

/// `count` Hermitian d×d operators, each expanded over the Hermitian basis.
struct HermitianVars {
  Eigen::Index count = 0;
  Eigen::Index d = 0;
  std::size_t first = 0;
  std::vector<ComplexMatrix> basis;

  std::size_t var(Eigen::Index j, std::size_t p) const {
    return first + static_cast<std::size_t>(j) * basis.size() + p;
  }
  HermitianMatrix decode(const RealVector& y, Eigen::Index j) const;
};

HermitianVars add_hermitian_vars(LmiBuilder& lmi, Eigen::Index count, Eigen::Index d);

/// Block-symmetric 𝕃 (𝕃_jk = 𝕃_kj Hermitian) in the top-left n·d corner of LMI block `blk`.
/// Costs Tr(cost · 𝕃), or Tr 𝕃 when cost is null.
struct BlockSymVars {
  Eigen::Index n = 0;
  Eigen::Index d = 0;
  std::size_t first = 0;
  std::vector<ComplexMatrix> basis;

  std::size_t var(Eigen::Index j, Eigen::Index k, std::size_t p) const;
  ExtendedOperator decode(const RealVector& y) const;
};

BlockSymVars add_block_symmetric(LmiBuilder& lmi, std::size_t blk, Eigen::Index n, Eigen::Index d,
                                 const ExtendedOperator* cost);

/// √det W with negative eigenvalues clamped to zero.
double sqrt_psd_det(const RealMatrix& w);

void require_optimal(const LmiSolution& sol, std::string_view what);

}  // namespace qbayes::detail
