#pragma once

#include "serinv/bta.hpp"

namespace serinv {

// Largest dimension the dense oracle accepts by default.
inline constexpr std::size_t kDenseOracleLimit = 4096;

// Selected inverse computed from the dense expansion with an independent
// dense Cholesky solve against the identity. Throws NotPositiveDefinite.
SelectedInverse dense_selected_inverse(const BtaMatrix& a);

// Dense lower Cholesky factor of to_dense(a).
Block dense_cholesky(const BtaMatrix& a);

// Smallest eigenvalue of the dense expansion.
double dense_min_eigenvalue(const BtaMatrix& a);

}  // namespace serinv
