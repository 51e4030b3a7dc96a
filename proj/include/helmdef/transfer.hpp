#pragma once

#include <vector>

#include "helmdef/field.hpp"
#include "helmdef/operators.hpp"

namespace helmdef {

/// Low: full weighting / bilinear. High: the [1 4 6 4 1] pair.
enum class TransferOrder { Low, High };

const char* to_string(TransferOrder t);

/// Weight attached to a global grid point of the other level.
struct GTap {
  int i = 0;
  int j = 0;
  double w = 0.0;
};

/// Fine points read by coarse point (ic, jc), boundary rules included.
std::vector<GTap> restriction_row(TransferOrder t, BcKind bc, const Grid2D& fine, int ic, int jc);
/// Coarse points read by fine point (i, j), boundary rules included.
std::vector<GTap> prolongation_row(TransferOrder t, BcKind bc, const Grid2D& fine, int i, int j);

/// Fine -> coarse. The coarse field must live on the coarsened partition.
void restrict_field(TransferOrder t, BcKind bc, Field& fine, Field& coarse);
/// Coarse -> fine.
void prolong_field(TransferOrder t, BcKind bc, Field& coarse, Field& fine);

inline void restrict_fw(BcKind bc, Field& fine, Field& coarse) {
  restrict_field(TransferOrder::Low, bc, fine, coarse);
}
inline void prolong_bilinear(BcKind bc, Field& coarse, Field& fine) {
  prolong_field(TransferOrder::Low, bc, coarse, fine);
}
inline void restrict_high_order(BcKind bc, Field& fine, Field& coarse) {
  restrict_field(TransferOrder::High, bc, fine, coarse);
}
inline void prolong_high_order(BcKind bc, Field& coarse, Field& fine) {
  prolong_field(TransferOrder::High, bc, coarse, fine);
}

/// Ratio between restriction and transposed prolongation, R = P^T / sigma:
/// 4 for the low-order pair, 1 for the high-order pair.
double transfer_sigma(TransferOrder t);

/// Sum of the interior restriction weights (1 for full weighting, 4 for
/// the high-order restriction). Galerkin products carry this factor.
double restriction_mass(TransferOrder t);

}  // namespace helmdef
