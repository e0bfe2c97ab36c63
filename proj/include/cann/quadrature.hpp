#pragma once

#include <vector>

namespace cann {

/// Gauss-Legendre rule on [-1, 1]: integrates polynomials of degree <= 2q-1 exactly.
struct GaussRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

/// Nodes/weights for a q-point rule, computed by Newton iteration on P_q.
GaussRule gauss_legendre(int q);

} // namespace cann
