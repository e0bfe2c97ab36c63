#include "cann/quadrature.hpp"

#include "cann/errors.hpp"

#include <cmath>
#include <numbers>

namespace cann {

GaussRule gauss_legendre(int q) {
    if (q < 1) throw ConfigError("gauss_legendre: need at least one point, got " + std::to_string(q));
    GaussRule rule;
    rule.nodes.assign(q, 0.0);
    rule.weights.assign(q, 0.0);

    const int half = (q + 1) / 2;
    for (int i = 0; i < half; ++i) {
        // Chebyshev-based initial guess for the i-th root of P_q.
        double x = std::cos(std::numbers::pi * (i + 0.75) / (q + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            // Three-term recurrence for P_q(x) and P'_q(x).
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= q; ++k) {
                double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = q * (x * p1 - p0) / (x * x - 1.0);
            double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        double w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.nodes[i] = -x; // roots found from +1 downward; store ascending
        rule.nodes[q - 1 - i] = x;
        rule.weights[i] = w;
        rule.weights[q - 1 - i] = w;
    }
    if (q % 2 == 1) rule.nodes[q / 2] = 0.0;
    return rule;
}

} // namespace cann
