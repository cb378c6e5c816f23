// legendre.hpp - Legendre polynomial recurrences and Gauss-Legendre rules.
#pragma once

#include <cmath>
#include <cstddef>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace ionmirror::numeric {

/// P_l(x) by upward three-term recurrence.
inline double legendre_p(int l, double x) {
    if (l < 0) throw std::domain_error("legendre_p: l must be >= 0");
    if (l == 0) return 1.0;
    double pm1 = 1.0, p = x;
    for (int k = 1; k < l; ++k) {
        double pn = ((2 * k + 1) * x * p - k * pm1) / (k + 1);
        pm1 = p;
        p = pn;
    }
    return p;
}

/// Integral of P_l over [c, 1] via the antiderivative identity
/// (2l+1) * int P_l dx = P_{l+1} - P_{l-1}; the bracket vanishes at x = 1.
inline double legendre_cap_integral(int l, double c) {
    if (l < 0) throw std::domain_error("legendre_cap_integral: l must be >= 0");
    if (l == 0) return 1.0 - c;
    return (legendre_p(l - 1, c) - legendre_p(l + 1, c)) / (2 * l + 1);
}

/// Streaming generator of (P_{l-1}(x), P_{l+1}(x)) differences used by the
/// cap-integral series. advance() moves from l to l+1 in O(1).
class LegendreDeltaStream {
public:
    explicit LegendreDeltaStream(double x) : x_(x), p_prev_(1.0), p_cur_(x), l_(1) {}

    int l() const { return l_; }
    /// P_{l-1}(x) - P_{l+1}(x) for the current l.
    double delta() {
        p_next_ = ((2 * l_ + 1) * x_ * p_cur_ - l_ * p_prev_) / (l_ + 1);
        return p_prev_ - p_next_;
    }
    void advance() {
        p_prev_ = p_cur_;
        p_cur_ = p_next_;
        ++l_;
    }

private:
    double x_;
    double p_prev_, p_cur_, p_next_ = 0.0;
    int l_;
};

/// Gauss-Legendre rule on [-1, 1]; nodes by Newton iteration on P_n.
struct GaussLegendreRule {
    std::vector<double> x;
    std::vector<double> w;
};

inline GaussLegendreRule gauss_legendre(int n) {
    if (n < 1) throw std::domain_error("gauss_legendre: n must be >= 1");
    GaussLegendreRule rule;
    rule.x.resize(static_cast<std::size_t>(n));
    rule.w.resize(static_cast<std::size_t>(n));
    const int m = (n + 1) / 2;
    for (int i = 0; i < m; ++i) {
        // Tricomi initial guess, then Newton
        double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = z;
            for (int k = 1; k < n; ++k) {
                double pn = ((2 * k + 1) * z * p1 - k * p0) / (k + 1);
                p0 = p1;
                p1 = pn;
            }
            pp = n * (z * p1 - p0) / (z * z - 1.0);
            double dz = p1 / pp;
            z -= dz;
            if (std::abs(dz) < 1e-15) {
                // one clean-up step after convergence
                p0 = 1.0;
                p1 = z;
                for (int k = 1; k < n; ++k) {
                    double pn = ((2 * k + 1) * z * p1 - k * p0) / (k + 1);
                    p0 = p1;
                    p1 = pn;
                }
                pp = n * (z * p1 - p0) / (z * z - 1.0);
                break;
            }
        }
        rule.x[static_cast<std::size_t>(i)] = -z;
        rule.x[static_cast<std::size_t>(n - 1 - i)] = z;
        double wi = 2.0 / ((1.0 - z * z) * pp * pp);
        rule.w[static_cast<std::size_t>(i)] = wi;
        rule.w[static_cast<std::size_t>(n - 1 - i)] = wi;
    }
    return rule;
}

/// Map a [-1, 1] rule onto [a, b].
inline GaussLegendreRule mapped(const GaussLegendreRule& rule, double a, double b) {
    GaussLegendreRule out = rule;
    const double half = 0.5 * (b - a), mid = 0.5 * (a + b);
    for (std::size_t i = 0; i < out.x.size(); ++i) {
        out.x[i] = mid + half * rule.x[i];
        out.w[i] = half * rule.w[i];
    }
    return out;
}

} // namespace ionmirror::numeric
