#include "hmgibbs/numeric.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace hmg {

double log_add(double a, double b) noexcept {
    if (a < b) std::swap(a, b);
    if (b == -std::numeric_limits<double>::infinity()) return a;
    return a + std::log1p(std::exp(b - a));
}

double logsumexp(std::span<const double> v) noexcept {
    if (v.empty()) return -std::numeric_limits<double>::infinity();
    const double m = *std::max_element(v.begin(), v.end());
    if (!std::isfinite(m)) return m;
    double s = 0.0;
    for (double x : v) s += std::exp(x - m);
    return m + std::log(s);
}

bool checked_pow(unsigned long long base, unsigned exp, unsigned long long limit,
                 unsigned long long& out) noexcept {
    unsigned long long acc = 1;
    for (unsigned i = 0; i < exp; ++i) {
        if (base != 0 && acc > limit / base) return false;
        acc *= base;
        if (acc > limit) return false;
    }
    out = acc;
    return true;
}

}  // namespace hmg
