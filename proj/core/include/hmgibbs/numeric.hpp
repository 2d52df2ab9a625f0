#pragma once

#include <span>
#include <vector>

namespace hmg {

/// log(exp(a) + exp(b)) without overflow; -inf is the additive identity.
double log_add(double a, double b) noexcept;

/// log Σ exp(v_i); returns -inf for an empty span.
double logsumexp(std::span<const double> v) noexcept;

/// Integer power with overflow check against `limit`; returns false on overflow.
bool checked_pow(unsigned long long base, unsigned exp, unsigned long long limit,
                 unsigned long long& out) noexcept;

}  // namespace hmg
