#pragma once

// Log-gamma and the first three derivatives of log-gamma for positive real
// arguments. All functions throw dirbr::DomainError for x <= 0 or NaN.

namespace dirbr {

double log_gamma(double x);

/// psi(x) = d/dx log Gamma(x).
double digamma(double x);

/// psi'(x).
double trigamma(double x);

/// psi''(x).
double tetragamma(double x);

}  // namespace dirbr
