#pragma once

// Log-gamma, digamma and trigamma for strictly positive real arguments.
//
// All three shift small arguments upward with the functional recurrence and
// then evaluate an asymptotic (Stirling-type) series. Accuracy is documented
// for x in [1e-3, 1e6]; smaller positive arguments are accepted.

namespace evid {

/// ln Gamma(x). Throws std::domain_error unless x is finite and > 0.
double log_gamma(double x);

/// psi(x) = d/dx ln Gamma(x). Throws std::domain_error unless x is finite and > 0.
double digamma(double x);

/// psi_1(x) = d/dx psi(x). Throws std::domain_error unless x is finite and > 0.
double trigamma(double x);

}  // namespace evid
