#pragma once

#include <vector>

namespace mmtdd {

// Load laws of a BS with mean device count eps. The total count is negative
// binomial with shape k and success ratio eps / (eps + 3.5); k = 3.5 for a
// typical BS and k = 4.5 for the devices of a tagged BS other than the
// reference device. All evaluation is in log space.
double nb_pmf(double k, double eps, int n);

// kappa(n), n >= 0.
double typical_pmf(double eps, int n);

// kappa*(n), n >= 1; throws ParamError for n < 1.
double tagged_pmf(double eps, int n);

// Upsilon(n1, n2, k): n1 UL and n2 DL devices, each device DL with
// probability eta. Only k in {3.5, 4.5} is accepted.
double joint_pmf(double eps, double eta, int n1, int n2, double k);

// max(ceil(6 eps), 20).
int truncation_limit(double eps);

// Smallest N >= truncation_limit(eps) such that the shape-k law leaves
// less than `tail` mass above N. Throws NumericError past 1e6 terms.
int support_limit(double k, double eps, double tail);

// Table of nb_pmf(k, eps, n) for n = 0..support_limit(k, eps, tail).
std::vector<double> nb_table(double k, double eps, double tail);

// E[1/N] for N ~ kappa*, truncated at `tail`.
double tagged_inverse_mean(double eps, double tail);

}  // namespace mmtdd
