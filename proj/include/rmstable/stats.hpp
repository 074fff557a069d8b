#pragma once

#include <complex>
#include <span>
#include <vector>

namespace rms {

struct Estimate {
    double value = 0.0;
    double std_error = 0.0;
};

struct ComplexEstimate {
    std::complex<double> value{};
    double std_error = 0.0;  // sqrt of (Var re + Var im)/n
};

Estimate mean_estimate(std::span<const double> xs);
ComplexEstimate mean_estimate(std::span<const std::complex<double>> zs);

struct KsResult {
    double statistic = 0.0;
    double p_value = 1.0;
};

// Survival function of the Kolmogorov distribution, P(K > lambda).
double kolmogorov_q(double lambda);
KsResult ks_two_sample(std::vector<double> a, std::vector<double> b);

// Binomial normal-approximation half width at confidence z.
double binomial_halfwidth(double p, double n, double z);

}  // namespace rms
