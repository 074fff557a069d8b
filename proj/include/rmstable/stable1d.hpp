#pragma once

#include <complex>

#include "rmstable/rng.hpp"

namespace rms {

// CF exp(-scale*[w+ nu(k) + w- nu(-k)] + i*shift*k), w+- = (1 +- beta)/2.
struct StableParams1D {
    double alpha = 2.0;
    double beta = 0.0;
    double scale = 1.0;
    double shift = 0.0;

    void validate() const;
};

// nu_alpha(u) = |u|^a (1 - i sgn(u) tan(pi a/2)) for a != 1,
//               |u| (1 + (2i/pi) sgn(u) log|u|) for a = 1; nu(0) = 0.
std::complex<double> nu_alpha(double alpha, double u);

// Exact average of nu_alpha(a + b u) over u uniform on [0,1].
std::complex<double> nu_alpha_linear_mean(double alpha, double a, double b);

double sample_stable_1d(const StableParams1D& p, Engine& eng);

// Positive stable law with Laplace transform exp(-k^a), a in (0,1).
double sample_positive_stable(double alpha_half, Engine& eng);

std::complex<double> stable_cf_1d(const StableParams1D& p, double k);

StableParams1D dirac_weight_to_params(double p, double alpha, double gamma);

}  // namespace rms
