#pragma once

#include <complex>
#include <span>
#include <vector>

#include "rmstable/ensembles.hpp"
#include "rmstable/linalg.hpp"
#include "rmstable/stats.hpp"

namespace rms {

// Normalised HCIZ kernel: the Haar average of exp(i Tr U diag(x) U^dagger diag(s)).
std::complex<double> hciz_kernel(std::span<const double> x, std::span<const double> s);

struct CNConstant {
    double alpha = 0.0;
    std::size_t dim = 0;
    double value = 0.0;
};

// Gamma(alpha+1) prod_{j=0}^{N-1} j! / Gamma(alpha+1+N(N-1)/2)
CNConstant c_n_constant(double alpha, std::size_t n);

// Haar average of nu_alpha(Tr U diag(r) U^dagger diag(s)) written as the
// permutation sum over r; s and r near-ties are resolved by extrapolation.
std::complex<double> eig_form_kernel(double alpha, std::span<const double> s, std::span<const double> r);

ComplexEstimate log_cf_matrix(const EnsembleSpec& spec, const HermitianMatrix& s, std::size_t n_mc, Engine& eng);
ComplexEstimate log_cf_eig_form(const EnsembleSpec& spec, std::span<const double> s, std::size_t n_mc, Engine& eng);
ComplexEstimate log_cf_diag_form(const EnsembleSpec& spec, std::span<const double> s, std::size_t n_mc, Engine& eng);

// -gamma * mean of nu_alpha(s^T t), t uniform on the probability simplex.
// N = 2 is evaluated in closed form (std_error 0).
ComplexEstimate rank_one_orbital_logcf(std::span<const double> s, double alpha, double gamma, std::size_t n_mc,
                                       Engine& eng);

// Exact log-CF at N = 2 for an orbital spectral measure, at a matrix with eigenvalues s.
std::complex<double> orbital_logcf_n2(const EnsembleSpec& spec, std::span<const double> s);

ComplexEstimate empirical_cf_matrix(const SampleBatch& batch, const HermitianMatrix& s);
ComplexEstimate empirical_cf_diag(const SampleBatch& batch, std::span<const double> s);
ComplexEstimate empirical_spherical_cf(const SampleBatch& batch, std::span<const double> s);

struct DpPoint {
    std::vector<double> s;
    std::complex<double> spherical;
    std::complex<double> diagonal;
    double residual = 0.0;
    double std_error = 0.0;  // paired: both estimators use the same draws
};

struct DpResidual {
    double max_residual = 0.0;
    std::vector<DpPoint> points;
};

DpResidual derivative_principle_residual(const SampleBatch& batch, const std::vector<std::vector<double>>& grid);

}  // namespace rms
