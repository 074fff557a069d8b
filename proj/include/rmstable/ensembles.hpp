#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "rmstable/linalg.hpp"
#include "rmstable/rng.hpp"
#include "rmstable/spectral.hpp"

namespace rms {

// S(alpha, gamma H, y0 I_N)
struct EnsembleSpec {
    double alpha = 2.0;
    double gamma = 1.0;
    double y0 = 0.0;
    std::size_t dim = 2;
    SpectralMeasure measure = Isotropic{};

    void validate() const;
};

struct SampleBatch {
    std::size_t dim = 0;
    std::uint64_t seed = 0;     // key of the stream the draws came from
    std::string sampler;        // e.g. "elliptical"
    std::string params;         // free-form provenance, JSON text when written by the CLI
    bool exact = true;          // false for domain-of-attraction samplers
    std::vector<HermitianMatrix> matrices;
    std::vector<std::vector<double>> eigenvalues;  // ascending
    std::vector<std::vector<double>> diagonals;

    std::size_t size() const { return matrices.size(); }
    std::vector<double> norms() const;
    std::vector<double> traces() const;
    std::vector<double> largest_eigenvalues() const;

    // Fills eigenvalue and diagonal caches.
    static SampleBatch from_matrices(std::size_t dim, std::vector<HermitianMatrix> ms, std::string sampler,
                                     std::uint64_t seed, bool exact);
};

SampleBatch sample_gue_batch(std::size_t n_dim, std::size_t n, const Stream& stream);
SampleBatch sample_direction_batch(const SpectralMeasure& h, double alpha, std::size_t n_dim, std::size_t n,
                                   const Stream& stream);

// y0 I + sqrt(T) G with T positive (alpha/2)-stable and Var(Tr G S) = 2 q(S).
SampleBatch sample_elliptical_stable(double sigma, double kappa, double alpha, double y0, std::size_t n_dim,
                                     std::size_t n, const Stream& stream);

// sigma * GUE + sqrt(kappa) xi I; kappa < 0 is a capability error.
SampleBatch sample_gaussian_invariant(double sigma, double kappa, std::size_t n_dim, std::size_t n,
                                      const Stream& stream);

// (y/sqrt(N) + y0) I with y univariate stable, beta = 2p - 1.
SampleBatch sample_dirac_stable(double alpha, double gamma, double p, double y0, std::size_t n_dim, std::size_t n,
                                const Stream& stream);

// R * Theta with P(R > r) = r^{-alpha}, r >= 1, Theta ~ h.
SampleBatch sample_doa_pareto(const SpectralMeasure& h, double alpha, std::size_t n_dim, std::size_t n,
                              const Stream& stream);

// Draw-wise (sum_j X_j)/b_m - a_m I.
SampleBatch sum_scaled(std::span<const SampleBatch> batches, double b_m, double a_m);

struct MixtureComponent {
    const SampleBatch* batch = nullptr;
    double weight = 0.0;
    double orbit_trace = 0.0;  // Tr X of the unit-norm orbit representative, used at alpha = 1
};

// alpha != 1: sum_j p_j^{1/alpha} Y_j.
// alpha == 1: sum_j p_j Y_j + (2 gamma/(pi N)) sum_j p_j log(p_j) Tr X_j I.
SampleBatch sample_orbit_mixture(std::span<const MixtureComponent> comps, double alpha, double gamma);

}  // namespace rms
