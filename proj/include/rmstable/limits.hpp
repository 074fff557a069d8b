#pragma once

#include <complex>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "rmstable/ensembles.hpp"
#include "rmstable/stats.hpp"

namespace rms {

struct TailRatioEstimate {
    double k = 1.0;
    std::vector<double> r_grid;
    std::vector<double> ratios;
    std::vector<std::size_t> counts;  // #{norm > R}
    std::vector<bool> masked;         // fewer than min_exceedances above R
};

constexpr std::size_t kMinExceedances = 50;

// #{norm > k R} / #{norm > R} per R.
TailRatioEstimate tail_ratio(std::span<const double> norms, double k, const std::vector<double>& r_grid);

// Largest unmasked grid index, or nullopt.
std::optional<std::size_t> last_unmasked(const TailRatioEstimate& t);

// sum_{||X|| > kR} phi(X/||X||) / #{||X|| > R}; phi must be bounded by phi_bound.
TailRatioEstimate angular_tail_functional(const SampleBatch& batch,
                                          const std::function<double(const HermitianMatrix&)>& phi, double phi_bound,
                                          double k, const std::vector<double>& r_grid);

struct HillEstimate {
    std::size_t k_order = 0;
    double alpha_hat = 0.0;
    double ci_halfwidth = 0.0;  // 1.96 alpha_hat / sqrt(k)
};

HillEstimate hill_estimator(std::span<const double> norms, std::size_t k_order);

enum class ShiftRule { zero, mean };

struct CltSetup {
    double alpha = 2.0;
    std::optional<double> b;   // B_m = m^{1/alpha} b; empty selects the scale-cancelled distance
    ShiftRule shift = ShiftRule::zero;
    std::vector<std::size_t> m_schedule;
    std::vector<std::vector<double>> s_grid;
    std::vector<double> s0;    // reference point for the scale-cancelled distance
    std::size_t n = 1000;      // number of scaled sums per m
    // Estimate the CF by the HCIZ kernel at each sum's eigenvalues, i.e. average
    // over the conjugation orbit. Valid for invariant sources; lower variance.
    bool spherical = false;
};

struct ConvergenceCurve {
    std::vector<std::size_t> m_schedule;
    std::vector<double> distances;
    std::vector<double> std_errors;
    std::vector<std::size_t> argmax;  // grid index attaining the sup
};

using BatchSource = std::function<SampleBatch(std::size_t n, const Stream& stream)>;
// Target log-CF in diagonal form.
using TargetLogCf = std::function<std::complex<double>(std::span<const double> s)>;

ConvergenceCurve clt_experiment(const BatchSource& source, const TargetLogCf& target, const CltSetup& setup,
                                const Stream& stream);

// d_{i+1} <= d_i + z sqrt(se_i^2 + se_{i+1}^2) for all i.
bool nonincreasing_within(const ConvergenceCurve& c, double z);

struct StrictResidual {
    double r = 0.0;
    double residual = 0.0;            // ||mean of X 1{||X||<R}||_F / (R P(||X||>R))
    double std_error = 0.0;
    double residual_invariant = 0.0;  // same with X replaced by its Haar average (Tr X/N) I
    bool masked = false;
};

std::vector<StrictResidual> strict_doa_check_alpha1(const SampleBatch& batch, const std::vector<double>& r_grid);
// Eigenvalue-vector path: ||mean of x 1{||x||<R}|| after symmetrisation over permutations.
std::vector<StrictResidual> strict_doa_check_alpha1_eig(const std::vector<std::vector<double>>& eigs,
                                                        const std::vector<double>& r_grid);

struct GaussianDoa {
    std::vector<double> cond1;
    std::vector<double> cond2;
    std::vector<bool> masked;
};

GaussianDoa gaussian_doa_check(const SampleBatch& batch, const HermitianMatrix& s, const HermitianMatrix& t,
                               const std::vector<double>& r_grid);

struct MomentScanEntry {
    double m = 0.0;
    std::vector<std::size_t> prefixes;
    std::vector<double> partial_means;
    double doubling_z = 0.0;     // |mean(n) - mean(n/2)| / stderr(n)
    double growth_slope = 0.0;   // log-log slope of median block means against block size
    double hill_index = 0.0;     // tail index of ||X||^m
    bool diverging = false;
};

std::vector<MomentScanEntry> moment_scan(std::span<const double> norms, const std::vector<double>& exponents);
std::vector<MomentScanEntry> moment_scan(const SampleBatch& batch, const std::vector<double>& exponents);

struct DyadicRatio {
    std::vector<double> ratios;  // j = 1..j_max
    double empirical_limit = 0.0;
    double stable_target = 0.0;  // 1/k
};

// X = 2^j with probability 2^{-j}, j >= 1; ratio P(X >= k 2^j)/P(X >= 2^j).
DyadicRatio dyadic_counterexample_ratio(double k, int j_max);
// x I_N/sqrt(N) with x dyadic, so ||X|| = x.
SampleBatch sample_dyadic_batch(std::size_t n_dim, std::size_t n, const Stream& stream);

}  // namespace rms
