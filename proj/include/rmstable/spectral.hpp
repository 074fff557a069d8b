#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "rmstable/linalg.hpp"
#include "rmstable/rng.hpp"
#include "rmstable/stats.hpp"

namespace rms {

struct Isotropic {};

// Density proportional to [c1 + c2 (Tr R)^2]^{-(alpha+N^2)/2} against the
// isotropic measure; requires kappa > -sigma^2/N.
struct Elliptical {
    double sigma = 1.0;
    double kappa = 0.0;
};

// Masses p and 1-p at +I/sqrt(N) and -I/sqrt(N).
struct DiracIdentity {
    double p = 0.5;
};

struct Orbit {
    HermitianMatrix representative;  // unit Frobenius norm
    std::vector<double> spectrum;    // eigenvalues of the representative, ascending
    double weight = 1.0;
};

struct Orbital {
    std::vector<Orbit> orbits;

    // Representatives are rescaled to unit Frobenius norm; zero matrices are rejected.
    static Orbital from_matrices(const std::vector<std::pair<HermitianMatrix, double>>& reps);
    static Orbital from_spectra(const std::vector<std::pair<std::vector<double>, double>>& reps);
};

using SpectralMeasure = std::variant<Isotropic, Elliptical, DiracIdentity, Orbital>;

void validate(const SpectralMeasure& h, std::size_t n);
std::string measure_name(const SpectralMeasure& h);

struct DirectionStats {
    std::size_t proposals = 0;
    std::size_t accepted = 0;
};

// Unit-Frobenius-norm draw from h. `alpha` only enters the elliptical density.
HermitianMatrix sample_direction(const SpectralMeasure& h, std::size_t n, double alpha, Engine& eng,
                                 DirectionStats* stats = nullptr);

struct EllipticalConstants {
    double c1 = 0.0;
    double c2 = 0.0;
    double c3 = 0.0;
    double gamma_scale = 0.0;
};

// With these constants, gamma_scale * E_H[nu_alpha(Tr S R)] = q(S)^{alpha/2},
// q(S) = sigma^2 Tr S^2/alpha + kappa (Tr S)^2/alpha.
EllipticalConstants elliptical_constants(double sigma, double kappa, double alpha, std::size_t n);

// Gauss hypergeometric 2F1(a,b;c;z) for real z < 1.
double gauss_2f1(double a, double b, double c, double z);

struct MeanDirection {
    HermitianMatrix mean;
    double std_error = 0.0;  // Frobenius norm of the entrywise standard errors
};

MeanDirection mean_direction(const SpectralMeasure& h, std::size_t n, double alpha, std::size_t n_mc, Engine& eng);

struct StrictCheck {
    bool is_strict = false;
    double residual = 0.0;
    double std_error = 0.0;
};

StrictCheck check_strict_alpha1(const SpectralMeasure& h, std::size_t n, double tol, std::size_t n_mc, Engine& eng);

struct GAlphaWeight {
    std::vector<double> direction;
    double weight = 0.0;
};

// Empty for t = 0 (caller redraws).
std::optional<GAlphaWeight> g_alpha_weight(const std::vector<double>& t, double alpha);

// y1 with y1 * 1_N = gamma * (2/pi) * E[t log||t||] over diagonals t of directions.
Estimate alpha1_shift(const SpectralMeasure& h, std::size_t n, double gamma, std::size_t n_mc, Engine& eng);

}  // namespace rms
