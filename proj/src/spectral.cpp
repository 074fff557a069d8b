#include "rmstable/spectral.hpp"

#include <cmath>

#include "rmstable/errors.hpp"

namespace rms {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

HermitianMatrix isotropic_direction(std::size_t n, Engine& eng) {
    for (;;) {
        HermitianMatrix g = sample_gue(n, eng);
        double nrm = frobenius_norm(g);
        if (nrm > 0.0) return (1.0 / nrm) * g;
    }
}

}  // namespace

Orbital Orbital::from_matrices(const std::vector<std::pair<HermitianMatrix, double>>& reps) {
    Orbital o;
    for (const auto& [x, w] : reps) {
        double nrm = frobenius_norm(x);
        if (nrm == 0.0) throw ParameterError("orbital measure: zero representative");
        HermitianMatrix r = (1.0 / nrm) * x;
        o.orbits.push_back({r, hermitian_eigvals(r), w});
    }
    return o;
}

Orbital Orbital::from_spectra(const std::vector<std::pair<std::vector<double>, double>>& reps) {
    std::vector<std::pair<HermitianMatrix, double>> m;
    for (const auto& [ev, w] : reps) m.emplace_back(HermitianMatrix::diagonal(ev), w);
    return from_matrices(m);
}

void validate(const SpectralMeasure& h, std::size_t n) {
    if (n == 0) throw ParameterError("dimension must be positive");
    std::visit(overloaded{
                   [](const Isotropic&) {},
                   [n](const Elliptical& e) {
                       if (!(e.sigma > 0.0)) throw ParameterError("elliptical: sigma must be positive");
                       if (!(e.kappa > -e.sigma * e.sigma / static_cast<double>(n)))
                           throw ParameterError("elliptical: kappa must exceed -sigma^2/N");
                   },
                   [](const DiracIdentity& d) {
                       if (!(d.p >= 0.0 && d.p <= 1.0)) throw ParameterError("dirac: p must lie in [0,1]");
                   },
                   [n](const Orbital& o) {
                       if (o.orbits.empty()) throw ParameterError("orbital: no orbits");
                       double total = 0.0;
                       for (const auto& orb : o.orbits) {
                           if (orb.representative.dim() != n)
                               throw ParameterError("orbital: representative dimension differs from N");
                           if (std::abs(frobenius_norm(orb.representative) - 1.0) > 1e-12)
                               throw ParameterError("orbital: representative not of unit norm");
                           if (!(orb.weight >= 0.0)) throw ParameterError("orbital: negative weight");
                           total += orb.weight;
                       }
                       if (std::abs(total - 1.0) > 1e-12) throw ParameterError("orbital: weights must sum to 1");
                   },
               },
               h);
}

std::string measure_name(const SpectralMeasure& h) {
    return std::visit(overloaded{
                          [](const Isotropic&) { return std::string("isotropic"); },
                          [](const Elliptical&) { return std::string("elliptical"); },
                          [](const DiracIdentity&) { return std::string("dirac"); },
                          [](const Orbital&) { return std::string("orbital"); },
                      },
                      h);
}

HermitianMatrix sample_direction(const SpectralMeasure& h, std::size_t n, double alpha, Engine& eng,
                                 DirectionStats* stats) {
    return std::visit(
        overloaded{
            [&](const Isotropic&) {
                if (stats) ++stats->proposals, ++stats->accepted;
                return isotropic_direction(n, eng);
            },
            [&](const Elliptical& e) {
                double nn = static_cast<double>(n);
                double c1 = alpha / (4.0 * e.sigma * e.sigma);
                double c2 = -alpha * e.kappa / (4.0 * e.sigma * e.sigma * (e.sigma * e.sigma + nn * e.kappa));
                double b = 0.5 * (alpha + nn * nn);
                // (Tr R)^2 ranges over [0, N]; the weight is monotone in it.
                double env = c2 >= 0.0 ? std::pow(c1, -b) : std::pow(c1 + c2 * nn, -b);
                for (;;) {
                    HermitianMatrix r = isotropic_direction(n, eng);
                    double t = r.trace();
                    double w = std::pow(c1 + c2 * t * t, -b) / env;
                    if (stats) ++stats->proposals;
                    if (uniform_open(eng) < w) {
                        if (stats) ++stats->accepted;
                        return r;
                    }
                }
            },
            [&](const DiracIdentity& d) {
                if (stats) ++stats->proposals, ++stats->accepted;
                double sgn = uniform_open(eng) < d.p ? 1.0 : -1.0;
                return (sgn / std::sqrt(static_cast<double>(n))) * HermitianMatrix::identity(n);
            },
            [&](const Orbital& o) {
                if (stats) ++stats->proposals, ++stats->accepted;
                double u = uniform_open(eng), acc = 0.0;
                const Orbit* pick = &o.orbits.back();
                for (const auto& orb : o.orbits) {
                    acc += orb.weight;
                    if (u < acc) {
                        pick = &orb;
                        break;
                    }
                }
                if (pick->representative.dim() != n) throw ParameterError("orbital: dimension mismatch");
                UnitaryMatrix uu = sample_haar_unitary(n, eng);
                return conjugate_diag(uu, pick->spectrum);
            },
        },
        h);
}

double gauss_2f1(double a, double b, double c, double z) {
    if (c <= 0.0 && c == std::floor(c)) throw ParameterError("gauss_2f1: c is a nonpositive integer");
    if (!(z < 1.0)) throw ParameterError("gauss_2f1: z must be < 1");
    if (z < 0.0) {
        // Pfaff: maps z < 0 into (0,1)
        double w = z / (z - 1.0);
        return std::pow(1.0 - z, -a) * gauss_2f1(a, c - b, c, w);
    }
    double sum = 1.0, term = 1.0;
    for (int k = 0; k < 1000000; ++k) {
        double ratio = (a + k) * (b + k) / ((c + k) * (k + 1.0)) * z;
        term *= ratio;
        sum += term;
        if (term == 0.0) return sum;
        double next = std::abs((a + k + 1) * (b + k + 1) / ((c + k + 1) * (k + 2.0)) * z);
        // tail bound once the ratios have settled below one
        if (next < 1.0 && std::abs(term) * next / (1.0 - next) <= 1e-16 * std::abs(sum)) return sum;
    }
    throw NumericalError("gauss_2f1: series did not converge");
}

EllipticalConstants elliptical_constants(double sigma, double kappa, double alpha, std::size_t n) {
    double nn = static_cast<double>(n), n2 = nn * nn;
    if (!(sigma > 0.0)) throw ParameterError("elliptical_constants: sigma must be positive");
    if (!(kappa > -sigma * sigma / nn)) throw ParameterError("elliptical_constants: kappa must exceed -sigma^2/N");
    if (!(alpha > 0.0 && alpha < 2.0)) throw ParameterError("elliptical_constants: alpha must lie in (0,2)");
    if (n == 0) throw ParameterError("elliptical_constants: N must be positive");
    EllipticalConstants ec;
    double s2 = sigma * sigma;
    ec.c1 = alpha / (4.0 * s2);
    ec.c2 = -alpha * kappa / (4.0 * s2 * (s2 + nn * kappa));
    double b = 0.5 * (alpha + n2);
    // (Tr R)^2 = N r1^2 along the trace coordinate, hence -c2 N / c1
    ec.c3 = std::pow(ec.c1, b) / gauss_2f1(0.5, b, 0.5 * n2, -ec.c2 * nn / ec.c1);
    double lk = std::lgamma(0.5 * n2) + std::lgamma(alpha + 1.0) - 0.5 * (n2 - 1.0) * std::log(ec.c1) -
                0.5 * std::log(ec.c1 + nn * ec.c2) - std::lgamma(b) - std::lgamma(0.5 * alpha + 1.0);
    ec.gamma_scale = 1.0 / (ec.c3 * std::exp(lk));
    return ec;
}

MeanDirection mean_direction(const SpectralMeasure& h, std::size_t n, double alpha, std::size_t n_mc, Engine& eng) {
    validate(h, n);
    if (n_mc == 0) throw ParameterError("mean_direction: n_mc must be positive");
    if (const auto* d = std::get_if<DiracIdentity>(&h)) {
        double c = (2.0 * d->p - 1.0) / std::sqrt(static_cast<double>(n));
        return {c * HermitianMatrix::identity(n), 0.0};
    }
    std::vector<cplx> s1(n * n), s2(n * n);
    for (std::size_t k = 0; k < n_mc; ++k) {
        HermitianMatrix r = sample_direction(h, n, alpha, eng);
        for (std::size_t e = 0; e < n * n; ++e) {
            cplx z = r.data()[e];
            s1[e] += z;
            s2[e] += cplx(z.real() * z.real(), z.imag() * z.imag());
        }
    }
    double m = static_cast<double>(n_mc);
    std::vector<cplx> mean(n * n);
    double var = 0.0;
    for (std::size_t e = 0; e < n * n; ++e) {
        mean[e] = s1[e] / m;
        double vr = s2[e].real() / m - mean[e].real() * mean[e].real();
        double vi = s2[e].imag() / m - mean[e].imag() * mean[e].imag();
        var += std::max(vr, 0.0) + std::max(vi, 0.0);
    }
    return {HermitianMatrix::from_entries(n, mean), std::sqrt(var / m)};
}

StrictCheck check_strict_alpha1(const SpectralMeasure& h, std::size_t n, double tol, std::size_t n_mc, Engine& eng) {
    MeanDirection md = mean_direction(h, n, 1.0, n_mc, eng);
    double res = frobenius_norm(md.mean);
    return {res <= std::max(tol, 4.0 * md.std_error), res, md.std_error};
}

std::optional<GAlphaWeight> g_alpha_weight(const std::vector<double>& t, double alpha) {
    double nrm = 0.0;
    for (double x : t) nrm += x * x;
    nrm = std::sqrt(nrm);
    if (nrm == 0.0) return std::nullopt;
    GAlphaWeight g;
    g.direction.reserve(t.size());
    for (double x : t) g.direction.push_back(x / nrm);
    g.weight = std::pow(nrm, alpha);
    return g;
}

Estimate alpha1_shift(const SpectralMeasure& h, std::size_t n, double gamma, std::size_t n_mc, Engine& eng) {
    validate(h, n);
    if (n_mc == 0) throw ParameterError("alpha1_shift: n_mc must be positive");
    // per draw: the average over components of t_j log||t||
    std::vector<double> vals(n_mc);
    for (std::size_t k = 0; k < n_mc; ++k) {
        std::vector<double> t = sample_direction(h, n, 1.0, eng).diag();
        double nrm = 0.0, s = 0.0;
        for (double x : t) nrm += x * x, s += x;
        nrm = std::sqrt(nrm);
        vals[k] = nrm > 0.0 ? s / static_cast<double>(n) * std::log(nrm) : 0.0;
    }
    Estimate e = mean_estimate(vals);
    double f = gamma * 2.0 / M_PI;
    return {f * e.value, f * e.std_error};
}

}  // namespace rms
