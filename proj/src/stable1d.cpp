#include "rmstable/stable1d.hpp"

#include <cmath>

#include "rmstable/errors.hpp"

namespace rms {

namespace {

void check_alpha(double alpha) {
    if (!(alpha > 0.0 && alpha <= 2.0)) throw ParameterError("alpha must lie in (0,2]");
}

double sgn(double x) { return (x > 0) - (x < 0); }

// Antiderivatives of |v|^a and sgn(v)|v|^a.
double int_abs_pow(double a, double v) { return sgn(v) * std::pow(std::abs(v), a + 1.0) / (a + 1.0); }
double int_sgn_abs_pow(double a, double v) { return std::pow(std::abs(v), a + 1.0) / (a + 1.0); }
// Antiderivative of v log|v|.
double int_v_log(double v) { return v == 0.0 ? 0.0 : 0.5 * v * v * std::log(std::abs(v)) - 0.25 * v * v; }

}  // namespace

void StableParams1D::validate() const {
    check_alpha(alpha);
    if (!(std::abs(beta) <= 1.0)) throw ParameterError("beta must lie in [-1,1]");
    if (!(scale > 0.0)) throw ParameterError("scale must be positive");
    if (!std::isfinite(shift)) throw ParameterError("shift must be finite");
}

std::complex<double> nu_alpha(double alpha, double u) {
    check_alpha(alpha);
    if (u == 0.0) return 0.0;
    double au = std::abs(u);
    if (alpha == 1.0) return {au, 2.0 / M_PI * u * std::log(au)};
    double m = std::pow(au, alpha);
    if (alpha == 2.0) return m;
    return {m, -sgn(u) * m * std::tan(M_PI * alpha / 2.0)};
}

std::complex<double> nu_alpha_linear_mean(double alpha, double a, double b) {
    check_alpha(alpha);
    if (b == 0.0) return nu_alpha(alpha, a);
    double lo = a, hi = a + b;
    if (alpha == 1.0) {
        double re = (int_abs_pow(1.0, hi) - int_abs_pow(1.0, lo)) / b;
        double im = 2.0 / M_PI * (int_v_log(hi) - int_v_log(lo)) / b;
        return {re, im};
    }
    double re = (int_abs_pow(alpha, hi) - int_abs_pow(alpha, lo)) / b;
    if (alpha == 2.0) return re;
    double im = -std::tan(M_PI * alpha / 2.0) * (int_sgn_abs_pow(alpha, hi) - int_sgn_abs_pow(alpha, lo)) / b;
    return {re, im};
}

double sample_stable_1d(const StableParams1D& p, Engine& eng) {
    p.validate();
    if (p.alpha == 2.0) return std::sqrt(2.0 * p.scale) * standard_normal(eng) + p.shift;

    // Chambers-Mallows-Stuck
    double v = M_PI * (uniform_open(eng) - 0.5);
    double w = standard_exponential(eng);
    double a = p.alpha, b = p.beta;
    if (a == 1.0) {
        double h = M_PI / 2.0 + b * v;
        double x = 2.0 / M_PI * (h * std::tan(v) - b * std::log((M_PI / 2.0) * w * std::cos(v) / h));
        return p.scale * x + 2.0 / M_PI * b * p.scale * std::log(p.scale) + p.shift;
    }
    double t = b * std::tan(M_PI * a / 2.0);
    double bb = std::atan(t) / a;
    double ss = std::pow(1.0 + t * t, 1.0 / (2.0 * a));
    double x = ss * std::sin(a * (v + bb)) / std::pow(std::cos(v), 1.0 / a) *
               std::pow(std::cos(v - a * (v + bb)) / w, (1.0 - a) / a);
    return std::pow(p.scale, 1.0 / a) * x + p.shift;
}

double sample_positive_stable(double alpha_half, Engine& eng) {
    if (!(alpha_half > 0.0 && alpha_half < 1.0)) throw ParameterError("alpha_half must lie in (0,1)");
    // Totally skewed stable; Laplace exponent scale/cos(pi a/2) set to 1.
    StableParams1D p{alpha_half, 1.0, std::cos(M_PI * alpha_half / 2.0), 0.0};
    for (;;) {
        double t = sample_stable_1d(p, eng);
        if (t > 0.0) return t;  // underflow to 0 is possible for small alpha_half
    }
}

std::complex<double> stable_cf_1d(const StableParams1D& p, double k) {
    p.validate();
    double wp = 0.5 * (1.0 + p.beta), wm = 0.5 * (1.0 - p.beta);
    std::complex<double> e = -p.scale * (wp * nu_alpha(p.alpha, k) + wm * nu_alpha(p.alpha, -k));
    return std::exp(e + std::complex<double>(0.0, p.shift * k));
}

StableParams1D dirac_weight_to_params(double p, double alpha, double gamma) {
    if (!(p >= 0.0 && p <= 1.0)) throw ParameterError("p must lie in [0,1]");
    StableParams1D sp{alpha, 2.0 * p - 1.0, gamma, 0.0};
    sp.validate();
    return sp;
}

}  // namespace rms
