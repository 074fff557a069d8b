#include "rmstable/stats.hpp"

#include <algorithm>
#include <cmath>

#include "rmstable/errors.hpp"

namespace rms {

Estimate mean_estimate(std::span<const double> xs) {
    if (xs.empty()) throw EstimationError("mean of an empty sample");
    double n = static_cast<double>(xs.size()), m = 0.0;
    for (double x : xs) m += x;
    m /= n;
    double v = 0.0;
    for (double x : xs) v += (x - m) * (x - m);
    v = xs.size() > 1 ? v / (n - 1.0) : 0.0;
    return {m, std::sqrt(v / n)};
}

ComplexEstimate mean_estimate(std::span<const std::complex<double>> zs) {
    if (zs.empty()) throw EstimationError("mean of an empty sample");
    double n = static_cast<double>(zs.size());
    std::complex<double> m = 0.0;
    for (auto z : zs) m += z;
    m /= n;
    double v = 0.0;
    for (auto z : zs) v += std::norm(z - m);
    v = zs.size() > 1 ? v / (n - 1.0) : 0.0;
    return {m, std::sqrt(v / n)};
}

double kolmogorov_q(double lambda) {
    if (lambda < 0.2) return 1.0;
    double s = 0.0, sign = 1.0;
    for (int k = 1; k <= 100; ++k) {
        double term = std::exp(-2.0 * k * k * lambda * lambda);
        s += sign * term;
        if (term < 1e-16) break;
        sign = -sign;
    }
    return std::clamp(2.0 * s, 0.0, 1.0);
}

KsResult ks_two_sample(std::vector<double> a, std::vector<double> b) {
    if (a.empty() || b.empty()) throw EstimationError("ks_two_sample: empty sample");
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
    std::size_t i = 0, j = 0;
    double d = 0.0;
    while (i < a.size() && j < b.size()) {
        double x = std::min(a[i], b[j]);
        while (i < a.size() && a[i] == x) ++i;
        while (j < b.size() && b[j] == x) ++j;
        d = std::max(d, std::abs(i / na - j / nb));
    }
    double ne = std::sqrt(na * nb / (na + nb));
    return {d, kolmogorov_q((ne + 0.12 + 0.11 / ne) * d)};
}

double binomial_halfwidth(double p, double n, double z) { return z * std::sqrt(p * (1.0 - p) / n); }

}  // namespace rms
