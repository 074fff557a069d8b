#include "rmstable/charfn.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "rmstable/errors.hpp"
#include "rmstable/stable1d.hpp"

namespace rms {

namespace {

const cplx I(0.0, 1.0);

double log_superfactorial(std::size_t n) {  // log prod_{j<n} j!
    double s = 0.0;
    for (std::size_t j = 0; j < n; ++j) s += std::lgamma(static_cast<double>(j) + 1.0);
    return s;
}

cplx i_pow(std::size_t m) {
    static const cplx p[4] = {1.0, I, -1.0, -I};
    return p[m % 4];
}

cplx det_lu(CMatrix a) {
    std::size_t n = a.dim();
    cplx det = 1.0;
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t piv = c;
        for (std::size_t r = c + 1; r < n; ++r)
            if (std::abs(a(r, c)) > std::abs(a(piv, c))) piv = r;
        if (a(piv, c) == 0.0) return 0.0;
        if (piv != c) {
            for (std::size_t k = 0; k < n; ++k) std::swap(a(c, k), a(piv, k));
            det = -det;
        }
        det *= a(c, c);
        for (std::size_t r = c + 1; r < n; ++r) {
            cplx f = a(r, c) / a(c, c);
            for (std::size_t k = c; k < n; ++k) a(r, k) -= f * a(c, k);
        }
    }
    return det;
}

double min_gap(std::span<const double> v) {
    double g = INFINITY;
    for (std::size_t a = 0; a < v.size(); ++a)
        for (std::size_t b = a + 1; b < v.size(); ++b) g = std::min(g, std::abs(v[a] - v[b]));
    return g;
}

double max_abs(std::span<const double> v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

// exp(A) by scaling and squaring with a Taylor core.
CMatrix expm(CMatrix a) {
    std::size_t n = a.dim();
    double nrm = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double row = 0.0;
        for (std::size_t j = 0; j < n; ++j) row += std::abs(a(i, j));
        nrm = std::max(nrm, row);
    }
    int sq = nrm > 0.5 ? static_cast<int>(std::ceil(std::log2(nrm / 0.5))) : 0;
    double f = std::ldexp(1.0, -sq);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) a(i, j) *= f;
    CMatrix r = CMatrix::identity(n), term = CMatrix::identity(n);
    for (int k = 1; k <= 24; ++k) {
        term = term * a;
        for (auto i = 0u; i < n; ++i)
            for (auto j = 0u; j < n; ++j) {
                term(i, j) /= k;
                r(i, j) += term(i, j);
            }
    }
    for (int k = 0; k < sq; ++k) r = r * r;
    return r;
}

// det[exp(i x_j s_k)] / (Delta(x) Delta(s)) for clustered nodes. The matrix of
// divided differences in x and s is the first row of exp(i S (x) T), S and T
// upper bidiagonal with the nodes on the diagonal and ones above.
cplx confluent_ratio(std::vector<double> x, std::vector<double> s) {
    std::size_t n = x.size();
    double xm = std::accumulate(x.begin(), x.end(), 0.0) / n;
    double sm = std::accumulate(s.begin(), s.end(), 0.0) / n;
    for (auto& v : x) v -= xm;
    for (auto& v : s) v -= sm;
    // balancing x -> c x, s -> s/c leaves the ratio unchanged
    double xa = max_abs(x), sa = max_abs(s);
    if (xa > 0.0 && sa > 0.0) {
        double c = std::sqrt(sa / xa);
        for (auto& v : x) v *= c;
        for (auto& v : s) v /= c;
    }
    CMatrix b(n * n);
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t a2 = a; a2 < n && a2 <= a + 1; ++a2) {
            double sv = a == a2 ? s[a] : 1.0;
            for (std::size_t c = 0; c < n; ++c)
                for (std::size_t c2 = c; c2 < n && c2 <= c + 1; ++c2) {
                    double tv = c == c2 ? x[c] : 1.0;
                    b(a * n + c, a2 * n + c2) = I * sv * tv;
                }
        }
    CMatrix e = expm(b);
    CMatrix d(n);
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t k = 0; k < n; ++k) d(j, k) = e(0, k * n + j);
    return std::exp(I * (n * xm * sm)) * det_lu(d);
}

}  // namespace

cplx hciz_kernel(std::span<const double> x, std::span<const double> s) {
    if (x.size() != s.size()) throw ParameterError("hciz_kernel: length mismatch");
    std::size_t n = x.size();
    if (n == 0) throw ParameterError("hciz_kernel: empty input");
    if (n == 1) return std::exp(I * (x[0] * s[0]));
    std::size_t m = n * (n - 1) / 2;
    double pref = std::exp(log_superfactorial(n));
    double scale = max_abs(x) + max_abs(s);
    if (scale == 0.0) return 1.0;
    double tiny = 1e-6 * scale;
    if (min_gap(x) < tiny || min_gap(s) < tiny) {
        return pref * confluent_ratio({x.begin(), x.end()}, {s.begin(), s.end()}) / i_pow(m);
    }
    if (n == 2) {
        cplx det = std::exp(I * (x[0] * s[0] + x[1] * s[1])) - std::exp(I * (x[0] * s[1] + x[1] * s[0]));
        return det / (I * (x[1] - x[0]) * (s[1] - s[0]));
    }
    CMatrix a(n);
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t k = 0; k < n; ++k) a(j, k) = std::exp(I * (x[j] * s[k]));
    return pref * det_lu(a) / (i_pow(m) * vandermonde(x) * vandermonde(s));
}

CNConstant c_n_constant(double alpha, std::size_t n) {
    if (!(alpha > 0.0 && alpha <= 2.0)) throw ParameterError("c_n_constant: alpha must lie in (0,2]");
    if (n == 0) throw ParameterError("c_n_constant: N must be positive");
    double m = static_cast<double>(n * (n - 1) / 2);
    double lv = std::lgamma(alpha + 1.0) + log_superfactorial(n) - std::lgamma(alpha + 1.0 + m);
    return {alpha, n, std::exp(lv)};
}

namespace {

// Permutation sum for distinct s and r.
cplx eig_sum_distinct(double alpha, std::span<const double> s, std::span<const double> r) {
    std::size_t n = s.size();
    int m = static_cast<int>(n * (n - 1) / 2);
    double ds = vandermonde(s);
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    std::vector<double> rp(n);
    cplx main = 0.0;
    double lin = 0.0;
    do {
        double dot = 0.0;
        for (std::size_t a = 0; a < n; ++a) rp[a] = r[perm[a]], dot += s[a] * rp[a];
        double den = ds * vandermonde(rp);
        double pw = std::pow(dot, m);
        main += nu_alpha(alpha, dot) * pw / den;
        lin += pw * dot / den;
    } while (std::next_permutation(perm.begin(), perm.end()));
    cplx v = main;
    if (alpha == 1.0) {
        // limit alpha -> 1 of the alpha != 1 identity picks up the derivative of c_N
        double h = 0.0;
        for (int k = 1; k <= m + 1; ++k) h += 1.0 / k;
        v -= 2.0 / M_PI * I * (h - 1.0) * lin;
    }
    return c_n_constant(alpha, n).value * v;
}

// Sorted copy with near-ties spread by h*scale*k.
std::vector<double> spread(std::span<const double> v, double h, double scale) {
    std::vector<double> w(v.begin(), v.end());
    std::sort(w.begin(), w.end());
    for (std::size_t k = 0; k < w.size(); ++k) w[k] += h * scale * static_cast<double>(k);
    return w;
}

}  // namespace

cplx eig_form_kernel(double alpha, std::span<const double> s, std::span<const double> r) {
    if (s.size() != r.size()) throw ParameterError("eig_form_kernel: length mismatch");
    std::size_t n = s.size();
    if (n > 8) throw CapabilityError("eigenvalue form: N > 8 is not supported");
    if (n == 1) return nu_alpha(alpha, s[0] * r[0]);
    double ss = max_abs(s), rs = max_abs(r);
    if (ss == 0.0 || rs == 0.0) return 0.0;
    // s (or r) a multiple of the identity: Tr U R U^dagger S = s Tr R for every U
    auto spread_of = [](std::span<const double> v) {
        auto [lo, hi] = std::minmax_element(v.begin(), v.end());
        return *hi - *lo;
    };
    if (spread_of(s) <= 1e-12 * ss)
        return nu_alpha(alpha, std::accumulate(s.begin(), s.end(), 0.0) / n * std::accumulate(r.begin(), r.end(), 0.0));
    if (spread_of(r) <= 1e-12 * rs)
        return nu_alpha(alpha, std::accumulate(r.begin(), r.end(), 0.0) / n * std::accumulate(s.begin(), s.end(), 0.0));
    bool tie_s = min_gap(s) < 1e-6 * ss, tie_r = min_gap(r) < 1e-6 * rs;
    if (!tie_s && !tie_r) return eig_sum_distinct(alpha, s, r);

    // Richardson on the spreading width; the kernel is symmetric in s and in r.
    auto at = [&](double h) {
        auto s2 = tie_s ? spread(s, h, ss) : std::vector<double>(s.begin(), s.end());
        auto r2 = tie_r ? spread(r, h, rs) : std::vector<double>(r.begin(), r.end());
        return eig_sum_distinct(alpha, s2, r2);
    };
    double h = 1e-3;
    cplx v1 = at(h), v2 = at(h / 2), v4 = at(h / 4);
    cplx r2 = 2.0 * v2 - v1, r4 = 2.0 * v4 - v2;
    cplx r3 = (4.0 * r4 - r2) / 3.0;
    if (std::abs(r3 - r4) > 1e-6 * (1.0 + std::abs(r3)))
        throw NumericalError("eigenvalue form: confluent extrapolation did not converge");
    return r3;
}

namespace {

double dirac_dot(const EnsembleSpec& spec, double tr) { return tr / std::sqrt(static_cast<double>(spec.dim)); }

ComplexEstimate dirac_exact(const EnsembleSpec& spec, double tr) {
    const auto& d = std::get<DiracIdentity>(spec.measure);
    double u = dirac_dot(spec, tr);
    cplx v = -spec.gamma * (d.p * nu_alpha(spec.alpha, u) + (1.0 - d.p) * nu_alpha(spec.alpha, -u));
    return {v + I * (spec.y0 * tr), 0.0};
}

template <class F>
ComplexEstimate mc_logcf(const EnsembleSpec& spec, std::size_t n_mc, Engine& eng, double shift_tr, F per_draw) {
    if (n_mc == 0) throw ParameterError("n_mc must be positive");
    std::vector<cplx> vals(n_mc);
    for (std::size_t k = 0; k < n_mc; ++k) vals[k] = per_draw(sample_direction(spec.measure, spec.dim, spec.alpha, eng));
    ComplexEstimate e = mean_estimate(vals);
    return {-spec.gamma * e.value + I * (spec.y0 * shift_tr), spec.gamma * e.std_error};
}

}  // namespace

ComplexEstimate log_cf_matrix(const EnsembleSpec& spec, const HermitianMatrix& s, std::size_t n_mc, Engine& eng) {
    spec.validate();
    if (s.dim() != spec.dim) throw ParameterError("log_cf_matrix: dimension mismatch");
    double tr = s.trace();
    if (frobenius_norm(s) == 0.0) return {0.0, 0.0};
    if (std::holds_alternative<DiracIdentity>(spec.measure)) return dirac_exact(spec, tr);
    return mc_logcf(spec, n_mc, eng, tr,
                    [&](const HermitianMatrix& r) { return nu_alpha(spec.alpha, trace_product(s, r)); });
}

ComplexEstimate log_cf_diag_form(const EnsembleSpec& spec, std::span<const double> s, std::size_t n_mc, Engine& eng) {
    spec.validate();
    if (s.size() != spec.dim) throw ParameterError("log_cf_diag_form: dimension mismatch");
    double tr = std::accumulate(s.begin(), s.end(), 0.0);
    if (max_abs(s) == 0.0) return {0.0, 0.0};
    if (std::holds_alternative<DiracIdentity>(spec.measure)) return dirac_exact(spec, tr);
    return mc_logcf(spec, n_mc, eng, tr, [&](const HermitianMatrix& r) {
        double dot = 0.0;
        for (std::size_t a = 0; a < s.size(); ++a) dot += s[a] * r(a, a).real();
        return nu_alpha(spec.alpha, dot);
    });
}

ComplexEstimate log_cf_eig_form(const EnsembleSpec& spec, std::span<const double> s, std::size_t n_mc, Engine& eng) {
    spec.validate();
    if (s.size() != spec.dim) throw ParameterError("log_cf_eig_form: dimension mismatch");
    if (spec.dim > 8) throw CapabilityError("eigenvalue form: N > 8 is not supported");
    double tr = std::accumulate(s.begin(), s.end(), 0.0);
    if (max_abs(s) == 0.0) return {0.0, 0.0};
    if (std::holds_alternative<DiracIdentity>(spec.measure) && spec.dim > 1)
        throw CapabilityError("eigenvalue form: Dirac measure has a degenerate spectrum");
    return mc_logcf(spec, n_mc, eng, tr, [&](const HermitianMatrix& r) {
        return eig_form_kernel(spec.alpha, s, hermitian_eigvals(r));
    });
}

ComplexEstimate rank_one_orbital_logcf(std::span<const double> s, double alpha, double gamma, std::size_t n_mc,
                                       Engine& eng) {
    if (!(alpha > 0.0 && alpha <= 2.0)) throw ParameterError("rank_one_orbital_logcf: alpha must lie in (0,2]");
    std::size_t n = s.size();
    if (n == 0) throw ParameterError("rank_one_orbital_logcf: empty s");
    if (n == 1) return {-gamma * nu_alpha(alpha, s[0]), 0.0};
    if (n == 2) return {-gamma * nu_alpha_linear_mean(alpha, s[1], s[0] - s[1]), 0.0};
    if (n_mc == 0) throw ParameterError("n_mc must be positive");
    std::vector<cplx> vals(n_mc);
    std::vector<double> t(n);
    for (std::size_t k = 0; k < n_mc; ++k) {
        double tot = 0.0;
        for (auto& v : t) v = standard_exponential(eng), tot += v;
        double dot = 0.0;
        for (std::size_t a = 0; a < n; ++a) dot += s[a] * t[a] / tot;
        vals[k] = nu_alpha(alpha, dot);
    }
    ComplexEstimate e = mean_estimate(vals);
    return {-gamma * e.value, gamma * e.std_error};
}

cplx orbital_logcf_n2(const EnsembleSpec& spec, std::span<const double> s) {
    spec.validate();
    const auto* o = std::get_if<Orbital>(&spec.measure);
    if (!o || spec.dim != 2 || s.size() != 2) throw CapabilityError("orbital_logcf_n2: needs an orbital measure at N=2");
    // |U_11|^2 is uniform on (0,1) under Haar at N = 2, so Tr S U X U^dagger is linear in it.
    cplx acc = 0.0;
    for (const auto& orb : o->orbits) {
        const auto& x = orb.spectrum;
        double a = s[0] * x[1] + s[1] * x[0];
        double b = (s[0] - s[1]) * (x[0] - x[1]);
        acc += orb.weight * nu_alpha_linear_mean(spec.alpha, a, b);
    }
    return -spec.gamma * acc + I * (spec.y0 * (s[0] + s[1]));
}

ComplexEstimate empirical_cf_matrix(const SampleBatch& batch, const HermitianMatrix& s) {
    if (batch.size() == 0) throw EstimationError("empirical CF: empty batch");
    if (frobenius_norm(s) == 0.0) return {1.0, 0.0};
    std::vector<cplx> v(batch.size());
    for (std::size_t i = 0; i < batch.size(); ++i) v[i] = std::exp(I * trace_product(batch.matrices[i], s));
    return mean_estimate(v);
}

ComplexEstimate empirical_cf_diag(const SampleBatch& batch, std::span<const double> s) {
    if (batch.size() == 0) throw EstimationError("empirical CF: empty batch");
    if (max_abs(s) == 0.0) return {1.0, 0.0};
    std::vector<cplx> v(batch.size());
    for (std::size_t i = 0; i < batch.size(); ++i) {
        double dot = 0.0;
        for (std::size_t a = 0; a < s.size(); ++a) dot += batch.diagonals[i][a] * s[a];
        v[i] = std::exp(I * dot);
    }
    return mean_estimate(v);
}

ComplexEstimate empirical_spherical_cf(const SampleBatch& batch, std::span<const double> s) {
    if (batch.size() == 0) throw EstimationError("empirical CF: empty batch");
    if (max_abs(s) == 0.0) return {1.0, 0.0};
    std::vector<cplx> v(batch.size());
    for (std::size_t i = 0; i < batch.size(); ++i) v[i] = hciz_kernel(batch.eigenvalues[i], s);
    return mean_estimate(v);
}

DpResidual derivative_principle_residual(const SampleBatch& batch, const std::vector<std::vector<double>>& grid) {
    if (batch.size() == 0) throw EstimationError("derivative principle: empty batch");
    DpResidual out;
    for (const auto& s : grid) {
        if (s.size() != batch.dim) throw ParameterError("derivative principle: grid point dimension mismatch");
        std::vector<cplx> sph(batch.size()), dia(batch.size()), diff(batch.size());
        for (std::size_t i = 0; i < batch.size(); ++i) {
            double dot = 0.0;
            for (std::size_t a = 0; a < s.size(); ++a) dot += batch.diagonals[i][a] * s[a];
            sph[i] = hciz_kernel(batch.eigenvalues[i], s);
            dia[i] = std::exp(I * dot);
            diff[i] = sph[i] - dia[i];
        }
        DpPoint p;
        p.s = s;
        p.spherical = mean_estimate(sph).value;
        p.diagonal = mean_estimate(dia).value;
        ComplexEstimate d = mean_estimate(diff);
        p.residual = std::abs(d.value);
        p.std_error = d.std_error;
        out.max_residual = std::max(out.max_residual, p.residual);
        out.points.push_back(std::move(p));
    }
    return out;
}

}  // namespace rms
