#include "rmstable/limits.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "rmstable/charfn.hpp"
#include "rmstable/errors.hpp"
#include "rmstable/parallel.hpp"

namespace rms {

namespace {

const std::complex<double> I(0.0, 1.0);

void check_grid(const std::vector<double>& r_grid) {
    if (r_grid.empty()) throw ParameterError("R grid is empty");
    for (double r : r_grid)
        if (!(r > 0.0)) throw ParameterError("R grid values must be positive");
}

}  // namespace

TailRatioEstimate tail_ratio(std::span<const double> norms, double k, const std::vector<double>& r_grid) {
    if (!(k > 0.0)) throw ParameterError("tail_ratio: k must be positive");
    check_grid(r_grid);
    std::vector<double> sorted(norms.begin(), norms.end());
    std::sort(sorted.begin(), sorted.end());
    auto above = [&](double x) {
        return static_cast<std::size_t>(sorted.end() - std::upper_bound(sorted.begin(), sorted.end(), x));
    };
    TailRatioEstimate t;
    t.k = k;
    t.r_grid = r_grid;
    bool any = false;
    for (double r : r_grid) {
        std::size_t c = above(r), ck = above(k * r);
        t.counts.push_back(c);
        bool m = c < kMinExceedances;
        t.masked.push_back(m);
        t.ratios.push_back(c > 0 ? static_cast<double>(ck) / static_cast<double>(c) : 0.0);
        any = any || !m;
    }
    if (!any) throw EstimationError("tail_ratio: no grid point has enough exceedances");
    return t;
}

std::optional<std::size_t> last_unmasked(const TailRatioEstimate& t) {
    for (std::size_t i = t.masked.size(); i-- > 0;)
        if (!t.masked[i]) return i;
    return std::nullopt;
}

TailRatioEstimate angular_tail_functional(const SampleBatch& batch,
                                          const std::function<double(const HermitianMatrix&)>& phi, double phi_bound,
                                          double k, const std::vector<double>& r_grid) {
    if (!(k > 0.0)) throw ParameterError("angular_tail_functional: k must be positive");
    check_grid(r_grid);
    std::vector<double> norms = batch.norms();
    std::vector<double> vals(batch.size());
    for (std::size_t i = 0; i < batch.size(); ++i) {
        if (norms[i] == 0.0) continue;
        vals[i] = phi((1.0 / norms[i]) * batch.matrices[i]);
        if (std::abs(vals[i]) > phi_bound) throw ParameterError("angular_tail_functional: phi exceeds its bound");
    }
    TailRatioEstimate t;
    t.k = k;
    t.r_grid = r_grid;
    bool any = false;
    for (double r : r_grid) {
        std::size_t c = 0;
        double num = 0.0;
        for (std::size_t i = 0; i < norms.size(); ++i) {
            if (norms[i] > r) ++c;
            if (norms[i] > k * r) num += vals[i];
        }
        t.counts.push_back(c);
        bool m = c < kMinExceedances;
        t.masked.push_back(m);
        t.ratios.push_back(c > 0 ? num / static_cast<double>(c) : 0.0);
        any = any || !m;
    }
    if (!any) throw EstimationError("angular_tail_functional: no grid point has enough exceedances");
    return t;
}

HillEstimate hill_estimator(std::span<const double> norms, std::size_t k_order) {
    std::size_t n = norms.size();
    if (k_order < 10 || 2 * k_order > n) throw ParameterError("hill_estimator: k_order must lie in [10, n/2]");
    std::vector<double> x(norms.begin(), norms.end());
    for (double v : x)
        if (!(v > 0.0)) throw ParameterError("hill_estimator: norms must be positive");
    std::sort(x.begin(), x.end(), std::greater<>());
    double thr = std::log(x[k_order]), s = 0.0;
    for (std::size_t i = 0; i < k_order; ++i) s += std::log(x[i]) - thr;
    if (s == 0.0) throw EstimationError("hill_estimator: zero log-spacings");
    double a = static_cast<double>(k_order) / s;
    return {k_order, a, 1.96 * a / std::sqrt(static_cast<double>(k_order))};
}

ConvergenceCurve clt_experiment(const BatchSource& source, const TargetLogCf& target, const CltSetup& setup,
                                const Stream& stream) {
    double alpha = setup.alpha;
    if (!(alpha > 0.0 && alpha <= 2.0)) throw ParameterError("clt_experiment: alpha must lie in (0,2]");
    if (setup.shift == ShiftRule::mean && alpha <= 1.0)
        throw ParameterError("clt_experiment: mean-based shift requires alpha > 1");
    if (setup.n < 2) throw ParameterError("clt_experiment: n must be at least 2");
    if (setup.s_grid.empty()) throw ParameterError("clt_experiment: empty s grid");
    if (setup.b && !(*setup.b > 0.0)) throw ParameterError("clt_experiment: b must be positive");
    const bool cancel = !setup.b.has_value();
    double b = setup.b.value_or(1.0);

    double mu = 0.0;
    std::size_t dim = 0;
    if (setup.shift == ShiftRule::mean) {
        SampleBatch pilot = source(setup.n, stream.child("pilot"));
        auto tr = pilot.traces();
        mu = std::accumulate(tr.begin(), tr.end(), 0.0) / static_cast<double>(tr.size()) /
             static_cast<double>(pilot.dim);
    }

    std::complex<double> t0 = 0.0;
    if (cancel) {
        if (setup.s0.empty()) throw ParameterError("clt_experiment: scale-cancelled mode needs s0");
        t0 = target(setup.s0);
        if (std::abs(t0) == 0.0) throw ParameterError("clt_experiment: target log-CF vanishes at s0");
    }

    ConvergenceCurve curve;
    const std::size_t n = setup.n;
    for (std::size_t m : setup.m_schedule) {
        if (m == 0) throw ParameterError("clt_experiment: m must be positive");
        Stream sm = stream.child("m").child(static_cast<std::uint64_t>(m));
        // acc holds the diagonal of each sum, or its eigenvalues when spherical
        std::vector<std::vector<double>> acc;
        std::vector<HermitianMatrix> full;
        for (std::size_t j = 0; j < m; ++j) {
            SampleBatch bj = source(n, sm.child(static_cast<std::uint64_t>(j)));
            if (bj.size() != n) throw ParameterError("clt_experiment: source returned wrong batch size");
            if (acc.empty()) {
                dim = bj.dim;
                acc.assign(n, std::vector<double>(dim, 0.0));
                if (setup.spherical) full.assign(n, HermitianMatrix(dim));
            }
            for (std::size_t i = 0; i < n; ++i) {
                if (setup.spherical) full[i] += bj.matrices[i];
                else
                    for (std::size_t a = 0; a < dim; ++a) acc[i][a] += bj.diagonals[i][a];
            }
        }
        if (setup.spherical) parallel_for(n, [&](std::size_t i) { acc[i] = hermitian_eigvals(full[i]); });
        double bm = std::pow(static_cast<double>(m), 1.0 / alpha) * b;
        double am = setup.shift == ShiftRule::mean ? std::pow(static_cast<double>(m), 1.0 - 1.0 / alpha) * mu / b : 0.0;
        for (auto& d : acc)
            for (auto& v : d) v = v / bm - am;

        auto phases = [&](std::span<const double> s) {
            if (s.size() != dim) throw ParameterError("clt_experiment: grid point dimension mismatch");
            std::vector<std::complex<double>> e(n);
            parallel_for(n, [&](std::size_t i) {
                if (setup.spherical) {
                    e[i] = hciz_kernel(acc[i], s);
                    return;
                }
                double dot = 0.0;
                for (std::size_t a = 0; a < dim; ++a) dot += s[a] * acc[i][a];
                e[i] = std::exp(I * dot);
            });
            return e;
        };

        std::vector<std::complex<double>> e0;
        std::complex<double> phi0, l0;
        if (cancel) {
            e0 = phases(setup.s0);
            phi0 = mean_estimate(e0).value;
            l0 = std::log(phi0);
        }
        double best = -1.0, best_se = 0.0;
        std::size_t best_i = 0;
        for (std::size_t g = 0; g < setup.s_grid.size(); ++g) {
            const auto& s = setup.s_grid[g];
            auto e = phases(s);
            ComplexEstimate phi = mean_estimate(e);
            double dist, se;
            if (!cancel) {
                dist = std::abs(phi.value - std::exp(target(s)));
                se = phi.std_error;
            } else {
                std::complex<double> ls = std::log(phi.value);
                dist = std::abs(ls / l0 - target(s) / t0);
                // delta method on per-sum influence values
                std::vector<std::complex<double>> z(n);
                for (std::size_t i = 0; i < n; ++i)
                    z[i] = e[i] / (phi.value * l0) - ls * e0[i] / (phi0 * l0 * l0);
                se = mean_estimate(z).std_error;
            }
            if (dist > best) best = dist, best_se = se, best_i = g;
        }
        curve.m_schedule.push_back(m);
        curve.distances.push_back(best);
        curve.std_errors.push_back(best_se);
        curve.argmax.push_back(best_i);
    }
    return curve;
}

bool nonincreasing_within(const ConvergenceCurve& c, double z) {
    for (std::size_t i = 0; i + 1 < c.distances.size(); ++i) {
        double tol = z * std::hypot(c.std_errors[i], c.std_errors[i + 1]);
        if (c.distances[i + 1] > c.distances[i] + tol) return false;
    }
    return true;
}

std::vector<StrictResidual> strict_doa_check_alpha1(const SampleBatch& batch, const std::vector<double>& r_grid) {
    if (batch.size() == 0) throw EstimationError("strict_doa_check: empty batch");
    check_grid(r_grid);
    std::size_t n = batch.size(), dim = batch.dim, ne = dim * dim;
    double nd = static_cast<double>(n);
    std::vector<double> norms = batch.norms();
    std::vector<StrictResidual> out;
    for (double r : r_grid) {
        StrictResidual sr;
        sr.r = r;
        std::vector<std::complex<double>> s1(ne), s2(ne);
        double tr = 0.0;
        std::size_t exceed = 0;
        for (std::size_t i = 0; i < n; ++i) {
            if (norms[i] > r) ++exceed;
            if (!(norms[i] < r)) continue;
            const auto& d = batch.matrices[i].data();
            for (std::size_t e = 0; e < ne; ++e) {
                s1[e] += d[e];
                s2[e] += std::complex<double>(d[e].real() * d[e].real(), d[e].imag() * d[e].imag());
            }
            tr += batch.matrices[i].trace();
        }
        if (exceed == 0) {
            sr.masked = true;
            out.push_back(sr);
            continue;
        }
        double den = r * static_cast<double>(exceed) / nd;
        double fro = 0.0, var = 0.0;
        for (std::size_t e = 0; e < ne; ++e) {
            std::complex<double> m = s1[e] / nd;
            fro += std::norm(m);
            var += std::max(s2[e].real() / nd - m.real() * m.real(), 0.0) +
                   std::max(s2[e].imag() / nd - m.imag() * m.imag(), 0.0);
        }
        sr.residual = std::sqrt(fro) / den;
        sr.std_error = std::sqrt(var / nd) / den;
        sr.residual_invariant = std::abs(tr / nd) / std::sqrt(static_cast<double>(dim)) / den;
        out.push_back(sr);
    }
    return out;
}

std::vector<StrictResidual> strict_doa_check_alpha1_eig(const std::vector<std::vector<double>>& eigs,
                                                        const std::vector<double>& r_grid) {
    if (eigs.empty()) throw EstimationError("strict_doa_check: empty batch");
    check_grid(r_grid);
    double nd = static_cast<double>(eigs.size()), dim = static_cast<double>(eigs[0].size());
    std::vector<StrictResidual> out;
    for (double r : r_grid) {
        StrictResidual sr;
        sr.r = r;
        std::vector<double> mean(eigs[0].size(), 0.0);
        std::size_t exceed = 0;
        for (const auto& x : eigs) {
            double nrm = std::sqrt(std::inner_product(x.begin(), x.end(), x.begin(), 0.0));
            if (nrm > r) ++exceed;
            if (!(nrm < r)) continue;
            for (std::size_t a = 0; a < x.size(); ++a) mean[a] += x[a];
        }
        if (exceed == 0) {
            sr.masked = true;
            out.push_back(sr);
            continue;
        }
        double den = r * static_cast<double>(exceed) / nd;
        // permutation symmetrisation replaces the mean vector by (sum/N) 1_N
        double tot = std::accumulate(mean.begin(), mean.end(), 0.0) / nd;
        sr.residual_invariant = std::abs(tot) / std::sqrt(dim) / den;
        sr.residual = sr.residual_invariant;
        out.push_back(sr);
    }
    return out;
}

GaussianDoa gaussian_doa_check(const SampleBatch& batch, const HermitianMatrix& s, const HermitianMatrix& t,
                               const std::vector<double>& r_grid) {
    if (batch.size() == 0) throw EstimationError("gaussian_doa_check: empty batch");
    if (frobenius_norm(s) == 0.0 || frobenius_norm(t) == 0.0)
        throw ParameterError("gaussian_doa_check: S and T must be nonzero");
    check_grid(r_grid);
    std::vector<double> norms = batch.norms();
    std::vector<double> ps(batch.size()), pt(batch.size());
    for (std::size_t i = 0; i < batch.size(); ++i) {
        ps[i] = trace_product(s, batch.matrices[i]);
        pt[i] = trace_product(t, batch.matrices[i]);
    }
    GaussianDoa g;
    for (double r : r_grid) {
        double tail = 0.0, inner = 0.0, qs = 0.0, qt = 0.0;
        for (std::size_t i = 0; i < norms.size(); ++i) {
            if (norms[i] > r) tail += 1.0;
            if (norms[i] < r) {
                inner += norms[i] * norms[i];
                qs += ps[i] * ps[i];
                qt += pt[i] * pt[i];
            }
        }
        bool m = inner == 0.0 || qs == 0.0;
        g.masked.push_back(m);
        g.cond1.push_back(m ? 0.0 : r * r * tail / inner);
        g.cond2.push_back(m ? 0.0 : qt / qs);
    }
    return g;
}

std::vector<MomentScanEntry> moment_scan(std::span<const double> norms, const std::vector<double>& exponents) {
    std::size_t n = norms.size();
    if (n < 2) throw EstimationError("moment_scan: need at least two draws");
    for (double m : exponents)
        if (!(m > 0.0)) throw ParameterError("moment_scan: exponents must be positive");

    double hill_norm = INFINITY;
    std::size_t k = static_cast<std::size_t>(std::sqrt(static_cast<double>(n)));
    if (k >= 10 && 2 * k <= n) {
        try {
            hill_norm = hill_estimator(norms, k).alpha_hat;
        } catch (const EstimationError&) {
        }
    }

    std::vector<MomentScanEntry> out;
    for (double m : exponents) {
        MomentScanEntry e;
        e.m = m;
        std::vector<double> y(n);
        for (std::size_t i = 0; i < n; ++i) y[i] = std::pow(norms[i], m);

        for (std::size_t p : {n / 8, n / 4, n / 2, n}) {
            if (p == 0 || (!e.prefixes.empty() && e.prefixes.back() == p)) continue;
            e.prefixes.push_back(p);
            e.partial_means.push_back(std::accumulate(y.begin(), y.begin() + p, 0.0) / static_cast<double>(p));
        }
        Estimate full = mean_estimate(y);
        double half = std::accumulate(y.begin(), y.begin() + n / 2, 0.0) / static_cast<double>(n / 2);
        e.doubling_z = full.std_error > 0.0 ? std::abs(full.value - half) / full.std_error : 0.0;

        // median block mean grows like b^{m/alpha - 1} when the mean is infinite
        std::vector<double> lx, ly;
        for (std::size_t b = 10; n / b >= 10; b *= 10) {
            std::size_t nb = n / b;
            std::vector<double> bm(nb);
            for (std::size_t j = 0; j < nb; ++j)
                bm[j] = std::accumulate(y.begin() + j * b, y.begin() + (j + 1) * b, 0.0) / static_cast<double>(b);
            std::nth_element(bm.begin(), bm.begin() + nb / 2, bm.end());
            double med = bm[nb / 2];
            if (med > 0.0) {
                lx.push_back(std::log(static_cast<double>(b)));
                ly.push_back(std::log(med));
            }
        }
        if (lx.size() >= 2) {
            double mx = std::accumulate(lx.begin(), lx.end(), 0.0) / lx.size();
            double my = std::accumulate(ly.begin(), ly.end(), 0.0) / ly.size();
            double sxy = 0.0, sxx = 0.0;
            for (std::size_t i = 0; i < lx.size(); ++i) {
                sxy += (lx[i] - mx) * (ly[i] - my);
                sxx += (lx[i] - mx) * (lx[i] - mx);
            }
            e.growth_slope = sxy / sxx;
        }
        e.hill_index = hill_norm / m;
        e.diverging = e.growth_slope > 0.1 && e.hill_index < 1.0;
        out.push_back(std::move(e));
    }
    return out;
}

std::vector<MomentScanEntry> moment_scan(const SampleBatch& batch, const std::vector<double>& exponents) {
    auto norms = batch.norms();
    return moment_scan(norms, exponents);
}

DyadicRatio dyadic_counterexample_ratio(double k, int j_max) {
    if (!(k > 0.0)) throw ParameterError("dyadic_counterexample_ratio: k must be positive");
    if (j_max < 10) throw ParameterError("dyadic_counterexample_ratio: j_max must be at least 10");
    // P(X >= x) = 2^{1 - i0}, i0 the smallest i >= 1 with 2^i >= x
    auto tail = [](double x) {
        int i0 = 1;
        while (std::ldexp(1.0, i0) < x) ++i0;
        return std::ldexp(1.0, 1 - i0);
    };
    DyadicRatio d;
    for (int j = 1; j <= j_max; ++j) {
        double r = std::ldexp(1.0, j);
        d.ratios.push_back(tail(k * r) / tail(r));
    }
    d.empirical_limit = d.ratios.back();
    d.stable_target = 1.0 / k;
    return d;
}

SampleBatch sample_dyadic_batch(std::size_t n_dim, std::size_t n, const Stream& stream) {
    if (n_dim == 0) throw ParameterError("sample_dyadic_batch: N must be positive");
    std::vector<HermitianMatrix> ms(n);
    double rn = std::sqrt(static_cast<double>(n_dim));
    parallel_for(n, [&](std::size_t i) {
        Engine eng = stream.engine(i);
        double j = std::ceil(-std::log2(uniform_open(eng)));
        HermitianMatrix h(n_dim);
        h.shift(std::ldexp(1.0, static_cast<int>(j)) / rn);
        ms[i] = std::move(h);
    });
    return SampleBatch::from_matrices(n_dim, std::move(ms), "dyadic", stream.key(), false);
}

}  // namespace rms
