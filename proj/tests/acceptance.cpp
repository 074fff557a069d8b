// Acceptance runner: one PASS/FAIL line per criterion. Criteria 1-13 are run
// with 4 worker threads, then again with 1; criterion 14 compares the two runs.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include "rmstable/charfn.hpp"
#include "rmstable/ensembles.hpp"
#include "rmstable/io.hpp"
#include "rmstable/limits.hpp"
#include "rmstable/parallel.hpp"
#include "rmstable/spectral.hpp"
#include "rmstable/stable1d.hpp"
#include "rmstable/stats.hpp"

using namespace rms;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;
    std::string canon;  // every statistic the criterion computed, 17 digits

    void note(double x) { canon += fmt17(x) + ","; }
    void note(std::complex<double> z) { note(z.real()), note(z.imag()); }
    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            if (!detail.empty()) detail += "; ";
            detail += "failed: " + what;
        }
    }
};

std::string f6(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.4g", x);
    return buf;
}

HermitianMatrix herm2(double a, double d, double re, double im) {
    HermitianMatrix h(2);
    h.set(0, 0, a);
    h.set(1, 1, d);
    h.set(0, 1, {re, im});
    return h;
}

const Stream kRoot(20240611);

// 1. HCIZ kernel against a Haar Monte Carlo average.
Outcome hciz_oracle() {
    Outcome o;
    Stream st = kRoot.child("hciz");
    double worst = 0.0, k0 = 0.0;
    for (std::size_t n : {2, 3}) {
        for (std::uint64_t c = 0; c < 5; ++c) {
            Engine eng = st.child(n).engine(c);
            std::vector<double> x(n), s(n), zero(n, 0.0);
            for (auto& v : x) v = 3.0 * uniform_open(eng) - 1.5;
            for (auto& v : s) v = 3.0 * uniform_open(eng) - 1.5;
            std::complex<double> k = hciz_kernel(x, s);
            std::vector<std::complex<double>> z(100000);
            HermitianMatrix sd = HermitianMatrix::diagonal(s);
            Stream mc = st.child(n).child(c);
            parallel_for(z.size(), [&](std::size_t i) {
                Engine e = mc.engine(i);
                UnitaryMatrix u = sample_haar_unitary(n, e);
                z[i] = std::exp(std::complex<double>(0.0, trace_product(conjugate_diag(u, x), sd)));
            });
            ComplexEstimate m = mean_estimate(z);
            double ratio = std::abs(k - m.value) / m.std_error;
            worst = std::max(worst, ratio);
            k0 = std::max(k0, std::abs(hciz_kernel(x, zero) - 1.0));
            o.note(k), o.note(m.value), o.note(m.std_error);
        }
    }
    o.require(worst <= 4.0, "kernel vs Haar average beyond 4 stderr");
    o.require(k0 <= 1e-12, "K(x,0) != 1");
    o.detail = "max |K - MC|/stderr = " + f6(worst) + ", max |K(x,0)-1| = " + f6(k0) +
               (o.detail.empty() ? "" : "; " + o.detail);
    return o;
}

// 2. Spherical vs diagonal empirical CF on invariant batches.
Outcome derivative_principle() {
    Outcome o;
    const std::vector<std::vector<double>> grid{{0.5, 0.0},  {0.0, 1.0},  {1.0, 1.0},   {-1.0, 0.5}, {1.5, 0.0},
                                                {0.3, -1.2}, {-1.4, -1.4}, {2.0, 0.0}, {0.8, 0.8}};
    Stream st = kRoot.child("dp");
    std::vector<std::pair<std::string, SampleBatch>> batches;
    batches.emplace_back("gue", sample_gue_batch(2, 100000, st.child("gue")));
    batches.emplace_back("elliptical", sample_elliptical_stable(1.0, 0.5, 1.5, 0.0, 2, 100000, st.child("ell")));
    for (const auto& [name, b] : batches) {
        DpResidual r = derivative_principle_residual(b, grid);
        double worst = 0.0;
        for (const auto& p : r.points) {
            double thr = std::max(0.02, 4.0 * p.std_error);
            worst = std::max(worst, p.residual / thr);
            o.note(p.residual), o.note(p.std_error);
        }
        o.require(worst <= 1.0, name);
        o.detail += name + " max residual " + f6(r.max_residual) + " (worst/threshold " + f6(worst) + ") ";
    }
    return o;
}

// 3. Empirical matrix CF of the elliptical sampler with kappa = 0.
Outcome isotropic_cf() {
    Outcome o;
    const std::vector<HermitianMatrix> grid{herm2(0.5, 0.0, 0.0, 0.0), herm2(0.3, -0.4, 0.2, 0.1),
                                            herm2(0.0, 0.0, 0.5, -0.5), herm2(1.0, 1.0, 0.0, 0.0),
                                            herm2(-0.6, 0.2, 0.3, 0.4), herm2(1.2, -0.7, -0.2, 0.6)};
    double worst = 0.0;
    for (double a : {0.75, 1.0, 1.5}) {
        SampleBatch b = sample_elliptical_stable(1.0, 0.0, a, 0.0, 2, 100000, kRoot.child("iso").child(fmt17(a)));
        for (const auto& s : grid) {
            double q = trace_product(s, s) / a;
            double target = std::exp(-std::pow(q, a / 2.0));
            ComplexEstimate e = empirical_cf_matrix(b, s);
            worst = std::max(worst, std::abs(e.value - target) / e.std_error);
            o.note(e.value), o.note(e.std_error);
        }
    }
    o.require(worst <= 4.0, "empirical CF beyond 4 stderr");
    o.detail = "max |phi_hat - exp(-q^{a/2})|/stderr = " + f6(worst) + (o.detail.empty() ? "" : "; " + o.detail);
    return o;
}

// 4. (Y1 + Y2)/2^{1/alpha} has the law of Y for the exact samplers.
Outcome strict_stability() {
    Outcome o;
    const std::size_t n = 10000;
    using Sampler = std::function<SampleBatch(const Stream&)>;
    std::vector<std::tuple<std::string, double, Sampler>> cases;
    for (double a : {0.75, 1.5, 2.0}) {
        cases.emplace_back("elliptical a=" + f6(a), a,
                           [a, n](const Stream& s) { return sample_elliptical_stable(1.0, 0.4, a, 0.0, 2, n, s); });
        cases.emplace_back("dirac a=" + f6(a), a,
                           [a, n](const Stream& s) { return sample_dirac_stable(a, 1.0, 0.9, 0.0, 2, n, s); });
    }
    cases.emplace_back("gue", 2.0, [n](const Stream& s) { return sample_gue_batch(2, n, s); });
    cases.emplace_back("gaussian", 2.0,
                       [n](const Stream& s) { return sample_gaussian_invariant(0.8, 0.3, 2, n, s); });
    double min_p = 1.0;
    std::string which;
    for (const auto& [name, a, sampler] : cases) {
        Stream st = kRoot.child("strict").child(name);
        std::vector<SampleBatch> pair{sampler(st.child("y1")), sampler(st.child("y2"))};
        SampleBatch sum = sum_scaled(pair, std::pow(2.0, 1.0 / a), 0.0);
        SampleBatch fresh = sampler(st.child("fresh"));
        for (int stat = 0; stat < 2; ++stat) {
            auto x = stat == 0 ? sum.traces() : sum.largest_eigenvalues();
            auto y = stat == 0 ? fresh.traces() : fresh.largest_eigenvalues();
            KsResult ks = ks_two_sample(x, y);
            o.note(ks.statistic), o.note(ks.p_value);
            if (ks.p_value < min_p) min_p = ks.p_value, which = name + (stat ? " lambda_max" : " trace");
            o.require(ks.p_value > 0.01, name + (stat ? " lambda_max" : " trace"));
        }
    }
    o.detail = "min KS p = " + f6(min_p) + " (" + which + ")" + (o.detail.empty() ? "" : "; " + o.detail);
    return o;
}

// 5. Matrix, diagonal and eigenvalue forms of the log-CF agree.
Outcome three_forms() {
    Outcome o;
    const std::vector<std::vector<double>> grid{{0.7, -0.3}, {1.0, 0.5}, {-0.4, 1.2}, {1.5, -1.5}, {0.8, 0.8}};
    double worst = 0.0;
    Stream st = kRoot.child("forms");
    for (double a : {0.5, 1.0, 1.5}) {
        for (int w = 0; w < 2; ++w) {
            EnsembleSpec spec;
            spec.alpha = a;
            spec.dim = 2;
            if (w == 1) spec.measure = Orbital::from_spectra({{{1.0, -1.0}, 1.0}});
            for (std::size_t g = 0; g < grid.size(); ++g) {
                Stream sg = st.child(fmt17(a)).child(static_cast<std::uint64_t>(w)).child(g);
                Engine e1 = sg.engine(0), e2 = sg.engine(1), e3 = sg.engine(2);
                ComplexEstimate v[3] = {log_cf_matrix(spec, HermitianMatrix::diagonal(grid[g]), 100000, e1),
                                        log_cf_diag_form(spec, grid[g], 100000, e2),
                                        log_cf_eig_form(spec, grid[g], 100000, e3)};
                for (int i = 0; i < 3; ++i) {
                    o.note(v[i].value), o.note(v[i].std_error);
                    for (int j = i + 1; j < 3; ++j) {
                        // 1e-6 absolute floor: at S = cI a traceless orbit gives nu(0 + roundoff)
                        double se = std::hypot(v[i].std_error, v[j].std_error);
                        double z = std::max(std::abs(v[i].value - v[j].value) - 1e-6, 0.0) / std::max(se, 1e-300);
                        worst = std::max(worst, z);
                    }
                }
            }
        }
    }
    o.require(worst <= 4.0, "forms disagree beyond 4 combined stderr");

    // c_N at N = 2 is 1/(alpha+1); the eigenvalue kernel, which carries c_N, is
    // compared with a direct Haar average.
    double cn_err = 0.0, kz = 0.0;
    for (double a : {0.5, 1.0, 1.5}) {
        cn_err = std::max(cn_err, std::abs(c_n_constant(a, 2).value - 1.0 / (a + 1.0)));
        std::vector<double> s{0.9, -0.2}, r{0.6, -0.8};
        std::complex<double> k = eig_form_kernel(a, s, r);
        std::vector<std::complex<double>> z(100000);
        Stream mc = st.child("cn").child(fmt17(a));
        HermitianMatrix sd = HermitianMatrix::diagonal(s);
        parallel_for(z.size(), [&](std::size_t i) {
            Engine e = mc.engine(i);
            z[i] = nu_alpha(a, trace_product(conjugate_diag(sample_haar_unitary(2, e), r), sd));
        });
        ComplexEstimate m = mean_estimate(z);
        kz = std::max(kz, std::abs(k - m.value) / m.std_error);
        o.note(k), o.note(m.value);
    }
    o.require(cn_err <= 1e-14, "c_N(alpha,2) != 1/(alpha+1)");
    o.require(kz <= 4.0, "eigenvalue kernel vs Haar average");
    o.detail = "max pairwise z = " + f6(worst) + ", c_N error " + f6(cn_err) + ", kernel z " + f6(kz) +
               (o.detail.empty() ? "" : "; " + o.detail);
    return o;
}

// 6. Trace of the Dirac ensemble is univariate stable with beta = 2p - 1.
Outcome dirac_ensemble() {
    Outcome o;
    double min_p = 1.0, worst_cf = 0.0;
    for (double p : {0.5, 0.9}) {
        for (double a : {0.8, 1.0, 1.6}) {
            Stream st = kRoot.child("dirac").child(fmt17(p)).child(fmt17(a));
            SampleBatch b = sample_dirac_stable(a, 1.0, p, 0.0, 2, 10000, st.child("batch"));
            std::vector<double> t = b.traces();
            for (auto& v : t) v /= std::sqrt(2.0);
            StableParams1D sp = dirac_weight_to_params(p, a, 1.0);
            std::vector<double> ref(10000);
            Stream rs = st.child("cms");
            parallel_for(ref.size(), [&](std::size_t i) {
                Engine e = rs.engine(i);
                ref[i] = sample_stable_1d(sp, e);
            });
            KsResult ks = ks_two_sample(t, ref);
            min_p = std::min(min_p, ks.p_value);
            o.note(ks.statistic), o.note(ks.p_value);
            o.require(ks.p_value > 0.01, "KS p=" + fmt17(p) + " a=" + fmt17(a));

            EnsembleSpec spec;
            spec.alpha = a;
            spec.dim = 2;
            spec.measure = DiracIdentity{p};
            for (std::vector<double> s : {std::vector<double>{0.5, 0.2}, {-0.7, 0.1}, {1.0, 1.0}}) {
                Engine e = st.engine(0);
                std::complex<double> target = std::exp(log_cf_diag_form(spec, s, 1, e).value);
                ComplexEstimate emp = empirical_cf_matrix(b, HermitianMatrix::diagonal(s));
                worst_cf = std::max(worst_cf, std::abs(emp.value - target) / emp.std_error);
                o.note(emp.value);
            }
        }
    }
    o.require(worst_cf <= 4.0, "empirical CF vs closed form");
    o.detail = "min KS p = " + f6(min_p) + ", max CF z = " + f6(worst_cf) + (o.detail.empty() ? "" : "; " + o.detail);
    return o;
}

// 7. Orbit mixture CF equals the composition of its single-orbit components.
Outcome orbit_mixture() {
    Outcome o;
    const std::vector<std::vector<double>> spectra{{1.0, -1.0}, {2.0, 1.0}};
    const std::vector<double> w{0.3, 0.7};
    const std::vector<std::vector<double>> grid{{0.7, -0.3}, {1.0, 0.5}, {-0.4, 1.2}, {2.0, -1.0}, {0.6, 0.6}};
    double worst = 0.0;
    for (double a : {1.5, 1.0}) {
        EnsembleSpec mix;
        mix.alpha = a;
        mix.dim = 2;
        mix.measure = Orbital::from_spectra({{spectra[0], w[0]}, {spectra[1], w[1]}});
        for (const auto& s : grid) {
            std::complex<double> lhs = orbital_logcf_n2(mix, s), rhs = 0.0;
            for (std::size_t j = 0; j < 2; ++j) {
                EnsembleSpec comp = mix;
                comp.measure = Orbital::from_spectra({{spectra[j], 1.0}});
                double scale = std::pow(w[j], 1.0 / a);
                std::vector<double> ss{s[0] * scale, s[1] * scale};
                rhs += orbital_logcf_n2(comp, ss);
                if (a == 1.0) {
                    double trx = (spectra[j][0] + spectra[j][1]) / std::hypot(spectra[j][0], spectra[j][1]);
                    double shift = 2.0 / (std::numbers::pi * 2.0) * w[j] * std::log(w[j]) * trx;
                    rhs += std::complex<double>(0.0, shift * (s[0] + s[1]));
                }
            }
            worst = std::max(worst, std::abs(lhs - rhs));
            o.note(lhs), o.note(rhs);
        }
    }
    o.require(worst <= 1e-6, "mixture vs composed components");
    o.detail = "max |difference| = " + f6(worst) + (o.detail.empty() ? "" : "; " + o.detail);
    return o;
}

// 8. Tail ratio of Pareto-radial norms.
Outcome tail_ratio_check() {
    Outcome o;
    const std::vector<double> r_grid{1, 2, 4, 8, 16, 32, 64, 128, 256, 512, 1024, 2048, 4096, 8192};
    for (double a : {0.8, 1.5}) {
        SampleBatch b = sample_doa_pareto(Isotropic{}, a, 2, 100000, kRoot.child("tail").child(fmt17(a)));
        auto norms = b.norms();
        TailRatioEstimate t = tail_ratio(norms, 2.0, r_grid);
        auto last = last_unmasked(t);
        if (!last) {
            o.require(false, "all R masked");
            continue;
        }
        double target = std::pow(2.0, -a);
        double hw = binomial_halfwidth(target, static_cast<double>(t.counts[*last]), 2.576);
        double est = t.ratios[*last];
        o.note(est), o.note(hw);
        o.require(std::abs(est - target) <= hw, "alpha=" + f6(a));
        o.detail += "a=" + f6(a) + ": R=" + f6(t.r_grid[*last]) + " ratio " + f6(est) + " vs " + f6(target) + " +- " +
                    f6(hw) + " ";
    }
    return o;
}

// 9. Hill index of elliptical stable norms.
Outcome hill_index() {
    Outcome o;
    SampleBatch b = sample_elliptical_stable(1.0, 0.3, 1.2, 0.0, 2, 100000, kRoot.child("hill"));
    auto norms = b.norms();
    HillEstimate h = hill_estimator(norms, 1000);
    o.note(h.alpha_hat);
    o.require(h.alpha_hat >= 1.05 && h.alpha_hat <= 1.35, "alpha_hat outside [1.05, 1.35]");
    o.detail = "alpha_hat = " + f6(h.alpha_hat) + (o.detail.empty() ? "" : "; " + o.detail);
    return o;
}

// 10. Generalised CLT for a Pareto-radial isotropic source.
Outcome clt_convergence() {
    Outcome o;
    CltSetup setup;
    setup.alpha = 1.5;
    setup.shift = ShiftRule::zero;
    setup.m_schedule = {1, 4, 16, 64, 256};
    double c = 0.75 / std::sqrt(2.0), d = 1.0 / std::sqrt(2.0);
    setup.s_grid = {{0.5, 0.0}, {0.0, 0.5}, {c, c}, {c, -c}, {0.0, 1.0}, {d, d}, {d, -d}, {-0.6, 0.8}};
    setup.s0 = {1.0, 0.0};
    setup.spherical = true;
    setup.n = 10000;
    BatchSource source = [](std::size_t n, const Stream& s) { return sample_doa_pareto(Isotropic{}, 1.5, 2, n, s); };
    TargetLogCf target = [](std::span<const double> s) {
        return std::complex<double>(-std::pow(std::hypot(s[0], s[1]), 1.5), 0.0);
    };
    ConvergenceCurve cv = clt_experiment(source, target, setup, kRoot.child("clt"));
    for (std::size_t i = 0; i < cv.distances.size(); ++i) o.note(cv.distances[i]), o.note(cv.std_errors[i]);
    o.require(nonincreasing_within(cv, 2.0), "distance increases beyond 2 stderr");
    o.require(cv.distances.back() <= 0.05, "final distance above 0.05");
    o.detail = "distances";
    for (std::size_t i = 0; i < cv.distances.size(); ++i)
        o.detail += " m=" + std::to_string(cv.m_schedule[i]) + ":" + f6(cv.distances[i]) + "(" + f6(cv.std_errors[i]) + ")";
    return o;
}

// 11. Gaussian domain of attraction for bounded centred invariant sources.
Outcome gaussian_domain() {
    Outcome o;
    std::vector<std::pair<std::string, SpectralMeasure>> sources{
        {"isotropic", Isotropic{}},
        {"orbital", Orbital::from_spectra({{{1.0, 0.2}, 0.5}, {{-1.0, -0.2}, 0.5}})}};
    for (const auto& [name, h] : sources) {
        Stream st = kRoot.child("gauss").child(name);
        SpectralMeasure hm = h;
        BatchSource source = [hm](std::size_t n, const Stream& s) { return sample_direction_batch(hm, 2.0, 2, n, s); };
        // single-copy covariance of the diagonal
        SampleBatch pilot = source(100000, st.child("pilot"));
        double v = 0.0, cv = 0.0, m0 = 0.0, m1 = 0.0, np = static_cast<double>(pilot.size());
        for (const auto& dg : pilot.diagonals) m0 += dg[0] / np, m1 += dg[1] / np;
        for (const auto& dg : pilot.diagonals) {
            v += ((dg[0] - m0) * (dg[0] - m0) + (dg[1] - m1) * (dg[1] - m1)) / (2.0 * np);
            cv += (dg[0] - m0) * (dg[1] - m1) / np;
        }
        double sigma2 = v - cv, kappa = cv;
        CltSetup setup;
        setup.alpha = 2.0;
        setup.b = 1.0;
        setup.m_schedule = {64};
        setup.s_grid = {{0.5, 0.0}, {0.0, 1.0}, {1.0, 1.0}, {-1.0, 0.5}, {1.5, 0.0},
                        {1.0, -1.0}, {2.0, 0.0}, {0.8, 0.8}, {-1.5, -1.0}};
        setup.n = 40000;
        TargetLogCf target = [sigma2, kappa](std::span<const double> s) {
            double ss = s[0] * s[0] + s[1] * s[1], tr = s[0] + s[1];
            return std::complex<double>(-(sigma2 * ss + kappa * tr * tr) / 2.0, 0.0);
        };
        ConvergenceCurve c = clt_experiment(source, target, setup, st.child("sums"));
        o.note(sigma2), o.note(kappa), o.note(c.distances[0]);
        o.require(c.distances[0] <= 0.03, name);
        o.detail += name + ": sigma^2=" + f6(sigma2) + " kappa=" + f6(kappa) + " sup|dphi|=" + f6(c.distances[0]) + " ";
    }
    return o;
}

// 12. Strict alpha = 1 conditions: traceless orbit passes, Dirac p = 0.9 does not.
Outcome strict_alpha1() {
    Outcome o;
    const std::vector<double> r_grid{10, 30, 100, 300};
    SampleBatch tl = sample_doa_pareto(Orbital::from_spectra({{{1.0, -1.0}, 1.0}}), 1.0, 2, 100000,
                                       kRoot.child("strict1").child("traceless"));
    SampleBatch dr = sample_doa_pareto(DiracIdentity{0.9}, 1.0, 2, 100000, kRoot.child("strict1").child("dirac"));
    auto rt = strict_doa_check_alpha1(tl, r_grid);
    auto rd = strict_doa_check_alpha1(dr, r_grid);
    for (std::size_t i = 0; i < r_grid.size(); ++i) {
        o.note(rt[i].residual), o.note(rt[i].std_error), o.note(rd[i].residual);
        if (rt[i].masked || rd[i].masked) continue;
        o.require(rt[i].residual <= 3.0 * rt[i].std_error, "traceless residual at R=" + f6(r_grid[i]));
        o.require(rd[i].residual > 5.0 * rt[i].residual, "dirac residual not separated at R=" + f6(r_grid[i]));
        o.detail += "R=" + f6(r_grid[i]) + ": " + f6(rt[i].residual) + "(" + f6(rt[i].std_error) + ") vs " +
                    f6(rd[i].residual) + " ";
    }
    return o;
}

// 13. Dyadic counterexample: tail ratio locks at 1/2 while sub-alpha moments look finite.
Outcome dyadic() {
    Outcome o;
    DyadicRatio d = dyadic_counterexample_ratio(1.5, 40);
    double dev = 0.0;
    for (double r : d.ratios) dev = std::max(dev, std::abs(r - 0.5)), o.note(r);
    o.require(dev <= 1e-12, "ratio not identically 1/2");
    o.require(std::abs(d.empirical_limit - d.stable_target) > 0.1, "ratio coincides with 1/k");
    SampleBatch b = sample_dyadic_batch(2, 100000, kRoot.child("dyadic"));
    auto scan = moment_scan(b, {0.5, 1.5});
    for (const auto& e : scan) o.note(e.growth_slope), o.note(e.hill_index);
    o.require(!scan[0].diverging, "m=0.5 flagged diverging");
    o.require(scan[1].diverging, "m=1.5 not flagged diverging");
    o.detail = "ratio " + f6(d.empirical_limit) + " vs 1/k " + f6(d.stable_target) + "; m=0.5 " +
               (scan[0].diverging ? "diverging" : "finite-looking") + ", m=1.5 " +
               (scan[1].diverging ? "diverging" : "finite-looking") + (o.detail.empty() ? "" : "; " + o.detail);
    return o;
}

struct Criterion {
    int id;
    const char* name;
    Outcome (*run)();
};

const Criterion kCriteria[] = {
    {1, "hciz_oracle", hciz_oracle},          {2, "derivative_principle", derivative_principle},
    {3, "isotropic_cf", isotropic_cf},        {4, "strict_stability", strict_stability},
    {5, "three_forms", three_forms},          {6, "dirac_ensemble", dirac_ensemble},
    {7, "orbit_mixture", orbit_mixture},      {8, "tail_ratio", tail_ratio_check},
    {9, "hill_index", hill_index},            {10, "clt_convergence", clt_convergence},
    {11, "gaussian_domain", gaussian_domain}, {12, "strict_alpha1", strict_alpha1},
    {13, "dyadic_counterexample", dyadic},
};

Outcome guarded(const Criterion& c) {
    try {
        return c.run();
    } catch (const std::exception& e) {
        Outcome o;
        o.pass = false;
        o.detail = std::string("exception: ") + e.what();
        o.canon = o.detail;
        return o;
    }
}

}  // namespace

int main(int argc, char** argv) {
    std::vector<int> only;
    for (int i = 1; i < argc; ++i) only.push_back(std::stoi(argv[i]));
    auto selected = [&](int id) { return only.empty() || std::find(only.begin(), only.end(), id) != only.end(); };

    bool all = true;
    std::vector<std::string> canon4;
    set_threads(4);
    for (const auto& c : kCriteria) {
        if (!selected(c.id)) continue;
        Outcome o = guarded(c);
        all = all && o.pass;
        canon4.push_back(o.canon);
        std::printf("criterion %2d %-22s %s  %s\n", c.id, c.name, o.pass ? "PASS" : "FAIL", o.detail.c_str());
        std::fflush(stdout);
    }

    if (selected(14)) {
        set_threads(1);
        std::size_t k = 0, mismatched = 0;
        std::string which;
        for (const auto& c : kCriteria) {
            if (!selected(c.id)) continue;
            if (guarded(c).canon != canon4[k++]) ++mismatched, which += " " + std::to_string(c.id);
        }
        bool ok = mismatched == 0 && k > 0;
        all = all && ok;
        std::printf("criterion 14 %-22s %s  %zu criteria rerun with 1 thread vs 4, %zu mismatched%s\n",
                    "reproducibility", ok ? "PASS" : "FAIL", k, mismatched, which.c_str());
    }
    return all ? 0 : 1;
}
