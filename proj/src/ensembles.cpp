#include "rmstable/ensembles.hpp"

#include <cmath>

#include "rmstable/errors.hpp"
#include "rmstable/parallel.hpp"
#include "rmstable/stable1d.hpp"

namespace rms {

namespace {

template <class F>
std::vector<HermitianMatrix> generate(std::size_t n, const Stream& stream, F draw) {
    std::vector<HermitianMatrix> out(n);
    parallel_for(n, [&](std::size_t i) {
        Engine eng = stream.engine(i);
        out[i] = draw(eng);
    });
    return out;
}

void check_alpha(double alpha, bool allow_two) {
    if (!(alpha > 0.0 && (allow_two ? alpha <= 2.0 : alpha < 2.0)))
        throw ParameterError(allow_two ? "alpha must lie in (0,2]" : "alpha must lie in (0,2)");
}

}  // namespace

void EnsembleSpec::validate() const {
    check_alpha(alpha, true);
    if (!(gamma > 0.0)) throw ParameterError("gamma must be positive");
    if (!std::isfinite(y0)) throw ParameterError("y0 must be finite");
    rms::validate(measure, dim);
}

std::vector<double> SampleBatch::norms() const {
    std::vector<double> v(size());
    for (std::size_t i = 0; i < size(); ++i) v[i] = frobenius_norm(matrices[i]);
    return v;
}

std::vector<double> SampleBatch::traces() const {
    std::vector<double> v(size());
    for (std::size_t i = 0; i < size(); ++i) v[i] = matrices[i].trace();
    return v;
}

std::vector<double> SampleBatch::largest_eigenvalues() const {
    std::vector<double> v(size());
    for (std::size_t i = 0; i < size(); ++i) v[i] = eigenvalues[i].back();
    return v;
}

SampleBatch SampleBatch::from_matrices(std::size_t dim, std::vector<HermitianMatrix> ms, std::string sampler,
                                       std::uint64_t seed, bool exact) {
    SampleBatch b;
    b.dim = dim;
    b.seed = seed;
    b.sampler = std::move(sampler);
    b.exact = exact;
    b.matrices = std::move(ms);
    b.eigenvalues.resize(b.matrices.size());
    b.diagonals.resize(b.matrices.size());
    parallel_for(b.matrices.size(), [&](std::size_t i) {
        if (b.matrices[i].dim() != dim) throw ParameterError("batch: matrix dimension mismatch");
        b.eigenvalues[i] = hermitian_eigvals(b.matrices[i]);
        b.diagonals[i] = b.matrices[i].diag();
    });
    return b;
}

SampleBatch sample_gue_batch(std::size_t n_dim, std::size_t n, const Stream& stream) {
    auto ms = generate(n, stream, [&](Engine& eng) { return sample_gue(n_dim, eng); });
    return SampleBatch::from_matrices(n_dim, std::move(ms), "gue", stream.key(), true);
}

SampleBatch sample_direction_batch(const SpectralMeasure& h, double alpha, std::size_t n_dim, std::size_t n,
                                   const Stream& stream) {
    validate(h, n_dim);
    auto ms = generate(n, stream, [&](Engine& eng) { return sample_direction(h, n_dim, alpha, eng); });
    return SampleBatch::from_matrices(n_dim, std::move(ms), "direction:" + measure_name(h), stream.key(), true);
}

SampleBatch sample_elliptical_stable(double sigma, double kappa, double alpha, double y0, std::size_t n_dim,
                                     std::size_t n, const Stream& stream) {
    check_alpha(alpha, true);
    validate(Elliptical{sigma, kappa}, n_dim);
    double nn = static_cast<double>(n_dim);
    // G = a H + (d - a)(Tr H / N) I with H GUE: Var(Tr G S) = a^2 Tr S^2 + (d^2 - a^2)(Tr S)^2 / N.
    double a = std::sqrt(2.0 * sigma * sigma / alpha);
    double d = std::sqrt(2.0 * (sigma * sigma + nn * kappa) / alpha);
    auto ms = generate(n, stream, [&](Engine& eng) {
        double t = alpha < 2.0 ? sample_positive_stable(alpha / 2.0, eng) : 1.0;
        HermitianMatrix h = sample_gue(n_dim, eng);
        double tr = h.trace();
        h *= a;
        h.shift((d - a) * tr / nn);
        h *= std::sqrt(t);
        h.shift(y0);
        return h;
    });
    return SampleBatch::from_matrices(n_dim, std::move(ms), "elliptical", stream.key(), true);
}

SampleBatch sample_gaussian_invariant(double sigma, double kappa, std::size_t n_dim, std::size_t n,
                                      const Stream& stream) {
    if (!(sigma > 0.0)) throw ParameterError("gaussian: sigma must be positive");
    if (kappa < 0.0)
        throw CapabilityError("gaussian: kappa < 0 needs the full quadratic form; use the elliptical alpha=2 sampler");
    auto ms = generate(n, stream, [&](Engine& eng) {
        HermitianMatrix h = sample_gue(n_dim, eng);
        h *= sigma;
        h.shift(std::sqrt(kappa) * standard_normal(eng));
        return h;
    });
    return SampleBatch::from_matrices(n_dim, std::move(ms), "gaussian", stream.key(), true);
}

SampleBatch sample_dirac_stable(double alpha, double gamma, double p, double y0, std::size_t n_dim, std::size_t n,
                                const Stream& stream) {
    StableParams1D sp = dirac_weight_to_params(p, alpha, gamma);
    double rn = std::sqrt(static_cast<double>(n_dim));
    auto ms = generate(n, stream, [&](Engine& eng) {
        double y = sample_stable_1d(sp, eng);
        HermitianMatrix h(n_dim);
        h.shift(y / rn + y0);
        return h;
    });
    return SampleBatch::from_matrices(n_dim, std::move(ms), "dirac", stream.key(), true);
}

SampleBatch sample_doa_pareto(const SpectralMeasure& h, double alpha, std::size_t n_dim, std::size_t n,
                              const Stream& stream) {
    check_alpha(alpha, false);
    validate(h, n_dim);
    auto ms = generate(n, stream, [&](Engine& eng) {
        double r = std::pow(uniform_open(eng), -1.0 / alpha);
        return r * sample_direction(h, n_dim, alpha, eng);
    });
    return SampleBatch::from_matrices(n_dim, std::move(ms), "doa_pareto:" + measure_name(h), stream.key(), false);
}

SampleBatch sum_scaled(std::span<const SampleBatch> batches, double b_m, double a_m) {
    if (batches.empty()) throw ParameterError("sum_scaled: no batches");
    if (!(b_m > 0.0)) throw ParameterError("sum_scaled: B_m must be positive");
    std::size_t n = batches[0].size(), dim = batches[0].dim;
    bool exact = true;
    for (const auto& b : batches) {
        if (b.size() != n || b.dim != dim) throw ParameterError("sum_scaled: batch shape mismatch");
        exact = exact && b.exact;
    }
    std::vector<HermitianMatrix> ms(n);
    parallel_for(n, [&](std::size_t i) {
        HermitianMatrix s = batches[0].matrices[i];
        for (std::size_t j = 1; j < batches.size(); ++j) s += batches[j].matrices[i];
        s *= 1.0 / b_m;
        s.shift(-a_m);
        ms[i] = std::move(s);
    });
    return SampleBatch::from_matrices(dim, std::move(ms), "sum_scaled", batches[0].seed, exact);
}

SampleBatch sample_orbit_mixture(std::span<const MixtureComponent> comps, double alpha, double gamma) {
    check_alpha(alpha, true);
    if (comps.empty()) throw ParameterError("orbit mixture: no components");
    double total = 0.0;
    for (const auto& c : comps) {
        if (!c.batch) throw ParameterError("orbit mixture: missing batch");
        if (!(c.weight >= 0.0)) throw ParameterError("orbit mixture: negative weight");
        if (c.batch->size() != comps[0].batch->size() || c.batch->dim != comps[0].batch->dim)
            throw ParameterError("orbit mixture: batch shape mismatch");
        total += c.weight;
    }
    if (std::abs(total - 1.0) > 1e-12) throw ParameterError("orbit mixture: weights must sum to 1");

    std::size_t n = comps[0].batch->size(), dim = comps[0].batch->dim;
    double shift = 0.0;
    if (alpha == 1.0) {
        for (const auto& c : comps)
            if (c.weight > 0.0) shift += c.weight * std::log(c.weight) * c.orbit_trace;
        shift *= 2.0 * gamma / (M_PI * static_cast<double>(dim));
    }
    std::vector<HermitianMatrix> ms(n);
    parallel_for(n, [&](std::size_t i) {
        HermitianMatrix s(dim);
        for (const auto& c : comps) {
            if (c.weight == 0.0) continue;
            double f = alpha == 1.0 ? c.weight : std::pow(c.weight, 1.0 / alpha);
            s += f * c.batch->matrices[i];
        }
        s.shift(shift);
        ms[i] = std::move(s);
    });
    return SampleBatch::from_matrices(dim, std::move(ms), "orbit_mixture", comps[0].batch->seed, true);
}

}  // namespace rms
