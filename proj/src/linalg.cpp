#include "rmstable/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "rmstable/errors.hpp"

namespace rms {

CMatrix CMatrix::identity(std::size_t n) {
    CMatrix m(n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

CMatrix CMatrix::adjoint() const {
    CMatrix r(n_);
    for (std::size_t i = 0; i < n_; ++i)
        for (std::size_t j = 0; j < n_; ++j) r(j, i) = std::conj((*this)(i, j));
    return r;
}

CMatrix operator*(const CMatrix& a, const CMatrix& b) {
    std::size_t n = a.dim();
    CMatrix r(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = 0; k < n; ++k) {
            cplx aik = a(i, k);
            for (std::size_t j = 0; j < n; ++j) r(i, j) += aik * b(k, j);
        }
    return r;
}

HermitianMatrix HermitianMatrix::from_entries(std::size_t n, std::span<const cplx> e) {
    if (e.size() != n * n) throw ParameterError("hermitian matrix: expected n*n entries");
    double scale = 0.0;
    for (auto z : e) {
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
            throw ParameterError("hermitian matrix: non-finite entry");
        scale = std::max(scale, std::abs(z));
    }
    HermitianMatrix h(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i; j < n; ++j) {
            cplx u = e[i * n + j], l = e[j * n + i];
            if (std::abs(u - std::conj(l)) > 1e-12 * std::max(scale, 1.0))
                throw ParameterError("hermitian matrix: entries are not Hermitian");
            h.set(i, j, 0.5 * (u + std::conj(l)));
        }
    return h;
}

HermitianMatrix HermitianMatrix::diagonal(std::span<const double> d) {
    HermitianMatrix h(d.size());
    for (std::size_t i = 0; i < d.size(); ++i) h.a_[i * d.size() + i] = d[i];
    return h;
}

HermitianMatrix HermitianMatrix::identity(std::size_t n) {
    std::vector<double> ones(n, 1.0);
    return diagonal(ones);
}

HermitianMatrix HermitianMatrix::hermitian_part(const CMatrix& a) {
    std::size_t n = a.dim();
    HermitianMatrix h(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i; j < n; ++j) h.set(i, j, 0.5 * (a(i, j) + std::conj(a(j, i))));
    return h;
}

void HermitianMatrix::set(std::size_t i, std::size_t j, cplx v) {
    if (i == j) {
        a_[i * n_ + i] = v.real();
        return;
    }
    a_[i * n_ + j] = v;
    a_[j * n_ + i] = std::conj(v);
}

double HermitianMatrix::trace() const {
    double t = 0.0;
    for (std::size_t i = 0; i < n_; ++i) t += a_[i * n_ + i].real();
    return t;
}

std::vector<double> HermitianMatrix::diag() const {
    std::vector<double> d(n_);
    for (std::size_t i = 0; i < n_; ++i) d[i] = a_[i * n_ + i].real();
    return d;
}

HermitianMatrix& HermitianMatrix::operator+=(const HermitianMatrix& o) {
    if (o.n_ != n_) throw ParameterError("hermitian matrix: dimension mismatch");
    for (std::size_t k = 0; k < a_.size(); ++k) a_[k] += o.a_[k];
    return *this;
}

HermitianMatrix& HermitianMatrix::operator*=(double c) {
    for (auto& z : a_) z *= c;
    return *this;
}

HermitianMatrix& HermitianMatrix::shift(double c) {
    for (std::size_t i = 0; i < n_; ++i) a_[i * n_ + i] += c;
    return *this;
}

UnitaryMatrix::UnitaryMatrix(CMatrix u, double tol) : u_(std::move(u)) {
    std::size_t n = u_.dim();
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            cplx s = 0.0;
            for (std::size_t k = 0; k < n; ++k) s += u_(i, k) * std::conj(u_(j, k));
            if (std::abs(s - (i == j ? 1.0 : 0.0)) > tol)
                throw NumericalError("unitary matrix: U U^dagger deviates from identity");
        }
}

namespace {

// Cyclic complex Jacobi. `a` is overwritten (off-diagonal driven to zero);
// `v` accumulates the rotations when non-null.
void jacobi(CMatrix& a, CMatrix* v) {
    const std::size_t n = a.dim();
    double fro = 0.0;
    for (auto z : a.data()) fro += std::norm(z);
    fro = std::sqrt(fro);
    if (fro == 0.0) return;
    const double thresh = 1e-13 * fro;

    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (std::size_t p = 0; p < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) off = std::max(off, std::abs(a(p, q)));
        if (off < thresh) return;

        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                double g = std::abs(a(p, q));
                if (g == 0.0) continue;
                cplx e = a(p, q) / g;
                double app = a(p, p).real(), aqq = a(q, q).real();
                double theta = (aqq - app) / (2.0 * g);
                double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                double c = 1.0 / std::sqrt(t * t + 1.0), s = t * c;
                // J = diag(1, conj(e)) * [[c, s], [-s, c]] on the (p,q) plane.
                cplx jpp = c, jpq = s, jqp = -s * std::conj(e), jqq = c * std::conj(e);
                for (std::size_t k = 0; k < n; ++k) {  // a <- a J
                    cplx akp = a(k, p), akq = a(k, q);
                    a(k, p) = akp * jpp + akq * jqp;
                    a(k, q) = akp * jpq + akq * jqq;
                }
                for (std::size_t k = 0; k < n; ++k) {  // a <- J^dagger a
                    cplx apk = a(p, k), aqk = a(q, k);
                    a(p, k) = std::conj(jpp) * apk + std::conj(jqp) * aqk;
                    a(q, k) = std::conj(jpq) * apk + std::conj(jqq) * aqk;
                }
                a(p, q) = 0.0;
                a(q, p) = 0.0;
                a(p, p) = a(p, p).real();
                a(q, q) = a(q, q).real();
                if (v) {
                    for (std::size_t k = 0; k < n; ++k) {
                        cplx vkp = (*v)(k, p), vkq = (*v)(k, q);
                        (*v)(k, p) = vkp * jpp + vkq * jqp;
                        (*v)(k, q) = vkp * jpq + vkq * jqq;
                    }
                }
            }
        }
    }
    throw NumericalError("hermitian_eigh: Jacobi sweeps did not converge");
}

CMatrix to_cmatrix(const HermitianMatrix& h) {
    std::size_t n = h.dim();
    CMatrix a(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) a(i, j) = h(i, j);
    return a;
}

void check_finite(const HermitianMatrix& h) {
    for (auto z : h.data())
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
            throw ParameterError("hermitian_eigh: non-finite entry");
}

}  // namespace

EigenSystem hermitian_eigh(const HermitianMatrix& h) {
    check_finite(h);
    std::size_t n = h.dim();
    CMatrix a = to_cmatrix(h), v = CMatrix::identity(n);
    jacobi(a, &v);

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t i, std::size_t j) { return a(i, i).real() < a(j, j).real(); });
    EigenSystem es;
    es.eigenvalues.resize(n);
    CMatrix vs(n);
    for (std::size_t k = 0; k < n; ++k) {
        es.eigenvalues[k] = a(order[k], order[k]).real();
        for (std::size_t i = 0; i < n; ++i) vs(i, k) = v(i, order[k]);
    }
    es.vectors = UnitaryMatrix(std::move(vs), 1e-10);
    return es;
}

std::vector<double> hermitian_eigvals(const HermitianMatrix& h) {
    check_finite(h);
    std::size_t n = h.dim();
    std::vector<double> ev(n);
    if (n == 2) {
        // closed form; same result as Jacobi to rounding
        double a = h(0, 0).real(), d = h(1, 1).real();
        double m = 0.5 * (a + d), r = std::hypot(0.5 * (a - d), std::abs(h(0, 1)));
        ev[0] = m - r;
        ev[1] = m + r;
        return ev;
    }
    CMatrix a = to_cmatrix(h);
    jacobi(a, nullptr);
    for (std::size_t i = 0; i < n; ++i) ev[i] = a(i, i).real();
    std::sort(ev.begin(), ev.end());
    return ev;
}

UnitaryMatrix sample_haar_unitary(std::size_t n, Engine& eng) {
    if (n == 0) throw ParameterError("sample_haar_unitary: N must be positive");
    const double s = std::sqrt(0.5);
    CMatrix z(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) z(i, j) = cplx(s * standard_normal(eng), s * standard_normal(eng));

    // Gram-Schmidt on columns: this is the QR factorisation whose R has a
    // positive real diagonal, i.e. the phase-fixed one. A QR with arbitrary
    // diagonal phases is not Haar.
    for (std::size_t j = 0; j < n; ++j) {
        for (int pass = 0; pass < 2; ++pass)
            for (std::size_t k = 0; k < j; ++k) {
                cplx dot = 0.0;
                for (std::size_t i = 0; i < n; ++i) dot += std::conj(z(i, k)) * z(i, j);
                for (std::size_t i = 0; i < n; ++i) z(i, j) -= dot * z(i, k);
            }
        double nrm = 0.0;
        for (std::size_t i = 0; i < n; ++i) nrm += std::norm(z(i, j));
        nrm = std::sqrt(nrm);
        for (std::size_t i = 0; i < n; ++i) z(i, j) /= nrm;
    }
    return UnitaryMatrix(std::move(z), 1e-10);
}

HermitianMatrix sample_gue(std::size_t n, Engine& eng) {
    if (n == 0) throw ParameterError("sample_gue: N must be positive");
    const double s = std::sqrt(0.5);
    HermitianMatrix h(n);
    for (std::size_t i = 0; i < n; ++i) {
        h.set(i, i, standard_normal(eng));
        for (std::size_t j = i + 1; j < n; ++j) h.set(i, j, cplx(s * standard_normal(eng), s * standard_normal(eng)));
    }
    return h;
}

double frobenius_norm(const HermitianMatrix& h) {
    double s = 0.0;
    for (auto z : h.data()) s += std::norm(z);
    return std::sqrt(s);
}

TraceSplit trace_split(const HermitianMatrix& h) {
    TraceSplit ts{h.trace(), h};
    ts.traceless.shift(-ts.trace / static_cast<double>(h.dim()));
    return ts;
}

double vandermonde(std::span<const double> x) {
    double p = 1.0;
    for (std::size_t a = 0; a < x.size(); ++a)
        for (std::size_t b = a + 1; b < x.size(); ++b) p *= x[b] - x[a];
    return p;
}

double trace_product(const HermitianMatrix& a, const HermitianMatrix& b) {
    std::size_t n = a.dim();
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) s += (a(i, j) * b(j, i)).real();
    return s;
}

HermitianMatrix conjugate(const UnitaryMatrix& u, const HermitianMatrix& a) {
    std::size_t n = a.dim();
    CMatrix am(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) am(i, j) = a(i, j);
    return HermitianMatrix::hermitian_part(u.matrix() * am * u.matrix().adjoint());
}

HermitianMatrix conjugate_diag(const UnitaryMatrix& u, std::span<const double> d) {
    std::size_t n = d.size();
    HermitianMatrix h(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i; j < n; ++j) {
            cplx s = 0.0;
            for (std::size_t k = 0; k < n; ++k) s += u(i, k) * d[k] * std::conj(u(j, k));
            h.set(i, j, s);
        }
    return h;
}

CMatrix reconstruct(const CMatrix& v, std::span<const double> d) {
    std::size_t n = d.size();
    CMatrix r(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            cplx s = 0.0;
            for (std::size_t k = 0; k < n; ++k) s += v(i, k) * d[k] * std::conj(v(j, k));
            r(i, j) = s;
        }
    return r;
}

}  // namespace rms
