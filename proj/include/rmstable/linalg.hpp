#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "rmstable/rng.hpp"

namespace rms {

using cplx = std::complex<double>;

// Dense square complex matrix, row major.
class CMatrix {
public:
    CMatrix() = default;
    explicit CMatrix(std::size_t n) : n_(n), a_(n * n) {}
    static CMatrix identity(std::size_t n);

    std::size_t dim() const { return n_; }
    cplx& operator()(std::size_t i, std::size_t j) { return a_[i * n_ + j]; }
    cplx operator()(std::size_t i, std::size_t j) const { return a_[i * n_ + j]; }
    const std::vector<cplx>& data() const { return a_; }

    CMatrix adjoint() const;
    friend CMatrix operator*(const CMatrix& a, const CMatrix& b);

private:
    std::size_t n_ = 0;
    std::vector<cplx> a_;
};

// Hermitian by construction: only set() writes, and it writes both (i,j) and
// (j,i); diagonal entries are stored real.
class HermitianMatrix {
public:
    HermitianMatrix() = default;
    explicit HermitianMatrix(std::size_t n) : n_(n), a_(n * n) {}

    // Accepts a full row-major matrix. Entries must be finite and Hermitian to
    // within 1e-12 relative to the largest entry; the result is symmetrised.
    static HermitianMatrix from_entries(std::size_t n, std::span<const cplx> entries);
    static HermitianMatrix diagonal(std::span<const double> d);
    static HermitianMatrix identity(std::size_t n);
    // Copies the Hermitian part (A + A^dagger)/2 of a general matrix.
    static HermitianMatrix hermitian_part(const CMatrix& a);

    std::size_t dim() const { return n_; }
    cplx operator()(std::size_t i, std::size_t j) const { return a_[i * n_ + j]; }
    void set(std::size_t i, std::size_t j, cplx v);
    const std::vector<cplx>& data() const { return a_; }

    double trace() const;
    std::vector<double> diag() const;

    HermitianMatrix& operator+=(const HermitianMatrix& o);
    HermitianMatrix& operator*=(double c);
    // Adds c to every diagonal entry.
    HermitianMatrix& shift(double c);
    friend HermitianMatrix operator+(HermitianMatrix a, const HermitianMatrix& b) { return a += b; }
    friend HermitianMatrix operator*(double c, HermitianMatrix a) { return a *= c; }
    friend bool operator==(const HermitianMatrix& a, const HermitianMatrix& b) {
        return a.n_ == b.n_ && a.a_ == b.a_;
    }

private:
    std::size_t n_ = 0;
    std::vector<cplx> a_;
};

class UnitaryMatrix {
public:
    UnitaryMatrix() = default;
    // Checks U U^dagger = I to within tol (max abs entry).
    explicit UnitaryMatrix(CMatrix u, double tol = 1e-12);
    std::size_t dim() const { return u_.dim(); }
    cplx operator()(std::size_t i, std::size_t j) const { return u_(i, j); }
    const CMatrix& matrix() const { return u_; }

private:
    CMatrix u_;
};

struct EigenSystem {
    std::vector<double> eigenvalues;  // ascending
    UnitaryMatrix vectors;            // columns are eigenvectors
};

EigenSystem hermitian_eigh(const HermitianMatrix& h);
std::vector<double> hermitian_eigvals(const HermitianMatrix& h);

UnitaryMatrix sample_haar_unitary(std::size_t n, Engine& eng);
HermitianMatrix sample_gue(std::size_t n, Engine& eng);

double frobenius_norm(const HermitianMatrix& h);

struct TraceSplit {
    double trace = 0.0;
    HermitianMatrix traceless;
};
TraceSplit trace_split(const HermitianMatrix& h);

double vandermonde(std::span<const double> x);

// Re Tr(A B) for Hermitian A, B.
double trace_product(const HermitianMatrix& a, const HermitianMatrix& b);
// U A U^dagger.
HermitianMatrix conjugate(const UnitaryMatrix& u, const HermitianMatrix& a);
// U diag(d) U^dagger.
HermitianMatrix conjugate_diag(const UnitaryMatrix& u, std::span<const double> d);
// V diag(d) V^dagger for a general matrix V (reconstruction checks).
CMatrix reconstruct(const CMatrix& v, std::span<const double> d);

}  // namespace rms
