#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "qfdiv/errors.hpp"

namespace qfdiv {

using Complex = std::complex<double>;

// Symmetry tolerance applied when a HermitianOperator is constructed.
inline constexpr double kHermitianTol = 1e-12;
// Relative floor below which eigenvalues of a PSD operator count as zero.
inline constexpr double kZeroEigenTol = 1e-10;
// Negative eigenvalues down to -kPsdTol * max(|lambda|, 1) are clamped to zero.
inline constexpr double kPsdTol = 1e-10;

/// Dense square complex matrix, row-major.
class Matrix {
public:
    Matrix() = default;
    explicit Matrix(std::size_t n) : n_(n), data_(n * n) {}
    Matrix(std::size_t n, std::vector<Complex> row_major);

    static Matrix identity(std::size_t n);
    static Matrix zero(std::size_t n) { return Matrix(n); }
    static Matrix diagonal(std::span<const double> d);
    static Matrix diagonal(std::initializer_list<double> d);
    // |v><v|
    static Matrix outer(std::span<const Complex> v);

    std::size_t dim() const noexcept { return n_; }

    Complex& operator()(std::size_t i, std::size_t j) { return data_[i * n_ + j]; }
    const Complex& operator()(std::size_t i, std::size_t j) const { return data_[i * n_ + j]; }

    std::span<const Complex> data() const noexcept { return data_; }

    std::vector<Complex> column(std::size_t j) const;
    void set_column(std::size_t j, std::span<const Complex> v);

    Matrix adjoint() const;
    Matrix conj() const;
    Matrix transpose() const;
    Complex trace() const;
    double hs_norm() const;

    Matrix& operator+=(const Matrix& rhs);
    Matrix& operator-=(const Matrix& rhs);
    Matrix& operator*=(Complex s);

    friend Matrix operator+(Matrix lhs, const Matrix& rhs) { return lhs += rhs; }
    friend Matrix operator-(Matrix lhs, const Matrix& rhs) { return lhs -= rhs; }
    friend Matrix operator*(Matrix lhs, Complex s) { return lhs *= s; }
    friend Matrix operator*(Complex s, Matrix rhs) { return rhs *= s; }
    friend Matrix operator*(const Matrix& lhs, const Matrix& rhs);

    friend bool operator==(const Matrix&, const Matrix&) = default;

private:
    std::size_t n_ = 0;
    std::vector<Complex> data_;
};

std::vector<Complex> operator*(const Matrix& m, std::span<const Complex> v);

// <x, y> = sum conj(x_i) y_i
Complex inner(std::span<const Complex> x, std::span<const Complex> y);
double norm(std::span<const Complex> x);

// Kronecker product, used to materialize superoperators.
Matrix kron(const Matrix& a, const Matrix& b);

/// A = A^dagger, stored exactly symmetrized.
class HermitianOperator {
public:
    HermitianOperator() = default;
    explicit HermitianOperator(const Matrix& m, double tol = kHermitianTol);

    std::size_t dim() const noexcept { return m_.dim(); }
    const Matrix& matrix() const noexcept { return m_; }
    double trace() const { return m_.trace().real(); }

    operator const Matrix&() const noexcept { return m_; }

private:
    Matrix m_;
};

/// Eigenvalues (descending) with orthonormal eigenvector columns.
struct SpectralDecomposition {
    std::vector<double> eigenvalues;
    Matrix eigenvectors;
    double unit_tol = 1e-10;

    std::size_t dim() const noexcept { return eigenvalues.size(); }
    std::vector<Complex> vector(std::size_t i) const { return eigenvectors.column(i); }
    double max_eigenvalue() const { return eigenvalues.empty() ? 0.0 : eigenvalues.front(); }
    // Rebuilds sum_i lambda_i v_i v_i^dagger.
    Matrix reconstruct() const;
};

/// Cyclic complex Jacobi. Throws ConvergenceError after 100 sweeps.
SpectralDecomposition eig_hermitian(const HermitianOperator& a);

/// Positive semidefinite operator with its (clamped) spectral data cached.
class PsdOperator {
public:
    PsdOperator() = default;
    explicit PsdOperator(const HermitianOperator& h);
    explicit PsdOperator(const Matrix& m, double tol = kHermitianTol)
        : PsdOperator(HermitianOperator(m, tol)) {}

    static PsdOperator zero(std::size_t n) { return PsdOperator(Matrix::zero(n)); }
    static PsdOperator identity(std::size_t n) { return PsdOperator(Matrix::identity(n)); }
    static PsdOperator diagonal(std::initializer_list<double> d) { return PsdOperator(Matrix::diagonal(d)); }

    std::size_t dim() const noexcept { return h_.dim(); }
    const HermitianOperator& hermitian() const noexcept { return h_; }
    const Matrix& matrix() const noexcept { return h_.matrix(); }
    const SpectralDecomposition& spectrum() const noexcept { return spec_; }
    double trace() const { return h_.trace(); }

    // Eigenvalue threshold at or below which lambda counts as zero.
    double zero_threshold() const;
    std::size_t rank() const;

    PsdOperator scaled(double s) const;

private:
    HermitianOperator h_;
    SpectralDecomposition spec_;
};

PsdOperator operator+(const PsdOperator& a, const PsdOperator& b);

/// Orthogonal projection, P^2 = P = P^dagger.
class Projection {
public:
    explicit Projection(const Matrix& m, double tol = 1e-9);
    std::size_t dim() const noexcept { return h_.dim(); }
    const Matrix& matrix() const noexcept { return h_.matrix(); }
    const HermitianOperator& hermitian() const noexcept { return h_; }
    std::size_t rank() const;

private:
    HermitianOperator h_;
};

struct OverlapEntry {
    double a;
    double b;
    double weight;
};

/// All |<u_i, v_j>|^2 for eigenvectors u_i of one operator and v_j of another.
struct OverlapTable {
    std::size_t dim = 0;
    std::vector<OverlapEntry> entries;  // row-major in (i, j)

    const OverlapEntry& at(std::size_t i, std::size_t j) const { return entries[i * dim + j]; }
    double row_sum(std::size_t i) const;
};

Projection support_projection(const PsdOperator& a, double tol = kZeroEigenTol);
bool support_contained(const PsdOperator& a, const PsdOperator& b, double tol = 1e-8);

// tr(X Y^dagger)
Complex hs_inner(const Matrix& x, const Matrix& y);

OverlapTable overlap_table(const SpectralDecomposition& da, const SpectralDecomposition& db);

using ScalarFunction = std::function<double(double)>;

/// Standard operator function sum_i g(lambda_i) v_i v_i^dagger.
/// Throws DomainError when g returns a non-finite value at an eigenvalue.
HermitianOperator matrix_function(const PsdOperator& a, const ScalarFunction& g);

/// As matrix_function, but g is applied on the support only; the kernel maps to 0.
HermitianOperator support_function(const PsdOperator& a, const ScalarFunction& g);

Matrix random_unitary(std::size_t dim, std::uint64_t seed);
PsdOperator random_psd(std::size_t dim, std::size_t rank, std::optional<double> trace_target,
                       std::uint64_t seed);
Projection random_rank_one_projection(std::size_t dim, std::uint64_t seed);
std::vector<Complex> random_unit_vector(std::size_t dim, std::uint64_t seed);

// ||U^dagger U - I||_HS
double unitarity_residual(const Matrix& u);

}  // namespace qfdiv
