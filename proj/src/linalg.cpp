#include "qfdiv/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <string>

#include "qfdiv/rng.hpp"

namespace qfdiv {

namespace {

constexpr int kMaxSweeps = 100;
constexpr double kOffDiagonalTol = 1e-13;

bool finite(Complex z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

void require_same_dim(std::size_t a, std::size_t b) {
    if (a != b) throw DimensionMismatch(a, b);
}

double off_diagonal_mass(const Matrix& a) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.dim(); ++i)
        for (std::size_t j = 0; j < a.dim(); ++j)
            if (i != j) s += std::norm(a(i, j));
    return std::sqrt(s);
}

// Rotates the (p, q) plane so that a(p, q) vanishes. The rotation is the real
// Jacobi rotation composed with a phase that makes a(p, q) real first.
void jacobi_rotate(Matrix& a, Matrix& v, std::size_t p, std::size_t q) {
    const Complex apq = a(p, q);
    const double r = std::abs(apq);
    if (r == 0.0) return;
    const Complex phase = std::conj(apq) / r;  // e^{-i phi}
    const double app = a(p, p).real();
    const double aqq = a(q, q).real();

    const double theta = (aqq - app) / (2.0 * r);
    double t;
    if (std::abs(theta) > 1e150) {
        t = 0.5 / theta;
    } else {
        t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
    }
    const double c = 1.0 / std::sqrt(t * t + 1.0);
    const double s = t * c;

    const Complex jpp = c;
    const Complex jpq = s;
    const Complex jqp = -s * phase;
    const Complex jqq = c * phase;

    const std::size_t n = a.dim();
    for (std::size_t k = 0; k < n; ++k) {
        const Complex akp = a(k, p);
        const Complex akq = a(k, q);
        a(k, p) = akp * jpp + akq * jqp;
        a(k, q) = akp * jpq + akq * jqq;
    }
    for (std::size_t k = 0; k < n; ++k) {
        const Complex apk = a(p, k);
        const Complex aqk = a(q, k);
        a(p, k) = std::conj(jpp) * apk + std::conj(jqp) * aqk;
        a(q, k) = std::conj(jpq) * apk + std::conj(jqq) * aqk;
    }
    a(p, p) = app - t * r;
    a(q, q) = aqq + t * r;
    a(p, q) = 0.0;
    a(q, p) = 0.0;

    for (std::size_t k = 0; k < n; ++k) {
        const Complex vkp = v(k, p);
        const Complex vkq = v(k, q);
        v(k, p) = vkp * jpp + vkq * jqp;
        v(k, q) = vkp * jpq + vkq * jqq;
    }
}

// Largest-magnitude component made real positive, so outputs are canonical.
void normalize_phase(std::vector<Complex>& col) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < col.size(); ++i)
        if (std::abs(col[i]) > std::abs(col[best]) * (1.0 + 1e-12)) best = i;
    const double mag = std::abs(col[best]);
    if (mag == 0.0) return;
    const Complex ph = std::conj(col[best]) / mag;
    for (auto& z : col) z *= ph;
}

std::string format_double(double x) {
    std::ostringstream os;
    os.precision(17);
    os << x;
    return os.str();
}

}  // namespace

// ---------------------------------------------------------------------------
// Matrix

Matrix::Matrix(std::size_t n, std::vector<Complex> row_major) : n_(n), data_(std::move(row_major)) {
    if (data_.size() != n * n) throw DimensionMismatch(data_.size(), n * n);
}

Matrix Matrix::identity(std::size_t n) {
    Matrix m(n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

Matrix Matrix::diagonal(std::span<const double> d) {
    Matrix m(d.size());
    for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
    return m;
}

Matrix Matrix::diagonal(std::initializer_list<double> d) {
    return diagonal(std::span<const double>(d.begin(), d.size()));
}

Matrix Matrix::outer(std::span<const Complex> v) {
    Matrix m(v.size());
    for (std::size_t i = 0; i < v.size(); ++i)
        for (std::size_t j = 0; j < v.size(); ++j) m(i, j) = v[i] * std::conj(v[j]);
    return m;
}

std::vector<Complex> Matrix::column(std::size_t j) const {
    std::vector<Complex> c(n_);
    for (std::size_t i = 0; i < n_; ++i) c[i] = (*this)(i, j);
    return c;
}

void Matrix::set_column(std::size_t j, std::span<const Complex> v) {
    require_same_dim(v.size(), n_);
    for (std::size_t i = 0; i < n_; ++i) (*this)(i, j) = v[i];
}

Matrix Matrix::adjoint() const {
    Matrix m(n_);
    for (std::size_t i = 0; i < n_; ++i)
        for (std::size_t j = 0; j < n_; ++j) m(i, j) = std::conj((*this)(j, i));
    return m;
}

Matrix Matrix::conj() const {
    Matrix m(*this);
    for (auto& z : m.data_) z = std::conj(z);
    return m;
}

Matrix Matrix::transpose() const {
    Matrix m(n_);
    for (std::size_t i = 0; i < n_; ++i)
        for (std::size_t j = 0; j < n_; ++j) m(i, j) = (*this)(j, i);
    return m;
}

Complex Matrix::trace() const {
    Complex t = 0.0;
    for (std::size_t i = 0; i < n_; ++i) t += (*this)(i, i);
    return t;
}

double Matrix::hs_norm() const {
    double s = 0.0;
    for (const auto& z : data_) s += std::norm(z);
    return std::sqrt(s);
}

Matrix& Matrix::operator+=(const Matrix& rhs) {
    require_same_dim(n_, rhs.n_);
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += rhs.data_[k];
    return *this;
}

Matrix& Matrix::operator-=(const Matrix& rhs) {
    require_same_dim(n_, rhs.n_);
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= rhs.data_[k];
    return *this;
}

Matrix& Matrix::operator*=(Complex s) {
    for (auto& z : data_) z *= s;
    return *this;
}

Matrix operator*(const Matrix& lhs, const Matrix& rhs) {
    require_same_dim(lhs.n_, rhs.n_);
    const std::size_t n = lhs.n_;
    Matrix out(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = 0; k < n; ++k) {
            const Complex l = lhs(i, k);
            if (l == Complex{}) continue;
            for (std::size_t j = 0; j < n; ++j) out(i, j) += l * rhs(k, j);
        }
    return out;
}

std::vector<Complex> operator*(const Matrix& m, std::span<const Complex> v) {
    require_same_dim(m.dim(), v.size());
    std::vector<Complex> out(v.size());
    for (std::size_t i = 0; i < m.dim(); ++i)
        for (std::size_t j = 0; j < m.dim(); ++j) out[i] += m(i, j) * v[j];
    return out;
}

Complex inner(std::span<const Complex> x, std::span<const Complex> y) {
    require_same_dim(x.size(), y.size());
    Complex s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) s += std::conj(x[i]) * y[i];
    return s;
}

double norm(std::span<const Complex> x) {
    double s = 0.0;
    for (const auto& z : x) s += std::norm(z);
    return std::sqrt(s);
}

Matrix kron(const Matrix& a, const Matrix& b) {
    const std::size_t n = a.dim();
    const std::size_t m = b.dim();
    Matrix out(n * m);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            for (std::size_t k = 0; k < m; ++k)
                for (std::size_t l = 0; l < m; ++l) out(i * m + k, j * m + l) = a(i, j) * b(k, l);
    return out;
}

// ---------------------------------------------------------------------------
// HermitianOperator

HermitianOperator::HermitianOperator(const Matrix& m, double tol) {
    const std::size_t n = m.dim();
    if (n == 0) throw ParameterError("Hermitian operator must have dim >= 1");
    double worst = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            if (!finite(m(i, j))) throw FormatError("matrix entry is not finite");
            worst = std::max(worst, std::abs(m(i, j) - std::conj(m(j, i))));
        }
    if (worst > tol)
        throw NotHermitianError("matrix is not Hermitian: asymmetry " + format_double(worst), worst);
    m_ = Matrix(n);
    for (std::size_t i = 0; i < n; ++i) {
        m_(i, i) = m(i, i).real();
        for (std::size_t j = i + 1; j < n; ++j) {
            const Complex z = 0.5 * (m(i, j) + std::conj(m(j, i)));
            m_(i, j) = z;
            m_(j, i) = std::conj(z);
        }
    }
}

// ---------------------------------------------------------------------------
// Eigendecomposition

Matrix SpectralDecomposition::reconstruct() const {
    const std::size_t n = dim();
    Matrix out(n);
    for (std::size_t k = 0; k < n; ++k) {
        const double lam = eigenvalues[k];
        if (lam == 0.0) continue;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                out(i, j) += lam * eigenvectors(i, k) * std::conj(eigenvectors(j, k));
    }
    return out;
}

SpectralDecomposition eig_hermitian(const HermitianOperator& h) {
    const std::size_t n = h.dim();
    Matrix a = h.matrix();
    Matrix v = Matrix::identity(n);
    const double target = kOffDiagonalTol * a.hs_norm();

    double off = off_diagonal_mass(a);
    int sweep = 0;
    while (off > target) {
        if (sweep == kMaxSweeps)
            throw ConvergenceError("Jacobi eigensolver did not converge; off-diagonal residual " +
                                       format_double(off),
                                   off);
        for (std::size_t p = 0; p + 1 < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) jacobi_rotate(a, v, p, q);
        off = off_diagonal_mass(a);
        ++sweep;
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t x, std::size_t y) { return a(x, x).real() > a(y, y).real(); });

    SpectralDecomposition out;
    out.eigenvalues.resize(n);
    out.eigenvectors = Matrix(n);
    for (std::size_t k = 0; k < n; ++k) {
        out.eigenvalues[k] = a(order[k], order[k]).real();
        auto col = v.column(order[k]);
        normalize_phase(col);
        out.eigenvectors.set_column(k, col);
    }
    return out;
}

// ---------------------------------------------------------------------------
// PsdOperator

PsdOperator::PsdOperator(const HermitianOperator& h) : h_(h), spec_(eig_hermitian(h)) {
    double scale = 1.0;
    for (double lam : spec_.eigenvalues) scale = std::max(scale, std::abs(lam));
    for (double& lam : spec_.eigenvalues) {
        if (lam >= 0.0) continue;
        if (lam < -kPsdTol * scale)
            throw NotPsdError("operator is not positive semidefinite: eigenvalue " + format_double(lam),
                              lam);
        lam = 0.0;
    }
}

double PsdOperator::zero_threshold() const {
    return kZeroEigenTol * std::max(spec_.max_eigenvalue(), 1.0);
}

std::size_t PsdOperator::rank() const {
    const double thr = zero_threshold();
    return static_cast<std::size_t>(std::count_if(spec_.eigenvalues.begin(), spec_.eigenvalues.end(),
                                                  [thr](double lam) { return lam > thr; }));
}

PsdOperator PsdOperator::scaled(double s) const {
    if (!(s >= 0.0) || !std::isfinite(s)) throw ParameterError("PSD scale factor must be finite and >= 0");
    PsdOperator out;
    out.h_ = HermitianOperator(h_.matrix() * Complex(s));
    out.spec_ = spec_;
    for (double& lam : out.spec_.eigenvalues) lam *= s;
    return out;
}

PsdOperator operator+(const PsdOperator& a, const PsdOperator& b) {
    return PsdOperator(a.matrix() + b.matrix());
}

// ---------------------------------------------------------------------------
// Projection

Projection::Projection(const Matrix& m, double tol) : h_(m, tol) {
    const Matrix& p = h_.matrix();
    const double idem = (p * p - p).hs_norm();
    if (idem > tol) throw ParameterError("matrix is not a projection: ||P^2 - P|| = " + format_double(idem));
}

std::size_t Projection::rank() const {
    return static_cast<std::size_t>(std::llround(h_.trace()));
}

double OverlapTable::row_sum(std::size_t i) const {
    double s = 0.0;
    for (std::size_t j = 0; j < dim; ++j) s += at(i, j).weight;
    return s;
}

Projection support_projection(const PsdOperator& a, double tol) {
    if (!(tol > 0.0)) throw ParameterError("support tolerance must be positive");
    const auto& spec = a.spectrum();
    const double thr = tol * std::max(spec.max_eigenvalue(), 1.0);
    Matrix p(a.dim());
    for (std::size_t k = 0; k < spec.dim(); ++k)
        if (spec.eigenvalues[k] > thr) p += Matrix::outer(spec.vector(k));
    return Projection(p);
}

bool support_contained(const PsdOperator& a, const PsdOperator& b, double tol) {
    require_same_dim(a.dim(), b.dim());
    const Matrix pa = support_projection(a).matrix();
    const Matrix pb = support_projection(b).matrix();
    const Matrix outside = (Matrix::identity(a.dim()) - pb) * pa;
    return outside.hs_norm() <= tol;
}

Complex hs_inner(const Matrix& x, const Matrix& y) {
    require_same_dim(x.dim(), y.dim());
    Complex s = 0.0;
    const auto xd = x.data();
    const auto yd = y.data();
    for (std::size_t k = 0; k < xd.size(); ++k) s += xd[k] * std::conj(yd[k]);
    return s;
}

OverlapTable overlap_table(const SpectralDecomposition& da, const SpectralDecomposition& db) {
    require_same_dim(da.dim(), db.dim());
    const std::size_t n = da.dim();
    OverlapTable t;
    t.dim = n;
    t.entries.reserve(n * n);
    std::vector<std::vector<Complex>> vb(n);
    for (std::size_t j = 0; j < n; ++j) vb[j] = db.vector(j);
    for (std::size_t i = 0; i < n; ++i) {
        const auto ui = da.vector(i);
        for (std::size_t j = 0; j < n; ++j)
            t.entries.push_back({da.eigenvalues[i], db.eigenvalues[j], std::norm(inner(ui, vb[j]))});
    }
    return t;
}

namespace {

HermitianOperator apply_spectral(const PsdOperator& a, const ScalarFunction& g, bool kernel_to_zero) {
    const auto& spec = a.spectrum();
    const double thr = a.zero_threshold();
    const std::size_t n = a.dim();
    Matrix out(n);
    for (std::size_t k = 0; k < n; ++k) {
        const double lam = spec.eigenvalues[k] <= thr ? 0.0 : spec.eigenvalues[k];
        if (kernel_to_zero && lam == 0.0) continue;
        const double gl = g(lam);
        if (!std::isfinite(gl))
            throw DomainError("function undefined at eigenvalue " + format_double(lam), lam);
        if (gl == 0.0) continue;
        const auto vk = spec.vector(k);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) out(i, j) += gl * vk[i] * std::conj(vk[j]);
    }
    return HermitianOperator(out, 1e-9 * std::max(1.0, out.hs_norm()));
}

}  // namespace

HermitianOperator matrix_function(const PsdOperator& a, const ScalarFunction& g) {
    return apply_spectral(a, g, false);
}

HermitianOperator support_function(const PsdOperator& a, const ScalarFunction& g) {
    return apply_spectral(a, g, true);
}

// ---------------------------------------------------------------------------
// Sampling

std::vector<Complex> random_unit_vector(std::size_t dim, std::uint64_t seed) {
    if (dim == 0) throw ParameterError("dimension must be >= 1");
    auto rng = make_rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::vector<Complex> v(dim);
    double nv = 0.0;
    while (nv < 1e-8) {
        for (auto& z : v) z = Complex(gauss(rng), gauss(rng));
        nv = norm(v);
    }
    for (auto& z : v) z /= nv;
    return v;
}

Matrix random_unitary(std::size_t dim, std::uint64_t seed) {
    if (dim == 0) throw ParameterError("dimension must be >= 1");
    auto rng = make_rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0 / std::sqrt(2.0));
    Matrix g(dim);
    for (std::size_t i = 0; i < dim; ++i)
        for (std::size_t j = 0; j < dim; ++j) g(i, j) = Complex(gauss(rng), gauss(rng));

    // Gram-Schmidt (twice) yields Q with R_ii > 0, i.e. the phase-normalized
    // QR factor, which is Haar distributed.
    std::vector<std::vector<Complex>> q;
    q.reserve(dim);
    for (std::size_t j = 0; j < dim; ++j) {
        auto c = g.column(j);
        for (int pass = 0; pass < 2; ++pass)
            for (const auto& prev : q) {
                const Complex proj = inner(prev, c);
                for (std::size_t i = 0; i < dim; ++i) c[i] -= proj * prev[i];
            }
        const double nc = norm(c);
        for (auto& z : c) z /= nc;
        q.push_back(std::move(c));
    }
    Matrix u(dim);
    for (std::size_t j = 0; j < dim; ++j) u.set_column(j, q[j]);
    return u;
}

PsdOperator random_psd(std::size_t dim, std::size_t rank, std::optional<double> trace_target,
                       std::uint64_t seed) {
    if (dim == 0) throw ParameterError("dimension must be >= 1");
    if (rank < 1 || rank > dim)
        throw ParameterError("rank must satisfy 1 <= rank <= dim (got " + std::to_string(rank) + ")");
    if (trace_target && !(*trace_target > 0.0)) throw ParameterError("trace target must be positive");

    auto rng = make_rng(mix(seed, 0));
    std::uniform_real_distribution<double> spread(0.1, 1.0);
    std::vector<double> d(dim, 0.0);
    for (std::size_t k = 0; k < rank; ++k) d[k] = spread(rng);
    if (trace_target) {
        const double s = std::accumulate(d.begin(), d.end(), 0.0);
        for (double& x : d) x *= *trace_target / s;
    }
    const Matrix u = random_unitary(dim, mix(seed, 1));
    return PsdOperator(u * Matrix::diagonal(d) * u.adjoint());
}

Projection random_rank_one_projection(std::size_t dim, std::uint64_t seed) {
    return Projection(Matrix::outer(random_unit_vector(dim, seed)));
}

double unitarity_residual(const Matrix& u) {
    return (u.adjoint() * u - Matrix::identity(u.dim())).hs_norm();
}

}  // namespace qfdiv
