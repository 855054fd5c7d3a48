#include <doctest.h>

#include <cmath>

#include "qfdiv/errors.hpp"
#include "qfdiv/linalg.hpp"
#include "qfdiv/matrix_io.hpp"
#include "qfdiv/rng.hpp"

using namespace qfdiv;

namespace {

Matrix random_hermitian(std::size_t n, std::uint64_t seed) {
    auto rng = make_rng(seed);
    std::normal_distribution<double> g;
    Matrix m(n);
    for (std::size_t i = 0; i < n; ++i) {
        m(i, i) = g(rng);
        for (std::size_t j = i + 1; j < n; ++j) {
            m(i, j) = Complex(g(rng), g(rng));
            m(j, i) = std::conj(m(i, j));
        }
    }
    return m;
}

double max_abs(const Matrix& m) {
    double w = 0.0;
    for (const auto& z : m.data()) w = std::max(w, std::abs(z));
    return w;
}

}  // namespace

TEST_CASE("eig of diagonal and swap matrices") {
    const auto d = eig_hermitian(HermitianOperator(Matrix::diagonal({3.0, 1.0})));
    CHECK(d.eigenvalues[0] == doctest::Approx(3.0));
    CHECK(d.eigenvalues[1] == doctest::Approx(1.0));
    CHECK(std::abs(d.eigenvectors(0, 0)) == doctest::Approx(1.0));
    CHECK(std::abs(d.eigenvectors(1, 1)) == doctest::Approx(1.0));

    const Matrix x(2, {0.0, 1.0, 1.0, 0.0});
    const auto s = eig_hermitian(HermitianOperator(x));
    CHECK(s.eigenvalues[0] == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(s.eigenvalues[1] == doctest::Approx(-1.0).epsilon(1e-14));
}

TEST_CASE("eig reconstructs random Hermitian matrices") {
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        for (std::size_t n : {1u, 2u, 3u, 6u, 9u}) {
            const Matrix m = random_hermitian(n, mix(seed, n));
            const auto d = eig_hermitian(HermitianOperator(m));
            CHECK(max_abs(d.reconstruct() - m) <= 1e-9);
            CHECK(unitarity_residual(d.eigenvectors) <= 1e-10);
            for (std::size_t k = 1; k < n; ++k) CHECK(d.eigenvalues[k - 1] >= d.eigenvalues[k]);
            // Trace is the eigenvalue sum.
            double sum = 0.0;
            for (double v : d.eigenvalues) sum += v;
            CHECK(sum == doctest::Approx(m.trace().real()).epsilon(1e-10));
        }
    }
}

TEST_CASE("eig handles degenerate spectra") {
    const Matrix u = random_unitary(4, 77);
    const Matrix m = u * Matrix::diagonal({2.0, 2.0, 2.0, -1.0}) * u.adjoint();
    const auto d = eig_hermitian(HermitianOperator(m, 1e-10));
    CHECK(d.eigenvalues[0] == doctest::Approx(2.0));
    CHECK(d.eigenvalues[2] == doctest::Approx(2.0));
    CHECK(d.eigenvalues[3] == doctest::Approx(-1.0));
    CHECK(max_abs(d.reconstruct() - m) <= 1e-10);
}

TEST_CASE("Hermitian construction rejects asymmetric and non-finite input") {
    CHECK_THROWS_AS(HermitianOperator(Matrix(2, {1.0, 2.0, 0.0, 1.0})), NotHermitianError);
    CHECK_THROWS_AS(HermitianOperator(Matrix(2, {Complex(1.0, 1.0), 0.0, 0.0, 1.0})), NotHermitianError);
    CHECK_THROWS_AS(HermitianOperator(Matrix(1, {std::nan("")})), FormatError);
    CHECK_NOTHROW(HermitianOperator(Matrix(2, {1.0, Complex(0.0, 1.0), Complex(0.0, -1.0), 1.0})));
}

TEST_CASE("PSD validation clamps roundoff and rejects negative eigenvalues") {
    CHECK_THROWS_AS(PsdOperator(Matrix::diagonal({1.0, -0.5})), NotPsdError);
    const PsdOperator p(Matrix::diagonal({1.0, -1e-13}));
    CHECK(p.rank() == 1);
    CHECK(p.spectrum().eigenvalues[1] == 0.0);
    CHECK(PsdOperator::zero(3).rank() == 0);
}

TEST_CASE("support projection") {
    const auto p1 = support_projection(PsdOperator::diagonal({1.0, 0.0}));
    CHECK(max_abs(p1.matrix() - Matrix::diagonal({1.0, 0.0})) <= 1e-15);

    const auto p0 = support_projection(PsdOperator::zero(3));
    CHECK(p0.rank() == 0);
    CHECK(max_abs(p0.matrix()) == 0.0);

    const auto p2 = support_projection(PsdOperator::diagonal({1.0, 1e-15}), 1e-10);
    CHECK(max_abs(p2.matrix() - Matrix::diagonal({1.0, 0.0})) <= 1e-15);

    // Rank of a random rank-2 operator in dimension 5.
    CHECK(support_projection(random_psd(5, 2, 1.0, 9)).rank() == 2);
}

TEST_CASE("support containment") {
    CHECK(support_contained(PsdOperator::diagonal({1.0, 0.0}), PsdOperator::diagonal({2.0, 3.0})));
    CHECK_FALSE(support_contained(PsdOperator::identity(2), PsdOperator::diagonal({1.0, 0.0})));
    const PsdOperator a = random_psd(4, 3, 1.0, 5);
    CHECK(support_contained(a, a));
    CHECK(support_contained(PsdOperator::zero(4), a));
    CHECK_THROWS_AS(support_contained(PsdOperator::identity(2), PsdOperator::identity(3)), DimensionMismatch);
}

TEST_CASE("Hilbert-Schmidt inner product") {
    CHECK(hs_inner(Matrix::identity(2), Matrix::identity(2)).real() == doctest::Approx(2.0));
    CHECK(hs_inner(Matrix::diagonal({1.0, 2.0}), Matrix::diagonal({3.0, 4.0})).real() == doctest::Approx(11.0));
    const Matrix x = random_hermitian(4, 3);
    const double n = x.hs_norm();
    CHECK(hs_inner(x, x).real() == doctest::Approx(n * n).epsilon(1e-13));
    CHECK(hs_inner(x, x).real() >= 0.0);
    CHECK_THROWS_AS(hs_inner(Matrix::identity(2), Matrix::identity(3)), DimensionMismatch);
}

TEST_CASE("overlap table") {
    const auto d = eig_hermitian(HermitianOperator(Matrix::diagonal({2.0, 1.0})));
    const auto same = overlap_table(d, d);
    CHECK(same.at(0, 0).weight == doctest::Approx(1.0));
    CHECK(same.at(0, 1).weight == doctest::Approx(0.0));

    // Eigenbasis (e1 +- e2)/sqrt2 of the swap matrix.
    const auto h = eig_hermitian(HermitianOperator(Matrix(2, {0.0, 1.0, 1.0, 0.0})));
    const auto t = overlap_table(d, h);
    for (std::size_t i = 0; i < 2; ++i)
        for (std::size_t j = 0; j < 2; ++j) CHECK(t.at(i, j).weight == doctest::Approx(0.5).epsilon(1e-14));

    const PsdOperator a = random_psd(5, 5, std::nullopt, 1);
    const PsdOperator b = random_psd(5, 3, std::nullopt, 2);
    const auto r = overlap_table(a.spectrum(), b.spectrum());
    for (std::size_t i = 0; i < 5; ++i) CHECK(r.row_sum(i) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("matrix functions") {
    const auto s = matrix_function(PsdOperator::diagonal({4.0, 9.0}), [](double x) { return std::sqrt(x); });
    CHECK(max_abs(s.matrix() - Matrix::diagonal({2.0, 3.0})) <= 1e-14);

    const auto l = matrix_function(PsdOperator::identity(3), [](double x) { return std::log(x); });
    CHECK(max_abs(l.matrix()) <= 1e-15);

    const PsdOperator a = random_psd(5, 5, 2.0, 44);
    const auto sq = matrix_function(a, [](double x) { return x * x; });
    CHECK(max_abs(sq.matrix() - a.matrix() * a.matrix()) <= 1e-9);

    try {
        matrix_function(PsdOperator::diagonal({1.0, 0.0}), [](double x) { return std::log(x); });
        FAIL("expected a domain error");
    } catch (const DomainError& e) {
        CHECK(e.eigenvalue() == 0.0);
    }
    // On the support only, the kernel maps to 0.
    const auto ls = support_function(PsdOperator::diagonal({std::exp(1.0), 0.0}), [](double x) { return std::log(x); });
    CHECK(max_abs(ls.matrix() - Matrix::diagonal({1.0, 0.0})) <= 1e-14);
}

TEST_CASE("random samplers are seeded and well-formed") {
    const PsdOperator r = random_psd(3, 1, 1.0, 12345);
    CHECK(r.rank() == 1);
    CHECK(r.trace() == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(random_psd(3, 1, 1.0, 12345).matrix() == r.matrix());
    CHECK_FALSE(random_psd(3, 1, 1.0, 12346).matrix() == r.matrix());
    CHECK_THROWS_AS(random_psd(3, 0, 1.0, 1), ParameterError);
    CHECK_THROWS_AS(random_psd(3, 4, 1.0, 1), ParameterError);

    for (std::size_t n = 1; n <= 6; ++n) {
        const Matrix u = random_unitary(n, n);
        CHECK(unitarity_residual(u) <= 1e-13);
        CHECK(random_rank_one_projection(n, n).rank() == 1);
        CHECK(norm(random_unit_vector(n, n)) == doctest::Approx(1.0));
    }
}

TEST_CASE("projection validation") {
    CHECK(Projection(Matrix::diagonal({1.0, 0.0, 1.0})).rank() == 2);
    CHECK_THROWS_AS(Projection(Matrix::diagonal({0.5, 1.0})), ParameterError);
}

TEST_CASE("kron") {
    const Matrix k = kron(Matrix::diagonal({1.0, 2.0}), Matrix(2, {0.0, 1.0, 1.0, 0.0}));
    CHECK(k.dim() == 4);
    CHECK(k(0, 1) == Complex(1.0));
    CHECK(k(2, 3) == Complex(2.0));
    CHECK(k(0, 3) == Complex(0.0));
}

TEST_CASE("matrix JSON round trip and errors") {
    const Matrix m(2, {2.0, Complex(0.0, 1.0), Complex(0.0, -1.0), 3.0});
    const auto back = parse_matrix_json(dump_matrix_json(m));
    CHECK(max_abs(back.matrix() - m) == 0.0);

    CHECK(parse_matrix_json(R"({"dim": 2, "re": [[1, 0], [0, 1]]})").trace() == doctest::Approx(2.0));
    CHECK_THROWS_AS(parse_matrix_json("{"), FormatError);
    CHECK_THROWS_AS(parse_matrix_json(R"({"dim": 2, "re": [[1, 0]]})"), FormatError);
    CHECK_THROWS_AS(parse_matrix_json(R"({"dim": 2, "re": [[1, 0], [0, "x"]]})"), FormatError);
    CHECK_THROWS_AS(parse_matrix_json(R"({"dim": 2, "re": [[1, 2], [0, 1]]})"), NotHermitianError);
    CHECK_THROWS_AS(load_matrix_json("/nonexistent/a.json"), FormatError);
}
