#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "qfdiv/divergence.hpp"
#include "qfdiv/errors.hpp"
#include "qfdiv/preserver.hpp"

using namespace qfdiv;

namespace {

const double kTwoLog2 = 1.3862943611198906;

double rel(double x, double y) { return std::abs(x - y) / std::max(1.0, std::abs(y)); }

std::vector<GeneratorFunction> main_generators() {
    return {make_entropy(), make_tsallis(0.5), make_tsallis(2.0), make_sqrt_deviation()};
}

}  // namespace

TEST_CASE("spectral formula examples") {
    const auto ent = make_entropy();
    const PsdOperator i2 = PsdOperator::identity(2);
    CHECK(divergence_spectral(i2, i2, ent).value.value() == doctest::Approx(0.0));
    CHECK(divergence_spectral(PsdOperator::diagonal({2.0, 1.0}), i2, ent).value.value() ==
          doctest::Approx(kTwoLog2).epsilon(1e-14));

    const auto inf = divergence_spectral(i2, PsdOperator::diagonal({1.0, 0.0}), ent);
    CHECK(inf.value.is_infinite());
    CHECK(inf.support_violated);

    CHECK(divergence_spectral(i2, i2, make_affine(2.0, 3.0)).value.value() == doctest::Approx(10.0));
    CHECK_THROWS_AS(divergence_spectral(i2, PsdOperator::identity(3), ent), DimensionMismatch);
}

TEST_CASE("finite omega gives a finite value under support violation") {
    // tsallis 1/2: 1 * f(1) + omega * 1 on the kernel of B.
    const auto t = make_tsallis(0.5);
    const auto v = divergence_spectral(PsdOperator::identity(2), PsdOperator::diagonal({1.0, 0.0}), t);
    CHECK(v.value.value() == doctest::Approx(2.0));
    CHECK(v.support_violated);
}

TEST_CASE("breakdown terms sum to the value") {
    const PsdOperator a = random_psd(3, 3, 1.0, 1);
    const PsdOperator b = random_psd(3, 2, 1.0, 2);
    const auto r = divergence_spectral(a, b, make_sqrt_deviation(), true);
    REQUIRE(r.terms.has_value());
    CHECK(r.terms->size() == 9);
    double sum = 0.0;
    for (const auto& t : *r.terms) sum += t.contribution.value();
    CHECK(sum == doctest::Approx(r.value.value()).epsilon(1e-14));
}

TEST_CASE("commuting pairs match the scalar sum") {
    for (const auto& f : main_generators()) {
        const std::vector<double> a{0.3, 1.7, 2.2};
        const std::vector<double> b{1.1, 0.4, 0.9};
        const double expected = oracle::commuting(a, b, f);
        const auto got = divergence_spectral(PsdOperator(Matrix::diagonal(a)), PsdOperator(Matrix::diagonal(b)), f);
        CHECK(rel(got.value.value(), expected) <= 1e-13);
    }
}

TEST_CASE("superoperator route agrees with the Kronecker oracle and the spectral route") {
    for (const auto& f : main_generators()) {
        for (std::uint64_t s = 0; s < 20; ++s) {
            const std::size_t n = 2 + s % 3;
            const auto p = full_rank_pair(n, mix(99, s));
            const double kr = oracle::kron_superop(p.a, p.b, f);
            const double so = divergence_superoperator(p.a, p.b, f).value.value();
            const double sp = divergence_spectral(p.a, p.b, f).value.value();
            INFO(f.name(), " n=", n, " seed=", s);
            CHECK(rel(so, kr) <= 1e-9);
            CHECK(rel(sp, kr) <= 1e-9);
        }
    }
}

TEST_CASE("superoperator route examples") {
    const auto ent = make_entropy();
    CHECK(divergence_superoperator(PsdOperator::diagonal({2.0, 1.0}), PsdOperator::identity(2), ent).value.value() ==
          doctest::Approx(kTwoLog2).epsilon(1e-13));

    const PsdOperator a = random_psd(4, 4, 2.0, 31);
    const auto sd = make_sqrt_deviation();
    CHECK(divergence_superoperator(a, a, sd).value.value() == doctest::Approx(0.0));
    CHECK(divergence_superoperator(a, a, make_tsallis(2.0)).value.value() == doctest::Approx(0.0));

    // Nested supports are allowed.
    const auto p = nested_pair(4, 5);
    CHECK(rel(divergence_superoperator(p.a, p.b, sd).value.value(), divergence_spectral(p.a, p.b, sd).value.value()) <=
          1e-9);

    CHECK_THROWS_AS(divergence_superoperator(PsdOperator::identity(2), PsdOperator::diagonal({1.0, 0.0}), ent),
                    ParameterError);
}

TEST_CASE("epsilon route") {
    const auto ent = make_entropy();
    const double eps = 1e-4;
    // Commuting closed form: -log(1 + eps) on e1 plus eps f(1/eps) = log(1/eps) on e2.
    const double expected = -std::log1p(eps) - std::log(eps);
    const auto v = divergence_epsilon(PsdOperator::identity(2), PsdOperator::diagonal({1.0, 0.0}), ent, eps);
    CHECK(v.value.value() == doctest::Approx(expected).epsilon(1e-12));
    CHECK(v.value.value() == doctest::Approx(9.2103).epsilon(1e-4));
    CHECK_THROWS_AS(divergence_epsilon(PsdOperator::identity(2), PsdOperator::identity(2), ent, 0.0), ParameterError);

    const PsdOperator a = random_psd(3, 3, 1.0, 8);
    const double at_small = divergence_epsilon(a, a, make_sqrt_deviation(), 1e-9).value.value();
    CHECK(std::abs(at_small) <= 1e-8);
}

TEST_CASE("epsilon limit") {
    const auto ent = make_entropy();
    {
        auto [r, rep] = divergence_limit(PsdOperator::diagonal({2.0, 1.0}), PsdOperator::identity(2), ent);
        CHECK_FALSE(rep.diverges);
        CHECK(r.value.value() == doctest::Approx(kTwoLog2).epsilon(1e-9));
        CHECK(rep.values.size() == 8);
    }
    {
        auto [r, rep] = divergence_limit(PsdOperator::identity(2), PsdOperator::diagonal({1.0, 0.0}), ent);
        CHECK(rep.diverges);
        CHECK(r.value.is_infinite());
    }
    for (const auto& f : {make_tsallis(0.5), make_sqrt_deviation()}) {
        // Finite omega: the limit exists under support violation too.
        const auto p = deficient_pair(4, 17);
        auto [r, rep] = divergence_limit(p.a, p.b, f);
        CHECK_FALSE(rep.diverges);
        CHECK(std::abs(r.value.value() - divergence_spectral(p.a, p.b, f).value.value()) <= 1e-6);
    }
    for (const auto& f : main_generators()) {
        const auto p = nested_pair(5, 3);
        auto [r, rep] = divergence_limit(p.a, p.b, f);
        INFO(f.name());
        CHECK_FALSE(rep.diverges);
        CHECK(std::abs(r.value.value() - divergence_spectral(p.a, p.b, f).value.value()) <= 1e-6);
    }
    CHECK_THROWS_AS(divergence_limit(PsdOperator::identity(2), PsdOperator::identity(2), ent, EpsilonSchedule{{1e-1, 1e-2}}),
                    ParameterError);
    CHECK_THROWS_AS(
        divergence_limit(PsdOperator::identity(2), PsdOperator::identity(2), ent, EpsilonSchedule{{1e-2, 1e-1, 1e-3}}),
        ParameterError);
}

TEST_CASE("closed forms") {
    for (std::uint64_t s = 0; s < 30; ++s) {
        const auto p = sample_pair(2 + s % 4, mix(7, s));
        INFO("seed ", s, " kind ", to_string(p.kind));
        const auto um = umegaki(p.a, p.b);
        const auto sp = divergence_spectral(p.a, p.b, make_entropy()).value;
        CHECK(um.is_infinite() == sp.is_infinite());
        if (um.is_finite()) CHECK(rel(sp.value(), um.value()) <= 1e-9);

        for (double q : {0.5, 2.0, 3.0}) {
            const auto tc = tsallis_closed(p.a, p.b, q);
            const auto ts = divergence_spectral(p.a, p.b, make_tsallis(q)).value;
            CHECK(tc.is_infinite() == ts.is_infinite());
            if (tc.is_finite()) CHECK(rel(ts.value(), tc.value()) <= 1e-9);
        }

        const double h = hellinger_sq(p.a, p.b);
        CHECK(rel(divergence_spectral(p.a, p.b, make_sqrt_deviation()).value.value(), h) <= 1e-9);
    }
    CHECK_THROWS_AS(tsallis_closed(PsdOperator::identity(2), PsdOperator::identity(2), 1.0), ParameterError);
}

TEST_CASE("closed form examples") {
    CHECK(umegaki(PsdOperator::diagonal({2.0, 1.0}), PsdOperator::identity(2)).value() ==
          doctest::Approx(kTwoLog2).epsilon(1e-14));
    CHECK(umegaki(PsdOperator::identity(2), PsdOperator::diagonal({1.0, 0.0})).is_infinite());
    CHECK(hellinger_sq(PsdOperator::diagonal({4.0}), PsdOperator::diagonal({1.0})) == doctest::Approx(1.0));
    CHECK(tsallis_closed(PsdOperator::identity(2), PsdOperator::diagonal({2.0, 2.0}), 2.0).value() ==
          doctest::Approx(-1.0));
    CHECK(tsallis_closed(PsdOperator::identity(2), PsdOperator::diagonal({1.0, 0.0}), 2.0).is_infinite());
    // q < 1 stays finite under support violation: (tr P - tr I)/(q - 1) = 2.
    CHECK(tsallis_closed(PsdOperator::identity(2), PsdOperator::diagonal({1.0, 0.0}), 0.5).value() ==
          doctest::Approx(2.0));
}

TEST_CASE("trace rule, homogeneity and boundary values") {
    const PsdOperator a = random_psd(3, 2, 1.5, 4);
    for (const auto& f : main_generators()) {
        for (double l : {0.0, 0.25, 1.0, 3.0}) {
            const auto [lhs, rhs] = trace_rule(a, l, f);
            CHECK(std::abs(lhs.value() - rhs.value()) <= 1e-10 * std::max(1.0, std::abs(rhs.value())));
        }
        const auto p = full_rank_pair(3, 11);
        const double base = divergence_spectral(p.a, p.b, f).value.value();
        const double scaled = divergence_spectral(p.a.scaled(2.5), p.b.scaled(2.5), f).value.value();
        CHECK(rel(scaled, 2.5 * base) <= 1e-10);
    }

    const auto sd = make_sqrt_deviation();
    const auto [sa0, s0b] = boundary_values(PsdOperator::identity(2), PsdOperator::identity(2), sd);
    CHECK(sa0.value() == doctest::Approx(2.0));
    CHECK(s0b.value() == doctest::Approx(2.0));
    const auto [z, e3] = boundary_values(PsdOperator::zero(2), PsdOperator::identity(3), make_entropy());
    CHECK(z.value() == 0.0);
    CHECK(e3.value() == 0.0);

    // The spectral route agrees at the boundary.
    const PsdOperator x = random_psd(3, 3, 2.0, 12);
    CHECK(divergence_spectral(x, PsdOperator::zero(3), sd).value.value() == doctest::Approx(2.0));
    CHECK(divergence_spectral(PsdOperator::zero(3), x, sd).value.value() == doctest::Approx(2.0));
    CHECK(divergence_spectral(PsdOperator::zero(3), PsdOperator::zero(3), make_entropy()).value.value() == 0.0);
    CHECK(divergence_spectral(x, PsdOperator::zero(3), make_entropy()).value.is_infinite());
}

TEST_CASE("affine generators give alpha tr A + beta tr B") {
    for (std::uint64_t s = 0; s < 20; ++s) {
        const auto p = sample_pair(2 + s % 4, mix(21, s));
        const double v = divergence_spectral(p.a, p.b, make_affine(-1.5, 2.0)).value.value();
        CHECK(std::abs(v - (-1.5 * p.a.trace() + 2.0 * p.b.trace())) <= 1e-10 * std::max(1.0, std::abs(v)));
    }
}

TEST_CASE("route names") {
    CHECK(to_string(Route::spectral) == "spectral");
    CHECK(to_string(Route::superoperator) == "superop");
    CHECK(to_string(Route::epsilon_limit) == "limit");
}
