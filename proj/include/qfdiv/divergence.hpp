#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qfdiv/extended_real.hpp"
#include "qfdiv/generator.hpp"
#include "qfdiv/linalg.hpp"

namespace qfdiv {

enum class Route { spectral, superoperator, epsilon_limit, closed_form };

std::string to_string(Route r);

// One rank-one contribution to the spectral sum.
struct DivergenceTerm {
    double a;
    double b;
    double weight;
    ExtendedReal contribution;
};

struct DivergenceResult {
    ExtendedReal value;
    Route route = Route::spectral;
    bool support_violated = false;
    std::optional<std::vector<DivergenceTerm>> terms;
};

// Ratios a/b below this evaluate as f(0).
inline constexpr double kRatioFloor = 1e-14;

/// S_f(A||B) from the eigen-expansion
///   sum_{i,j} w_ij * (b_j f(a_i / b_j)   if b_j > 0,
///                     omega_f a_i      if b_j = 0),   w_ij = |<u_i, v_j>|^2.
///
/// Eigenvalues at or below the zero threshold of their operator count as 0.
/// When omega_f = +inf the kernel-of-B terms are decided by support
/// containment: +inf if supp A escapes supp B, otherwise they vanish.
DivergenceResult divergence_spectral(const PsdOperator& a, const PsdOperator& b, const GeneratorFunction& f,
                                     bool breakdown = false);

/// <B^{1/2}, f(L_A R_B^{-1}) B^{1/2}>_HS with the modular operator acting on
/// the Hilbert-Schmidt space of matrices whose columns lie in supp B. Its
/// eigenbasis is {u_i v_j^dagger} with eigenvalues a_i / b_j; the operator
/// f(L_A R_B^{-1}) B^{1/2} is materialized before taking the inner product.
/// Throws ParameterError when supp A is not contained in supp B.
DivergenceResult divergence_superoperator(const PsdOperator& a, const PsdOperator& b, const GeneratorFunction& f);

/// divergence_spectral(A, B + eps I, f).
DivergenceResult divergence_epsilon(const PsdOperator& a, const PsdOperator& b, const GeneratorFunction& f,
                                    double eps);

struct EpsilonSchedule {
    std::vector<double> eps;

    // 1e-1, 1e-2, ..., 1e-8
    static EpsilonSchedule standard();
    // Throws ParameterError unless strictly decreasing and positive with >= 3 entries.
    void validate() const;
};

struct LimitReport {
    std::vector<double> eps;
    std::vector<double> values;
    bool diverges = false;
    bool extrapolated = false;  // false: the last value was returned as is
    double estimate = 0.0;
};

/// Evaluates S_f(A||B + eps I) along the schedule and extracts the eps -> 0 limit.
///
/// Divergence: the last increment is positive, non-contracting (ratio >= 0.9
/// to the previous one) and above noise, or the values pass 1e12 while still
/// growing by more than 1% per step. Otherwise the tail is treated as a sum of
/// geometric components in the decade index and removed by repeated Aitken
/// delta-squared on the last five values.
std::pair<DivergenceResult, LimitReport> divergence_limit(const PsdOperator& a, const PsdOperator& b,
                                                          const GeneratorFunction& f,
                                                          const EpsilonSchedule& schedule = EpsilonSchedule::standard());

// tr A (log A - log B) on supp A; +inf when supp A is not inside supp B.
ExtendedReal umegaki(const PsdOperator& a, const PsdOperator& b);
// (1/(q-1)) tr(A^q B^{1-q} - A), B^{1-q} taken on supp B; +inf for q > 1 under support violation.
ExtendedReal tsallis_closed(const PsdOperator& a, const PsdOperator& b, double q);
// ||sqrt A - sqrt B||_HS^2
double hellinger_sq(const PsdOperator& a, const PsdOperator& b);

/// (S_f(lambda A || A), f(lambda) tr A)
std::pair<ExtendedReal, ExtendedReal> trace_rule(const PsdOperator& a, double lambda, const GeneratorFunction& f);

/// (S_f(A || 0), S_f(0 || B)) = (omega_f tr A, f(0) tr B), with 0 * inf = 0.
std::pair<ExtendedReal, ExtendedReal> boundary_values(const PsdOperator& a, const PsdOperator& b,
                                                      const GeneratorFunction& f);

}  // namespace qfdiv
