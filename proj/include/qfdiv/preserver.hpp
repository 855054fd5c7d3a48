#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "qfdiv/divergence.hpp"
#include "qfdiv/generator.hpp"
#include "qfdiv/linalg.hpp"
#include "qfdiv/rng.hpp"

namespace qfdiv {

enum class TransformKind { unitary, antiunitary, custom };

std::string to_string(TransformKind k);

using PsdMap = std::function<PsdOperator(const PsdOperator&)>;

/// A map on the PSD cone: A -> U A U^dagger, A -> U conj(A) U^dagger, or a
/// user-supplied map whose outputs are re-validated as PSD.
struct TransformSpec {
    TransformKind kind = TransformKind::unitary;
    Matrix u;
    std::function<Matrix(const PsdOperator&)> custom_apply;
    std::string name;
    // Custom maps flagged unsafe are probed from a single thread.
    bool concurrent_safe = true;

    static TransformSpec unitary(Matrix u);
    static TransformSpec antiunitary(Matrix u);
    static TransformSpec custom(std::string name, std::function<Matrix(const PsdOperator&)> fn,
                                bool concurrent_safe = true);

    // Keeps the diagonal in the standard basis.
    static TransformSpec pinching();
    // A -> (tr A / n) I
    static TransformSpec averaging();
    // A -> A^T, the antiunitary with U = I.
    static TransformSpec transpose();
};

/// unitary:<seed>, antiunitary:<seed>, pinching, averaging, transpose.
TransformSpec parse_transform(const std::string& label, std::size_t dim);

/// Throws NotPsdError (naming the eigenvalue) when a custom map leaves the cone.
PsdOperator apply(const TransformSpec& t, const PsdOperator& a);

PsdMap as_map(TransformSpec t);

// ---------------------------------------------------------------------------
// Sampling

enum class PairKind { full_rank, rank_deficient, nested_support, scalar_multiple, rank_one };

std::string to_string(PairKind k);

struct SampledPair {
    PsdOperator a;
    PsdOperator b;
    PairKind kind;
};

/// Draws (A, B) with the mix 40% full rank, 30% rank-deficient B (a third of
/// those with supp A inside supp B), 20% scalar multiples B = lambda A, 10%
/// scaled rank-one projections.
SampledPair sample_pair(std::size_t dim, std::uint64_t seed);

SampledPair full_rank_pair(std::size_t dim, std::uint64_t seed);
// rank B < dim, and supp A inside supp B.
SampledPair nested_pair(std::size_t dim, std::uint64_t seed);
// rank B < dim, A generic (full rank or random rank).
SampledPair deficient_pair(std::size_t dim, std::uint64_t seed);

struct SamplerConfig {
    std::size_t dim_min = 2;
    std::size_t dim_max = 6;
    std::size_t trials = 100;
    std::uint64_t seed = kDefaultSeed;

    std::size_t dim_for_trial(std::uint64_t k) const;
};

// ---------------------------------------------------------------------------
// Preservation

struct PreservationReport {
    std::size_t trials = 0;
    double max_abs_deviation = 0.0;
    // |before - after| / max(1, |before|)
    double max_rel_deviation = 0.0;
    std::size_t worst_trial = 0;
    std::size_t infinite_mismatches = 0;
    std::size_t infinite_pairs = 0;
    double max_trace_deviation = 0.0;

    bool held(double tol) const { return infinite_mismatches == 0 && max_rel_deviation <= tol; }
};

using TransformFactory = std::function<TransformSpec(std::size_t dim, std::uint64_t seed)>;

/// Compares S_f(phi A || phi B) against S_f(A || B) over sampled pairs.
/// Every trial k uses its own seed mix(config.seed, k).
PreservationReport check_preservation(const TransformSpec& t, const GeneratorFunction& f,
                                      const SamplerConfig& config);
/// As above with a fresh transform per trial: (T, A, B) triples.
PreservationReport check_preservation(const TransformFactory& make, const GeneratorFunction& f,
                                      const SamplerConfig& config);

struct Witness {
    std::size_t trial = 0;
    PsdOperator a;
    PsdOperator b;
    ExtendedReal before;
    ExtendedReal after;
    double deviation = 0.0;  // +inf when exactly one side is infinite
};

/// First trial (in index order) whose divergence moves by more than `threshold`.
std::optional<Witness> falsify(const TransformSpec& t, const GeneratorFunction& f, std::size_t dim,
                               std::size_t budget, double threshold, std::uint64_t seed = kDefaultSeed);

// ---------------------------------------------------------------------------
// Recovery

struct RecoveryResult {
    Matrix u_hat;
    TransformKind kind_hat = TransformKind::unitary;
    double unitarity_residual = 0.0;
    double action_residual = 0.0;
    // Residuals of the two hypotheses at the complex superposition probe.
    double unitary_probe_residual = 0.0;
    double antiunitary_probe_residual = 0.0;
};

/// Reconstructs U from a black-box conjugation.
///
/// Probes: E_ii gives the columns up to phase; (e_1 + e_j)/sqrt2 fixes the
/// relative phases; (e_1 + i e_2)/sqrt2 decides unitary vs antiunitary. The
/// gauge makes the first nonzero entry of the first column real positive.
/// Throws NotConjugationError if a rank-one probe does not map to a rank-one
/// operator, or if the classification is ambiguous.
RecoveryResult recover_operator(const PsdMap& phi, std::size_t dim, std::uint64_t seed = kDefaultSeed);

// ---------------------------------------------------------------------------
// Proof ingredients

enum class ExtremalMode { maximum, infimum };

struct ExtremalReport {
    ExtremalMode mode = ExtremalMode::maximum;
    double bound = 0.0;             // f(0) tr A, or K tr A
    double extreme_sampled = 0.0;   // max (resp. min) of S_f(X || A) over samples
    std::size_t trials = 0;
    std::size_t violations = 0;
    double boundary_value = 0.0;    // S_f(0 || A)
    double attainment_gap = 0.0;    // distance from the bound at the attaining/approaching operator
    double attaining_scale = 0.0;   // X = 0 (max) or X = lambda* A (inf)
    double trace_rule_gap = 0.0;    // max |S_f(l A || A) - f(l) tr A| over the probe grid
    bool passed = false;
};

/// maximum: S_f(X||A) <= f(0) tr A for strictly decreasing f, equality at X = 0.
/// infimum: S_f(X||A) >= K tr A with K = inf f, approached along lambda A.
/// Throws ParameterError when f does not satisfy the mode's hypothesis.
ExtremalReport extremal_checks(const GeneratorFunction& f, const PsdOperator& a, ExtremalMode mode,
                               std::size_t trials, std::uint64_t seed = kDefaultSeed, double tol = 1e-9);

struct ZeroCharacterizationReport {
    bool x_is_zero = false;
    std::size_t trials = 0;
    std::size_t violations = 0;
    double min_slack = 0.0;  // X = 0: min of S(A||0) + S(0||B) - S(A||B)
    // X != 0: S(lm X || l X) + S(l X || X) versus S(lm X || X)
    double lhs = 0.0;
    double rhs = 0.0;
    double margin = 0.0;
    double expected_margin = 0.0;
    bool passed = false;
};

/// X = 0 branch needs f(1) = 0 and inf f = 0; X != 0 branch needs f(1) = 0.
ZeroCharacterizationReport zero_characterization(const GeneratorFunction& f, const PsdOperator& x,
                                                 std::size_t trials, std::uint64_t seed = kDefaultSeed,
                                                 double lambda = 2.0, double mu = 2.0);

struct RankOneOverlapReport {
    ExtendedReal value;     // S_f(lambda P || mu P)
    double expected = 0.0;  // mu f(lambda / mu)
    double identity_gap = 0.0;
    // lambda omega + mu f(0) - mu f(lambda / mu); unset when omega = +inf.
    std::optional<double> bracket;
    bool bracket_positive = true;
    // Two distinct projections: S_f(lambda P || mu Q) against the expansion in t = tr PQ.
    std::optional<double> overlap;
    std::optional<ExtendedReal> cross_value;
    std::optional<ExtendedReal> cross_expected;
    std::string note;
    bool passed = false;
};

RankOneOverlapReport rank_one_overlap_check(const GeneratorFunction& f, const Projection& p, double lambda,
                                            double mu, const std::optional<Projection>& q = std::nullopt);

// f(lambda mu) - lambda f(mu) - f(lambda); positive for lambda, mu > 1 when f(1) = 0.
double superadditivity_margin(const GeneratorFunction& f, double lambda, double mu);

// omega - (b/a) f(a/b) for 0 < b < a; +inf when omega = +inf.
double slope_gap(const GeneratorFunction& f, double a, double b);

}  // namespace qfdiv
