#pragma once

#include <array>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qfdiv/extended_real.hpp"

namespace qfdiv {

/// A generator f: [0, inf) -> R of a quantum f-divergence, with its value at
/// zero and its asymptotic slope omega = lim f(x)/x.
///
/// f(0) is stored separately from the evaluator so that generators with a
/// jump at the origin (x^2 - 1 for x > 0, 0 at x = 0) are representable.
class GeneratorFunction {
public:
    using Eval = std::function<double(double)>;

    GeneratorFunction(std::string name, Eval eval, double value_at_zero, ExtendedReal omega,
                      bool analytic_omega, std::optional<bool> strictly_convex = std::nullopt);

    double operator()(double x) const;

    const std::string& name() const noexcept { return name_; }
    double value_at_zero() const noexcept { return value_at_zero_; }
    const ExtendedReal& omega() const noexcept { return omega_; }
    bool analytic_omega() const noexcept { return analytic_omega_; }
    // Known convexity status: true/false for built-ins, unset for custom generators.
    std::optional<bool> strictly_convex() const noexcept { return strictly_convex_; }

    // Range on which f is resolvable in double precision; used to build the
    // default certification grid. Far tails of e^{-x} round to a constant.
    std::pair<double, double> certification_range() const noexcept { return cert_range_; }
    GeneratorFunction& with_certification_range(double lo, double hi);

    // Convex f with omega <= 0 is nonincreasing; strictly convex makes it strictly decreasing.
    bool decreasing() const noexcept { return omega_.is_finite() && omega_.value() <= 0.0; }

    // Right limit at 0 is approximated by evaluating at the smallest normal double.
    double eval_positive(double x) const;

private:
    std::string name_;
    Eval eval_;
    double value_at_zero_;
    ExtendedReal omega_;
    bool analytic_omega_;
    std::optional<bool> strictly_convex_;
    std::pair<double, double> cert_range_{1e-3, 1e3};
};

GeneratorFunction make_entropy();
GeneratorFunction make_tsallis(double q);
GeneratorFunction make_sqrt_deviation();
GeneratorFunction make_affine(double alpha, double beta);
// f(x) = e^{1-x} - 1: strictly convex, strictly decreasing, f(1) = 0, omega = 0.
GeneratorFunction make_exp_decay();
// omega is estimated from eval when not supplied. Throws if eval is not finite
// on the probe grid.
GeneratorFunction make_custom(std::string name, GeneratorFunction::Eval eval, double value_at_zero,
                              std::optional<ExtendedReal> omega = std::nullopt);

/// Limit of (f(x) - f(0))/x along x = 2^k, k = 10..40.
///
/// Declares +inf when the quotient exceeds 1e12 or still grows by more than
/// 1e-6 (relative) over the last doubling. Throws ParameterError when the
/// sequence decreases, which convex f cannot produce.
ExtendedReal estimate_omega(const GeneratorFunction::Eval& f, double value_at_zero);
inline ExtendedReal estimate_omega(const GeneratorFunction& f) {
    return estimate_omega([&f](double x) { return f(x); }, f.value_at_zero());
}

struct ConvexityCertificate {
    bool passed = false;
    std::vector<double> grid;
    std::size_t triples_checked = 0;
    // First (x_i, x_j, x_k) at which a difference quotient failed to increase strictly.
    std::optional<std::array<double, 3>> witness;
    std::string message;
};

std::vector<double> geometric_grid(double lo, double hi, std::size_t count);
// {0} followed by 61 geometric points over the generator's certification range.
std::vector<double> default_certification_grid(const GeneratorFunction& f);

/// Grid test of the difference-quotient criterion: h(a, b) = (f(a) - f(b))/(a - b)
/// must increase strictly in each argument. For every triple x_i < x_j < x_k
/// this is h(x_i, x_j) < h(x_i, x_k) < h(x_j, x_k), each gap required to exceed
/// the rounding noise of the quotients involved.
ConvexityCertificate certify_strict_convexity(const GeneratorFunction& f, std::vector<double> grid);
inline ConvexityCertificate certify_strict_convexity(const GeneratorFunction& f) {
    return certify_strict_convexity(f, default_certification_grid(f));
}

struct Infimum {
    double value = 0.0;   // K = inf f; -inf when unbounded below
    double argmin = 0.0;  // minimizer, or where the infimum is approached
    bool attained = false;
    bool finite() const noexcept { return std::isfinite(value); }
};

/// inf over [0, inf) of a convex generator.
Infimum infimum(const GeneratorFunction& f);

/// Builds a built-in from its CLI label: entropy, tsallis:<q>, sqrt-dev,
/// affine:<alpha>:<beta>, exp-dec. Unknown labels raise ParameterError
/// listing the known ones.
GeneratorFunction parse_generator(const std::string& label);
const std::vector<std::string>& known_generator_labels();

}  // namespace qfdiv
