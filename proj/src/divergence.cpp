#include "qfdiv/divergence.hpp"

#include <cmath>
#include <limits>

namespace qfdiv {

namespace {

void require_same_dim(const PsdOperator& a, const PsdOperator& b) {
    if (a.dim() != b.dim()) throw DimensionMismatch(a.dim(), b.dim());
}

// Eigenvalues with sub-threshold entries snapped to exactly zero.
std::vector<double> snapped_eigenvalues(const PsdOperator& x) {
    std::vector<double> ev = x.spectrum().eigenvalues;
    const double thr = x.zero_threshold();
    for (double& v : ev)
        if (v <= thr) v = 0.0;
    return ev;
}

double f_at_ratio(const GeneratorFunction& f, double a, double b) {
    const double r = a / b;
    return r < kRatioFloor ? f.value_at_zero() : f(r);
}

struct AitkenStep {
    double value;
    bool applied;
};

// Limit of a sequence whose last three terms differ geometrically.
AitkenStep aitken(double x0, double x1, double x2) {
    const double d0 = x1 - x0;
    const double d1 = x2 - x1;
    const double noise = 1e-14 * std::max(1.0, std::abs(x2));
    if (std::abs(d1) <= noise || d0 == 0.0) return {x2, false};
    const double r = d1 / d0;
    if (!(r > 0.0 && r < 0.95)) return {x2, false};
    return {x2 + d1 * r / (1.0 - r), true};
}

}  // namespace

std::string to_string(Route r) {
    switch (r) {
        case Route::spectral: return "spectral";
        case Route::superoperator: return "superop";
        case Route::epsilon_limit: return "limit";
        case Route::closed_form: return "closed_form";
    }
    return "unknown";
}

DivergenceResult divergence_spectral(const PsdOperator& a, const PsdOperator& b, const GeneratorFunction& f,
                                     bool breakdown) {
    require_same_dim(a, b);
    const std::size_t n = a.dim();
    const auto av = snapped_eigenvalues(a);
    const auto bv = snapped_eigenvalues(b);
    const OverlapTable table = overlap_table(a.spectrum(), b.spectrum());
    const ExtendedReal& omega = f.omega();

    DivergenceResult out;
    out.route = Route::spectral;
    out.support_violated = !support_contained(a, b);
    if (breakdown) out.terms.emplace();

    ExtendedReal total(0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            const double w = table.at(i, j).weight;
            ExtendedReal c(0.0);
            if (bv[j] == 0.0) {
                if (omega.is_finite()) {
                    c = ExtendedReal(omega.value() * av[i] * w);
                } else if (out.support_violated && av[i] * w > 1e-20) {
                    c = ExtendedReal::infinity();
                }
            } else {
                c = ExtendedReal(bv[j] * f_at_ratio(f, av[i], bv[j]) * w);
            }
            total += c;
            if (breakdown) out.terms->push_back({av[i], bv[j], w, c});
        }
    if (out.support_violated && omega.is_infinite()) total = ExtendedReal::infinity();
    out.value = total;
    return out;
}

DivergenceResult divergence_superoperator(const PsdOperator& a, const PsdOperator& b, const GeneratorFunction& f) {
    require_same_dim(a, b);
    if (!support_contained(a, b))
        throw ParameterError("superoperator route requires supp A to lie inside supp B");
    const std::size_t n = a.dim();
    const auto av = snapped_eigenvalues(a);
    const auto bv = snapped_eigenvalues(b);
    const Matrix b_half = matrix_function(b, [](double x) { return std::sqrt(x); }).matrix();

    std::vector<std::vector<Complex>> u(n), v(n);
    for (std::size_t k = 0; k < n; ++k) {
        u[k] = a.spectrum().vector(k);
        v[k] = b.spectrum().vector(k);
    }

    // f(L_A R_B^{-1}) B^{1/2} expanded in the eigenbasis E_ij = u_i v_j^dagger.
    Matrix image(n);
    for (std::size_t j = 0; j < n; ++j) {
        if (bv[j] == 0.0) continue;
        for (std::size_t i = 0; i < n; ++i) {
            Matrix e(n);
            for (std::size_t r = 0; r < n; ++r)
                for (std::size_t c = 0; c < n; ++c) e(r, c) = u[i][r] * std::conj(v[j][c]);
            const Complex coeff = hs_inner(b_half, e);
            if (coeff == Complex{}) continue;
            image += e * (f_at_ratio(f, av[i], bv[j]) * coeff);
        }
    }

    DivergenceResult out;
    out.route = Route::superoperator;
    out.value = ExtendedReal(hs_inner(b_half, image).real());
    return out;
}

DivergenceResult divergence_epsilon(const PsdOperator& a, const PsdOperator& b, const GeneratorFunction& f,
                                    double eps) {
    require_same_dim(a, b);
    if (!(eps > 0.0) || !std::isfinite(eps)) throw ParameterError("epsilon must be positive");
    const PsdOperator shifted(b.matrix() + Matrix::identity(b.dim()) * Complex(eps));
    DivergenceResult out = divergence_spectral(a, shifted, f);
    out.route = Route::epsilon_limit;
    out.support_violated = !support_contained(a, b);
    return out;
}

EpsilonSchedule EpsilonSchedule::standard() {
    EpsilonSchedule s;
    for (int k = 1; k <= 8; ++k) s.eps.push_back(std::pow(10.0, -k));
    return s;
}

void EpsilonSchedule::validate() const {
    if (eps.size() < 3) throw ParameterError("epsilon schedule needs at least 3 entries");
    for (std::size_t k = 0; k < eps.size(); ++k) {
        if (!(eps[k] > 0.0)) throw ParameterError("epsilon schedule entries must be positive");
        if (k > 0 && !(eps[k] < eps[k - 1])) throw ParameterError("epsilon schedule must be strictly decreasing");
    }
}

std::pair<DivergenceResult, LimitReport> divergence_limit(const PsdOperator& a, const PsdOperator& b,
                                                          const GeneratorFunction& f,
                                                          const EpsilonSchedule& schedule) {
    schedule.validate();
    LimitReport rep;
    rep.eps = schedule.eps;
    for (double e : schedule.eps) rep.values.push_back(divergence_epsilon(a, b, f, e).value.to_double());

    const auto& v = rep.values;
    const std::size_t n = v.size();
    const double last = v[n - 1];
    const double d1 = v[n - 1] - v[n - 2];
    const double d0 = v[n - 2] - v[n - 3];
    const double noise = 1e-11 * std::max(1.0, std::abs(last));
    const bool steady_growth = d1 > noise && d0 > 0.0 && d1 >= 0.9 * d0;
    const bool runaway = last > 1e12 && d1 > 0.01 * std::abs(v[n - 2]);
    rep.diverges = std::isinf(last) || steady_growth || runaway;

    DivergenceResult out;
    out.route = Route::epsilon_limit;
    out.support_violated = !support_contained(a, b);
    if (rep.diverges) {
        out.value = ExtendedReal::infinity();
        rep.estimate = std::numeric_limits<double>::infinity();
        return {out, rep};
    }

    AitkenStep est{last, false};
    if (n >= 5) {
        const AitkenStep y0 = aitken(v[n - 5], v[n - 4], v[n - 3]);
        const AitkenStep y1 = aitken(v[n - 4], v[n - 3], v[n - 2]);
        const AitkenStep y2 = aitken(v[n - 3], v[n - 2], v[n - 1]);
        const AitkenStep z = aitken(y0.value, y1.value, y2.value);
        est = z.applied ? AitkenStep{z.value, true} : y2;
    } else {
        est = aitken(v[n - 3], v[n - 2], v[n - 1]);
    }
    rep.extrapolated = est.applied;
    rep.estimate = est.value;
    out.value = ExtendedReal(est.value);
    return {out, rep};
}

ExtendedReal umegaki(const PsdOperator& a, const PsdOperator& b) {
    require_same_dim(a, b);
    if (!support_contained(a, b)) return ExtendedReal::infinity();
    auto log = [](double x) { return std::log(x); };
    const Matrix log_a = support_function(a, log).matrix();
    const Matrix log_b = support_function(b, log).matrix();
    return ExtendedReal((a.matrix() * (log_a - log_b)).trace().real());
}

ExtendedReal tsallis_closed(const PsdOperator& a, const PsdOperator& b, double q) {
    require_same_dim(a, b);
    if (!(q > 0.0) || q == 1.0) throw ParameterError("tsallis parameter must satisfy q > 0 and q != 1");
    if (q > 1.0 && !support_contained(a, b)) return ExtendedReal::infinity();
    const Matrix a_q = support_function(a, [q](double x) { return std::pow(x, q); }).matrix();
    const Matrix b_1q = support_function(b, [q](double x) { return std::pow(x, 1.0 - q); }).matrix();
    return ExtendedReal(((a_q * b_1q).trace().real() - a.trace()) / (q - 1.0));
}

double hellinger_sq(const PsdOperator& a, const PsdOperator& b) {
    require_same_dim(a, b);
    auto sqrt = [](double x) { return std::sqrt(x); };
    const Matrix d = matrix_function(a, sqrt).matrix() - matrix_function(b, sqrt).matrix();
    const double nd = d.hs_norm();
    return nd * nd;
}

std::pair<ExtendedReal, ExtendedReal> trace_rule(const PsdOperator& a, double lambda, const GeneratorFunction& f) {
    if (!(lambda >= 0.0)) throw ParameterError("trace rule needs lambda >= 0");
    const ExtendedReal lhs = divergence_spectral(a.scaled(lambda), a, f).value;
    return {lhs, ExtendedReal(f(lambda) * a.trace())};
}

std::pair<ExtendedReal, ExtendedReal> boundary_values(const PsdOperator& a, const PsdOperator& b,
                                                      const GeneratorFunction& f) {
    const double tr_a = a.rank() == 0 ? 0.0 : a.trace();
    const double tr_b = b.rank() == 0 ? 0.0 : b.trace();
    return {tr_a * f.omega(), ExtendedReal(f.value_at_zero() * tr_b)};
}

}  // namespace qfdiv
