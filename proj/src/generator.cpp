#include "qfdiv/generator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <boost/math/tools/minima.hpp>

namespace qfdiv {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

std::string fmt(double x) {
    std::ostringstream os;
    os.precision(12);
    os << x;
    return os.str();
}

double parse_number(const std::string& text, const std::string& label) {
    std::size_t pos = 0;
    double v = 0.0;
    try {
        v = std::stod(text, &pos);
    } catch (const std::exception&) {
        throw ParameterError("invalid number '" + text + "' in generator label '" + label + "'");
    }
    if (pos != text.size() || !std::isfinite(v))
        throw ParameterError("invalid number '" + text + "' in generator label '" + label + "'");
    return v;
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == sep) {
            out.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    out.push_back(cur);
    return out;
}

}  // namespace

GeneratorFunction::GeneratorFunction(std::string name, Eval eval, double value_at_zero, ExtendedReal omega,
                                     bool analytic_omega, std::optional<bool> strictly_convex)
    : name_(std::move(name)),
      eval_(std::move(eval)),
      value_at_zero_(value_at_zero),
      omega_(omega),
      analytic_omega_(analytic_omega),
      strictly_convex_(strictly_convex) {
    if (!std::isfinite(value_at_zero_)) throw ParameterError("generator value at 0 must be finite");
}

double GeneratorFunction::operator()(double x) const {
    if (!(x >= 0.0)) throw ParameterError("generator evaluated outside [0, inf): " + fmt(x));
    if (x == 0.0) return value_at_zero_;
    return eval_(x);
}

double GeneratorFunction::eval_positive(double x) const {
    return eval_(std::max(x, std::numeric_limits<double>::min()));
}

GeneratorFunction& GeneratorFunction::with_certification_range(double lo, double hi) {
    if (!(lo > 0.0 && hi > lo)) throw ParameterError("certification range must satisfy 0 < lo < hi");
    cert_range_ = {lo, hi};
    return *this;
}

// ---------------------------------------------------------------------------
// Built-ins

GeneratorFunction make_entropy() {
    return GeneratorFunction(
        "entropy", [](double x) { return x > 0.0 ? x * std::log(x) : 0.0; }, 0.0, ExtendedReal::infinity(),
        true, true);
}

GeneratorFunction make_tsallis(double q) {
    if (!(q > 0.0) || q == 1.0 || !std::isfinite(q))
        throw ParameterError("tsallis parameter must satisfy q > 0 and q != 1 (got " + fmt(q) + ")");
    const ExtendedReal omega = q > 1.0 ? ExtendedReal::infinity() : ExtendedReal(1.0 / (1.0 - q));
    return GeneratorFunction(
        "tsallis:" + fmt(q), [q](double x) { return (std::pow(x, q) - x) / (q - 1.0); }, 0.0, omega, true,
        true);
}

GeneratorFunction make_sqrt_deviation() {
    return GeneratorFunction(
        "sqrt-dev",
        [](double x) {
            const double r = std::sqrt(x) - 1.0;
            return r * r;
        },
        1.0, ExtendedReal(1.0), true, true);
}

GeneratorFunction make_affine(double alpha, double beta) {
    // omega = alpha may be negative; ExtendedReal holds any finite value.
    return GeneratorFunction(
        "affine:" + fmt(alpha) + ":" + fmt(beta), [alpha, beta](double x) { return alpha * x + beta; }, beta,
        ExtendedReal(alpha), true, false);
}

GeneratorFunction make_exp_decay() {
    GeneratorFunction g(
        "exp-dec", [](double x) { return std::exp(1.0 - x) - 1.0; }, std::exp(1.0) - 1.0, ExtendedReal(0.0),
        true, true);
    // e^{1-x} drops below double resolution of -1 past x ~ 37.
    g.with_certification_range(1e-3, 30.0);
    return g;
}

GeneratorFunction make_custom(std::string name, GeneratorFunction::Eval eval, double value_at_zero,
                              std::optional<ExtendedReal> omega) {
    if (!eval) throw ParameterError("custom generator needs an evaluator");
    for (double x : geometric_grid(1e-3, 1e3, 61)) {
        const double y = eval(x);
        if (!std::isfinite(y))
            throw ParameterError("custom generator '" + name + "' is not finite at x = " + fmt(x));
    }
    const bool analytic = omega.has_value();
    const ExtendedReal w = analytic ? *omega : estimate_omega(eval, value_at_zero);
    return GeneratorFunction(std::move(name), std::move(eval), value_at_zero, w, analytic, std::nullopt);
}

// ---------------------------------------------------------------------------
// omega

ExtendedReal estimate_omega(const GeneratorFunction::Eval& f, double value_at_zero) {
    constexpr int kFirst = 10;
    constexpr int kLast = 40;
    double prev = 0.0;
    for (int k = kFirst; k <= kLast; ++k) {
        const double x = std::ldexp(1.0, k);
        const double fx = f(x);
        if (!std::isfinite(fx)) throw ParameterError("generator is not finite at x = 2^" + std::to_string(k));
        const double h = (fx - value_at_zero) / x;
        if (h > 1e12) return ExtendedReal::infinity();
        if (k > kFirst) {
            if (h < prev - 1e-9 * std::max(1.0, std::abs(prev)))
                throw ParameterError("not convex-like: f(x)/x decreases between 2^" + std::to_string(k - 1) +
                                     " and 2^" + std::to_string(k));
            if (k == kLast && h - prev > 1e-6 * std::max(1.0, std::abs(h))) return ExtendedReal::infinity();
        }
        prev = h;
    }
    return ExtendedReal(prev);
}

// ---------------------------------------------------------------------------
// Convexity certificate

std::vector<double> geometric_grid(double lo, double hi, std::size_t count) {
    if (!(lo > 0.0 && hi > lo) || count < 2) throw ParameterError("invalid geometric grid");
    std::vector<double> g(count);
    const double step = std::log(hi / lo) / static_cast<double>(count - 1);
    for (std::size_t i = 0; i < count; ++i) g[i] = lo * std::exp(step * static_cast<double>(i));
    g.back() = hi;
    return g;
}

std::vector<double> default_certification_grid(const GeneratorFunction& f) {
    const auto [lo, hi] = f.certification_range();
    std::vector<double> grid{0.0};
    const auto geo = geometric_grid(lo, hi, 61);
    grid.insert(grid.end(), geo.begin(), geo.end());
    return grid;
}

ConvexityCertificate certify_strict_convexity(const GeneratorFunction& f, std::vector<double> grid) {
    ConvexityCertificate cert;
    cert.grid = std::move(grid);
    const auto& x = cert.grid;
    if (x.size() < 3) {
        cert.message = "grid needs at least 3 points";
        return cert;
    }
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!(x[i] >= 0.0) || (i > 0 && !(x[i] > x[i - 1]))) {
            cert.message = "grid must be strictly increasing in [0, inf)";
            return cert;
        }
    }

    std::vector<double> y(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        y[i] = f(x[i]);
        if (!std::isfinite(y[i])) {
            cert.message = "f is not finite at " + fmt(x[i]);
            cert.witness = std::array<double, 3>{x[i], x[i], x[i]};
            return cert;
        }
    }

    const std::size_t n = x.size();
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            const double hij = (y[j] - y[i]) / (x[j] - x[i]);
            for (std::size_t k = j + 1; k < n; ++k) {
                const double hik = (y[k] - y[i]) / (x[k] - x[i]);
                const double hjk = (y[k] - y[j]) / (x[k] - x[j]);
                // Quotient error is ~eps * (|f_a| + |f_b|) / (b - a); bound all three.
                const double mag = std::abs(y[i]) + std::abs(y[j]) + std::abs(y[k]);
                const double noise = 4.0 * kEps * mag *
                                     (1.0 / (x[j] - x[i]) + 1.0 / (x[k] - x[i]) + 1.0 / (x[k] - x[j]));
                ++cert.triples_checked;
                if (!(hik - hij > noise) || !(hjk - hik > noise)) {
                    cert.witness = std::array<double, 3>{x[i], x[j], x[k]};
                    cert.message = "difference quotient not strictly increasing at (" + fmt(x[i]) + ", " +
                                   fmt(x[j]) + ", " + fmt(x[k]) + ")";
                    return cert;
                }
            }
        }
    cert.passed = true;
    cert.message = "strictly convex on " + std::to_string(n) + "-point grid";
    return cert;
}

// ---------------------------------------------------------------------------
// Infimum

Infimum infimum(const GeneratorFunction& f) {
    Infimum out;
    const ExtendedReal& w = f.omega();
    if (w.is_finite() && w.value() < 0.0) {
        out.value = -std::numeric_limits<double>::infinity();
        out.argmin = std::numeric_limits<double>::infinity();
        return out;
    }
    if (f.decreasing()) {
        // Nonincreasing: the infimum is the limit at infinity.
        double last = f(1.0);
        for (int k = 1; k <= 60; ++k) {
            const double v = f(std::ldexp(1.0, k));
            if (v == last) break;
            last = v;
        }
        out.value = std::min(last, f.value_at_zero());
        out.argmin = std::numeric_limits<double>::infinity();
        out.attained = f.value_at_zero() <= last;
        if (out.attained) out.argmin = 0.0;
        return out;
    }

    double hi = 1.0;
    while (hi < 1e18 && f.eval_positive(2.0 * hi) < f.eval_positive(hi)) hi *= 2.0;
    hi *= 2.0;
    auto g = [&f](double x) { return f.eval_positive(x); };
    const auto [xmin, fmin] =
        boost::math::tools::brent_find_minima(g, 0.0, hi, std::numeric_limits<double>::digits);

    const double f0 = f.value_at_zero();
    if (f0 <= fmin) {
        out.value = f0;
        out.argmin = 0.0;
        out.attained = true;
        return out;
    }
    out.value = fmin;
    out.argmin = xmin;
    // A minimizer squeezed against 0 with f(0) above it is an unattained infimum.
    out.attained = xmin > 1e-6 * hi;
    return out;
}

// ---------------------------------------------------------------------------
// Labels

const std::vector<std::string>& known_generator_labels() {
    static const std::vector<std::string> labels{"entropy", "tsallis:<q>", "sqrt-dev", "affine:<alpha>:<beta>",
                                                 "exp-dec"};
    return labels;
}

GeneratorFunction parse_generator(const std::string& label) {
    const auto parts = split(label, ':');
    const std::string& head = parts.front();
    if (head == "entropy" && parts.size() == 1) return make_entropy();
    if (head == "sqrt-dev" && parts.size() == 1) return make_sqrt_deviation();
    if (head == "exp-dec" && parts.size() == 1) return make_exp_decay();
    if (head == "tsallis" && parts.size() == 2) return make_tsallis(parse_number(parts[1], label));
    if (head == "affine" && parts.size() == 3)
        return make_affine(parse_number(parts[1], label), parse_number(parts[2], label));

    std::string known;
    for (const auto& l : known_generator_labels()) known += (known.empty() ? "" : ", ") + l;
    throw ParameterError("unknown generator '" + label + "'; known generators: " + known);
}

}  // namespace qfdiv
