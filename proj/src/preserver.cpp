#include "qfdiv/preserver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "parallel.hpp"

namespace qfdiv {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kRankOneTol = 1e-8;

std::string fmt(double x) {
    std::ostringstream os;
    os.precision(12);
    os << x;
    return os.str();
}

double uniform(Rng& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

std::size_t uniform_index(Rng& rng, std::size_t lo, std::size_t hi) {
    return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

double relative_gap(double x, double y) { return std::abs(x - y) / std::max(1.0, std::abs(x)); }

struct Comparison {
    double abs = 0.0;
    double rel = 0.0;
    bool mismatch = false;  // exactly one side infinite
    bool both_infinite = false;
};

Comparison compare(const ExtendedReal& before, const ExtendedReal& after) {
    Comparison c;
    if (before.is_infinite() || after.is_infinite()) {
        c.both_infinite = before.is_infinite() && after.is_infinite();
        c.mismatch = !c.both_infinite;
        if (c.mismatch) c.abs = c.rel = kInf;
        return c;
    }
    c.abs = std::abs(before.value() - after.value());
    c.rel = c.abs / std::max(1.0, std::abs(before.value()));
    return c;
}

void check_dim(const TransformSpec& t, const PsdOperator& a) {
    if (t.kind != TransformKind::custom && t.u.dim() != a.dim()) throw DimensionMismatch(t.u.dim(), a.dim());
}

PsdOperator embed_conjugated(const Matrix& u, const Matrix& block, std::size_t dim) {
    Matrix m(dim);
    for (std::size_t i = 0; i < block.dim(); ++i)
        for (std::size_t j = 0; j < block.dim(); ++j) m(i, j) = block(i, j);
    return PsdOperator(u * m * u.adjoint(), 1e-10);
}

// Top eigenvector of an operator that must be rank one.
std::vector<Complex> rank_one_vector(const Matrix& m, const std::string& probe) {
    const HermitianOperator h(m, 1e-8 * std::max(1.0, m.hs_norm()));
    const SpectralDecomposition d = eig_hermitian(h);
    const double top = std::max(std::abs(d.eigenvalues.front()), 1.0);
    for (std::size_t k = 1; k < d.dim(); ++k) {
        if (std::abs(d.eigenvalues[k]) > kRankOneTol * top)
            throw NotConjugationError("not a conjugation: probe " + probe +
                                      " maps to an operator that is not rank one (eigenvalue " +
                                      fmt(d.eigenvalues[k]) + ")");
    }
    if (d.eigenvalues.front() <= kRankOneTol)
        throw NotConjugationError("not a conjugation: probe " + probe + " maps to zero");
    return d.vector(0);
}

Matrix basis_projection(std::size_t dim, std::size_t i) {
    Matrix p(dim);
    p(i, i) = 1.0;
    return p;
}

Matrix superposition_projection(std::size_t dim, std::size_t i, std::size_t j, Complex phase) {
    std::vector<Complex> v(dim);
    v[i] = 1.0 / std::sqrt(2.0);
    v[j] = phase / std::sqrt(2.0);
    return Matrix::outer(v);
}

}  // namespace

std::string to_string(TransformKind k) {
    switch (k) {
        case TransformKind::unitary: return "unitary";
        case TransformKind::antiunitary: return "antiunitary";
        case TransformKind::custom: return "custom";
    }
    return "unknown";
}

std::string to_string(PairKind k) {
    switch (k) {
        case PairKind::full_rank: return "full_rank";
        case PairKind::rank_deficient: return "rank_deficient";
        case PairKind::nested_support: return "nested_support";
        case PairKind::scalar_multiple: return "scalar_multiple";
        case PairKind::rank_one: return "rank_one";
    }
    return "unknown";
}

// ---------------------------------------------------------------------------
// Transforms

TransformSpec TransformSpec::unitary(Matrix u) {
    if (unitarity_residual(u) > 1e-10) throw ParameterError("matrix is not unitary");
    TransformSpec t;
    t.kind = TransformKind::unitary;
    t.u = std::move(u);
    t.name = "unitary";
    return t;
}

TransformSpec TransformSpec::antiunitary(Matrix u) {
    TransformSpec t = unitary(std::move(u));
    t.kind = TransformKind::antiunitary;
    t.name = "antiunitary";
    return t;
}

TransformSpec TransformSpec::custom(std::string name, std::function<Matrix(const PsdOperator&)> fn,
                                    bool concurrent_safe) {
    if (!fn) throw ParameterError("custom transform needs a map");
    TransformSpec t;
    t.kind = TransformKind::custom;
    t.custom_apply = std::move(fn);
    t.name = std::move(name);
    t.concurrent_safe = concurrent_safe;
    return t;
}

TransformSpec TransformSpec::pinching() {
    return custom("pinching", [](const PsdOperator& a) {
        Matrix d(a.dim());
        for (std::size_t i = 0; i < a.dim(); ++i) d(i, i) = a.matrix()(i, i);
        return d;
    });
}

TransformSpec TransformSpec::averaging() {
    return custom("averaging", [](const PsdOperator& a) {
        return Matrix::identity(a.dim()) * Complex(a.trace() / static_cast<double>(a.dim()));
    });
}

TransformSpec TransformSpec::transpose() {
    return custom("transpose", [](const PsdOperator& a) { return a.matrix().transpose(); });
}

TransformSpec parse_transform(const std::string& label, std::size_t dim) {
    if (label == "pinching") return TransformSpec::pinching();
    if (label == "averaging") return TransformSpec::averaging();
    if (label == "transpose") return TransformSpec::transpose();
    const auto colon = label.find(':');
    if (colon != std::string::npos) {
        const std::string head = label.substr(0, colon);
        const std::string tail = label.substr(colon + 1);
        std::uint64_t seed = 0;
        std::size_t pos = 0;
        try {
            seed = std::stoull(tail, &pos);
        } catch (const std::exception&) {
            pos = std::string::npos;
        }
        if (pos != tail.size() || tail.empty() || tail.front() == '-')
            throw ParameterError("invalid seed in transform '" + label + "'");
        if (head == "unitary") {
            auto t = TransformSpec::unitary(random_unitary(dim, seed));
            t.name = label;
            return t;
        }
        if (head == "antiunitary") {
            auto t = TransformSpec::antiunitary(random_unitary(dim, seed));
            t.name = label;
            return t;
        }
    }
    throw ParameterError("unknown transform '" + label +
                         "'; known transforms: unitary:<seed>, antiunitary:<seed>, pinching, averaging, transpose");
}

PsdOperator apply(const TransformSpec& t, const PsdOperator& a) {
    check_dim(t, a);
    Matrix m;
    switch (t.kind) {
        case TransformKind::unitary: m = t.u * a.matrix() * t.u.adjoint(); break;
        case TransformKind::antiunitary: m = t.u * a.matrix().conj() * t.u.adjoint(); break;
        case TransformKind::custom:
            m = t.custom_apply(a);
            if (m.dim() != a.dim()) throw DimensionMismatch(m.dim(), a.dim());
            return PsdOperator(HermitianOperator(m, 1e-10 * std::max(1.0, m.hs_norm())));
    }
    return PsdOperator(HermitianOperator(m, 1e-12 * std::max(1.0, m.hs_norm())));
}

PsdMap as_map(TransformSpec t) {
    return [t = std::move(t)](const PsdOperator& a) { return apply(t, a); };
}

// ---------------------------------------------------------------------------
// Sampling

SampledPair full_rank_pair(std::size_t dim, std::uint64_t seed) {
    auto rng = make_rng(mix(seed, 10));
    const double ta = uniform(rng, 0.5, 2.0);
    const double tb = uniform(rng, 0.5, 2.0);
    return {random_psd(dim, dim, ta, mix(seed, 11)), random_psd(dim, dim, tb, mix(seed, 12)), PairKind::full_rank};
}

SampledPair deficient_pair(std::size_t dim, std::uint64_t seed) {
    if (dim < 2) throw ParameterError("a rank-deficient pair needs dim >= 2");
    auto rng = make_rng(mix(seed, 20));
    const std::size_t rb = uniform_index(rng, 1, dim - 1);
    const std::size_t ra = uniform_index(rng, 1, dim);
    const double ta = uniform(rng, 0.5, 2.0);
    const double tb = uniform(rng, 0.5, 2.0);
    return {random_psd(dim, ra, ta, mix(seed, 21)), random_psd(dim, rb, tb, mix(seed, 22)),
            PairKind::rank_deficient};
}

SampledPair nested_pair(std::size_t dim, std::uint64_t seed) {
    if (dim < 2) throw ParameterError("a nested pair needs dim >= 2");
    auto rng = make_rng(mix(seed, 30));
    const std::size_t rb = uniform_index(rng, 1, dim - 1);
    const std::size_t ra = uniform_index(rng, 1, rb);
    const double ta = uniform(rng, 0.5, 2.0);
    const double tb = uniform(rng, 0.5, 2.0);
    const Matrix u = random_unitary(dim, mix(seed, 31));
    const PsdOperator wb = random_psd(rb, rb, tb, mix(seed, 32));
    const PsdOperator wa = random_psd(rb, ra, ta, mix(seed, 33));
    return {embed_conjugated(u, wa.matrix(), dim), embed_conjugated(u, wb.matrix(), dim), PairKind::nested_support};
}

SampledPair sample_pair(std::size_t dim, std::uint64_t seed) {
    auto rng = make_rng(mix(seed, 0));
    const double pick = uniform(rng, 0.0, 1.0);
    if (pick < 0.4 || (dim < 2 && pick < 0.7)) return full_rank_pair(dim, seed);
    if (pick < 0.7) {
        return uniform(rng, 0.0, 1.0) < 1.0 / 3.0 ? nested_pair(dim, seed) : deficient_pair(dim, seed);
    }
    if (pick < 0.9) {
        const std::size_t ra = uniform_index(rng, 1, dim);
        const double lambda = uniform(rng, 0.2, 5.0);
        const PsdOperator a = random_psd(dim, ra, uniform(rng, 0.5, 2.0), mix(seed, 40));
        return {a, a.scaled(lambda), PairKind::scalar_multiple};
    }
    const double s = uniform(rng, 0.5, 2.0);
    const double t = uniform(rng, 0.5, 2.0);
    const PsdOperator p(random_rank_one_projection(dim, mix(seed, 50)).matrix() * Complex(s));
    const PsdOperator q(random_rank_one_projection(dim, mix(seed, 51)).matrix() * Complex(t));
    return {p, q, PairKind::rank_one};
}

std::size_t SamplerConfig::dim_for_trial(std::uint64_t k) const {
    if (dim_min < 1 || dim_max < dim_min) throw ParameterError("invalid sampler dimension range");
    const std::uint64_t span = dim_max - dim_min + 1;
    return dim_min + static_cast<std::size_t>(mix(seed ^ 0x5DEECE66DULL, k) % span);
}

// ---------------------------------------------------------------------------
// Preservation

namespace {

struct TrialOutcome {
    Comparison cmp;
    double trace_dev = 0.0;
};

TrialOutcome run_trial(const TransformSpec& t, const GeneratorFunction& f, const SampledPair& pair) {
    const PsdOperator pa = apply(t, pair.a);
    const PsdOperator pb = apply(t, pair.b);
    TrialOutcome out;
    out.cmp = compare(divergence_spectral(pair.a, pair.b, f).value, divergence_spectral(pa, pb, f).value);
    out.trace_dev = std::max(std::abs(pa.trace() - pair.a.trace()), std::abs(pb.trace() - pair.b.trace()));
    return out;
}

PreservationReport summarize(const std::vector<TrialOutcome>& outcomes) {
    PreservationReport rep;
    rep.trials = outcomes.size();
    for (std::size_t k = 0; k < outcomes.size(); ++k) {
        const auto& o = outcomes[k];
        rep.max_trace_deviation = std::max(rep.max_trace_deviation, o.trace_dev);
        if (o.cmp.both_infinite) ++rep.infinite_pairs;
        if (o.cmp.mismatch) ++rep.infinite_mismatches;
        if (o.cmp.rel > rep.max_rel_deviation || (k == 0 && o.cmp.rel == 0.0)) {
            if (o.cmp.rel > rep.max_rel_deviation) rep.worst_trial = k;
            rep.max_rel_deviation = std::max(rep.max_rel_deviation, o.cmp.rel);
        }
        rep.max_abs_deviation = std::max(rep.max_abs_deviation, o.cmp.abs);
    }
    return rep;
}

}  // namespace

PreservationReport check_preservation(const TransformSpec& t, const GeneratorFunction& f,
                                      const SamplerConfig& config) {
    if (config.trials < 1) throw ParameterError("trials must be >= 1");
    std::vector<TrialOutcome> outcomes(config.trials);
    detail::parallel_for(
        0, config.trials,
        [&](std::size_t k) {
            const std::size_t dim = t.kind == TransformKind::custom ? config.dim_for_trial(k) : t.u.dim();
            outcomes[k] = run_trial(t, f, sample_pair(dim, mix(config.seed, k)));
        },
        t.concurrent_safe);
    return summarize(outcomes);
}

PreservationReport check_preservation(const TransformFactory& make, const GeneratorFunction& f,
                                      const SamplerConfig& config) {
    if (config.trials < 1) throw ParameterError("trials must be >= 1");
    std::vector<TrialOutcome> outcomes(config.trials);
    detail::parallel_for(0, config.trials, [&](std::size_t k) {
        const std::size_t dim = config.dim_for_trial(k);
        const std::uint64_t s = mix(config.seed, k);
        const TransformSpec t = make(dim, mix(s, 999));
        outcomes[k] = run_trial(t, f, sample_pair(dim, s));
    });
    return summarize(outcomes);
}

std::optional<Witness> falsify(const TransformSpec& t, const GeneratorFunction& f, std::size_t dim,
                               std::size_t budget, double threshold, std::uint64_t seed) {
    if (budget < 1) throw ParameterError("falsification budget must be >= 1");
    if (!(threshold >= 0.0)) throw ParameterError("threshold must be >= 0");
    constexpr std::size_t kBlock = 64;
    for (std::size_t start = 0; start < budget; start += kBlock) {
        const std::size_t stop = std::min(budget, start + kBlock);
        std::vector<std::optional<Witness>> found(stop - start);
        detail::parallel_for(
            start, stop,
            [&](std::size_t k) {
                const SampledPair pair = sample_pair(dim, mix(seed, k));
                const ExtendedReal before = divergence_spectral(pair.a, pair.b, f).value;
                const ExtendedReal after = divergence_spectral(apply(t, pair.a), apply(t, pair.b), f).value;
                const Comparison c = compare(before, after);
                if (c.abs > threshold) found[k - start] = Witness{k, pair.a, pair.b, before, after, c.abs};
            },
            t.concurrent_safe);
        for (auto& w : found)
            if (w) return w;
    }
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// Recovery

RecoveryResult recover_operator(const PsdMap& phi, std::size_t dim, std::uint64_t seed) {
    if (dim < 1) throw ParameterError("dimension must be >= 1");
    auto probe = [&](const Matrix& p) {
        const PsdOperator out = phi(PsdOperator(p));
        if (out.dim() != dim) throw DimensionMismatch(out.dim(), dim);
        return out.matrix();
    };

    // Columns up to phase.
    std::vector<std::vector<Complex>> cols(dim);
    for (std::size_t i = 0; i < dim; ++i)
        cols[i] = rank_one_vector(probe(basis_projection(dim, i)), "E_" + std::to_string(i + 1));

    // Relative phases from real superpositions with the first basis vector.
    for (std::size_t j = 1; j < dim; ++j) {
        const Matrix out = probe(superposition_projection(dim, 0, j, 1.0));
        rank_one_vector(out, "(e_1 + e_" + std::to_string(j + 1) + ")/sqrt2");
        const Complex c = inner(cols[0], out * cols[j]);
        if (std::abs(c) < 1e-6)
            throw NotConjugationError("not a conjugation: superposition probe has no overlap with column 1");
        const Complex fix = std::conj(c) / std::abs(c);
        for (auto& z : cols[j]) z *= fix;
    }

    // Gauge: first nonzero entry of column 1 real positive.
    for (const Complex& z : cols[0]) {
        if (std::abs(z) > 1e-12) {
            const Complex g = std::conj(z) / std::abs(z);
            for (auto& col : cols)
                for (auto& w : col) w *= g;
            break;
        }
    }

    RecoveryResult res;
    res.u_hat = Matrix(dim);
    for (std::size_t j = 0; j < dim; ++j) res.u_hat.set_column(j, cols[j]);
    res.unitarity_residual = unitarity_residual(res.u_hat);

    std::vector<Matrix> probes;
    if (dim >= 2) {
        const Matrix pc = superposition_projection(dim, 0, 1, Complex(0.0, 1.0));
        const Matrix out = probe(pc);
        rank_one_vector(out, "(e_1 + i e_2)/sqrt2");
        res.unitary_probe_residual = (res.u_hat * pc * res.u_hat.adjoint() - out).hs_norm();
        res.antiunitary_probe_residual = (res.u_hat * pc.conj() * res.u_hat.adjoint() - out).hs_norm();
        const double lo = std::min(res.unitary_probe_residual, res.antiunitary_probe_residual);
        const double hi = std::max(res.unitary_probe_residual, res.antiunitary_probe_residual);
        if (hi < 1e3 * lo)
            throw NotConjugationError("not a conjugation: unitary and antiunitary hypotheses are not separated (" +
                                      fmt(res.unitary_probe_residual) + " vs " +
                                      fmt(res.antiunitary_probe_residual) + ")");
        res.kind_hat = res.unitary_probe_residual <= res.antiunitary_probe_residual ? TransformKind::unitary
                                                                                   : TransformKind::antiunitary;
        probes.push_back(pc);
    }

    TransformSpec fitted;
    fitted.kind = res.kind_hat;
    fitted.u = res.u_hat;

    for (std::size_t i = 0; i < dim; ++i) probes.push_back(basis_projection(dim, i));
    for (std::size_t j = 1; j < dim; ++j) probes.push_back(superposition_projection(dim, 0, j, 1.0));
    for (std::uint64_t k = 0; k < 3; ++k)
        probes.push_back(random_psd(dim, dim, std::nullopt, mix(seed, k)).matrix());

    double worst = 0.0;
    for (const Matrix& p : probes) {
        const PsdOperator a(p);
        worst = std::max(worst, (apply(fitted, a).matrix() - probe(p)).hs_norm());
    }
    // Scaled slices: phi(l P)/l must act like phi(P) for every l > 0.
    for (double l : {0.5, 3.0}) {
        const Matrix p = basis_projection(dim, 0);
        const Matrix scaled = probe(p * Complex(l)) * Complex(1.0 / l);
        worst = std::max(worst, (apply(fitted, PsdOperator(p)).matrix() - scaled).hs_norm());
    }
    res.action_residual = worst;
    return res;
}

// ---------------------------------------------------------------------------
// Proof ingredients

ExtremalReport extremal_checks(const GeneratorFunction& f, const PsdOperator& a, ExtremalMode mode,
                               std::size_t trials, std::uint64_t seed, double tol) {
    if (!certify_strict_convexity(f).passed)
        throw ParameterError("extremal checks need a certified strictly convex generator");
    const std::size_t dim = a.dim();
    const double tr_a = a.trace();
    const PsdOperator zero = PsdOperator::zero(dim);

    ExtremalReport rep;
    rep.mode = mode;
    rep.trials = trials;

    std::vector<double> grid;
    if (mode == ExtremalMode::maximum) {
        if (!f.decreasing())
            throw ParameterError("maximum check needs a strictly decreasing generator (omega <= 0)");
        rep.bound = f.value_at_zero() * tr_a;
        rep.extreme_sampled = -kInf;
        rep.attaining_scale = 0.0;
        grid = {0.0, 0.5, 1.0, 2.0, 4.0};
    } else {
        const Infimum inf = infimum(f);
        if (!inf.finite()) throw ParameterError("infimum check needs inf f to be finite");
        rep.bound = inf.value * tr_a;
        rep.extreme_sampled = kInf;
        const double ls = std::isinf(inf.argmin) ? 64.0 : inf.argmin;
        rep.attaining_scale = ls;
        if (ls == 0.0)
            grid = {0.0, 1e-9, 1e-6};
        else
            grid = {ls * (1.0 - 1e-3), ls, ls * (1.0 + 1e-3)};
    }
    const double slack = tol * std::max(1.0, std::abs(rep.bound));

    std::vector<double> values(trials);
    detail::parallel_for(0, trials, [&](std::size_t k) {
        const std::uint64_t s = mix(seed, k);
        auto rng = make_rng(mix(s, 0));
        const double pick = uniform(rng, 0.0, 1.0);
        PsdOperator x;
        if (pick < 0.5) {
            const std::size_t r = uniform_index(rng, 1, dim);
            x = random_psd(dim, r, uniform(rng, 0.01, 10.0) * std::max(tr_a, 1e-3), mix(s, 1));
        } else if (pick < 0.8) {
            x = a.scaled(uniform(rng, 0.0, 5.0));
        } else {
            x = PsdOperator(random_rank_one_projection(dim, mix(s, 2)).matrix() * Complex(uniform(rng, 0.01, 5.0)));
        }
        values[k] = divergence_spectral(x, a, f).value.to_double();
    });
    for (double v : values) {
        if (mode == ExtremalMode::maximum) {
            rep.extreme_sampled = std::max(rep.extreme_sampled, v);
            if (v > rep.bound + slack) ++rep.violations;
        } else {
            rep.extreme_sampled = std::min(rep.extreme_sampled, v);
            if (v < rep.bound - slack) ++rep.violations;
        }
    }

    rep.boundary_value = divergence_spectral(zero, a, f).value.to_double();
    double best = kInf;
    for (double l : grid) {
        const auto [lhs, rhs] = trace_rule(a, l, f);
        rep.trace_rule_gap = std::max(rep.trace_rule_gap, std::abs(lhs.to_double() - rhs.to_double()));
        best = std::min(best, lhs.to_double());
    }
    rep.attainment_gap = mode == ExtremalMode::maximum ? std::abs(rep.boundary_value - rep.bound) : best - rep.bound;
    rep.passed = rep.violations == 0 && std::abs(rep.attainment_gap) <= slack && rep.trace_rule_gap <= slack;
    return rep;
}

ZeroCharacterizationReport zero_characterization(const GeneratorFunction& f, const PsdOperator& x,
                                                 std::size_t trials, std::uint64_t seed, double lambda,
                                                 double mu) {
    if (std::abs(f(1.0)) > 1e-12) throw ParameterError("zero characterization needs f(1) = 0");
    ZeroCharacterizationReport rep;
    rep.x_is_zero = x.rank() == 0;
    const std::size_t dim = x.dim();

    if (rep.x_is_zero) {
        const Infimum inf = infimum(f);
        if (!inf.finite() || std::abs(inf.value) > 1e-9)
            throw ParameterError("triangle bound at 0 needs inf f = 0 (f > 0 away from 1)");
        rep.trials = trials;
        std::vector<double> slacks(trials);
        detail::parallel_for(0, trials, [&](std::size_t k) {
            SampledPair pair = sample_pair(dim, mix(seed, k));
            if (k == 0) pair.a = PsdOperator::zero(dim);
            if (k == 1) pair.b = PsdOperator::zero(dim);
            const ExtendedReal direct = divergence_spectral(pair.a, pair.b, f).value;
            const ExtendedReal via_zero = divergence_spectral(pair.a, x, f).value + divergence_spectral(x, pair.b, f).value;
            if (via_zero.is_infinite())
                slacks[k] = kInf;
            else if (direct.is_infinite())
                slacks[k] = -kInf;
            else
                slacks[k] = (via_zero.value() - direct.value()) / std::max(1.0, std::abs(direct.value()));
        });
        rep.min_slack = kInf;
        for (double s : slacks) {
            rep.min_slack = std::min(rep.min_slack, s);
            if (s < -1e-9) ++rep.violations;
        }
        rep.passed = rep.violations == 0;
        return rep;
    }

    if (!(lambda > 1.0 && mu > 1.0)) throw ParameterError("superadditivity witness needs lambda, mu > 1");
    rep.trials = 1;
    const PsdOperator lx = x.scaled(lambda);
    const PsdOperator lmx = x.scaled(lambda * mu);
    rep.lhs = divergence_spectral(lmx, lx, f).value.value() + divergence_spectral(lx, x, f).value.value();
    rep.rhs = divergence_spectral(lmx, x, f).value.value();
    rep.margin = rep.rhs - rep.lhs;
    rep.expected_margin = x.trace() * superadditivity_margin(f, lambda, mu);
    rep.passed = rep.margin > 0.0 &&
                 std::abs(rep.margin - rep.expected_margin) <= 1e-9 * std::max(1.0, std::abs(rep.rhs));
    return rep;
}

RankOneOverlapReport rank_one_overlap_check(const GeneratorFunction& f, const Projection& p, double lambda,
                                            double mu, const std::optional<Projection>& q) {
    if (!(lambda > 0.0 && mu > 0.0)) throw ParameterError("rank-one overlap check needs lambda, mu > 0");
    if (p.rank() != 1) throw ParameterError("rank-one overlap check needs a rank-one projection");
    RankOneOverlapReport rep;
    const PsdOperator pp(p.matrix());
    rep.value = divergence_spectral(pp.scaled(lambda), pp.scaled(mu), f).value;
    rep.expected = mu * f(lambda / mu);
    rep.identity_gap = rep.value.is_finite() ? relative_gap(rep.expected, rep.value.value()) : kInf;

    if (f.omega().is_finite()) {
        rep.bracket = lambda * f.omega().value() + mu * f.value_at_zero() - mu * f(lambda / mu);
        rep.bracket_positive = *rep.bracket > 0.0;
    } else {
        rep.note = "omega = +inf: bracket is +inf";
    }

    bool cross_ok = true;
    if (q) {
        if (q->rank() != 1) throw ParameterError("rank-one overlap check needs a rank-one projection");
        const double t = hs_inner(p.matrix(), q->matrix()).real();
        rep.overlap = t;
        const PsdOperator qq(q->matrix());
        rep.cross_value = divergence_spectral(pp.scaled(lambda), qq.scaled(mu), f).value;
        const double miss = std::max(0.0, 1.0 - t);
        rep.cross_expected = ExtendedReal(mu * f(lambda / mu) * t + mu * f.value_at_zero() * miss) +
                             (lambda * miss) * f.omega();
        // A nearly aligned pair is inside the support tolerance and counts as t = 1.
        if (rep.cross_value->is_infinite() != rep.cross_expected->is_infinite())
            cross_ok = false;
        else
            cross_ok = approx_equal(*rep.cross_value, *rep.cross_expected, 1e-9);
    }
    rep.passed = rep.identity_gap <= 1e-10 && rep.bracket_positive && cross_ok;
    return rep;
}

double superadditivity_margin(const GeneratorFunction& f, double lambda, double mu) {
    return f(lambda * mu) - lambda * f(mu) - f(lambda);
}

double slope_gap(const GeneratorFunction& f, double a, double b) {
    if (!(0.0 < b && b < a)) throw ParameterError("slope gap needs 0 < b < a");
    if (f.omega().is_infinite()) return kInf;
    return f.omega().value() - (b / a) * f(a / b);
}

}  // namespace qfdiv
