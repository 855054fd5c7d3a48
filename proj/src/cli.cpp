#include "qfdiv/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ostream>
#include <sstream>

#include "qfdiv/divergence.hpp"
#include "qfdiv/generator.hpp"
#include "qfdiv/matrix_io.hpp"
#include "qfdiv/preserver.hpp"

namespace qfdiv::cli {

namespace {

using Json = nlohmann::ordered_json;

// 12 significant digits, so repeated runs print identical bytes.
Json number(double x) {
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    if (std::isnan(x)) return "nan";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", x);
    return std::strtod(buf, nullptr);
}

Json number(const ExtendedReal& x) { return x.is_infinite() ? Json("inf") : number(x.value()); }

Json matrix_json(const Matrix& m) {
    Json re = Json::array();
    Json im = Json::array();
    for (std::size_t i = 0; i < m.dim(); ++i) {
        Json rr = Json::array();
        Json ir = Json::array();
        for (std::size_t j = 0; j < m.dim(); ++j) {
            rr.push_back(number(m(i, j).real()));
            ir.push_back(number(m(i, j).imag()));
        }
        re.push_back(rr);
        im.push_back(ir);
    }
    return Json{{"dim", m.dim()}, {"re", re}, {"im", im}};
}

Json generator_json(const std::string& label, const GeneratorFunction& f) {
    return Json{{"label", label},
                {"name", f.name()},
                {"f0", number(f.value_at_zero())},
                {"omega", number(f.omega())}};
}

std::string seed_string(std::uint64_t seed) { return std::to_string(seed); }

std::string scalar_text(const Json& v) {
    if (v.is_string()) return v.get<std::string>();
    return v.dump();
}

void write_text(const Json& j, std::ostream& out, const std::string& prefix = "") {
    for (auto it = j.begin(); it != j.end(); ++it) {
        const std::string key = prefix.empty() ? it.key() : prefix + "." + it.key();
        if (it->is_object())
            write_text(*it, out, key);
        else
            out << key << ": " << scalar_text(*it) << "\n";
    }
}

void emit(const Json& report, OutputFormat format, std::ostream& out) {
    if (format == OutputFormat::json)
        out << report.dump(2) << "\n";
    else
        write_text(report, out);
}

TransformKind expected_kind(const std::string& label) {
    if (label.rfind("antiunitary", 0) == 0 || label == "transpose") return TransformKind::antiunitary;
    return TransformKind::unitary;
}

int run_compute(const RunConfig& c, std::ostream& out) {
    const GeneratorFunction f = parse_generator(c.generator);
    const PsdOperator a(load_matrix_json(c.a_path));
    const PsdOperator b(load_matrix_json(c.b_path));
    if (a.dim() != b.dim()) throw DimensionMismatch(a.dim(), b.dim());

    Json report;
    report["command"] = "compute";
    report["generator"] = generator_json(c.generator, f);
    report["route"] = c.route;

    DivergenceResult res;
    if (c.route == "spectral") {
        res = divergence_spectral(a, b, f, c.breakdown);
    } else if (c.route == "superop") {
        res = divergence_superoperator(a, b, f);
    } else {
        auto [r, rep] = divergence_limit(a, b, f);
        res = r;
        Json eps = Json::array();
        for (std::size_t k = 0; k < rep.eps.size(); ++k)
            eps.push_back(Json{{"eps", number(rep.eps[k])}, {"value", number(rep.values[k])}});
        report["limit"] = Json{{"diverges", rep.diverges}, {"extrapolated", rep.extrapolated}, {"schedule", eps}};
    }
    report["value"] = number(res.value);
    report["support_violated"] = !support_contained(a, b);
    report["seed"] = seed_string(c.seed);

    if (c.format == OutputFormat::json) {
        if (res.terms) {
            Json terms = Json::array();
            for (const auto& t : *res.terms)
                terms.push_back(Json{{"a", number(t.a)},
                                     {"b", number(t.b)},
                                     {"weight", number(t.weight)},
                                     {"contribution", number(t.contribution)}});
            report["terms"] = terms;
        }
        emit(report, c.format, out);
    } else {
        emit(report, c.format, out);
        if (res.terms) {
            out << "a,b,weight,contribution\n";
            for (const auto& t : *res.terms)
                out << scalar_text(number(t.a)) << "," << scalar_text(number(t.b)) << ","
                    << scalar_text(number(t.weight)) << "," << scalar_text(number(t.contribution)) << "\n";
        }
    }
    return kExitExpected;
}

int run_verify(const RunConfig& c, std::ostream& out) {
    const GeneratorFunction f = parse_generator(c.generator);
    const TransformSpec t = parse_transform(c.transform, c.dim);
    const SamplerConfig sc{c.dim, c.dim, c.trials, c.seed};
    const PreservationReport rep = check_preservation(t, f, sc);
    const bool held = rep.held(c.tol);

    Json report;
    report["command"] = "verify";
    report["generator"] = generator_json(c.generator, f);
    report["transform"] = c.transform;
    report["dim"] = c.dim;
    report["trials"] = rep.trials;
    report["tol"] = number(c.tol);
    report["deviation"] = Json{{"max_abs", number(rep.max_abs_deviation)},
                               {"max_rel", number(rep.max_rel_deviation)},
                               {"worst_trial", rep.worst_trial}};
    report["trace_deviation"] = number(rep.max_trace_deviation);
    report["infinite_pairs"] = rep.infinite_pairs;
    report["infinite_mismatches"] = rep.infinite_mismatches;
    report["held"] = held;
    report["seed"] = seed_string(c.seed);
    emit(report, c.format, out);
    return held ? kExitExpected : kExitUnexpected;
}

int run_recover(const RunConfig& c, std::ostream& out, std::ostream& err) {
    const TransformSpec t = parse_transform(c.transform, c.dim);
    Json report;
    report["command"] = "recover";
    report["phi"] = c.transform;
    report["dim"] = c.dim;
    try {
        const RecoveryResult r = recover_operator(as_map(t), c.dim, c.seed);
        const bool kind_ok = r.kind_hat == expected_kind(c.transform);
        const bool ok = kind_ok && r.action_residual <= 1e-8;
        report["kind"] = to_string(r.kind_hat);
        report["residuals"] = Json{{"unitarity", number(r.unitarity_residual)},
                                   {"action", number(r.action_residual)},
                                   {"unitary_probe", number(r.unitary_probe_residual)},
                                   {"antiunitary_probe", number(r.antiunitary_probe_residual)}};
        report["u_hat"] = matrix_json(r.u_hat);
        report["recovered"] = ok;
        report["seed"] = seed_string(c.seed);
        emit(report, c.format, out);
        return ok ? kExitExpected : kExitUnexpected;
    } catch (const NotConjugationError& e) {
        report["recovered"] = false;
        report["error"] = e.what();
        report["seed"] = seed_string(c.seed);
        emit(report, c.format, out);
        err << "qfdiv: " << e.what() << "\n";
        return kExitUnexpected;
    }
}

int run_falsify(const RunConfig& c, std::ostream& out) {
    const GeneratorFunction f = parse_generator(c.generator);
    const TransformSpec t = parse_transform(c.transform, c.dim);
    const auto w = falsify(t, f, c.dim, c.budget, c.threshold, c.seed);

    Json report;
    report["command"] = "falsify";
    report["generator"] = generator_json(c.generator, f);
    report["transform"] = c.transform;
    report["dim"] = c.dim;
    report["budget"] = c.budget;
    report["threshold"] = number(c.threshold);
    if (w) {
        report["witness"] = Json{{"trial", w->trial},
                                 {"before", number(w->before)},
                                 {"after", number(w->after)},
                                 {"deviation", number(w->deviation)},
                                 {"a", matrix_json(w->a.matrix())},
                                 {"b", matrix_json(w->b.matrix())}};
    } else {
        report["witness"] = nullptr;
    }
    report["seed"] = seed_string(c.seed);
    emit(report, c.format, out);
    return w ? kExitExpected : kExitUnexpected;
}

std::string generator_help() {
    std::string s;
    for (const auto& l : known_generator_labels()) s += (s.empty() ? "" : ", ") + l;
    return s;
}

}  // namespace

RunConfig parse_args(const std::vector<std::string>& args) {
    RunConfig c;
    CLI::App app{"Quantum f-divergences and their preservers", "qfdiv"};
    app.require_subcommand(1);

    std::string format = "text";
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--seed", c.seed, "random seed")->default_str(std::to_string(kDefaultSeed));
        sub->add_option("--format", format, "output format")->check(CLI::IsMember({"text", "json"}));
    };
    auto add_f = [&](CLI::App* sub) {
        sub->add_option("--f", c.generator, "generator: " + generator_help())->required();
    };

    CLI::App* compute = app.add_subcommand("compute", "evaluate S_f(A||B) for matrices in JSON files");
    add_f(compute);
    compute->add_option("--a", c.a_path, "matrix A (JSON)")->required();
    compute->add_option("--b", c.b_path, "matrix B (JSON)")->required();
    compute->add_option("--route", c.route, "evaluation route")
        ->check(CLI::IsMember({"spectral", "superop", "limit"}));
    compute->add_flag("--breakdown", c.breakdown, "print the per-term table");
    add_common(compute);

    CLI::App* verify = app.add_subcommand("verify", "check that a transform preserves S_f");
    add_f(verify);
    verify->add_option("--transform", c.transform, "unitary:<seed>|antiunitary:<seed>|pinching|averaging|transpose")
        ->required();
    verify->add_option("--dim", c.dim, "dimension")->check(CLI::PositiveNumber);
    verify->add_option("--trials", c.trials, "number of sampled pairs")->check(CLI::PositiveNumber);
    verify->add_option("--tol", c.tol, "relative tolerance")->check(CLI::NonNegativeNumber);
    add_common(verify);

    CLI::App* recover = app.add_subcommand("recover", "reconstruct the (anti)unitary behind a conjugation");
    recover->add_option("--phi", c.transform, "unitary:<seed>|antiunitary:<seed>|transpose|pinching|averaging")
        ->required();
    recover->add_option("--dim", c.dim, "dimension")->check(CLI::PositiveNumber);
    add_common(recover);

    CLI::App* falsifier = app.add_subcommand("falsify", "search for a pair whose divergence a transform moves");
    add_f(falsifier);
    falsifier->add_option("--transform", c.transform, "transform label")->required();
    falsifier->add_option("--dim", c.dim, "dimension")->check(CLI::PositiveNumber);
    falsifier->add_option("--budget", c.budget, "maximum number of trials")->check(CLI::PositiveNumber);
    falsifier->add_option("--threshold", c.threshold, "absolute deviation threshold")
        ->check(CLI::NonNegativeNumber);
    add_common(falsifier);

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        throw UsageError("help requested", app.help(), true);
    } catch (const CLI::CallForAllHelp&) {
        throw UsageError("help requested", app.help("", CLI::AppFormatMode::All), true);
    } catch (const CLI::ParseError& e) {
        throw UsageError(e.what(), app.help());
    }

    const CLI::App* chosen = app.get_subcommands().front();
    if (chosen == compute) c.command = Command::compute;
    else if (chosen == verify) c.command = Command::verify;
    else if (chosen == recover) c.command = Command::recover;
    else c.command = Command::falsify;
    c.format = format == "json" ? OutputFormat::json : OutputFormat::text;

    try {
        if (c.command != Command::recover) parse_generator(c.generator);
        if (c.command != Command::compute) parse_transform(c.transform, c.dim);
    } catch (const ParameterError& e) {
        throw UsageError(e.what(), chosen->help());
    }
    return c;
}

int run(const RunConfig& config, std::ostream& out, std::ostream& err) {
    try {
        switch (config.command) {
            case Command::compute: return run_compute(config, out);
            case Command::verify: return run_verify(config, out);
            case Command::recover: return run_recover(config, out, err);
            case Command::falsify: return run_falsify(config, out);
        }
    } catch (const FormatError& e) {
        err << "qfdiv: " << e.what() << "\n";
        return kExitUsage;
    } catch (const NotHermitianError& e) {
        err << "qfdiv: " << e.what() << "\n";
        return kExitUsage;
    } catch (const NotPsdError& e) {
        err << "qfdiv: " << e.what() << "\n";
        return kExitUsage;
    } catch (const DimensionMismatch& e) {
        err << "qfdiv: " << e.what() << "\n";
        return kExitUsage;
    } catch (const ParameterError& e) {
        err << "qfdiv: " << e.what() << "\n";
        return kExitUsage;
    } catch (const Error& e) {
        err << "qfdiv: " << e.what() << "\n";
        return kExitUnexpected;
    }
    return kExitUnexpected;
}

int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    std::vector<std::string> args(argv + std::min(argc, 1), argv + argc);
    RunConfig config;
    try {
        config = parse_args(args);
    } catch (const UsageError& e) {
        if (e.help_requested()) {
            out << e.help();
            return kExitExpected;
        }
        err << "qfdiv: " << e.what() << "\n" << e.help();
        return kExitUsage;
    }
    return run(config, out, err);
}

}  // namespace qfdiv::cli
