#include "fatoulab/report.hpp"

#include "fatoulab/error.hpp"

#include <cmath>
#include <complex>

namespace fatoulab {

json json_number(double x) {
    if (std::isfinite(x)) return x;
    return format_number(x);
}

json verdict(const std::string& op, json params, bool pass, std::optional<double> margin, json window) {
    json v;
    v["op"] = op;
    v["params"] = std::move(params);
    v["pass"] = pass;
    v["margin"] = margin ? json_number(*margin) : json(nullptr);
    v["window"] = std::move(window);
    return v;
}

json to_json(const GrowthEstimate& g) {
    json samples = json::array();
    for (const auto& s : g.samples)
        samples.push_back({{"t", json_number(s.t)}, {"logM", json_number(s.log_max)}, {"q", json_number(s.q)},
                           {"used", s.used}});
    return {{"lambda_hat", json_number(g.lambda_hat)},
            {"rho_hat", json_number(g.rho_hat)},
            {"window", {json_number(g.t_min), json_number(g.t_max)}},
            {"tail_start", g.tail_start},
            {"polynomial", g.polynomial},
            {"samples", samples}};
}

json to_json(const DensityEstimate& d) {
    json per = json::array();
    for (double v : d.per_window) per.push_back(json_number(v));
    json windows = json::array();
    for (double v : d.windows) windows.push_back(json_number(v));
    return {{"value", json_number(d.value)}, {"windows", windows}, {"per_window", per}, {"tail_start", d.tail_start}};
}

json to_json(const IntervalSet& s) {
    json out = json::array();
    for (const auto& i : s.intervals()) out.push_back({json_number(i.a), json_number(i.b)});
    return out;
}

ConfigReader::ConfigReader(const json& object, std::string where) : object_(object), where_(std::move(where)) {
    if (!object_.is_object()) throw Error(Errc::config, where_ + " must be an object");
}

bool ConfigReader::has(const std::string& key) const { return object_.contains(key); }

const json& ConfigReader::required(const std::string& key) {
    if (!has(key)) throw Error(Errc::config, where_ + "." + key + " is required");
    seen_.insert(key);
    return object_.at(key);
}

const json* ConfigReader::optional(const std::string& key) {
    if (!has(key)) return nullptr;
    seen_.insert(key);
    return &object_.at(key);
}

Real ConfigReader::real(const std::string& key) {
    const json& v = required(key);
    try {
        if (v.is_string()) return parse_real(v.get<std::string>());
        if (v.is_number()) return Real(v.get<double>());
    } catch (const std::invalid_argument&) {
    }
    throw Error(Errc::config, where_ + "." + key + " must be a number or a decimal string");
}

ConfigReader ConfigReader::child(const std::string& key) { return ConfigReader(required(key), where_ + "." + key); }

void ConfigReader::finish() const {
    for (const auto& [key, value] : object_.items())
        if (!seen_.count(key)) throw Error(Errc::config, "unknown key " + where_ + "." + key);
}

namespace {

std::complex<double> coefficient(const json& c, const std::string& where) {
    if (c.is_number()) return {c.get<double>(), 0.0};
    if (c.is_array() && c.size() == 2 && c[0].is_number() && c[1].is_number())
        return {c[0].get<double>(), c[1].get<double>()};
    throw Error(Errc::config, where + ": coefficients are numbers or [re, im] pairs");
}

ExponentRule parse_rule(ConfigReader r) {
    const auto kind = r.get<std::string>("kind");
    if (kind == "lambda") {
        LambdaRule rule{r.get_or<double>("lambda", 1.0), r.get_or<bool>("odd", false)};
        r.finish();
        return rule;
    }
    if (kind == "explicit") {
        const json& ks = r.required("exponents");
        if (!ks.is_array()) throw Error(Errc::config, r.where() + ".exponents must be an array");
        ExplicitRule rule;
        for (const auto& k : ks) {
            if (!k.is_number_integer() || k.get<std::int64_t>() < 0) throw Error(Errc::config, r.where() + ".exponents must be nonnegative integers");
            rule.exponents.push_back(k.get<std::uint64_t>());
        }
        r.finish();
        return rule;
    }
    throw Error(Errc::config, r.where() + ".kind must be lambda or explicit");
}

}  // namespace

BakerSpec parse_baker(const json& spec) {
    ConfigReader r(spec, "function");
    if (r.get<std::string>("kind") != "baker") throw Error(Errc::config, "function.kind must be baker here");
    BakerSpec b;
    b.c = r.real("C");
    b.r1 = r.real("r1");
    b.rule = r.has("rule") ? parse_rule(r.child("rule")) : ExponentRule{LambdaRule{}};
    b.count = r.get_or<std::size_t>("count", 64);
    b.exponent_cap = r.get_or<std::uint64_t>("exponent_cap", default_exponent_cap);
    b.tolerance = r.get_or<double>("tolerance", default_truncation_tolerance);
    r.finish();
    return b;
}

RadiiTable build_table(const BakerSpec& spec) {
    return build_radii(spec.c, spec.r1, spec.rule, spec.count, spec.exponent_cap);
}

FunctionSpec parse_function(const json& spec) {
    ConfigReader r(spec, "function");
    const auto kind = r.get<std::string>("kind");
    FunctionSpec out;
    if (kind == "baker") {
        out.baker = parse_baker(spec);
        return out;
    }
    const double tol = r.get_or<double>("tolerance", default_truncation_tolerance);
    if (kind == "exp" || kind == "factorial_power") {
        const unsigned power = kind == "exp" ? 1u : r.get<unsigned>("power");
        const auto terms = r.get_or<std::size_t>("terms", 0);
        const double t_max = r.get<double>("t_max");
        r.finish();
        out.series = power == 1 && kind == "exp" ? exp_series(terms, t_max, tol)
                                                 : factorial_power_series(power, terms, t_max, tol);
        return out;
    }
    if (kind == "polynomial" || kind == "series") {
        const json& cs = r.required("coefficients");
        if (!cs.is_array() || cs.empty()) throw Error(Errc::config, "function.coefficients must be a nonempty array");
        std::vector<std::complex<double>> coeffs;
        for (const auto& c : cs) coeffs.push_back(coefficient(c, "function.coefficients"));
        std::vector<std::uint64_t> exps;
        if (r.has("exponents")) {
            exps = r.get<std::vector<std::uint64_t>>("exponents");
        } else {
            for (std::size_t j = 0; j < coeffs.size(); ++j) exps.push_back(j);
        }
        if (exps.size() != coeffs.size()) throw Error(Errc::config, "function.exponents must match coefficients");
        if (kind == "polynomial") {
            r.finish();
            out.series = SparseSeries::polynomial(coeffs, exps, tol);
            return out;
        }
        const double t_max = r.get<double>("t_max");
        r.finish();
        std::vector<SeriesTerm> terms;
        for (std::size_t i = 0; i < coeffs.size(); ++i) {
            if (coeffs[i] == 0.0) continue;
            terms.push_back({Real(std::log(std::abs(coeffs[i]))), std::arg(coeffs[i]), exps[i]});
        }
        out.series = SparseSeries::truncated(std::move(terms), t_max, tol);
        return out;
    }
    throw Error(Errc::config, "function.kind must be one of polynomial, series, exp, factorial_power, baker");
}

}  // namespace fatoulab
