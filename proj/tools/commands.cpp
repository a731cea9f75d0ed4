#include "commands.hpp"

#include "fatoulab/baker.hpp"
#include "fatoulab/dynamics.hpp"
#include "fatoulab/error.hpp"
#include "fatoulab/growth.hpp"
#include "fatoulab/parallel.hpp"
#include "fatoulab/real.hpp"
#include "fatoulab/report.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>

namespace fatoulab::cli {

namespace fs = std::filesystem;

namespace {

bool is_config_error(const Error& e) {
    return e.code() == Errc::config || e.code() == Errc::invalid_argument || e.code() == Errc::parameter_violation;
}

struct Common {
    fs::path out;
    CircleSearch search;
};

Common read_common(ConfigReader& top) {
    Common c;
    (void)top.get<unsigned>("precision_bits");
    (void)top.get<unsigned>("threads");
    (void)top.get_or<std::uint64_t>("seed", 0);
    c.out = top.get<std::string>("output");
    if (top.has("search")) {
        auto s = top.child("search");
        c.search.grid_points = s.get_or<std::size_t>("grid_points", c.search.grid_points);
        c.search.max_grid_points = s.get_or<std::size_t>("max_grid_points", c.search.max_grid_points);
        c.search.refine_rounds = s.get_or<int>("refine_rounds", c.search.refine_rounds);
        c.search.candidates = s.get_or<std::size_t>("candidates", c.search.candidates);
        s.finish();
        if (c.search.grid_points < 8 || c.search.candidates == 0)
            throw Error(Errc::config, "search needs grid_points >= 8 and candidates >= 1");
    }
    fs::create_directories(c.out);
    return c;
}

struct Loaded {
    std::optional<RadiiTable> table;
    std::optional<BakerSpec> baker;
    std::optional<EntireFunction> f;
};

Loaded load_function(const json& spec) {
    Loaded l;
    auto parsed = parse_function(spec);
    if (parsed.baker) {
        l.baker = parsed.baker;
        l.table = build_table(*parsed.baker);
        l.f = EntireFunction(baker_function(*l.table, parsed.baker->tolerance));
    } else {
        l.f = EntireFunction(*parsed.series);
    }
    return l;
}

std::vector<double> read_grid(ConfigReader g) {
    const double a = g.get<double>("t_min"), b = g.get<double>("t_max");
    const auto n = g.get<std::size_t>("count");
    g.finish();
    if (!(a < b) || n < 2) throw Error(Errc::config, g.where() + " needs t_min < t_max and count >= 2");
    return uniform_grid(a, b, n);
}

json grid_json(const std::vector<double>& g) {
    return {{"t_min", json_number(g.front())}, {"t_max", json_number(g.back())}, {"count", g.size()}};
}

void write_json(const fs::path& p, const json& j) {
    std::ofstream out(p);
    out << j.dump(2) << '\n';
    if (!out) throw Error(Errc::config, "cannot write " + p.string());
}

template <class F>
void write_file(const fs::path& p, F&& body) {
    std::ofstream out(p);
    body(out);
    if (!out) throw Error(Errc::config, "cannot write " + p.string());
}

void print_verdict(const json& v) {
    std::cout << (v["pass"].get<bool>() ? "PASS " : "FAIL ") << v["op"].get<std::string>();
    if (!v["margin"].is_null()) std::cout << " margin=" << v["margin"].dump();
    if (v.contains("error")) std::cout << " error=" << v["error"].get<std::string>();
    std::cout << '\n';
}

json failed_verdict(const std::string& op, json params, const Error& e) {
    auto v = verdict(op, std::move(params), false, std::nullopt);
    v["error"] = std::string(to_string(e.code()));
    v["message"] = e.what();
    return v;
}

double min_or(const std::vector<double>& v, double fallback) {
    return v.empty() ? fallback : *std::min_element(v.begin(), v.end());
}

// --- analyze ---------------------------------------------------------------

json run_check(std::size_t index, ConfigReader c, const EntireFunction& f, const Common& common) {
    const auto op = c.get<std::string>("op");
    const auto& s = common.search;
    json params = json::object();

    if (op == "estimate_order") {
        const auto grid = read_grid(c.child("grid"));
        const auto expect = c.has("expect") ? std::optional<double>(c.get<double>("expect")) : std::nullopt;
        const double tol = c.get_or<double>("tolerance", 0.05);
        c.finish();
        params = {{"grid", grid_json(grid)}, {"tolerance", tol}};
        if (expect) params["expect"] = *expect;
        const auto g = estimate_order(f, grid, s);
        const double diff = expect ? std::abs(g.lambda_hat - *expect) : 0.0;
        auto v = verdict(op, params, !expect || diff <= tol, expect ? std::optional(tol - diff) : std::nullopt,
                         grid_json(grid));
        v["details"] = to_json(g);
        return v;
    }
    if (op == "coefficient_order") {
        const auto grid = read_grid(c.child("grid"));
        const double tol = c.get_or<double>("tolerance", 0.1);
        c.finish();
        params = {{"grid", grid_json(grid)}, {"tolerance", tol}};
        if (!f.is_series()) throw Error(Errc::precondition, "coefficient order needs a series");
        const double oracle = coefficient_order_oracle(f.series());
        const auto g = estimate_order(f, grid, s);
        const double diff = std::abs(g.lambda_hat - oracle);
        auto v = verdict(op, params, diff <= tol, tol - diff, grid_json(grid));
        v["details"] = {{"oracle", json_number(oracle)}, {"lambda_hat", json_number(g.lambda_hat)}};
        return v;
    }
    if (op == "fabry_gap") {
        const double threshold = c.get_or<double>("threshold", 10.0);
        c.finish();
        params = {{"threshold", threshold}};
        if (!f.is_series()) throw Error(Errc::precondition, "Fabry check needs a series");
        const auto r = fabry_gap_check(f.series(), threshold);
        auto v = verdict(op, params, r.consistent, r.ratios.back() - threshold);
        json ratios = json::array();
        for (double x : r.ratios) ratios.push_back(json_number(x));
        v["details"] = {{"ratios", ratios}};
        return v;
    }
    if (op == "exceptional_set") {
        const double eps2 = c.get<double>("eps2");
        const auto grid = read_grid(c.child("grid"));
        c.finish();
        params = {{"eps2", eps2}, {"grid", grid_json(grid)}};
        const auto e = exceptional_set(f, eps2, grid, s);
        const auto file = common.out / ("exceptional_" + std::to_string(index) + ".csv");
        write_file(file, [&](std::ostream& o) { write_intervals_csv(o, e.set); });
        auto v = verdict(op, params, true, std::nullopt, grid_json(grid));
        v["details"] = {{"intervals", to_json(e.set)}, {"file", file.filename().string()}};
        return v;
    }
    if (op == "delta_membership") {
        const double eps1 = c.get<double>("eps1"), eps2 = c.get<double>("eps2");
        const auto grid = read_grid(c.child("grid"));
        const auto windows = c.get_or<std::vector<double>>("windows", {});
        c.finish();
        params = {{"eps1", eps1}, {"eps2", eps2}, {"grid", grid_json(grid)}};
        if (!windows.empty()) params["windows"] = windows;
        const auto d = delta_membership(f, eps1, eps2, grid, windows, s);
        auto v = verdict(op, params, d.consistent, eps1 - d.density.value, grid_json(grid));
        v["details"] = {{"density", to_json(d.density)}, {"exceptional", to_json(d.exceptional.set)},
                        {"consistent", d.consistent}};
        return v;
    }
    if (op == "growth_condition") {
        const double c1 = c.get<double>("c1"), c2 = c.get<double>("c2");
        const auto mode_name = c.get_or<std::string>("mode", "lower");
        const auto grid = read_grid(c.child("grid"));
        c.finish();
        if (mode_name != "lower" && mode_name != "upper") throw Error(Errc::config, "mode must be lower or upper");
        const auto mode = mode_name == "lower" ? GrowthMode::lower : GrowthMode::upper;
        params = {{"c1", c1}, {"c2", c2}, {"mode", mode_name}, {"grid", grid_json(grid)}};
        const auto r = growth_condition_check(f, c1, c2, grid, mode, s);
        std::vector<double> margins;
        for (const auto& x : r.samples) margins.push_back(mode == GrowthMode::lower ? x.lhs - x.rhs : x.rhs - x.lhs);
        auto v = verdict(op, params, r.fraction == 1.0, min_or(margins, 0.0), grid_json(grid));
        v["details"] = {{"fraction", r.fraction},
                        {"first_failure", r.first_failure ? json_number(*r.first_failure) : json(nullptr)}};
        return v;
    }
    if (op == "spike_finder") {
        const double t = c.get<double>("t"), h = c.get<double>("h");
        const auto coarse = c.get_or<std::size_t>("coarse", 256);
        c.finish();
        params = {{"t", t}, {"h", h}, {"coarse", coarse}};
        const auto r = spike_finder(f, t, h, coarse, s);
        auto v = verdict(op, params, r.found, r.margin, {json_number(t), json_number(h * t)});
        v["details"] = {{"found", r.found}, {"t_prime", json_number(r.t_prime)}, {"log_min", json_number(r.log_min)},
                        {"target", json_number(r.target)}};
        return v;
    }
    if (op == "hadamard") {
        const double tol = c.get_or<double>("tolerance", 1e-9);
        if (c.has("t")) {
            const auto t = c.get<std::vector<double>>("t");
            c.finish();
            if (t.size() != 3) throw Error(Errc::config, "hadamard.t needs three radii");
            params = {{"t", t}, {"tolerance", tol}};
            const auto d = hadamard_convexity_check(f, t[0], t[1], t[2], s);
            return verdict(op, params, d.defect >= -tol, d.defect, {json_number(t[0]), json_number(t[2])});
        }
        const auto grid = read_grid(c.child("grid"));
        c.finish();
        params = {{"grid", grid_json(grid)}, {"tolerance", tol}};
        const auto sw = hadamard_convexity_sweep(f, grid, s);
        auto v = verdict(op, params, sw.worst.defect >= -tol, sw.worst.defect, grid_json(grid));
        v["details"] = {{"triples", sw.triples},
                        {"worst", {json_number(sw.worst.t1), json_number(sw.worst.t2), json_number(sw.worst.t3)}}};
        return v;
    }
    if (op == "hua_yang" || op == "lemma1_crossing") {
        const double t_r1 = c.get<double>("t_r1");
        const auto count = c.get<std::size_t>("count");
        const auto coarse = c.get_or<std::size_t>("coarse", 64);
        const auto min_steps = c.get_or<std::size_t>("min_steps", 1);
        std::vector<AnnulusBracket> brackets;
        double b = 0.0;
        if (op == "lemma1_crossing") {
            b = c.get<double>("b");
            for (const auto& e : c.get<std::vector<std::vector<double>>>("brackets")) {
                if (e.size() != 2) throw Error(Errc::config, "brackets are [t_inner, t_outer] pairs");
                brackets.push_back({e[0], e[1], BracketKind::component, 0});
            }
        }
        c.finish();
        params = {{"t_r1", t_r1}, {"count", count}, {"coarse", coarse}, {"min_steps", min_steps}};
        const auto h = hua_yang_sequence(f, t_r1, count, coarse, s);
        json steps = json::array();
        std::vector<double> margins;
        bool all = h.steps.size() >= min_steps;
        for (const auto& st : h.steps) {
            steps.push_back({{"n", st.n}, {"t_r", json_number(st.t_r)}, {"t_r_next", json_number(st.t_r_next)},
                             {"t_t", json_number(st.t_t)}, {"log_min", json_number(st.log_min)},
                             {"bound", json_number(st.bound)}, {"margin", json_number(st.margin)}, {"pass", st.pass}});
            margins.push_back(st.margin);
            all = all && st.pass;
        }
        const json window = h.steps.empty() ? json(nullptr)
                                            : json{json_number(h.steps.front().window_lo),
                                                   json_number(h.steps.back().window_hi)};
        if (op == "hua_yang") {
            auto v = verdict(op, params, all, margins.empty() ? std::nullopt : std::optional(min_or(margins, 0.0)),
                             window);
            v["details"] = {{"steps", steps}, {"range_exhausted", h.range_exhausted}};
            return v;
        }
        params["b"] = b;
        const auto cv = lemma1_crossing_check(h, brackets, b);
        auto v = verdict(op, params, cv.pass, std::nullopt, window);
        v["details"] = {{"hypotheses_verified", cv.hypotheses_verified}, {"steps", steps}};
        if (!cv.hypotheses_verified) v["error"] = "HypothesisUnverified";
        if (cv.counterexample)
            v["details"]["counterexample"] = {json_number(cv.counterexample->t_inner),
                                              json_number(cv.counterexample->t_outer), cv.index};
        return v;
    }
    if (op == "order_gap") {
        const double a = c.get<double>("A"), b = c.get<double>("B"), t_r = c.get<double>("t_r");
        const auto count = c.get<std::size_t>("count");
        const auto grid = read_grid(c.child("order_grid"));
        c.finish();
        params = {{"A", a}, {"B", b}, {"t_r", t_r}, {"count", count}, {"order_grid", grid_json(grid)}};
        const auto order = estimate_order(f, grid, s);
        const auto r = order_gap_sequence(f, order, a, b, t_r, count, s);
        json steps = json::array();
        std::vector<double> margins;
        bool all = !r.steps.empty();
        for (const auto& st : r.steps) {
            steps.push_back({{"n", st.n}, {"t_r", json_number(st.t_r)}, {"lhs", json_number(st.lhs)},
                             {"rhs", json_number(st.rhs)}, {"margin", json_number(st.margin)}, {"pass", st.pass}});
            margins.push_back(st.margin);
            all = all && st.pass;
        }
        auto v = verdict(op, params, all, margins.empty() ? std::nullopt : std::optional(min_or(margins, 0.0)),
                         grid_json(grid));
        v["details"] = {{"steps", steps},
                        {"range_exhausted", r.range_exhausted},
                        {"lambda_hat", json_number(order.lambda_hat)},
                        {"rho_hat", json_number(order.rho_hat)}};
        return v;
    }
    if (op == "modulus_curve") {
        const auto grid = read_grid(c.child("grid"));
        c.finish();
        params = {{"grid", grid_json(grid)}};
        const auto curve = sample_modulus_curve(f, grid.front(), grid.back(), grid.size(), s);
        const auto file = common.out / ("modulus_" + std::to_string(index) + ".csv");
        write_file(file, [&](std::ostream& o) { write_modulus_csv(o, curve); });
        auto v = verdict(op, params, true, std::nullopt, grid_json(grid));
        v["details"] = {{"file", file.filename().string()}};
        return v;
    }
    throw Error(Errc::config, "unknown check op " + op);
}

}  // namespace

json resolve(const Options& opts) {
    std::ifstream in(opts.config_path);
    if (!in) throw Error(Errc::config, "cannot read " + opts.config_path);
    json config;
    try {
        config = json::parse(in);
    } catch (const json::exception& e) {
        throw Error(Errc::config, std::string("malformed config: ") + e.what());
    }
    if (!config.is_object()) throw Error(Errc::config, "config must be a JSON object");
    const auto value = [&](const char* key, unsigned cli, unsigned fallback) {
        if (cli) return cli;
        if (!config.contains(key)) return fallback;
        if (!config[key].is_number_integer() || config[key].get<std::int64_t>() <= 0) throw Error(Errc::config, std::string(key) + " must be a positive integer");
        return config[key].get<unsigned>();
    };
    const unsigned bits = value("precision_bits", opts.precision_bits, default_precision_bits);
    const unsigned threads = value("threads", opts.threads, 1);
    if (bits < 16 || threads == 0) throw Error(Errc::config, "precision_bits >= 16 and threads >= 1 required");
    set_precision_bits(bits);
    set_thread_count(threads);
    config["precision_bits"] = bits;
    config["threads"] = threads;
    if (!opts.out_dir.empty()) config["output"] = opts.out_dir;
    else if (!config.contains("output")) config["output"] = "out";
    return config;
}

int construct(const json& config) {
    try {
        ConfigReader top(config, "config");
        const auto common = read_common(top);
        const auto spec = parse_baker(top.required("function"));
        top.finish();
        const auto table = build_table(spec);
        write_file(common.out / "table.csv", [&](std::ostream& o) { write_table_csv(o, table); });
        write_file(common.out / "table.json", [&](std::ostream& o) { o << table_sidecar_json(table); });
        std::cout << "n0_detected: " << (table.n0_detected ? std::to_string(*table.n0_detected) : "none") << '\n'
                  << "terms: " << table.exponents() << '\n'
                  << "radii: " << table.radii() << '\n'
                  << "status: " << to_string(table.status) << '\n';
        return table.status == TableStatus::complete ? ok : insufficient;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return config_error;
    }
}

int analyze(const json& config) {
    ConfigReader top(config, "config");
    Common common;
    Loaded loaded;
    std::vector<json> checks;
    try {
        common = read_common(top);
        loaded = load_function(top.required("function"));
        const json& list = top.required("checks");
        if (!list.is_array() || list.empty()) throw Error(Errc::config, "checks must be a nonempty array");
        checks.assign(list.begin(), list.end());
        top.finish();
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return config_error;
    }
    json verdicts = json::array();
    bool all = true;
    for (std::size_t i = 0; i < checks.size(); ++i) {
        json v;
        try {
            v = run_check(i, ConfigReader(checks[i], "checks[" + std::to_string(i) + "]"), *loaded.f, common);
        } catch (const Error& e) {
            if (is_config_error(e)) {
                std::cerr << "error: " << e.what() << '\n';
                return config_error;
            }
            v = failed_verdict(checks[i].value("op", "?"), checks[i], e);
        }
        print_verdict(v);
        all = all && v["pass"].get<bool>();
        verdicts.push_back(v);
    }
    write_json(common.out / "report.json",
               {{"command", "analyze"}, {"config", config}, {"verdicts", verdicts}, {"pass", all}});
    return all ? ok : failed;
}

int verify_baker(const json& config) {
    ConfigReader top(config, "config");
    Common common;
    BakerSpec spec;
    std::size_t refine_iters = 30, max_steps = 8, density_samples = 16;
    double m_target = 5.0, density_slack = 0.1;
    bool claim3_odd = true;
    try {
        common = read_common(top);
        spec = parse_baker(top.required("function"));
        if (top.has("verify")) {
            auto v = top.child("verify");
            refine_iters = v.get_or<std::size_t>("refine_iters", refine_iters);
            max_steps = v.get_or<std::size_t>("max_steps", max_steps);
            m_target = v.get_or<double>("m_target", m_target);
            density_samples = v.get_or<std::size_t>("density_samples", density_samples);
            density_slack = v.get_or<double>("density_slack", density_slack);
            if (v.has("claim3")) {
                auto c3 = v.child("claim3");
                claim3_odd = c3.get_or<bool>("odd", claim3_odd);
                c3.finish();
            }
            v.finish();
        }
        top.finish();
        if (!(m_target > 1.0)) throw Error(Errc::config, "verify.m_target must exceed 1");
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return config_error;
    }

    RadiiTable table;
    try {
        table = build_table(spec);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return config_error;
    }
    // a table too short to certify any tail still gets a partial report
    std::optional<EntireFunction> f;
    try {
        f = EntireFunction(baker_function(table, spec.tolerance));
    } catch (const Error& e) {
        if (e.code() != Errc::not_enough_radii) throw;
    }
    const auto* lambda_rule = std::get_if<LambdaRule>(&spec.rule);
    const std::optional<double> lambda = lambda_rule ? std::optional(lambda_rule->lambda) : std::nullopt;

    json verdicts = json::array();
    bool all = true, short_table = false;
    const auto add = [&](json v) {
        print_verdict(v);
        all = all && v["pass"].get<bool>();
        verdicts.push_back(std::move(v));
    };

    // (a) doubling from n0 on
    {
        std::optional<double> margin;
        if (table.n0_detected)
            for (std::size_t n = *table.n0_detected; n < table.radii(); ++n) {
                const double d = to_double(table.t_exact(n + 1) - table.t_exact(n) - real_log2());
                margin = margin ? std::min(*margin, d) : d;
            }
        auto v = verdict("doubling", json::object(), margin && *margin > 0.0, margin);
        v["details"] = {{"n0_detected", table.n0_detected ? json(*table.n0_detected) : json(nullptr)}};
        add(v);
    }
    // (b) forward invariance
    {
        std::size_t checked = 0;
        for (std::size_t n = 1; f && n <= table.radii(); ++n) {
            if (!invariance_checkable(table, n)) continue;
            const json params = {{"n", n}};
            try {
                const auto r = verify_forward_invariance(f->baker(), table, n);
                auto v = verdict("forward_invariance", params, r.pass, std::min(r.inner_margin, r.outer_margin),
                                 {json_number(2.0 * table.t(n)), json_number(table.t(n + 1) / 2.0)});
                v["details"] = {{"inner_margin", json_number(r.inner_margin)},
                                {"outer_margin", json_number(r.outer_margin)},
                                {"precision_exhausted", r.exhausted}};
                add(v);
                ++checked;
            } catch (const Error& e) {
                if (e.code() != Errc::not_enough_radii) throw;
            }
        }
        if (checked == 0) {
            short_table = true;
            add(failed_verdict("forward_invariance", json::object(),
                               Error(Errc::not_enough_radii, "no index with A_n and A_{n+1} inside the table")));
        }
    }
    // growth markers
    if (f) {
        std::vector<double> slack;
        bool pass = true;
        std::size_t checked = 0;
        for (std::size_t n = 1; n <= table.exponents(); ++n) {
            try {
                const auto r = verify_growth_markers(f->baker(), table, n);
                if (table.k(n) != 0) slack.push_back(r.slack);
                pass = pass && r.pass;
                ++checked;
            } catch (const Error& e) {
                if (e.code() != Errc::not_enough_radii) throw;
            }
        }
        if (checked == 0) short_table = true;
        add(verdict("growth_markers", {{"count", checked}}, pass && checked > 0,
                    slack.empty() ? std::nullopt : std::optional(min_or(slack, 0.0))));
    }
    // (c) log log r_{n+1} / log r_{n-1} < 2 lambda + 1
    if (lambda) {
        std::size_t checked = 0;
        for (std::size_t n = 2; n < table.radii(); ++n) {
            if (!table.n0_detected || n < *table.n0_detected + 2 || !(table.t(n - 1) > 1.0)) continue;
            const auto r = verify_loglog_ratio(table, n, *lambda);
            add(verdict("loglog_ratio", {{"n", n}, {"lambda", *lambda}}, r.pass, r.bound - r.value));
            ++checked;
        }
        if (checked == 0) {
            short_table = true;
            add(failed_verdict("loglog_ratio", json::object(),
                               Error(Errc::not_enough_radii, "no n >= n0 + 2 with log r_{n-1} > 1")));
        }
    }
    // (d) components and the B2 bound; (e) B1 witness
    std::vector<ComponentEstimate> components;
    try {
        if (f) components = detect_components(*f, table, refine_iters, max_steps);
    } catch (const Error& e) {
        add(failed_verdict("components", {{"refine_iters", refine_iters}}, e));
    }
    write_file(common.out / "components.json", [&](std::ostream& o) { o << components_json(components); });
    if (components.empty()) {
        short_table = true;
    } else {
        bool sound = true;
        for (const auto& c : components)
            if (c.kind == ComponentKind::wandering_annulus)
                sound = sound && c.bound_inner <= c.bracket.t_inner && c.bracket.t_inner <= c.seed_inner &&
                        c.seed_outer <= c.bracket.t_outer && c.bracket.t_outer <= c.bound_outer;
        add(verdict("bracket_soundness", {{"refine_iters", refine_iters}, {"max_steps", max_steps}}, sound,
                    std::nullopt));
        const auto b = b_ratios(components);
        if (lambda) {
            const double bound = 6.0 * (2.0 * *lambda + 1.0);
            auto v = verdict("b2_bound", {{"lambda", *lambda}, {"bound", bound}}, b.b2 <= bound, bound - b.b2);
            v["details"] = {{"B0_log", json_number(b.log_b0)}, {"B1", json_number(b.b1)}, {"B2", json_number(b.b2)}};
            add(v);
        }
        const auto w = strong_uniform_failure_witness(components, m_target);
        auto v = verdict("b1_witness", {{"m_target", m_target}}, w.found, w.contribution - w.target);
        v["details"] = {{"found", w.found}, {"n", w.n}, {"contribution", json_number(w.contribution)}};
        add(v);
    }
    // (f) density of G(f) for odd exponents
    {
        json params = {{"odd", claim3_odd}, {"samples", density_samples}, {"slack", density_slack}};
        try {
            RadiiTable t3 = table;
            if (lambda_rule) {
                auto odd_spec = spec;
                odd_spec.rule = LambdaRule{lambda_rule->lambda, claim3_odd};
                t3 = build_table(odd_spec);
            }
            const auto r = gap_density_bound(t3, density_samples, density_slack);
            auto v = verdict("claim3_density", params, r.pass(), r.bound + r.slack - r.density.value,
                             {json_number(r.density.windows.front()), json_number(r.density.windows.back())});
            v["details"] = {{"density", to_json(r.density)},
                            {"quotient_checks", r.quotient_checks.size()},
                            {"quotient_pass", r.quotient_pass}};
            add(v);
        } catch (const Error& e) {
            if (e.code() == Errc::not_enough_radii) short_table = true;
            add(failed_verdict("claim3_density", params, e));
        }
    }

    json radii = json::array();
    for (std::size_t n = 1; n <= table.radii(); ++n) radii.push_back(to_text(table.t_exact(n)));
    json exps = json::array();
    for (std::size_t n = 1; n <= table.exponents(); ++n) exps.push_back(table.k(n));
    const int code = short_table ? insufficient : all ? ok : failed;
    write_json(common.out / "report.json", {{"command", "verify-baker"},
                                            {"config", config},
                                            {"table", {{"t", radii}, {"k", exps}, {"status", to_string(table.status)}}},
                                            {"verdicts", verdicts},
                                            {"pass", all && !short_table},
                                            {"exit_code", code}});
    return code;
}

int render(const json& config) {
    try {
        ConfigReader top(config, "config");
        const auto common = read_common(top);
        const auto loaded = load_function(top.required("function"));
        auto r = top.child("render");
        Region region;
        {
            auto g = r.child("region");
            const auto type = g.get<std::string>("type");
            if (type != "box" && type != "log_polar") throw Error(Errc::config, "region.type must be box or log_polar");
            region.log_polar = type == "log_polar";
            const auto a = g.get<std::vector<double>>("a"), b = g.get<std::vector<double>>("b");
            g.finish();
            if (a.size() != 2 || b.size() != 2) throw Error(Errc::config, "region.a and region.b are [lo, hi] pairs");
            region.a0 = a[0];
            region.a1 = a[1];
            region.b0 = b[0];
            region.b1 = b[1];
        }
        const auto width = r.get<std::size_t>("width"), height = r.get<std::size_t>("height");
        auto params = escape_params(*loaded.f, loaded.table ? &*loaded.table : nullptr);
        params.max_steps = r.get_or<std::size_t>("max_steps", 12);
        params.escape_t = r.get_or<double>("escape_t", params.escape_t);
        params.fast = r.get_or<bool>("fast", true);
        r.finish();
        top.finish();
        const auto grid = render_escape_grid(*loaded.f, region, width, height, params);
        write_file(common.out / "escape.pgm", [&](std::ostream& o) { write_pgm(o, grid); });
        write_file(common.out / "escape.csv", [&](std::ostream& o) { write_escape_csv(o, grid); });
        std::size_t counts[4] = {0, 0, 0, 0};
        for (auto s : grid.status) ++counts[static_cast<int>(s)];
        json summary = {{"escaped", counts[0]}, {"bounded-window", counts[1]}, {"undecided", counts[2]},
                        {"overflow", counts[3]}};
        write_json(common.out / "report.json", {{"command", "render"},
                                                {"config", config},
                                                {"escape_t", json_number(params.escape_t)},
                                                {"counts", summary}});
        std::cout << "escaped " << counts[0] << ", bounded " << counts[1] << ", undecided " << counts[2]
                  << ", overflow " << counts[3] << '\n';
        return ok;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return config_error;
    }
}

}  // namespace fatoulab::cli
