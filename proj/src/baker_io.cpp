#include "fatoulab/baker.hpp"
#include "fatoulab/error.hpp"

#include <json.hpp>

#include <istream>
#include <ostream>
#include <sstream>

namespace fatoulab {

using nlohmann::json;

void write_table_csv(std::ostream& out, const RadiiTable& table) {
    out << "n,t_n,k_n\n";
    for (std::size_t n = 1; n <= table.radii(); ++n) {
        out << n << ',' << to_text(table.t_exact(n)) << ',';
        if (table.has_exponent(n)) out << table.k(n);
        out << '\n';
    }
}

std::string table_sidecar_json(const RadiiTable& table) {
    json j;
    j["C"] = to_text(exp(table.log_c));
    j["log_C"] = to_text(table.log_c);
    if (const auto* r = std::get_if<LambdaRule>(&table.rule))
        j["rule"] = {{"kind", "lambda"}, {"lambda", r->lambda}, {"odd", r->odd}};
    else
        j["rule"] = {{"kind", "explicit"}};
    j["precision_bits"] = table.precision_bits;
    j["n0_detected"] = table.n0_detected ? json(*table.n0_detected) : json(nullptr);
    j["status"] = to_string(table.status);
    j["requested"] = table.requested;
    j["exponent_cap"] = table.exponent_cap;
    j["radii"] = table.radii();
    j["exponents"] = table.exponents();
    return j.dump(2) + "\n";
}

RadiiTable read_table(std::istream& csv, std::istream& sidecar) {
    RadiiTable table;
    try {
        const json j = json::parse(sidecar);
        table.log_c = parse_real(j.at("log_C").get<std::string>());
        const auto& rule = j.at("rule");
        if (rule.at("kind") == "lambda")
            table.rule = LambdaRule{rule.at("lambda").get<double>(), rule.at("odd").get<bool>()};
        else
            table.rule = ExplicitRule{};
        table.precision_bits = j.at("precision_bits").get<unsigned>();
        table.requested = j.at("requested").get<std::size_t>();
        table.exponent_cap = j.at("exponent_cap").get<std::uint64_t>();
        const std::string status = j.at("status").get<std::string>();
        if (status == "exponent_overflow") table.status = TableStatus::exponent_overflow;
        else if (status == "log_radius_overflow") table.status = TableStatus::log_radius_overflow;
        else if (status != "complete") throw Error(Errc::config, "unknown table status " + status);
    } catch (const json::exception& e) {
        throw Error(Errc::config, std::string("bad table sidecar: ") + e.what());
    } catch (const std::invalid_argument& e) {
        throw Error(Errc::config, std::string("bad table sidecar: ") + e.what());
    }

    std::string line;
    if (!std::getline(csv, line) || line != "n,t_n,k_n") throw Error(Errc::config, "table CSV needs header n,t_n,k_n");
    bool frontier = false;
    while (std::getline(csv, line)) {
        if (line.empty()) continue;
        std::istringstream row(line);
        std::string n, t, k;
        std::getline(row, n, ',');
        std::getline(row, t, ',');
        std::getline(row, k);
        if (std::stoul(n) != table.radii() + 1) throw Error(Errc::config, "table rows out of order");
        try {
            table.log_radius.push_back(parse_real(t));
        } catch (const std::invalid_argument&) {
            throw Error(Errc::config, "bad log-radius in row " + n);
        }
        if (k.empty()) {
            frontier = true;
            continue;
        }
        if (frontier) throw Error(Errc::config, "exponent after a frontier row");
        table.exponent.push_back(std::stoull(k));
    }
    if (auto* ex = std::get_if<ExplicitRule>(&table.rule)) ex->exponents = table.exponent;
    table.n0_detected = detect_n0(table.log_radius);
    return table;
}

}  // namespace fatoulab
