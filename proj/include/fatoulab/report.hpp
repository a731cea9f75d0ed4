#pragma once

#include "fatoulab/baker.hpp"
#include "fatoulab/dynamics.hpp"
#include "fatoulab/error.hpp"
#include "fatoulab/growth.hpp"
#include "fatoulab/intervals.hpp"
#include "fatoulab/modulus.hpp"

#include <json.hpp>

#include <optional>
#include <set>
#include <string>
#include <type_traits>

namespace fatoulab {

using nlohmann::json;

// Finite doubles as numbers, the rest as "inf" / "-inf" / "nan" strings.
[[nodiscard]] json json_number(double x);

// {op, params, pass, margin, window}
[[nodiscard]] json verdict(const std::string& op, json params, bool pass, std::optional<double> margin,
                           json window = nullptr);

[[nodiscard]] json to_json(const GrowthEstimate& g);
[[nodiscard]] json to_json(const DensityEstimate& d);
[[nodiscard]] json to_json(const IntervalSet& s);

// Strict reader over one JSON object: every key must be read before finish().
class ConfigReader {
public:
    ConfigReader(const json& object, std::string where);

    [[nodiscard]] bool has(const std::string& key) const;
    [[nodiscard]] const json& required(const std::string& key);
    [[nodiscard]] const json* optional(const std::string& key);
    template <class T>
    [[nodiscard]] T get(const std::string& key);
    template <class T>
    [[nodiscard]] T get_or(const std::string& key, T fallback);
    [[nodiscard]] Real real(const std::string& key);  // number or decimal string
    [[nodiscard]] ConfigReader child(const std::string& key);
    [[nodiscard]] const std::string& where() const { return where_; }
    void finish() const;

private:
    const json& object_;
    std::string where_;
    std::set<std::string> seen_;
};

struct BakerSpec {
    Real c;
    Real r1;
    ExponentRule rule;
    std::size_t count = 64;
    std::uint64_t exponent_cap = default_exponent_cap;
    double tolerance = default_truncation_tolerance;
};

struct FunctionSpec {
    std::optional<BakerSpec> baker;
    std::optional<SparseSeries> series;
};

// kinds: polynomial, series, exp, factorial_power, baker
[[nodiscard]] FunctionSpec parse_function(const json& spec);
[[nodiscard]] BakerSpec parse_baker(const json& spec);
[[nodiscard]] RadiiTable build_table(const BakerSpec& spec);

template <class T>
T ConfigReader::get(const std::string& key) {
    const json& v = required(key);
    if constexpr (std::is_unsigned_v<T> && !std::is_same_v<T, bool>)
        if (!v.is_number_integer() || v.get<std::int64_t>() < 0) throw Error(Errc::config, where_ + "." + key + " must be a nonnegative integer");
    try {
        return v.get<T>();
    } catch (const json::exception&) {
        throw Error(Errc::config, where_ + "." + key + " has the wrong type");
    }
}

template <class T>
T ConfigReader::get_or(const std::string& key, T fallback) {
    if (!has(key)) return fallback;
    return get<T>(key);
}

}  // namespace fatoulab
