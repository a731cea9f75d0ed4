#include "fatoulab/error.hpp"
#include "fatoulab/modulus.hpp"
#include "fatoulab/parallel.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>

namespace fatoulab {

std::string format_number(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x < 0 ? "-inf" : "inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::vector<double> uniform_grid(double t_min, double t_max, std::size_t count) {
    if (!(std::isfinite(t_min) && std::isfinite(t_max)) || t_min > t_max || count == 0)
        throw Error(Errc::invalid_argument, "grid needs finite t_min <= t_max and count >= 1");
    if (count == 1) return {t_min};
    std::vector<double> grid(count);
    const double span = t_max - t_min;
    for (std::size_t i = 0; i < count; ++i)
        grid[i] = t_min + span * (static_cast<double>(i) / static_cast<double>(count - 1));
    grid.back() = t_max;
    return grid;
}

ModulusCurve sample_modulus_curve(const EntireFunction& f, double t_min, double t_max, std::size_t count,
                                  const CircleSearch& search) {
    ModulusCurve curve{t_min, t_max, count, {}};
    const auto grid = uniform_grid(t_min, t_max, count);
    curve.samples.resize(count);
    parallel_for(count, [&](std::size_t i) {
        const double t = grid[i];
        curve.samples[i] = {t, max_modulus(f, t, search).value, min_modulus(f, t, search).value};
    });
    return curve;
}

void write_modulus_csv(std::ostream& out, const ModulusCurve& curve) {
    out << "t,logM,logm\n";
    for (const auto& s : curve.samples)
        out << format_number(s.t) << ',' << format_number(s.log_max.as_double()) << ','
            << format_number(s.log_min.as_double()) << '\n';
}

}  // namespace fatoulab
