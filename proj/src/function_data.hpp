#pragma once

#include "fatoulab/modulus.hpp"

namespace fatoulab {

struct SparseSeries::Data {
    std::vector<SeriesTerm> terms;
    std::vector<double> log_abs;            // double images of terms[k].log_abs
    std::vector<Real> unit_re, unit_im;     // cos/sin of the coefficient argument
    bool exact = true;
    double t_max = pos_inf;
    double tolerance = default_truncation_tolerance;
    bool positive = true;
};

struct BakerProduct::Data {
    Real log_c;
    std::vector<BakerFactor> factors;
    std::vector<double> log_radius;         // double images of factors[i].log_radius
    std::optional<Real> next_log_radius;
    double next = pos_inf;
    std::uint64_t tail_exponent = 1;
    double tolerance = default_truncation_tolerance;
    double t_max = pos_inf;
    bool nonzero_odd = true;
};

}  // namespace fatoulab
