#pragma once

#include <cmath>
#include <complex>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace symtensor {

/// All scalars are stored as complex doubles; in real mode the imaginary
/// part is zero everywhere.
using Scalar = std::complex<double>;

enum class Field { Real, Complex };

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Number of real parameters per scalar coordinate.
inline int field_multiplicity(Field f) { return f == Field::Complex ? 2 : 1; }

inline const char* field_name(Field f) {
    return f == Field::Complex ? "complex" : "real";
}

/// Malformed user input (dimension mismatches, bad exponents, bad JSON values).
struct InputError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// The optimizer could not produce a usable result (non-finite objective,
/// infeasible constraints, degenerate maximizer).
struct OptimizationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline double sqr(double x) { return x * x; }

inline bool is_finite(Scalar z) {
    return std::isfinite(z.real()) && std::isfinite(z.imag());
}

/// z / |z|, or 1 for z = 0.
inline Scalar unit_phase(Scalar z) {
    double m = std::abs(z);
    return m > 0.0 ? z / m : Scalar(1.0, 0.0);
}

// Real parametrization of coordinate arrays: a complex vector of length m
// becomes [re0, im0, re1, im1, ...]; a real vector stays as-is.

inline void to_real_params(std::span<const Scalar> z, Field f, std::vector<double>& out) {
    const int mult = field_multiplicity(f);
    out.resize(z.size() * static_cast<std::size_t>(mult));
    for (std::size_t k = 0; k < z.size(); ++k) {
        if (f == Field::Complex) {
            out[2 * k] = z[k].real();
            out[2 * k + 1] = z[k].imag();
        } else {
            out[k] = z[k].real();
        }
    }
}

inline void from_real_params(std::span<const double> y, Field f, std::vector<Scalar>& out) {
    if (f == Field::Complex) {
        out.resize(y.size() / 2);
        for (std::size_t k = 0; k < out.size(); ++k)
            out[k] = Scalar(y[2 * k], y[2 * k + 1]);
    } else {
        out.resize(y.size());
        for (std::size_t k = 0; k < out.size(); ++k) out[k] = Scalar(y[k], 0.0);
    }
}

}  // namespace symtensor
