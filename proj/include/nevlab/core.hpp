#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#if !defined(NEVLAB_NO_FLOAT128) && defined(__SIZEOF_FLOAT128__) && __has_include(<quadmath.h>)
#include <quadmath.h>
#define NEVLAB_HAVE_FLOAT128 1
#else
#define NEVLAB_HAVE_FLOAT128 0
#endif

namespace nevlab {

// Working precision. Extended precision keeps the round-off floor of the
// oscillatory integrals well below the absolute residuals we report.
using real = long double;
using cplx = std::complex<real>;

inline constexpr real pi = std::numbers::pi_v<real>;
inline constexpr cplx I_unit{0.0L, 1.0L};

// Wider type for the few places where cancellation eats the working precision.
#if NEVLAB_HAVE_FLOAT128
using wide = __float128;
inline wide wide_sqrt(wide x) { return sqrtq(x); }
inline wide wide_cos(wide x) { return cosq(x); }
inline wide wide_sin(wide x) { return sinq(x); }
inline wide wide_cosh(wide x) { return coshq(x); }
inline wide wide_sinh(wide x) { return sinhq(x); }
inline const wide wide_pi = 4 * atanq(1);
#else
using wide = long double;
inline wide wide_sqrt(wide x) { return std::sqrt(x); }
inline wide wide_cos(wide x) { return std::cos(x); }
inline wide wide_sin(wide x) { return std::sin(x); }
inline wide wide_cosh(wide x) { return std::cosh(x); }
inline wide wide_sinh(wide x) { return std::sinh(x); }
inline const wide wide_pi = pi;
#endif

/// Base of every error raised by the library.
class error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Argument outside the mathematical domain of an operation.
class domain_error : public error {
public:
    using error::error;
};

/// Evaluation requested beyond the configured radius.
class overflow_error : public error {
public:
    using error::error;
};

/// Division by the pole of a fractional-linear map.
class pole_error : public error {
public:
    using error::error;
};

/// Operation needs a bounded-image certificate the Pick function lacks.
class certificate_error : public error {
public:
    using error::error;
};

/// Deformed contour passes too close to a zero of f·f̄.
class contour_error : public error {
public:
    using error::error;
};

class non_convergence_error : public error {
public:
    using error::error;
};

/// Operation has no valid implementation for this representation.
class unsupported_error : public error {
public:
    using error::error;
};

/// Adaptive quadrature ran out of budget. Carries the best estimate.
class tolerance_error : public error {
public:
    tolerance_error(const std::string& what, std::vector<real> best, std::vector<real> achieved)
        : error(what), best_estimate(std::move(best)), achieved_error(std::move(achieved)) {}

    std::vector<real> best_estimate;
    std::vector<real> achieved_error;
};

enum class Verdict { pass, fail, inconclusive };

inline const char* to_string(Verdict v) {
    switch (v) {
    case Verdict::pass: return "pass";
    case Verdict::fail: return "fail";
    case Verdict::inconclusive: return "inconclusive";
    }
    return "fail";
}

}  // namespace nevlab
