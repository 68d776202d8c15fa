#ifndef CARPETLAB_COMMON_HPP
#define CARPETLAB_COMMON_HPP

#include <complex>
#include <stdexcept>
#include <string>

namespace carpetlab {

inline constexpr const char* version = "0.1.0";

inline constexpr double pi = 3.141592653589793238462643383279502884;

using cplx = std::complex<double>;

// Thrown when a truncated spectral sum fails its declared residual target.
struct truncation_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Thrown when an oscillatory or tail-bounded quadrature cannot meet its bound.
struct quadrature_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Thrown when a worldline/resummation truncation budget is exceeded.
struct budget_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Thrown on malformed or inconsistent run configuration.
struct config_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace carpetlab

#endif
