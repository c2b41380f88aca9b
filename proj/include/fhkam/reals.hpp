#pragma once

#include <boost/multiprecision/mpfr.hpp>
#include <boost/multiprecision/gmp.hpp>

#include <complex>
#include <string>

namespace fhkam {

// High-precision real used everywhere a small divisor or a log-space schedule
// quantity is computed.  Precision is process-global and set once at startup
// (the library default is 256 bits).
using Real = boost::multiprecision::mpfr_float;
using BigInt = boost::multiprecision::mpz_int;
using Complex = std::complex<double>;

void set_precision_bits(unsigned bits);
unsigned precision_bits();

// The backend's default precision is thread-local; worker threads spawned
// after set_precision_bits would otherwise construct temporaries at the
// library default.  Call once at the top of any parallel region body.
void sync_thread_precision();

Real pi_hp();

// x - floor(x), in [0, 1)
Real frac_part(const Real& x);

// distance from x to the nearest integer, in [0, 1/2]
Real dist_to_int(const Real& x);

// nearest integer to x (ties away from zero; inputs are never at ties in use)
BigInt round_to_int(const Real& x);

double to_double(const Real& x);

// Parse a decimal string and report the resolution of the representation:
// 10^-(digits after the decimal point).  The resolution is the natural floor
// below which continued-fraction errors of this input are meaningless.
struct ParsedReal {
    Real value;
    Real resolution;
};
ParsedReal parse_decimal(const std::string& text);

// Shortest decimal string that round-trips the current precision.
std::string to_string_hp(const Real& x);

} // namespace fhkam
