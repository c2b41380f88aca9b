#include "fhkam/reals.hpp"
#include "fhkam/errors.hpp"

#include <boost/math/constants/constants.hpp>

#include <cmath>

namespace fhkam {

namespace {
unsigned g_bits = 256;

unsigned bits_to_digits(unsigned bits) {
    return static_cast<unsigned>(std::ceil(bits * 0.3010299956639812)) + 2;
}
} // namespace

void set_precision_bits(unsigned bits) {
    if (bits < 24 || bits > 65536)
        throw ConfigError("reals", "precision-bits must lie in [24, 65536]");
    g_bits = bits;
    Real::default_precision(bits_to_digits(bits));
}

unsigned precision_bits() { return g_bits; }

void sync_thread_precision() {
    unsigned digits = bits_to_digits(g_bits);
    if (Real::default_precision() != digits) Real::default_precision(digits);
}

namespace {
struct PrecisionInit {
    PrecisionInit() { Real::default_precision(bits_to_digits(256)); }
} g_precision_init;
} // namespace

Real pi_hp() { return boost::math::constants::pi<Real>(); }

Real frac_part(const Real& x) {
    Real f = x - floor(x);
    if (f < 0) f += 1;       // guard against directed rounding at the edge
    if (f >= 1) f -= 1;
    return f;
}

Real dist_to_int(const Real& x) {
    Real f = frac_part(x);
    Real g = 1 - f;
    return f < g ? f : g;
}

BigInt round_to_int(const Real& x) {
    Real r = floor(x + Real(0.5));
    return BigInt(r);
}

double to_double(const Real& x) { return x.convert_to<double>(); }

ParsedReal parse_decimal(const std::string& text) {
    if (text.empty())
        throw ConfigError("reals", "empty numeric string");
    std::size_t i = 0;
    if (text[i] == '+' || text[i] == '-') ++i;
    long frac_digits = 0;
    long exponent = 0;
    bool seen_digit = false, seen_dot = false;
    for (; i < text.size(); ++i) {
        char ch = text[i];
        if (ch >= '0' && ch <= '9') {
            seen_digit = true;
            if (seen_dot) ++frac_digits;
        } else if (ch == '.') {
            if (seen_dot)
                throw ConfigError("reals", "malformed numeric string: " + text);
            seen_dot = true;
        } else if (ch == 'e' || ch == 'E') {
            exponent = std::stol(text.substr(i + 1));
            break;
        } else {
            throw ConfigError("reals", "malformed numeric string: " + text);
        }
    }
    if (!seen_digit)
        throw ConfigError("reals", "malformed numeric string: " + text);

    ParsedReal out;
    out.value = Real(text);
    long res_exp = exponent - frac_digits;
    Real res = pow(Real(10), res_exp);
    // never finer than what the working precision itself can honour
    Real prec_floor = pow(Real(2), -static_cast<long>(precision_bits()) + 8);
    out.resolution = res > prec_floor ? res : prec_floor;
    return out;
}

std::string to_string_hp(const Real& x) {
    return x.str();
}

} // namespace fhkam
