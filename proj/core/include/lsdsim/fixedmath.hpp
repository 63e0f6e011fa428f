#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <string>

#include "lsdsim/error.hpp"

namespace lsdsim {

namespace mp = boost::multiprecision;

// Checked backends: overflow throws instead of wrapping. All token state is
// held in these; floating point is confined to the analytics module.
using u256 = mp::number<mp::cpp_int_backend<256, 256, mp::unsigned_magnitude, mp::checked, void>>;
using u512 = mp::number<mp::cpp_int_backend<512, 512, mp::unsigned_magnitude, mp::checked, void>>;
using i256 = mp::number<mp::cpp_int_backend<256, 256, mp::signed_magnitude, mp::checked, void>>;
using i512 = mp::number<mp::cpp_int_backend<512, 512, mp::signed_magnitude, mp::checked, void>>;

// Amount: integer token quantity in wei (1e-18 token).
// Wad: fixed-point ratio scaled by 1e18. Wad(1e18) is the identity.
using Amount = u256;
using Wad = u256;

inline const u256& wad_one() {
    static const u256 v{"1000000000000000000"};
    return v;
}

enum class Round { Down, Up };

inline u256 narrow(const u512& x) {
    if (x > u512((std::numeric_limits<u256>::max)()))
        throw SimError(Err::Overflow, "result exceeds 256-bit range");
    return u256(x);
}

// floor(a*b/1e18), or ceil for Round::Up. Intermediate product is exact (512-bit).
inline u256 wad_mul(const u256& a, const Wad& b, Round r = Round::Down) {
    u512 p = u512(a) * u512(b);
    u512 q = p / u512(wad_one());
    if (r == Round::Up && q * u512(wad_one()) != p) q += 1;
    return narrow(q);
}

// floor(a*1e18/b), or ceil for Round::Up.
inline u256 wad_div(const u256& a, const Wad& b, Round r = Round::Down) {
    if (b == 0) throw SimError(Err::DivideByZero, "wad_div by zero");
    u512 n = u512(a) * u512(wad_one());
    u512 q = n / u512(b);
    if (r == Round::Up && q * u512(b) != n) q += 1;
    return narrow(q);
}

// floor(a*b/c) with exact 512-bit intermediate; the AMM solvers live on this.
inline u256 mul_div(const u256& a, const u256& b, const u256& c, Round r = Round::Down) {
    if (c == 0) throw SimError(Err::DivideByZero, "mul_div by zero");
    u512 p = u512(a) * u512(b);
    u512 q = p / u512(c);
    if (r == Round::Up && q * u512(c) != p) q += 1;
    return narrow(q);
}

inline i256 to_signed(const u256& a) { return i256(a); }

inline u256 to_unsigned(const i256& a) {
    if (a < 0) throw SimError(Err::Overflow, "negative value in unsigned context");
    return u256(a);
}

inline u256 abs_diff(const u256& a, const u256& b) { return a > b ? a - b : b - a; }

// Parses decimal token quantities: "1000", "1.5e18", "21e18", "0.001e18".
// The value must come out integral in wei; anything else is a ConfigError.
u256 parse_amount(const std::string& text);

std::string to_dec_string(const u256& v);
std::string to_dec_string(const i256& v);

} // namespace lsdsim
