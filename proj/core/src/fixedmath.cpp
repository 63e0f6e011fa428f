#include "lsdsim/fixedmath.hpp"

#include <cctype>
#include <cstdlib>

namespace lsdsim {

const char* err_name(Err e) {
    switch (e) {
        case Err::Overflow: return "Overflow";
        case Err::DivideByZero: return "DivideByZero";
        case Err::ZeroAmount: return "ZeroAmount";
        case Err::Paused: return "Paused";
        case Err::NotBootstrapped: return "NotBootstrapped";
        case Err::WithdrawalsDisabled: return "WithdrawalsDisabled";
        case Err::InsufficientBalance: return "InsufficientBalance";
        case Err::DepositPoolFull: return "DepositPoolFull";
        case Err::AssignExceedsBalance: return "AssignExceedsBalance";
        case Err::InsufficientProtocolLiquidity: return "InsufficientProtocolLiquidity";
        case Err::NoConvergence: return "NoConvergence";
        case Err::InsufficientLiquidity: return "InsufficientLiquidity";
        case Err::PriceOutOfRange: return "PriceOutOfRange";
        case Err::ZeroLiquidity: return "ZeroLiquidity";
        case Err::NothingToCollect: return "NothingToCollect";
        case Err::FlashLoanDefault: return "FlashLoanDefault";
        case Err::InvalidBounds: return "InvalidBounds";
        case Err::InsufficientTicks: return "InsufficientTicks";
        case Err::ZeroInitialValue: return "ZeroInitialValue";
        case Err::MissingHistory: return "MissingHistory";
        case Err::SchemaError: return "SchemaError";
        case Err::ConfigError: return "ConfigError";
        case Err::CorruptSnapshot: return "CorruptSnapshot";
    }
    return "UnknownError";
}

u256 parse_amount(const std::string& text) {
    if (text.empty()) throw SimError(Err::ConfigError, "empty amount");
    std::string digits;   // integer+fraction digits, decimal point removed
    long frac_digits = 0;
    long exponent = 0;
    std::size_t i = 0;
    bool seen_digit = false, seen_dot = false;
    for (; i < text.size(); ++i) {
        char c = text[i];
        if (std::isdigit(static_cast<unsigned char>(c))) {
            digits += c;
            if (seen_dot) ++frac_digits;
            seen_digit = true;
        } else if (c == '.' && !seen_dot) {
            seen_dot = true;
        } else if ((c == 'e' || c == 'E') && seen_digit) {
            ++i;
            break;
        } else if (c == '_') {
            continue; // digit grouping
        } else {
            throw SimError(Err::ConfigError, "bad amount literal: " + text);
        }
    }
    if (!seen_digit) throw SimError(Err::ConfigError, "bad amount literal: " + text);
    if (i < text.size()) {
        char* end = nullptr;
        exponent = std::strtol(text.c_str() + i, &end, 10);
        if (end != text.c_str() + text.size())
            throw SimError(Err::ConfigError, "bad amount exponent: " + text);
    }
    long shift = exponent - frac_digits;
    u256 v = 0;
    try {
        for (char c : digits) v = v * 10 + (c - '0');
        for (long k = 0; k < shift; ++k) v *= 10;
    } catch (const std::overflow_error&) {
        throw SimError(Err::Overflow, "amount literal exceeds 256 bits: " + text);
    }
    if (shift < 0) {
        // Trailing fractional digits must all be zero: amounts are exact wei.
        u256 base = 1;
        for (long k = 0; k < -shift; ++k) base *= 10;
        if (v % base != 0)
            throw SimError(Err::ConfigError, "amount not integral in wei: " + text);
        v /= base;
    }
    return v;
}

std::string to_dec_string(const u256& v) { return v.str(); }
std::string to_dec_string(const i256& v) { return v.str(); }

} // namespace lsdsim
