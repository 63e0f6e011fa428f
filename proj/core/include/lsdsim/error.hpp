#pragma once

#include <stdexcept>
#include <string>

namespace lsdsim {

// Every failure mode in the library maps to one code. Error paths are part of
// the contract: callers (and tests) dispatch on the code, not the message.
enum class Err {
    // fixedmath
    Overflow,
    DivideByZero,
    // lsd
    ZeroAmount,
    Paused,
    NotBootstrapped,
    WithdrawalsDisabled,
    InsufficientBalance,
    DepositPoolFull,
    AssignExceedsBalance,
    InsufficientProtocolLiquidity,
    // amm
    NoConvergence,
    InsufficientLiquidity,
    PriceOutOfRange,
    ZeroLiquidity,
    NothingToCollect,
    // arbitrage
    FlashLoanDefault,
    InvalidBounds,
    // analytics
    InsufficientTicks,
    ZeroInitialValue,
    MissingHistory,
    SchemaError,
    // scenario
    ConfigError,
    CorruptSnapshot,
};

const char* err_name(Err e);

class SimError : public std::runtime_error {
public:
    SimError(Err code, const std::string& detail)
        : std::runtime_error(std::string(err_name(code)) + ": " + detail), code_(code) {}
    explicit SimError(Err code) : std::runtime_error(err_name(code)), code_(code) {}

    Err code() const { return code_; }

private:
    Err code_;
};

} // namespace lsdsim
