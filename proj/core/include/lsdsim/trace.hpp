#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "lsdsim/fixedmath.hpp"

namespace lsdsim {

enum class EventKind {
    Stake,
    Unstake,
    Swap,
    AddLiquidity,
    RemoveLiquidity,
    FlashLoan,
    Assign,
    Rebase,
    Accrue,
};

const char* event_kind_name(EventKind k);
EventKind parse_event_kind(const std::string& name);

// One ledger row. Amounts are (sent, received) from the sender's side; for
// AddLiquidity/RemoveLiquidity amountIn is the ETH leg and amountOut the LSD
// leg. Swap venues carry a direction suffix, e.g. "curve.eth2lsd".
struct TraceEvent {
    std::uint64_t block = 0;
    std::uint32_t txIndex = 0;
    std::string txHash;
    std::string sender;
    EventKind kind = EventKind::Swap;
    std::string venue;
    Amount amountIn = 0;
    Amount amountOut = 0;
    std::int64_t timestamp = 0;
};

using EventTrace = std::vector<TraceEvent>;

inline constexpr const char* kTraceCsvHeader =
    "block,tx_index,tx_hash,sender,kind,venue,amount_in_wei,amount_out_wei,timestamp";

// Venue helpers for the swap direction suffix.
std::string venue_base(const std::string& venue);
bool swap_is_eth_to_lsd(const TraceEvent& ev);
bool swap_is_lsd_to_eth(const TraceEvent& ev);

// (block, txIndex) must be non-decreasing, and rows of one transaction must
// share txHash and sender. Throws SchemaError otherwise.
void validate_trace(const EventTrace& trace);

void write_trace_csv(std::ostream& out, const EventTrace& trace);
void write_trace_csv(const std::string& path, const EventTrace& trace);
EventTrace read_trace_csv(const std::string& path);

} // namespace lsdsim
