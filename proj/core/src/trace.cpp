#include "lsdsim/trace.hpp"

#include <fstream>
#include <ostream>

#include "lsdsim/csv.hpp"

namespace lsdsim {

const char* event_kind_name(EventKind k) {
    switch (k) {
        case EventKind::Stake: return "Stake";
        case EventKind::Unstake: return "Unstake";
        case EventKind::Swap: return "Swap";
        case EventKind::AddLiquidity: return "AddLiquidity";
        case EventKind::RemoveLiquidity: return "RemoveLiquidity";
        case EventKind::FlashLoan: return "FlashLoan";
        case EventKind::Assign: return "Assign";
        case EventKind::Rebase: return "Rebase";
        case EventKind::Accrue: return "Accrue";
    }
    return "?";
}

EventKind parse_event_kind(const std::string& name) {
    for (EventKind k : {EventKind::Stake, EventKind::Unstake, EventKind::Swap,
                        EventKind::AddLiquidity, EventKind::RemoveLiquidity, EventKind::FlashLoan,
                        EventKind::Assign, EventKind::Rebase, EventKind::Accrue}) {
        if (name == event_kind_name(k)) return k;
    }
    throw SimError(Err::SchemaError, "unknown event kind '" + name + "'");
}

std::string venue_base(const std::string& venue) {
    auto dot = venue.find('.');
    return dot == std::string::npos ? venue : venue.substr(0, dot);
}

bool swap_is_eth_to_lsd(const TraceEvent& ev) {
    return ev.kind == EventKind::Swap && ev.venue.ends_with(".eth2lsd");
}

bool swap_is_lsd_to_eth(const TraceEvent& ev) {
    return ev.kind == EventKind::Swap && ev.venue.ends_with(".lsd2eth");
}

void validate_trace(const EventTrace& trace) {
    for (std::size_t i = 1; i < trace.size(); ++i) {
        const auto& prev = trace[i - 1];
        const auto& cur = trace[i];
        if (cur.block < prev.block ||
            (cur.block == prev.block && cur.txIndex < prev.txIndex))
            throw SimError(Err::SchemaError,
                           "trace out of order at row " + std::to_string(i));
        if (cur.block == prev.block && cur.txIndex == prev.txIndex) {
            if (cur.txHash != prev.txHash || cur.sender != prev.sender)
                throw SimError(Err::SchemaError,
                               "transaction rows disagree at row " + std::to_string(i));
        }
    }
}

void write_trace_csv(std::ostream& out, const EventTrace& trace) {
    out << kTraceCsvHeader << "\n";
    for (const auto& ev : trace) {
        out << ev.block << ',' << ev.txIndex << ',' << ev.txHash << ',' << ev.sender << ','
            << event_kind_name(ev.kind) << ',' << ev.venue << ',' << to_dec_string(ev.amountIn)
            << ',' << to_dec_string(ev.amountOut) << ',' << ev.timestamp << "\n";
    }
}

void write_trace_csv(const std::string& path, const EventTrace& trace) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw SimError(Err::SchemaError, "cannot write " + path);
    write_trace_csv(out, trace);
}

EventTrace read_trace_csv(const std::string& path) {
    EventTrace trace;
    for (const auto& row : csv_read_file(path, kTraceCsvHeader)) {
        TraceEvent ev;
        ev.block = static_cast<std::uint64_t>(csv_ll(row[0], path));
        ev.txIndex = static_cast<std::uint32_t>(csv_ll(row[1], path));
        ev.txHash = row[2];
        ev.sender = row[3];
        ev.kind = parse_event_kind(row[4]);
        ev.venue = row[5];
        try {
            ev.amountIn = u256(row[6]);
            ev.amountOut = u256(row[7]);
        } catch (const std::exception&) {
            throw SimError(Err::SchemaError, path + ": bad amount in trace row");
        }
        ev.timestamp = csv_ll(row[8], path);
        trace.push_back(std::move(ev));
    }
    validate_trace(trace);
    return trace;
}

} // namespace lsdsim
