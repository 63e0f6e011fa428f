#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "lsdsim/fixedmath.hpp"
#include "lsdsim/lsd.hpp"
#include "lsdsim/trace.hpp"

namespace lsdsim {

// Analytics run offline over immutable inputs; floating point is allowed
// here (and only here), results are reported to 12 significant digits.

struct Tick {
    std::int64_t timestamp = 0;
    Wad p1st = 0;
    Wad p2nd = 0;
};

inline constexpr const char* kTicksCsvHeader = "timestamp,p1st_wad,p2nd_wad";
inline constexpr int kTicksPerDay = 144; // 10-minute sampling

struct TickSeries {
    std::vector<Tick> ticks; // strictly increasing timestamps

    // Groups by UTC day (timestamp / 86400).
    std::map<std::int64_t, std::vector<Tick>> by_day() const;
};

TickSeries read_ticks_csv(const std::string& path);
void write_ticks_csv(const std::string& path, const TickSeries& series);

// sqrt(sum of squared log returns of p2nd over the day's consecutive pairs).
double realized_volatility(const std::vector<Tick>& day);

// mean over ticks of (p2nd - p1st)/p1st.
double price_discrepancy(const std::vector<Tick>& day);

struct DayMetrics {
    std::int64_t day = 0;
    std::size_t tickCount = 0;
    bool partial = false; // fewer than the nominal 144 ticks
    std::optional<double> rv; // needs at least 2 ticks
    double pd = 0.0;
};

std::vector<DayMetrics> daily_metrics(const TickSeries& series);

inline constexpr const char* kMetricsCsvHeader = "day,ticks,partial,rv,pd";
void write_metrics_csv(const std::string& path, const std::vector<DayMetrics>& rows);

// A closed liquidity position: everything deposited at t0, everything
// withdrawn at t1, valued at the primary LSD price on both ends.
struct LpPosition {
    std::string id;
    HolderId owner;
    std::string venue;
    std::int64_t t0 = 0;
    std::int64_t t1 = 0;
    Amount lsdAtT0 = 0;
    Amount ethAtT0 = 0;
    Amount lsdAtT1 = 0;
    Amount ethAtT1 = 0;
    Wad priceAtT0 = 0;
    Wad priceAtT1 = 0;
    Amount txFees = 0; // ETH spent adding and removing
};

struct PnlResult {
    i256 pnlWei = 0;
    double apr = 0.0;
};

// APR annualization is linear: rate * (year-seconds / holding-seconds).
double annualize(double rate, std::int64_t t0, std::int64_t t1);

PnlResult lp_pnl_apr(const LpPosition& pos, bool includeTxFees);

enum class Mechanism { Rebasing, RewardBearing };

struct RatePoint {
    std::int64_t timestamp = 0;
    Wad p1st = wad_one();   // primary LSD price (1 for rebasing, Eq.-2 rate otherwise)
    Wad pshare = wad_one(); // rebasing share price; constant 1e18 otherwise
};

struct ProtocolHistory {
    std::vector<RatePoint> points; // sorted by timestamp

    // Latest point at or before ts; MissingHistory when none exists.
    const RatePoint& at(std::int64_t ts) const;
};

inline constexpr const char* kHistoryCsvHeader = "timestamp,venue,p1st_wad,pshare_wad";
using HistoryByVenue = std::map<std::string, ProtocolHistory>;
HistoryByVenue read_history_csv(const std::string& path);
void write_history_csv(const std::string& path, const HistoryByVenue& histories);

// Counterfactual: the same starting portfolio simply held. Rebasing LSDs
// grow in quantity with the share price at price 1; reward-bearing LSDs
// keep quantity and reprice.
PnlResult hold_pnl_apr(const LpPosition& pos, Mechanism mechanism, const ProtocolHistory& history);

// A venue whose share price ever moves is rebasing; otherwise rewards ride
// on the Eq.-2 rate.
Mechanism infer_mechanism(const ProtocolHistory& history);

struct CompareRow {
    std::string positionId;
    std::string venue;
    bool failed = false;
    std::string error;
    double aprLpNet = 0.0;
    double aprHold = 0.0;
    bool holdWins = false;
};

struct CompareReport {
    std::vector<CompareRow> rows; // ordered by position id
    std::size_t comparable = 0;
    std::size_t holdWinsCount = 0;

    double hold_wins_fraction() const {
        return comparable == 0 ? 0.0 : static_cast<double>(holdWinsCount) / comparable;
    }
};

CompareReport compare_lp_vs_hold(const std::vector<LpPosition>& positions,
                                 const HistoryByVenue& histories);

// Detection heuristics over a trace.
enum class ArbKind { StakingArb, UnstakingArb };

struct ArbFinding {
    ArbKind kind = ArbKind::StakingArb;
    std::vector<std::string> txHashes; // one for staking, swap+unstake for unstaking
    HolderId sender;
    Amount amountIn = 0;
    Amount amountOut = 0;
    i256 profit = 0;
};

// StakingArb: one transaction holding a Stake followed by a swap of the
// minted LSD back to ETH. UnstakingArb: a post-Shapella ETH->LSD swap
// matched to the earliest later unstake of the same sender with agreeing
// amounts (0.1% tolerance, 30-day window, each unstake used once).
std::vector<ArbFinding> detect_arbitrages(const EventTrace& trace, std::int64_t shapellaTimestamp);

inline constexpr const char* kFindingsCsvHeader =
    "kind,sender,tx_hashes,amount_in_wei,amount_out_wei,profit_wei";
void write_findings_csv(const std::string& path, const std::vector<ArbFinding>& findings);

// Rebuilds closed positions from AddLiquidity/RemoveLiquidity rows, pricing
// the endpoints from the venue's history. txFees = txFeePerAction * actions.
std::vector<LpPosition> positions_from_trace(const EventTrace& trace,
                                             const HistoryByVenue& histories,
                                             const Amount& txFeePerAction);

std::string format_sig12(double v);

} // namespace lsdsim
