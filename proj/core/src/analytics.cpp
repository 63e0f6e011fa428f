#include "lsdsim/analytics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <utility>

#include "lsdsim/csv.hpp"

namespace lsdsim {

namespace {

constexpr std::int64_t kSecondsPerDay = 86'400;
constexpr std::int64_t kSecondsPerYear = 31'536'000;
constexpr std::int64_t kMatchWindow = 30 * kSecondsPerDay;

double wad_to_double(const Wad& w) { return w.convert_to<double>(); }

// 0.1% amount agreement for detector matching.
bool amounts_agree(const Amount& a, const Amount& b) {
    u256 diff = abs_diff(a, b);
    u512 lhs = u512(diff) * 1000;
    return lhs <= u512(a);
}

} // namespace

std::string format_sig12(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

std::map<std::int64_t, std::vector<Tick>> TickSeries::by_day() const {
    std::map<std::int64_t, std::vector<Tick>> days;
    for (const auto& t : ticks) days[t.timestamp / kSecondsPerDay].push_back(t);
    return days;
}

TickSeries read_ticks_csv(const std::string& path) {
    TickSeries s;
    std::int64_t prev = INT64_MIN;
    for (const auto& row : csv_read_file(path, kTicksCsvHeader)) {
        Tick t;
        t.timestamp = csv_ll(row[0], path);
        try {
            t.p1st = u256(row[1]);
            t.p2nd = u256(row[2]);
        } catch (const std::exception&) {
            throw SimError(Err::SchemaError, path + ": bad wad in ticks row");
        }
        if (t.timestamp <= prev)
            throw SimError(Err::SchemaError, path + ": timestamps not strictly increasing");
        if (t.p1st == 0 || t.p2nd == 0)
            throw SimError(Err::SchemaError, path + ": tick prices must be positive");
        prev = t.timestamp;
        s.ticks.push_back(t);
    }
    return s;
}

void write_ticks_csv(const std::string& path, const TickSeries& series) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw SimError(Err::SchemaError, "cannot write " + path);
    out << kTicksCsvHeader << "\n";
    for (const auto& t : series.ticks)
        out << t.timestamp << ',' << to_dec_string(t.p1st) << ',' << to_dec_string(t.p2nd) << "\n";
}

double realized_volatility(const std::vector<Tick>& day) {
    if (day.size() < 2)
        throw SimError(Err::InsufficientTicks, "realized volatility needs two ticks");
    double sum = 0.0;
    for (std::size_t j = 1; j < day.size(); ++j) {
        double r = std::log(wad_to_double(day[j].p2nd) / wad_to_double(day[j - 1].p2nd));
        sum += r * r;
    }
    return std::sqrt(sum);
}

double price_discrepancy(const std::vector<Tick>& day) {
    if (day.empty()) throw SimError(Err::InsufficientTicks, "price discrepancy needs a tick");
    double sum = 0.0;
    for (const auto& t : day) {
        double gap = (to_signed(t.p2nd) - to_signed(t.p1st)).convert_to<double>();
        sum += gap / wad_to_double(t.p1st);
    }
    return sum / static_cast<double>(day.size());
}

std::vector<DayMetrics> daily_metrics(const TickSeries& series) {
    std::vector<DayMetrics> rows;
    for (const auto& [day, ticks] : series.by_day()) {
        DayMetrics m;
        m.day = day;
        m.tickCount = ticks.size();
        m.partial = ticks.size() < kTicksPerDay;
        if (ticks.size() >= 2) m.rv = realized_volatility(ticks);
        m.pd = price_discrepancy(ticks);
        rows.push_back(m);
    }
    return rows;
}

void write_metrics_csv(const std::string& path, const std::vector<DayMetrics>& rows) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw SimError(Err::SchemaError, "cannot write " + path);
    out << kMetricsCsvHeader << "\n";
    for (const auto& m : rows) {
        out << m.day << ',' << m.tickCount << ',' << (m.partial ? 1 : 0) << ','
            << (m.rv ? format_sig12(*m.rv) : std::string{}) << ',' << format_sig12(m.pd) << "\n";
    }
}

double annualize(double rate, std::int64_t t0, std::int64_t t1) {
    return rate * (static_cast<double>(kSecondsPerYear) / static_cast<double>(t1 - t0));
}

PnlResult lp_pnl_apr(const LpPosition& pos, bool includeTxFees) {
    Amount v0 = pos.ethAtT0 + wad_mul(pos.lsdAtT0, pos.priceAtT0, Round::Down);
    if (v0 == 0) throw SimError(Err::ZeroInitialValue, "position " + pos.id);
    Amount v1 = pos.ethAtT1 + wad_mul(pos.lsdAtT1, pos.priceAtT1, Round::Down);
    i256 pnl = to_signed(v1) - to_signed(v0);
    if (includeTxFees) pnl -= to_signed(pos.txFees);
    PnlResult res;
    res.pnlWei = pnl;
    res.apr = annualize(pnl.convert_to<double>() / v0.convert_to<double>(), pos.t0, pos.t1);
    return res;
}

const RatePoint& ProtocolHistory::at(std::int64_t ts) const {
    const RatePoint* best = nullptr;
    for (const auto& p : points) {
        if (p.timestamp <= ts) best = &p;
        else break;
    }
    if (!best) throw SimError(Err::MissingHistory, "no rate at t=" + std::to_string(ts));
    return *best;
}

HistoryByVenue read_history_csv(const std::string& path) {
    HistoryByVenue out;
    for (const auto& row : csv_read_file(path, kHistoryCsvHeader)) {
        RatePoint p;
        p.timestamp = csv_ll(row[0], path);
        try {
            p.p1st = u256(row[2]);
            p.pshare = u256(row[3]);
        } catch (const std::exception&) {
            throw SimError(Err::SchemaError, path + ": bad wad in history row");
        }
        out[row[1]].points.push_back(p);
    }
    for (auto& [venue, hist] : out) {
        (void)venue;
        std::stable_sort(hist.points.begin(), hist.points.end(),
                         [](const RatePoint& a, const RatePoint& b) { return a.timestamp < b.timestamp; });
    }
    return out;
}

void write_history_csv(const std::string& path, const HistoryByVenue& histories) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw SimError(Err::SchemaError, "cannot write " + path);
    out << kHistoryCsvHeader << "\n";
    for (const auto& [venue, hist] : histories)
        for (const auto& p : hist.points)
            out << p.timestamp << ',' << venue << ',' << to_dec_string(p.p1st) << ','
                << to_dec_string(p.pshare) << "\n";
}

PnlResult hold_pnl_apr(const LpPosition& pos, Mechanism mechanism, const ProtocolHistory& history) {
    const RatePoint& r0 = history.at(pos.t0);
    const RatePoint& r1 = history.at(pos.t1);
    Amount holdLsd;
    Wad priceT0, priceT1;
    if (mechanism == Mechanism::Rebasing) {
        // Quantity follows the share price; the primary price stays 1.
        holdLsd = mul_div(pos.lsdAtT0, r1.pshare, r0.pshare, Round::Down);
        priceT0 = wad_one();
        priceT1 = wad_one();
    } else {
        holdLsd = pos.lsdAtT0;
        priceT0 = r0.p1st;
        priceT1 = r1.p1st;
    }
    Amount v0 = pos.ethAtT0 + wad_mul(pos.lsdAtT0, priceT0, Round::Down);
    if (v0 == 0) throw SimError(Err::ZeroInitialValue, "position " + pos.id);
    Amount v1 = pos.ethAtT0 + wad_mul(holdLsd, priceT1, Round::Down);
    PnlResult res;
    res.pnlWei = to_signed(v1) - to_signed(v0);
    res.apr = annualize(res.pnlWei.convert_to<double>() / v0.convert_to<double>(), pos.t0, pos.t1);
    return res;
}

Mechanism infer_mechanism(const ProtocolHistory& history) {
    for (const auto& p : history.points)
        if (p.pshare != wad_one()) return Mechanism::Rebasing;
    return Mechanism::RewardBearing;
}

CompareReport compare_lp_vs_hold(const std::vector<LpPosition>& positions,
                                 const HistoryByVenue& histories) {
    std::vector<LpPosition> sorted = positions;
    std::sort(sorted.begin(), sorted.end(),
              [](const LpPosition& a, const LpPosition& b) { return a.id < b.id; });
    CompareReport report;
    for (const auto& pos : sorted) {
        CompareRow row;
        row.positionId = pos.id;
        row.venue = pos.venue;
        try {
            auto hit = histories.find(venue_base(pos.venue));
            if (hit == histories.end())
                throw SimError(Err::MissingHistory, "no history for venue " + pos.venue);
            const ProtocolHistory& hist = hit->second;
            Mechanism mech = infer_mechanism(hist);
            row.aprLpNet = lp_pnl_apr(pos, true).apr;
            row.aprHold = hold_pnl_apr(pos, mech, hist).apr;
            row.holdWins = row.aprHold > row.aprLpNet;
            report.comparable += 1;
            if (row.holdWins) report.holdWinsCount += 1;
        } catch (const SimError& e) {
            row.failed = true;
            row.error = e.what();
        }
        report.rows.push_back(std::move(row));
    }
    return report;
}

std::vector<ArbFinding> detect_arbitrages(const EventTrace& trace, std::int64_t shapellaTimestamp) {
    validate_trace(trace);
    std::vector<ArbFinding> findings;

    // Staking arbitrage: stake and LSD->ETH swap inside one transaction.
    for (std::size_t i = 0; i < trace.size();) {
        std::size_t j = i;
        while (j < trace.size() && trace[j].block == trace[i].block &&
               trace[j].txIndex == trace[i].txIndex)
            ++j;
        const TraceEvent* stake = nullptr;
        for (std::size_t k = i; k < j; ++k) {
            const auto& ev = trace[k];
            if (ev.kind == EventKind::Stake && !stake) {
                stake = &ev;
            } else if (stake && swap_is_lsd_to_eth(ev) && amounts_agree(stake->amountOut, ev.amountIn)) {
                ArbFinding f;
                f.kind = ArbKind::StakingArb;
                f.txHashes = {ev.txHash};
                f.sender = ev.sender;
                f.amountIn = stake->amountIn;
                f.amountOut = ev.amountOut;
                f.profit = to_signed(ev.amountOut) - to_signed(stake->amountIn);
                findings.push_back(std::move(f));
                stake = nullptr; // one finding per stake
            }
        }
        i = j;
    }

    // Unstaking arbitrage: post-Shapella ETH->LSD swap, then a separate
    // unstake by the same sender. Earliest match wins; an unstake pairs with
    // at most one swap.
    std::vector<bool> used(trace.size(), false);
    for (std::size_t i = 0; i < trace.size(); ++i) {
        const auto& swap = trace[i];
        if (!swap_is_eth_to_lsd(swap) || swap.timestamp < shapellaTimestamp) continue;
        for (std::size_t k = i + 1; k < trace.size(); ++k) {
            const auto& un = trace[k];
            if (used[k] || un.kind != EventKind::Unstake) continue;
            if (un.block == swap.block && un.txIndex == swap.txIndex) continue; // separate txs only
            if (un.sender != swap.sender) continue;
            if (un.timestamp - swap.timestamp > kMatchWindow) break; // trace is time-ordered
            if (!amounts_agree(swap.amountOut, un.amountIn)) continue;
            ArbFinding f;
            f.kind = ArbKind::UnstakingArb;
            f.txHashes = {swap.txHash, un.txHash};
            f.sender = swap.sender;
            f.amountIn = swap.amountIn;
            f.amountOut = un.amountOut;
            f.profit = to_signed(un.amountOut) - to_signed(swap.amountIn);
            findings.push_back(std::move(f));
            used[k] = true;
            break;
        }
    }
    return findings;
}

void write_findings_csv(const std::string& path, const std::vector<ArbFinding>& findings) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw SimError(Err::SchemaError, "cannot write " + path);
    out << kFindingsCsvHeader << "\n";
    for (const auto& f : findings) {
        std::string hashes;
        for (const auto& h : f.txHashes) {
            if (!hashes.empty()) hashes += ';';
            hashes += h;
        }
        out << (f.kind == ArbKind::StakingArb ? "StakingArb" : "UnstakingArb") << ',' << f.sender
            << ',' << hashes << ',' << to_dec_string(f.amountIn) << ',' << to_dec_string(f.amountOut)
            << ',' << to_dec_string(f.profit) << "\n";
    }
}

std::vector<LpPosition> positions_from_trace(const EventTrace& trace,
                                             const HistoryByVenue& histories,
                                             const Amount& txFeePerAction) {
    struct OpenPosition {
        std::int64_t t0 = 0;
        Amount eth = 0, lsd = 0;
        std::size_t actions = 0;
    };
    std::map<std::pair<HolderId, std::string>, OpenPosition> open;
    std::map<std::pair<HolderId, std::string>, int> seq;
    std::vector<LpPosition> out;

    for (const auto& ev : trace) {
        if (ev.kind != EventKind::AddLiquidity && ev.kind != EventKind::RemoveLiquidity) continue;
        auto key = std::make_pair(ev.sender, venue_base(ev.venue));
        if (ev.kind == EventKind::AddLiquidity) {
            auto& pos = open[key];
            if (pos.actions == 0) pos.t0 = ev.timestamp;
            pos.eth += ev.amountIn;
            pos.lsd += ev.amountOut;
            pos.actions += 1;
        } else {
            auto it = open.find(key);
            if (it == open.end() || it->second.actions == 0) continue; // removal without deposit
            const OpenPosition& o = it->second;
            LpPosition pos;
            pos.id = ev.sender + "@" + key.second + "#" + std::to_string(seq[key]++);
            pos.owner = ev.sender;
            pos.venue = key.second;
            pos.t0 = o.t0;
            pos.t1 = ev.timestamp;
            pos.ethAtT0 = o.eth;
            pos.lsdAtT0 = o.lsd;
            pos.ethAtT1 = ev.amountIn;
            pos.lsdAtT1 = ev.amountOut;
            pos.txFees = txFeePerAction * Amount(o.actions + 1);
            auto hit = histories.find(key.second);
            if (hit != histories.end()) {
                pos.priceAtT0 = hit->second.at(pos.t0).p1st;
                pos.priceAtT1 = hit->second.at(pos.t1).p1st;
            } else {
                pos.priceAtT0 = wad_one();
                pos.priceAtT1 = wad_one();
            }
            out.push_back(std::move(pos));
            open.erase(it);
        }
    }
    return out;
}

} // namespace lsdsim
