#pragma once

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <string>
#include <vector>

#include "damsim/learning.hpp"
#include "damsim/market_data.hpp"
#include "damsim/stats.hpp"
#include "damsim/svg.hpp"

namespace damsim {

/// Adverse-bidder classification of one generator: a strategic tag is
/// adverse when its mean realized payoff beats the economic mean with
/// Welch-test significance at p < 0.05.
struct AdverseRow {
    std::string gen_id;
    double capacity_mw = 0.0;
    double mean_eco = 0.0, mean_selfcommit = 0.0, mean_selfschedule = 0.0;
    long n_eco = 0, n_selfcommit = 0, n_selfschedule = 0;
    WelchResult test_selfcommit, test_selfschedule;
    bool adverse_selfcommit = false, adverse_selfschedule = false;
    bool adverse = false;           // either tag
    double excess_profit = 0.0;     // best strategic mean minus economic mean
};

struct AdverseReport {
    std::vector<AdverseRow> rows;
    double total_excess_profit = 0.0;
    double competitive_profit = 0.0;        // iteration-0 producer profit
    double excess_share_of_competitive = 0.0;

    int count_adverse(const std::string& id_prefix = "") const {
        int n = 0;
        for (const auto& r : rows)
            if (r.adverse && r.gen_id.rfind(id_prefix, 0) == 0) ++n;
        return n;
    }
};

inline AdverseReport classify_adverse(const IterationLog& log, const MarketCase& mc,
                                      double p_threshold = 0.05) {
    AdverseReport rep;
    if (log.records.empty()) return rep;
    const int G = static_cast<int>(mc.generators.size());

    for (const auto& r : log.records[0].settlements) rep.competitive_profit += r.profit;

    for (int g = 0; g < G; ++g) {
        AdverseRow row;
        row.gen_id = mc.generators[g].id;
        row.capacity_mw = mc.generators[g].capacity();
        std::array<std::vector<double>, 3> hist;
        for (const auto& rec : log.records)
            hist[static_cast<int>(rec.chosen[g])].push_back(rec.settlements[g].profit);
        auto mean = [](const std::vector<double>& v) {
            return v.empty() ? 0.0 : std::accumulate(v.begin(), v.end(), 0.0) / v.size();
        };
        const auto& eco = hist[0];
        const auto& sc = hist[1];
        const auto& ss = hist[2];
        row.n_eco = eco.size();
        row.n_selfcommit = sc.size();
        row.n_selfschedule = ss.size();
        row.mean_eco = mean(eco);
        row.mean_selfcommit = mean(sc);
        row.mean_selfschedule = mean(ss);
        row.test_selfcommit = welch_t(sc, eco);
        row.test_selfschedule = welch_t(ss, eco);
        row.adverse_selfcommit = row.test_selfcommit.testable &&
                                 row.mean_selfcommit - row.mean_eco > 0.0 &&
                                 row.test_selfcommit.p < p_threshold;
        row.adverse_selfschedule = row.test_selfschedule.testable &&
                                   row.mean_selfschedule - row.mean_eco > 0.0 &&
                                   row.test_selfschedule.p < p_threshold;
        row.adverse = row.adverse_selfcommit || row.adverse_selfschedule;
        if (row.adverse) {
            double best = -kInf;
            if (!sc.empty()) best = std::max(best, row.mean_selfcommit);
            if (!ss.empty()) best = std::max(best, row.mean_selfschedule);
            row.excess_profit = best - row.mean_eco;
            rep.total_excess_profit += row.excess_profit;
        }
        rep.rows.push_back(std::move(row));
    }
    rep.excess_share_of_competitive =
        rep.competitive_profit != 0.0 ? rep.total_excess_profit / rep.competitive_profit : 0.0;
    return rep;
}

/// Per-iteration series and scalar metrics of one run, normalized against
/// the run's own competitive (first) iteration.
struct SummaryTables {
    std::vector<double> consumer_cost, producer_true_cost, producer_profit;
    std::vector<double> norm_consumer_cost, norm_producer_cost, norm_producer_profit;
    std::vector<double> mwp_total, loc0_total, loc_display_total;
    std::vector<std::array<double, 3>> share_count;  // fraction of thermal units per tag
    std::vector<std::array<double, 3>> share_mw;     // fraction of thermal MW per tag
    std::vector<double> price_min, price_max, price_mean, price_competitive;  // per period
    std::vector<double> profit_duration_competitive;             // sorted desc
    std::vector<std::array<double, 3>> profit_by_strategy;       // aligned with sorted order
    std::vector<std::string> profit_duration_ids;
};

inline SummaryTables summarize(const IterationLog& log, const MarketCase& mc) {
    SummaryTables s;
    if (log.records.empty()) return s;
    const int T = mc.horizon();
    const int G = static_cast<int>(mc.generators.size());

    double thermal_n = 0.0, thermal_mw = 0.0;
    for (const auto& g : mc.generators)
        if (g.is_thermal()) {
            thermal_n += 1.0;
            thermal_mw += g.capacity();
        }

    for (const auto& rec : log.records) {
        s.consumer_cost.push_back(rec.consumer_cost);
        s.producer_true_cost.push_back(rec.producer_true_cost);
        s.producer_profit.push_back(rec.producer_profit);
        s.mwp_total.push_back(rec.mwp_total);
        s.loc0_total.push_back(rec.loc0_total);
        s.loc_display_total.push_back(rec.loc_display_total);
        std::array<double, 3> cnt{0, 0, 0}, mw{0, 0, 0};
        for (int g = 0; g < G; ++g) {
            if (!mc.generators[g].is_thermal()) continue;
            cnt[static_cast<int>(rec.chosen[g])] += 1.0;
            mw[static_cast<int>(rec.chosen[g])] += mc.generators[g].capacity();
        }
        for (int k = 0; k < 3; ++k) {
            cnt[k] = thermal_n > 0 ? cnt[k] / thermal_n : 0.0;
            mw[k] = thermal_mw > 0 ? mw[k] / thermal_mw : 0.0;
        }
        s.share_count.push_back(cnt);
        s.share_mw.push_back(mw);
    }
    auto normalize = [](const std::vector<double>& v) {
        std::vector<double> out;
        out.reserve(v.size());
        const double base = v.empty() || v[0] == 0.0 ? 1.0 : v[0];
        for (double x : v) out.push_back(x / base);
        return out;
    };
    s.norm_consumer_cost = normalize(s.consumer_cost);
    s.norm_producer_cost = normalize(s.producer_true_cost);
    s.norm_producer_profit = normalize(s.producer_profit);

    s.price_min.assign(T, kInf);
    s.price_max.assign(T, -kInf);
    s.price_mean.assign(T, 0.0);
    s.price_competitive = log.records[0].lambda;
    for (const auto& rec : log.records)
        for (int t = 0; t < T; ++t) {
            s.price_min[t] = std::min(s.price_min[t], rec.lambda[t]);
            s.price_max[t] = std::max(s.price_max[t], rec.lambda[t]);
            s.price_mean[t] += rec.lambda[t] / static_cast<double>(log.records.size());
        }

    // Profit duration: generators sorted by competitive profit descending,
    // with each strategy's mean realized profit alongside.
    std::vector<int> order(G);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        return log.records[0].settlements[a].profit > log.records[0].settlements[b].profit;
    });
    for (int g : order) {
        s.profit_duration_ids.push_back(mc.generators[g].id);
        s.profit_duration_competitive.push_back(log.records[0].settlements[g].profit);
        std::array<double, 3> mean{0, 0, 0};
        std::array<long, 3> n{0, 0, 0};
        for (const auto& rec : log.records) {
            const int k = static_cast<int>(rec.chosen[g]);
            mean[k] += rec.settlements[g].profit;
            n[k] += 1;
        }
        for (int k = 0; k < 3; ++k) mean[k] = n[k] ? mean[k] / n[k] : 0.0;
        s.profit_by_strategy.push_back(mean);
    }
    return s;
}

namespace detail {

inline std::string fnum(double v) {
    char b[40];
    std::snprintf(b, sizeof(b), "%.10g", v);
    return b;
}

class CsvWriter {
public:
    explicit CsvWriter(const std::string& path) : out_(path, std::ios::binary) {
        if (!out_) throw IoError("cannot write '" + path + "'");
    }
    void row(const std::vector<std::string>& cells) {
        for (size_t k = 0; k < cells.size(); ++k) {
            if (k) out_ << ",";
            out_ << cells[k];
        }
        out_ << "\r\n";
    }

private:
    std::ofstream out_;
};

} // namespace detail

/// Writes the run artifacts: one CSV per metric series, the adverse-bidder
/// report, and the static charts. File names are stable; rewriting the same
/// inputs reproduces the same bytes.
inline void emit_analytics(const SummaryTables& s, const AdverseReport& adverse,
                           const std::string& out_dir) {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) throw IoError("cannot create output directory '" + out_dir + "'");
    auto path = [&](const char* name) { return out_dir + "/" + name; };
    using detail::CsvWriter;
    using detail::fnum;

    const size_t N = s.consumer_cost.size();
    {
        CsvWriter csv(path("consumer_cost.csv"));
        csv.row({"iteration", "consumer_cost", "normalized"});
        for (size_t k = 0; k < N; ++k)
            csv.row({std::to_string(k), fnum(s.consumer_cost[k]), fnum(s.norm_consumer_cost[k])});
    }
    {
        CsvWriter csv(path("producer_cost.csv"));
        csv.row({"iteration", "producer_true_cost", "normalized"});
        for (size_t k = 0; k < N; ++k)
            csv.row({std::to_string(k), fnum(s.producer_true_cost[k]),
                     fnum(s.norm_producer_cost[k])});
    }
    {
        CsvWriter csv(path("producer_profit.csv"));
        csv.row({"iteration", "producer_profit", "normalized"});
        for (size_t k = 0; k < N; ++k)
            csv.row({std::to_string(k), fnum(s.producer_profit[k]),
                     fnum(s.norm_producer_profit[k])});
    }
    {
        CsvWriter csv(path("side_payments.csv"));
        csv.row({"iteration", "mwp_total", "loc0_total", "loc_display_total"});
        for (size_t k = 0; k < N; ++k)
            csv.row({std::to_string(k), fnum(s.mwp_total[k]), fnum(s.loc0_total[k]),
                     fnum(s.loc_display_total[k])});
    }
    {
        CsvWriter csv(path("market_share_count.csv"));
        csv.row({"iteration", "economic", "self_commit", "self_schedule"});
        for (size_t k = 0; k < N; ++k)
            csv.row({std::to_string(k), fnum(s.share_count[k][0]), fnum(s.share_count[k][1]),
                     fnum(s.share_count[k][2])});
    }
    {
        CsvWriter csv(path("market_share_mw.csv"));
        csv.row({"iteration", "economic", "self_commit", "self_schedule"});
        for (size_t k = 0; k < N; ++k)
            csv.row({std::to_string(k), fnum(s.share_mw[k][0]), fnum(s.share_mw[k][1]),
                     fnum(s.share_mw[k][2])});
    }
    {
        CsvWriter csv(path("prices.csv"));
        csv.row({"period", "competitive", "min", "max", "mean"});
        for (size_t t = 0; t < s.price_competitive.size(); ++t)
            csv.row({std::to_string(t + 1), fnum(s.price_competitive[t]), fnum(s.price_min[t]),
                     fnum(s.price_max[t]), fnum(s.price_mean[t])});
    }
    {
        CsvWriter csv(path("profit_duration.csv"));
        csv.row({"rank", "gen_id", "competitive_profit", "mean_economic", "mean_self_commit",
                 "mean_self_schedule"});
        for (size_t k = 0; k < s.profit_duration_ids.size(); ++k)
            csv.row({std::to_string(k + 1), s.profit_duration_ids[k],
                     fnum(s.profit_duration_competitive[k]), fnum(s.profit_by_strategy[k][0]),
                     fnum(s.profit_by_strategy[k][1]), fnum(s.profit_by_strategy[k][2])});
    }
    {
        CsvWriter csv(path("adverse.csv"));
        csv.row({"gen_id", "capacity_mw", "n_economic", "n_self_commit", "n_self_schedule",
                 "mean_economic", "mean_self_commit", "mean_self_schedule", "t_self_commit",
                 "p_self_commit", "t_self_schedule", "p_self_schedule", "adverse_self_commit",
                 "adverse_self_schedule", "adverse", "excess_profit"});
        for (const auto& r : adverse.rows)
            csv.row({r.gen_id, fnum(r.capacity_mw), std::to_string(r.n_eco),
                     std::to_string(r.n_selfcommit), std::to_string(r.n_selfschedule),
                     fnum(r.mean_eco), fnum(r.mean_selfcommit), fnum(r.mean_selfschedule),
                     fnum(r.test_selfcommit.t), fnum(r.test_selfcommit.p),
                     fnum(r.test_selfschedule.t), fnum(r.test_selfschedule.p),
                     r.adverse_selfcommit ? "1" : "0", r.adverse_selfschedule ? "1" : "0",
                     r.adverse ? "1" : "0", fnum(r.excess_profit)});
    }
    {
        CsvWriter csv(path("excess_profit.csv"));
        csv.row({"total_excess_profit", "competitive_profit", "excess_share_of_competitive"});
        csv.row({fnum(adverse.total_excess_profit), fnum(adverse.competitive_profit),
                 fnum(adverse.excess_share_of_competitive)});
    }

    // Charts.
    std::vector<double> iters(N);
    std::iota(iters.begin(), iters.end(), 0.0);
    {
        SvgChart c("Normalized costs and profits", "iteration", "relative to competitive");
        c.add_series("consumer cost", iters, s.norm_consumer_cost);
        c.add_series("producer cost", iters, s.norm_producer_cost);
        c.add_series("producer profit", iters, s.norm_producer_profit);
        c.write(path("normalized_costs.svg"));
    }
    {
        std::vector<double> periods(s.price_competitive.size());
        std::iota(periods.begin(), periods.end(), 1.0);
        SvgChart c("Prices: competitive level and strategic range", "period", "$/MWh");
        c.add_series("competitive", periods, s.price_competitive);
        c.add_series("min", periods, s.price_min);
        c.add_series("max", periods, s.price_max);
        c.add_series("mean", periods, s.price_mean);
        c.write(path("price_bands.svg"));
    }
    {
        SvgChart c("Market share by thermal capacity", "iteration", "share of MW");
        std::vector<double> eco(N), sc(N), ss(N);
        for (size_t k = 0; k < N; ++k) {
            eco[k] = s.share_mw[k][0];
            sc[k] = s.share_mw[k][1];
            ss[k] = s.share_mw[k][2];
        }
        c.add_series("economic", iters, eco);
        c.add_series("self-commit", iters, sc);
        c.add_series("self-schedule", iters, ss);
        c.write(path("market_share.svg"));
    }
    {
        SvgChart c("Profit duration at the competitive solution", "rank", "$");
        std::vector<double> ranks(s.profit_duration_competitive.size());
        std::iota(ranks.begin(), ranks.end(), 1.0);
        c.add_series("competitive", ranks, s.profit_duration_competitive);
        std::vector<double> eco, sc, ss;
        for (const auto& m : s.profit_by_strategy) {
            eco.push_back(m[0]);
            sc.push_back(m[1]);
            ss.push_back(m[2]);
        }
        c.add_series("economic mean", ranks, eco, true);
        c.add_series("self-commit mean", ranks, sc, true);
        c.add_series("self-schedule mean", ranks, ss, true);
        c.write(path("profit_duration.svg"));
    }
}

} // namespace damsim
