#pragma once

#include <map>
#include <string>
#include <vector>

#include "damsim/common.hpp"
#include "damsim/lp.hpp"
#include "damsim/market_data.hpp"
#include "damsim/offers.hpp"

namespace damsim {

using RowFamilies = std::map<std::string, std::vector<int>>;

/// Variable handles of one generator across the horizon.
struct GenVars {
    std::vector<int> p;                  // [t]
    std::vector<std::vector<int>> rho;   // [t][s]
    std::vector<int> commit, startup, shutdown;  // [t], -1 for VRE
};

namespace detail {

inline std::string tg(const std::string& base, int t, const std::string& id) {
    return base + "[" + std::to_string(t) + "," + id + "]";
}

inline void note(RowFamilies* fam, const std::string& family, int row) {
    if (fam) (*fam)[family].push_back(row);
}

} // namespace detail

/// Emits one generator's variables and private constraint set: step linkage,
/// startup/shutdown flags with initial-state handling, minimum output and
/// per-step capacity gated on commitment, minimum up/down windows, the
/// two-period ramp inequalities, and the startup/shutdown-aware capacity
/// rows that tighten the relaxation.
///
/// Cross-period families (logic, ramps, min up/down, tightening) need a
/// horizon of at least two periods and degenerate away for T = 1. Startup
/// and shutdown power is implicitly capped at p_min by the ramp rows.
inline GenVars add_generator(LpProblem& lp, const GeneratorTech& gen, const OfferCurve& oc,
                             int T, RowFamilies* fam) {
    if (oc.horizon() != T)
        throw ValidationError("offer horizon mismatch for '" + gen.id + "'");
    double offered_cap = 0.0;
    for (double w : oc.step_caps) offered_cap += w;
    if (std::abs(offered_cap - gen.capacity()) > 1e-6)
        throw ValidationError("offered capacity differs from true capacity for '" + gen.id + "'");
    for (int t = 0; t < T; ++t)
        if (oc.step_costs[t].size() != oc.step_caps.size())
            throw ValidationError("ragged step costs for '" + gen.id + "'");

    const bool thermal = gen.is_thermal();
    const int S = oc.num_steps();
    GenVars v;
    v.p.resize(T);
    v.rho.assign(T, std::vector<int>(S, -1));
    v.commit.assign(T, -1);
    v.startup.assign(T, -1);
    v.shutdown.assign(T, -1);

    for (int t = 0; t < T; ++t) {
        const double p_upper = thermal ? kInf : gen.vre_profile[t];
        v.p[t] = lp.add_col(0.0, p_upper, 0.0, detail::tg("p", t, gen.id));
        for (int s = 0; s < S; ++s)
            v.rho[t][s] = lp.add_col(0.0, thermal ? kInf : gen.vre_profile[t],
                                     oc.step_costs[t][s],
                                     detail::tg("rho" + std::to_string(s), t, gen.id));
        if (thermal) {
            v.commit[t] = lp.add_col(0.0, 1.0, oc.no_load_cost[t], detail::tg("u", t, gen.id));
            v.startup[t] = lp.add_col(0.0, 1.0, oc.startup_cost[t], detail::tg("z", t, gen.id));
            v.shutdown[t] = lp.add_col(0.0, 1.0, 0.0, detail::tg("y", t, gen.id));
            lp.set_integer(v.commit[t]);
            lp.set_integer(v.startup[t]);
            lp.set_integer(v.shutdown[t]);
        }
    }

    for (int t = 0; t < T; ++t) {
        int row = lp.add_row(0.0, 0.0, detail::tg("steps", t, gen.id));
        for (int s = 0; s < S; ++s) lp.add_entry(row, v.rho[t][s], 1.0);
        lp.add_entry(row, v.p[t], -1.0);
        detail::note(fam, "step_link", row);
    }
    if (!thermal) return v;

    const double cap_total = gen.capacity();
    for (int t = 0; t < T; ++t) {
        int row = lp.add_row(-kInf, 1.0, detail::tg("flag", t, gen.id));
        lp.add_entry(row, v.startup[t], 1.0);
        lp.add_entry(row, v.shutdown[t], 1.0);
        detail::note(fam, "flag_pair", row);

        int pmin_row = lp.add_row(0.0, kInf, detail::tg("pmin", t, gen.id));
        lp.add_entry(pmin_row, v.p[t], 1.0);
        lp.add_entry(pmin_row, v.commit[t], -gen.p_min);
        detail::note(fam, "p_min", pmin_row);

        for (int s = 0; s < S; ++s) {
            int cap_row = lp.add_row(-kInf, 0.0, detail::tg("cap" + std::to_string(s), t, gen.id));
            lp.add_entry(cap_row, v.rho[t][s], 1.0);
            lp.add_entry(cap_row, v.commit[t], -oc.step_caps[s]);
            detail::note(fam, "step_cap", cap_row);
        }
    }

    // Initial state: a unit starting from off books a startup with its first
    // commitment; a unit already online books none in the first period.
    if (gen.init_status == 0) {
        int row = lp.add_row(0.0, 0.0, detail::tg("init_start", 0, gen.id));
        lp.add_entry(row, v.startup[0], 1.0);
        lp.add_entry(row, v.commit[0], -1.0);
        detail::note(fam, "init_start_off", row);
    } else {
        int row = lp.add_row(0.0, 0.0, detail::tg("init_start", 0, gen.id));
        lp.add_entry(row, v.startup[0], 1.0);
        detail::note(fam, "init_start_on", row);
    }
    for (int t = 1; t < T; ++t) {
        int row = lp.add_row(0.0, 0.0, detail::tg("logic", t, gen.id));
        lp.add_entry(row, v.commit[t], 1.0);
        lp.add_entry(row, v.commit[t - 1], -1.0);
        lp.add_entry(row, v.startup[t], -1.0);
        lp.add_entry(row, v.shutdown[t], 1.0);
        detail::note(fam, "logic", row);
    }

    if (gen.min_on > 1) {
        for (int t = 0; t < T - 1; ++t) {
            const int last = std::min(t + gen.min_on - 1, T - 1);
            if (last < t + 1) continue;
            int row = lp.add_row(-kInf, 1.0, detail::tg("minon", t, gen.id));
            lp.add_entry(row, v.startup[t], 1.0);
            for (int t2 = t + 1; t2 <= last; ++t2) lp.add_entry(row, v.shutdown[t2], 1.0);
            detail::note(fam, "min_on", row);
        }
    }
    if (gen.min_off > 1) {
        for (int t = 0; t < T - 1; ++t) {
            const int last = std::min(t + gen.min_off - 1, T - 1);
            if (last < t + 1) continue;
            int row = lp.add_row(-kInf, 1.0, detail::tg("minoff", t, gen.id));
            lp.add_entry(row, v.shutdown[t], 1.0);
            for (int t2 = t + 1; t2 <= last; ++t2) lp.add_entry(row, v.startup[t2], 1.0);
            detail::note(fam, "min_off", row);
        }
    }

    for (int t = 1; t < T; ++t) {
        int row = lp.add_row(-kInf, 0.0, detail::tg("rampup", t, gen.id));
        lp.add_entry(row, v.p[t], 1.0);
        lp.add_entry(row, v.p[t - 1], -1.0);
        lp.add_entry(row, v.commit[t], -(gen.p_min + gen.ramp_up));
        lp.add_entry(row, v.commit[t - 1], gen.p_min);
        lp.add_entry(row, v.startup[t], gen.ramp_up);
        detail::note(fam, "ramp_up", row);

        int row2 = lp.add_row(-kInf, 0.0, detail::tg("rampdn", t, gen.id));
        lp.add_entry(row2, v.p[t - 1], 1.0);
        lp.add_entry(row2, v.p[t], -1.0);
        lp.add_entry(row2, v.commit[t - 1], -(gen.p_min + gen.ramp_down));
        lp.add_entry(row2, v.commit[t], gen.p_min);
        lp.add_entry(row2, v.shutdown[t], gen.ramp_down);
        detail::note(fam, "ramp_down", row2);
    }

    if (T >= 2) {
        const double excess = cap_total - gen.p_min;
        {
            int row = lp.add_row(-kInf, 0.0, detail::tg("tight_first", 0, gen.id));
            lp.add_entry(row, v.p[0], 1.0);
            lp.add_entry(row, v.commit[0], -cap_total);
            lp.add_entry(row, v.shutdown[1], excess);
            detail::note(fam, "tighten_first", row);
        }
        {
            int row = lp.add_row(-kInf, 0.0, detail::tg("tight_last", T - 1, gen.id));
            lp.add_entry(row, v.p[T - 1], 1.0);
            lp.add_entry(row, v.commit[T - 1], -cap_total);
            lp.add_entry(row, v.startup[T - 1], excess);
            detail::note(fam, "tighten_last", row);
        }
        for (int t = 1; t < T - 1; ++t) {
            if (gen.min_on >= 2) {
                int row = lp.add_row(-kInf, 0.0, detail::tg("tight_both", t, gen.id));
                lp.add_entry(row, v.p[t], 1.0);
                lp.add_entry(row, v.commit[t], -cap_total);
                lp.add_entry(row, v.startup[t], excess);
                lp.add_entry(row, v.shutdown[t + 1], excess);
                detail::note(fam, "tighten_both", row);
            } else {
                int row = lp.add_row(-kInf, 0.0, detail::tg("tight_start", t, gen.id));
                lp.add_entry(row, v.p[t], 1.0);
                lp.add_entry(row, v.commit[t], -cap_total);
                lp.add_entry(row, v.startup[t], excess);
                detail::note(fam, "tighten_start", row);

                int row2 = lp.add_row(-kInf, 0.0, detail::tg("tight_stop", t, gen.id));
                lp.add_entry(row2, v.p[t], 1.0);
                lp.add_entry(row2, v.commit[t], -cap_total);
                lp.add_entry(row2, v.shutdown[t + 1], excess);
                detail::note(fam, "tighten_stop", row2);
            }
        }
    }
    return v;
}

/// The market-clearing MILP: every generator's private rows plus one
/// balance row per period with a non-served-energy slack priced at voll.
struct UCProblem {
    LpProblem lp;
    int horizon = 0;
    int n_gens = 0;
    double voll = 0.0;

    std::vector<std::vector<int>> p_var;                 // [t][g]
    std::vector<std::vector<std::vector<int>>> rho_var;  // [t][g][s]
    std::vector<std::vector<int>> commit_var, startup_var, shutdown_var;  // [t][g]
    std::vector<int> nse_var;                            // [t]
    std::vector<int> balance_row;                        // [t]
    RowFamilies family_rows;
    // Groups of generators that are exact copies of each other (same
    // technology and same submitted offer): the MIP may treat them as
    // interchangeable when branching.
    std::vector<std::vector<std::vector<int>>> symmetry_groups;
    // Per (group, period) free rows carrying the group's commitment count,
    // used for count-disjunction branching.
    std::vector<std::pair<int, std::vector<int>>> count_aggregates;

    std::vector<int> binary_vars() const { return lp.integer_cols(); }
};

namespace detail {

inline std::string twin_key(const GeneratorTech& g, const OfferCurve& oc) {
    std::string key;
    auto add = [&key](double v) {
        key.append(reinterpret_cast<const char*>(&v), sizeof(v));
    };
    add(g.kind == GeneratorKind::Thermal ? 1.0 : 2.0);
    add(g.p_min);
    add(static_cast<double>(g.min_on));
    add(static_cast<double>(g.min_off));
    add(g.ramp_up);
    add(g.ramp_down);
    add(static_cast<double>(g.init_status));
    add(g.startup_cost);
    add(g.no_load_cost);
    for (double v : g.step_caps) add(v);
    for (double v : g.step_costs) add(v);
    for (double v : g.vre_profile) add(v);
    key.push_back('|');
    for (double v : oc.step_caps) add(v);
    for (const auto& row : oc.step_costs)
        for (double v : row) add(v);
    for (double v : oc.startup_cost) add(v);
    for (double v : oc.no_load_cost) add(v);
    return key;
}

} // namespace detail

inline UCProblem build_uc(const MarketCase& mc, const std::vector<OfferCurve>& offers) {
    const int T = mc.horizon();
    const int G = static_cast<int>(mc.generators.size());
    if (static_cast<int>(offers.size()) != G)
        throw ValidationError("build_uc: offer count does not match generator count");

    UCProblem uc;
    uc.horizon = T;
    uc.n_gens = G;
    uc.voll = mc.voll;

    uc.p_var.assign(T, std::vector<int>(G, -1));
    uc.rho_var.assign(T, std::vector<std::vector<int>>(G));
    uc.commit_var.assign(T, std::vector<int>(G, -1));
    uc.startup_var.assign(T, std::vector<int>(G, -1));
    uc.shutdown_var.assign(T, std::vector<int>(G, -1));

    for (int g = 0; g < G; ++g) {
        GenVars v = add_generator(uc.lp, mc.generators[g], offers[g], T, &uc.family_rows);
        for (int t = 0; t < T; ++t) {
            uc.p_var[t][g] = v.p[t];
            uc.rho_var[t][g] = v.rho[t];
            uc.commit_var[t][g] = v.commit[t];
            uc.startup_var[t][g] = v.startup[t];
            uc.shutdown_var[t][g] = v.shutdown[t];
        }
    }

    uc.nse_var.assign(T, -1);
    uc.balance_row.assign(T, -1);
    for (int t = 0; t < T; ++t) {
        uc.nse_var[t] = uc.lp.add_col(0.0, kInf, mc.voll, "n[" + std::to_string(t) + "]");
        int row = uc.lp.add_row(mc.demand.mw[t], mc.demand.mw[t],
                                "balance[" + std::to_string(t) + "]");
        for (int g = 0; g < G; ++g) uc.lp.add_entry(row, uc.p_var[t][g], 1.0);
        uc.lp.add_entry(row, uc.nse_var[t], 1.0);
        uc.balance_row[t] = row;
        uc.family_rows["balance"].push_back(row);
    }

    // Interchangeable-unit detection for symmetry-aware branching, plus one
    // free commitment-count row per group and period for count disjunctions.
    std::map<std::string, std::vector<int>> twins;
    for (int g = 0; g < G; ++g)
        if (mc.generators[g].is_thermal())
            twins[detail::twin_key(mc.generators[g], offers[g])].push_back(g);
    for (auto& [key, members] : twins) {
        if (members.size() < 2) continue;
        std::vector<std::vector<int>> group;
        for (int g : members) {
            std::vector<int> cols;
            for (int t = 0; t < T; ++t) {
                cols.push_back(uc.commit_var[t][g]);
                cols.push_back(uc.startup_var[t][g]);
                cols.push_back(uc.shutdown_var[t][g]);
                cols.push_back(uc.p_var[t][g]);
                for (int s : uc.rho_var[t][g]) cols.push_back(s);
            }
            group.push_back(std::move(cols));
        }
        for (int t = 0; t < T; ++t) {
            int row = uc.lp.add_row(-kInf, kInf,
                                    "count[" + std::to_string(t) + ",g" +
                                        std::to_string(uc.symmetry_groups.size()) + "]");
            std::vector<int> cols;
            for (int g : members) {
                uc.lp.add_entry(row, uc.commit_var[t][g], 1.0);
                cols.push_back(uc.commit_var[t][g]);
            }
            uc.count_aggregates.emplace_back(row, std::move(cols));
        }
        uc.symmetry_groups.push_back(std::move(group));
    }
    return uc;
}

} // namespace damsim
