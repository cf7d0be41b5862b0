#pragma once

#include <algorithm>
#include <cctype>
#include <fstream>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "damsim/common.hpp"

namespace damsim {

enum class GeneratorKind { Thermal, Vre };

/// Physical and cost description of one generating unit. Step caps are the
/// widths of consecutive supply blocks spanning [0, total capacity]; step
/// costs are the $/MWh charged within each block.
struct GeneratorTech {
    std::string id;
    GeneratorKind kind = GeneratorKind::Thermal;
    double p_min = 0.0;                  // MW
    std::vector<double> step_caps;       // MW widths, up to 12 blocks
    std::vector<double> step_costs;      // $/MWh per block
    double startup_cost = 0.0;           // $
    double no_load_cost = 0.0;           // $/h while committed
    int min_on = 1;                      // h
    int min_off = 1;                     // h
    double ramp_up = 0.0;                // MW/h
    double ramp_down = 0.0;              // MW/h
    int init_status = 0;                 // 1 if online before the horizon
    std::vector<double> vre_profile;     // MW per period (VRE only)

    double capacity() const {
        return std::accumulate(step_caps.begin(), step_caps.end(), 0.0);
    }
    bool is_thermal() const { return kind == GeneratorKind::Thermal; }
    bool block_loaded() const { return is_thermal() && p_min >= capacity() - 1e-9; }
};

struct DemandSeries {
    std::vector<double> mw;  // one entry per period
    int horizon() const { return static_cast<int>(mw.size()); }
};

struct MarketCase {
    std::string name;
    double voll = 10000.0;  // $/MWh penalty on non-served energy
    DemandSeries demand;
    std::vector<GeneratorTech> generators;

    int horizon() const { return demand.horizon(); }
    double thermal_capacity() const {
        double s = 0.0;
        for (const auto& g : generators)
            if (g.is_thermal()) s += g.capacity();
        return s;
    }
};

namespace detail {

inline void require(bool cond, const std::string& msg) {
    if (!cond) throw ValidationError(msg);
}

} // namespace detail

/// Validates the case invariants; throws ValidationError naming the
/// offending generator and field.
inline void validate_case(const MarketCase& mc) {
    using detail::require;
    require(!mc.generators.empty(), "case '" + mc.name + "': generator list is empty");
    require(mc.demand.horizon() >= 1, "case '" + mc.name + "': demand series is empty");
    for (double d : mc.demand.mw)
        require(d >= 0.0 && is_finite(d), "case '" + mc.name + "': negative demand entry");
    require(mc.voll > 0.0, "case '" + mc.name + "': voll must be positive");

    std::vector<std::string> ids;
    for (const auto& g : mc.generators) {
        const std::string where = "generator '" + g.id + "': ";
        require(!g.id.empty(), "generator with empty id");
        ids.push_back(g.id);
        require(g.p_min >= 0.0, where + "p_min must be nonnegative");
        require(!g.step_caps.empty(), where + "at least one offer step required");
        require(g.step_caps.size() == g.step_costs.size(),
                where + "step_caps and step_costs differ in length");
        require(g.step_caps.size() <= 12, where + "more than 12 offer steps");
        for (double c : g.step_caps) require(c > 0.0, where + "step cap must be positive");
        for (double c : g.step_costs) require(is_finite(c), where + "step cost not finite");
        require(g.startup_cost >= 0.0, where + "startup_cost must be nonnegative");
        require(g.no_load_cost >= 0.0, where + "no_load_cost must be nonnegative");
        if (g.is_thermal()) {
            require(g.capacity() >= g.p_min - 1e-9, where + "step caps sum below p_min");
            require(g.min_on >= 1, where + "min_on must be at least 1");
            require(g.min_off >= 1, where + "min_off must be at least 1");
            require(g.ramp_up >= 0.0 && g.ramp_down >= 0.0, where + "ramp rates nonnegative");
            require(g.vre_profile.empty(), where + "vre_profile on a thermal unit");
            require(g.init_status == 0 || g.init_status == 1, where + "init_status not binary");
        } else {
            require(static_cast<int>(g.vre_profile.size()) == mc.demand.horizon(),
                    where + "vre_profile length differs from horizon");
            for (double v : g.vre_profile)
                require(v >= 0.0, where + "vre_profile entry negative");
        }
    }
    std::sort(ids.begin(), ids.end());
    auto dup = std::adjacent_find(ids.begin(), ids.end());
    require(dup == ids.end(), dup == ids.end() ? "" : "duplicate generator id '" + *dup + "'");
}

namespace detail {

inline int line_of_offset(const std::string& text, size_t byte) {
    int line = 1;
    for (size_t k = 0; k < byte && k < text.size(); ++k)
        if (text[k] == '\n') ++line;
    return line;
}

inline double json_number(const nlohmann::json& j, const char* field, const std::string& ctx) {
    if (!j.contains(field))
        throw ValidationError(ctx + ": missing field '" + field + "'");
    if (!j.at(field).is_number())
        throw ValidationError(ctx + ": field '" + field + "' is not a number");
    return j.at(field).get<double>();
}

} // namespace detail

inline MarketCase parse_case_text(const std::string& text, const std::string& origin) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ValidationError(origin + ":" + std::to_string(detail::line_of_offset(text, e.byte)) +
                              ": " + e.what());
    }
    MarketCase mc;
    try {
        mc.name = doc.at("name").get<std::string>();
        mc.voll = doc.value("voll", 10000.0);
        mc.demand.mw = doc.at("demand").get<std::vector<double>>();
        for (const auto& gj : doc.at("generators")) {
            GeneratorTech g;
            g.id = gj.at("id").get<std::string>();
            const std::string ctx = origin + ": generator '" + g.id + "'";
            const std::string kind = gj.value("kind", std::string("thermal"));
            if (kind == "thermal") g.kind = GeneratorKind::Thermal;
            else if (kind == "vre") g.kind = GeneratorKind::Vre;
            else throw ValidationError(ctx + ": unknown kind '" + kind + "'");
            g.p_min = gj.value("p_min", 0.0);
            if (!gj.contains("steps") || !gj.at("steps").is_array() || gj.at("steps").empty())
                throw ValidationError(ctx + ": 'steps' must be a nonempty array");
            for (const auto& sj : gj.at("steps")) {
                g.step_caps.push_back(detail::json_number(sj, "cap", ctx));
                g.step_costs.push_back(detail::json_number(sj, "cost", ctx));
            }
            g.startup_cost = gj.value("startup_cost", 0.0);
            g.no_load_cost = gj.value("no_load_cost", 0.0);
            g.min_on = gj.value("min_on", 1);
            g.min_off = gj.value("min_off", 1);
            g.ramp_up = gj.value("ramp_up", g.capacity());
            g.ramp_down = gj.value("ramp_down", g.capacity());
            g.init_status = gj.value("init_status", 0);
            if (gj.contains("vre_profile"))
                g.vre_profile = gj.at("vre_profile").get<std::vector<double>>();
            mc.generators.push_back(std::move(g));
        }
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(origin + ": " + e.what());
    }
    validate_case(mc);
    // Nondecreasing step costs are conventional but not required; the MILP
    // fills steps in cost order either way.
    return mc;
}

inline MarketCase load_case(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open case file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_case_text(ss.str(), path);
}

inline nlohmann::json case_to_json(const MarketCase& mc) {
    nlohmann::json doc;
    doc["name"] = mc.name;
    doc["voll"] = mc.voll;
    doc["demand"] = mc.demand.mw;
    doc["generators"] = nlohmann::json::array();
    for (const auto& g : mc.generators) {
        nlohmann::json gj;
        gj["id"] = g.id;
        gj["kind"] = g.is_thermal() ? "thermal" : "vre";
        gj["p_min"] = g.p_min;
        gj["steps"] = nlohmann::json::array();
        for (size_t s = 0; s < g.step_caps.size(); ++s)
            gj["steps"].push_back({{"cap", g.step_caps[s]}, {"cost", g.step_costs[s]}});
        gj["startup_cost"] = g.startup_cost;
        gj["no_load_cost"] = g.no_load_cost;
        gj["min_on"] = g.min_on;
        gj["min_off"] = g.min_off;
        gj["ramp_up"] = g.ramp_up;
        gj["ramp_down"] = g.ramp_down;
        gj["init_status"] = g.init_status;
        if (!g.vre_profile.empty()) gj["vre_profile"] = g.vre_profile;
        doc["generators"].push_back(std::move(gj));
    }
    return doc;
}

inline void save_case(const MarketCase& mc, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write case file '" + path + "'");
    out << case_to_json(mc).dump(2) << "\n";
}

} // namespace damsim
