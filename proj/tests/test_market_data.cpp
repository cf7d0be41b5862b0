#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "damsim/market_data.hpp"
#include "damsim/offer_steps.hpp"

using namespace damsim;
using Catch::Approx;

static std::string cases_dir() { return DAMSIM_CASES_DIR; }

TEST_CASE("illustrative case loads with the published generator data") {
    MarketCase mc = load_case(cases_dir() + "/illustrative_t1.json");
    REQUIRE(mc.generators.size() == 15);
    CHECK(mc.horizon() == 1);
    CHECK(mc.demand.mw[0] == Approx(225.001));
    int thermal = 0;
    for (const auto& g : mc.generators) thermal += g.is_thermal() ? 1 : 0;
    CHECK(thermal == 15);
    const auto& gen1 = mc.generators[0];
    CHECK(gen1.id == "GEN1_1");
    CHECK(gen1.p_min == Approx(25.0));
    CHECK(gen1.capacity() == Approx(25.0));
    CHECK(gen1.step_costs[0] == Approx(15.0));
    CHECK(gen1.block_loaded());
}

TEST_CASE("case validation rejects degenerate inputs") {
    CHECK_THROWS_AS(parse_case_text(R"({"name":"x","voll":1000,"demand":[10],"generators":[]})",
                                    "inline"),
                    ValidationError);
    // Named generator and field in the message.
    try {
        parse_case_text(R"({"name":"x","voll":1000,"demand":[10],"generators":[
            {"id":"BAD1","kind":"thermal","p_min":-5,"steps":[{"cap":10,"cost":4}]}]})",
                        "inline");
        FAIL("expected validation error");
    } catch (const ValidationError& e) {
        const std::string msg = e.what();
        CHECK(msg.find("BAD1") != std::string::npos);
        CHECK(msg.find("p_min") != std::string::npos);
    }
    // Parse errors carry a line number.
    try {
        parse_case_text("{\n  \"name\": \"x\",\n  broken\n}", "inline");
        FAIL("expected parse error");
    } catch (const ValidationError& e) {
        CHECK(std::string(e.what()).find("inline:3") != std::string::npos);
    }
    // VRE profile must match the horizon.
    CHECK_THROWS_AS(
        parse_case_text(R"({"name":"x","voll":1000,"demand":[10,10],"generators":[
            {"id":"W","kind":"vre","steps":[{"cap":10,"cost":0}],"vre_profile":[5]}]})",
                        "inline"),
        ValidationError);
}

TEST_CASE("loading is deterministic") {
    MarketCase a = load_case(cases_dir() + "/illustrative_t10_d1.json");
    MarketCase b = load_case(cases_dir() + "/illustrative_t10_d1.json");
    CHECK(case_to_json(a).dump() == case_to_json(b).dump());
}

TEST_CASE("a FERC-sized fleet reports its aggregate capacity") {
    MarketCase mc;
    mc.name = "ferc-sized";
    mc.demand.mw.assign(24, 50000.0);
    // 978 thermal units totalling 177.5 GW plus one VRE unit.
    const double cap = 177500.0 / 978.0;
    for (int k = 0; k < 978; ++k) {
        GeneratorTech g;
        g.id = "T" + std::to_string(k);
        g.p_min = cap * 0.3;
        g.step_caps = {cap * 0.5, cap * 0.5};
        g.step_costs = {20.0, 30.0};
        g.ramp_up = g.ramp_down = cap;
        mc.generators.push_back(std::move(g));
    }
    GeneratorTech wind;
    wind.id = "WIND";
    wind.kind = GeneratorKind::Vre;
    wind.step_caps = {1200.0};
    wind.step_costs = {0.0};
    wind.vre_profile.assign(24, 900.0);
    mc.generators.push_back(std::move(wind));
    validate_case(mc);
    CHECK(mc.generators.size() == 979);
    CHECK(mc.thermal_capacity() == Approx(177500.0));
}

TEST_CASE("offer-step derivation implements the three cost rules") {
    SECTION("block-loaded units carry no no-load cost") {
        CumulativeCostRecord raw;
        raw.p_min = 25.0;
        raw.points = {{25.0, 500.0}};
        OfferStepDerivation d = derive_offer_steps(raw);
        CHECK(d.no_load_cost == 0.0);
        REQUIRE(d.step_caps.size() == 1);
        CHECK(d.step_caps[0] == Approx(25.0));
        CHECK(d.step_costs[0] == Approx(20.0));
    }
    SECTION("below-minimum output priced at the first marginal cost") {
        CumulativeCostRecord raw;
        raw.p_min = 10.0;
        raw.points = {{10.0, 100.0}, {20.0, 180.0}};  // first marginal = 8
        OfferStepDerivation d = derive_offer_steps(raw);
        CHECK(d.no_load_cost == Approx(20.0));  // 100 - 8*10
        REQUIRE(d.step_caps.size() == 1);       // equal-rate blocks merge
        CHECK(d.step_caps[0] == Approx(20.0));
        CHECK(d.step_costs[0] == Approx(8.0));
        CHECK(cumulative_offer_cost(d, 10.0) == Approx(100.0));
        CHECK(cumulative_offer_cost(d, 20.0) == Approx(180.0));
    }
    SECTION("negative remainder flips to average-cost pricing below minimum") {
        CumulativeCostRecord raw;
        raw.p_min = 10.0;
        raw.points = {{10.0, 50.0}, {20.0, 130.0}};  // rule (b) would give -30
        OfferStepDerivation d = derive_offer_steps(raw);
        CHECK(d.no_load_cost == 0.0);
        REQUIRE(d.step_caps.size() == 2);
        CHECK(d.step_costs[0] == Approx(5.0));  // 50/10
        CHECK(d.step_costs[1] == Approx(8.0));
        CHECK(cumulative_offer_cost(d, 10.0) == Approx(50.0));
        CHECK(cumulative_offer_cost(d, 20.0) == Approx(130.0));
    }
    SECTION("zero minimum never divides by zero") {
        CumulativeCostRecord raw;
        raw.p_min = 0.0;
        raw.points = {{0.0, -3.0}, {15.0, 60.0}};
        OfferStepDerivation d = derive_offer_steps(raw);
        CHECK(d.no_load_cost == 0.0);
        REQUIRE(d.step_caps.size() == 1);
        CHECK(d.step_caps[0] == Approx(15.0));
    }
}

TEST_CASE("offer-step derivation round-trips cumulative costs", "[property]") {
    std::mt19937_64 rng(7741);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    for (int trial = 0; trial < 200; ++trial) {
        CumulativeCostRecord raw;
        raw.p_min = U(rng) < 0.2 ? 0.0 : 5.0 + 50.0 * U(rng);
        const int segs = static_cast<int>(U(rng) * 5);
        double mw = raw.p_min;
        double cost = raw.p_min * (5.0 + 40.0 * U(rng));
        raw.points = {{mw, cost}};
        for (int s = 0; s < segs; ++s) {
            const double w = 1.0 + 40.0 * U(rng);
            mw += w;
            cost += w * (5.0 + 60.0 * U(rng));
            raw.points.push_back({mw, cost});
        }
        if (raw.p_min == 0.0 && segs == 0) continue;
        OfferStepDerivation d = derive_offer_steps(raw);
        for (const auto& [q, c] : raw.points) {
            if (q == 0.0) continue;
            const double rebuilt = cumulative_offer_cost(d, q);
            INFO("trial " << trial << " q=" << q);
            CHECK(rebuilt == Approx(c).epsilon(1e-6));
        }
        CHECK(d.no_load_cost >= 0.0);
    }
}
