#include "doctest.h"
#include "toy.hpp"

#include "openbilliard/config.hpp"
#include "openbilliard/errors.hpp"

#include "json.hpp"

#include <filesystem>

using namespace ob;
using nlohmann::json;

namespace {

json paper_json() { return json::parse(serialize_config(RunConfig::paper())); }

void expect_config_error(const json& j)
{
    CAPTURE(j.dump());
    CHECK_THROWS_AS(parse_config(j.dump()), ConfigError);
}

} // namespace

TEST_SUITE("config")
{
    TEST_CASE("reference configuration round-trips")
    {
        const RunConfig paper = RunConfig::paper();
        CHECK_NOTHROW(paper.validate());
        CHECK(parse_config(serialize_config(paper)) == paper);
        CHECK(paper.geometry.guide_offset == 0.5);
        CHECK(paper.geometry.truncation_x == -13.0);
        CHECK(paper.numerics.alpha == 0.3);
    }

    TEST_CASE("random configurations round-trip")
    {
        auto r = toy::rng(11);
        for (int trial = 0; trial < 50; ++trial) {
            RunConfig c = toy::run_config("out/" + std::to_string(trial));
            c.numerics.alpha = toy::uniform(r, 0.05, 0.7);
            c.numerics.alpha_check = c.numerics.alpha + toy::uniform(r, 0.01, 0.3);
            c.numerics.seed = static_cast<std::uint64_t>(r());
            c.numerics.workers = toy::uniform_int(r, 1, 8);
            c.numerics.tolerances.eig_residual = toy::uniform(r, 1e-12, 1e-6);
            c.geometry.barrier_height = toy::uniform(r, 0.1, 5.0);
            c.delay.lambdas.clear();
            for (int k = toy::uniform_int(r, 0, 4); k > 0; --k)
                c.delay.lambdas.push_back(toy::uniform(r, 0, 100));
            c.delay.energy_min = toy::uniform(r, 62.0, 120.0);
            c.delay.energy_max = c.delay.energy_min + toy::uniform(r, 1.0, 100.0);
            c.delay.count = toy::uniform_int(r, 3, 500);
            c.trace.seeds = {toy::uniform(r, 90, 100), toy::uniform(r, 90, 100)};
            c.gamow.cutoff = toy::uniform(r, 0, 0.1);
            CAPTURE(trial);
            const std::string text = serialize_config(c);
            const RunConfig back = parse_config(text);
            CHECK(back == c);
            CHECK(serialize_config(back) == text);
        }
    }

    TEST_CASE("preset defaults fill absent fields")
    {
        CHECK(parse_config(R"({"defaults": "paper"})") == RunConfig::paper());
        CHECK(parse_config("{}", true) == RunConfig::paper());
        const RunConfig c = parse_config(R"({"defaults": "paper", "numerics": {"h": 0.01}, "output": "x"})");
        CHECK(c.numerics.h == 0.01);
        CHECK(c.numerics.n_modes == 8);
        CHECK(c.output == "x");
    }

    TEST_CASE("invalid configurations are rejected")
    {
        CHECK_THROWS_AS(parse_config("{"), ConfigError);
        CHECK_THROWS_AS(parse_config("[1, 2]"), ConfigError);
        CHECK_THROWS_AS(parse_config("{}"), ConfigError);
        CHECK_THROWS_AS(parse_config(R"({"defaults": "other"})"), ConfigError);

        json j = paper_json();
        j["numerics"]["alpha_check"] = j["numerics"]["alpha"];
        expect_config_error(j);

        j = paper_json();
        j["numerics"].erase("h");
        expect_config_error(j);

        j = paper_json();
        j["numerics"]["h"] = "fine";
        expect_config_error(j);

        j = paper_json();
        j["numerics"]["tolerances"]["unitarity"] = -1e-3;
        expect_config_error(j);

        j = paper_json();
        j["numerics"]["tolerances"]["ritz"] = 0.0;
        expect_config_error(j);

        j = paper_json();
        j["delay"]["energy_min"] = 20.0;
        expect_config_error(j);

        j = paper_json();
        j["delay"]["energy_max"] = 120.0;
        expect_config_error(j);

        j = paper_json();
        j["delay"]["count"] = 2;
        expect_config_error(j);

        j = paper_json();
        j["numerics"]["n_modes"] = 30;
        expect_config_error(j);

        j = paper_json();
        j["numerics"]["transition_width"] = 20.0;
        expect_config_error(j);

        j = paper_json();
        j["geometry"]["colour"] = "blue";
        expect_config_error(j);

        j = paper_json();
        j["extra"] = 1;
        expect_config_error(j);

        j = paper_json();
        j["trace"]["min_step"] = 2.0;
        expect_config_error(j);

        j = paper_json();
        j["geometry"]["guide_width"] = 5.0;
        CHECK_THROWS_AS(parse_config(j.dump()), DegenerateGeometry);

        j = paper_json();
        j["numerics"]["h"] = 0.0333;
        CHECK_THROWS_AS(parse_config(j.dump()), SnapFailure);

        CHECK_THROWS_AS(load_config("/nonexistent/config.json"), ConfigError);
    }

    TEST_CASE("hash ignores only the output directory")
    {
        RunConfig a = toy::run_config("one"), b = toy::run_config("two");
        CHECK(config_hash(a) == config_hash(b));
        b.numerics.h = 0.025;
        CHECK(config_hash(a) != config_hash(b));
        b = a;
        b.trace.seeds.push_back(99.0);
        CHECK(config_hash(a) != config_hash(b));
        CHECK(config_hash(RunConfig::paper()) == config_hash(parse_config(serialize_config(RunConfig::paper()))));
    }
}
