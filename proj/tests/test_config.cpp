#include <catch2/catch_amalgamated.hpp>

#include <variant>

#include "clusterflip/config.hpp"
#include "clusterflip/report.hpp"

using namespace clusterflip;

namespace {

Json minimal_potts() {
    return Json::parse(R"({
      "model": {"family": "potts", "graph": {"kind": "complete", "n": 3}, "q": 2, "beta": 0.5},
      "sampler": {"seed": 7, "n_samples": 10},
      "suite": {"checks": [{"kind": "flip_invariance", "involutions": [[1, 0]]}]},
      "output": {"dir": "out"}
    })");
}

}  // namespace

TEST_CASE("config parsing") {
    SECTION("a minimal potts config parses") {
        const ExperimentConfig cfg = parse_config(minimal_potts());
        CHECK(cfg.model.family == "potts");
        CHECK(std::holds_alternative<DiscreteModel>(cfg.model.model));
        CHECK(cfg.settings.seed == 7);
        REQUIRE(cfg.checks.size() == 1);
        CHECK(cfg.checks[0].kind == "flip_invariance");
    }
    SECTION("unknown keys are rejected at every level") {
        Json bad = minimal_potts();
        bad["model"]["graph"]["typo"] = 1;
        CHECK_THROWS_AS(parse_config(bad), config_error);
        Json bad2 = minimal_potts();
        bad2["sampler"]["unknown_knob"] = true;
        CHECK_THROWS_AS(parse_config(bad2), config_error);
        Json bad3 = minimal_potts();
        bad3["extra_top_level"] = 1;
        CHECK_THROWS_AS(parse_config(bad3), config_error);
    }
    SECTION("missing required fields are rejected") {
        Json bad = minimal_potts();
        bad["model"].erase("q");
        CHECK_THROWS_AS(parse_config(bad), config_error);
    }
    SECTION("surface model with named potential and pinning") {
        const Json j = Json::parse(R"({
          "model": {"family": "surface",
                    "graph": {"kind": "grid", "width": 3, "height": 3, "boundary": "frame"},
                    "potential": {"name": "hammock"}},
          "sampler": {"moves": [{"kind": "single_site", "weight": 1.0},
                                 {"kind": "wolff", "weight": 0.5}]}
        })");
        const ExperimentConfig cfg = parse_config(j);
        const auto& m = std::get<SurfaceModel>(cfg.model.model);
        CHECK(m.g.boundary().size() == 8);
        CHECK(cfg.settings.move_mix.size() == 2);
        CHECK(cfg.settings.move_mix[1].kind == MoveKind::wolff_cluster);
    }
    SECTION("spin model") {
        const Json j = Json::parse(R"({
          "model": {"family": "spin", "graph": {"kind": "cycle", "n": 5}, "n": 3,
                    "spin_potential": {"name": "linear", "beta": 1.0}}
        })");
        const auto& m = std::get<SpinModel>(parse_config(j).model.model);
        CHECK(m.n == 3);
    }
    SECTION("markov chain model keeps the raw chain block") {
        const Json j = Json::parse(R"({
          "model": {"family": "markov_chain",
                    "chain": {"P": [[0.5, 0.5], [0.5, 0.5]], "pi": [0.5, 0.5],
                              "mu": [1.0, 0.0], "steps": 3}}
        })");
        const ExperimentConfig cfg = parse_config(j);
        CHECK(cfg.chain_raw.has_value());
        const auto& m = std::get<DiscreteModel>(cfg.model.model);
        CHECK(m.g.vertex_count() == 4);
    }
    SECTION("grid graph with an explicit boundary list") {
        const Json j = Json::parse(R"({
          "model": {"family": "surface",
                    "graph": {"kind": "grid", "width": 3, "height": 3, "boundary": [0]},
                    "potential": {"name": "hammock"}}
        })");
        const auto& m = std::get<SurfaceModel>(parse_config(j).model.model);
        CHECK(m.g.boundary() == std::vector<Vertex>{0});
    }
    SECTION("unknown enum values are config errors") {
        Json bad = minimal_potts();
        bad["model"]["graph"]["kind"] = "moebius";
        CHECK_THROWS_AS(parse_config(bad), config_error);
        Json bad2 = minimal_potts();
        bad2["sampler"]["moves"] = Json::array({Json{{"kind", "teleport"}}});
        CHECK_THROWS_AS(parse_config(bad2), config_error);
    }
}

TEST_CASE("verdict json layout is stable") {
    TestVerdict v;
    v.name = "sample-check";
    v.claim = "sample-claim";
    v.estimate = 0.5;
    v.std_error = 0.01;
    v.target = 0.49;
    v.relation = Relation::approx;
    v.z = 1.0;
    v.pass = true;
    v.n_samples = 100;
    v.seed = 9;
    const auto j = verdict_to_json(v);
    const std::vector<std::string> expected{"name",         "claim", "estimate", "se",
                                            "target",       "relation", "z",     "pass",
                                            "inconclusive", "vacuous",  "note",  "n_samples",
                                            "seed"};
    std::vector<std::string> keys;
    for (const auto& [k, val] : j.items()) keys.push_back(k);
    CHECK(keys == expected);
}
