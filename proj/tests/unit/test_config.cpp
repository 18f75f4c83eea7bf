#include <doctest.h>

#include <functional>
#include <stdexcept>
#include <string>

#include "bqfl/config.hpp"
#include "bqfl/harness.hpp"

using namespace bqfl;

namespace {

std::string error_of(const std::function<void()>& fn) {
    try {
        fn();
    } catch (const std::exception& e) {
        return e.what();
    }
    return {};
}

}  // namespace

TEST_CASE("parse sections, scalars and lists") {
    const auto doc = ConfigDocument::parse(R"(
# comment
[experiment]
n = 20          # trailing comment
aggregator = "classical"
record_timing = true

[attack]
kind = "alie"
z_large_range = [3.5, 6]

[sweep]
attacks = ["alie", "lie"]
)");
    CHECK(doc.get_int("experiment.n") == 20);
    CHECK(doc.get_double("experiment.n") == 20.0);
    CHECK(doc.get_string("experiment.aggregator") == "classical");
    CHECK(doc.get_bool("experiment.record_timing") == true);
    CHECK(doc.get_string("attack.kind") == "alie");
    CHECK(doc.get_list("attack.z_large_range") == std::vector<std::string>{"3.5", "6"});
    CHECK(doc.get_list("sweep.attacks") == std::vector<std::string>{"alie", "lie"});
    CHECK_FALSE(doc.get_int("experiment.f").has_value());
    CHECK(doc.has("attack.kind"));
}

TEST_CASE("comma strings work as lists") {
    auto doc = ConfigDocument::parse("[sweep]\naggregators = \"classical, qubo\"\n");
    CHECK(doc.get_list("sweep.aggregators") == std::vector<std::string>{"classical", "qubo"});
    doc.set("sweep.aggregators", "[\"cascade\"]");
    CHECK(doc.get_list("sweep.aggregators") == std::vector<std::string>{"cascade"});
}

TEST_CASE("type errors name the field and location") {
    const auto doc = ConfigDocument::parse("[experiment]\nn = \"many\"\n", "exp.toml");
    const auto msg = error_of([&] { (void)doc.get_int("experiment.n"); });
    CHECK(msg.find("exp.toml:2") != std::string::npos);
    CHECK(msg.find("experiment.n") != std::string::npos);
    CHECK(msg.find("integer") != std::string::npos);

    CHECK_THROWS(ConfigDocument::parse("[experiment\n"));
    CHECK_THROWS(ConfigDocument::parse("novalue\n"));
    CHECK_THROWS(ConfigDocument::parse("a = 1\na = 2\n"));
    CHECK_THROWS(ConfigDocument::load("/nonexistent/file.toml"));
}

TEST_CASE("experiment fields map from the document") {
    const auto doc = ConfigDocument::parse(R"(
[experiment]
n = 20
f = 4
aggregator = "cascade"
[attack]
kind = "sparse_lie"
z_ext_range = [6, 7]
[anneal]
reads = 50
[routing]
tau_E = 0.3
[trainer]
layers = [10, 4, 2]
[sweep]
seeds = 3
)");
    const auto cfg = apply_config(doc);
    CHECK(cfg.n == 20);
    CHECK(cfg.f == 4);
    CHECK(cfg.aggregator == Aggregator::cascade);
    CHECK(cfg.attack.kind == AttackKind::sparse_lie);
    CHECK(cfg.attack.z_ext_range.lo == 6.0);
    CHECK(cfg.attack.z_ext_range.hi == 7.0);
    CHECK(cfg.anneal.reads == 50);
    CHECK(cfg.routing.tau_E == 0.3);
    CHECK(cfg.trainer.layers == std::vector<std::size_t>{10, 4, 2});
    CHECK(cfg.selection_size() == 16);
}

TEST_CASE("unknown keys and bad enum values are errors") {
    const auto typo = ConfigDocument::parse("[experiment]\nrounds_typo = 3\n");
    CHECK(error_of([&] { (void)apply_config(typo); }).find("experiment.rounds_typo") != std::string::npos);

    const auto bad = ConfigDocument::parse("[attack]\nkind = \"bogus\"\n");
    const auto msg = error_of([&] { (void)apply_config(bad); });
    CHECK(msg.find("bogus") != std::string::npos);
    CHECK(msg.find("sparse_lie") != std::string::npos);
}
