#include <doctest.h>

#include <cmath>
#include <map>
#include <random>

#include "leafarch/classifier.hpp"
#include "synth_helpers.hpp"

using namespace leafarch;
using bayes::NaiveBayesModel;
using bayes::Sample;

namespace {

// Direct product-of-frequencies posterior, no logs, no shared code.
std::vector<double> brute_posterior(const NaiveBayesModel& m,
                                    const std::vector<std::string>& values) {
    std::vector<double> scores(m.species.size(), 1.0 / static_cast<double>(m.species.size()));
    for (std::size_t c = 0; c < m.species.size(); ++c) {
        for (std::size_t i = 0; i < values.size(); ++i) {
            const auto& domain = m.feature_domains[i];
            const auto v = static_cast<std::size_t>(
                std::find(domain.begin(), domain.end(), values[i]) - domain.begin());
            const double num = static_cast<double>(m.counts[c][i][v]) + m.alpha;
            const double den = static_cast<double>(m.totals[c]) +
                               m.alpha * static_cast<double>(domain.size());
            scores[c] *= num / den;
        }
    }
    double total = 0.0;
    for (double s : scores) total += s;
    for (double& s : scores) s /= total;
    return scores;
}

NaiveBayesModel two_species_binary() {
    // species A: 3x "x", 1x "y"; species B: 1x "x", 3x "y"
    std::vector<Sample> samples;
    for (int i = 0; i < 3; ++i) samples.push_back({{"x"}, "A"});
    samples.push_back({{"y"}, "A"});
    samples.push_back({{"x"}, "B"});
    for (int i = 0; i < 3; ++i) samples.push_back({{"y"}, "B"});
    return bayes::fit(samples, {"f"}, {{"x", "y"}}, 0.0);
}

}  // namespace

TEST_CASE("fit tabulates counts per species, feature and value") {
    std::vector<Sample> samples;
    for (int i = 0; i < 3; ++i) samples.push_back({{"a", "u"}, "s1"});
    for (int i = 0; i < 3; ++i) samples.push_back({{"b", "v"}, "s2"});
    const auto m = bayes::fit(samples, {"f1", "f2"}, {{"a", "b"}, {"u", "v"}}, 1.0);

    REQUIRE(m.species == std::vector<std::string>{"s1", "s2"});
    CHECK(m.counts[0][0][0] == 3);  // s1, f1, "a"
    CHECK(m.counts[0][0][1] == 0);
    CHECK(m.counts[1][1][1] == 3);  // s2, f2, "v"
    CHECK(m.totals[0] == 3);
    CHECK(m.totals[1] == 3);
}

TEST_CASE("fit is order invariant") {
    std::vector<Sample> samples;
    std::mt19937_64 rng(3);
    for (int i = 0; i < 40; ++i) {
        samples.push_back({{rng() % 2 ? "a" : "b"}, rng() % 2 ? "s1" : "s2"});
    }
    const auto m1 = bayes::fit(samples, {"f"}, {{"a", "b"}}, 1.0);
    std::shuffle(samples.begin(), samples.end(), rng);
    const auto m2 = bayes::fit(samples, {"f"}, {{"a", "b"}}, 1.0);
    CHECK(m1.counts == m2.counts);
    CHECK(m1.totals == m2.totals);
    CHECK(m1.species == m2.species);
}

TEST_CASE("fit counts match an independent tally") {
    std::mt19937_64 rng(5);
    const std::vector<std::string> values = {"p", "q", "r"};
    std::vector<Sample> samples;
    std::map<std::string, std::map<std::string, int>> tally;
    std::map<std::string, int> totals;
    for (int i = 0; i < 100; ++i) {
        const std::string v = values[rng() % 3];
        const std::string label = "s" + std::to_string(rng() % 4);
        samples.push_back({{v}, label});
        ++tally[label][v];
        ++totals[label];
    }
    const auto m = bayes::fit(samples, {"f"}, {values}, 1.0);
    for (std::size_t c = 0; c < m.species.size(); ++c) {
        CHECK(m.totals[c] == totals[m.species[c]]);
        for (std::size_t v = 0; v < values.size(); ++v) {
            CHECK(m.counts[c][0][v] == tally[m.species[c]][values[v]]);
        }
    }
}

TEST_CASE("fit rejects bad input") {
    CHECK_THROWS_AS(bayes::fit(std::vector<Sample>{}, {"f"}, {{"a"}}, 1.0), EmptyClass);
    CHECK_THROWS_AS(bayes::fit({{{"zzz"}, "s"}}, {"f"}, {{"a", "b"}}, 1.0), UnknownCategory);
    CHECK_THROWS_AS(bayes::fit({{{"a"}, ""}}, {"f"}, {{"a"}}, 1.0), EmptyClass);
}

TEST_CASE("posterior on the worked two-species example") {
    const auto m = two_species_binary();
    const auto p = bayes::posterior(m, {"x"});
    // (1/2 * 3/4) vs (1/2 * 1/4), normalized
    CHECK(p[0] == doctest::Approx(0.75).epsilon(1e-12));
    CHECK(p[1] == doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("posterior is uniform for identical classes") {
    std::vector<Sample> samples;
    for (const char* label : {"a", "b", "c"}) {
        samples.push_back({{"x"}, label});
        samples.push_back({{"y"}, label});
    }
    const auto m = bayes::fit(samples, {"f"}, {{"x", "y"}}, 1.0);
    for (double p : bayes::posterior(m, {"x"})) CHECK(p == doctest::Approx(1.0 / 3).epsilon(1e-12));
}

TEST_CASE("posterior matches the exhaustive product oracle on all queries") {
    std::mt19937_64 rng(7);
    const std::vector<std::string> domain = {"v0", "v1", "v2", "v3"};
    for (double alpha : {0.0, 1.0}) {
        std::vector<Sample> samples;
        for (int i = 0; i < 200; ++i) {
            Sample s;
            for (int f = 0; f < 4; ++f) s.values.push_back(domain[rng() % 4]);
            s.label = "c" + std::to_string(rng() % 3);
            samples.push_back(std::move(s));
        }
        const auto m = bayes::fit(samples, {"f0", "f1", "f2", "f3"},
                                  {domain, domain, domain, domain}, alpha);
        int checked = 0;
        for (int q = 0; q < 256; ++q) {
            std::vector<std::string> query = {domain[q % 4], domain[(q / 4) % 4],
                                              domain[(q / 16) % 4], domain[(q / 64) % 4]};
            std::vector<double> want;
            try {
                want = brute_posterior(m, query);
            } catch (...) {
                continue;
            }
            if (alpha == 0.0) {
                bool any_nan = false;
                double total = 0.0;
                for (double w : want) total += w;
                any_nan = !(total > 0.0) || std::isnan(total);
                if (any_nan) continue;
            }
            const auto got = bayes::posterior(m, query);
            for (std::size_t c = 0; c < got.size(); ++c) {
                CHECK(got[c] == doctest::Approx(want[c]).epsilon(1e-12));
            }
            ++checked;
        }
        CHECK(checked > 200);
    }
}

TEST_CASE("alpha 0 with a value unseen in every class raises AllZeroPosterior") {
    std::vector<Sample> samples = {{{"a"}, "s1"}, {{"a"}, "s2"}};
    const auto m = bayes::fit(samples, {"f"}, {{"a", "b"}}, 0.0);
    CHECK_THROWS_AS(bayes::posterior(m, {"b"}), AllZeroPosterior);
}

TEST_CASE("alpha > 0 never yields a zero posterior") {
    std::vector<Sample> samples = {{{"a"}, "s1"}, {{"b"}, "s2"}};
    const auto m = bayes::fit(samples, {"f"}, {{"a", "b", "c"}}, 1.0);
    for (const char* q : {"a", "b", "c"}) {
        for (double p : bayes::posterior(m, {q})) CHECK(p > 0.0);
    }
}

TEST_CASE("classify_topk ranks and breaks ties by species order") {
    const auto m = two_species_binary();
    const auto top = bayes::classify_topk(m, {"x"}, 1);
    REQUIRE(top.ranked.size() == 1);
    CHECK(top.ranked[0].first == "A");

    const auto full = bayes::classify_topk(m, {"x"}, 2);
    REQUIRE(full.ranked.size() == 2);
    double sum = 0.0;
    for (const auto& [label, p] : full.ranked) sum += p;
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(full.ranked[0].second >= full.ranked[1].second);

    // exact tie: identical counts, the earlier label wins
    std::vector<Sample> tied = {{{"x"}, "beta"}, {{"x"}, "alpha"}};
    const auto mt = bayes::fit(tied, {"f"}, {{"x", "y"}}, 1.0);
    const auto t = bayes::classify_topk(mt, {"x"}, 2);
    CHECK(t.ranked[0].first == "alpha");
}

TEST_CASE("normalization never changes the argmax") {
    std::mt19937_64 rng(11);
    const std::vector<std::string> domain = {"a", "b", "c"};
    std::vector<Sample> samples;
    for (int i = 0; i < 60; ++i) {
        samples.push_back({{domain[rng() % 3], domain[rng() % 3]},
                           "s" + std::to_string(rng() % 5)});
    }
    const auto m = bayes::fit(samples, {"f0", "f1"}, {domain, domain}, 0.5);
    for (int q = 0; q < 9; ++q) {
        const std::vector<std::string> query = {domain[q % 3], domain[q / 3]};
        const auto p = bayes::posterior(m, query);
        const auto top = bayes::classify_topk(m, query, 1);
        const auto best = std::max_element(p.begin(), p.end());
        CHECK(m.species[static_cast<std::size_t>(best - p.begin())] == top.ranked[0].first);
    }
}

TEST_CASE("posterior is invariant under species relabeling") {
    std::mt19937_64 rng(13);
    const std::vector<std::string> domain = {"a", "b"};
    std::vector<Sample> samples;
    for (int i = 0; i < 50; ++i) {
        samples.push_back({{domain[rng() % 2]}, "s" + std::to_string(rng() % 3)});
    }
    const auto m1 = bayes::fit(samples, {"f"}, {domain}, 1.0);
    // rename s0 -> z9 (sorts last instead of first)
    auto renamed = samples;
    for (auto& s : renamed) {
        if (s.label == "s0") s.label = "z9";
    }
    const auto m2 = bayes::fit(renamed, {"f"}, {domain}, 1.0);

    for (const char* q : {"a", "b"}) {
        const auto p1 = bayes::posterior(m1, {q});
        const auto p2 = bayes::posterior(m2, {q});
        // m1 order: s0 s1 s2; m2 order: s1 s2 z9
        CHECK(p1[0] == doctest::Approx(p2[2]).epsilon(1e-12));
        CHECK(p1[1] == doctest::Approx(p2[0]).epsilon(1e-12));
        CHECK(p1[2] == doctest::Approx(p2[1]).epsilon(1e-12));
    }
}

TEST_CASE("single feature with alpha 0 reduces to class-conditional frequencies") {
    const auto m = two_species_binary();
    const auto p = bayes::posterior(m, {"y"});
    CHECK(p[0] == doctest::Approx((1.0 / 4.0) / (1.0 / 4.0 + 3.0 / 4.0)).epsilon(1e-12));
}

TEST_CASE("save/load round-trips the model") {
    std::mt19937_64 rng(17);
    std::vector<std::pair<features::ArchitectureFeatures, std::string>> samples;
    for (int i = 0; i < 30; ++i) {
        synth::LeafSpec spec;
        if (i % 3 == 1) spec.teeth = 60, spec.tooth_amp = 0.015;
        if (i % 3 == 2) spec.widest = 0.3;
        spec.jitter = 0.4;
        samples.push_back({testutil::run_features(spec, 100 + i),
                           "species" + std::to_string(i % 3)});
    }
    const auto m = bayes::fit(samples, 1.0);
    const std::string bytes = bayes::save(m);
    const auto loaded = bayes::load(bytes);

    CHECK(loaded.alpha == m.alpha);
    CHECK(loaded.species == m.species);
    CHECK(loaded.feature_names == m.feature_names);
    CHECK(loaded.feature_domains == m.feature_domains);
    CHECK(loaded.counts == m.counts);
    CHECK(loaded.totals == m.totals);

    // bit-equal posteriors on queries
    for (int i = 0; i < 10; ++i) {
        const auto& f = samples[static_cast<std::size_t>(rng() % samples.size())].first;
        const auto p1 = bayes::posterior(m, f);
        const auto p2 = bayes::posterior(loaded, f);
        CHECK(p1 == p2);
    }

    // saving the loaded model reproduces the bytes
    CHECK(bayes::save(loaded) == bytes);
}

TEST_CASE("load rejects malformed models") {
    const auto m = two_species_binary();
    const std::string bytes = bayes::save(m);
    CHECK(bayes::load(bytes).alpha == 0.0);  // alpha 0 round-trips exactly

    CHECK_THROWS_AS(bayes::load(bytes.substr(0, bytes.size() / 2)), BadModel);
    CHECK_THROWS_AS(bayes::load("{}"), BadModel);
    CHECK_THROWS_AS(bayes::load("{\"schema\":2}"), BadModel);
    CHECK_THROWS_AS(bayes::load("not json at all"), BadModel);

    // counts inconsistent with totals
    std::string tampered = bytes;
    const auto pos = tampered.find("\"x\": 3");
    if (pos != std::string::npos) {
        tampered.replace(pos, 6, "\"x\": 7");
        CHECK_THROWS_AS(bayes::load(tampered), BadModel);
    }
}
