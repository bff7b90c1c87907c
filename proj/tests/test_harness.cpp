#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <set>

#include "leafarch/harness.hpp"
#include "leafarch/image_io.hpp"
#include "synth_helpers.hpp"

using namespace leafarch;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / "leafarch_harness" / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

harness::DatasetManifest synthetic_dataset(const fs::path& dir,
                                           const std::vector<synth::LeafSpec>& specs,
                                           int per_spec, std::uint64_t seed0,
                                           bool with_labels) {
    harness::DatasetManifest m;
    m.base_dir = dir;
    std::uint64_t seed = seed0;
    for (const auto& spec : specs) {
        for (int i = 0; i < per_spec; ++i) {
            const auto leaf = synth::generate(spec, seed);
            const std::string name = spec.name + "_" + std::to_string(i) + ".pgm";
            io::write_pgm(dir / name, leaf.image);
            harness::ManifestEntry e;
            e.path = name;
            e.species = spec.name;
            if (with_labels) {
                e.labels["organization"] = features::to_string(leaf.truth.organization);
                e.labels["lobation"] = features::to_string(leaf.truth.lobation);
                e.labels["margin"] = features::to_string(leaf.truth.margin);
                e.labels["apex_angle"] = features::to_string(leaf.truth.apex_angle);
                e.labels["base_angle"] = features::to_string(leaf.truth.base_angle);
            }
            m.entries.push_back(std::move(e));
            ++seed;
        }
    }
    return m;
}

}  // namespace

TEST_CASE("metrics reproduces the published F1 scores") {
    // precision/recall pairs with their F1, to +-0.001
    const struct {
        double precision, recall, f1;
    } rows[] = {{0.969, 0.965, 0.967},
                {0.934, 1.000, 0.966},
                {0.897, 0.870, 0.883},
                {0.820, 0.600, 0.693},
                {0.979, 0.940, 0.959}};
    for (const auto& row : rows) {
        // feed tp/fp/fn consistent with the printed precision and recall
        const double tp = row.precision;
        const double fp = tp / row.precision - tp;
        const double fn = tp / row.recall - tp;
        const auto m = harness::metrics(tp, fp, 1.0 - fp, fn);
        CHECK(m.precision == doctest::Approx(row.precision).epsilon(1e-9));
        CHECK(m.recall == doctest::Approx(row.recall).epsilon(1e-6));
        CHECK(std::abs(m.f1 - row.f1) <= 0.001);
    }
}

TEST_CASE("metrics 0/0 convention") {
    const auto m = harness::metrics(0.0, 0.0, 1.0, 0.0);
    CHECK(m.precision == 0.0);
    CHECK(m.recall == 0.0);
    CHECK(m.f1 == 0.0);
}

TEST_CASE("always-positive predictor: recall 1, precision PIM/(PIM+NIM)") {
    // rates: tp = 1 (all positives called), fp = 1 (all negatives called)
    const auto m = harness::metrics(1.0, 1.0, 0.0, 0.0);
    CHECK(m.recall == doctest::Approx(1.0));
    CHECK(m.precision == doctest::Approx(0.5));
}

TEST_CASE("manifest round-trip") {
    const fs::path dir = temp_dir("manifest");
    harness::DatasetManifest m;
    m.base_dir = dir;
    harness::ManifestEntry a;
    a.path = "a.pgm";
    a.species = "sp1";
    a.labels["lobation"] = "lobed";
    harness::ManifestEntry b;
    b.path = "b.pgm";
    b.species = "sp2";
    m.entries = {a, b};
    harness::save_manifest(m, dir / "manifest.csv");

    const auto back = harness::load_manifest(dir / "manifest.csv");
    REQUIRE(back.entries.size() == 2);
    CHECK(back.entries[0].path == "a.pgm");
    CHECK(back.entries[0].labels.at("lobation") == "lobed");
    CHECK(back.entries[1].labels.empty());

    std::ofstream bad(dir / "bad.csv");
    bad << "species,path\nx,y\n";
    bad.close();
    CHECK_THROWS_AS(harness::load_manifest(dir / "bad.csv"), Error);

    std::ofstream dup(dir / "dup.csv");
    dup << "path,species\np.pgm,a\np.pgm,b\n";
    dup.close();
    CHECK_THROWS_AS(harness::load_manifest(dir / "dup.csv"), Error);
}

TEST_CASE("split is stratified, sized and deterministic") {
    harness::DatasetManifest m;
    for (int i = 0; i < 30; ++i) {
        harness::ManifestEntry e;
        e.path = "img" + std::to_string(i);
        e.species = "only";
        m.entries.push_back(e);
    }
    const auto s1 = harness::split(m, 2.0 / 3.0, 42);
    CHECK(s1.train.size() == 20);
    CHECK(s1.test.size() == 10);

    const auto s2 = harness::split(m, 2.0 / 3.0, 42);
    CHECK(s1.train == s2.train);
    CHECK(s1.test == s2.test);

    const auto s3 = harness::split(m, 2.0 / 3.0, 43);
    CHECK(s1.train != s3.train);

    // no index lost or duplicated
    std::set<std::size_t> all(s1.train.begin(), s1.train.end());
    all.insert(s1.test.begin(), s1.test.end());
    CHECK(all.size() == 30);
}

TEST_CASE("split keeps single-sample species whole in train") {
    harness::DatasetManifest m;
    harness::ManifestEntry lone;
    lone.path = "x";
    lone.species = "rare";
    m.entries.push_back(lone);
    for (int i = 0; i < 6; ++i) {
        harness::ManifestEntry e;
        e.path = "y" + std::to_string(i);
        e.species = "common";
        m.entries.push_back(e);
    }
    const auto s = harness::split(m, 0.5, 7);
    CHECK(std::count(s.train.begin(), s.train.end(), 0u) == 1);
    CHECK(!s.warnings.empty());
    CHECK_THROWS_AS(harness::split(m, 1.5, 7), Error);
}

TEST_CASE("evaluate_features: near-perfect on clean synthetic positives/negatives") {
    const fs::path dir = temp_dir("eval_feat");
    synth::LeafSpec lobed;
    lobed.name = "lobed";
    lobed.lobes = 5;
    lobed.lobe_depth = 0.4;
    lobed.ratio = 1.2;
    synth::LeafSpec unlobed;
    unlobed.name = "unlobed";

    const auto manifest = synthetic_dataset(dir, {lobed, unlobed}, 6, 500, true);
    const auto report = harness::evaluate_features(manifest, {"lobation"});
    REQUIRE(report.per_feature.count("lobation") == 1);
    const auto& fm = report.per_feature.at("lobation");
    CHECK(fm.pim == 6);
    CHECK(fm.nim == 6);
    CHECK(fm.f1 == doctest::Approx(1.0));
}

TEST_CASE("evaluate_features counts unreadable images as negative predictions") {
    const fs::path dir = temp_dir("eval_fail");
    synth::LeafSpec spec;
    spec.name = "leaf";
    auto manifest = synthetic_dataset(dir, {spec}, 2, 600, true);
    // a positive-labeled entry whose file is missing: pipeline failure
    harness::ManifestEntry ghost;
    ghost.path = "missing.pgm";
    ghost.species = "leaf";
    ghost.labels["lobation"] = "lobed";
    manifest.entries.push_back(ghost);

    const auto report = harness::evaluate_features(manifest, {"lobation"});
    const auto& fm = report.per_feature.at("lobation");
    CHECK(fm.fn_count == 1);  // the ghost counted as a negative prediction
    CHECK(!report.warnings.empty());
}

TEST_CASE("evaluate_species: separable species reach top-1 accuracy 1") {
    const fs::path dir = temp_dir("eval_species");
    synth::LeafSpec a;
    a.name = "plain";
    synth::LeafSpec b;
    b.name = "toothy";
    b.teeth = 60;
    b.tooth_amp = 0.015;
    synth::LeafSpec c;
    c.name = "heart";
    c.base = synth::LeafSpec::Base::Cordate;

    const auto manifest = synthetic_dataset(dir, {a, b, c}, 6, 700, false);
    const auto report = harness::evaluate_species(manifest, 0.5, 9, 1.0, 3);
    CHECK(report.top1_accuracy == doctest::Approx(1.0));
    CHECK(report.top3_accuracy == doctest::Approx(1.0));
    CHECK(report.n_train == 9);
    CHECK(report.n_test == 9);
}

TEST_CASE("evaluate_species: shuffled labels score near chance") {
    const fs::path dir = temp_dir("eval_chance");
    synth::LeafSpec spec;
    spec.name = "same";
    spec.jitter = 0.2;
    auto manifest = synthetic_dataset(dir, {spec}, 40, 800, false);
    // identical leaves randomly relabeled over 4 species
    std::mt19937_64 rng(99);
    for (auto& e : manifest.entries) e.species = "s" + std::to_string(rng() % 4);

    const auto report = harness::evaluate_species(manifest, 0.5, 11, 1.0, 3);
    // binomial(n~20, p=1/4): accept anything within 3 sigma of chance
    const double n = static_cast<double>(report.n_test);
    const double sigma = std::sqrt(0.25 * 0.75 / n);
    CHECK(report.top1_accuracy < 0.25 + 3.5 * sigma);
}

TEST_CASE("report JSON round-trip") {
    harness::EvalReport r;
    harness::FeatureMetrics fm;
    fm.pim = 10;
    fm.nim = 20;
    fm.tp_count = 9;
    fm.fn_count = 1;
    fm.tn_count = 18;
    fm.fp_count = 2;
    fm.tp = 0.9;
    fm.fn = 0.1;
    fm.tn = 0.9;
    fm.fp = 0.1;
    fm.precision = 0.9;
    fm.recall = 0.9;
    fm.f1 = 0.9;
    r.per_feature["lobation"] = fm;
    r.top1_accuracy = 0.8;
    r.top3_accuracy = 0.95;
    r.confusion["a"]["b"] = 3;
    r.n_train = 60;
    r.n_test = 30;
    r.seed = 1234;
    r.warnings = {"something"};

    const auto back = harness::report_from_json(harness::report_to_json(r));
    CHECK(back.per_feature.at("lobation").tp == doctest::Approx(0.9));
    CHECK(back.per_feature.at("lobation").pim == 10);
    CHECK(back.top1_accuracy == doctest::Approx(0.8));
    CHECK(back.confusion.at("a").at("b") == 3);
    CHECK(back.seed == 1234);
    CHECK(back.warnings == r.warnings);

    CHECK_THROWS_AS(harness::report_from_json("{"), Error);
}

TEST_CASE("evaluation is deterministic in seed and manifest") {
    const fs::path dir = temp_dir("eval_det");
    synth::LeafSpec a;
    a.name = "a";
    synth::LeafSpec b;
    b.name = "b";
    b.widest = 0.3;
    const auto manifest = synthetic_dataset(dir, {a, b}, 4, 900, false);
    const auto r1 = harness::evaluate_species(manifest, 0.5, 5, 1.0, 3);
    const auto r2 = harness::evaluate_species(manifest, 0.5, 5, 1.0, 3);
    CHECK(harness::report_to_json(r1) == harness::report_to_json(r2));
}
