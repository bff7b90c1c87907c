// leafarch: leaf architecture extraction, classification and evaluation.
#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "leafarch/harness.hpp"
#include "leafarch/image_io.hpp"
#include "leafarch/pipeline.hpp"
#include "leafarch/svg.hpp"
#include "leafarch/synth.hpp"

namespace fs = std::filesystem;
using namespace leafarch;

namespace {

constexpr int kExitBadInput = 1;
constexpr int kExitProcessing = 2;

std::string read_text(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open: " + path.string());
    return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write: " + path.string());
    out << text;
}

int cmd_extract(const std::string& image, const std::string& debug_dir, bool csv,
                bool bright_leaf) {
    const bool leaf_is_dark = !bright_leaf;
    if (!debug_dir.empty()) {
        const auto raster = io::read_image(image);
        const auto result = pipeline::process(raster, leaf_is_dark);
        svg::write_debug_stages(debug_dir, result);
    }
    const auto f = harness::extract_file(image, leaf_is_dark);
    if (csv) {
        std::cout << features::csv_header() << "\n" << features::to_csv_row(f) << "\n";
    } else {
        std::cout << features::to_json(f) << "\n";
    }
    return 0;
}

int cmd_train(const std::string& manifest_path, const std::string& out, double alpha,
              bool bright_leaf) {
    const auto manifest = harness::load_manifest(manifest_path);
    std::vector<std::pair<features::ArchitectureFeatures, std::string>> samples;
    for (const auto& entry : manifest.entries) {
        try {
            samples.push_back({harness::extract_file(manifest.base_dir / entry.path, !bright_leaf),
                               entry.species});
        } catch (const Error& e) {
            std::cerr << "warning: skipping " << entry.path << ": " << e.what() << "\n";
        }
    }
    const auto model = bayes::fit(samples, alpha);
    write_text(out, bayes::save(model));
    std::cerr << "trained on " << samples.size() << " images, " << model.species.size()
              << " species -> " << out << "\n";
    return 0;
}

int cmd_classify(const std::string& model_path, const std::string& image, std::size_t k,
                 bool bright_leaf) {
    const auto model = bayes::load(read_text(model_path));
    const auto f = harness::extract_file(image, !bright_leaf);
    const auto prediction = bayes::classify_topk(model, f, k);

    nlohmann::json j;
    j["schema"] = 1;
    nlohmann::json ranked = nlohmann::json::array();
    for (const auto& [species, score] : prediction.ranked) {
        ranked.push_back({{"species", species}, {"score", score}});
    }
    j["ranked"] = ranked;
    std::cout << j.dump(2) << "\n";
    return 0;
}

int cmd_evaluate(const std::string& manifest_path, std::uint64_t seed, double train_fraction,
                 double alpha, bool bright_leaf) {
    const auto manifest = harness::load_manifest(manifest_path);
    auto report =
        harness::evaluate_species(manifest, train_fraction, seed, alpha, 3, !bright_leaf);

    // add per-feature sections for whichever labeled features are present
    std::vector<std::string> labeled;
    for (const auto& [name, positive] : harness::binary_positive_values()) {
        for (const auto& entry : manifest.entries) {
            if (entry.labels.count(name)) {
                labeled.push_back(name);
                break;
            }
        }
    }
    if (!labeled.empty()) {
        const auto features_report = harness::evaluate_features(manifest, labeled, !bright_leaf);
        report.per_feature = features_report.per_feature;
        for (const auto& w : features_report.warnings) report.warnings.push_back(w);
    }
    std::cout << harness::report_to_json(report) << "\n";
    return 0;
}

int cmd_eval_features(const std::string& manifest_path, const std::string& feature,
                      bool bright_leaf) {
    if (harness::binary_positive_values().count(feature) == 0) {
        throw Error("unknown binary feature: " + feature +
                    " (expected organization, lobation, margin, apex_angle or base_angle)");
    }
    const auto manifest = harness::load_manifest(manifest_path);
    const auto report = harness::evaluate_features(manifest, {feature}, !bright_leaf);
    std::cout << harness::report_to_json(report) << "\n";
    return 0;
}

int cmd_synth(const std::string& spec_path, const std::string& out_dir, int count,
              std::uint64_t seed) {
    const auto specs = synth::specs_from_json(read_text(spec_path));
    fs::create_directories(out_dir);

    harness::DatasetManifest manifest;
    manifest.base_dir = out_dir;
    std::uint64_t next_seed = seed;
    for (const auto& spec : specs) {
        for (int i = 0; i < count; ++i) {
            const auto leaf = synth::generate(spec, next_seed++);
            const std::string name = spec.name + "_" + std::to_string(i) + ".pgm";
            io::write_pgm(fs::path(out_dir) / name, leaf.image);

            harness::ManifestEntry entry;
            entry.path = name;
            entry.species = spec.name;
            const auto& t = leaf.truth;
            entry.labels["organization"] = features::to_string(t.organization);
            if (t.organization == features::Organization::Simple) {
                entry.labels["laminar_shape"] = features::to_string(t.laminar_shape);
                entry.labels["medial_symmetry"] = features::to_string(t.medial_symmetry);
                entry.labels["lobation"] = features::to_string(t.lobation);
                entry.labels["lobe_count"] = features::to_string(t.lobe_count);
                entry.labels["margin"] = features::to_string(t.margin);
                entry.labels["apex_angle"] = features::to_string(t.apex_angle);
                entry.labels["apex_shape"] = features::to_string(t.apex_shape);
                entry.labels["base_angle"] = features::to_string(t.base_angle);
                entry.labels["base_shape"] = features::to_string(t.base_shape);
            }
            manifest.entries.push_back(std::move(entry));
        }
    }
    harness::save_manifest(manifest, fs::path(out_dir) / "manifest.csv");
    std::cerr << "wrote " << manifest.entries.size() << " images and manifest.csv to " << out_dir
              << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Leaf architecture feature extraction and species classification"};
    app.require_subcommand(1);

    bool bright_leaf = false;
    app.add_flag("--bright-leaf", bright_leaf,
                 "leaf is brighter than the background (default: darker)");

    // extract
    auto* extract = app.add_subcommand("extract", "extract the architecture features of one image");
    std::string image_path, debug_dir;
    bool as_csv = false, as_json = false;
    extract->add_option("image", image_path, "image file (PNG, PGM or PPM)")->required();
    extract->add_option("--debug-dir", debug_dir, "write per-stage debug SVGs here");
    extract->add_flag("--csv", as_csv, "CSV output");
    extract->add_flag("--json", as_json, "JSON output (default)");

    // train
    auto* train = app.add_subcommand("train", "fit a Naive Bayes model from a manifest");
    std::string manifest_path, model_out;
    double alpha = 1.0;
    train->add_option("--manifest", manifest_path, "dataset manifest CSV")->required();
    train->add_option("--out", model_out, "output model file")->required();
    train->add_option("--alpha", alpha, "additive smoothing (0 = raw frequencies)");

    // classify
    auto* classify = app.add_subcommand("classify", "rank species for one image");
    std::string model_path, classify_image;
    std::size_t top_k = 3;
    classify->add_option("--model", model_path, "model file from `train`")->required();
    classify->add_option("image", classify_image, "image file")->required();
    classify->add_option("--top", top_k, "ranking length");

    // evaluate
    auto* evaluate = app.add_subcommand("evaluate", "split, train and score a manifest");
    std::string eval_manifest;
    std::uint64_t seed = 1;
    double train_fraction = 2.0 / 3.0;
    double eval_alpha = 1.0;
    evaluate->add_option("--manifest", eval_manifest, "dataset manifest CSV")->required();
    evaluate->add_option("--seed", seed, "split seed");
    evaluate->add_option("--train-fraction", train_fraction, "train share of each species");
    evaluate->add_option("--alpha", eval_alpha, "additive smoothing");

    // eval-features
    auto* eval_features = app.add_subcommand("eval-features", "binary metrics for one feature");
    std::string ef_manifest, ef_feature;
    eval_features->add_option("--manifest", ef_manifest, "dataset manifest CSV")->required();
    eval_features->add_option("--feature", ef_feature, "feature name")->required();

    // synth
    auto* synth_cmd = app.add_subcommand("synth", "render synthetic leaves with ground truth");
    std::string spec_path, synth_out;
    int synth_count = 10;
    std::uint64_t synth_seed = 1;
    synth_cmd->add_option("--spec", spec_path, "variants spec JSON")->required();
    synth_cmd->add_option("--out", synth_out, "output directory")->required();
    synth_cmd->add_option("--count", synth_count, "images per variant");
    synth_cmd->add_option("--seed", synth_seed, "base seed");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*extract) return cmd_extract(image_path, debug_dir, as_csv && !as_json, bright_leaf);
        if (*train) return cmd_train(manifest_path, model_out, alpha, bright_leaf);
        if (*classify) return cmd_classify(model_path, classify_image, top_k, bright_leaf);
        if (*evaluate) {
            return cmd_evaluate(eval_manifest, seed, train_fraction, eval_alpha, bright_leaf);
        }
        if (*eval_features) return cmd_eval_features(ef_manifest, ef_feature, bright_leaf);
        if (*synth_cmd) return cmd_synth(spec_path, synth_out, synth_count, synth_seed);
    } catch (const BadModel& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitBadInput;
    } catch (const BadSpec& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitBadInput;
    } catch (const UnknownCategory& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitBadInput;
    } catch (const SegmentationFailed& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitProcessing;
    } catch (const Error& e) {
        const std::string msg = e.what();
        std::cerr << "error: " << msg << "\n";
        // unreadable inputs are usage errors, mid-pipeline failures are not
        return msg.find("cannot open") != std::string::npos ||
                       msg.find("manifest") != std::string::npos ||
                       msg.find("unsupported") != std::string::npos ||
                       msg.find("unknown") != std::string::npos
                   ? kExitBadInput
                   : kExitProcessing;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitProcessing;
    }
    return 0;
}
