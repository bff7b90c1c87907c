#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "leafarch/classifier.hpp"
#include "leafarch/features.hpp"

namespace leafarch::harness {

/// One dataset row: an image path, its species, and optional per-feature
/// ground-truth labels keyed by feature name.
struct ManifestEntry {
    std::string path;  ///< resolved against the manifest directory
    std::string species;
    std::map<std::string, std::string> labels;
};

struct DatasetManifest {
    std::vector<ManifestEntry> entries;
    std::filesystem::path base_dir;
    std::string source_note;
};

/// CSV with header `path,species[,feature...]`; relative paths resolve
/// against the manifest's directory.
DatasetManifest load_manifest(const std::filesystem::path& path);
void save_manifest(const DatasetManifest& manifest, const std::filesystem::path& path);

/// Rate-based binary metrics. Any 0/0 is 0 by convention.
struct Metrics {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
};
Metrics metrics(double tp, double fp, double tn, double fn);

struct FeatureMetrics {
    std::int64_t pim = 0;  ///< positive image count
    std::int64_t nim = 0;  ///< negative image count
    std::int64_t tp_count = 0, fp_count = 0, tn_count = 0, fn_count = 0;
    double tp = 0, fp = 0, tn = 0, fn = 0;  ///< rates over PIM / NIM
    double precision = 0, recall = 0, f1 = 0;
};

struct EvalReport {
    std::map<std::string, FeatureMetrics> per_feature;
    double top1_accuracy = 0.0;
    double top3_accuracy = 0.0;
    std::map<std::string, std::map<std::string, std::int64_t>> confusion;  ///< truth -> top-1
    std::int64_t n_train = 0;
    std::int64_t n_test = 0;
    std::uint64_t seed = 0;
    std::vector<std::string> warnings;
};

std::string report_to_json(const EvalReport& r);
EvalReport report_from_json(const std::string& text);

/// Per-species stratified split, deterministic in the seed. Species with a
/// single sample stay whole in train (with a warning).
struct Split {
    std::vector<std::size_t> train;
    std::vector<std::size_t> test;
    std::vector<std::string> warnings;
};
Split split(const DatasetManifest& manifest, double train_fraction, std::uint64_t seed);

/// Extracts the feature vector of one image file end to end.
features::ArchitectureFeatures extract_file(const std::filesystem::path& image_path,
                                            bool leaf_is_dark = true);

/// The features evaluated as binary tests, with their positive class.
const std::map<std::string, std::string>& binary_positive_values();

/// Phase-1 evaluation: runs the extractor on every manifest entry carrying a
/// ground-truth label for the named features and tabulates rate-based
/// metrics. Pipeline failures count as negative predictions.
EvalReport evaluate_features(const DatasetManifest& manifest,
                             const std::vector<std::string>& feature_names,
                             bool leaf_is_dark = true);

/// Phase-2 evaluation: stratified split, Naive Bayes fit on train, top-1 and
/// top-3 accuracy on test.
EvalReport evaluate_species(const DatasetManifest& manifest, double train_fraction,
                            std::uint64_t seed, double alpha, std::size_t k,
                            bool leaf_is_dark = true);

}  // namespace leafarch::harness
