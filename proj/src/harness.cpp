#include "leafarch/harness.hpp"

#include <algorithm>
#include <fstream>
#include <random>
#include <sstream>

#include <json.hpp>

#include "leafarch/image_io.hpp"
#include "leafarch/pipeline.hpp"

namespace leafarch::harness {

// ---------------------------------------------------------------------------
// Manifest
// ---------------------------------------------------------------------------

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::istringstream in(line);
    while (std::getline(in, field, ',')) fields.push_back(field);
    if (!line.empty() && line.back() == ',') fields.push_back("");
    return fields;
}

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r\n");
    return s.substr(begin, end - begin + 1);
}

}  // namespace

DatasetManifest load_manifest(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open manifest: " + path.string());

    DatasetManifest m;
    m.base_dir = path.parent_path();

    std::string line;
    if (!std::getline(in, line)) throw Error("empty manifest: " + path.string());
    const auto header = split_csv_line(trim(line));
    if (header.size() < 2 || header[0] != "path" || header[1] != "species") {
        throw Error("manifest header must start with `path,species`");
    }

    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        const auto fields = split_csv_line(t);
        if (fields.size() < 2) {
            throw Error("manifest line " + std::to_string(line_no) + ": need path,species");
        }
        ManifestEntry e;
        e.path = fields[0];
        e.species = fields[1];
        if (e.species.empty()) {
            throw Error("manifest line " + std::to_string(line_no) + ": empty species");
        }
        for (std::size_t i = 2; i < fields.size() && i < header.size(); ++i) {
            if (!fields[i].empty()) e.labels[header[i]] = fields[i];
        }
        m.entries.push_back(std::move(e));
    }

    std::vector<std::string> paths;
    for (const auto& e : m.entries) paths.push_back(e.path);
    std::sort(paths.begin(), paths.end());
    if (std::adjacent_find(paths.begin(), paths.end()) != paths.end()) {
        throw Error("manifest contains duplicate paths");
    }
    return m;
}

void save_manifest(const DatasetManifest& manifest, const std::filesystem::path& path) {
    // collect the union of label columns in sorted order
    std::vector<std::string> columns;
    for (const auto& e : manifest.entries) {
        for (const auto& [k, v] : e.labels) {
            if (std::find(columns.begin(), columns.end(), k) == columns.end()) {
                columns.push_back(k);
            }
        }
    }
    std::sort(columns.begin(), columns.end());

    std::ofstream out(path);
    if (!out) throw Error("cannot write manifest: " + path.string());
    out << "path,species";
    for (const auto& c : columns) out << "," << c;
    out << "\n";
    for (const auto& e : manifest.entries) {
        out << e.path << "," << e.species;
        for (const auto& c : columns) {
            const auto it = e.labels.find(c);
            out << "," << (it == e.labels.end() ? "" : it->second);
        }
        out << "\n";
    }
}

// ---------------------------------------------------------------------------
// Metrics and reports
// ---------------------------------------------------------------------------

Metrics metrics(double tp, double fp, double tn, double fn) {
    (void)tn;
    Metrics m;
    m.precision = (tp + fp) > 0.0 ? tp / (tp + fp) : 0.0;
    m.recall = (tp + fn) > 0.0 ? tp / (tp + fn) : 0.0;
    m.f1 = (m.precision + m.recall) > 0.0
               ? 2.0 * m.precision * m.recall / (m.precision + m.recall)
               : 0.0;
    return m;
}

namespace {

nlohmann::json feature_metrics_to_json(const FeatureMetrics& f) {
    nlohmann::json j;
    j["pim"] = f.pim;
    j["nim"] = f.nim;
    j["tp_count"] = f.tp_count;
    j["fp_count"] = f.fp_count;
    j["tn_count"] = f.tn_count;
    j["fn_count"] = f.fn_count;
    j["tp"] = f.tp;
    j["fp"] = f.fp;
    j["tn"] = f.tn;
    j["fn"] = f.fn;
    j["precision"] = f.precision;
    j["recall"] = f.recall;
    j["f1"] = f.f1;
    return j;
}

FeatureMetrics feature_metrics_from_json(const nlohmann::json& j) {
    FeatureMetrics f;
    f.pim = j.at("pim").get<std::int64_t>();
    f.nim = j.at("nim").get<std::int64_t>();
    f.tp_count = j.at("tp_count").get<std::int64_t>();
    f.fp_count = j.at("fp_count").get<std::int64_t>();
    f.tn_count = j.at("tn_count").get<std::int64_t>();
    f.fn_count = j.at("fn_count").get<std::int64_t>();
    f.tp = j.at("tp").get<double>();
    f.fp = j.at("fp").get<double>();
    f.tn = j.at("tn").get<double>();
    f.fn = j.at("fn").get<double>();
    f.precision = j.at("precision").get<double>();
    f.recall = j.at("recall").get<double>();
    f.f1 = j.at("f1").get<double>();
    return f;
}

FeatureMetrics tabulate(std::int64_t tp, std::int64_t fp, std::int64_t tn, std::int64_t fn) {
    FeatureMetrics f;
    f.pim = tp + fn;
    f.nim = tn + fp;
    f.tp_count = tp;
    f.fp_count = fp;
    f.tn_count = tn;
    f.fn_count = fn;
    f.tp = f.pim > 0 ? static_cast<double>(tp) / static_cast<double>(f.pim) : 0.0;
    f.fn = f.pim > 0 ? static_cast<double>(fn) / static_cast<double>(f.pim) : 0.0;
    f.tn = f.nim > 0 ? static_cast<double>(tn) / static_cast<double>(f.nim) : 0.0;
    f.fp = f.nim > 0 ? static_cast<double>(fp) / static_cast<double>(f.nim) : 0.0;
    const Metrics m = metrics(f.tp, f.fp, f.tn, f.fn);
    f.precision = m.precision;
    f.recall = m.recall;
    f.f1 = m.f1;
    return f;
}

}  // namespace

std::string report_to_json(const EvalReport& r) {
    nlohmann::json j;
    j["schema"] = 1;
    nlohmann::json features = nlohmann::json::object();
    for (const auto& [name, fm] : r.per_feature) features[name] = feature_metrics_to_json(fm);
    j["features"] = features;
    nlohmann::json species;
    species["top1_accuracy"] = r.top1_accuracy;
    species["top3_accuracy"] = r.top3_accuracy;
    species["n_train"] = r.n_train;
    species["n_test"] = r.n_test;
    nlohmann::json confusion = nlohmann::json::object();
    for (const auto& [truth, row] : r.confusion) {
        nlohmann::json jrow = nlohmann::json::object();
        for (const auto& [pred, n] : row) jrow[pred] = n;
        confusion[truth] = jrow;
    }
    species["confusion"] = confusion;
    j["species"] = species;
    j["seed"] = r.seed;
    j["warnings"] = r.warnings;
    return j.dump(2);
}

EvalReport report_from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw Error(std::string("bad report JSON: ") + e.what());
    }
    try {
        if (j.value("schema", 0) != 1) throw Error("unsupported report schema");
        EvalReport r;
        for (auto it = j.at("features").begin(); it != j.at("features").end(); ++it) {
            r.per_feature[it.key()] = feature_metrics_from_json(it.value());
        }
        const auto& sp = j.at("species");
        r.top1_accuracy = sp.at("top1_accuracy").get<double>();
        r.top3_accuracy = sp.at("top3_accuracy").get<double>();
        r.n_train = sp.at("n_train").get<std::int64_t>();
        r.n_test = sp.at("n_test").get<std::int64_t>();
        for (auto it = sp.at("confusion").begin(); it != sp.at("confusion").end(); ++it) {
            for (auto jt = it.value().begin(); jt != it.value().end(); ++jt) {
                r.confusion[it.key()][jt.key()] = jt.value().get<std::int64_t>();
            }
        }
        r.seed = j.at("seed").get<std::uint64_t>();
        r.warnings = j.at("warnings").get<std::vector<std::string>>();
        return r;
    } catch (const nlohmann::json::exception& e) {
        throw Error(std::string("malformed report: ") + e.what());
    }
}

// ---------------------------------------------------------------------------
// Split
// ---------------------------------------------------------------------------

Split split(const DatasetManifest& manifest, double train_fraction, std::uint64_t seed) {
    if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
        throw Error("train fraction must be in (0, 1)");
    }

    std::map<std::string, std::vector<std::size_t>> by_species;
    for (std::size_t i = 0; i < manifest.entries.size(); ++i) {
        by_species[manifest.entries[i].species].push_back(i);
    }

    Split s;
    std::mt19937_64 rng(seed);
    for (auto& [species, indices] : by_species) {
        if (indices.size() < 2) {
            s.warnings.push_back("species '" + species + "' has < 2 samples; kept whole in train");
            s.train.insert(s.train.end(), indices.begin(), indices.end());
            continue;
        }
        std::shuffle(indices.begin(), indices.end(), rng);
        auto n_train = static_cast<std::size_t>(
            std::llround(train_fraction * static_cast<double>(indices.size())));
        n_train = std::clamp<std::size_t>(n_train, 1, indices.size() - 1);
        s.train.insert(s.train.end(), indices.begin(), indices.begin() + static_cast<std::ptrdiff_t>(n_train));
        s.test.insert(s.test.end(), indices.begin() + static_cast<std::ptrdiff_t>(n_train), indices.end());
    }
    std::sort(s.train.begin(), s.train.end());
    std::sort(s.test.begin(), s.test.end());
    return s;
}

// ---------------------------------------------------------------------------
// Evaluation
// ---------------------------------------------------------------------------

features::ArchitectureFeatures extract_file(const std::filesystem::path& image_path,
                                            bool leaf_is_dark) {
    const io::RasterData image = io::read_image(image_path);
    const raster::BinaryImage segmented = pipeline::segment(image, leaf_is_dark);

    // compound leaves never reach the lamina pipeline
    if (features::classify_organization(segmented) == features::Organization::Compound) {
        features::ArchitectureFeatures f;
        f.organization = features::Organization::Compound;
        return f;
    }

    auto removal = pipeline::remove_petiole(segmented);
    const bool reflex_base = pipeline::detect_basal_extension(removal.lamina, removal.info);
    const auto apex = pipeline::detect_apex(removal.lamina, removal.info);
    const auto geometry = pipeline::build_geometry(removal.lamina, apex.apex, removal.info,
                                                   apex.reflex, reflex_base, image.width);
    return features::extract_all(geometry, segmented);
}

const std::map<std::string, std::string>& binary_positive_values() {
    static const std::map<std::string, std::string> positives = {
        {"organization", "compound"},
        {"lobation", "lobed"},
        {"margin", "toothed"},
        {"apex_angle", "reflex"},
        {"base_angle", "reflex"}};
    return positives;
}

namespace {

std::string predicted_value(const features::ArchitectureFeatures& f, const std::string& feature) {
    using features::to_string;
    if (feature == "organization") return to_string(f.organization);
    if (feature == "laminar_shape") return to_string(f.laminar_shape);
    if (feature == "medial_symmetry") return to_string(f.medial_symmetry);
    if (feature == "lobation") return to_string(f.lobation);
    if (feature == "lobe_count") return to_string(f.lobe_count);
    if (feature == "margin") return to_string(f.margin);
    if (feature == "apex_angle") return to_string(f.apex_angle);
    if (feature == "apex_shape") return to_string(f.apex_shape);
    if (feature == "base_angle") return to_string(f.base_angle);
    if (feature == "base_shape") return to_string(f.base_shape);
    throw Error("unknown feature name: " + feature);
}

}  // namespace

EvalReport evaluate_features(const DatasetManifest& manifest,
                             const std::vector<std::string>& feature_names, bool leaf_is_dark) {
    EvalReport report;
    struct Tally {
        std::int64_t tp = 0, fp = 0, tn = 0, fn = 0;
    };
    std::map<std::string, Tally> tallies;

    for (const auto& entry : manifest.entries) {
        bool relevant = false;
        for (const auto& name : feature_names) {
            if (entry.labels.count(name)) relevant = true;
        }
        if (!relevant) continue;

        std::optional<features::ArchitectureFeatures> extracted;
        try {
            extracted = extract_file(manifest.base_dir / entry.path, leaf_is_dark);
        } catch (const Error& e) {
            report.warnings.push_back(entry.path + ": " + e.what());
        }

        for (const auto& name : feature_names) {
            const auto it = entry.labels.find(name);
            if (it == entry.labels.end()) continue;
            const std::string& positive = binary_positive_values().at(name);
            const bool truth_positive = it->second == positive;
            // failed pipelines predict negative
            const bool predicted_positive =
                extracted.has_value() && predicted_value(*extracted, name) == positive;

            Tally& t = tallies[name];
            if (truth_positive && predicted_positive) ++t.tp;
            else if (truth_positive) ++t.fn;
            else if (predicted_positive) ++t.fp;
            else ++t.tn;
        }
    }

    for (const auto& [name, t] : tallies) {
        report.per_feature[name] = tabulate(t.tp, t.fp, t.tn, t.fn);
    }
    return report;
}

EvalReport evaluate_species(const DatasetManifest& manifest, double train_fraction,
                            std::uint64_t seed, double alpha, std::size_t k,
                            bool leaf_is_dark) {
    EvalReport report;
    report.seed = seed;

    const Split s = split(manifest, train_fraction, seed);
    report.warnings = s.warnings;
    report.n_train = static_cast<std::int64_t>(s.train.size());
    report.n_test = static_cast<std::int64_t>(s.test.size());

    // extract every referenced image once
    std::map<std::size_t, features::ArchitectureFeatures> extracted;
    for (const auto& group : {s.train, s.test}) {
        for (std::size_t idx : group) {
            const auto& entry = manifest.entries[idx];
            try {
                extracted[idx] = extract_file(manifest.base_dir / entry.path, leaf_is_dark);
            } catch (const Error& e) {
                report.warnings.push_back(entry.path + ": " + e.what());
            }
        }
    }

    std::vector<std::pair<features::ArchitectureFeatures, std::string>> train;
    for (std::size_t idx : s.train) {
        const auto it = extracted.find(idx);
        if (it != extracted.end()) train.push_back({it->second, manifest.entries[idx].species});
    }
    if (train.empty()) throw EmptyClass("no usable training samples");
    const auto model = bayes::fit(train, alpha);

    std::int64_t top1 = 0, top3 = 0, evaluated = 0;
    for (std::size_t idx : s.test) {
        const auto it = extracted.find(idx);
        if (it == extracted.end()) {
            ++evaluated;  // a failed image cannot be recognized
            continue;
        }
        const std::string& truth = manifest.entries[idx].species;
        ++evaluated;
        bayes::Prediction pred;
        try {
            pred = bayes::classify_topk(model, it->second, std::max<std::size_t>(k, 3));
        } catch (const AllZeroPosterior&) {
            continue;
        }
        if (!pred.ranked.empty()) {
            ++report.confusion[truth][pred.ranked[0].first];
            if (pred.ranked[0].first == truth) ++top1;
        }
        for (std::size_t i = 0; i < std::min<std::size_t>(3, pred.ranked.size()); ++i) {
            if (pred.ranked[i].first == truth) {
                ++top3;
                break;
            }
        }
    }
    report.top1_accuracy = evaluated > 0 ? static_cast<double>(top1) / evaluated : 0.0;
    report.top3_accuracy = evaluated > 0 ? static_cast<double>(top3) / evaluated : 0.0;
    return report;
}

}  // namespace leafarch::harness
