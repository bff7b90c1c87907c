#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "leafarch/features.hpp"

namespace leafarch::bayes {

/// Categorical Naive Bayes with uniform class priors and additive smoothing.
/// counts[c][i][v] tallies value v of feature i among species c's samples.
struct NaiveBayesModel {
    double alpha = 1.0;
    std::vector<std::string> species;                        ///< sorted class labels
    std::vector<std::string> feature_names;                  ///< sorted
    std::vector<std::vector<std::string>> feature_domains;   ///< per feature
    std::vector<std::vector<std::vector<std::int64_t>>> counts;
    std::vector<std::int64_t> totals;  ///< samples per species
};

/// A generic categorical training sample: one value per feature, in the
/// feature order handed to fit().
struct Sample {
    std::vector<std::string> values;
    std::string label;
};

/// Tabulates per-species value counts. Feature names/domains are fixed by
/// the caller; smoothing is stored, not baked into the counts.
/// Throws UnknownCategory for values outside a domain and EmptyClass when
/// there are no samples.
NaiveBayesModel fit(const std::vector<Sample>& samples,
                    const std::vector<std::string>& feature_names,
                    const std::vector<std::vector<std::string>>& feature_domains, double alpha);

/// Convenience fit over extracted leaf features with the canonical schema.
NaiveBayesModel fit(const std::vector<std::pair<features::ArchitectureFeatures, std::string>>&
                        samples,
                    double alpha);

/// Normalized per-species posterior for one query, in model species order.
/// Computed in log space; alpha = 0 reproduces raw class-conditional
/// frequencies and throws AllZeroPosterior when every class has an unseen
/// value.
std::vector<double> posterior(const NaiveBayesModel& m, const std::vector<std::string>& values);
std::vector<double> posterior(const NaiveBayesModel& m, const features::ArchitectureFeatures& x);

struct Prediction {
    std::vector<std::pair<std::string, double>> ranked;  ///< (species, posterior), descending
};

/// Top-k species by posterior; ties rank by species order in the model.
Prediction classify_topk(const NaiveBayesModel& m, const std::vector<std::string>& values,
                         std::size_t k);
Prediction classify_topk(const NaiveBayesModel& m, const features::ArchitectureFeatures& x,
                         std::size_t k);

/// JSON round-trip, keys sorted for reproducible bytes.
std::string save(const NaiveBayesModel& m);
NaiveBayesModel load(const std::string& bytes);

}  // namespace leafarch::bayes
