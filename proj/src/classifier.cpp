#include "leafarch/classifier.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <set>

#include <json.hpp>

namespace leafarch::bayes {

namespace {

std::size_t domain_index(const std::vector<std::string>& domain, const std::string& value,
                         const std::string& feature) {
    const auto it = std::find(domain.begin(), domain.end(), value);
    if (it == domain.end()) {
        throw UnknownCategory("value '" + value + "' not in domain of feature '" + feature + "'");
    }
    return static_cast<std::size_t>(it - domain.begin());
}

}  // namespace

NaiveBayesModel fit(const std::vector<Sample>& samples,
                    const std::vector<std::string>& feature_names,
                    const std::vector<std::vector<std::string>>& feature_domains, double alpha) {
    if (alpha < 0.0) throw Error("smoothing alpha must be >= 0");
    if (feature_names.size() != feature_domains.size()) {
        throw Error("feature names/domains size mismatch");
    }
    if (samples.empty()) throw EmptyClass("no training samples");

    NaiveBayesModel m;
    m.alpha = alpha;
    m.feature_names = feature_names;
    m.feature_domains = feature_domains;

    std::set<std::string> labels;
    for (const Sample& s : samples) {
        if (s.label.empty()) throw EmptyClass("empty species label");
        if (s.values.size() != feature_names.size()) {
            throw Error("sample arity does not match feature count");
        }
        labels.insert(s.label);
    }
    m.species.assign(labels.begin(), labels.end());

    m.counts.assign(m.species.size(), {});
    for (auto& per_species : m.counts) {
        per_species.resize(feature_domains.size());
        for (std::size_t i = 0; i < feature_domains.size(); ++i) {
            per_species[i].assign(feature_domains[i].size(), 0);
        }
    }
    m.totals.assign(m.species.size(), 0);

    for (const Sample& s : samples) {
        const auto c = static_cast<std::size_t>(
            std::lower_bound(m.species.begin(), m.species.end(), s.label) - m.species.begin());
        ++m.totals[c];
        for (std::size_t i = 0; i < feature_names.size(); ++i) {
            const std::size_t v = domain_index(feature_domains[i], s.values[i], feature_names[i]);
            ++m.counts[c][i][v];
        }
    }
    return m;
}

NaiveBayesModel fit(
    const std::vector<std::pair<features::ArchitectureFeatures, std::string>>& samples,
    double alpha) {
    std::vector<Sample> generic;
    generic.reserve(samples.size());
    for (const auto& [f, label] : samples) {
        generic.push_back({features::classifier_values(f), label});
    }
    return fit(generic, features::classifier_feature_names(),
               features::classifier_feature_domains(), alpha);
}

std::vector<double> posterior(const NaiveBayesModel& m, const std::vector<std::string>& values) {
    if (m.species.size() < 2) throw Error("need >= 2 species to classify");
    if (values.size() != m.feature_names.size()) {
        throw Error("query arity does not match feature count");
    }

    std::vector<std::size_t> idx(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) {
        idx[i] = domain_index(m.feature_domains[i], values[i], m.feature_names[i]);
    }

    // log score(c) = log(1/G) + sum_i log((n_c(v) + alpha) / (n_c + alpha*|D_i|))
    const double neg_inf = -std::numeric_limits<double>::infinity();
    std::vector<double> log_score(m.species.size(), -std::log(static_cast<double>(m.species.size())));
    for (std::size_t c = 0; c < m.species.size(); ++c) {
        for (std::size_t i = 0; i < values.size(); ++i) {
            const double num = static_cast<double>(m.counts[c][i][idx[i]]) + m.alpha;
            const double den = static_cast<double>(m.totals[c]) +
                               m.alpha * static_cast<double>(m.feature_domains[i].size());
            if (num == 0.0 || den == 0.0) {
                log_score[c] = neg_inf;
                break;
            }
            log_score[c] += std::log(num) - std::log(den);
        }
    }

    const double max_log = *std::max_element(log_score.begin(), log_score.end());
    if (max_log == neg_inf) {
        throw AllZeroPosterior("every species has zero posterior for this query");
    }
    std::vector<double> p(m.species.size());
    double total = 0.0;
    for (std::size_t c = 0; c < p.size(); ++c) {
        p[c] = log_score[c] == neg_inf ? 0.0 : std::exp(log_score[c] - max_log);
        total += p[c];
    }
    for (double& v : p) v /= total;
    return p;
}

std::vector<double> posterior(const NaiveBayesModel& m, const features::ArchitectureFeatures& x) {
    return posterior(m, features::classifier_values(x));
}

Prediction classify_topk(const NaiveBayesModel& m, const std::vector<std::string>& values,
                         std::size_t k) {
    if (k < 1) throw Error("k must be >= 1");
    const auto p = posterior(m, values);

    std::vector<std::size_t> order(p.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&p](std::size_t a, std::size_t b) { return p[a] > p[b]; });

    Prediction out;
    const std::size_t take = std::min(k, p.size());
    for (std::size_t i = 0; i < take; ++i) {
        out.ranked.push_back({m.species[order[i]], p[order[i]]});
    }
    return out;
}

Prediction classify_topk(const NaiveBayesModel& m, const features::ArchitectureFeatures& x,
                         std::size_t k) {
    return classify_topk(m, features::classifier_values(x), k);
}

// ---------------------------------------------------------------------------
// Serialization
// ---------------------------------------------------------------------------

std::string save(const NaiveBayesModel& m) {
    nlohmann::json j;
    j["schema"] = 1;
    j["alpha"] = m.alpha;
    j["species"] = m.species;

    nlohmann::json features = nlohmann::json::object();
    for (std::size_t i = 0; i < m.feature_names.size(); ++i) {
        nlohmann::json fj;
        fj["domain"] = m.feature_domains[i];
        nlohmann::json counts = nlohmann::json::object();
        for (std::size_t c = 0; c < m.species.size(); ++c) {
            nlohmann::json per_value = nlohmann::json::object();
            for (std::size_t v = 0; v < m.feature_domains[i].size(); ++v) {
                if (m.counts[c][i][v] != 0) per_value[m.feature_domains[i][v]] = m.counts[c][i][v];
            }
            counts[m.species[c]] = per_value;
        }
        fj["counts"] = counts;
        features[m.feature_names[i]] = fj;
    }
    j["features"] = features;

    nlohmann::json totals = nlohmann::json::object();
    for (std::size_t c = 0; c < m.species.size(); ++c) totals[m.species[c]] = m.totals[c];
    j["totals"] = totals;
    return j.dump(2);
}

NaiveBayesModel load(const std::string& bytes) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(bytes);
    } catch (const nlohmann::json::exception& e) {
        throw BadModel(std::string("model parse failed: ") + e.what());
    }

    try {
        if (!j.is_object() || j.value("schema", 0) != 1) throw BadModel("unsupported model schema");

        NaiveBayesModel m;
        m.alpha = j.at("alpha").get<double>();
        if (m.alpha < 0.0) throw BadModel("negative alpha");
        m.species = j.at("species").get<std::vector<std::string>>();
        if (!std::is_sorted(m.species.begin(), m.species.end())) {
            throw BadModel("species list must be sorted");
        }

        const auto& features = j.at("features");
        if (!features.is_object()) throw BadModel("features must be an object");
        for (auto it = features.begin(); it != features.end(); ++it) {
            m.feature_names.push_back(it.key());  // json objects iterate sorted
            m.feature_domains.push_back(it.value().at("domain").get<std::vector<std::string>>());
        }

        const auto& totals = j.at("totals");
        m.totals.assign(m.species.size(), 0);
        for (std::size_t c = 0; c < m.species.size(); ++c) {
            m.totals[c] = totals.at(m.species[c]).get<std::int64_t>();
            if (m.totals[c] < 0) throw BadModel("negative sample total");
        }

        m.counts.assign(m.species.size(), {});
        for (std::size_t c = 0; c < m.species.size(); ++c) {
            m.counts[c].resize(m.feature_names.size());
            for (std::size_t i = 0; i < m.feature_names.size(); ++i) {
                m.counts[c][i].assign(m.feature_domains[i].size(), 0);
                const auto& per_value = features.at(m.feature_names[i]).at("counts").at(m.species[c]);
                std::int64_t sum = 0;
                for (auto it = per_value.begin(); it != per_value.end(); ++it) {
                    const auto& domain = m.feature_domains[i];
                    const auto pos = std::find(domain.begin(), domain.end(), it.key());
                    if (pos == domain.end()) throw BadModel("count for value outside domain");
                    const auto v = it.value().get<std::int64_t>();
                    if (v < 0) throw BadModel("negative count");
                    m.counts[c][i][static_cast<std::size_t>(pos - domain.begin())] = v;
                    sum += v;
                }
                if (sum != m.totals[c]) throw BadModel("feature counts do not sum to totals");
            }
        }
        return m;
    } catch (const nlohmann::json::exception& e) {
        throw BadModel(std::string("malformed model: ") + e.what());
    }
}

}  // namespace leafarch::bayes
