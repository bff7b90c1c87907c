#pragma once

#include <string>
#include <vector>

#include "leafarch/geometry.hpp"
#include "leafarch/pipeline.hpp"
#include "leafarch/raster.hpp"

namespace leafarch::features {

enum class Organization { Simple, Compound };
enum class LaminarShape { Elliptic, Obovate, Ovate, Oblong, Linear, NotApplicable };
enum class LwClass { LessThan1, OneToTwo, TwoToThree, ThreeToTen, TenPlus, NotApplicable };
enum class MedialSymmetry { Symmetrical, Asymmetrical, NotApplicable };
enum class Lobation { Unlobed, Lobed, NotApplicable };
enum class LobeCount { Zero, Two, Three, Four, Five, Six, SevenPlus, NotApplicable };
enum class Margin { Toothed, Untoothed, NotApplicable };
enum class AngleClass { Acute, Obtuse, Reflex, NotApplicable };
enum class ApexShape { Straight, Convex, Acuminate, Extended, NotApplicable };
enum class BaseShape { Straight, Concave, Convex, Cordate, Lobate, NotApplicable };

/// The discrete architecture characters of one leaf. Compound leaves carry
/// NotApplicable in every lamina-derived field.
struct ArchitectureFeatures {
    Organization organization = Organization::Simple;
    LaminarShape laminar_shape = LaminarShape::NotApplicable;
    LwClass lw_class = LwClass::NotApplicable;  ///< derived diagnostic, not a classifier input
    MedialSymmetry medial_symmetry = MedialSymmetry::NotApplicable;
    Lobation lobation = Lobation::NotApplicable;
    LobeCount lobe_count = LobeCount::NotApplicable;
    Margin margin = Margin::NotApplicable;
    AngleClass apex_angle = AngleClass::NotApplicable;
    ApexShape apex_shape = ApexShape::NotApplicable;
    AngleClass base_angle = AngleClass::NotApplicable;
    BaseShape base_shape = BaseShape::NotApplicable;

    bool operator==(const ArchitectureFeatures&) const = default;
};

// string names (lowercase snake_case) for serialization and the classifier
std::string to_string(Organization v);
std::string to_string(LaminarShape v);
std::string to_string(LwClass v);
std::string to_string(MedialSymmetry v);
std::string to_string(Lobation v);
std::string to_string(LobeCount v);
std::string to_string(Margin v);
std::string to_string(AngleClass v);
std::string to_string(ApexShape v);
std::string to_string(BaseShape v);

/// Flat JSON object, schema-versioned; inverse of features_from_json.
std::string to_json(const ArchitectureFeatures& f);
ArchitectureFeatures features_from_json(const std::string& text);

std::string csv_header();
std::string to_csv_row(const ArchitectureFeatures& f);

/// The ten classifier features in canonical order (lw_class excluded).
const std::vector<std::string>& classifier_feature_names();
/// Value domains per classifier feature, NotApplicable included.
const std::vector<std::vector<std::string>>& classifier_feature_domains();
/// Values of the ten classifier features for one leaf, in canonical order.
std::vector<std::string> classifier_values(const ArchitectureFeatures& f);

/// Decimated boundary vs its convex hull (the lobation machinery).
struct LobationAnalysis {
    geom::Polygon decimated;            ///< P_d
    geom::Polygon hull;                 ///< P_ch
    double area_diff = 0.0;             ///< (area(P_ch) - area(P_d)) / area(P_ch)
    std::size_t contact_runs = 0;       ///< k: maximal runs of P_d vertices on P_ch
    std::vector<geom::Point2> incision_points;  ///< nearest-to-centroid per incision run
    std::vector<geom::Point2> lobe_apexes;      ///< furthest-from-centroid per bound run
};

/// Erosion with a 3%-of-width disk; two or more surviving components of
/// meaningful size mean a compound leaf.
Organization classify_organization(const raster::BinaryImage& pre_opening_leaf);

/// Lamina length over maximum horizontal width. Throws DegenerateShape on
/// zero width.
double lw_ratio(const pipeline::LeafGeometry& g);

LwClass classify_lw(double ratio);

LaminarShape classify_laminar_shape(const pipeline::LeafGeometry& g);

struct SymmetryResult {
    double ratio = 0.0;
    MedialSymmetry cls = MedialSymmetry::Symmetrical;
};
/// Mean min/max width ratio of the two sides over heights 0.25L..0.75L.
SymmetryResult medial_symmetry(const pipeline::LeafGeometry& g);

LobationAnalysis analyze_lobation(const pipeline::LeafGeometry& g);

struct LobationResult {
    Lobation lobation = Lobation::Unlobed;
    int count = 0;
    LobeCount count_class = LobeCount::Zero;
};
LobationResult classify_lobation(const LobationAnalysis& a, const pipeline::LeafGeometry& g);

Margin classify_margin(const pipeline::LeafGeometry& g);

struct AngleResult {
    double degrees = 0.0;  ///< 360 recorded for reflex
    AngleClass cls = AngleClass::Acute;
};
AngleResult apex_angle(const pipeline::LeafGeometry& g);
AngleResult base_angle(const pipeline::LeafGeometry& g);

ApexShape apex_shape(const pipeline::LeafGeometry& g);
BaseShape base_shape(const pipeline::LeafGeometry& g, const LobationAnalysis& lob);

/// Runs every extractor; a compound organization short-circuits the lamina
/// features to NotApplicable. Extractor failures are rethrown with the
/// feature name attached.
ArchitectureFeatures extract_all(const pipeline::LeafGeometry& g,
                                 const raster::BinaryImage& pre_opening_leaf);

}  // namespace leafarch::features
