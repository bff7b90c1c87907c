#pragma once

#include <cstdint>
#include <string>

#include "leafarch/features.hpp"
#include "leafarch/raster.hpp"

namespace leafarch::synth {

/// Parameters of one synthetic leaf silhouette. Parameter ranges are
/// restricted so every generated image has an unambiguous ground truth;
/// validate() rejects combinations that would sit on a class boundary.
struct LeafSpec {
    std::string name = "leaf";
    int image_width = 512;

    double ratio = 2.0;    ///< lamina length : max width
    double widest = 0.5;   ///< widest-point height fraction, measured from the base
    bool oblong = false;   ///< parallel mid-section margins

    int lobes = 0;           ///< palmate star lobes (0 or >= 4)
    double lobe_depth = 0.0; ///< radial sinus depth fraction (lobed: 0.32..0.6, waves: <= 0.10)

    int teeth = 0;          ///< margin teeth count (0 or >= 24)
    double tooth_amp = 0.0; ///< tooth amplitude as a fraction of lamina length

    enum class Apex { Dome, Wedge, DripTip, Notch };
    Apex apex = Apex::Dome;
    double apex_angle_deg = 60.0;  ///< wedge opening angle
    double notch_depth = 0.12;     ///< apical notch depth fraction of L

    enum class Base { Dome, Wedge, Cordate };
    Base base = Base::Dome;
    double base_angle_deg = 60.0;
    double cordate_depth = 0.16;  ///< basal notch depth fraction of L

    double stem_width = 0.02;  ///< fraction of image width
    double stem_len = 0.14;    ///< fraction of L
    double asymmetry = 1.0;    ///< left-half width scale (1 = symmetric)
    double rotation_deg = 0.0;
    double noise = 0.0;  ///< salt/pepper fraction of pixels
    int leaflets = 0;    ///< > 0 renders a compound leaf with this many leaflets

    double jitter = 0.0;  ///< 0..1 strength of seeded, class-preserving jitter

    void validate() const;  ///< throws BadSpec
};

struct SyntheticLeaf {
    raster::GrayImage image;
    features::ArchitectureFeatures truth;
};

/// Renders a leaf silhouette with known ground truth. Deterministic: the
/// same spec and seed give identical image bytes.
SyntheticLeaf generate(const LeafSpec& spec, std::uint64_t seed);

/// JSON (de)serialization of a spec list, schema-versioned:
/// {"schema":1, "variants":[{...}, ...]}. Unknown keys are rejected.
std::vector<LeafSpec> specs_from_json(const std::string& text);
std::string specs_to_json(const std::vector<LeafSpec>& specs);

}  // namespace leafarch::synth
