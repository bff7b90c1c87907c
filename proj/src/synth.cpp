#include "leafarch/synth.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <random>

#include <json.hpp>

namespace leafarch::synth {

using features::ArchitectureFeatures;
using geom::Point2;

namespace {

constexpr double kPi = std::numbers::pi;
constexpr std::uint8_t kLeafGray = 35;
constexpr std::uint8_t kBackgroundGray = 235;

double smooth01(double t) {
    t = std::clamp(t, 0.0, 1.0);
    return t * t * (3.0 - 2.0 * t);
}

// ---------------------------------------------------------------------------
// Outline construction (unit space: base at y=0, apex at y=1)
// ---------------------------------------------------------------------------

// Half-width profile of an unlobed leaf at height u in [0, 1].
struct Profile {
    double half_width;   // W/2 in unit-L terms
    double widest;       // peak position
    bool oblong;
    LeafSpec::Apex apex;
    double apex_half_tan;  // tan(apex wedge half-angle)
    LeafSpec::Base base;
    double base_half_tan;

    static constexpr double kDripZone = 0.70;  // drip-tip override starts here

    double body(double u) const {
        if (oblong) {
            // trapezoid with a flat mid-section, soft ramps at both ends
            const double ramp = 0.24;
            return smooth01(std::min(u, 1.0 - u) / ramp);
        }
        // beta bump u^p (1-u)^q: peak sits exactly at p/(p+q) = widest
        const double q = 0.55;
        const double p = q * widest / (1.0 - widest);
        const double peak = std::pow(widest, p) * std::pow(1.0 - widest, q);
        return std::pow(u, p) * std::pow(1.0 - u, q) / peak;
    }

    double styled(double u) const {
        double w = body(u) * half_width;
        if (apex == LeafSpec::Apex::Wedge) {
            w = std::min(w, (1.0 - u) * apex_half_tan);
        }
        if (base == LeafSpec::Base::Wedge) {
            w = std::min(w, u * base_half_tan);
        }
        return std::max(0.0, w);
    }

    double operator()(double u) const {
        u = std::clamp(u, 0.0, 1.0);
        if (apex == LeafSpec::Apex::DripTip && u > kDripZone) {
            // cubic taper: a pronounced concave shoulder drawn into a thin tip
            const double t = (1.0 - u) / (1.0 - kDripZone);
            return styled(kDripZone) * t * t * t;
        }
        return styled(u);
    }
};

std::vector<Point2> profile_outline(const Profile& prof, int samples) {
    // left margin base -> apex, then right margin apex -> base
    std::vector<Point2> pts;
    pts.reserve(2 * samples);
    for (int i = 0; i <= samples; ++i) {
        const double u = static_cast<double>(i) / samples;
        pts.push_back({-prof(u), u});
    }
    for (int i = samples - 1; i > 0; --i) {
        const double u = static_cast<double>(i) / samples;
        pts.push_back({prof(u), u});
    }
    return pts;
}

// Palmate star around (0, 0.5) with one sinus centered at the bottom.
std::vector<Point2> star_outline(double half_width, int lobes, double depth, int samples) {
    const double ax = half_width;
    const double ay = 0.5;
    std::vector<Point2> pts;
    pts.reserve(samples);
    for (int i = 0; i < samples; ++i) {
        const double theta = -kPi / 2.0 + 2.0 * kPi * i / samples;
        const double re =
            ax * ay / std::hypot(ay * std::cos(theta), ax * std::sin(theta));
        const double factor = 1.0 - depth * (0.5 + 0.5 * std::cos(lobes * (theta + kPi / 2.0)));
        const double r = re * factor;
        pts.push_back({r * std::cos(theta), 0.5 + r * std::sin(theta)});
    }
    return pts;
}

// Margin teeth: normal displacement by a sine of arc length, feathered out
// near the apex and the base so the tip geometry stays clean.
void apply_teeth(std::vector<Point2>& pts, int teeth, double amp) {
    if (teeth <= 0 || amp <= 0.0) return;
    const std::size_t n = pts.size();

    std::vector<double> arc(n + 1, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        arc[i + 1] = arc[i] + geom::distance(pts[i], pts[(i + 1) % n]);
    }
    const double total = arc[n];

    double cx = 0.0, cy = 0.0;
    for (const Point2& p : pts) {
        cx += p.x;
        cy += p.y;
    }
    cx /= static_cast<double>(n);
    cy /= static_cast<double>(n);

    double y_min = pts[0].y, y_max = pts[0].y;
    for (const Point2& p : pts) {
        y_min = std::min(y_min, p.y);
        y_max = std::max(y_max, p.y);
    }

    std::vector<Point2> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        const Point2& prev = pts[(i + n - 1) % n];
        const Point2& next = pts[(i + 1) % n];
        Point2 tangent = next - prev;
        const double len = geom::norm(tangent);
        if (len == 0.0) {
            out[i] = pts[i];
            continue;
        }
        Point2 normal{tangent.y / len, -tangent.x / len};
        if (normal.x * (pts[i].x - cx) + normal.y * (pts[i].y - cy) < 0.0) {
            normal = {-normal.x, -normal.y};
        }
        // fade teeth near the vertical extremes
        const double rel = (pts[i].y - y_min) / (y_max - y_min);
        const double fade = smooth01(rel / 0.06) * smooth01((1.0 - rel) / 0.06);
        const double wave = std::sin(2.0 * kPi * teeth * arc[i] / total);
        const double d = amp * fade * wave;
        out[i] = {pts[i].x + normal.x * d, pts[i].y + normal.y * d};
    }
    pts = std::move(out);
}

// Replaces the outline portion around an extreme with a V-notch flanked by
// two horns (apex) or bulges (base).
void splice_notch(std::vector<Point2>& pts, bool at_top, double depth, double horn_x) {
    double y_min = pts[0].y, y_max = pts[0].y;
    for (const Point2& p : pts) {
        y_min = std::min(y_min, p.y);
        y_max = std::max(y_max, p.y);
    }
    const double extreme = at_top ? y_max : y_min;
    const double notch_y = at_top ? extreme - depth : extreme + depth;

    const auto in_wedge = [&](const Point2& p) {
        if (std::abs(p.x) >= horn_x) return false;
        return at_top ? p.y > extreme - 1.75 * depth : p.y < extreme + 1.75 * depth;
    };

    // rotate so the replaced region is contiguous (start at the vertex
    // farthest from the target extreme)
    std::size_t start = 0;
    for (std::size_t i = 1; i < pts.size(); ++i) {
        if (std::abs(pts[i].y - extreme) > std::abs(pts[start].y - extreme)) start = i;
    }
    std::rotate(pts.begin(), pts.begin() + static_cast<std::ptrdiff_t>(start), pts.end());

    std::vector<Point2> kept;
    kept.reserve(pts.size() + 4);
    bool inserted = false;
    for (const Point2& p : pts) {
        if (!in_wedge(p)) {
            kept.push_back(p);
            continue;
        }
        if (!inserted) {
            // enter the notch from whichever margin the walk reaches first
            const double side = kept.empty() || kept.back().x < 0.0 ? -1.0 : 1.0;
            kept.push_back({side * horn_x * 0.55, extreme});
            kept.push_back({0.0, notch_y});
            kept.push_back({-side * horn_x * 0.55, extreme});
            inserted = true;
        }
    }
    pts = std::move(kept);
}

struct Transform {
    double scale = 1.0;
    double cos_r = 1.0, sin_r = 0.0;
    double dx = 0.0, dy = 0.0;  // applied after rotation+scale, pixel space

    Point2 operator()(const Point2& p) const {
        const double x = p.x * cos_r - p.y * sin_r;
        const double y = p.x * sin_r + p.y * cos_r;
        // Cartesian y-up -> image y-down happens via the sign of dy handling
        return {x * scale + dx, -y * scale + dy};
    }
};

// Even-odd scanline fill of one polygon into the mask.
void fill_polygon(raster::BinaryImage& mask, const std::vector<Point2>& poly) {
    double min_y = poly[0].y, max_y = poly[0].y;
    for (const Point2& p : poly) {
        min_y = std::min(min_y, p.y);
        max_y = std::max(max_y, p.y);
    }
    const int y0 = std::max(0, static_cast<int>(std::floor(min_y)));
    const int y1 = std::min(mask.height - 1, static_cast<int>(std::ceil(max_y)));

    std::vector<double> xs;
    for (int y = y0; y <= y1; ++y) {
        const double yc = y + 0.5;
        xs.clear();
        const std::size_t n = poly.size();
        for (std::size_t i = 0; i < n; ++i) {
            const Point2& a = poly[i];
            const Point2& b = poly[(i + 1) % n];
            if ((a.y <= yc) == (b.y <= yc)) continue;
            xs.push_back(a.x + (yc - a.y) * (b.x - a.x) / (b.y - a.y));
        }
        std::sort(xs.begin(), xs.end());
        for (std::size_t k = 0; k + 1 < xs.size(); k += 2) {
            const int x_start = std::max(0, static_cast<int>(std::ceil(xs[k] - 0.5)));
            const int x_end = std::min(mask.width - 1, static_cast<int>(std::floor(xs[k + 1] - 0.5)));
            for (int x = x_start; x <= x_end; ++x) mask.set(x, y, true);
        }
    }
}

double jittered(std::mt19937_64& rng, double value, double span, double strength) {
    if (strength <= 0.0) return value;
    std::uniform_real_distribution<double> d(-1.0, 1.0);
    return value + d(rng) * span * strength;
}

}  // namespace

void LeafSpec::validate() const {
    if (image_width < 64) throw BadSpec("image width too small");
    if (leaflets < 0 || leaflets == 1) throw BadSpec("leaflets must be 0 or >= 2");
    if (leaflets > 0) return;  // compound: lamina parameters unused

    if (ratio < 0.3 || ratio > 30.0) throw BadSpec("ratio out of range");
    if (widest < 0.2 || widest > 0.8) throw BadSpec("widest position out of range");
    if (!oblong && ratio < 10.0 && widest > 0.38 && widest < 0.42) {
        throw BadSpec("widest position on the ovate/elliptic boundary");
    }
    if (!oblong && ratio < 10.0 && widest > 0.58 && widest < 0.62) {
        throw BadSpec("widest position on the elliptic/obovate boundary");
    }
    if (lobes != 0) {
        // odd counts keep a lobe (not a sinus) on the midvein at the top
        if (lobes != 5 && lobes != 7 && lobes != 9) {
            throw BadSpec("lobed leaves need 5, 7 or 9 lobes");
        }
        if (lobe_depth < 0.36 || lobe_depth > 0.55) {
            throw BadSpec("lobe depth outside the unambiguous range");
        }
        if (ratio > 1.4) throw BadSpec("lobed leaves must be round (ratio <= 1.4)");
        if (apex != Apex::Dome || base != Base::Dome) {
            throw BadSpec("lobed leaves use dome apex/base");
        }
    } else if (lobe_depth > 0.10) {
        throw BadSpec("wave depth above 10% is ambiguous for an unlobed leaf");
    }
    if (ratio >= 10.0 && lobes != 0) throw BadSpec("lobes on a linear blade");
    if (teeth != 0) {
        if (teeth < 36 || teeth > 100) throw BadSpec("teeth count out of range");
        if (tooth_amp < 0.012 || tooth_amp > 0.022) throw BadSpec("tooth amplitude out of range");
        // enough sawtooth steepness that the margin sheds > 10% perimeter
        if (tooth_amp * teeth < 0.7) throw BadSpec("teeth too flat to read as toothed");
    } else if (tooth_amp > 0.0) {
        throw BadSpec("tooth amplitude without teeth");
    }
    if (apex == Apex::Wedge) {
        if (apex_angle_deg > 80.0 && apex_angle_deg < 100.0) {
            throw BadSpec("apex wedge angle on the acute/obtuse boundary");
        }
        if (apex_angle_deg < 25.0 || apex_angle_deg > 160.0) {
            throw BadSpec("apex wedge angle out of range");
        }
        // the wedge cone must clear the widest point or it reshapes the body
        const double tan_half = std::tan(apex_angle_deg * std::numbers::pi / 360.0);
        if ((1.0 - widest) * tan_half < 1.15 * 0.5 / ratio) {
            throw BadSpec("apex wedge too narrow for this ratio");
        }
    }
    if (base == Base::Wedge) {
        if (base_angle_deg > 80.0 && base_angle_deg < 100.0) {
            throw BadSpec("base wedge angle on the acute/obtuse boundary");
        }
        if (base_angle_deg < 25.0 || base_angle_deg > 160.0) {
            throw BadSpec("base wedge angle out of range");
        }
        const double tan_half = std::tan(base_angle_deg * std::numbers::pi / 360.0);
        if (widest * tan_half < 1.15 * 0.5 / ratio) {
            throw BadSpec("base wedge too narrow for this ratio");
        }
    }
    if (oblong && (ratio < 2.6 || ratio > 8.0)) {
        throw BadSpec("oblong leaves need ratio in [2.6, 8]");
    }
    // the notch must clear the detector's tooth-rejection prominence floor
    if (apex == Apex::Notch && (notch_depth < 0.09 || notch_depth > 0.2)) {
        throw BadSpec("apex notch depth out of range");
    }
    if (base == Base::Cordate && (cordate_depth < 0.08 || cordate_depth > 0.24)) {
        throw BadSpec("cordate depth out of range");
    }
    if (base == Base::Cordate && ratio < 1.5) throw BadSpec("cordate leaves need ratio >= 1.5");
    if (asymmetry > 0.85 && asymmetry < 0.945 && asymmetry != 1.0) {
        throw BadSpec("asymmetry factor on the class boundary");
    }
    if (asymmetry < 0.5 || asymmetry > 1.0) throw BadSpec("asymmetry out of range");
    if (stem_width < 0.008 || stem_width > 0.025) throw BadSpec("stem width out of range");
    if (noise < 0.0 || noise > 0.05) throw BadSpec("noise fraction out of range");
}

namespace {

ArchitectureFeatures ground_truth(const LeafSpec& s) {
    using namespace features;
    ArchitectureFeatures t;
    if (s.leaflets > 0) {
        t.organization = Organization::Compound;
        return t;
    }
    t.organization = Organization::Simple;

    if (s.ratio >= 10.0) t.laminar_shape = LaminarShape::Linear;
    else if (s.oblong) t.laminar_shape = LaminarShape::Oblong;
    else if (s.lobes != 0) t.laminar_shape = LaminarShape::Elliptic;
    else if (s.widest <= 0.4) t.laminar_shape = LaminarShape::Ovate;
    else if (s.widest >= 0.6) t.laminar_shape = LaminarShape::Obovate;
    else t.laminar_shape = LaminarShape::Elliptic;

    t.lw_class = classify_lw(s.ratio);
    t.medial_symmetry =
        s.asymmetry >= 0.945 ? MedialSymmetry::Symmetrical : MedialSymmetry::Asymmetrical;

    if (s.lobes != 0) {
        t.lobation = Lobation::Lobed;
        switch (s.lobes) {
            case 4: t.lobe_count = LobeCount::Four; break;
            case 5: t.lobe_count = LobeCount::Five; break;
            case 6: t.lobe_count = LobeCount::Six; break;
            default: t.lobe_count = LobeCount::SevenPlus; break;
        }
    } else {
        t.lobation = Lobation::Unlobed;
        t.lobe_count = LobeCount::Zero;
    }

    t.margin = s.teeth > 0 ? Margin::Toothed : Margin::Untoothed;

    if (s.apex == LeafSpec::Apex::Notch) {
        t.apex_angle = AngleClass::Reflex;
        t.apex_shape = ApexShape::Extended;
    } else if (s.lobes != 0) {
        // only the narrow terminal lobe sits in the apex band
        t.apex_angle = AngleClass::Acute;
        t.apex_shape = ApexShape::Straight;
    } else {
        if (s.apex == LeafSpec::Apex::Wedge) {
            t.apex_angle = s.apex_angle_deg < 90.0 ? AngleClass::Acute : AngleClass::Obtuse;
        } else {
            // narrow leaves taper steeply into the apex band
            t.apex_angle = s.ratio >= 1.35 ? AngleClass::Acute : AngleClass::Obtuse;
        }
        t.apex_shape = s.apex == LeafSpec::Apex::DripTip ? ApexShape::Acuminate
                       : s.apex == LeafSpec::Apex::Wedge ? ApexShape::Straight
                                                         : ApexShape::Convex;
    }

    const bool reflex_base = s.base == LeafSpec::Base::Cordate || s.lobes != 0;
    if (reflex_base) {
        t.base_angle = AngleClass::Reflex;
        t.base_shape = s.lobes != 0 ? BaseShape::Lobate : BaseShape::Cordate;
    } else {
        if (s.base == LeafSpec::Base::Wedge) {
            t.base_angle = s.base_angle_deg < 90.0 ? AngleClass::Acute : AngleClass::Obtuse;
            t.base_shape = BaseShape::Straight;
        } else {
            t.base_angle = s.ratio >= 1.35 ? AngleClass::Acute : AngleClass::Obtuse;
            t.base_shape = BaseShape::Convex;
        }
    }
    return t;
}

LeafSpec apply_jitter(const LeafSpec& spec, std::mt19937_64& rng) {
    LeafSpec s = spec;
    if (spec.jitter <= 0.0) return s;
    const double j = spec.jitter;
    s.ratio = jittered(rng, s.ratio, 0.06 * s.ratio, j);
    if (!s.oblong && s.lobes == 0) {
        const double span = (s.widest <= 0.4 || s.widest >= 0.6) ? 0.015 : 0.03;
        s.widest = jittered(rng, s.widest, span, j);
    }
    if (s.lobes != 0) s.lobe_depth = jittered(rng, s.lobe_depth, 0.03, j);
    if (s.teeth != 0) s.tooth_amp = jittered(rng, s.tooth_amp, 0.15 * s.tooth_amp, j);
    if (s.apex == LeafSpec::Apex::Wedge) {
        s.apex_angle_deg = jittered(rng, s.apex_angle_deg, 6.0, j);
    }
    if (s.base == LeafSpec::Base::Wedge) {
        s.base_angle_deg = jittered(rng, s.base_angle_deg, 6.0, j);
    }
    if (s.apex == LeafSpec::Apex::Notch) s.notch_depth = jittered(rng, s.notch_depth, 0.02, j);
    if (s.base == LeafSpec::Base::Cordate) {
        s.cordate_depth = jittered(rng, s.cordate_depth, 0.02, j);
    }
    s.stem_len = jittered(rng, s.stem_len, 0.02, j);
    s.rotation_deg = jittered(rng, s.rotation_deg, 10.0, j);
    return s;
}

std::vector<std::vector<Point2>> compound_outlines(const LeafSpec& s, double& out_width) {
    // leaflets along a thin vertical rachis, alternating sides, plus a
    // terminal leaflet on top; leaflet size shrinks with the count so
    // same-side neighbors stay disjoint
    std::vector<std::vector<Point2>> polys;
    const int k = s.leaflets;
    const int side_count = k - 1;
    const double spacing = side_count > 1 ? 0.72 / (side_count - 1) : 0.72;
    const double leaflet_len = 0.30;
    const double leaflet_w = std::min(0.11, 0.8 * spacing);
    const double rachis_w = 0.012;

    polys.push_back({{-rachis_w / 2, -0.05},
                     {rachis_w / 2, -0.05},
                     {rachis_w / 2, 0.98},
                     {-rachis_w / 2, 0.98}});

    for (int i = 0; i < side_count; ++i) {
        const double t = side_count == 1 ? 0.5
                                         : static_cast<double>(i) / (side_count - 1);
        const double cy = 0.12 + 0.72 * t;
        const double side = i % 2 == 0 ? 1.0 : -1.0;
        const double cx = side * (leaflet_len / 2);
        std::vector<Point2> ellipse;
        for (int a = 0; a < 96; ++a) {
            const double th = 2.0 * kPi * a / 96;
            ellipse.push_back(
                {cx + (leaflet_len / 2) * std::cos(th), cy + leaflet_w * std::sin(th)});
        }
        polys.push_back(std::move(ellipse));
    }
    // terminal leaflet pointing up
    std::vector<Point2> top;
    for (int a = 0; a < 96; ++a) {
        const double th = 2.0 * kPi * a / 96;
        top.push_back({leaflet_w * std::cos(th), 0.98 + (leaflet_len / 2) * std::sin(th)});
    }
    polys.push_back(std::move(top));

    out_width = leaflet_len * 2 + rachis_w;
    return polys;
}

}  // namespace

SyntheticLeaf generate(const LeafSpec& spec, std::uint64_t seed) {
    spec.validate();
    std::mt19937_64 rng(seed);
    const LeafSpec s = apply_jitter(spec, rng);

    std::vector<std::vector<Point2>> polys;
    double content_width = 0.0;

    if (s.leaflets > 0) {
        polys = compound_outlines(s, content_width);
    } else {
        const double half_width = 0.5 / s.ratio;
        std::vector<Point2> outline;
        if (s.lobes != 0) {
            outline = star_outline(half_width, s.lobes, s.lobe_depth, 4096);
        } else {
            Profile prof;
            prof.half_width = half_width;
            prof.widest = s.widest;
            prof.oblong = s.oblong;
            prof.apex = s.apex;
            prof.apex_half_tan = std::tan(s.apex_angle_deg * kPi / 360.0);
            prof.base = s.base;
            prof.base_half_tan = std::tan(s.base_angle_deg * kPi / 360.0);
            outline = profile_outline(prof, 2048);
            if (s.lobe_depth > 0.0) {
                apply_teeth(outline, 8, s.lobe_depth * half_width);  // shallow waves
            }
        }
        apply_teeth(outline, s.teeth, s.tooth_amp);
        if (s.lobes == 0 && s.apex == LeafSpec::Apex::Notch) {
            splice_notch(outline, true, s.notch_depth, 0.6 * half_width);
        }
        if (s.lobes == 0 && s.base == LeafSpec::Base::Cordate) {
            splice_notch(outline, false, s.cordate_depth, 0.6 * half_width);
        }

        // asymmetry scales the left half
        if (s.asymmetry != 1.0) {
            for (Point2& p : outline) {
                if (p.x < 0.0) p.x *= s.asymmetry;
            }
        }
        polys.push_back(std::move(outline));
        content_width = 2.0 * half_width;
    }

    // stem polygon (unit space); the top pokes just past the basal margin
    // (or past the notch bottom) so the stem stays connected to the lamina
    double stem_top = 0.02;
    if (s.leaflets == 0) {
        if (s.lobes != 0) {
            stem_top = 0.5 * s.lobe_depth + 0.02;  // bottom sinus vertex + overlap
        } else if (s.base == LeafSpec::Base::Cordate) {
            stem_top = s.cordate_depth + 0.02;
        }
    }

    // fit the rotated content into the frame
    const double rot = s.rotation_deg * kPi / 180.0;
    Transform tf;
    tf.cos_r = std::cos(rot);
    tf.sin_r = std::sin(rot);

    double min_x = 1e300, max_x = -1e300, min_y = 1e300, max_y = -1e300;
    const auto extend = [&](const Point2& p) {
        const double x = p.x * tf.cos_r - p.y * tf.sin_r;
        const double y = p.x * tf.sin_r + p.y * tf.cos_r;
        min_x = std::min(min_x, x);
        max_x = std::max(max_x, x);
        min_y = std::min(min_y, y);
        max_y = std::max(max_y, y);
    };
    for (const auto& poly : polys) {
        for (const Point2& p : poly) extend(p);
    }
    extend({0.0, -s.stem_len});  // reserve room for the stem

    const double margin_frac = 0.10;
    const int width = s.image_width;
    tf.scale = width * (1.0 - 2.0 * margin_frac) / std::max(max_x - min_x, 1e-9);
    // keep the lamina length sane relative to the frame
    tf.scale = std::min(tf.scale, width * 2.2 / std::max(max_y - min_y, 1e-9));
    const int height = static_cast<int>(std::ceil(tf.scale * (max_y - min_y))) +
                       static_cast<int>(margin_frac * width) * 2;
    tf.dx = -min_x * tf.scale + (width - tf.scale * (max_x - min_x)) / 2.0;
    tf.dy = max_y * tf.scale + (height - tf.scale * (max_y - min_y)) / 2.0;

    // stem in unit space, wide enough to hit the requested pixel width
    if (s.leaflets == 0) {
        const double sw = s.stem_width * width / tf.scale;
        polys.push_back({{-sw / 2, -s.stem_len},
                         {sw / 2, -s.stem_len},
                         {sw / 2, stem_top},
                         {-sw / 2, stem_top}});
    }

    raster::BinaryImage mask = raster::make_binary(width, height);
    for (const auto& poly : polys) {
        std::vector<Point2> px;
        px.reserve(poly.size());
        for (const Point2& p : poly) px.push_back(tf(p));
        fill_polygon(mask, px);
    }

    raster::GrayImage img;
    img.width = width;
    img.height = height;
    img.pixels.resize(static_cast<std::size_t>(width) * height);
    for (std::size_t i = 0; i < img.pixels.size(); ++i) {
        img.pixels[i] = mask.pixels[i] ? kLeafGray : kBackgroundGray;
    }

    if (s.noise > 0.0) {
        std::uniform_int_distribution<int> px(0, width - 1);
        std::uniform_int_distribution<int> py(0, height - 1);
        std::bernoulli_distribution dark(0.5);
        const auto n = static_cast<std::size_t>(s.noise * img.pixels.size());
        for (std::size_t i = 0; i < n; ++i) {
            const int x = px(rng), y = py(rng);
            img.at(x, y) = dark(rng) ? kLeafGray : kBackgroundGray;
        }
    }

    return {std::move(img), ground_truth(s)};
}

// ---------------------------------------------------------------------------
// Spec JSON
// ---------------------------------------------------------------------------

namespace {

const std::map<std::string, LeafSpec::Apex> kApexNames = {
    {"dome", LeafSpec::Apex::Dome},
    {"wedge", LeafSpec::Apex::Wedge},
    {"driptip", LeafSpec::Apex::DripTip},
    {"notch", LeafSpec::Apex::Notch}};
const std::map<std::string, LeafSpec::Base> kBaseNames = {
    {"dome", LeafSpec::Base::Dome},
    {"wedge", LeafSpec::Base::Wedge},
    {"cordate", LeafSpec::Base::Cordate}};

template <typename T>
std::string name_of(const std::map<std::string, T>& table, T v) {
    for (const auto& [name, value] : table) {
        if (value == v) return name;
    }
    return "?";
}

}  // namespace

std::vector<LeafSpec> specs_from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw BadSpec(std::string("spec parse failed: ") + e.what());
    }
    if (!j.is_object() || j.value("schema", 0) != 1 || !j.contains("variants")) {
        throw BadSpec("spec file needs {schema:1, variants:[...]}");
    }

    std::vector<LeafSpec> specs;
    for (const auto& v : j["variants"]) {
        LeafSpec s;
        for (auto it = v.begin(); it != v.end(); ++it) {
            const std::string& key = it.key();
            try {
                if (key == "name") s.name = it.value().get<std::string>();
                else if (key == "image_width") s.image_width = it.value().get<int>();
                else if (key == "ratio") s.ratio = it.value().get<double>();
                else if (key == "widest") s.widest = it.value().get<double>();
                else if (key == "oblong") s.oblong = it.value().get<bool>();
                else if (key == "lobes") s.lobes = it.value().get<int>();
                else if (key == "lobe_depth") s.lobe_depth = it.value().get<double>();
                else if (key == "teeth") s.teeth = it.value().get<int>();
                else if (key == "tooth_amp") s.tooth_amp = it.value().get<double>();
                else if (key == "apex") s.apex = kApexNames.at(it.value().get<std::string>());
                else if (key == "apex_angle_deg") s.apex_angle_deg = it.value().get<double>();
                else if (key == "notch_depth") s.notch_depth = it.value().get<double>();
                else if (key == "base") s.base = kBaseNames.at(it.value().get<std::string>());
                else if (key == "base_angle_deg") s.base_angle_deg = it.value().get<double>();
                else if (key == "cordate_depth") s.cordate_depth = it.value().get<double>();
                else if (key == "stem_width") s.stem_width = it.value().get<double>();
                else if (key == "stem_len") s.stem_len = it.value().get<double>();
                else if (key == "asymmetry") s.asymmetry = it.value().get<double>();
                else if (key == "rotation_deg") s.rotation_deg = it.value().get<double>();
                else if (key == "noise") s.noise = it.value().get<double>();
                else if (key == "leaflets") s.leaflets = it.value().get<int>();
                else if (key == "jitter") s.jitter = it.value().get<double>();
                else throw BadSpec("unknown spec key: " + key);
            } catch (const nlohmann::json::exception&) {
                throw BadSpec("bad value for spec key: " + key);
            } catch (const std::out_of_range&) {
                throw BadSpec("bad value for spec key: " + key);
            }
        }
        s.validate();
        specs.push_back(std::move(s));
    }
    if (specs.empty()) throw BadSpec("no variants in spec file");
    return specs;
}

std::string specs_to_json(const std::vector<LeafSpec>& specs) {
    nlohmann::json variants = nlohmann::json::array();
    for (const LeafSpec& s : specs) {
        nlohmann::json v;
        v["name"] = s.name;
        v["image_width"] = s.image_width;
        v["ratio"] = s.ratio;
        v["widest"] = s.widest;
        v["oblong"] = s.oblong;
        v["lobes"] = s.lobes;
        v["lobe_depth"] = s.lobe_depth;
        v["teeth"] = s.teeth;
        v["tooth_amp"] = s.tooth_amp;
        v["apex"] = name_of(kApexNames, s.apex);
        v["apex_angle_deg"] = s.apex_angle_deg;
        v["notch_depth"] = s.notch_depth;
        v["base"] = name_of(kBaseNames, s.base);
        v["base_angle_deg"] = s.base_angle_deg;
        v["cordate_depth"] = s.cordate_depth;
        v["stem_width"] = s.stem_width;
        v["stem_len"] = s.stem_len;
        v["asymmetry"] = s.asymmetry;
        v["rotation_deg"] = s.rotation_deg;
        v["noise"] = s.noise;
        v["leaflets"] = s.leaflets;
        v["jitter"] = s.jitter;
        variants.push_back(v);
    }
    nlohmann::json j;
    j["schema"] = 1;
    j["variants"] = variants;
    return j.dump(2);
}

}  // namespace leafarch::synth
