#include "leafarch/features.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include <json.hpp>

namespace leafarch::features {

using geom::Point2;
using geom::Polygon;
using pipeline::LeafGeometry;

// ---------------------------------------------------------------------------
// Enum names
// ---------------------------------------------------------------------------

namespace {
constexpr const char* kNa = "not_applicable";
}

std::string to_string(Organization v) {
    return v == Organization::Simple ? "simple" : "compound";
}

std::string to_string(LaminarShape v) {
    switch (v) {
        case LaminarShape::Elliptic: return "elliptic";
        case LaminarShape::Obovate: return "obovate";
        case LaminarShape::Ovate: return "ovate";
        case LaminarShape::Oblong: return "oblong";
        case LaminarShape::Linear: return "linear";
        default: return kNa;
    }
}

std::string to_string(LwClass v) {
    switch (v) {
        case LwClass::LessThan1: return "lt1";
        case LwClass::OneToTwo: return "1to2";
        case LwClass::TwoToThree: return "2to3";
        case LwClass::ThreeToTen: return "3to10";
        case LwClass::TenPlus: return "ge10";
        default: return kNa;
    }
}

std::string to_string(MedialSymmetry v) {
    switch (v) {
        case MedialSymmetry::Symmetrical: return "symmetrical";
        case MedialSymmetry::Asymmetrical: return "asymmetrical";
        default: return kNa;
    }
}

std::string to_string(Lobation v) {
    switch (v) {
        case Lobation::Unlobed: return "unlobed";
        case Lobation::Lobed: return "lobed";
        default: return kNa;
    }
}

std::string to_string(LobeCount v) {
    switch (v) {
        case LobeCount::Zero: return "0";
        case LobeCount::Two: return "2";
        case LobeCount::Three: return "3";
        case LobeCount::Four: return "4";
        case LobeCount::Five: return "5";
        case LobeCount::Six: return "6";
        case LobeCount::SevenPlus: return "7+";
        default: return kNa;
    }
}

std::string to_string(Margin v) {
    switch (v) {
        case Margin::Toothed: return "toothed";
        case Margin::Untoothed: return "untoothed";
        default: return kNa;
    }
}

std::string to_string(AngleClass v) {
    switch (v) {
        case AngleClass::Acute: return "acute";
        case AngleClass::Obtuse: return "obtuse";
        case AngleClass::Reflex: return "reflex";
        default: return kNa;
    }
}

std::string to_string(ApexShape v) {
    switch (v) {
        case ApexShape::Straight: return "straight";
        case ApexShape::Convex: return "convex";
        case ApexShape::Acuminate: return "acuminate";
        case ApexShape::Extended: return "extended";
        default: return kNa;
    }
}

std::string to_string(BaseShape v) {
    switch (v) {
        case BaseShape::Straight: return "straight";
        case BaseShape::Concave: return "concave";
        case BaseShape::Convex: return "convex";
        case BaseShape::Cordate: return "cordate";
        case BaseShape::Lobate: return "lobate";
        default: return kNa;
    }
}

namespace {

template <typename E>
E parse_enum(const std::string& s, const std::vector<std::pair<std::string, E>>& table,
             const std::string& field) {
    for (const auto& [name, value] : table) {
        if (name == s) return value;
    }
    throw Error("unknown value '" + s + "' for " + field);
}

const std::vector<std::pair<std::string, Organization>> kOrganizationTable = {
    {"simple", Organization::Simple}, {"compound", Organization::Compound}};

template <typename E>
std::vector<std::pair<std::string, E>> table_from(std::initializer_list<E> values) {
    std::vector<std::pair<std::string, E>> t;
    for (E v : values) t.push_back({to_string(v), v});
    return t;
}

const auto kLaminarTable = table_from<LaminarShape>(
    {LaminarShape::Elliptic, LaminarShape::Obovate, LaminarShape::Ovate, LaminarShape::Oblong,
     LaminarShape::Linear, LaminarShape::NotApplicable});
const auto kLwTable = table_from<LwClass>({LwClass::LessThan1, LwClass::OneToTwo,
                                           LwClass::TwoToThree, LwClass::ThreeToTen,
                                           LwClass::TenPlus, LwClass::NotApplicable});
const auto kSymmetryTable = table_from<MedialSymmetry>(
    {MedialSymmetry::Symmetrical, MedialSymmetry::Asymmetrical, MedialSymmetry::NotApplicable});
const auto kLobationTable =
    table_from<Lobation>({Lobation::Unlobed, Lobation::Lobed, Lobation::NotApplicable});
const auto kLobeCountTable = table_from<LobeCount>(
    {LobeCount::Zero, LobeCount::Two, LobeCount::Three, LobeCount::Four, LobeCount::Five,
     LobeCount::Six, LobeCount::SevenPlus, LobeCount::NotApplicable});
const auto kMarginTable =
    table_from<Margin>({Margin::Toothed, Margin::Untoothed, Margin::NotApplicable});
const auto kAngleTable = table_from<AngleClass>(
    {AngleClass::Acute, AngleClass::Obtuse, AngleClass::Reflex, AngleClass::NotApplicable});
const auto kApexShapeTable =
    table_from<ApexShape>({ApexShape::Straight, ApexShape::Convex, ApexShape::Acuminate,
                           ApexShape::Extended, ApexShape::NotApplicable});
const auto kBaseShapeTable = table_from<BaseShape>(
    {BaseShape::Straight, BaseShape::Concave, BaseShape::Convex, BaseShape::Cordate,
     BaseShape::Lobate, BaseShape::NotApplicable});

}  // namespace

std::string to_json(const ArchitectureFeatures& f) {
    nlohmann::json j;
    j["schema"] = 1;
    j["organization"] = to_string(f.organization);
    j["laminar_shape"] = to_string(f.laminar_shape);
    j["lw_class"] = to_string(f.lw_class);
    j["medial_symmetry"] = to_string(f.medial_symmetry);
    j["lobation"] = to_string(f.lobation);
    j["lobe_count"] = to_string(f.lobe_count);
    j["margin"] = to_string(f.margin);
    j["apex_angle"] = to_string(f.apex_angle);
    j["apex_shape"] = to_string(f.apex_shape);
    j["base_angle"] = to_string(f.base_angle);
    j["base_shape"] = to_string(f.base_shape);
    return j.dump(2);
}

ArchitectureFeatures features_from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw Error(std::string("bad features JSON: ") + e.what());
    }
    if (!j.is_object() || j.value("schema", 0) != 1) throw Error("unsupported features schema");

    const auto str = [&j](const char* key) -> std::string {
        if (!j.contains(key) || !j[key].is_string()) {
            throw Error(std::string("missing feature field: ") + key);
        }
        return j[key].get<std::string>();
    };

    ArchitectureFeatures f;
    f.organization = parse_enum(str("organization"), kOrganizationTable, "organization");
    f.laminar_shape = parse_enum(str("laminar_shape"), kLaminarTable, "laminar_shape");
    f.lw_class = parse_enum(str("lw_class"), kLwTable, "lw_class");
    f.medial_symmetry = parse_enum(str("medial_symmetry"), kSymmetryTable, "medial_symmetry");
    f.lobation = parse_enum(str("lobation"), kLobationTable, "lobation");
    f.lobe_count = parse_enum(str("lobe_count"), kLobeCountTable, "lobe_count");
    f.margin = parse_enum(str("margin"), kMarginTable, "margin");
    f.apex_angle = parse_enum(str("apex_angle"), kAngleTable, "apex_angle");
    f.apex_shape = parse_enum(str("apex_shape"), kApexShapeTable, "apex_shape");
    f.base_angle = parse_enum(str("base_angle"), kAngleTable, "base_angle");
    f.base_shape = parse_enum(str("base_shape"), kBaseShapeTable, "base_shape");
    return f;
}

std::string csv_header() {
    return "organization,laminar_shape,lw_class,medial_symmetry,lobation,lobe_count,margin,"
           "apex_angle,apex_shape,base_angle,base_shape";
}

std::string to_csv_row(const ArchitectureFeatures& f) {
    return to_string(f.organization) + "," + to_string(f.laminar_shape) + "," +
           to_string(f.lw_class) + "," + to_string(f.medial_symmetry) + "," +
           to_string(f.lobation) + "," + to_string(f.lobe_count) + "," + to_string(f.margin) +
           "," + to_string(f.apex_angle) + "," + to_string(f.apex_shape) + "," +
           to_string(f.base_angle) + "," + to_string(f.base_shape);
}

// Alphabetical so the order survives a JSON object round-trip.
const std::vector<std::string>& classifier_feature_names() {
    static const std::vector<std::string> names = {
        "apex_angle", "apex_shape", "base_angle",      "base_shape",   "laminar_shape",
        "lobation",   "lobe_count", "margin",          "medial_symmetry", "organization"};
    return names;
}

const std::vector<std::vector<std::string>>& classifier_feature_domains() {
    static const std::vector<std::vector<std::string>> domains = {
        {"acute", "obtuse", "reflex", kNa},
        {"straight", "convex", "acuminate", "extended", kNa},
        {"acute", "obtuse", "reflex", kNa},
        {"straight", "concave", "convex", "cordate", "lobate", kNa},
        {"elliptic", "obovate", "ovate", "oblong", "linear", kNa},
        {"unlobed", "lobed", kNa},
        {"0", "2", "3", "4", "5", "6", "7+", kNa},
        {"toothed", "untoothed", kNa},
        {"symmetrical", "asymmetrical", kNa},
        {"simple", "compound"}};
    return domains;
}

std::vector<std::string> classifier_values(const ArchitectureFeatures& f) {
    return {to_string(f.apex_angle),    to_string(f.apex_shape), to_string(f.base_angle),
            to_string(f.base_shape),    to_string(f.laminar_shape), to_string(f.lobation),
            to_string(f.lobe_count),    to_string(f.margin),     to_string(f.medial_symmetry),
            to_string(f.organization)};
}

// ---------------------------------------------------------------------------
// Shared boundary helpers
// ---------------------------------------------------------------------------

namespace {

struct Bounds {
    double min_x, max_x, min_y, max_y;
};

Bounds bounds_of(const Polygon& p) {
    Bounds b{p.vertices[0].x, p.vertices[0].x, p.vertices[0].y, p.vertices[0].y};
    for (const Point2& v : p.vertices) {
        b.min_x = std::min(b.min_x, v.x);
        b.max_x = std::max(b.max_x, v.x);
        b.min_y = std::min(b.min_y, v.y);
        b.max_y = std::max(b.max_y, v.y);
    }
    return b;
}

// x positions where the boundary crosses the horizontal line at y, sorted.
std::vector<double> crossings_at(const Polygon& p, double y) {
    std::vector<double> xs;
    const std::size_t n = p.size();
    for (std::size_t i = 0; i < n; ++i) {
        const Point2& a = p.vertices[i];
        const Point2& b = p.vertices[(i + 1) % n];
        if ((a.y <= y) == (b.y <= y)) continue;
        xs.push_back(a.x + (y - a.y) * (b.x - a.x) / (b.y - a.y));
    }
    std::sort(xs.begin(), xs.end());
    return xs;
}

double point_segment_distance(const Point2& p, const Point2& a, const Point2& b) {
    const Point2 ab = b - a;
    const double len_sq = geom::dot(ab, ab);
    if (len_sq == 0.0) return geom::distance(p, a);
    double t = geom::dot(p - a, ab) / len_sq;
    t = std::clamp(t, 0.0, 1.0);
    const Point2 proj{a.x + t * ab.x, a.y + t * ab.y};
    return geom::distance(p, proj);
}

double distance_to_hull_boundary(const Point2& p, const Polygon& hull) {
    double best = std::numeric_limits<double>::max();
    const std::size_t n = hull.size();
    for (std::size_t i = 0; i < n; ++i) {
        best = std::min(best,
                        point_segment_distance(p, hull.vertices[i], hull.vertices[(i + 1) % n]));
    }
    return best;
}

// Contiguous run of boundary vertices inside the band containing `start`,
// in boundary order.
std::vector<Point2> band_chain(const Polygon& boundary, std::size_t start,
                               const std::function<bool(const Point2&)>& in_band) {
    const std::size_t n = boundary.size();
    if (!in_band(boundary.vertices[start])) throw DegenerateShape("band anchor outside band");

    std::size_t first = start;
    for (std::size_t steps = 0; steps + 1 < n; ++steps) {
        const std::size_t prev = (first + n - 1) % n;
        if (!in_band(boundary.vertices[prev])) break;
        first = prev;
    }
    std::vector<Point2> chain;
    for (std::size_t i = 0; i < n; ++i) {
        const Point2& v = boundary.vertices[(first + i) % n];
        if (i > 0 && !in_band(v)) break;
        chain.push_back(v);
    }
    return chain;
}

struct SmoothedBand {
    std::vector<Point2> margin;  ///< smoothed margin samples, in chain order
    std::size_t split = 0;       ///< sample index of the apex/base extremum
};

// EFD smoothing of a margin chain: close it with the implicit chord, keep 12
// harmonics, resample at one fifth of the original point count, and keep
// only the samples that fall on the margin side of the parameter.
SmoothedBand smooth_band(std::vector<Point2> chain, bool extremum_is_max) {
    // canonical direction: sampling positions (and so the curvature census)
    // must not depend on which way the boundary happened to run
    if (chain.front().x > chain.back().x ||
        (chain.front().x == chain.back().x && chain.front().y > chain.back().y)) {
        std::reverse(chain.begin(), chain.end());
    }
    Polygon closed{chain};
    const auto coeffs = geom::efd_analyze(closed, 12);

    double margin_len = 0.0;
    for (std::size_t i = 0; i + 1 < chain.size(); ++i) {
        margin_len += geom::distance(chain[i], chain[i + 1]);
    }
    const double chord = geom::distance(chain.back(), chain.front());
    const double frac = margin_len / (margin_len + chord);

    // midpoint sampling over the margin segment of the parameter: the sample
    // set maps onto itself under chain reversal, so mirrored leaves see the
    // same margin positions
    const std::size_t target = std::max<std::size_t>(9, chain.size() / 5);
    SmoothedBand out;
    for (std::size_t j = 0; j < target; ++j) {
        const double u =
            frac * (static_cast<double>(j) + 0.5) / static_cast<double>(target);
        out.margin.push_back(geom::efd_evaluate(coeffs, u));
    }
    if (out.margin.size() < 5) throw InsufficientPoints("smoothed band too short");

    out.split = 0;
    for (std::size_t i = 1; i < out.margin.size(); ++i) {
        const bool better = extremum_is_max ? out.margin[i].y > out.margin[out.split].y
                                            : out.margin[i].y < out.margin[out.split].y;
        if (better) out.split = i;
    }
    return out;
}

// Merged curvature census of the two margin chains on either side of the
// split. The outer 8% of samples at each end measure the band cut (Gibbs
// rounding of the margin-chord corners), not the leaf, and are dropped.
// eps_rel widens the zero deadband, as a fraction of the band height.
geom::CurvatureStats split_curvature(const SmoothedBand& band, double eps_rel) {
    auto m = band.margin;
    std::size_t split = band.split;
    const auto cut = static_cast<std::size_t>(std::llround(0.08 * static_cast<double>(m.size())));
    if (m.size() > 2 * cut + 9) {
        m = std::vector<Point2>(m.begin() + static_cast<std::ptrdiff_t>(cut),
                                m.end() - static_cast<std::ptrdiff_t>(cut));
        split = std::clamp<std::size_t>(split > cut ? split - cut : 0, 0, m.size() - 1);
    }

    double lo = m[0].y, hi = m[0].y;
    for (const Point2& p : m) {
        lo = std::min(lo, p.y);
        hi = std::max(hi, p.y);
    }
    const double eps = std::max(eps_rel, 1e-9) * (hi - lo);

    geom::CurvatureStats merged;
    const auto count = [&](std::size_t a, std::size_t b) {
        for (std::size_t i = a + 1; i + 1 < b; ++i) {
            const double d2y = m[i - 1].y - 2.0 * m[i].y + m[i + 1].y;
            if (d2y > eps) ++merged.n_positive;
            else if (d2y < -eps) ++merged.n_negative;
            ++merged.n_total;
        }
    };
    count(0, split + 1);
    count(split, m.size());
    if (merged.n_total == 0) count(0, m.size());
    if (merged.n_total == 0) throw InsufficientPoints("smoothed band too short");

    merged.psd = static_cast<double>(merged.n_positive) / static_cast<double>(merged.n_total);
    merged.nsd = static_cast<double>(merged.n_negative) / static_cast<double>(merged.n_total);
    return merged;
}

}  // namespace

// ---------------------------------------------------------------------------
// Organization
// ---------------------------------------------------------------------------

Organization classify_organization(const raster::BinaryImage& pre_opening_leaf) {
    const int d = pipeline::odd_element_diameter(0.03, pre_opening_leaf.width);
    const raster::BinaryImage eroded = raster::erode(pre_opening_leaf, d);

    const std::size_t total = eroded.count();
    if (total == 0) return Organization::Simple;  // thinner than the element everywhere

    const auto comps = raster::connected_components(eroded);
    const std::size_t min_area = std::max<std::size_t>(1, total / 1000);
    std::size_t significant = 0;
    for (const auto& c : comps) {
        if (c.area >= min_area) ++significant;
    }
    return significant >= 2 ? Organization::Compound : Organization::Simple;
}

// ---------------------------------------------------------------------------
// Laminar characters
// ---------------------------------------------------------------------------

namespace {

struct WidthProfile {
    std::vector<double> heights;
    std::vector<double> left;   ///< leftmost crossing per height (outer margin)
    std::vector<double> right;  ///< rightmost crossing
    double widest_width = 0.0;
    double widest_height = 0.0;
};

WidthProfile width_profile(const Polygon& boundary, double y_from, double y_to, int samples) {
    WidthProfile p;
    for (int k = 0; k < samples; ++k) {
        const double y = y_from + (y_to - y_from) * (static_cast<double>(k) + 0.5) / samples;
        const auto xs = crossings_at(boundary, y);
        if (xs.size() < 2) continue;
        p.heights.push_back(y);
        p.left.push_back(xs.front());
        p.right.push_back(xs.back());
    }
    if (p.heights.empty()) return p;

    double max_w = 0.0;
    for (std::size_t i = 0; i < p.heights.size(); ++i) {
        max_w = std::max(max_w, p.right[i] - p.left[i]);
    }
    // widest position: mean height of the near-maximal plateau
    double sum_h = 0.0;
    int count = 0;
    for (std::size_t i = 0; i < p.heights.size(); ++i) {
        if (p.right[i] - p.left[i] >= max_w * (1.0 - 1e-3)) {
            sum_h += p.heights[i];
            ++count;
        }
    }
    p.widest_width = max_w;
    p.widest_height = sum_h / count;
    return p;
}

}  // namespace

double lw_ratio(const LeafGeometry& g) {
    const Bounds b = bounds_of(g.boundary);
    const WidthProfile p = width_profile(g.boundary, b.min_y, b.max_y, 256);
    if (p.widest_width <= 0.0) throw DegenerateShape("zero-width lamina");
    return g.lamina_length / p.widest_width;
}

LwClass classify_lw(double ratio) {
    if (ratio < 1.0) return LwClass::LessThan1;
    if (ratio < 2.0) return LwClass::OneToTwo;
    if (ratio < 3.0) return LwClass::TwoToThree;
    if (ratio < 10.0) return LwClass::ThreeToTen;
    return LwClass::TenPlus;
}

LaminarShape classify_laminar_shape(const LeafGeometry& g) {
    const Bounds b = bounds_of(g.boundary);
    const double L = g.lamina_length;
    const WidthProfile full = width_profile(g.boundary, b.min_y, b.max_y, 256);
    if (full.widest_width <= 0.0) throw DegenerateShape("zero-width lamina");

    if (L / full.widest_width >= 10.0) return LaminarShape::Linear;

    // Oblong: some window of height >= L/3 inside [0.2L, 0.8L] where both
    // margins stay within 2.5% of the image width.
    const WidthProfile mid =
        width_profile(g.boundary, b.min_y + 0.2 * L, b.min_y + 0.8 * L, 256);
    const double tol = 0.025 * g.image_width;
    const std::size_t n = mid.heights.size();
    if (n >= 8) {
        const auto window =
            static_cast<std::size_t>(std::ceil(static_cast<double>(n) * (1.0 / 3.0) / 0.6));
        if (window <= n) {
            for (std::size_t s = 0; s + window <= n; ++s) {
                double lmin = 1e300, lmax = -1e300, rmin = 1e300, rmax = -1e300;
                for (std::size_t i = s; i < s + window; ++i) {
                    lmin = std::min(lmin, mid.left[i]);
                    lmax = std::max(lmax, mid.left[i]);
                    rmin = std::min(rmin, mid.right[i]);
                    rmax = std::max(rmax, mid.right[i]);
                }
                if (lmax - lmin < tol && rmax - rmin < tol) return LaminarShape::Oblong;
            }
        }
    }

    const double f = (full.widest_height - b.min_y) / L;
    if (f >= 0.4 && f <= 0.6) return LaminarShape::Elliptic;
    return f < 0.4 ? LaminarShape::Ovate : LaminarShape::Obovate;
}

SymmetryResult medial_symmetry(const LeafGeometry& g) {
    const Bounds b = bounds_of(g.boundary);
    const double L = g.lamina_length;
    const double mid_x = g.insertion_midpoint().x;

    double sum = 0.0;
    int used = 0;
    for (int k = 0; k < 64; ++k) {
        const double y = b.min_y + L * (0.25 + 0.5 * (static_cast<double>(k) + 0.5) / 64.0);
        const auto xs = crossings_at(g.boundary, y);
        if (xs.size() < 2) continue;
        const double left = mid_x - xs.front();
        const double right = xs.back() - mid_x;
        if (left <= 0.0 || right <= 0.0) continue;
        sum += std::min(left, right) / std::max(left, right);
        ++used;
    }
    if (used == 0) throw DegenerateShape("no usable symmetry scanlines");

    SymmetryResult r;
    r.ratio = sum / used;
    r.cls = r.ratio >= 0.9 - 1e-9 ? MedialSymmetry::Symmetrical : MedialSymmetry::Asymmetrical;
    return r;
}

// ---------------------------------------------------------------------------
// Lobation
// ---------------------------------------------------------------------------

LobationAnalysis analyze_lobation(const LeafGeometry& g) {
    LobationAnalysis a;
    a.decimated = geom::decimate_to_fraction(g.boundary, 0.01);
    a.hull = geom::convex_hull(a.decimated.vertices);

    const double hull_area = geom::polygon_area(a.hull);
    const double poly_area = geom::polygon_area(a.decimated);
    a.area_diff = hull_area > 0.0 ? std::max(0.0, (hull_area - poly_area) / hull_area) : 0.0;

    const Bounds b = bounds_of(g.boundary);
    const double diag = std::hypot(b.max_x - b.min_x, b.max_y - b.min_y);
    const double tol = 1e-6 * diag;

    const std::size_t n = a.decimated.size();
    std::vector<char> on(n);
    bool all_on = true, any_on = false;
    for (std::size_t i = 0; i < n; ++i) {
        on[i] = distance_to_hull_boundary(a.decimated.vertices[i], a.hull) <= tol;
        all_on = all_on && on[i];
        any_on = any_on || on[i];
    }
    if (all_on || !any_on) {
        a.contact_runs = all_on ? 1 : 0;
        return a;
    }

    // rotate to a bound-run start so runs alternate bound, incision, bound...
    std::size_t start = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (on[i] && !on[(i + n - 1) % n]) {
            start = i;
            break;
        }
    }

    // walk the cycle collecting maximal runs; per bound run pick the vertex
    // furthest from the centroid, per incision run the nearest
    std::size_t i = 0;
    while (i < n) {
        const bool kind = on[(start + i) % n];
        std::size_t best_idx = (start + i) % n;
        double best_d = geom::distance(a.decimated.vertices[best_idx], g.centroid);
        std::size_t j = i;
        while (j < n && on[(start + j) % n] == kind) {
            const std::size_t idx = (start + j) % n;
            const double d = geom::distance(a.decimated.vertices[idx], g.centroid);
            const bool better = kind ? d > best_d : d < best_d;
            if (better) {
                best_d = d;
                best_idx = idx;
            }
            ++j;
        }
        if (kind) {
            a.lobe_apexes.push_back(a.decimated.vertices[best_idx]);
            ++a.contact_runs;
        } else {
            a.incision_points.push_back(a.decimated.vertices[best_idx]);
        }
        i = j;
    }
    return a;
}

LobationResult classify_lobation(const LobationAnalysis& a, const LeafGeometry& g) {
    LobationResult r;
    if (a.area_diff < 0.05 || a.incision_points.empty()) {
        return r;  // definitely unlobed
    }

    const double mid_x = g.insertion_midpoint().x;
    const Point2 insertion = g.insertion_midpoint();
    const std::size_t k = a.lobe_apexes.size();

    // the petiole sinus (reflex base) does not count as a lobe incision
    std::size_t skip = a.incision_points.size();
    if (g.reflex_base) {
        double best = std::numeric_limits<double>::max();
        for (std::size_t j = 0; j < a.incision_points.size(); ++j) {
            const double d = geom::distance(a.incision_points[j], insertion);
            if (d < best) {
                best = d;
                skip = j;
            }
        }
    }

    int survivors = 0;
    for (std::size_t j = 0; j < a.incision_points.size(); ++j) {
        if (j == skip) continue;
        // runs alternate starting at a bound run, so incision j sits between
        // lobe apexes j and j+1
        const double prev_d = std::abs(a.lobe_apexes[j % k].x - mid_x);
        const double next_d = std::abs(a.lobe_apexes[(j + 1) % k].x - mid_x);
        const double apex_d = std::max(prev_d, next_d);
        if (apex_d <= 0.0) continue;
        const double depth = (apex_d - std::abs(a.incision_points[j].x - mid_x)) / apex_d;
        if (depth > 0.25) ++survivors;
    }

    if (survivors == 0) return r;
    r.lobation = Lobation::Lobed;
    r.count = survivors + 1;
    switch (r.count) {
        case 2: r.count_class = LobeCount::Two; break;
        case 3: r.count_class = LobeCount::Three; break;
        case 4: r.count_class = LobeCount::Four; break;
        case 5: r.count_class = LobeCount::Five; break;
        case 6: r.count_class = LobeCount::Six; break;
        default: r.count_class = LobeCount::SevenPlus; break;
    }
    return r;
}

// ---------------------------------------------------------------------------
// Margin
// ---------------------------------------------------------------------------

Margin classify_margin(const LeafGeometry& g) {
    const Polygon reduced = geom::decimate_by_area_budget(g.boundary, 0.01);
    const double before = geom::polygon_perimeter(g.boundary);
    const double after = geom::polygon_perimeter(reduced);
    const double reduction = (before - after) / before;
    return reduction >= 0.10 ? Margin::Toothed : Margin::Untoothed;
}

// ---------------------------------------------------------------------------
// Apex and base
// ---------------------------------------------------------------------------

namespace {

AngleResult band_angle(const LeafGeometry& g, bool apex_side) {
    const Bounds b = bounds_of(g.boundary);
    const double L = g.lamina_length;
    const double y_cut = apex_side ? b.max_y - 0.25 * L : b.min_y + 0.25 * L;

    std::vector<Point2> band;
    for (const Point2& v : g.boundary.vertices) {
        if (apex_side ? v.y >= y_cut : v.y <= y_cut) band.push_back(v);
    }
    if (band.size() < 3) throw DegenerateShape("apex/base band too small");
    const Polygon hull = geom::convex_hull(band);

    const Point2 focus = apex_side ? g.apex : g.insertion_midpoint();
    const double cut_slack = 0.02 * L;
    const auto near_cut = [&](const Point2& p) {
        return apex_side ? p.y < y_cut + cut_slack : p.y > y_cut - cut_slack;
    };

    // longest hull edge on each side of the focus vertex; the chord closing
    // the band (both endpoints at the cut) is not part of the margin
    double best_len[2] = {0.0, 0.0};
    Point2 best_dir[2];
    const std::size_t n = hull.size();
    for (std::size_t i = 0; i < n; ++i) {
        const Point2& p = hull.vertices[i];
        const Point2& q = hull.vertices[(i + 1) % n];
        if (near_cut(p) && near_cut(q)) continue;
        const double mid_x = (p.x + q.x) * 0.5;
        if (mid_x == focus.x) continue;
        const int side = mid_x < focus.x ? 0 : 1;
        const double len = geom::distance(p, q);
        if (len > best_len[side]) {
            best_len[side] = len;
            const bool p_near = geom::distance(p, focus) <= geom::distance(q, focus);
            best_dir[side] = p_near ? q - p : p - q;
        }
    }
    if (best_len[0] == 0.0 || best_len[1] == 0.0) {
        throw DegenerateShape("no margin edge on one side of the apex/base");
    }

    AngleResult r;
    r.degrees = geom::angle_between(best_dir[0], best_dir[1]);
    r.cls = r.degrees < 90.0 ? AngleClass::Acute : AngleClass::Obtuse;
    return r;
}

std::vector<Point2> apex_chain(const LeafGeometry& g) {
    const Bounds b = bounds_of(g.boundary);
    const double y_cut = b.max_y - 0.25 * g.lamina_length;
    return band_chain(g.boundary, 0, [y_cut](const Point2& p) { return p.y >= y_cut; });
}

std::vector<Point2> base_chain(const LeafGeometry& g) {
    const Bounds b = bounds_of(g.boundary);
    const double y_cut = b.min_y + 0.25 * g.lamina_length;
    std::size_t lowest = 0;
    for (std::size_t i = 1; i < g.boundary.size(); ++i) {
        if (g.boundary.vertices[i].y < g.boundary.vertices[lowest].y) lowest = i;
    }
    auto chain = band_chain(g.boundary, lowest, [y_cut](const Point2& p) { return p.y <= y_cut; });

    // The petiole subtraction leaves a cut in the margin around the
    // insertion point; bridging it out keeps the curvature census about the
    // leaf margin rather than the removal artifact.
    const double mid_x = g.insertion_midpoint().x;
    const double x_slack = 0.03 * g.image_width;
    const double y_slack = b.min_y + 0.12 * g.lamina_length;
    std::vector<Point2> kept;
    kept.reserve(chain.size());
    for (const Point2& p : chain) {
        if (std::abs(p.x - mid_x) < x_slack && p.y < y_slack) continue;
        kept.push_back(p);
    }
    return kept.size() >= 5 ? kept : chain;
}

}  // namespace

AngleResult apex_angle(const LeafGeometry& g) {
    if (g.reflex_apex) return {360.0, AngleClass::Reflex};
    return band_angle(g, true);
}

AngleResult base_angle(const LeafGeometry& g) {
    if (g.reflex_base) return {360.0, AngleClass::Reflex};
    return band_angle(g, false);
}

ApexShape apex_shape(const LeafGeometry& g) {
    if (g.reflex_apex) return ApexShape::Extended;
    const auto stats = split_curvature(smooth_band(apex_chain(g), true), 0.0);
    if (stats.psd >= 0.5) return ApexShape::Acuminate;
    if (stats.psd >= 0.3) return ApexShape::Straight;
    return ApexShape::Convex;
}

BaseShape base_shape(const LeafGeometry& g, const LobationAnalysis& lob) {
    const Bounds b = bounds_of(g.boundary);
    if (g.reflex_base) {
        // only a leaf that actually has lobes can be lobate; an unlobed
        // cordate leaf has bound-run maxima but no lobes
        if (classify_lobation(lob, g).lobation == Lobation::Lobed) {
            const double band_top = b.min_y + 0.25 * g.lamina_length;
            for (const Point2& apex : lob.lobe_apexes) {
                if (apex.y <= band_top) return BaseShape::Lobate;
            }
        }
        return BaseShape::Cordate;
    }
    // the basal margin carries residue of the petiole cut; a small deadband
    // keeps that ringing out of the census
    const auto band = smooth_band(base_chain(g), false);
    const auto stats = split_curvature(band, 0.0005);
    if (stats.nsd >= 0.2) return BaseShape::Concave;
    if (stats.nsd >= 0.1) return BaseShape::Straight;
    return BaseShape::Convex;
}

// ---------------------------------------------------------------------------
// Composition
// ---------------------------------------------------------------------------

namespace {

template <typename F>
auto with_feature(const char* name, F&& f) {
    try {
        return f();
    } catch (const Error& e) {
        throw Error(std::string(name) + ": " + e.what());
    }
}

}  // namespace

ArchitectureFeatures extract_all(const LeafGeometry& g,
                                 const raster::BinaryImage& pre_opening_leaf) {
    ArchitectureFeatures f;
    f.organization =
        with_feature("organization", [&] { return classify_organization(pre_opening_leaf); });
    if (f.organization == Organization::Compound) return f;

    const double ratio = with_feature("lw_ratio", [&] { return lw_ratio(g); });
    f.lw_class = classify_lw(ratio);
    f.laminar_shape =
        with_feature("laminar_shape", [&] { return classify_laminar_shape(g); });
    f.medial_symmetry =
        with_feature("medial_symmetry", [&] { return medial_symmetry(g).cls; });

    const LobationAnalysis lob = with_feature("lobation", [&] { return analyze_lobation(g); });
    const LobationResult lr =
        with_feature("lobation", [&] { return classify_lobation(lob, g); });
    f.lobation = lr.lobation;
    f.lobe_count = lr.count_class;

    f.margin = with_feature("margin", [&] { return classify_margin(g); });
    f.apex_angle = with_feature("apex_angle", [&] { return apex_angle(g).cls; });
    f.apex_shape = with_feature("apex_shape", [&] { return apex_shape(g); });
    f.base_angle = with_feature("base_angle", [&] { return base_angle(g).cls; });
    f.base_shape = with_feature("base_shape", [&] { return base_shape(g, lob); });
    return f;
}

}  // namespace leafarch::features
