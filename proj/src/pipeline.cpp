#include "leafarch/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace leafarch::pipeline {

using geom::Point2;
using raster::BinaryImage;
using raster::PixelPoint;

int odd_element_diameter(double frac, int image_width) {
    const double target = frac * image_width;
    const auto k = static_cast<int>(std::llround((target - 1.0) / 2.0));
    return std::max(3, 2 * k + 1);
}

raster::BinaryImage segment(const io::RasterData& image, bool leaf_is_dark) {
    const raster::GrayImage gray = image.gray();
    if (gray.pixels.empty()) throw SegmentationFailed("empty image");

    const auto [min_it, max_it] = std::minmax_element(gray.pixels.begin(), gray.pixels.end());
    if (*min_it == *max_it) throw SegmentationFailed("blank image, no contrast");

    const int t = raster::otsu_threshold(gray);
    const BinaryImage fg = raster::binarize(gray, t, leaf_is_dark);

    const auto comps = raster::connected_components(fg);
    if (comps.empty()) throw SegmentationFailed("no foreground after thresholding");
    const auto& leaf = comps.front();
    const std::size_t min_area =
        std::max<std::size_t>(16, gray.pixels.size() / 1000);  // 0.1% of the frame
    if (leaf.area < min_area) throw SegmentationFailed("foreground too small to be a leaf");

    return raster::fill_holes(raster::component_mask(fg, leaf));
}

namespace {

PixelPoint lowest_pixel(const BinaryImage& img) {
    for (int y = img.height - 1; y >= 0; --y) {
        for (int x = 0; x < img.width; ++x) {
            if (img.at(x, y)) return {x, y};
        }
    }
    throw EmptyImage("no foreground");
}

bool adjacent_to(const BinaryImage& mask, int x, int y) {
    for (int dy = -1; dy <= 1; ++dy) {
        for (int dx = -1; dx <= 1; ++dx) {
            if (dx == 0 && dy == 0) continue;
            const int nx = x + dx, ny = y + dy;
            if (mask.in_bounds(nx, ny) && mask.at(nx, ny)) return true;
        }
    }
    return false;
}

// Default insertion points when no petiole was found: the two boundary
// pixels adjacent to the lowest lamina point.
std::array<Point2, 2> fallback_insertion(const BinaryImage& lamina) {
    const auto contour = raster::trace_boundary(lamina);
    const auto& pts = contour.points;
    std::size_t best = 0;
    for (std::size_t i = 1; i < pts.size(); ++i) {
        if (pts[i].y > pts[best].y || (pts[i].y == pts[best].y && pts[i].x < pts[best].x)) {
            best = i;
        }
    }
    const std::size_t n = pts.size();
    const PixelPoint prev = pts[(best + n - 1) % n];
    const PixelPoint next = pts[(best + 1) % n];
    return {Point2{static_cast<double>(prev.x), static_cast<double>(prev.y)},
            Point2{static_cast<double>(next.x), static_cast<double>(next.y)}};
}

}  // namespace

PetioleRemoval remove_petiole(const raster::BinaryImage& leaf) {
    const int d = odd_element_diameter(0.05, leaf.width);
    const BinaryImage opened = raster::open_disk(leaf, d);

    PetioleRemoval out;
    out.info.petiole_mask = raster::make_binary(leaf.width, leaf.height);

    const auto opened_comps = raster::connected_components(opened);
    if (opened_comps.empty()) {
        // leaf thinner than the element everywhere; keep it untouched
        out.lamina = leaf;
        out.info.present = false;
        out.info.insertion_points = fallback_insertion(leaf);
        return out;
    }
    const BinaryImage body = raster::component_mask(opened, opened_comps.front());
    const int body_bottom = opened_comps.front().max_y;
    const int body_height = opened_comps.front().max_y - opened_comps.front().min_y + 1;

    // Petiole candidates: residue components that reach into the basal band
    // and touch the lamina body. The petiole is the one reaching lowest.
    const BinaryImage residue = raster::subtract(leaf, body);
    const auto res_comps = raster::connected_components(residue);
    const int band_top = body_bottom - std::max(d, body_height / 4);

    const raster::Component* petiole = nullptr;
    for (const auto& comp : res_comps) {
        if (comp.max_y < band_top) continue;
        if (comp.max_y - comp.min_y + 1 < d / 2) continue;  // margin sliver, not a stalk
        bool touches = false;
        for (const PixelPoint& p : comp.pixels) {
            if (adjacent_to(body, p.x, p.y)) {
                touches = true;
                break;
            }
        }
        if (!touches) continue;
        if (petiole == nullptr || comp.max_y > petiole->max_y) petiole = &comp;
    }

    if (petiole == nullptr) {
        out.lamina = leaf;
        out.info.present = false;
        out.info.insertion_points = fallback_insertion(leaf);
        return out;
    }

    out.info.petiole_mask = raster::component_mask(leaf, *petiole);
    out.lamina = raster::subtract(leaf, out.info.petiole_mask);
    out.info.present = true;

    // Junction row: topmost petiole row 8-adjacent to the lamina; the two
    // insertion points are the x extremes of the petiole in that row.
    int junction_row = -1;
    for (const PixelPoint& p : petiole->pixels) {
        if (!adjacent_to(out.lamina, p.x, p.y)) continue;
        if (junction_row < 0 || p.y < junction_row) junction_row = p.y;
    }
    if (junction_row < 0) junction_row = petiole->min_y;

    int min_x = leaf.width, max_x = -1;
    for (const PixelPoint& p : petiole->pixels) {
        if (p.y != junction_row) continue;
        min_x = std::min(min_x, p.x);
        max_x = std::max(max_x, p.x);
    }
    out.info.insertion_points = {
        Point2{static_cast<double>(min_x), static_cast<double>(junction_row)},
        Point2{static_cast<double>(max_x), static_cast<double>(junction_row)}};
    return out;
}

bool detect_basal_extension(const raster::BinaryImage& lamina, const PetioleInfo& info) {
    const PixelPoint low = lowest_pixel(lamina);
    const auto comps = raster::connected_components(lamina);
    if (comps.empty()) return false;
    const double height = comps.front().max_y - comps.front().min_y + 1;

    const double mid_y = (info.insertion_points[0].y + info.insertion_points[1].y) * 0.5;
    return (static_cast<double>(low.y) - mid_y) > 0.02 * height;
}

ApexDetection detect_apex(const raster::BinaryImage& lamina, const PetioleInfo& info) {
    const auto comps = raster::connected_components(lamina);
    if (comps.empty()) throw EmptyImage("empty lamina");
    const auto& comp = comps.front();
    const BinaryImage mask = raster::component_mask(lamina, comp);

    const int height = comp.max_y - comp.min_y + 1;
    const int band_bottom = comp.min_y + std::max(1, height / 4);

    // Upper envelope: topmost lamina pixel per column.
    const int span = comp.max_x - comp.min_x + 1;
    std::vector<int> env(span, -1);
    for (int x = comp.min_x; x <= comp.max_x; ++x) {
        for (int y = comp.min_y; y <= comp.max_y; ++y) {
            if (mask.at(x, y)) {
                env[x - comp.min_x] = y;
                break;
            }
        }
    }

    // Columns whose envelope reaches into the top-25% band.
    int lo = -1, hi = -1;
    for (int i = 0; i < span; ++i) {
        if (env[i] >= 0 && env[i] <= band_bottom) {
            if (lo < 0) lo = i;
            hi = i;
        }
    }

    ApexDetection out;
    if (lo >= 0 && hi - lo >= 2) {
        // A notch is an interior local minimum of the upper edge: a column
        // whose envelope dips below strictly higher envelope values on both
        // sides. The prominence floor rejects margin teeth and aliasing; a
        // real apical notch is far deeper than any tooth.
        const int slack = std::max(2, static_cast<int>(0.045 * height));
        int left_top = env[lo];  // running topmost (smallest y) seen left of i
        int best = -1, best_prominence = 0;
        std::vector<int> right_top(span, std::numeric_limits<int>::max());
        int running = std::numeric_limits<int>::max();
        for (int i = hi; i > lo; --i) {
            right_top[i] = running;
            if (env[i] >= 0) running = std::min(running, env[i]);
        }
        for (int i = lo + 1; i < hi; ++i) {
            if (env[i - 1] >= 0) left_top = std::min(left_top, env[i - 1]);
            if (env[i] < 0 || right_top[i] == std::numeric_limits<int>::max()) continue;
            const int prominence = std::min(env[i] - left_top, env[i] - right_top[i]);
            if (prominence > best_prominence) {
                best_prominence = prominence;
                best = i;
            }
        }
        if (best >= 0 && best_prominence > slack) {
            // the apex is where the midvein meets the margin: the notch must
            // lie along the insertion -> top direction (in image coordinates
            // y is down, hence the sign flips)
            const double mid_x = (info.insertion_points[0].x + info.insertion_points[1].x) * 0.5;
            const double mid_y = (info.insertion_points[0].y + info.insertion_points[1].y) * 0.5;
            raster::PixelPoint top{comp.min_x, comp.min_y};
            for (int i = 0; i < span; ++i) {
                if (env[i] == comp.min_y) {
                    top = {comp.min_x + i, env[i]};
                    break;
                }
            }
            const geom::Point2 to_top{top.x - mid_x, mid_y - static_cast<double>(top.y)};
            const geom::Point2 to_notch{comp.min_x + best - mid_x,
                                        mid_y - static_cast<double>(env[best])};
            if (geom::norm(to_top) > 0.0 && geom::norm(to_notch) > 0.0 &&
                geom::angle_between(to_top, to_notch) <= 8.0) {
                out.apex = {comp.min_x + best, env[best]};
                out.reflex = true;
                return out;
            }
        }
    }

    // apex at the top: topmost pixel, smallest x on ties
    for (int y = comp.min_y; y <= comp.max_y; ++y) {
        for (int x = comp.min_x; x <= comp.max_x; ++x) {
            if (mask.at(x, y)) {
                out.apex = {x, y};
                out.reflex = false;
                return out;
            }
        }
    }
    throw EmptyImage("empty lamina");
}

LeafGeometry build_geometry(const raster::BinaryImage& lamina, raster::PixelPoint apex,
                            const PetioleInfo& info, bool reflex_apex, bool reflex_base,
                            int image_width) {
    const auto contour = raster::trace_boundary(lamina);
    const auto& pts = contour.points;

    // locate the apex on the contour (it is a boundary pixel; fall back to
    // the nearest contour pixel if subtraction nicked it)
    std::size_t apex_idx = 0;
    long best = std::numeric_limits<long>::max();
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const long dx = pts[i].x - apex.x;
        const long dy = pts[i].y - apex.y;
        const long d2 = dx * dx + dy * dy;
        if (d2 < best) {
            best = d2;
            apex_idx = i;
        }
    }

    const double flip = static_cast<double>(lamina.height - 1);
    const auto to_cartesian = [flip](double x, double y) { return Point2{x, flip - y}; };

    std::vector<Point2> chain;
    chain.reserve(pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const PixelPoint& p = pts[(apex_idx + i) % pts.size()];
        const Point2 c = to_cartesian(p.x, p.y);
        if (chain.empty() || !(chain.back() == c)) chain.push_back(c);
    }
    while (chain.size() > 1 && chain.front() == chain.back()) chain.pop_back();
    if (chain.size() < 3) throw DegenerateShape("contour too small");

    const Point2 apex_c = chain.front();
    const Point2 ins0 = to_cartesian(info.insertion_points[0].x, info.insertion_points[0].y);
    const Point2 ins1 = to_cartesian(info.insertion_points[1].x, info.insertion_points[1].y);
    const Point2 mid{(ins0.x + ins1.x) * 0.5, (ins0.y + ins1.y) * 0.5};

    const Point2 axis = apex_c - mid;
    if (geom::norm(axis) == 0.0) throw DegenerateShape("apex coincides with insertion midpoint");

    // rotate about the insertion midpoint so the apex lies straight above it
    const double beta = std::numbers::pi / 2.0 - std::atan2(axis.y, axis.x);
    const double cb = std::cos(beta), sb = std::sin(beta);
    const auto rotate = [&](const Point2& p) {
        const Point2 d = p - mid;
        return Point2{mid.x + d.x * cb - d.y * sb, mid.y + d.x * sb + d.y * cb};
    };
    for (Point2& p : chain) p = rotate(p);

    // arc-length resample starting exactly at the apex vertex
    std::vector<double> t(chain.size() + 1, 0.0);
    for (std::size_t i = 0; i < chain.size(); ++i) {
        t[i + 1] = t[i] + geom::distance(chain[i], chain[(i + 1) % chain.size()]);
    }
    const double total = t.back();
    if (total <= 0.0) throw DegenerateShape("zero-length contour");

    std::vector<Point2> sampled;
    sampled.reserve(kBoundarySamples);
    std::size_t edge = 0;
    for (std::size_t j = 0; j < kBoundarySamples; ++j) {
        const double s = total * static_cast<double>(j) / static_cast<double>(kBoundarySamples);
        while (edge + 1 < t.size() - 1 && t[edge + 1] <= s) ++edge;
        const double len = t[edge + 1] - t[edge];
        const double f = len > 0.0 ? (s - t[edge]) / len : 0.0;
        const Point2& a = chain[edge];
        const Point2& b = chain[(edge + 1) % chain.size()];
        const Point2 p{a.x + f * (b.x - a.x), a.y + f * (b.y - a.y)};
        if (sampled.empty() || !(sampled.back() == p)) sampled.push_back(p);
    }
    while (sampled.size() > 1 && sampled.front() == sampled.back()) sampled.pop_back();
    if (sampled.size() < 3) throw DegenerateShape("resampled boundary collapsed");

    geom::Polygon boundary{std::move(sampled)};
    if (geom::signed_area(boundary) < 0.0) {
        std::reverse(boundary.vertices.begin() + 1, boundary.vertices.end());
    }

    LeafGeometry g;
    g.apex = boundary.vertices.front();
    g.insertion_points = {rotate(ins0), rotate(ins1)};
    g.reflex_apex = reflex_apex;
    g.reflex_base = reflex_base;
    double min_y = boundary.vertices[0].y, max_y = boundary.vertices[0].y;
    for (const Point2& p : boundary.vertices) {
        min_y = std::min(min_y, p.y);
        max_y = std::max(max_y, p.y);
    }
    g.lamina_length = max_y - min_y;
    g.centroid = geom::polygon_centroid(boundary);
    g.image_width = image_width;
    g.boundary = std::move(boundary);
    return g;
}

PipelineResult process(const io::RasterData& image, bool leaf_is_dark) {
    PipelineResult r;
    r.segmented = segment(image, leaf_is_dark);
    auto removal = remove_petiole(r.segmented);
    r.lamina = std::move(removal.lamina);
    r.petiole = std::move(removal.info);
    const bool reflex_base = detect_basal_extension(r.lamina, r.petiole);
    const ApexDetection apex = detect_apex(r.lamina, r.petiole);
    r.geometry = build_geometry(r.lamina, apex.apex, r.petiole, apex.reflex, reflex_base,
                                image.width);
    return r;
}

}  // namespace leafarch::pipeline
