// Independent brute-force oracles used to check the library implementations.
// Everything here is deliberately naive and shares no code with src/.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numeric>
#include <set>
#include <vector>

#include "leafarch/geometry.hpp"
#include "leafarch/raster.hpp"

namespace oracle {

using leafarch::geom::Point2;

/// Polygon area by fan triangulation from vertex 0.
inline double fan_area(const std::vector<Point2>& v) {
    double area = 0.0;
    for (std::size_t i = 1; i + 1 < v.size(); ++i) {
        const double ax = v[i].x - v[0].x, ay = v[i].y - v[0].y;
        const double bx = v[i + 1].x - v[0].x, by = v[i + 1].y - v[0].y;
        area += 0.5 * (ax * by - ay * bx);
    }
    return std::abs(area);
}

/// O(n^3) hull vertex set: a point is a hull vertex iff it is an endpoint of
/// an edge having every other point strictly on one side.
inline std::set<std::pair<double, double>> brute_hull_vertices(const std::vector<Point2>& pts) {
    std::set<std::pair<double, double>> hull;
    const std::size_t n = pts.size();
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (i == j) continue;
            bool all_left = true, all_right = true;
            for (std::size_t k = 0; k < n; ++k) {
                if (k == i || k == j) continue;
                const double c = (pts[j].x - pts[i].x) * (pts[k].y - pts[i].y) -
                                 (pts[j].y - pts[i].y) * (pts[k].x - pts[i].x);
                if (c <= 0) all_left = false;
                if (c >= 0) all_right = false;
                if (!all_left && !all_right) break;
            }
            if (all_left || all_right) {
                hull.insert({pts[i].x, pts[i].y});
                hull.insert({pts[j].x, pts[j].y});
            }
        }
    }
    return hull;
}

/// Exhaustive Otsu threshold: tries every t in [0, 255], recomputing class
/// weights and means from scratch; smallest maximizer wins.
inline int brute_otsu(const std::vector<std::uint8_t>& pixels) {
    std::vector<std::size_t> hist(256, 0);
    for (auto p : pixels) ++hist[p];

    int lo = 255, hi = 0;
    for (int v = 0; v < 256; ++v) {
        if (hist[v]) {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
    }
    if (lo >= hi) return lo;

    int best_t = 0;
    double best = -1.0;
    for (int t = 0; t < 256; ++t) {
        double w0 = 0, w1 = 0, s0 = 0, s1 = 0;
        for (int v = 0; v <= t; ++v) {
            w0 += static_cast<double>(hist[v]);
            s0 += static_cast<double>(v) * static_cast<double>(hist[v]);
        }
        for (int v = t + 1; v < 256; ++v) {
            w1 += static_cast<double>(hist[v]);
            s1 += static_cast<double>(v) * static_cast<double>(hist[v]);
        }
        if (w0 == 0 || w1 == 0) continue;
        const double m0 = s0 / w0, m1 = s1 / w1;
        const double var = w0 * w1 * (m0 - m1) * (m0 - m1);
        if (var > best) {
            best = var;
            best_t = t;
        }
    }
    return best_t;
}

/// Direct set-based erosion with the rasterized disk; pixels outside the
/// image count as foreground.
inline leafarch::raster::BinaryImage naive_erode(const leafarch::raster::BinaryImage& img,
                                                 int diameter) {
    using leafarch::raster::BinaryImage;
    BinaryImage out = leafarch::raster::make_binary(img.width, img.height);
    const int r = diameter / 2 + 1;
    for (int y = 0; y < img.height; ++y) {
        for (int x = 0; x < img.width; ++x) {
            bool keep = img.at(x, y);
            for (int dy = -r; keep && dy <= r; ++dy) {
                for (int dx = -r; keep && dx <= r; ++dx) {
                    if (4 * (dx * dx + dy * dy) > diameter * diameter) continue;
                    const int nx = x + dx, ny = y + dy;
                    if (!img.in_bounds(nx, ny)) continue;  // outside: foreground
                    if (!img.at(nx, ny)) keep = false;
                }
            }
            out.set(x, y, keep);
        }
    }
    return out;
}

/// Direct set-based dilation with the rasterized disk.
inline leafarch::raster::BinaryImage naive_dilate(const leafarch::raster::BinaryImage& img,
                                                  int diameter) {
    using leafarch::raster::BinaryImage;
    BinaryImage out = leafarch::raster::make_binary(img.width, img.height);
    const int r = diameter / 2 + 1;
    for (int y = 0; y < img.height; ++y) {
        for (int x = 0; x < img.width; ++x) {
            bool hit = false;
            for (int dy = -r; !hit && dy <= r; ++dy) {
                for (int dx = -r; !hit && dx <= r; ++dx) {
                    if (4 * (dx * dx + dy * dy) > diameter * diameter) continue;
                    const int nx = x + dx, ny = y + dy;
                    if (img.in_bounds(nx, ny) && img.at(nx, ny)) hit = true;
                }
            }
            out.set(x, y, hit);
        }
    }
    return out;
}

/// Union-find connected-components labeling (8-connectivity); returns the
/// sorted list of component sizes.
inline std::vector<std::size_t> union_find_component_sizes(
    const leafarch::raster::BinaryImage& img) {
    const int w = img.width, h = img.height;
    std::vector<int> parent(static_cast<std::size_t>(w) * h);
    std::iota(parent.begin(), parent.end(), 0);
    std::function<int(int)> find = [&](int a) {
        while (parent[a] != a) {
            parent[a] = parent[parent[a]];
            a = parent[a];
        }
        return a;
    };
    const auto unite = [&](int a, int b) { parent[find(a)] = find(b); };

    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            if (!img.at(x, y)) continue;
            const int idx = y * w + x;
            for (int dy = -1; dy <= 1; ++dy) {
                for (int dx = -1; dx <= 1; ++dx) {
                    const int nx = x + dx, ny = y + dy;
                    if ((dx == 0 && dy == 0) || !img.in_bounds(nx, ny)) continue;
                    if (img.at(nx, ny)) unite(idx, ny * w + nx);
                }
            }
        }
    }
    std::vector<std::size_t> count(static_cast<std::size_t>(w) * h, 0);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            if (img.at(x, y)) ++count[static_cast<std::size_t>(find(y * w + x))];
        }
    }
    std::vector<std::size_t> sizes;
    for (std::size_t c : count) {
        if (c > 0) sizes.push_back(c);
    }
    std::sort(sizes.begin(), sizes.end(), std::greater<>());
    return sizes;
}

}  // namespace oracle
