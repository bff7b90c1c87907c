#include "leafarch/raster.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <queue>

namespace leafarch::raster {

std::size_t BinaryImage::count() const {
    std::size_t n = 0;
    for (std::uint8_t p : pixels) n += p != 0;
    return n;
}

BinaryImage make_binary(int width, int height) {
    BinaryImage img;
    img.width = width;
    img.height = height;
    img.pixels.assign(static_cast<std::size_t>(width) * height, 0);
    return img;
}

GrayImage to_gray(const RgbImage& rgb) {
    if (rgb.width < 1 || rgb.height < 1 || rgb.pixels.empty()) {
        throw EmptyImage("empty RGB image");
    }
    GrayImage g;
    g.width = rgb.width;
    g.height = rgb.height;
    g.pixels.resize(static_cast<std::size_t>(rgb.width) * rgb.height);
    for (std::size_t i = 0; i < g.pixels.size(); ++i) {
        const double r = rgb.pixels[3 * i];
        const double gg = rgb.pixels[3 * i + 1];
        const double b = rgb.pixels[3 * i + 2];
        const double y = 0.299 * r + 0.587 * gg + 0.114 * b;
        g.pixels[i] = static_cast<std::uint8_t>(std::lround(y));
    }
    return g;
}

int otsu_threshold(const GrayImage& img) {
    if (img.pixels.empty()) throw EmptyImage("empty image");

    std::array<std::size_t, 256> hist{};
    for (std::uint8_t p : img.pixels) ++hist[p];

    const double total = static_cast<double>(img.pixels.size());
    double total_sum = 0.0;
    for (int v = 0; v < 256; ++v) total_sum += static_cast<double>(v) * hist[v];

    int min_v = 255, max_v = 0;
    for (int v = 0; v < 256; ++v) {
        if (hist[v] > 0) {
            min_v = std::min(min_v, v);
            max_v = std::max(max_v, v);
        }
    }
    if (min_v == max_v) return min_v;

    int best_t = 0;
    double best_var = -1.0;
    double w0 = 0.0, sum0 = 0.0;
    for (int t = 0; t < 256; ++t) {
        w0 += hist[t];
        sum0 += static_cast<double>(t) * hist[t];
        const double w1 = total - w0;
        if (w0 == 0.0 || w1 == 0.0) continue;
        const double mu0 = sum0 / w0;
        const double mu1 = (total_sum - sum0) / w1;
        const double var = w0 * w1 * (mu0 - mu1) * (mu0 - mu1);
        if (var > best_var) {
            best_var = var;
            best_t = t;
        }
    }
    return best_t;
}

BinaryImage binarize(const GrayImage& img, int t, bool leaf_is_dark) {
    BinaryImage out = make_binary(img.width, img.height);
    for (std::size_t i = 0; i < img.pixels.size(); ++i) {
        const bool dark = img.pixels[i] <= t;
        out.pixels[i] = (dark == leaf_is_dark) ? 1 : 0;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Morphology via exact squared Euclidean distance transform
// ---------------------------------------------------------------------------

namespace {

constexpr std::int64_t kInf = std::numeric_limits<std::int64_t>::max() / 4;

// Felzenszwalb & Huttenlocher 1-D squared distance transform over the lower
// envelope of parabolas. Entries at kInf are skipped; all finite quantities
// are integers far below 2^53, so the double breakpoints are exact.
void dt_1d(const std::vector<std::int64_t>& f, std::vector<std::int64_t>& out,
           std::vector<int>& v, std::vector<double>& z) {
    const int n = static_cast<int>(f.size());
    int k = -1;
    for (int q = 0; q < n; ++q) {
        if (f[q] >= kInf) continue;
        double s = 0.0;
        while (k >= 0) {
            const int p = v[k];
            s = (static_cast<double>(f[q] - f[p]) + static_cast<double>(q) * q -
                 static_cast<double>(p) * p) /
                (2.0 * (q - p));
            if (s <= z[k]) --k;
            else break;
        }
        if (k < 0) {
            k = 0;
            v[0] = q;
            z[0] = -1e30;
            z[1] = 1e30;
        } else {
            ++k;
            v[k] = q;
            z[k] = s;
            z[k + 1] = 1e30;
        }
    }
    if (k < 0) {
        std::fill(out.begin(), out.end(), kInf);
        return;
    }
    int j = 0;
    for (int q = 0; q < n; ++q) {
        while (z[j + 1] < q) ++j;
        const int p = v[j];
        out[q] = static_cast<std::int64_t>(q - p) * (q - p) + f[p];
    }
}

// Squared distance from every pixel to the nearest site pixel (kInf if none).
std::vector<std::int64_t> edt_squared(const BinaryImage& sites) {
    const int w = sites.width, h = sites.height;
    std::vector<std::int64_t> dist(static_cast<std::size_t>(w) * h);

    // rows: squared distance to the nearest site within the row
    {
        std::vector<std::int64_t> f(w), out(w);
        std::vector<double> z(w + 1);
        std::vector<int> v(w);
        for (int y = 0; y < h; ++y) {
            for (int x = 0; x < w; ++x) f[x] = sites.at(x, y) ? 0 : kInf;
            dt_1d(f, out, v, z);
            for (int x = 0; x < w; ++x) dist[static_cast<std::size_t>(y) * w + x] = out[x];
        }
    }
    // columns: combine row distances into full 2-D squared distances
    {
        std::vector<std::int64_t> f(h), out(h);
        std::vector<double> z(h + 1);
        std::vector<int> v(h);
        for (int x = 0; x < w; ++x) {
            for (int y = 0; y < h; ++y) f[y] = dist[static_cast<std::size_t>(y) * w + x];
            dt_1d(f, out, v, z);
            for (int y = 0; y < h; ++y) dist[static_cast<std::size_t>(y) * w + x] = out[y];
        }
    }
    return dist;
}

}  // namespace

BinaryImage erode(const BinaryImage& img, int diameter) {
    if (diameter < 1) throw Error("element diameter must be >= 1");
    // keep p iff no background pixel lies within diameter/2:
    // 4 * dist_to_bg^2 > diameter^2
    const auto dist = edt_squared(complement(img));
    const std::int64_t d2 = static_cast<std::int64_t>(diameter) * diameter;
    BinaryImage out = make_binary(img.width, img.height);
    for (std::size_t i = 0; i < out.pixels.size(); ++i) {
        const std::int64_t ds = dist[i];
        out.pixels[i] = (ds >= kInf || 4 * ds > d2) ? 1 : 0;
    }
    return out;
}

BinaryImage dilate(const BinaryImage& img, int diameter) {
    if (diameter < 1) throw Error("element diameter must be >= 1");
    const auto dist = edt_squared(img);
    const std::int64_t d2 = static_cast<std::int64_t>(diameter) * diameter;
    BinaryImage out = make_binary(img.width, img.height);
    for (std::size_t i = 0; i < out.pixels.size(); ++i) {
        const std::int64_t ds = dist[i];
        out.pixels[i] = (ds < kInf && 4 * ds <= d2) ? 1 : 0;
    }
    return out;
}

BinaryImage open_disk(const BinaryImage& img, int diameter) {
    return dilate(erode(img, diameter), diameter);
}

BinaryImage subtract(const BinaryImage& a, const BinaryImage& b) {
    if (a.width != b.width || a.height != b.height) {
        throw ShapeMismatch("image dimensions differ");
    }
    BinaryImage out = make_binary(a.width, a.height);
    for (std::size_t i = 0; i < out.pixels.size(); ++i) {
        out.pixels[i] = (a.pixels[i] != 0 && b.pixels[i] == 0) ? 1 : 0;
    }
    return out;
}

BinaryImage complement(const BinaryImage& img) {
    BinaryImage out = make_binary(img.width, img.height);
    for (std::size_t i = 0; i < out.pixels.size(); ++i) {
        out.pixels[i] = img.pixels[i] ? 0 : 1;
    }
    return out;
}

std::vector<Component> connected_components(const BinaryImage& img) {
    std::vector<Component> comps;
    std::vector<char> seen(img.pixels.size(), 0);
    std::vector<PixelPoint> stack;

    for (int y = 0; y < img.height; ++y) {
        for (int x = 0; x < img.width; ++x) {
            const std::size_t idx = static_cast<std::size_t>(y) * img.width + x;
            if (!img.pixels[idx] || seen[idx]) continue;

            Component c;
            c.min_x = c.max_x = x;
            c.min_y = c.max_y = y;
            seen[idx] = 1;
            stack.push_back({x, y});
            while (!stack.empty()) {
                const PixelPoint p = stack.back();
                stack.pop_back();
                c.pixels.push_back(p);
                c.min_x = std::min(c.min_x, p.x);
                c.max_x = std::max(c.max_x, p.x);
                c.min_y = std::min(c.min_y, p.y);
                c.max_y = std::max(c.max_y, p.y);
                for (int dy = -1; dy <= 1; ++dy) {
                    for (int dx = -1; dx <= 1; ++dx) {
                        if (dx == 0 && dy == 0) continue;
                        const int nx = p.x + dx, ny = p.y + dy;
                        if (!img.in_bounds(nx, ny)) continue;
                        const std::size_t nidx = static_cast<std::size_t>(ny) * img.width + nx;
                        if (img.pixels[nidx] && !seen[nidx]) {
                            seen[nidx] = 1;
                            stack.push_back({nx, ny});
                        }
                    }
                }
            }
            c.area = c.pixels.size();
            comps.push_back(std::move(c));
        }
    }
    std::stable_sort(comps.begin(), comps.end(),
                     [](const Component& a, const Component& b) { return a.area > b.area; });
    return comps;
}

BinaryImage component_mask(const BinaryImage& like, const Component& comp) {
    BinaryImage out = make_binary(like.width, like.height);
    for (const PixelPoint& p : comp.pixels) out.set(p.x, p.y, true);
    return out;
}

PixelContour trace_boundary(const BinaryImage& img) {
    const auto comps = connected_components(img);
    if (comps.empty()) throw EmptyImage("no foreground to trace");
    const Component& comp = comps.front();
    if (comp.area < 3) throw EmptyImage("largest component too small to trace");

    const BinaryImage mask = component_mask(img, comp);
    const auto fg = [&](int x, int y) { return mask.in_bounds(x, y) && mask.at(x, y); };

    // Start at the first foreground pixel in row-major scan order (topmost,
    // then leftmost); its west neighbor is guaranteed background.
    PixelPoint start{comp.pixels[0].x, comp.pixels[0].y};
    for (const PixelPoint& p : comp.pixels) {
        if (p.y < start.y || (p.y == start.y && p.x < start.x)) start = p;
    }

    // Clockwise in image coordinates (y down): E SE S SW W NW N NE.
    static constexpr std::array<std::array<int, 2>, 8> dirs = {
        {{1, 0}, {1, 1}, {0, 1}, {-1, 1}, {-1, 0}, {-1, -1}, {0, -1}, {1, -1}}};
    const auto dir_index = [](int dx, int dy) {
        for (int i = 0; i < 8; ++i) {
            if (dirs[i][0] == dx && dirs[i][1] == dy) return i;
        }
        return 0;
    };

    PixelContour contour;
    PixelPoint cur = start;
    int back_dir = 4;  // backtrack direction: west
    const int first_back = back_dir;
    const std::size_t limit = 4 * img.pixels.size() + 16;

    while (true) {
        contour.points.push_back(cur);
        int found = -1;
        for (int k = 1; k <= 8; ++k) {
            const int nd = (back_dir + k) % 8;
            const int nx = cur.x + dirs[nd][0];
            const int ny = cur.y + dirs[nd][1];
            if (fg(nx, ny)) {
                found = nd;
                break;
            }
        }
        if (found < 0) break;  // isolated pixel (cannot happen for area >= 3 after the k loop)

        const PixelPoint next{cur.x + dirs[found][0], cur.y + dirs[found][1]};
        // new backtrack: the direction from `next` looking back at the last
        // background neighbor examined before `found`
        const int prev_dir = (found + 7) % 8;
        const PixelPoint back{cur.x + dirs[prev_dir][0], cur.y + dirs[prev_dir][1]};
        cur = next;
        back_dir = dir_index(back.x - cur.x, back.y - cur.y);

        if (cur == start && back_dir == first_back) break;  // Jacob's criterion
        if (contour.points.size() > limit) throw Error("boundary trace did not terminate");
    }
    return contour;
}

BinaryImage fill_holes(const BinaryImage& img) {
    BinaryImage reach = make_binary(img.width, img.height);
    std::vector<PixelPoint> stack;
    const auto push = [&](int x, int y) {
        if (!img.in_bounds(x, y)) return;
        const std::size_t idx = static_cast<std::size_t>(y) * img.width + x;
        if (img.pixels[idx] == 0 && reach.pixels[idx] == 0) {
            reach.pixels[idx] = 1;
            stack.push_back({x, y});
        }
    };
    for (int x = 0; x < img.width; ++x) {
        push(x, 0);
        push(x, img.height - 1);
    }
    for (int y = 0; y < img.height; ++y) {
        push(0, y);
        push(img.width - 1, y);
    }
    while (!stack.empty()) {
        const PixelPoint p = stack.back();
        stack.pop_back();
        push(p.x - 1, p.y);
        push(p.x + 1, p.y);
        push(p.x, p.y - 1);
        push(p.x, p.y + 1);
    }

    BinaryImage out = img;
    for (std::size_t i = 0; i < out.pixels.size(); ++i) {
        if (out.pixels[i] == 0 && reach.pixels[i] == 0) out.pixels[i] = 1;
    }
    return out;
}

}  // namespace leafarch::raster
