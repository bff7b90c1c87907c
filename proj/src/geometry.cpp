#include "leafarch/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace leafarch::geom {

double dot(const Point2& a, const Point2& b) { return a.x * b.x + a.y * b.y; }

double cross(const Point2& a, const Point2& b) { return a.x * b.y - a.y * b.x; }

double norm(const Point2& v) { return std::hypot(v.x, v.y); }

double distance(const Point2& a, const Point2& b) { return norm(b - a); }

double cross3(const Point2& a, const Point2& b, const Point2& c) {
    return (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x);
}

namespace {

double triangle_area(const Point2& a, const Point2& b, const Point2& c) {
    return std::abs(cross3(a, b, c)) * 0.5;
}

bool lex_less(const Point2& a, const Point2& b) {
    return a.x < b.x || (a.x == b.x && a.y < b.y);
}

}  // namespace

Polygon make_polygon(std::vector<Point2> points) {
    std::vector<Point2> v;
    v.reserve(points.size());
    for (const Point2& p : points) {
        if (v.empty() || !(v.back() == p)) v.push_back(p);
    }
    while (v.size() > 1 && v.front() == v.back()) v.pop_back();
    if (v.size() < 3) throw DegenerateShape("polygon needs >= 3 distinct vertices");

    Polygon poly{std::move(v)};
    if (signed_area(poly) < 0.0) {
        std::reverse(poly.vertices.begin() + 1, poly.vertices.end());
    }
    return poly;
}

double signed_area(const Polygon& p) {
    double a = 0.0;
    const std::size_t n = p.size();
    for (std::size_t i = 0; i < n; ++i) {
        const Point2& u = p.vertices[i];
        const Point2& w = p.vertices[(i + 1) % n];
        a += u.x * w.y - w.x * u.y;
    }
    return a * 0.5;
}

double polygon_area(const Polygon& p) { return std::abs(signed_area(p)); }

double polygon_perimeter(const Polygon& p) {
    double len = 0.0;
    const std::size_t n = p.size();
    for (std::size_t i = 0; i < n; ++i) {
        len += distance(p.vertices[i], p.vertices[(i + 1) % n]);
    }
    return len;
}

Point2 polygon_centroid(const Polygon& p) {
    double a = 0.0, cx = 0.0, cy = 0.0;
    const std::size_t n = p.size();
    for (std::size_t i = 0; i < n; ++i) {
        const Point2& u = p.vertices[i];
        const Point2& w = p.vertices[(i + 1) % n];
        const double c = u.x * w.y - w.x * u.y;
        a += c;
        cx += (u.x + w.x) * c;
        cy += (u.y + w.y) * c;
    }
    if (a == 0.0) throw DegenerateShape("centroid of zero-area polygon");
    a *= 0.5;
    return {cx / (6.0 * a), cy / (6.0 * a)};
}

// ---------------------------------------------------------------------------
// Convex hull (QuickHull)
// ---------------------------------------------------------------------------

namespace {

// Emits the hull vertices strictly right of p->q, in hull order from p to q.
void hull_side(const std::vector<Point2>& pts, const Point2& p, const Point2& q,
               const std::vector<std::size_t>& subset, std::vector<Point2>& out) {
    if (subset.empty()) return;

    std::size_t far = subset[0];
    double best = 0.0;
    bool first = true;
    for (std::size_t idx : subset) {
        const double d = -cross3(p, q, pts[idx]);  // > 0: right of p->q
        if (first || d > best ||
            (d == best && lex_less(pts[idx], pts[far]))) {
            best = d;
            far = idx;
            first = false;
        }
    }
    const Point2 f = pts[far];

    std::vector<std::size_t> s1, s2;
    for (std::size_t idx : subset) {
        if (cross3(p, f, pts[idx]) < 0.0) s1.push_back(idx);
        else if (cross3(f, q, pts[idx]) < 0.0) s2.push_back(idx);
    }
    hull_side(pts, p, f, s1, out);
    out.push_back(f);
    hull_side(pts, f, q, s2, out);
}

}  // namespace

Polygon convex_hull(const std::vector<Point2>& points) {
    if (points.size() < 3) throw DegenerateShape("convex hull needs >= 3 points");

    std::size_t lo = 0, hi = 0;
    for (std::size_t i = 1; i < points.size(); ++i) {
        if (lex_less(points[i], points[lo])) lo = i;
        if (lex_less(points[hi], points[i])) hi = i;
    }
    const Point2 a = points[lo];
    const Point2 b = points[hi];
    if (a == b) throw DegenerateShape("convex hull of coincident points");

    std::vector<std::size_t> below, above;
    for (std::size_t i = 0; i < points.size(); ++i) {
        const double c = cross3(a, b, points[i]);
        if (c < 0.0) below.push_back(i);
        else if (c > 0.0) above.push_back(i);
    }

    // Counter-clockwise: a, lower chain to b, then upper chain back to a.
    std::vector<Point2> hull;
    hull.push_back(a);
    hull_side(points, a, b, below, hull);
    hull.push_back(b);
    hull_side(points, b, a, above, hull);

    if (hull.size() < 3) throw DegenerateShape("all points collinear");

    // Merge collinear runs so straight sections become single edges. The
    // tolerance is relative to the hull extent; genuinely curved samples sit
    // orders of magnitude above it.
    double min_x = hull[0].x, max_x = hull[0].x, min_y = hull[0].y, max_y = hull[0].y;
    for (const Point2& p : hull) {
        min_x = std::min(min_x, p.x);
        max_x = std::max(max_x, p.x);
        min_y = std::min(min_y, p.y);
        max_y = std::max(max_y, p.y);
    }
    const double diag_sq = (max_x - min_x) * (max_x - min_x) + (max_y - min_y) * (max_y - min_y);
    const double tol = 1e-12 * diag_sq;

    bool changed = true;
    while (changed && hull.size() > 3) {
        changed = false;
        std::vector<Point2> kept;
        kept.reserve(hull.size());
        const std::size_t n = hull.size();
        for (std::size_t i = 0; i < n; ++i) {
            const Point2& prev = hull[(i + n - 1) % n];
            const Point2& cur = hull[i];
            const Point2& next = hull[(i + 1) % n];
            if (std::abs(cross3(prev, cur, next)) * 0.5 <= tol && kept.size() + (n - i) > 3) {
                changed = true;
                continue;
            }
            kept.push_back(cur);
        }
        hull = std::move(kept);
    }
    if (hull.size() < 3) throw DegenerateShape("all points collinear");

    // Canonical start: lexicographically smallest vertex.
    std::size_t start = 0;
    for (std::size_t i = 1; i < hull.size(); ++i) {
        if (lex_less(hull[i], hull[start])) start = i;
    }
    std::rotate(hull.begin(), hull.begin() + static_cast<std::ptrdiff_t>(start), hull.end());
    return Polygon{std::move(hull)};
}

// ---------------------------------------------------------------------------
// Polygon decimation
// ---------------------------------------------------------------------------

namespace {

// Circular doubly-linked vertex list with accumulated removal errors.
struct Decimator {
    const std::vector<Point2>& v;
    std::vector<std::size_t> prev, next;
    std::vector<double> acc;
    std::vector<char> alive;
    std::size_t n_alive;
    double running_signed_area;

    explicit Decimator(const Polygon& p)
        : v(p.vertices),
          prev(p.size()),
          next(p.size()),
          acc(p.size(), 0.0),
          alive(p.size(), 1),
          n_alive(p.size()),
          running_signed_area(signed_area(p)) {
        const std::size_t n = p.size();
        for (std::size_t i = 0; i < n; ++i) {
            prev[i] = (i + n - 1) % n;
            next[i] = (i + 1) % n;
        }
    }

    double score(std::size_t i) const {
        return triangle_area(v[prev[i]], v[i], v[next[i]]) + acc[i];
    }

    // Signed area change caused by removing vertex i.
    double removal_area_delta(std::size_t i) const {
        return -cross3(v[prev[i]], v[i], v[next[i]]) * 0.5;
    }

    std::size_t lowest() const {
        std::size_t best = std::numeric_limits<std::size_t>::max();
        double best_score = 0.0;
        for (std::size_t i = 0; i < v.size(); ++i) {
            if (!alive[i]) continue;
            const double s = score(i);
            if (best == std::numeric_limits<std::size_t>::max() || s < best_score) {
                best = i;
                best_score = s;
            }
        }
        return best;
    }

    void remove(std::size_t i) {
        const double e = score(i);
        acc[prev[i]] += e;
        acc[next[i]] += e;
        running_signed_area += removal_area_delta(i);
        next[prev[i]] = next[i];
        prev[next[i]] = prev[i];
        alive[i] = 0;
        --n_alive;
    }

    Polygon result() const {
        std::vector<Point2> out;
        out.reserve(n_alive);
        for (std::size_t i = 0; i < v.size(); ++i) {
            if (alive[i]) out.push_back(v[i]);
        }
        return Polygon{std::move(out)};
    }
};

}  // namespace

Polygon decimate_to_fraction(const Polygon& p, double retain) {
    if (!(retain > 0.0 && retain <= 1.0)) throw Error("retain fraction must be in (0, 1]");
    const std::size_t n = p.size();
    const auto target = static_cast<std::size_t>(
        std::max(3.0, std::ceil(retain * static_cast<double>(n) - 1e-9)));
    if (target >= n) return p;

    Decimator d(p);
    while (d.n_alive > target) d.remove(d.lowest());
    return d.result();
}

Polygon decimate_by_area_budget(const Polygon& p, double max_area_delta) {
    if (!(max_area_delta > 0.0 && max_area_delta < 1.0)) {
        throw Error("area budget must be in (0, 1)");
    }
    const double orig = polygon_area(p);
    if (orig == 0.0) return p;

    Decimator d(p);
    while (d.n_alive > 3) {
        const std::size_t i = d.lowest();
        const double after = std::abs(d.running_signed_area + d.removal_area_delta(i));
        if (std::abs(after - orig) / orig > max_area_delta) break;
        d.remove(i);
    }
    return d.result();
}

// ---------------------------------------------------------------------------
// Elliptic Fourier descriptors
// ---------------------------------------------------------------------------

EfdCoefficients efd_analyze(const Polygon& contour, std::size_t n_harmonics) {
    const std::size_t m = contour.size();
    if (n_harmonics < 1) throw Error("need at least one harmonic");
    if (m < 2 * n_harmonics + 1) {
        throw InsufficientPoints("contour has too few vertices for harmonic count");
    }
    const auto& v = contour.vertices;

    std::vector<double> dx(m), dy(m), dt(m), t(m + 1, 0.0);
    for (std::size_t i = 0; i < m; ++i) {
        const Point2& a = v[i];
        const Point2& b = v[(i + 1) % m];
        dx[i] = b.x - a.x;
        dy[i] = b.y - a.y;
        dt[i] = distance(a, b);
        t[i + 1] = t[i] + dt[i];
    }
    const double total = t[m];
    if (total <= 0.0) throw DegenerateShape("zero-length contour");

    EfdCoefficients out;
    out.n_source_points = m;
    out.harmonics.resize(n_harmonics);

    const double pi = std::numbers::pi;
    for (std::size_t k = 1; k <= n_harmonics; ++k) {
        const double w = 2.0 * pi * static_cast<double>(k) / total;
        const double scale = total / (2.0 * static_cast<double>(k * k) * pi * pi);
        double a = 0, b = 0, c = 0, d = 0;
        for (std::size_t i = 0; i < m; ++i) {
            const double c1 = std::cos(w * t[i + 1]) - std::cos(w * t[i]);
            const double s1 = std::sin(w * t[i + 1]) - std::sin(w * t[i]);
            a += dx[i] / dt[i] * c1;
            b += dx[i] / dt[i] * s1;
            c += dy[i] / dt[i] * c1;
            d += dy[i] / dt[i] * s1;
        }
        out.harmonics[k - 1] = {a * scale, b * scale, c * scale, d * scale};
    }

    // dc terms: mean of the piecewise-linear x(t), y(t) over one period.
    double a0 = 0, c0 = 0, sum_dx = 0, sum_dy = 0;
    for (std::size_t i = 0; i < m; ++i) {
        const double xi = sum_dx - dx[i] / dt[i] * t[i];
        const double delta = sum_dy - dy[i] / dt[i] * t[i];
        a0 += dx[i] / (2.0 * dt[i]) * (t[i + 1] * t[i + 1] - t[i] * t[i]) + xi * dt[i];
        c0 += dy[i] / (2.0 * dt[i]) * (t[i + 1] * t[i + 1] - t[i] * t[i]) + delta * dt[i];
        sum_dx += dx[i];
        sum_dy += dy[i];
    }
    out.a0 = v[0].x + a0 / total;
    out.c0 = v[0].y + c0 / total;
    return out;
}

Point2 efd_evaluate(const EfdCoefficients& c, double u) {
    const double pi = std::numbers::pi;
    double x = c.a0, y = c.c0;
    for (std::size_t k = 1; k <= c.harmonics.size(); ++k) {
        const auto& h = c.harmonics[k - 1];
        const double phase = 2.0 * pi * static_cast<double>(k) * u;
        const double cs = std::cos(phase);
        const double sn = std::sin(phase);
        x += h.a * cs + h.b * sn;
        y += h.c * cs + h.d * sn;
    }
    return {x, y};
}

Polygon efd_reconstruct(const EfdCoefficients& c, std::size_t n_points) {
    if (n_points < 3) throw Error("reconstruction needs >= 3 points");
    if (c.harmonics.empty()) throw Error("no harmonics");

    std::vector<Point2> pts;
    pts.reserve(n_points);
    for (std::size_t j = 0; j < n_points; ++j) {
        pts.push_back(efd_evaluate(c, static_cast<double>(j) / static_cast<double>(n_points)));
    }

    std::vector<Point2> dedup;
    dedup.reserve(pts.size());
    for (const Point2& p : pts) {
        if (dedup.empty() || !(dedup.back() == p)) dedup.push_back(p);
    }
    while (dedup.size() > 1 && dedup.front() == dedup.back()) dedup.pop_back();
    if (dedup.size() < 3) throw DegenerateShape("reconstruction collapsed");
    return Polygon{std::move(dedup)};
}

CurvatureStats curvature_stats(const std::vector<Point2>& open_chain) {
    if (open_chain.size() < 3) throw DegenerateShape("chain needs >= 3 points");

    double min_y = open_chain[0].y, max_y = open_chain[0].y;
    for (const Point2& p : open_chain) {
        min_y = std::min(min_y, p.y);
        max_y = std::max(max_y, p.y);
    }
    const double eps = 1e-9 * (max_y - min_y);

    CurvatureStats s;
    s.n_total = open_chain.size() - 2;
    for (std::size_t i = 1; i + 1 < open_chain.size(); ++i) {
        const double d2y = open_chain[i - 1].y - 2.0 * open_chain[i].y + open_chain[i + 1].y;
        if (d2y > eps) ++s.n_positive;
        else if (d2y < -eps) ++s.n_negative;
    }
    s.psd = static_cast<double>(s.n_positive) / static_cast<double>(s.n_total);
    s.nsd = static_cast<double>(s.n_negative) / static_cast<double>(s.n_total);
    return s;
}

double angle_between(const Point2& v1, const Point2& v2) {
    if (norm(v1) == 0.0 || norm(v2) == 0.0) throw DegenerateShape("zero direction vector");
    const double angle = std::atan2(std::abs(cross(v1, v2)), dot(v1, v2));
    return angle * 180.0 / std::numbers::pi;
}

}  // namespace leafarch::geom
