#pragma once

#include <cstddef>
#include <vector>

#include "leafarch/errors.hpp"

namespace leafarch::geom {

struct Point2 {
    double x = 0.0;
    double y = 0.0;

    Point2 operator+(const Point2& o) const { return {x + o.x, y + o.y}; }
    Point2 operator-(const Point2& o) const { return {x - o.x, y - o.y}; }
    Point2 operator*(double s) const { return {x * s, y * s}; }
    bool operator==(const Point2& o) const { return x == o.x && y == o.y; }
};

double dot(const Point2& a, const Point2& b);
double cross(const Point2& a, const Point2& b);
double norm(const Point2& v);
double distance(const Point2& a, const Point2& b);

/// cross(b - a, c - a); > 0 when c lies left of the directed line a->b.
double cross3(const Point2& a, const Point2& b, const Point2& c);

/// Closed polygon, implicit edge from the last vertex back to the first.
/// Stored counter-clockwise (positive signed area).
struct Polygon {
    std::vector<Point2> vertices;

    std::size_t size() const { return vertices.size(); }
    const Point2& operator[](std::size_t i) const { return vertices[i]; }
};

/// Builds a polygon from raw points: drops consecutive duplicates (and a
/// duplicated closing point), requires >= 3 distinct vertices, and reverses
/// a clockwise ring into counter-clockwise order keeping the first vertex.
Polygon make_polygon(std::vector<Point2> points);

double signed_area(const Polygon& p);

/// Absolute enclosed area; degenerate (collinear) rings give 0.
double polygon_area(const Polygon& p);

/// Sum of edge lengths including the closing edge.
double polygon_perimeter(const Polygon& p);

/// Area-weighted (shoelace) centroid. Throws DegenerateShape on zero area.
Point2 polygon_centroid(const Polygon& p);

/// Smallest convex polygon containing all points (QuickHull).
/// Output is counter-clockwise, strictly convex (collinear hull vertices are
/// merged), and starts at the lexicographically smallest vertex.
/// Throws DegenerateShape for < 3 points or all-collinear input.
Polygon convex_hull(const std::vector<Point2>& points);

/// Removes lowest-error vertices until max(3, ceil(retain * n)) remain.
/// A vertex's error is the area of the triangle it spans with its current
/// neighbors plus the accumulated error of previously deleted neighbors.
/// Ties remove the lowest original index. retain = 1 returns the input.
Polygon decimate_to_fraction(const Polygon& p, double retain);

/// Removes lowest-error vertices while the relative change in enclosed area
/// stays within max_area_delta; the removal that would exceed the budget is
/// rolled back. Stops at 3 vertices.
Polygon decimate_by_area_budget(const Polygon& p, double max_area_delta);

/// Elliptic Fourier coefficients of a closed contour (Kuhl-Giardina,
/// cumulative chord-length parameterization).
struct EfdCoefficients {
    struct Harmonic {
        double a = 0, b = 0, c = 0, d = 0;
    };
    std::vector<Harmonic> harmonics;
    double a0 = 0;  ///< dc term of x(t)
    double c0 = 0;  ///< dc term of y(t)
    std::size_t n_source_points = 0;
};

/// Throws InsufficientPoints unless the contour has >= 2*n_harmonics + 1
/// vertices.
EfdCoefficients efd_analyze(const Polygon& contour, std::size_t n_harmonics);

/// Samples the truncated Fourier series uniformly in the contour parameter.
Polygon efd_reconstruct(const EfdCoefficients& c, std::size_t n_points);

/// Evaluates the truncated series at a single normalized parameter u in [0, 1).
Point2 efd_evaluate(const EfdCoefficients& c, double u);

/// Discrete second-derivative sign census over an open vertex chain.
struct CurvatureStats {
    std::size_t n_total = 0;     ///< interior vertices evaluated
    std::size_t n_positive = 0;  ///< d2y strictly positive
    std::size_t n_negative = 0;  ///< d2y strictly negative
    double psd = 0.0;            ///< n_positive / n_total
    double nsd = 0.0;            ///< n_negative / n_total
};

/// Second difference y[i-1] - 2*y[i] + y[i+1] per interior vertex, y-up
/// frame. |d2y| <= 1e-9 * chain bounding-box height counts as neither sign.
CurvatureStats curvature_stats(const std::vector<Point2>& open_chain);

/// Interior angle in degrees, range [0, 180], between two direction vectors.
/// Throws DegenerateShape on a zero vector.
double angle_between(const Point2& v1, const Point2& v2);

}  // namespace leafarch::geom
