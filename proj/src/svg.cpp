#include "leafarch/svg.hpp"

#include <fstream>

namespace leafarch::svg {

namespace {

void write_svg(const std::filesystem::path& path, double width, double height,
               const std::string& body) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write SVG: " + path.string());
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
        << height << "\" viewBox=\"0 0 " << width << " " << height << "\">\n"
        << body << "</svg>\n";
}

std::string polygon_element(const std::vector<geom::Point2>& pts, const char* stroke) {
    std::string s = "  <polygon fill=\"none\" stroke=\"";
    s += stroke;
    s += "\" points=\"";
    for (const auto& p : pts) {
        s += std::to_string(p.x) + "," + std::to_string(p.y) + " ";
    }
    s += "\"/>\n";
    return s;
}

std::string contour_element(const raster::PixelContour& c, const char* stroke) {
    std::vector<geom::Point2> pts;
    pts.reserve(c.points.size());
    for (const auto& p : c.points) {
        pts.push_back({static_cast<double>(p.x), static_cast<double>(p.y)});
    }
    return polygon_element(pts, stroke);
}

std::string circle_element(const geom::Point2& p, double r, const char* fill) {
    return "  <circle cx=\"" + std::to_string(p.x) + "\" cy=\"" + std::to_string(p.y) +
           "\" r=\"" + std::to_string(r) + "\" fill=\"" + fill + "\"/>\n";
}

}  // namespace

void write_debug_stages(const std::filesystem::path& dir,
                        const pipeline::PipelineResult& result) {
    std::filesystem::create_directories(dir);
    const double w = result.segmented.width;
    const double h = result.segmented.height;

    write_svg(dir / "01_mask.svg", w, h,
              contour_element(raster::trace_boundary(result.segmented), "black"));

    const int d = pipeline::odd_element_diameter(0.05, result.segmented.width);
    const auto opened = raster::open_disk(result.segmented, d);
    std::string opening_body;
    if (opened.count() >= 3) opening_body = contour_element(raster::trace_boundary(opened), "gray");
    write_svg(dir / "02_opening.svg", w, h, opening_body);

    std::string petiole_body;
    if (result.petiole.present && result.petiole.petiole_mask.count() >= 3) {
        petiole_body += contour_element(raster::trace_boundary(result.petiole.petiole_mask),
                                        "brown");
    }
    petiole_body += circle_element(result.petiole.insertion_points[0], 2.0, "red");
    petiole_body += circle_element(result.petiole.insertion_points[1], 2.0, "red");
    write_svg(dir / "03_petiole.svg", w, h, petiole_body);

    write_svg(dir / "04_boundary.svg", w, h,
              contour_element(raster::trace_boundary(result.lamina), "green"));

    // rotated Cartesian geometry, shifted into a positive viewBox
    const auto& g = result.geometry;
    double min_x = 1e300, max_x = -1e300, min_y = 1e300, max_y = -1e300;
    for (const auto& p : g.boundary.vertices) {
        min_x = std::min(min_x, p.x);
        max_x = std::max(max_x, p.x);
        min_y = std::min(min_y, p.y);
        max_y = std::max(max_y, p.y);
    }
    const double pad = 8.0;
    const auto flip = [&](const geom::Point2& p) {
        return geom::Point2{p.x - min_x + pad, max_y - p.y + pad};
    };
    std::vector<geom::Point2> boundary;
    boundary.reserve(g.boundary.size());
    for (const auto& p : g.boundary.vertices) boundary.push_back(flip(p));

    std::string body = polygon_element(boundary, "black");
    body += circle_element(flip(g.apex), 3.0, "blue");
    body += circle_element(flip(g.insertion_points[0]), 3.0, "red");
    body += circle_element(flip(g.insertion_points[1]), 3.0, "red");
    body += circle_element(flip(g.centroid), 3.0, "purple");
    write_svg(dir / "05_geometry.svg", max_x - min_x + 2 * pad, max_y - min_y + 2 * pad, body);
}

}  // namespace leafarch::svg
