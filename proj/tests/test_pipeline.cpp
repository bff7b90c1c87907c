#include <doctest.h>

#include <cmath>

#include "leafarch/pipeline.hpp"
#include "leafarch/synth.hpp"

using namespace leafarch;
using geom::Point2;

namespace {

io::RasterData as_raster(const raster::GrayImage& g) {
    io::RasterData d;
    d.width = g.width;
    d.height = g.height;
    d.channels = 1;
    d.pixels = g.pixels;
    return d;
}

synth::LeafSpec plain_ellipse() {
    synth::LeafSpec s;
    s.ratio = 2.0;
    s.apex = synth::LeafSpec::Apex::Dome;
    s.base = synth::LeafSpec::Base::Dome;
    return s;
}

}  // namespace

TEST_CASE("odd element diameter") {
    CHECK(pipeline::odd_element_diameter(0.05, 512) == 25);   // 25.6 -> 25
    CHECK(pipeline::odd_element_diameter(0.05, 540) == 27);   // 27.0 -> 27
    CHECK(pipeline::odd_element_diameter(0.03, 512) == 15);   // 15.36 -> 15
    CHECK(pipeline::odd_element_diameter(0.05, 20) == 3);     // floor at 3
}

TEST_CASE("segment extracts a dark ellipse as one filled component") {
    const auto leaf = synth::generate(plain_ellipse(), 1);
    const auto mask = pipeline::segment(as_raster(leaf.image));
    const auto comps = raster::connected_components(mask);
    REQUIRE(comps.size() == 1);
    CHECK(comps[0].area > 1000);
}

TEST_CASE("segment fails on a blank scan") {
    raster::GrayImage blank;
    blank.width = 64;
    blank.height = 64;
    blank.pixels.assign(64 * 64, 250);
    CHECK_THROWS_AS(pipeline::segment(as_raster(blank)), SegmentationFailed);
}

TEST_CASE("segment shrugs off salt and pepper noise") {
    auto clean_spec = plain_ellipse();
    const auto clean = synth::generate(clean_spec, 7);
    auto noisy_spec = clean_spec;
    noisy_spec.noise = 0.01;
    const auto noisy = synth::generate(noisy_spec, 7);

    const auto clean_mask = pipeline::segment(as_raster(clean.image));
    const auto noisy_mask = pipeline::segment(as_raster(noisy.image));
    const double a = static_cast<double>(clean_mask.count());
    const double b = static_cast<double>(noisy_mask.count());
    CHECK(std::abs(a - b) / a < 0.02);
}

TEST_CASE("remove_petiole strips the stem and finds the junction") {
    auto spec = plain_ellipse();
    spec.stem_width = 0.01;  // ~5 px on a 512 frame
    const auto leaf = synth::generate(spec, 3);
    const auto mask = pipeline::segment(as_raster(leaf.image));
    const auto removal = pipeline::remove_petiole(mask);

    CHECK(removal.info.present);
    CHECK(removal.info.petiole_mask.count() > 0);

    // lamina no longer reaches the stem bottom
    const auto lamina_comps = raster::connected_components(removal.lamina);
    const auto leaf_comps = raster::connected_components(mask);
    REQUIRE(!lamina_comps.empty());
    CHECK(lamina_comps[0].max_y < leaf_comps[0].max_y - 10);

    // insertion points sit within a couple of pixels of the lamina bottom,
    // where the synthetic stem joins the ellipse
    const double mid_y = (removal.info.insertion_points[0].y +
                          removal.info.insertion_points[1].y) * 0.5;
    CHECK(std::abs(mid_y - lamina_comps[0].max_y) < 8.0);
    const double gap = std::abs(removal.info.insertion_points[0].x -
                                removal.info.insertion_points[1].x);
    CHECK(gap < 0.03 * mask.width);
}

TEST_CASE("remove_petiole on a leaf without a stem") {
    auto spec = plain_ellipse();
    spec.stem_len = 0.0;
    spec.stem_width = 0.008;
    const auto leaf = synth::generate(spec, 5);
    const auto mask = pipeline::segment(as_raster(leaf.image));
    const auto removal = pipeline::remove_petiole(mask);

    CHECK(!removal.info.present);
    const double kept = static_cast<double>(removal.lamina.count());
    const double total = static_cast<double>(mask.count());
    CHECK(kept / total > 0.99);
}

TEST_CASE("basal extension: ellipse no, cordate yes") {
    {
        const auto leaf = synth::generate(plain_ellipse(), 11);
        const auto mask = pipeline::segment(as_raster(leaf.image));
        const auto removal = pipeline::remove_petiole(mask);
        CHECK(!pipeline::detect_basal_extension(removal.lamina, removal.info));
    }
    {
        auto spec = plain_ellipse();
        spec.base = synth::LeafSpec::Base::Cordate;
        spec.cordate_depth = 0.16;
        const auto leaf = synth::generate(spec, 11);
        const auto mask = pipeline::segment(as_raster(leaf.image));
        const auto removal = pipeline::remove_petiole(mask);
        CHECK(pipeline::detect_basal_extension(removal.lamina, removal.info));
    }
}

TEST_CASE("detect_apex: dome top is not reflex") {
    const auto leaf = synth::generate(plain_ellipse(), 13);
    const auto mask = pipeline::segment(as_raster(leaf.image));
    const auto removal = pipeline::remove_petiole(mask);
    const auto apex = pipeline::detect_apex(removal.lamina, removal.info);
    CHECK(!apex.reflex);

    const auto comps = raster::connected_components(removal.lamina);
    CHECK(apex.apex.y == comps[0].min_y);
}

TEST_CASE("detect_apex: notched top is reflex with the apex in the notch") {
    auto spec = plain_ellipse();
    spec.apex = synth::LeafSpec::Apex::Notch;
    spec.notch_depth = 0.12;
    const auto leaf = synth::generate(spec, 13);
    const auto mask = pipeline::segment(as_raster(leaf.image));
    const auto removal = pipeline::remove_petiole(mask);
    const auto apex = pipeline::detect_apex(removal.lamina, removal.info);

    CHECK(apex.reflex);
    const auto comps = raster::connected_components(removal.lamina);
    CHECK(apex.apex.y > comps[0].min_y + 5);
    // the notch is central
    const double cx = (comps[0].min_x + comps[0].max_x) / 2.0;
    CHECK(std::abs(apex.apex.x - cx) < 0.2 * (comps[0].max_x - comps[0].min_x));
}

TEST_CASE("detect_apex: flat top picks the smallest x without reflex") {
    raster::BinaryImage img = raster::make_binary(40, 40);
    for (int y = 5; y <= 30; ++y) {
        for (int x = 8; x <= 31; ++x) img.set(x, y, true);
    }
    pipeline::PetioleInfo info;
    info.insertion_points = {geom::Point2{19, 30}, geom::Point2{20, 30}};
    const auto apex = pipeline::detect_apex(img, info);
    CHECK(!apex.reflex);
    CHECK(apex.apex.x == 8);
    CHECK(apex.apex.y == 5);
}

TEST_CASE("build_geometry produces a vertical midvein and recovers L") {
    for (double rot : {0.0, 30.0}) {
        auto spec = plain_ellipse();
        spec.rotation_deg = rot;
        const auto leaf = synth::generate(spec, 17);
        const auto result = pipeline::process(as_raster(leaf.image));
        const auto& g = result.geometry;

        // apex sits straight above the insertion midpoint
        const Point2 mid = g.insertion_midpoint();
        const Point2 axis = g.apex - mid;
        CHECK(axis.y > 0);
        CHECK(std::abs(std::atan2(axis.x, axis.y)) < 1e-6);

        // apex is vertex 0 of the boundary
        CHECK(g.boundary.vertices.front() == g.apex);
        CHECK(g.boundary.size() > pipeline::kBoundarySamples - 8);
        CHECK(geom::signed_area(g.boundary) > 0);

        // the rotation must not change the recovered lamina length much
        if (rot == 0.0) {
            const auto lamina_comps = raster::connected_components(result.lamina);
            const double want = lamina_comps[0].max_y - lamina_comps[0].min_y + 1;
            CHECK(std::abs(g.lamina_length - want) / want < 0.02);
        }
    }
}

TEST_CASE("geometry rotation does not distort the traced contour") {
    // the boundary polygon must keep the lamina's pixel area and the traced
    // contour length through the rotate+resample steps
    for (double rot : {0.0, 25.0}) {
        auto spec = plain_ellipse();
        spec.rotation_deg = rot;
        const auto result = pipeline::process(as_raster(synth::generate(spec, 19).image));

        const double pixel_area = static_cast<double>(result.lamina.count());
        const double poly_area = geom::polygon_area(result.geometry.boundary);
        CHECK(std::abs(poly_area - pixel_area) / pixel_area < 0.02);

        const auto traced = raster::trace_boundary(result.lamina);
        double traced_len = 0.0;
        for (std::size_t i = 0; i < traced.points.size(); ++i) {
            const auto& a = traced.points[i];
            const auto& b = traced.points[(i + 1) % traced.points.size()];
            traced_len += std::hypot(a.x - b.x, a.y - b.y);
        }
        // resampling straightens sub-pixel staircase steps, so allow a bit
        // more slack on length than on area
        const double poly_len = geom::polygon_perimeter(result.geometry.boundary);
        CHECK(std::abs(poly_len - traced_len) / traced_len < 0.03);
    }
}

TEST_CASE("pipeline is deterministic") {
    const auto leaf = synth::generate(plain_ellipse(), 23);
    const auto a = pipeline::process(as_raster(leaf.image));
    const auto b = pipeline::process(as_raster(leaf.image));
    CHECK(a.geometry.boundary.vertices == b.geometry.boundary.vertices);
    CHECK(a.geometry.apex == b.geometry.apex);
    CHECK(a.geometry.lamina_length == b.geometry.lamina_length);
}

TEST_CASE("synthetic generator is deterministic in the seed") {
    auto spec = plain_ellipse();
    spec.jitter = 0.6;
    spec.noise = 0.005;
    const auto a = synth::generate(spec, 99);
    const auto b = synth::generate(spec, 99);
    CHECK(a.image.pixels == b.image.pixels);
    const auto c = synth::generate(spec, 100);
    CHECK(a.image.pixels != c.image.pixels);
}

TEST_CASE("generator rejects contradictory parameters") {
    auto spec = plain_ellipse();
    spec.ratio = 12.0;
    spec.lobes = 5;
    spec.lobe_depth = 0.4;
    CHECK_THROWS_AS(synth::generate(spec, 1), BadSpec);

    auto boundary_spec = plain_ellipse();
    boundary_spec.asymmetry = 0.9;  // dead on the class threshold
    CHECK_THROWS_AS(synth::generate(boundary_spec, 1), BadSpec);
}

TEST_CASE("spec JSON round-trip") {
    auto spec = plain_ellipse();
    spec.name = "test";
    spec.teeth = 40;
    spec.tooth_amp = 0.02;
    spec.jitter = 0.3;
    const std::string text = synth::specs_to_json({spec});
    const auto back = synth::specs_from_json(text);
    REQUIRE(back.size() == 1);
    CHECK(back[0].name == "test");
    CHECK(back[0].teeth == 40);
    CHECK(back[0].tooth_amp == doctest::Approx(0.02));

    CHECK_THROWS_AS(synth::specs_from_json("{\"schema\":2}"), BadSpec);
    CHECK_THROWS_AS(synth::specs_from_json("{\"schema\":1,\"variants\":[{\"bogus\":1}]}"),
                    BadSpec);
}
