#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <utility>

#include "fracsim/errors.hpp"
#include "fracsim/mesh.hpp"

using namespace fracsim;

namespace {

// shoelace area of a quad, independent of the element code path
double quad_area(const Mesh& m, const Element& e) {
    double a = 0.0;
    for (int k = 0; k < 4; ++k) {
        const Node& p = m.nodes[e.nodes[k]];
        const Node& q = m.nodes[e.nodes[(k + 1) % 4]];
        a += p.x * q.y - q.x * p.y;
    }
    return 0.5 * a;
}

Mesh base_block() { return build_structured_mesh(0.2, 0.3, 40, 60, 0.2); }

}  // namespace

TEST_CASE("structured mesh has the expected counts and spacing") {
    const Mesh m = build_structured_mesh(0.2, 0.3, 20, 30, 0.2);
    CHECK(m.elements.size() == 600);
    CHECK(m.nodes.size() == 651);
    CHECK(m.hx == doctest::Approx(0.01).epsilon(1e-14));
    CHECK(m.hy == doctest::Approx(0.01).epsilon(1e-14));
    for (const Element& e : m.elements) CHECK(e.region == Region::casi);

    const Mesh unit = build_structured_mesh(1.0, 1.0, 1, 1, 1.0);
    CHECK(unit.elements.size() == 1);
    CHECK(unit.nodes.size() == 4);
    CHECK(unit.hx == 1.0);
    CHECK(unit.hy == 1.0);

    const Mesh tall = build_structured_mesh(0.2, 0.4, 10, 20, 0.2);
    CHECK(tall.hx == doctest::Approx(0.02).epsilon(1e-14));
    CHECK(tall.hy == doctest::Approx(0.02).epsilon(1e-14));
}

TEST_CASE("degenerate mesh requests are rejected") {
    CHECK_THROWS_AS(build_structured_mesh(0.0, 1.0, 1, 1, 1.0), ConfigError);
    CHECK_THROWS_AS(build_structured_mesh(1.0, -1.0, 1, 1, 1.0), ConfigError);
    CHECK_THROWS_AS(build_structured_mesh(1.0, 1.0, 0, 1, 1.0), ConfigError);
    CHECK_THROWS_AS(build_structured_mesh(1.0, 1.0, 1, 1, 0.0), ConfigError);
}

TEST_CASE("strip snaps to grid columns and spans the requested range") {
    Mesh m = attach_strip(base_block(), 0.07, 0.005, 0.05, 1);
    REQUIRE(m.strip.has_value());
    const StripInfo& s = *m.strip;
    CHECK(s.col_begin == 23);  // x = 0.115
    CHECK(s.col_end == 37);    // x = 0.185
    CHECK(s.width == doctest::Approx(0.07).epsilon(1e-14));
    CHECK(s.snap_error <= 1e-12);

    double min_x = 1e30, max_x = -1e30, max_y = -1e30;
    for (const Element& e : m.elements) {
        if (e.region != Region::rubber) continue;
        for (int n : e.nodes) {
            min_x = std::min(min_x, m.nodes[n].x);
            max_x = std::max(max_x, m.nodes[n].x);
            max_y = std::max(max_y, m.nodes[n].y);
        }
    }
    CHECK(min_x == doctest::Approx(0.115).epsilon(1e-12));
    CHECK(max_x == doctest::Approx(0.185).epsilon(1e-12));
    CHECK(max_y == doctest::Approx(0.305).epsilon(1e-12));
    CHECK(m.elements.size() == 40 * 60 + 14);
}

TEST_CASE("centered strip is symmetric about the midline") {
    const Mesh m = attach_strip(base_block(), 0.07, 0.005, 0.0, 1);
    const StripInfo& s = *m.strip;
    const double left = s.col_begin * m.hx;
    const double right = s.col_end * m.hx;
    CHECK(left + right == doctest::Approx(m.width).epsilon(1e-14));
}

TEST_CASE("strip width snapping counts columns") {
    const Mesh m = attach_strip(build_structured_mesh(0.2, 0.3, 20, 30, 0.2), 0.07,
                                0.005, 0.05, 1);
    CHECK(m.strip->col_end - m.strip->col_begin == 7);  // 0.07 on an hx=0.01 grid
    // a 7-column strip cannot be centred on a node: the centre shifts half a cell
    CHECK(m.strip->snap_error == doctest::Approx(0.005).epsilon(1e-12));
}

TEST_CASE("strip beyond the top edge is rejected") {
    CHECK_THROWS_AS(attach_strip(base_block(), 0.07, 0.005, 0.09, 1), ConfigError);
    CHECK_THROWS_AS(attach_strip(base_block(), 0.25, 0.005, 0.0, 1), ConfigError);
    CHECK_THROWS_AS(
        attach_strip(attach_strip(base_block(), 0.07, 0.005, 0.0, 1), 0.07, 0.005,
                     0.0, 1),
        ConfigError);
}

TEST_CASE("strip_rows = 0 records the span without adding elements") {
    const Mesh m = attach_strip(base_block(), 0.07, 0.0, 0.05, 0);
    CHECK(m.elements.size() == 40 * 60);
    CHECK(m.nodes.size() == 41u * 61u);
    REQUIRE(m.strip.has_value());
    CHECK(m.strip->rows == 0);
    const BoundarySets b = boundary_sets(m);
    CHECK(b.strip_top_nodes.size() == 15);
    for (int n : b.strip_top_nodes) {
        CHECK(m.nodes[n].y == doctest::Approx(0.3).epsilon(1e-14));
    }
}

TEST_CASE("patch assignment follows centroid floor division") {
    Mesh m = build_structured_mesh(0.2, 0.4, 10, 20, 0.2);
    m = attach_strip(std::move(m), 0.07, 0.005, 0.05, 1);
    m = assign_patches(std::move(m), 0.02, 0.02);
    REQUIRE(m.patches.has_value());
    CHECK(m.patches->nx == 10);
    CHECK(m.patches->ny == 20);

    for (const Element& e : m.elements) {
        if (e.region == Region::rubber) {
            CHECK(e.patch == kRubberPatch);
            continue;
        }
        const auto [cx, cy] = m.centroid(e);
        const int ix = static_cast<int>(std::floor(cx / 0.02));
        const int iy = static_cast<int>(std::floor(cy / 0.02));
        CHECK(e.patch == iy * 10 + ix);
    }
    CHECK(m.casi_patch_ids().size() == 200);

    // centroid (0.03, 0.05) on a 0.02 grid sits in patch column 1, row 2
    bool found = false;
    for (const Element& e : m.elements) {
        const auto [cx, cy] = m.centroid(e);
        if (std::abs(cx - 0.03) < 1e-12 && std::abs(cy - 0.05) < 1e-12) {
            CHECK(e.patch == 2 * 10 + 1);
            found = true;
        }
    }
    CHECK(found);
}

TEST_CASE("degenerate patching puts everything in one column") {
    Mesh m = assign_patches(attach_strip(base_block(), 0.07, 0.005, 0.05, 1), 0.2, 0.02);
    CHECK(m.patches->nx == 1);
    for (const Element& e : m.elements) {
        if (e.region != Region::casi) continue;
        const auto [cx, cy] = m.centroid(e);
        CHECK(e.patch == static_cast<int>(std::floor(cy / 0.02)));  // single column
    }
    const auto ids = m.casi_patch_ids();
    CHECK(ids.size() == 15);  // one per 20 mm row of the 300 mm height
}

TEST_CASE("every interior edge is shared by exactly two elements") {
    const Mesh m = attach_strip(base_block(), 0.07, 0.005, 0.05, 2);
    std::map<std::pair<int, int>, int> edge_count;
    for (const Element& e : m.elements) {
        for (int k = 0; k < 4; ++k) {
            int a = e.nodes[k], b = e.nodes[(k + 1) % 4];
            if (a > b) std::swap(a, b);
            ++edge_count[{a, b}];
        }
    }
    for (const auto& [edge, count] : edge_count) {
        CHECK(count >= 1);
        CHECK(count <= 2);
    }
    // interior block edge and a strip-base edge must both be shared
    const int n0 = m.block_node_id(5, 5), n1 = m.block_node_id(6, 5);
    CHECK(edge_count[{std::min(n0, n1), std::max(n0, n1)}] == 2);
    const int t0 = m.block_node_id(25, 60), t1 = m.block_node_id(26, 60);
    CHECK(edge_count[{std::min(t0, t1), std::max(t0, t1)}] == 2);
}

TEST_CASE("element areas sum to block plus strip area") {
    const Mesh m = attach_strip(base_block(), 0.07, 0.005, 0.05, 3);
    double total = 0.0;
    for (const Element& e : m.elements) {
        const double a = quad_area(m, e);
        CHECK(a > 0.0);  // positive orientation everywhere
        total += a;
    }
    const double expected = 0.2 * 0.3 + 0.07 * 0.005;
    CHECK(total == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("boundary sets pick bottom, pin and strip nodes") {
    const Mesh m = attach_strip(base_block(), 0.07, 0.005, 0.05, 1);
    const BoundarySets b = boundary_sets(m);
    CHECK(b.bottom_nodes.size() == 41);
    for (int n : b.bottom_nodes) CHECK(m.nodes[n].y == 0.0);

    // pin sits under the snapped strip centre x = 0.15
    CHECK(m.nodes[b.pin_node].x == doctest::Approx(0.15).epsilon(1e-12));
    CHECK(std::find(b.bottom_nodes.begin(), b.bottom_nodes.end(), b.pin_node) !=
          b.bottom_nodes.end());

    CHECK(b.strip_top_nodes.size() == 15);
    for (int n : b.strip_top_nodes) {
        CHECK(m.nodes[n].y == doctest::Approx(0.305).epsilon(1e-12));
    }
    CHECK(m.nodes[b.edge_left_node].x == doctest::Approx(0.115).epsilon(1e-12));
    CHECK(m.nodes[b.edge_right_node].x == doctest::Approx(0.185).epsilon(1e-12));
    CHECK(m.nodes[b.edge_left_node].y == doctest::Approx(0.3).epsilon(1e-12));

    CHECK_THROWS_AS(boundary_sets(base_block()), ConfigError);
}

TEST_CASE("seven-column strip carries eight loaded nodes") {
    const Mesh m = attach_strip(build_structured_mesh(0.2, 0.3, 20, 30, 0.2), 0.07,
                                0.005, 0.05, 1);
    const BoundarySets b = boundary_sets(m);
    CHECK(b.strip_top_nodes.size() == 8);
}

TEST_CASE("centered strip pins the midline node") {
    const Mesh m = attach_strip(base_block(), 0.07, 0.005, 0.0, 1);
    const BoundarySets b = boundary_sets(m);
    CHECK(m.nodes[b.pin_node].x == doctest::Approx(0.1).epsilon(1e-12));
}
