#include "fracsim/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "fracsim/errors.hpp"

namespace fracsim {

namespace {

int strip_node_id(const Mesh& mesh, int row, int col) {
    // row is 1-based (row 0 would be the block's own top edge)
    const StripInfo& s = *mesh.strip;
    const int cols = s.col_end - s.col_begin;
    return mesh.n_block_nodes() + (row - 1) * (cols + 1) + (col - s.col_begin);
}

}  // namespace

std::array<double, 2> Mesh::centroid(const Element& e) const {
    double cx = 0.0, cy = 0.0;
    for (int n : e.nodes) {
        cx += nodes[n].x;
        cy += nodes[n].y;
    }
    return {0.25 * cx, 0.25 * cy};
}

std::vector<int> Mesh::casi_patch_ids() const {
    std::set<int> ids;
    for (const Element& e : elements) {
        if (e.region == Region::casi && e.patch != kRubberPatch) ids.insert(e.patch);
    }
    return {ids.begin(), ids.end()};
}

Mesh build_structured_mesh(double W, double H, int nx, int ny, double depth) {
    if (W <= 0 || H <= 0 || depth <= 0) {
        throw ConfigError("mesh: dimensions must be positive");
    }
    if (nx < 1 || ny < 1) {
        throw ConfigError("mesh: need at least one element per direction");
    }

    Mesh m;
    m.width = W;
    m.height = H;
    m.depth = depth;
    m.nx = nx;
    m.ny = ny;
    m.hx = W / nx;
    m.hy = H / ny;

    m.nodes.reserve(static_cast<std::size_t>(nx + 1) * (ny + 1));
    for (int j = 0; j <= ny; ++j) {
        for (int i = 0; i <= nx; ++i) {
            m.nodes.push_back({m.block_node_id(i, j), i * m.hx, j * m.hy});
        }
    }

    m.elements.reserve(static_cast<std::size_t>(nx) * ny);
    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) {
            Element e;
            e.id = j * nx + i;
            e.nodes = {m.block_node_id(i, j), m.block_node_id(i + 1, j),
                       m.block_node_id(i + 1, j + 1), m.block_node_id(i, j + 1)};
            e.region = Region::casi;
            m.elements.push_back(e);
        }
    }
    return m;
}

Mesh attach_strip(Mesh mesh, double strip_width, double strip_thickness,
                  double eccentricity, int strip_rows) {
    if (mesh.strip) throw ConfigError("strip: already attached");
    if (strip_width <= 0) throw ConfigError("strip: width must be positive");
    if (strip_rows < 0) throw ConfigError("strip: rows must be >= 0");
    if (strip_rows > 0 && strip_thickness <= 0) {
        throw ConfigError("strip: thickness must be positive");
    }

    const double W = mesh.width;
    const double tol = 1e-9 * W;
    if (std::abs(eccentricity) + 0.5 * strip_width > 0.5 * W + tol) {
        throw ConfigError("strip: extends beyond the top edge");
    }

    const double center = 0.5 * W + eccentricity;
    const double left = center - 0.5 * strip_width;
    const double right = center + 0.5 * strip_width;

    StripInfo s;
    s.col_begin = static_cast<int>(std::lround(left / mesh.hx));
    s.col_end = static_cast<int>(std::lround(right / mesh.hx));
    s.col_begin = std::clamp(s.col_begin, 0, mesh.nx);
    s.col_end = std::clamp(s.col_end, 0, mesh.nx);
    if (s.col_end <= s.col_begin) {
        throw ConfigError("strip: narrower than one element column after snapping");
    }
    const double snapped_left = s.col_begin * mesh.hx;
    const double snapped_right = s.col_end * mesh.hx;
    s.width = snapped_right - snapped_left;
    s.thickness = strip_thickness;
    s.eccentricity = eccentricity;
    s.rows = strip_rows;
    s.snap_error = std::max(std::abs(s.width - strip_width),
                            std::abs(0.5 * (snapped_left + snapped_right) - center));

    mesh.strip = s;
    if (strip_rows == 0) return mesh;  // span recorded; load goes on the block edge

    const int cols = s.col_end - s.col_begin;
    const double hrow = strip_thickness / strip_rows;
    for (int r = 1; r <= strip_rows; ++r) {
        for (int c = 0; c <= cols; ++c) {
            Node n;
            n.id = static_cast<int>(mesh.nodes.size());
            n.x = (s.col_begin + c) * mesh.hx;
            n.y = mesh.height + r * hrow;
            mesh.nodes.push_back(n);
        }
    }
    for (int r = 1; r <= strip_rows; ++r) {
        for (int i = s.col_begin; i < s.col_end; ++i) {
            Element e;
            e.id = static_cast<int>(mesh.elements.size());
            const int bl = (r == 1) ? mesh.block_node_id(i, mesh.ny)
                                    : strip_node_id(mesh, r - 1, i);
            const int br = (r == 1) ? mesh.block_node_id(i + 1, mesh.ny)
                                    : strip_node_id(mesh, r - 1, i + 1);
            e.nodes = {bl, br, strip_node_id(mesh, r, i + 1), strip_node_id(mesh, r, i)};
            e.region = Region::rubber;
            e.patch = kRubberPatch;
            mesh.elements.push_back(e);
        }
    }
    return mesh;
}

Mesh assign_patches(Mesh mesh, double patch_w, double patch_h) {
    if (patch_w <= 0 || patch_h <= 0) {
        throw ConfigError("patches: patch size must be positive");
    }
    PatchGrid grid;
    grid.patch_w = patch_w;
    grid.patch_h = patch_h;
    grid.nx = static_cast<int>(std::ceil(mesh.width / patch_w));
    grid.ny = static_cast<int>(std::ceil(mesh.height / patch_h));

    for (Element& e : mesh.elements) {
        if (e.region != Region::casi) {
            e.patch = kRubberPatch;
            continue;
        }
        const auto [cx, cy] = mesh.centroid(e);
        int ix = static_cast<int>(std::floor(cx / patch_w));
        int iy = static_cast<int>(std::floor(cy / patch_h));
        ix = std::clamp(ix, 0, grid.nx - 1);
        iy = std::clamp(iy, 0, grid.ny - 1);
        e.patch = iy * grid.nx + ix;  // row-major, x fastest
    }
    mesh.patches = grid;
    return mesh;
}

BoundarySets boundary_sets(const Mesh& mesh) {
    if (!mesh.strip) {
        throw ConfigError("boundary sets: attach a strip (possibly with rows=0) first");
    }
    const StripInfo& s = *mesh.strip;

    BoundarySets b;
    b.bottom_nodes.reserve(mesh.nx + 1);
    for (int i = 0; i <= mesh.nx; ++i) b.bottom_nodes.push_back(mesh.block_node_id(i, 0));

    // pin under the (snapped) strip centre; ties go to the lower x
    const double xc = 0.5 * (s.col_begin + s.col_end) * mesh.hx;
    int best = 0;
    double best_d = std::abs(mesh.nodes[b.bottom_nodes[0]].x - xc);
    for (int i = 1; i <= mesh.nx; ++i) {
        const double d = std::abs(mesh.nodes[b.bottom_nodes[i]].x - xc);
        if (d < best_d - 1e-12 * mesh.width) {
            best = i;
            best_d = d;
        }
    }
    b.pin_node = b.bottom_nodes[best];

    for (int i = s.col_begin; i <= s.col_end; ++i) {
        b.strip_top_nodes.push_back(s.rows == 0 ? mesh.block_node_id(i, mesh.ny)
                                                : strip_node_id(mesh, s.rows, i));
    }
    b.edge_left_node = mesh.block_node_id(s.col_begin, mesh.ny);
    b.edge_right_node = mesh.block_node_id(s.col_end, mesh.ny);
    return b;
}

}  // namespace fracsim
