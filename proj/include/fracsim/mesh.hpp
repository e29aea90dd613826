#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

namespace fracsim {

enum class Region : std::uint8_t { casi, rubber };

struct Node {
    int id = -1;
    double x = 0.0;
    double y = 0.0;
};

/// Patch tag for rubber elements; never sampled by the random field.
inline constexpr int kRubberPatch = -1;

struct Element {
    int id = -1;
    std::array<int, 4> nodes{};  // counter-clockwise
    Region region = Region::casi;
    int patch = kRubberPatch;    // linear patch index, row-major (y-row major, x fastest)
};

struct StripInfo {
    double width = 0.0;         // snapped to whole grid columns (m)
    double thickness = 0.0;     // m
    double eccentricity = 0.0;  // requested offset of strip centre from x = W/2 (m)
    int rows = 0;               // 0 = load applied directly to the block top edge
    int col_begin = 0;          // first spanned grid column
    int col_end = 0;            // one past the last spanned column
    double snap_error = 0.0;    // worst |snapped - requested| over width and centre (m)
};

struct PatchGrid {
    double patch_w = 0.0;
    double patch_h = 0.0;
    int nx = 0;
    int ny = 0;
};

/// Structured conforming quad mesh of the block, optionally with a rubber
/// strip overlay on the top edge. Immutable once built; share freely.
struct Mesh {
    std::vector<Node> nodes;
    std::vector<Element> elements;
    double width = 0.0;   // W, block only
    double height = 0.0;  // H, block only (strip sits above y = H)
    double hx = 0.0;
    double hy = 0.0;
    double depth = 0.0;   // out-of-plane thickness used for forces
    int nx = 0;
    int ny = 0;
    std::optional<StripInfo> strip;
    std::optional<PatchGrid> patches;

    int block_node_id(int i, int j) const { return j * (nx + 1) + i; }
    std::array<double, 2> centroid(const Element& e) const;
    int n_block_nodes() const { return (nx + 1) * (ny + 1); }

    /// Sorted unique patch indices carried by casi elements.
    std::vector<int> casi_patch_ids() const;
};

struct BoundarySets {
    std::vector<int> bottom_nodes;        // u_y = 0, u_x free
    int pin_node = -1;                    // u_x = 0, kills the horizontal rigid mode
    std::vector<int> strip_top_nodes;     // prescribed u_y
    int edge_left_node = -1;              // block-top node under the strip's left edge
    int edge_right_node = -1;             // block-top node under the strip's right edge
};

Mesh build_structured_mesh(double W, double H, int nx, int ny, double depth);

/// Stacks strip_rows rows of rubber elements over the strip span, sharing the
/// block's top-edge nodes (bonded interface). strip_rows = 0 records the span
/// only: the prescribed displacement then acts on the block top edge itself.
Mesh attach_strip(Mesh mesh, double strip_width, double strip_thickness,
                  double eccentricity, int strip_rows);

Mesh assign_patches(Mesh mesh, double patch_w, double patch_h);

BoundarySets boundary_sets(const Mesh& mesh);

}  // namespace fracsim
