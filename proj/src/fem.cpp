#include "fracsim/fem.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <map>
#include <sstream>
#include <tuple>

#include "fracsim/errors.hpp"

namespace fracsim {

namespace {

constexpr double kGauss = 0.57735026918962576451;  // 1/sqrt(3)

// dN/dxi and dN/deta of the four bilinear shape functions at (xi, eta)
void shape_gradients(double xi, double eta, double dxi[4], double deta[4]) {
    static constexpr double sx[4] = {-1.0, 1.0, 1.0, -1.0};
    static constexpr double se[4] = {-1.0, -1.0, 1.0, 1.0};
    for (int a = 0; a < 4; ++a) {
        dxi[a] = 0.25 * sx[a] * (1.0 + se[a] * eta);
        deta[a] = 0.25 * se[a] * (1.0 + sx[a] * xi);
    }
}

// B (3x8) and det J at a parent-space point; throws on non-positive Jacobian
double strain_displacement(const std::array<double, 8>& xy, double xi, double eta,
                           Eigen::Matrix<double, 3, 8>& B) {
    double dxi[4], deta[4];
    shape_gradients(xi, eta, dxi, deta);

    double j00 = 0, j01 = 0, j10 = 0, j11 = 0;  // [dx/dxi dy/dxi; dx/deta dy/deta]
    for (int a = 0; a < 4; ++a) {
        j00 += dxi[a] * xy[2 * a];
        j01 += dxi[a] * xy[2 * a + 1];
        j10 += deta[a] * xy[2 * a];
        j11 += deta[a] * xy[2 * a + 1];
    }
    const double det = j00 * j11 - j01 * j10;
    if (!(det > 0.0)) {
        throw SolverError("element Jacobian not positive: degenerate or flipped quad");
    }
    const double inv = 1.0 / det;
    B.setZero();
    for (int a = 0; a < 4; ++a) {
        const double dNdx = inv * (j11 * dxi[a] - j01 * deta[a]);
        const double dNdy = inv * (-j10 * dxi[a] + j00 * deta[a]);
        B(0, 2 * a) = dNdx;
        B(1, 2 * a + 1) = dNdy;
        B(2, 2 * a) = dNdy;
        B(2, 2 * a + 1) = dNdx;
    }
    return det;
}

std::array<double, 8> element_coords(const Mesh& mesh, const Element& e) {
    std::array<double, 8> xy;
    for (int a = 0; a < 4; ++a) {
        xy[2 * a] = mesh.nodes[e.nodes[a]].x;
        xy[2 * a + 1] = mesh.nodes[e.nodes[a]].y;
    }
    return xy;
}

// true for an axis-aligned rectangle in the CCW corner order used here
bool rect_dims(const std::array<double, 8>& xy, double& w, double& h) {
    if (xy[0] == xy[6] && xy[2] == xy[4] && xy[1] == xy[3] && xy[5] == xy[7]) {
        w = xy[2] - xy[0];
        h = xy[5] - xy[1];
        return w > 0.0 && h > 0.0;
    }
    return false;
}

// unit-modulus element stiffness, cached per (nu, w, h) for the rectangles a
// structured mesh repeats (k is linear in E, so callers scale)
using ShapeCache = std::map<std::tuple<double, double, double>, Eigen::Matrix<double, 8, 8>>;

Eigen::Matrix<double, 8, 8> unit_element_k(const Mesh& mesh, const Element& e,
                                           double nu_e, ShapeCache& cache) {
    const auto xy = element_coords(mesh, e);
    double w = 0.0, h = 0.0;
    if (rect_dims(xy, w, h)) {
        auto it = cache.find({nu_e, w, h});
        if (it == cache.end()) {
            it = cache.emplace(std::make_tuple(nu_e, w, h),
                               element_stiffness(xy, plane_strain_C(1.0, nu_e),
                                                 mesh.depth))
                     .first;
        }
        return it->second;
    }
    return element_stiffness(xy, plane_strain_C(1.0, nu_e), mesh.depth);
}

void element_dofs(const Element& e, int dofs[8]) {
    for (int a = 0; a < 4; ++a) {
        dofs[2 * a] = 2 * e.nodes[a];
        dofs[2 * a + 1] = 2 * e.nodes[a] + 1;
    }
}

std::vector<Constraint> normalize_constraints(std::vector<Constraint> cs, int n_dofs) {
    std::sort(cs.begin(), cs.end(),
              [](const Constraint& a, const Constraint& b) { return a.dof < b.dof; });
    for (std::size_t i = 0; i < cs.size(); ++i) {
        if (cs[i].dof < 0 || cs[i].dof >= n_dofs) {
            throw ConfigError("constraint dof out of range");
        }
        if (i > 0 && cs[i].dof == cs[i - 1].dof) {
            if (cs[i].value != cs[i - 1].value) {
                throw ConfigError("conflicting constraints on one dof");
            }
        }
    }
    cs.erase(std::unique(cs.begin(), cs.end(),
                         [](const Constraint& a, const Constraint& b) {
                             return a.dof == b.dof;
                         }),
             cs.end());
    return cs;
}

}  // namespace

ElasticityMatrix plane_strain_C(double E, double nu) {
    if (!(E > 0.0)) throw InputError("plane_strain_C: E must be positive");
    if (!(nu >= 0.0 && nu < 0.5)) {
        throw InputError("plane_strain_C: nu must lie in [0, 0.5)");
    }
    const double f = E / ((1.0 + nu) * (1.0 - 2.0 * nu));
    ElasticityMatrix C;
    C << f * (1.0 - nu), f * nu, 0.0,
         f * nu, f * (1.0 - nu), 0.0,
         0.0, 0.0, f * 0.5 * (1.0 - 2.0 * nu);
    return C;
}

Eigen::Matrix<double, 8, 8> element_stiffness(const std::array<double, 8>& corner_xy,
                                              const ElasticityMatrix& C,
                                              double thickness) {
    Eigen::Matrix<double, 8, 8> k = Eigen::Matrix<double, 8, 8>::Zero();
    Eigen::Matrix<double, 3, 8> B;
    for (double eta : {-kGauss, kGauss}) {
        for (double xi : {-kGauss, kGauss}) {
            const double det = strain_displacement(corner_xy, xi, eta, B);
            k.noalias() += thickness * det * (B.transpose() * C * B);
        }
    }
    // symmetrize away the last-ulp asymmetry of the triple products
    k = 0.5 * (k + k.transpose()).eval();
    return k;
}

GlobalSystem assemble_with_constraints(const Mesh& mesh,
                                       const std::vector<double>& E_per_element,
                                       const NuByRegion& nu,
                                       std::vector<Constraint> constraints) {
    if (E_per_element.size() != mesh.elements.size()) {
        throw ConfigError("assemble: modulus array does not match element count");
    }
    const int n_dofs = 2 * static_cast<int>(mesh.nodes.size());

    ShapeCache unit;
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(mesh.elements.size() * 64);
    for (const Element& e : mesh.elements) {
        if (!(E_per_element[e.id] > 0.0)) {
            throw ConfigError("assemble: element modulus must be positive");
        }
        const double nu_e = (e.region == Region::rubber) ? nu.rubber : nu.casi;
        const Eigen::Matrix<double, 8, 8> k =
            E_per_element[e.id] * unit_element_k(mesh, e, nu_e, unit);
        int dofs[8];
        element_dofs(e, dofs);
        for (int r = 0; r < 8; ++r) {
            for (int c = 0; c < 8; ++c) trip.emplace_back(dofs[r], dofs[c], k(r, c));
        }
    }

    GlobalSystem sys;
    sys.stiffness.resize(n_dofs, n_dofs);
    sys.stiffness.setFromTriplets(trip.begin(), trip.end());
    sys.rhs = Eigen::VectorXd::Zero(n_dofs);
    sys.constraints = normalize_constraints(std::move(constraints), n_dofs);
    return sys;
}

GlobalSystem assemble(const Mesh& mesh, const std::vector<double>& E_per_element,
                      const NuByRegion& nu, const BoundarySets& bsets,
                      double prescribed_disp) {
    std::vector<Constraint> cs;
    cs.reserve(bsets.bottom_nodes.size() + bsets.strip_top_nodes.size() + 1);
    for (int n : bsets.bottom_nodes) cs.push_back({2 * n + 1, 0.0});
    cs.push_back({2 * bsets.pin_node, 0.0});
    for (int n : bsets.strip_top_nodes) cs.push_back({2 * n + 1, prescribed_disp});
    return assemble_with_constraints(mesh, E_per_element, nu, std::move(cs));
}

AssemblyCache::AssemblyCache(const Mesh& mesh, const NuByRegion& nu,
                             const BoundarySets& bsets) {
    const int n_dofs = 2 * static_cast<int>(mesh.nodes.size());
    const std::size_t ne = mesh.elements.size();
    unit_.resize(ne);
    slots_.resize(ne);

    ShapeCache shapes;
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(ne * 64);
    for (const Element& e : mesh.elements) {
        const double nu_e = (e.region == Region::rubber) ? nu.rubber : nu.casi;
        const Eigen::Matrix<double, 8, 8> k = unit_element_k(mesh, e, nu_e, shapes);
        int dofs[8];
        element_dofs(e, dofs);
        for (int r = 0; r < 8; ++r) {
            for (int c = 0; c < 8; ++c) {
                unit_[e.id][8 * r + c] = k(r, c);
                trip.emplace_back(dofs[r], dofs[c], 0.0);  // pattern only
            }
        }
    }
    sys_.stiffness.resize(n_dofs, n_dofs);
    sys_.stiffness.setFromTriplets(trip.begin(), trip.end());
    sys_.rhs = Eigen::VectorXd::Zero(n_dofs);

    // map every element entry to its slot in the compressed value array
    const int* outer = sys_.stiffness.outerIndexPtr();
    const int* inner = sys_.stiffness.innerIndexPtr();
    for (const Element& e : mesh.elements) {
        int dofs[8];
        element_dofs(e, dofs);
        for (int r = 0; r < 8; ++r) {
            for (int c = 0; c < 8; ++c) {
                const int col = dofs[c];
                const int* lo = inner + outer[col];
                const int* hi = inner + outer[col + 1];
                const int* p = std::lower_bound(lo, hi, dofs[r]);
                slots_[e.id][8 * r + c] = static_cast<int>(p - inner);
            }
        }
    }

    std::vector<Constraint> cs;
    cs.reserve(bsets.bottom_nodes.size() + bsets.strip_top_nodes.size() + 1);
    for (int n : bsets.bottom_nodes) cs.push_back({2 * n + 1, 0.0});
    cs.push_back({2 * bsets.pin_node, 0.0});
    for (int n : bsets.strip_top_nodes) cs.push_back({2 * n + 1, 0.0});
    sys_.constraints = normalize_constraints(std::move(cs), n_dofs);
    for (int n : bsets.strip_top_nodes) {
        const int dof = 2 * n + 1;
        const auto it = std::lower_bound(
            sys_.constraints.begin(), sys_.constraints.end(), dof,
            [](const Constraint& c, int d) { return c.dof < d; });
        prescribed_idx_.push_back(
            static_cast<std::size_t>(it - sys_.constraints.begin()));
    }
}

const GlobalSystem& AssemblyCache::update(const std::vector<double>& E_per_element,
                                          double prescribed_disp) {
    if (E_per_element.size() != unit_.size()) {
        throw ConfigError("assemble: modulus array does not match element count");
    }
    for (double E : E_per_element) {
        if (!(E > 0.0)) throw ConfigError("assemble: element modulus must be positive");
    }
    double* v = sys_.stiffness.valuePtr();
    std::fill(v, v + sys_.stiffness.nonZeros(), 0.0);
    for (std::size_t e = 0; e < unit_.size(); ++e) {
        const double E = E_per_element[e];
        const std::array<double, 64>& k = unit_[e];
        const std::array<int, 64>& sl = slots_[e];
        for (int t = 0; t < 64; ++t) v[sl[t]] += E * k[t];
    }
    for (std::size_t i : prescribed_idx_) sys_.constraints[i].value = prescribed_disp;
    return sys_;
}

Eigen::VectorXd EliminationSolver::solve(const GlobalSystem& system) {
    const int n = static_cast<int>(system.stiffness.rows());

    const Eigen::SparseMatrix<double>* Kp = &system.stiffness;
    Eigen::SparseMatrix<double> compressed;
    if (!Kp->isCompressed()) {
        compressed = *Kp;
        compressed.makeCompressed();
        Kp = &compressed;
    }
    const Eigen::SparseMatrix<double>& K = *Kp;

    // (re)build the free-dof map when the constraint layout changes
    bool layout_ok = initialized_ && static_cast<int>(free_index_.size()) == n;
    if (layout_ok) {
        for (const Constraint& c : system.constraints) {
            if (free_index_[c.dof] != -1) {
                layout_ok = false;
                break;
            }
        }
        if (layout_ok &&
            n_free_ != n - static_cast<int>(system.constraints.size())) {
            layout_ok = false;
        }
    }
    if (!layout_ok) {
        free_index_.assign(n, 0);
        for (const Constraint& c : system.constraints) free_index_[c.dof] = -1;
        n_free_ = 0;
        for (int d = 0; d < n; ++d) {
            if (free_index_[d] == 0) free_index_[d] = n_free_++;
            // constrained entries stay -1
        }
        initialized_ = false;
    }
    if (n_free_ == 0) throw SolverError("solve: no free dofs");

    const int nnz = static_cast<int>(K.nonZeros());
    const int* outer = K.outerIndexPtr();
    const int* inner = K.innerIndexPtr();
    const double* val = K.valuePtr();

    const bool pattern_ok =
        initialized_ && static_cast<int>(pat_outer_.size()) == K.outerSize() + 1 &&
        static_cast<int>(pat_inner_.size()) == nnz &&
        std::memcmp(pat_outer_.data(), outer, pat_outer_.size() * sizeof(int)) == 0 &&
        std::memcmp(pat_inner_.data(), inner, pat_inner_.size() * sizeof(int)) == 0;

    Eigen::VectorXd u_c = Eigen::VectorXd::Zero(n);
    for (const Constraint& c : system.constraints) u_c[c.dof] = c.value;

    // reduced system: K_ff x = rhs_f - K_fc u_c
    Eigen::VectorXd rhs_red(n_free_);
    for (int d = 0; d < n; ++d) {
        if (free_index_[d] >= 0) rhs_red[free_index_[d]] = system.rhs[d];
    }
    if (pattern_ok) {
        // same pattern and layout as last time: refill values in place
        double* rv = K_red_.valuePtr();
        for (int col = 0; col < K.outerSize(); ++col) {
            const int jc = free_index_[col];
            const double uc = u_c[col];
            const bool to_rhs = jc < 0 && uc != 0.0;
            for (int k = outer[col]; k < outer[col + 1]; ++k) {
                const int ir = free_index_[inner[k]];
                if (ir < 0) continue;
                if (jc >= 0) {
                    rv[red_slot_[k]] = val[k];
                } else if (to_rhs) {
                    rhs_red[ir] -= val[k] * uc;
                }
            }
        }
    } else {
        std::vector<Eigen::Triplet<double>> trip;
        trip.reserve(nnz);
        for (int col = 0; col < K.outerSize(); ++col) {
            const int jc = free_index_[col];
            for (int k = outer[col]; k < outer[col + 1]; ++k) {
                const int ir = free_index_[inner[k]];
                if (ir < 0) continue;
                if (jc >= 0) {
                    trip.emplace_back(ir, jc, val[k]);
                } else if (u_c[col] != 0.0) {
                    rhs_red[ir] -= val[k] * u_c[col];
                }
            }
        }
        K_red_ = Eigen::SparseMatrix<double>(n_free_, n_free_);
        K_red_.setFromTriplets(trip.begin(), trip.end());

        // remember the pattern and where each kept entry lands in K_red
        pat_outer_.assign(outer, outer + K.outerSize() + 1);
        pat_inner_.assign(inner, inner + nnz);
        red_slot_.assign(nnz, -1);
        const int* r_outer = K_red_.outerIndexPtr();
        const int* r_inner = K_red_.innerIndexPtr();
        for (int col = 0; col < K.outerSize(); ++col) {
            const int jc = free_index_[col];
            if (jc < 0) continue;
            for (int k = outer[col]; k < outer[col + 1]; ++k) {
                const int ir = free_index_[inner[k]];
                if (ir < 0) continue;
                const int* lo = r_inner + r_outer[jc];
                const int* hi = r_inner + r_outer[jc + 1];
                const int* p = std::lower_bound(lo, hi, ir);
                red_slot_[k] = static_cast<int>(p - r_inner);
            }
        }
        ldlt_.analyzePattern(K_red_);
        initialized_ = true;
    }

    ldlt_.factorize(K_red_);
    if (ldlt_.info() != Eigen::Success) {
        throw SolverError("solve: sparse LDLT factorization failed (singular system?)");
    }

    Eigen::VectorXd x = ldlt_.solve(rhs_red);
    if (!x.allFinite()) throw SolverError("solve: non-finite solution");

    const double rhs_norm = rhs_red.norm();
    if (rhs_norm > 0.0) {
        // a couple of refinement steps keep the residual near machine level
        // even when degraded elements stretch the conditioning
        double rel = (K_red_ * x - rhs_red).norm() / rhs_norm;
        for (int it = 0; it < 2 && rel > 1e-13; ++it) {
            const Eigen::VectorXd dx = ldlt_.solve(rhs_red - K_red_ * x);
            if (!dx.allFinite()) break;
            x += dx;
            rel = (K_red_ * x - rhs_red).norm() / rhs_norm;
        }
        if (!(rel <= 1e-10)) {
            std::ostringstream msg;
            msg << "solve: relative residual " << rel << " exceeds 1e-10";
            throw SolverError(msg.str());
        }
    }

    // near-zero pivots mean an unconstrained rigid mode the residual can miss
    const auto& D = ldlt_.vectorD();
    const double dmax = D.cwiseAbs().maxCoeff();
    const double dmin = D.cwiseAbs().minCoeff();
    if (!(dmin > 1e-14 * dmax)) {
        throw SolverError("solve: near-singular reduced system (rigid mode left?)");
    }

    Eigen::VectorXd u = u_c;
    for (int d = 0; d < n; ++d) {
        if (free_index_[d] >= 0) u[d] = x[free_index_[d]];
    }
    return u;
}

Eigen::VectorXd solve(const GlobalSystem& system) {
    EliminationSolver solver;
    return solver.solve(system);
}

double principal_max(double txx, double tyy, double txy) {
    const double mid = 0.5 * (txx + tyy);
    const double half = 0.5 * (txx - tyy);
    return mid + std::sqrt(half * half + txy * txy);
}

FieldState recover_fields(const Mesh& mesh, const Eigen::VectorXd& u,
                          const std::vector<double>& E_per_element,
                          const NuByRegion& nu) {
    const std::size_t ne = mesh.elements.size();
    FieldState f;
    f.u = u;
    f.strain.resize(ne);
    f.stress.resize(ne);
    f.ep1.resize(ne);
    f.sp1.resize(ne);
    f.E_current = E_per_element;

    Eigen::Matrix<double, 3, 8> B;
    Eigen::Matrix<double, 8, 1> ue;
    for (const Element& e : mesh.elements) {
        strain_displacement(element_coords(mesh, e), 0.0, 0.0, B);  // centroid
        for (int a = 0; a < 4; ++a) {
            ue[2 * a] = u[2 * e.nodes[a]];
            ue[2 * a + 1] = u[2 * e.nodes[a] + 1];
        }
        const Eigen::Vector3d eps = B * ue;
        const double nu_e = (e.region == Region::rubber) ? nu.rubber : nu.casi;
        const Eigen::Vector3d sig = plane_strain_C(E_per_element[e.id], nu_e) * eps;
        f.strain[e.id] = {eps[0], eps[1], eps[2]};
        f.stress[e.id] = {sig[0], sig[1], sig[2]};
        // Voigt shear is engineering strain; the tensor component is half
        f.ep1[e.id] = principal_max(eps[0], eps[1], 0.5 * eps[2]);
        f.sp1[e.id] = principal_max(sig[0], sig[1], sig[2]);
    }
    return f;
}

Eigen::VectorXd reactions(const GlobalSystem& system, const Eigen::VectorXd& u) {
    return system.stiffness * u - system.rhs;
}

double vertical_reaction(const GlobalSystem& system, const Eigen::VectorXd& u,
                         const std::vector<int>& nodes) {
    const Eigen::VectorXd r = reactions(system, u);
    double sum = 0.0;
    for (int n : nodes) sum += r[2 * n + 1];
    return sum;
}

double contact_stress(double force, double bearing_width, double depth) {
    if (!(bearing_width > 0.0 && depth > 0.0)) {
        throw InputError("contact stress: bearing area must be positive");
    }
    return force / (bearing_width * depth);
}

double equilibrium_residual(const GlobalSystem& system, const Eigen::VectorXd& u) {
    const Eigen::VectorXd r = reactions(system, u);
    double sum_x = 0.0, sum_y = 0.0;
    for (int d = 0; d < r.size(); d += 2) {
        sum_x += r[d];
        sum_y += r[d + 1];
    }
    double scale = 0.0;
    for (const Constraint& c : system.constraints) {
        if (c.dof % 2 == 1) scale += std::abs(r[c.dof]);
    }
    if (scale <= 0.0) scale = 1.0;
    return (std::abs(sum_x) + std::abs(sum_y)) / scale;
}

}  // namespace fracsim
