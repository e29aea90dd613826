#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include <array>
#include <vector>

#include "fracsim/mesh.hpp"

namespace fracsim {

/// 3x3 Voigt matrix relating (sxx, syy, sxy) to (exx, eyy, gxy).
using ElasticityMatrix = Eigen::Matrix3d;

ElasticityMatrix plane_strain_C(double E, double nu);

struct NuByRegion {
    double casi = 0.2;
    double rubber = 0.45;
};

/// Bilinear quad stiffness, 2x2 Gauss. corner_xy = (x0,y0,...,x3,y3) CCW.
Eigen::Matrix<double, 8, 8> element_stiffness(const std::array<double, 8>& corner_xy,
                                              const ElasticityMatrix& C,
                                              double thickness);

struct Constraint {
    int dof = -1;
    double value = 0.0;
};

/// Full (unreduced) system; constraints are applied by elimination at solve
/// time so the retained full operator yields exact reactions K*u - rhs.
struct GlobalSystem {
    Eigen::SparseMatrix<double> stiffness;  // 2 dofs per node, both triangles stored
    Eigen::VectorXd rhs;                    // zero body force
    std::vector<Constraint> constraints;    // sorted by dof, unique
};

GlobalSystem assemble(const Mesh& mesh, const std::vector<double>& E_per_element,
                      const NuByRegion& nu, const BoundarySets& bsets,
                      double prescribed_disp);

GlobalSystem assemble_with_constraints(const Mesh& mesh,
                                       const std::vector<double>& E_per_element,
                                       const NuByRegion& nu,
                                       std::vector<Constraint> constraints);

/// Repeated-assembly cache for the engines: the sparsity pattern, the
/// per-element scatter targets, and the constraint layout are fixed by the
/// mesh, so each update is a value-only refill (k is linear in E). Keeps the
/// assembled K bitwise symmetric like the one-shot path: the unit matrices
/// are symmetrized and (r,c)/(c,r) accumulate in the same order.
class AssemblyCache {
public:
    AssemblyCache(const Mesh& mesh, const NuByRegion& nu, const BoundarySets& bsets);

    /// Refills stiffness values and the prescribed constraint values.
    /// The returned reference stays valid until the next update.
    const GlobalSystem& update(const std::vector<double>& E_per_element,
                               double prescribed_disp);

private:
    GlobalSystem sys_;
    std::vector<std::array<double, 64>> unit_;   // row-major unit-E element k
    std::vector<std::array<int, 64>> slots_;     // matching value-array indices
    std::vector<std::size_t> prescribed_idx_;    // constraints carrying the disp
};

/// Direct sparse LDLT on the reduced (free-dof) system. Keeps the free-dof
/// map, the reduction scatter pattern, and the symbolic factorization across
/// calls, so repeated solves with the same mesh/constraint layout only
/// refill values and refactorize.
class EliminationSolver {
public:
    /// Returns the full displacement vector (constrained dofs filled in).
    /// Throws SolverError on factorization failure or residual > 1e-10 rel.
    Eigen::VectorXd solve(const GlobalSystem& system);

private:
    bool initialized_ = false;
    int n_free_ = 0;
    std::vector<int> free_index_;  // dof -> reduced index, -1 if constrained
    std::vector<int> pat_outer_, pat_inner_;  // full-K pattern the cache is for
    std::vector<int> red_slot_;  // full-K nnz index -> K_red value index, -1 dropped
    Eigen::SparseMatrix<double> K_red_;
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt_;
};

/// One-shot convenience wrapper around EliminationSolver.
Eigen::VectorXd solve(const GlobalSystem& system);

struct FieldState {
    Eigen::VectorXd u;                          // 2 per node
    std::vector<std::array<double, 3>> strain;  // centroid Voigt (exx, eyy, gxy)
    std::vector<std::array<double, 3>> stress;  // (sxx, syy, sxy)
    std::vector<double> ep1;                    // first principal strain
    std::vector<double> sp1;                    // first principal stress
    std::vector<double> E_current;              // modulus used per element
};

FieldState recover_fields(const Mesh& mesh, const Eigen::VectorXd& u,
                          const std::vector<double>& E_per_element,
                          const NuByRegion& nu);

/// Largest eigenvalue of a symmetric 2x2 tensor given its tensor shear.
double principal_max(double txx, double tyy, double txy);

/// Full reaction vector K*u - rhs.
Eigen::VectorXd reactions(const GlobalSystem& system, const Eigen::VectorXd& u);

/// Sum of vertical reaction components over a node set.
double vertical_reaction(const GlobalSystem& system, const Eigen::VectorXd& u,
                         const std::vector<int>& nodes);

double contact_stress(double force, double bearing_width, double depth);

/// |sum Rx| + |sum Ry| over all dofs, relative to the total vertical
/// constrained reaction magnitude (1 when the system carries no load).
double equilibrium_residual(const GlobalSystem& system, const Eigen::VectorXd& u);

}  // namespace fracsim
