#pragma once

#include <Eigen/Sparse>
#include <vector>

#include "sbmt/boundary.hpp"
#include "sbmt/mesh.hpp"

namespace sbmt {

using ScalarField = Eigen::VectorXd;

struct SparseSystem {
  Eigen::SparseMatrix<double> L;  // cotangent stiffness, positive semi-definite
  Eigen::VectorXd M;              // lumped mass
  std::vector<char> boundary;     // Dirichlet vertices
  int obtuse_faces = 0;
};

// Boundary = mesh hull plus vertices lying on the given chains.
SparseSystem assemble(const HalfEdgeMesh& mesh, const std::vector<PolyChain>& chains = {}, Tolerance tol = {});

// Implicit Euler for u_t = alpha * Laplacian(u), zero on the boundary. Keeps
// the reduced operator between steps.
class HeatSolver {
 public:
  HeatSolver(const SparseSystem& sys, double alpha, double dt);
  ScalarField step(const ScalarField& u) const;
  int last_iterations() const { return iterations_; }

 private:
  const SparseSystem& sys_;
  std::vector<int> interior_;
  Eigen::SparseMatrix<double> A_;
  mutable Eigen::ConjugateGradient<Eigen::SparseMatrix<double>, Eigen::Lower | Eigen::Upper,
                                   Eigen::DiagonalPreconditioner<double>>
      cg_;
  mutable int iterations_ = 0;
};

ScalarField heat_step(const SparseSystem& sys, const ScalarField& u, double alpha, double dt);

// L u = 0 inside, u = g on the boundary (g is read at boundary vertices only).
ScalarField solve_harmonic(const SparseSystem& sys, const ScalarField& g);

double dirichlet_energy(const SparseSystem& sys, const ScalarField& u);

ScalarField gaussian_field(const HalfEdgeMesh& mesh, const Point2& center, double sigma, double amplitude);

}  // namespace sbmt
