#include "sbmt/fem.hpp"

#include <cmath>

#include "sbmt/errors.hpp"
#include "sbmt/preprocess.hpp"

namespace sbmt {

namespace {

using SpMat = Eigen::SparseMatrix<double>;
using Solver = Eigen::ConjugateGradient<SpMat, Eigen::Lower | Eigen::Upper, Eigen::DiagonalPreconditioner<double>>;

constexpr double kCgTol = 1e-10;

std::vector<int> interior_vertices(const SparseSystem& sys) {
  std::vector<int> out;
  for (int v = 0; v < static_cast<int>(sys.boundary.size()); ++v)
    if (!sys.boundary[v]) out.push_back(v);
  return out;
}

// rows and columns of A restricted to idx
SpMat restrict(const SpMat& A, const std::vector<int>& idx) {
  std::vector<int> pos(A.rows(), -1);
  for (int i = 0; i < static_cast<int>(idx.size()); ++i) pos[idx[i]] = i;
  std::vector<Eigen::Triplet<double>> trip;
  for (int k = 0; k < A.outerSize(); ++k)
    for (SpMat::InnerIterator it(A, k); it; ++it)
      if (pos[it.row()] >= 0 && pos[it.col()] >= 0) trip.emplace_back(pos[it.row()], pos[it.col()], it.value());
  SpMat R(static_cast<int>(idx.size()), static_cast<int>(idx.size()));
  R.setFromTriplets(trip.begin(), trip.end());
  return R;
}

Eigen::VectorXd solve_checked(Solver& cg, const SpMat& A, const Eigen::VectorXd& b, int* iters) {
  cg.setTolerance(kCgTol);
  cg.setMaxIterations(std::max<Eigen::Index>(10 * A.rows(), 10));
  Eigen::VectorXd x = cg.solve(b);
  if (iters) *iters = static_cast<int>(cg.iterations());
  if (cg.info() != Eigen::Success) throw SolverFailure("conjugate gradient did not converge");
  return x;
}

}  // namespace

SparseSystem assemble(const HalfEdgeMesh& mesh, const std::vector<PolyChain>& chains, Tolerance tol) {
  const int n = mesh.num_vertices();
  SparseSystem sys;
  sys.M = Eigen::VectorXd::Zero(n);
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(mesh.num_faces() * 12);
  for (int f = 0; f < mesh.num_faces(); ++f) {
    const Tri& t = mesh.face(f);
    double area = mesh.face_area(f);
    if (!(area > 0)) throw DegenerateFace("face " + std::to_string(f) + " has non-positive area");
    bool obtuse = false;
    for (int k = 0; k < 3; ++k) {
      int i = t[(k + 1) % 3], j = t[(k + 2) % 3];
      Point2 u = mesh.vertex(i) - mesh.vertex(t[k]), v = mesh.vertex(j) - mesh.vertex(t[k]);
      double cot = u.dot(v) / std::abs(cross(u, v));
      if (cot < 0) obtuse = true;
      double w = 0.5 * cot;
      trip.emplace_back(i, j, -w);
      trip.emplace_back(j, i, -w);
      trip.emplace_back(i, i, w);
      trip.emplace_back(j, j, w);
      sys.M[t[k]] += area / 3.0;
    }
    if (obtuse) ++sys.obtuse_faces;
  }
  sys.L.resize(n, n);
  sys.L.setFromTriplets(trip.begin(), trip.end());
  sys.boundary = mesh.boundary_vertex_mask();
  if (!chains.empty()) {
    ChainIndex idx(chains, 1.0);
    for (int v = 0; v < n; ++v) {
      if (sys.boundary[v]) continue;
      for (int sid : idx.segments_near(mesh.vertex(v), tol.eps))
        if (point_segment_distance(mesh.vertex(v), idx.segment(sid)).dist < tol.eps) sys.boundary[v] = 1;
    }
  }
  return sys;
}

HeatSolver::HeatSolver(const SparseSystem& sys, double alpha, double dt) : sys_(sys), interior_(interior_vertices(sys)) {
  if (!(dt > 0)) throw SolverFailure("time step must be positive");
  SpMat Mdiag(sys.L.rows(), sys.L.cols());
  std::vector<Eigen::Triplet<double>> d;
  for (int i = 0; i < sys.M.size(); ++i) d.emplace_back(i, i, sys.M[i]);
  Mdiag.setFromTriplets(d.begin(), d.end());
  SpMat full = Mdiag + (dt * alpha) * sys.L;
  A_ = restrict(full, interior_);
  cg_.compute(A_);
  if (cg_.info() != Eigen::Success) throw SolverFailure("preconditioner setup failed");
}

ScalarField HeatSolver::step(const ScalarField& u) const {
  ScalarField out = ScalarField::Zero(u.size());
  if (interior_.empty()) return out;
  Eigen::VectorXd b(interior_.size()), x0(interior_.size());
  for (size_t i = 0; i < interior_.size(); ++i) {
    b[i] = sys_.M[interior_[i]] * u[interior_[i]];
    x0[i] = u[interior_[i]];
  }
  cg_.setTolerance(kCgTol);
  cg_.setMaxIterations(std::max<Eigen::Index>(10 * A_.rows(), 10));
  Eigen::VectorXd x = cg_.solveWithGuess(b, x0);
  iterations_ = static_cast<int>(cg_.iterations());
  if (cg_.info() != Eigen::Success) throw SolverFailure("conjugate gradient did not converge");
  for (size_t i = 0; i < interior_.size(); ++i) out[interior_[i]] = x[i];
  return out;
}

ScalarField heat_step(const SparseSystem& sys, const ScalarField& u, double alpha, double dt) {
  return HeatSolver(sys, alpha, dt).step(u);
}

ScalarField solve_harmonic(const SparseSystem& sys, const ScalarField& g) {
  auto interior = interior_vertices(sys);
  if (interior.size() == sys.boundary.size()) throw SolverFailure("no boundary vertices to constrain");
  ScalarField u = ScalarField::Zero(g.size());
  for (int v = 0; v < static_cast<int>(g.size()); ++v)
    if (sys.boundary[v]) u[v] = g[v];
  if (interior.empty()) return u;
  // right-hand side: -L_IB g_B
  Eigen::VectorXd Lg = sys.L * u;
  Eigen::VectorXd b(interior.size());
  for (size_t i = 0; i < interior.size(); ++i) b[i] = -Lg[interior[i]];
  SpMat A = restrict(sys.L, interior);
  Solver cg;
  cg.compute(A);
  Eigen::VectorXd x = solve_checked(cg, A, b, nullptr);
  for (size_t i = 0; i < interior.size(); ++i) u[interior[i]] = x[i];
  double bn = b.norm();
  double res = (A * x - b).norm();
  if (res > 1e-8 * std::max(bn, 1.0)) throw SolverFailure("harmonic residual too large");
  return u;
}

double dirichlet_energy(const SparseSystem& sys, const ScalarField& u) { return u.dot(sys.L * u); }

ScalarField gaussian_field(const HalfEdgeMesh& mesh, const Point2& center, double sigma, double amplitude) {
  ScalarField u(mesh.num_vertices());
  for (int v = 0; v < mesh.num_vertices(); ++v)
    u[v] = amplitude * std::exp(-(mesh.vertex(v) - center).squaredNorm() / (2 * sigma * sigma));
  return u;
}

}  // namespace sbmt
