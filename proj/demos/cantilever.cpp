// Cantilever (clamped-free) beam under f = sin(pi x): compares a thick and a
// vanishing-thickness solve on the same mesh.

#include <cstdio>

#include "dpg_beam/dpg_beam.hpp"

int main() {
  using namespace dpg_beam;
  const Mesh mesh = uniform_mesh(16);
  for (double t : {1.0, 0.0}) {
    const Thickness th(t);
    const DpgSolution sol = assemble_and_solve(mesh, BoundaryCondition::cf, th, 1, sin_load);
    const ExactSolution exact = solve_exact(BoundaryCondition::cf, th);
    const ConvergenceRecord rec = compute_errors(sol, exact, mesh, 1);
    std::printf("t=%g  tip deflection %.8f (exact %.8f)  |u-u_h| %.3e  |M-M_h| %.3e  residual %.3e\n", t,
                sol.trace(mesh.num_nodes() - 1, NodalField::u), exact.u(1.0), rec.err_u, rec.err_M,
                rec.residual);
  }
}
