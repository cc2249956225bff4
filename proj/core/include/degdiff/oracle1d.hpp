#pragma once

#include <functional>
#include <iosfwd>
#include <vector>

#include "degdiff/potential.hpp"

// Explicit conservative finite differences for
//   u_t = (u (u + V)_x)_x on (0,1),  u(0,t) = u0,  u(1,t) = u1.

namespace degdiff::oracle {

struct Grid1D {
  int nx = 0;
  double h = 0.0;
  double t = 0.0;
  std::vector<double> u;  // nx + 1 nodal values
  /// max_i |u_i^{n+1} - u_i^n| / dt of the last sub-step.
  double last_rate = 0.0;
  int substeps = 0;

  double x(int i) const { return i * h; }
};

struct FdOptions {
  /// Sub-step bound as a fraction of h^2 / max u.
  double safety = 0.25;
  /// Stop once last_rate falls below this (0 runs to t_end).
  double steady_tol = 0.0;
};

/// Advances u_in to t_end in output steps of dt, each split into explicit
/// sub-steps short enough for stability. Values are clamped at zero after
/// every sub-step. Throws InstabilityError if a value exceeds ten times the
/// largest datum.
Grid1D fd_evolve_1d(const std::function<double(double)>& u_in, double u0, double u1, const Potential& v, int nx,
                    double dt, double t_end, const FdOptions& options = {});

/// Face fluxes a_{i+1/2} (w_{i+1} - w_i) / h with w = u + V, i = 0..nx-1.
/// At a steady state they equal the flux constant c.
std::vector<double> face_fluxes(const Grid1D& g, const Potential& v);

/// `x,u` CSV preceded by a `# t=<value>` comment line.
void write_profile_csv(std::ostream& os, const Grid1D& g);

}  // namespace degdiff::oracle
