#include "degdiff/oracle1d.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

#include "degdiff/csv.hpp"
#include "degdiff/errors.hpp"

namespace degdiff::oracle {

Grid1D fd_evolve_1d(const std::function<double(double)>& u_in, double u0, double u1, const Potential& v, int nx,
                    double dt, double t_end, const FdOptions& options) {
  if (nx < 2) throw std::invalid_argument("fd_evolve_1d: nx must be at least 2");
  if (!(u0 > 0.0) || !(u1 > 0.0)) throw std::invalid_argument("fd_evolve_1d: boundary data must be positive");
  if (!(dt > 0.0) || !(t_end >= 0.0)) throw std::invalid_argument("fd_evolve_1d: need dt > 0 and t_end >= 0");

  Grid1D g;
  g.nx = nx;
  g.h = 1.0 / nx;
  g.u.resize(nx + 1);
  std::vector<double> w(nx + 1), vnode(nx + 1), next(nx + 1);
  double vslope = 0.0;
  for (int i = 0; i <= nx; ++i) {
    const double x = i == nx ? 1.0 : i * g.h;
    g.u[i] = std::max(u_in(x), 0.0);
    vnode[i] = v(x);
    if (i > 0) vslope = std::max(vslope, std::abs(vnode[i] - vnode[i - 1]) / g.h);
  }
  g.u[0] = u0;
  g.u[nx] = u1;
  const double bound = 10.0 * std::max({u0, u1, *std::max_element(g.u.begin(), g.u.end())});
  const double h2 = g.h * g.h;

  const long outputs = std::lround(t_end / dt);
  for (long n = 0; n < outputs; ++n) {
    double remaining = dt;
    while (remaining > 0.0) {
      const double umax = std::max(*std::max_element(g.u.begin(), g.u.end()), 1e-300);
      // Diffusive bound plus a drift bound for the central flux.
      double tau = options.safety * h2 / umax;
      if (vslope > 0.0) tau = std::min(tau, 0.5 * g.h / vslope);
      if (tau >= remaining * (1.0 - 1e-12)) tau = remaining;
      const double r = tau / h2;
      for (int i = 0; i <= nx; ++i) w[i] = g.u[i] + vnode[i];
      double rate = 0.0;
      next[0] = u0;
      next[nx] = u1;
      for (int i = 1; i < nx; ++i) {
        const double ar = 0.5 * (std::max(g.u[i], 0.0) + std::max(g.u[i + 1], 0.0));
        const double al = 0.5 * (std::max(g.u[i - 1], 0.0) + std::max(g.u[i], 0.0));
        double val = g.u[i] + r * (ar * (w[i + 1] - w[i]) - al * (w[i] - w[i - 1]));
        val = std::max(val, 0.0);
        if (!(val <= bound))
          throw InstabilityError("fd_evolve_1d: value " + format_real(val) + " exceeds " + format_real(bound) +
                                 " at t=" + format_real(g.t));
        rate = std::max(rate, std::abs(val - g.u[i]));
        next[i] = val;
      }
      g.u.swap(next);
      g.last_rate = rate / tau;
      g.t += tau;
      remaining -= tau;
      ++g.substeps;
    }
    if (options.steady_tol > 0.0 && g.last_rate < options.steady_tol) break;
  }
  return g;
}

std::vector<double> face_fluxes(const Grid1D& g, const Potential& v) {
  std::vector<double> f(g.nx);
  for (int i = 0; i < g.nx; ++i) {
    const double xl = g.x(i);
    const double xr = i + 1 == g.nx ? 1.0 : g.x(i + 1);
    const double a = 0.5 * (std::max(g.u[i], 0.0) + std::max(g.u[i + 1], 0.0));
    f[i] = a * ((g.u[i + 1] + v(xr)) - (g.u[i] + v(xl))) / g.h;
  }
  return f;
}

void write_profile_csv(std::ostream& os, const Grid1D& g) {
  os << "# t=" << format_real(g.t) << "\nx,u\n";
  for (int i = 0; i <= g.nx; ++i) write_csv_row(os, {i == g.nx ? 1.0 : g.x(i), g.u[i]});
}

}  // namespace degdiff::oracle
