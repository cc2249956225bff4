#pragma once

// Real branches of the Lambert W function used by the closed-form
// stationary propagator.

namespace degdiff::specfun {

/// Principal branch W: [-1/e, inf) -> [-1, inf), the inverse of w e^w.
/// Throws BranchDomainError for y < -1/e - 1e-15.
double lambert_w0(double y);

/// Inverse of e^w / w restricted to w >= 1, defined on [e, inf).
/// Throws BranchDomainError for y < e - 1e-15.
double lambert_w_upper(double y);

/// W0(e^log_y). Stays finite where e^log_y itself would overflow.
double lambert_w0_exp(double log_y);

/// lambert_w_upper(e^(1 + excess)) for excess = ln(y) - 1 >= 0. Taking the
/// excess directly keeps full relative accuracy next to the branch point.
double lambert_w_upper_excess(double excess);

/// x - log(1 + x), accurate for small |x|.
double x_minus_log1p(double x);

}  // namespace degdiff::specfun
