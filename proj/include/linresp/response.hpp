#pragma once

#include "linresp/determinant.hpp"
#include "linresp/traces.hpp"

namespace linresp {

// Transfer-operator weight convention.  minus_ug: weight e^{-u g}/f' on the
// circle, mean = -d_u/d_z at z=1.  plus_vg: weight e^{+v g} on the torus,
// mean = +d_v/d_z.  The derivative arrays in DetSeries hold whichever of
// u or v was differentiated.
enum class WeightSign { minus_ug, plus_vg };

// All sums are the truncated series evaluated at z = 1.
double mean_observable(const DetSeries<double>& s, WeightSign w);

// Implicit-function derivative of the mean through the leading zero:
//   -/+ d_ut/d_z -/+ cross term; see linear_response_alt for the regrouped
// assembly used as an internal cross-check.
double linear_response(const DetSeries<double>& s, WeightSign w);

// Same quantity through the mean: sign*d_ut/d_z - mean*(sum n da_dt)/d_z.
double linear_response_alt(const DetSeries<double>& s, WeightSign w);

struct AbelDiagnostic {
  double estimate = 0.0;   // A = (1/n_max) d2b[n_max]
  double indicator = 0.0;  // max of the last three successive-step gaps
};

// Cesaro-type tail read off the mixed trace derivatives.  Requires a
// centered observable (throws "observable not centered" otherwise).  The
// response estimate is -A under e^{-ug} and +A under e^{+vg}.
AbelDiagnostic abel_diagnostic(const TraceSet& tr, WeightSign w, double mean);

struct ResponseReport {
  double mean = 0.0;
  double response = 0.0;
  double response_alt = 0.0;
  bool has_abel = false;
  double abel_estimate = 0.0;   // raw A; data only when has_abel
  double abel_indicator = 0.0;
  int truncation_n = 0;
  double tail_indicator = 0.0;  // |last term| of the slowest-decaying sum
};

// Mean/response/alt/tail from the coefficients; the Abel slot is attached
// only if the observable is already centered to 1e-8.
ResponseReport assemble_report(const DetSeries<double>& s, const TraceSet& tr,
                               WeightSign w);

}  // namespace linresp
