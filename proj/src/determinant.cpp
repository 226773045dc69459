#include "linresp/determinant.hpp"

#include <cmath>

#include "linresp/numerics.hpp"

namespace linresp {

DecayFit decay_fit_values(const std::vector<double>& a_from_zero, DecayMode mode,
                          double floor) {
  std::vector<double> xs, ys;
  DecayFit out;
  for (std::size_t n = 1; n < a_from_zero.size(); ++n) {
    double an = std::fabs(a_from_zero[n]);
    if (an <= floor) continue;  // below this the digits are roundoff, not decay
    double nn = static_cast<double>(n);
    double x = (mode == DecayMode::circle) ? nn * nn : std::pow(nn, 1.5);
    xs.push_back(x);
    ys.push_back(std::log(an));
    out.floor_n = static_cast<int>(n);
  }
  if (xs.size() < 4)
    throw std::runtime_error("insufficient decay data above precision floor");
  LinearFit fit = least_squares(xs, ys);
  out.theta = std::exp(fit.slope);
  out.beta = -fit.slope;
  out.r2 = fit.r2;
  out.npts = xs.size();
  return out;
}

}  // namespace linresp
