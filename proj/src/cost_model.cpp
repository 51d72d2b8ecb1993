#include <cmath>

#include "randqb/errors.hpp"
#include "randqb/harness.hpp"

namespace rqb {

CostPrediction cost_model_predict(const CostParams& c) {
  const bool positive = c.m > 0 && c.n > 0 && c.ell > 0 && c.b > 0 && c.c_mm > 0 && c.c_qr > 0;
  if (!positive || !(c.p >= 0)) {
    throw ValidationError("cost_model_predict: m, n, ell, b, c_mm, c_qr must be positive and p >= 0");
  }
  const double s = c.ell / c.b;
  if (s != std::floor(s)) {
    throw ValidationError("cost_model_predict: block size " + std::to_string(c.b) +
                          " does not divide ell " + std::to_string(c.ell));
  }
  const double mnl = c.m * c.n * c.ell;
  const double ml2 = c.m * c.ell * c.ell;
  CostPrediction t;
  t.t_randqb = 2 * c.c_mm * mnl + c.c_qr * ml2;
  t.t_randqb_b = 3 * c.c_mm * mnl + c.c_mm * ml2 + (2 / s) * c.c_qr * ml2;
  t.t_randqb_p = c.c_mm * (2 + 2 * c.p) * mnl + c.c_qr * (1 + 2 * c.p) * ml2;
  t.t_randqb_pb = c.c_mm * (3 + 2 * c.p) * mnl + c.c_mm * ml2 + (1 / s) * c.c_qr * (2 + 2 * c.p) * ml2;
  return t;
}

}  // namespace rqb
