#include "taumax/hermite.hpp"

#include "taumax/errors.hpp"

namespace taumax {

double hermite_eval(int i, double q) {
  if (i < 0) throw ConfigError("Hermite order must be nonnegative");
  double prev = 1.0;
  if (i == 0) return prev;
  double cur = 2.0 * q;
  for (int k = 2; k <= i; ++k) {
    const double next = 2.0 * q * cur - 2.0 * (k - 1) * prev;
    prev = cur;
    cur = next;
  }
  return cur;
}

}  // namespace taumax
