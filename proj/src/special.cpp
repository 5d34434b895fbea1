#include "cbop/special.hpp"

namespace cbop {

Integer factorial(unsigned n) {
  Integer out = 1;
  for (unsigned k = 2; k <= n; ++k) out *= k;
  return out;
}

}  // namespace cbop
