#include <doctest.h>

#include "gradcheck.hpp"

using namespace iconforge::testing;

TEST_CASE("analytic gradients match finite differences on a few configurations") {
  unsigned seed = 100;
  for (const GradCase& gc : gradient_cases()) {
    const GradReport r = check_operator(gc, 3, seed++);
    CAPTURE(gc.op);
    CAPTURE(r.first_failure);
    CHECK(r.configs == 3);
    CHECK(r.failures == 0);
  }
}
