#pragma once

#include "bregkit/types.hpp"

// Shared helpers for the unit tests.
namespace testsup {

inline bregkit::Vec v1(double a) {
  bregkit::Vec v(1);
  v << a;
  return v;
}

inline bregkit::Vec v2(double a, double b) {
  bregkit::Vec v(2);
  v << a, b;
  return v;
}

inline bregkit::Vec v3(double a, double b, double c) {
  bregkit::Vec v(3);
  v << a, b, c;
  return v;
}

inline double maxdiff(const bregkit::Vec& a, const bregkit::Vec& b) {
  return (a - b).cwiseAbs().maxCoeff();
}

}  // namespace testsup
