#pragma once

#include <Eigen/Core>
#include <cmath>
#include <string>

#include "bregkit/errors.hpp"

namespace bregkit {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

inline void check_finite(const Vec& v, const char* what) {
  if (!v.allFinite()) throw ArgumentError(std::string(what) + ": entries must be finite");
}

inline void check_dim(const Vec& v, int dim, const char* what) {
  if (v.size() != dim)
    throw ArgumentError(std::string(what) + ": expected dimension " + std::to_string(dim) +
                        ", got " + std::to_string(v.size()));
}

}  // namespace bregkit
