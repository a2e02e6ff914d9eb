#pragma once

// Iteration bookkeeping shared by the averaging and zero-finding drivers.

#include <vector>

#include "riem/manifold.hpp"

namespace riem {

enum class StopReason { tolerance, max_iter, domain_exit };

inline const char* to_string(StopReason r) {
  switch (r) {
    case StopReason::tolerance: return "tolerance";
    case StopReason::max_iter: return "max_iter";
    case StopReason::domain_exit: return "domain_exit";
  }
  return "?";
}

struct IterationTrace {
  std::vector<Point> iterates;
  std::vector<double> step_lengths;   // ||Y(p_n)|| = d(p_n, p_{n+1})
  std::vector<double> ratios;         // step_lengths[n] / step_lengths[n-1]
  std::vector<double> certificates;   // a-posteriori bounds where available
  bool converged = false;
  StopReason reason = StopReason::max_iter;

  double max_ratio() const {
    double m = 0.0;
    for (double r : ratios) m = std::max(m, r);
    return m;
  }
};

}  // namespace riem
