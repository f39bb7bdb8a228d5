#pragma once

#include <functional>

namespace qkd {

/// Composite Gauss-Legendre quadrature over [ax,bx] x [ay,by], `panels`
/// subdivisions per axis with a fixed 10-node rule on each panel.
double gauss_legendre_2d(const std::function<double(double, double)>& f, double ax,
                         double bx, double ay, double by, int panels);

/// Panel-doubling refinement until successive estimates agree to rel_tol
/// (relative when the magnitude allows, absolute near zero). Throws
/// std::runtime_error if the tolerance is not reached.
double integrate_2d_adaptive(const std::function<double(double, double)>& f, double ax,
                             double bx, double ay, double by, double rel_tol);

}  // namespace qkd
