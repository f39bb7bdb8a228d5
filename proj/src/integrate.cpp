#include "qkd/integrate.hpp"

#include <array>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace qkd {

namespace {

// 10-point Gauss-Legendre nodes/weights on [-1, 1].
constexpr std::array<double, 5> kNodes = {
    0.1488743389816312, 0.4333953941292472, 0.6794095682990244,
    0.8650633666889845, 0.9739065285171717};
constexpr std::array<double, 5> kWeights = {
    0.2955242247147529, 0.2692667193099963, 0.2190863625159820,
    0.1494513491505806, 0.0666713443086881};

void fill_panel_nodes(double a, double b, int panels, double* xs, double* ws) {
    const double h = (b - a) / panels;
    int k = 0;
    for (int p = 0; p < panels; ++p) {
        const double mid = a + (p + 0.5) * h;
        const double half = 0.5 * h;
        for (int i = 0; i < 5; ++i) {
            xs[k] = mid - half * kNodes[i];
            ws[k] = half * kWeights[i];
            ++k;
            xs[k] = mid + half * kNodes[i];
            ws[k] = half * kWeights[i];
            ++k;
        }
    }
}

}  // namespace

double gauss_legendre_2d(const std::function<double(double, double)>& f, double ax,
                         double bx, double ay, double by, int panels) {
    if (panels < 1) throw std::invalid_argument("gauss_legendre_2d: panels must be >= 1");
    const int n = 10 * panels;
    std::vector<double> xs(n), wx(n), ys(n), wy(n);
    fill_panel_nodes(ax, bx, panels, xs.data(), wx.data());
    fill_panel_nodes(ay, by, panels, ys.data(), wy.data());
    double sum = 0.0;
    for (int i = 0; i < n; ++i) {
        double inner = 0.0;
        for (int j = 0; j < n; ++j) inner += wy[j] * f(xs[i], ys[j]);
        sum += wx[i] * inner;
    }
    return sum;
}

double integrate_2d_adaptive(const std::function<double(double, double)>& f, double ax,
                             double bx, double ay, double by, double rel_tol) {
    double prev = gauss_legendre_2d(f, ax, bx, ay, by, 1);
    for (int panels = 2; panels <= 64; panels *= 2) {
        const double cur = gauss_legendre_2d(f, ax, bx, ay, by, panels);
        const double scale = std::max({std::abs(cur), std::abs(prev), 1e-300});
        if (std::abs(cur - prev) <= rel_tol * scale || std::abs(cur - prev) < 1e-300)
            return cur;
        prev = cur;
    }
    throw std::runtime_error("integrate_2d_adaptive: did not converge to tolerance");
}

}  // namespace qkd
