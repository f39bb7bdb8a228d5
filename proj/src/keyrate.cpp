#include "qkd/keyrate.hpp"

#include <cmath>
#include <stdexcept>

#include "qkd/integrate.hpp"

namespace qkd {

namespace {

constexpr double kIntegralRelTol = 1e-9;

// Shared bracket of the single-photon yield (per announcement), without the
// polarization factor.
double yield_bracket(double eta_a, double eta_b, double p_dark) {
    return eta_a * eta_b / 18.0 +
           p_dark * ((eta_a + eta_b) / 3.0 - 5.0 * eta_a * eta_b / 9.0) +
           p_dark * p_dark * (1.0 - eta_a) * (1.0 - eta_b);
}

double dark_prefactor(double p_dark) {
    const double q = 1.0 - p_dark;
    return q * q * q * q;
}

// Mismatch-form bracket, conditioned on the matching phase relation.
double mismatch_bracket(double eta_a, double eta_b, double p_dark, double cos2,
                        double signal_coef) {
    return signal_coef * (1.0 + cos2) * eta_a * eta_b / 18.0 +
           p_dark * ((eta_a + eta_b) / 3.0 + eta_a * eta_b * (cos2 - 6.0) / 9.0) +
           p_dark * p_dark * (1.0 - eta_a) * (1.0 - eta_b);
}

// The raw integrands subtract terms of order one to produce values many
// orders smaller, so they are evaluated here through expm1/sinh in forms
// whose factors are individually tiny and positive. s = x cos(dtheta) cosPhi
// is the log of the interference factor and q = mu'/6 the per-bin load;
// |s| <= x <= q always (AM-GM), which keeps every expm1 argument one-signed.
struct SliceIntegrand {
    double x = 0.0;   // sqrt(eta_a mu_a eta_b mu_b) / 3
    double q = 0.0;   // mu' / 6
    double pd = 0.0;  // dark-count probability
    double cos_phi = 0.0;

    double s(double theta_a, double theta_b) const {
        return x * std::cos(theta_a - theta_b) * cos_phi;
    }
    double y() const { return (1.0 - pd) * std::exp(-q); }
    double y4() const { return std::pow(y(), 4); }
    // 1 - y and 1 - y e^{s}, computed without cancellation.
    double one_minus_y() const { return pd - (1.0 - pd) * std::expm1(-q); }
    double one_minus_y_zeta(double sv) const { return pd - (1.0 - pd) * std::expm1(sv - q); }
    // e^{s} - y = e^{-q} (expm1(s + q) + pd), nonnegative for s >= -q.
    double zeta_minus_y(double sv) const {
        return std::exp(-q) * (std::expm1(sv + q) + pd);
    }

    // Announcement sum conditioned on the matching relation (direct form
    // 4y^4 [z^2 + z^-2 - 2yz - 2y/z + 2y^2] = 4y^4 [(z-y)^2 + (1/z-y)^2]).
    double matched(double sv) const {
        const double a = zeta_minus_y(sv);
        const double b = zeta_minus_y(-sv);
        return 4.0 * y4() * (a * a + b * b);
    }
    // Conditioned on the contradicting relation (direct form
    // 8y^4 [1 - yz - y/z + y^2] = 8y^4 (1 - yz)(1 - y/z)).
    double mismatched(double sv) const {
        return 8.0 * y4() * one_minus_y_zeta(sv) * one_minus_y_zeta(-sv);
    }
    // Unconditioned announcement sum, the mean of the two branches:
    // (matched + mismatched)/2 = 2y^4 [z + 1/z - 2y]^2.
    double announced(double sv) const {
        const double half_s = 0.5 * sv;
        const double t = 4.0 * std::sinh(half_s) * std::sinh(half_s) + 2.0 * one_minus_y();
        return 2.0 * y4() * t * t;
    }
};

SliceIntegrand make_integrand(const ProtocolParams& p) {
    const double ea = p.eta_a(), eb = p.eta_b();
    const double mu_prime = ea * p.mu_a + eb * p.mu_b;
    return SliceIntegrand{std::sqrt(ea * p.mu_a * eb * p.mu_b) / 3.0, mu_prime / 6.0,
                          p.p_dark, p.frame.cos_mismatch()};
}

struct SliceWindow {
    double b_lo, b_hi;  // theta_b
    double a_lo, a_hi;  // theta_a
    double prefactor;
};

SliceWindow slice_window(const ProtocolParams& p, int m, SliceConvention conv) {
    const double n = p.n_slices;
    if (conv == SliceConvention::HalfWidth) {
        const double w = kPi / n;
        return SliceWindow{0.0, w, m * w, (m + 1) * w, n / (kPi * kPi)};
    }
    const double w = 2.0 * kPi / n;
    return SliceWindow{0.0, w, m * w, (m + 1) * w, n / (4.0 * kPi * kPi)};
}

double integrate_slice(const ProtocolParams& p, int m, SliceConvention conv,
                       const std::function<double(const SliceIntegrand&, double)>& term) {
    p.validate();
    if (m < 0 || m >= p.n_slices)
        throw std::invalid_argument("slice index m must be in [0, n_slices)");
    const SliceIntegrand si = make_integrand(p);
    const SliceWindow w = slice_window(p, m, conv);
    const double integral = integrate_2d_adaptive(
        [&](double theta_a, double theta_b) { return term(si, si.s(theta_a, theta_b)); },
        w.a_lo, w.a_hi, w.b_lo, w.b_hi, kIntegralRelTol);
    return w.prefactor * integral;
}

}  // namespace

void ProtocolParams::validate() const {
    channel.validate();
    frame.validate();
    if (!(mu_a > 0.0) || !(mu_b > 0.0))
        throw std::invalid_argument("ProtocolParams: mu_a, mu_b must be > 0");
    if (!(p_dark >= 0.0 && p_dark < 1.0))
        throw std::invalid_argument("ProtocolParams: p_dark must be in [0,1)");
    if (!(e_d >= 0.0 && e_d <= 1.0))
        throw std::invalid_argument("ProtocolParams: e_d must be in [0,1]");
    if (n_slices < 1) throw std::invalid_argument("ProtocolParams: n_slices must be >= 1");
    if (!(f_ec >= 1.0)) throw std::invalid_argument("ProtocolParams: f_ec must be >= 1");
}

double yield_single_photon_improved(const ProtocolParams& p) {
    p.validate();
    return 12.0 * dark_prefactor(p.p_dark) * yield_bracket(p.eta_a(), p.eta_b(), p.p_dark);
}

double yield_single_photon_original(const ProtocolParams& p) {
    p.validate();
    return 8.0 * dark_prefactor(p.p_dark) * yield_bracket(p.eta_a(), p.eta_b(), p.p_dark);
}

double qber_single_photon_improved(const ProtocolParams& p) {
    p.validate();
    const double ea = p.eta_a(), eb = p.eta_b();
    const double denom = yield_bracket(ea, eb, p.p_dark);
    if (denom <= 0.0)
        throw std::domain_error("qber_single_photon_improved: zero yield, QBER undefined");
    const double numer = p.e_d * ea * eb / 18.0 +
                         p.p_dark * ((ea + eb) / 3.0 - 5.0 * ea * eb / 9.0) +
                         p.p_dark * p.p_dark * (1.0 - ea) * (1.0 - eb);
    return numer / denom;
}

double key_rate_single_photon(const ProtocolParams& p, SiftScheme scheme) {
    const double y11 = scheme == SiftScheme::Improved ? yield_single_photon_improved(p)
                                                      : yield_single_photon_original(p);
    const double eb = qber_single_photon_improved(p);  // same ratio for both schemes
    const double h = binary_entropy(std::min(eb, 1.0));
    return y11 * (1.0 - p.f_ec * h - h);
}

double yield_single_photon_mismatch(const ProtocolParams& p) {
    p.validate();
    const double cos2 = std::pow(p.frame.cos_mismatch(), 2);
    return 8.0 * dark_prefactor(p.p_dark) *
           mismatch_bracket(p.eta_a(), p.eta_b(), p.p_dark, cos2, 1.0);
}

double qber_single_photon_mismatch(const ProtocolParams& p) {
    p.validate();
    const double cos2 = std::pow(p.frame.cos_mismatch(), 2);
    const double denom = mismatch_bracket(p.eta_a(), p.eta_b(), p.p_dark, cos2, 1.0);
    if (denom <= 0.0)
        throw std::domain_error("qber_single_photon_mismatch: zero yield, QBER undefined");
    return mismatch_bracket(p.eta_a(), p.eta_b(), p.p_dark, cos2, p.e_d) / denom;
}

double gain_integrand_matched(double y, double zeta) {
    const double y2 = y * y;
    const double iz = 1.0 / zeta;
    return 4.0 * y2 * y2 *
           (zeta * zeta + iz * iz - 2.0 * y * zeta - 2.0 * y * iz + 2.0 * y2);
}

double gain_integrand_mismatched(double y, double zeta) {
    const double y2 = y * y;
    return 8.0 * y2 * y2 * (1.0 - y * zeta - y / zeta + y2);
}

double gain_sliced(const ProtocolParams& p, int m, SliceConvention conv) {
    return integrate_slice(
        p, m, conv, [](const SliceIntegrand& si, double s) { return si.announced(s); });
}

double qber_sliced(const ProtocolParams& p, int m, SliceConvention conv) {
    const double gain = gain_sliced(p, m, conv);
    if (gain <= 0.0) throw std::domain_error("qber_sliced: zero gain, QBER undefined");
    const double errors = integrate_slice(
        p, m, conv, [](const SliceIntegrand& si, double s) { return 0.5 * si.mismatched(s); });
    return errors / gain;
}

KeyRateReport secure_key_rate_wcs(const ProtocolParams& p, int m, SliceConvention conv) {
    KeyRateReport r;
    r.y11 = yield_single_photon_mismatch(p);
    r.e11 = qber_single_photon_mismatch(p);
    r.q11 = p.mu_a * p.mu_b * std::exp(-p.mu_a - p.mu_b) * r.y11;
    r.q_m = gain_sliced(p, m, conv);
    r.e_m = qber_sliced(p, m, conv);
    r.r_sec_raw = (1.0 / p.n_slices) * r.q11 * (1.0 - binary_entropy(std::min(r.e11, 1.0))) -
                  r.q_m * p.f_ec * binary_entropy(r.e_m);
    r.r_sec = std::max(r.r_sec_raw, 0.0);
    return r;
}

}  // namespace qkd
