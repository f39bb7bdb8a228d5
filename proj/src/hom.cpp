#include "qkd/hom.hpp"

#include <cmath>
#include <stdexcept>

namespace qkd {

void GaussianPulsePair::validate() const {
    if (!(mu > 0.0)) throw std::invalid_argument("GaussianPulsePair: mu must be > 0");
    if (!(sigma_a_ps > 0.0) || !(sigma_b_ps > 0.0))
        throw std::invalid_argument("GaussianPulsePair: widths must be > 0");
    if (!std::isfinite(delta_omega))
        throw std::invalid_argument("GaussianPulsePair: delta_omega must be finite");
}

double overlap_factor(const GaussianPulsePair& pair, DetuningSign sign) {
    pair.validate();
    const double sa2 = pair.sigma_a_ps * pair.sigma_a_ps;
    const double sb2 = pair.sigma_b_ps * pair.sigma_b_ps;
    const double width_term = std::sqrt(2.0 * pair.sigma_a_ps * pair.sigma_b_ps / (sa2 + sb2));
    const double exponent = pair.delta_omega * pair.delta_omega * sa2 * sb2 / (sa2 + sb2);
    return width_term * std::exp(sign == DetuningSign::AsPrinted ? exponent : -exponent);
}

PortMeans output_means(const GaussianPulsePair& pair, double delta_phi, DetuningSign sign) {
    const double k = overlap_factor(pair, sign);
    const double cross = pair.mu * k * std::cos(delta_phi);
    return PortMeans{pair.mu + cross, pair.mu - cross};
}

VisibilityReport click_and_coincidence(const GaussianPulsePair& pair, DetuningSign sign) {
    VisibilityReport r;
    r.overlap_k = overlap_factor(pair, sign);
    const double em = std::exp(-pair.mu);
    const double i0 = bessel_i0(pair.mu * r.overlap_k);  // I0 is even in its argument
    r.p_c = 1.0 - em * i0;
    r.p_d = r.p_c;
    r.p_cd = 1.0 - 2.0 * em * i0 + em * em;
    const double denom = r.p_c * r.p_d;
    if (denom <= 0.0)
        throw std::domain_error("click_and_coincidence: p_c * p_d = 0, visibility undefined");
    r.v_hom = 1.0 - r.p_cd / denom;
    return r;
}

double bessel_i0(double x) {
    if (!(std::abs(x) <= 50.0))
        throw std::domain_error("bessel_i0: |x| must be <= 50");
    const double q = x * x / 4.0;
    double term = 1.0;
    double sum = 1.0;
    for (int m = 1; m < 1000; ++m) {
        term *= q / (double(m) * double(m));
        sum += term;
        if (term < 1e-16 * sum) break;
    }
    return sum;
}

void DispersionSpec::validate() const {
    if (d_ps_per_nm_km < 0.0 || delta_l_km < 0.0 || delta_lambda_nm < 0.0)
        throw std::invalid_argument("DispersionSpec: fields must be >= 0");
}

double fwhm_mismatch_from_dispersion(const DispersionSpec& spec) {
    spec.validate();
    return spec.d_ps_per_nm_km * spec.delta_l_km * spec.delta_lambda_nm;
}

std::vector<VisibilityPoint> visibility_vs_fwhm_curve(double mu, double base_fwhm_ps,
                                                      std::span<const double> delta_grid) {
    if (!(base_fwhm_ps > 0.0))
        throw std::invalid_argument("visibility_vs_fwhm_curve: base_fwhm_ps must be > 0");
    std::vector<VisibilityPoint> curve;
    curve.reserve(delta_grid.size());
    for (double delta : delta_grid) {
        GaussianPulsePair pair;
        pair.mu = mu;
        pair.sigma_a_ps = sigma_from_fwhm_ps(base_fwhm_ps);
        pair.sigma_b_ps = sigma_from_fwhm_ps(base_fwhm_ps + delta);
        curve.push_back({delta, click_and_coincidence(pair).v_hom});
    }
    return curve;
}

}  // namespace qkd
