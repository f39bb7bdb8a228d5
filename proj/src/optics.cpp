#include "qkd/optics.hpp"

#include <stdexcept>
#include <string>

namespace qkd {

namespace {

void require(bool ok, const char* msg) {
    if (!ok) throw std::invalid_argument(msg);
}

}  // namespace

void ChannelSpec::validate() const {
    require(distance_km >= 0.0, "ChannelSpec: distance_km must be >= 0");
    require(gamma_db_per_km >= 0.0, "ChannelSpec: gamma_db_per_km must be >= 0");
    require(eta_det >= 0.0 && eta_det <= 1.0, "ChannelSpec: eta_det must be in [0,1]");
}

double channel_transmittance(const ChannelSpec& spec) {
    spec.validate();
    return spec.eta_det * std::pow(10.0, -spec.gamma_db_per_km * spec.distance_km / 20.0);
}

void CoherentAmplitude::validate() const {
    require(magnitude >= 0.0, "CoherentAmplitude: magnitude must be >= 0");
    require(std::isfinite(phase), "CoherentAmplitude: phase must be finite");
}

void PolarizationFrame::validate() const {
    require(mismatch_deg >= 0.0 && mismatch_deg <= 90.0,
            "PolarizationFrame: mismatch_deg must be in [0,90]");
}

PortMeans bs_output_means(const CoherentAmplitude& alpha,
                          const CoherentAmplitude& beta,
                          const PolarizationFrame& frame,
                          double diff_phase) {
    alpha.validate();
    beta.validate();
    frame.validate();
    const double sum = alpha.mean_photons() + beta.mean_photons();
    const double cross = 2.0 * alpha.magnitude * beta.magnitude *
                         std::cos(diff_phase) * frame.cos_mismatch();
    return PortMeans{0.5 * (sum + cross), 0.5 * (sum - cross)};
}

double click_probability(double mean_photons, double p_dark) {
    require(mean_photons >= 0.0, "click_probability: mean_photons must be >= 0");
    require(p_dark >= 0.0 && p_dark < 1.0, "click_probability: p_dark must be in [0,1)");
    return 1.0 - (1.0 - p_dark) * std::exp(-mean_photons);
}

double binary_entropy(double x) {
    if (!(x >= 0.0 && x <= 1.0))
        throw std::domain_error("binary_entropy: argument outside [0,1]: " + std::to_string(x));
    if (x == 0.0 || x == 1.0) return 0.0;
    return -x * std::log2(x) - (1.0 - x) * std::log2(1.0 - x);
}

}  // namespace qkd
