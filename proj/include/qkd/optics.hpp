#pragma once

#include <cmath>

namespace qkd {

inline constexpr double kPi = 3.14159265358979323846;

inline double deg_to_rad(double deg) { return deg * kPi / 180.0; }

/// Fiber channel from one party to the measurement node, symmetric
/// configuration: each party sits at distance_km/2 from the midpoint.
struct ChannelSpec {
    double distance_km = 0.0;      // total Alice-to-Bob distance l
    double gamma_db_per_km = 0.2;  // fiber attenuation
    double eta_det = 1.0;          // detector efficiency, folded into the link

    void validate() const;
};

/// eta_det * 10^(-gamma * l / 20). The /20 (rather than /10) encodes the
/// half-distance l/2 from each party to the midpoint.
double channel_transmittance(const ChannelSpec& spec);

struct CoherentAmplitude {
    double magnitude = 0.0;  // sqrt(mean photon number)
    double phase = 0.0;      // radians

    double mean_photons() const { return magnitude * magnitude; }
    void validate() const;
};

/// Relative angle between the two parties' linear polarization axes.
/// Degrees at the API boundary, converted once where consumed.
struct PolarizationFrame {
    double mismatch_deg = 0.0;

    double mismatch_rad() const { return deg_to_rad(mismatch_deg); }
    double cos_mismatch() const { return std::cos(mismatch_rad()); }
    void validate() const;
};

struct PortMeans {
    double mu_c = 0.0;
    double mu_d = 0.0;
};

/// Mean photon numbers behind a lossless 50:50 beamsplitter fed with two
/// coherent amplitudes whose polarizations differ by the frame angle:
///   mu_{c,d} = (|a|^2 + |b|^2 +- 2|a||b| cos(diff_phase) cos(Phi)) / 2.
PortMeans bs_output_means(const CoherentAmplitude& alpha,
                          const CoherentAmplitude& beta,
                          const PolarizationFrame& frame,
                          double diff_phase);

/// Threshold (non-photon-number-resolving) detector:
///   P(click) = 1 - (1 - p_dark) e^{-mean_photons}.
double click_probability(double mean_photons, double p_dark);

/// Shannon binary entropy H(x), with H(0) = H(1) = 0 by convention.
/// Throws std::domain_error outside [0, 1].
double binary_entropy(double x);

}  // namespace qkd
