#pragma once

#include "qkd/optics.hpp"
#include "qkd/sifting.hpp"

namespace qkd {

/// Full parameter point for key-rate evaluation. Defaults are the shipped
/// profile; the CLI echoes every field into report headers.
struct ProtocolParams {
    double mu_a = 0.1;  // mean photons per 3-bin pulse, Alice
    double mu_b = 0.1;  // mean photons per 3-bin pulse, Bob
    double p_dark = 1e-6;
    ChannelSpec channel{0.0, 0.2, 0.145};
    double f_ec = 1.16;  // error-correction inefficiency
    double e_d = 0.03;   // phase-misalignment error probability
    int n_slices = 16;
    PolarizationFrame frame{};

    double eta_a() const { return channel_transmittance(channel); }
    double eta_b() const { return channel_transmittance(channel); }
    void validate() const;
};

struct KeyRateReport {
    double y11 = 0.0;       // single-photon yield
    double e11 = 0.0;       // single-photon QBER
    double q11 = 0.0;       // single-photon gain
    double q_m = 0.0;       // sliced overall gain
    double e_m = 0.0;       // sliced overall QBER
    double r_sec_raw = 0.0; // may be negative
    double r_sec = 0.0;     // max(r_sec_raw, 0)
};

// ---- Single-photon route (no polarization term) --------------------------

/// Per-announcement single-photon yield averaged over encodings, times the
/// 12 announcements the improved sifting keeps:
///   12 (1-pd)^4 [ ea eb / 18 + pd ((ea+eb)/3 - 5 ea eb / 9)
///                 + pd^2 (1-ea)(1-eb) ].
double yield_single_photon_improved(const ProtocolParams& p);

/// Same per-announcement yield, restricted to the 8 announcements the
/// original sifting keeps.
double yield_single_photon_original(const ProtocolParams& p);

/// Bit error rate e_b of the improved scheme: dark-count terms plus the
/// misalignment term e_d * ea eb / 18 in the numerator, divided by the
/// yield bracket. Throws std::domain_error when the yield vanishes.
double qber_single_photon_improved(const ProtocolParams& p);

/// R = Y11 [1 - f H(e_b) - H(e_p)] with e_p bounded by (set equal to) e_b.
double key_rate_single_photon(const ProtocolParams& p,
                              SiftScheme scheme = SiftScheme::Improved);

// ---- Single-photon route with polarization mismatch ----------------------

/// Yield conditioned on the matching phase relation, as a closed form in
/// cos^2(Phi), times 8 announcements:
///   8 (1-pd)^4 [ (1+cos^2 Phi) ea eb / 18
///                + pd ((ea+eb)/3 + ea eb (cos^2 Phi - 6)/9)
///                + pd^2 (1-ea)(1-eb) ].
/// Note this conditions on the encodings agreeing with the announcement;
/// the unconditioned announcement probability is the oracle's row sum (the
/// two differ by the interference factor; both are reported in tests).
double yield_single_photon_mismatch(const ProtocolParams& p);

/// QBER paired with yield_single_photon_mismatch; the misalignment
/// coefficient is the configurable e_d.
double qber_single_photon_mismatch(const ProtocolParams& p);

// ---- Weak-coherent sliced gain and QBER -----------------------------------

/// Integration window per slice. The closed-form slice integrals are usually
/// quoted over windows of width pi/N although the random-phase slices have
/// width 2pi/N; both conventions are provided and the normalization makes
/// them agree to first order. HalfWidth is the default everywhere; the Monte
/// Carlo validator compares against FullWidth, which matches the simulated
/// slicing exactly.
enum class SliceConvention { HalfWidth, FullWidth };

/// Announcement sum over the 8 useful outcomes conditioned on the matching
/// phase relation: 4 y^4 [z^2 + z^-2 - 2yz - 2y/z + 2y^2].
double gain_integrand_matched(double y, double zeta);

/// Same sum conditioned on the contradicting relation (the error branch):
/// 8 y^4 [1 - yz - y/z + y^2].
double gain_integrand_mismatched(double y, double zeta);

/// Overall gain of slice m: the phase-relation branches are equally likely,
/// so the integrand is the mean of the matched and mismatched sums,
/// integrated over the slice window with the N/pi^2-style prefactor.
/// Relative tolerance 1e-9 (panel doubling).
double gain_sliced(const ProtocolParams& p, int m,
                   SliceConvention conv = SliceConvention::HalfWidth);

/// E_m = (error mass) / Q_m, where the error mass integrates half the
/// mismatched-branch sum. Always in [0, 1/2].
double qber_sliced(const ProtocolParams& p, int m,
                   SliceConvention conv = SliceConvention::HalfWidth);

// ---- Assembled secure key rate --------------------------------------------

/// R_sec >= (1/N) Q11 (1 - H(e11)) - Q_m f H(E_m), with
/// Q11 = mu_a mu_b e^{-mu_a-mu_b} Y11 and m = 0 (same-slice sifting) unless
/// overridden.
KeyRateReport secure_key_rate_wcs(const ProtocolParams& p, int m = 0,
                                  SliceConvention conv = SliceConvention::HalfWidth);

}  // namespace qkd
