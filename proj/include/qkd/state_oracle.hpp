#pragma once

#include <array>
#include <complex>
#include <span>

#include "qkd/optics.hpp"
#include "qkd/sifting.hpp"

namespace qkd {

// Output modes live on (port in {c,d}) x (bin in {0,1,2}) x (pol in {h,v}).
inline constexpr int kNumModes = 12;

inline int mode_index(int port, int bin, int pol) { return port * 6 + bin * 2 + pol; }
inline int mode_port(int mode) { return mode / 6; }
inline int mode_bin(int mode) { return (mode % 6) / 2; }
/// Detector cell (det*3 + bin) a mode feeds; polarization is not resolved.
inline int mode_cell(int mode) { return mode_port(mode) * 3 + mode_bin(mode); }

/// Exact joint photon state behind the beamsplitter. For photon_count == 2
/// the amplitude of the unordered mode pair {m, n} (m <= n) is stored at
/// pair[m * 12 + n], with the sqrt(2) bosonic factor already applied to
/// doubly occupied modes, so squared magnitudes sum to 1.
struct JointPhotonState {
    int photon_count = 0;
    std::array<std::complex<double>, kNumModes> single{};
    std::array<std::complex<double>, kNumModes * kNumModes> pair{};

    double norm_sq() const;
};

/// Both parties inject one photon in an equal three-bin superposition with
/// the encoded phase steps; Alice's polarization is taken along h and Bob's
/// tilted by the frame angle. The beamsplitter maps Alice's modes to
/// (c + d)/sqrt(2) and Bob's to (c - d)/sqrt(2).
JointPhotonState build_joint_state(const EncodingBits& alice, const EncodingBits& bob,
                                   const PolarizationFrame& frame);

/// Loss cases for the pair of transmitted photons; weights sum to 1 and the
/// surviving superpositions stay normalized (loss acts identically on all
/// three bins of a party).
struct ArrivalMixture {
    double w_both = 0.0;
    double w_alice_only = 0.0;
    double w_bob_only = 0.0;
    double w_none = 0.0;
};

ArrivalMixture arrival_mixture(double eta_a, double eta_b);

/// Probability of every 6-bit click mask (cells det*3+bin) for single-photon
/// sources: photon clicks from the exact output state, then an independent
/// dark-count Bernoulli OR-ed onto each detector cell. Sums to 1.
std::array<double, kNumClickMasks> outcome_distribution(const EncodingBits& alice,
                                                        const EncodingBits& bob,
                                                        const PolarizationFrame& frame,
                                                        double eta_a, double eta_b,
                                                        double p_dark);

/// Probability of announcing `row` for fixed encodings.
double row_probability(const std::array<double, kNumClickMasks>& dist, int row);

/// Announcement probability of the given rows, averaged uniformly over the
/// 16 encoding-bit combinations of Alice and Bob.
double oracle_yield(std::span<const int> rows, const PolarizationFrame& frame,
                    double eta_a, double eta_b, double p_dark);

/// Same average restricted to encodings whose phase relation matches (or
/// contradicts) the row, e.g. row 1 conditioned on dphi1 = 0.
double oracle_yield_conditioned(int row, bool relation_matches,
                                const PolarizationFrame& frame, double eta_a,
                                double eta_b, double p_dark);

/// Kept-announcement mass and key-disagreement mass under a sifting scheme,
/// averaged over encodings. errors <= announced.
struct ConclusiveMass {
    double announced = 0.0;
    double errors = 0.0;
};

ConclusiveMass oracle_conclusive_mass(SiftScheme scheme, const PolarizationFrame& frame,
                                      double eta_a, double eta_b, double p_dark);

}  // namespace qkd
