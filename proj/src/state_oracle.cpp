#include "qkd/state_oracle.hpp"

#include <bit>
#include <cmath>
#include <stdexcept>

namespace qkd {

namespace {

using cplx = std::complex<double>;

void require(bool ok, const char* msg) {
    if (!ok) throw std::invalid_argument(msg);
}

// Single-photon mode function of one party behind the beamsplitter.
// sign_d = +1 for Alice's port combination, -1 for Bob's.
std::array<cplx, kNumModes> party_mode_function(const EncodingBits& bits, double pol_angle,
                                                double sign_d) {
    const double phases[kNumBins] = {0.0, bits.phase1(), bits.phase2()};
    const double pol_coef[2] = {std::cos(pol_angle), std::sin(pol_angle)};
    const double inv_sqrt6 = 1.0 / std::sqrt(6.0);  // 1/sqrt(3) bins, 1/sqrt(2) ports
    std::array<cplx, kNumModes> f{};
    for (int bin = 0; bin < kNumBins; ++bin) {
        const cplx ph = std::polar(inv_sqrt6, phases[bin]);
        for (int pol = 0; pol < 2; ++pol) {
            f[mode_index(0, bin, pol)] = ph * pol_coef[pol];
            f[mode_index(1, bin, pol)] = ph * pol_coef[pol] * sign_d;
        }
    }
    return f;
}

std::array<cplx, kNumModes> alice_mode_function(const EncodingBits& alice,
                                                const PolarizationFrame&) {
    return party_mode_function(alice, 0.0, +1.0);
}

std::array<cplx, kNumModes> bob_mode_function(const EncodingBits& bob,
                                              const PolarizationFrame& frame) {
    return party_mode_function(bob, frame.mismatch_rad(), -1.0);
}

// Distribution over photon-induced click masks for one loss branch.
using MaskDist = std::array<double, kNumClickMasks>;

MaskDist two_photon_mask_dist(const JointPhotonState& state) {
    MaskDist dist{};
    for (int m = 0; m < kNumModes; ++m)
        for (int n = m; n < kNumModes; ++n) {
            const double p = std::norm(state.pair[m * kNumModes + n]);
            if (p == 0.0) continue;
            dist[(1u << mode_cell(m)) | (1u << mode_cell(n))] += p;
        }
    return dist;
}

// A party's mode function is itself a unit vector (1/3 per bin, split over
// the two ports), so a lone surviving photon samples cells with |f[m]|^2.
MaskDist one_photon_mask_dist(const std::array<cplx, kNumModes>& f) {
    MaskDist dist{};
    for (int m = 0; m < kNumModes; ++m) dist[1u << mode_cell(m)] += std::norm(f[m]);
    return dist;
}

MaskDist apply_dark_counts(const MaskDist& photon, double p_dark) {
    if (p_dark == 0.0) return photon;
    MaskDist out{};
    double pow_dark[kNumCells + 1], pow_quiet[kNumCells + 1];
    pow_dark[0] = pow_quiet[0] = 1.0;
    for (int i = 1; i <= kNumCells; ++i) {
        pow_dark[i] = pow_dark[i - 1] * p_dark;
        pow_quiet[i] = pow_quiet[i - 1] * (1.0 - p_dark);
    }
    for (unsigned pm = 0; pm < kNumClickMasks; ++pm) {
        if (photon[pm] == 0.0) continue;
        const unsigned free_cells = ~pm & (kNumClickMasks - 1u);
        // Every superset F = pm | s gets p_dark^{|s|} (1-p_dark)^{6-|F|}.
        unsigned s = free_cells;
        while (true) {
            const unsigned f = pm | s;
            const int extra = std::popcount(s);
            const int quiet = kNumCells - std::popcount(f);
            out[f] += photon[pm] * pow_dark[extra] * pow_quiet[quiet];
            if (s == 0) break;
            s = (s - 1) & free_cells;
        }
    }
    return out;
}

}  // namespace

double JointPhotonState::norm_sq() const {
    double sum = 0.0;
    if (photon_count == 1) {
        for (const cplx& a : single) sum += std::norm(a);
    } else if (photon_count == 2) {
        for (int m = 0; m < kNumModes; ++m)
            for (int n = m; n < kNumModes; ++n) sum += std::norm(pair[m * kNumModes + n]);
    } else {
        sum = 1.0;
    }
    return sum;
}

JointPhotonState build_joint_state(const EncodingBits& alice, const EncodingBits& bob,
                                   const PolarizationFrame& frame) {
    frame.validate();
    const auto fa = alice_mode_function(alice, frame);
    const auto fb = bob_mode_function(bob, frame);
    JointPhotonState state;
    state.photon_count = 2;
    for (int m = 0; m < kNumModes; ++m) {
        state.pair[m * kNumModes + m] = std::sqrt(2.0) * fa[m] * fb[m];
        for (int n = m + 1; n < kNumModes; ++n)
            state.pair[m * kNumModes + n] = fa[m] * fb[n] + fa[n] * fb[m];
    }
    return state;
}

ArrivalMixture arrival_mixture(double eta_a, double eta_b) {
    require(eta_a >= 0.0 && eta_a <= 1.0, "arrival_mixture: eta_a must be in [0,1]");
    require(eta_b >= 0.0 && eta_b <= 1.0, "arrival_mixture: eta_b must be in [0,1]");
    return ArrivalMixture{eta_a * eta_b, eta_a * (1.0 - eta_b), (1.0 - eta_a) * eta_b,
                          (1.0 - eta_a) * (1.0 - eta_b)};
}

std::array<double, kNumClickMasks> outcome_distribution(const EncodingBits& alice,
                                                        const EncodingBits& bob,
                                                        const PolarizationFrame& frame,
                                                        double eta_a, double eta_b,
                                                        double p_dark) {
    require(p_dark >= 0.0 && p_dark < 1.0, "outcome_distribution: p_dark must be in [0,1)");
    const ArrivalMixture mix = arrival_mixture(eta_a, eta_b);

    MaskDist photon{};
    photon[0] += mix.w_none;
    if (mix.w_both > 0.0) {
        const MaskDist both = two_photon_mask_dist(build_joint_state(alice, bob, frame));
        for (unsigned k = 0; k < kNumClickMasks; ++k) photon[k] += mix.w_both * both[k];
    }
    if (mix.w_alice_only > 0.0) {
        const MaskDist only = one_photon_mask_dist(alice_mode_function(alice, frame));
        for (unsigned k = 0; k < kNumClickMasks; ++k) photon[k] += mix.w_alice_only * only[k];
    }
    if (mix.w_bob_only > 0.0) {
        const MaskDist only = one_photon_mask_dist(bob_mode_function(bob, frame));
        for (unsigned k = 0; k < kNumClickMasks; ++k) photon[k] += mix.w_bob_only * only[k];
    }
    return apply_dark_counts(photon, p_dark);
}

double row_probability(const std::array<double, kNumClickMasks>& dist, int row) {
    double p = 0.0;
    for (unsigned mask = 0; mask < kNumClickMasks; ++mask) {
        if (dist[mask] == 0.0) continue;
        const auto got = classify(DetectionPattern::from_mask(mask));
        if (got && *got == row) p += dist[mask];
    }
    return p;
}

double oracle_yield(std::span<const int> rows, const PolarizationFrame& frame, double eta_a,
                    double eta_b, double p_dark) {
    double total = 0.0;
    for (int enc = 0; enc < 16; ++enc) {
        const EncodingBits alice{bool(enc & 1), bool(enc & 2)};
        const EncodingBits bob{bool(enc & 4), bool(enc & 8)};
        const auto dist = outcome_distribution(alice, bob, frame, eta_a, eta_b, p_dark);
        for (int row : rows) total += row_probability(dist, row);
    }
    return total / 16.0;
}

double oracle_yield_conditioned(int row, bool relation_matches, const PolarizationFrame& frame,
                                double eta_a, double eta_b, double p_dark) {
    double total = 0.0;
    int count = 0;
    for (int enc = 0; enc < 16; ++enc) {
        const EncodingBits alice{bool(enc & 1), bool(enc & 2)};
        const EncodingBits bob{bool(enc & 4), bool(enc & 8)};
        if (row_relation_matches(row, alice, bob) != relation_matches) continue;
        const auto dist = outcome_distribution(alice, bob, frame, eta_a, eta_b, p_dark);
        total += row_probability(dist, row);
        ++count;
    }
    return total / count;
}

ConclusiveMass oracle_conclusive_mass(SiftScheme scheme, const PolarizationFrame& frame,
                                      double eta_a, double eta_b, double p_dark) {
    ConclusiveMass mass;
    for (int enc = 0; enc < 16; ++enc) {
        const EncodingBits alice{bool(enc & 1), bool(enc & 2)};
        const EncodingBits bob{bool(enc & 4), bool(enc & 8)};
        const auto dist = outcome_distribution(alice, bob, frame, eta_a, eta_b, p_dark);
        for (unsigned mask = 0; mask < kNumClickMasks; ++mask) {
            if (dist[mask] == 0.0) continue;
            const DetectionPattern pattern = DetectionPattern::from_mask(mask);
            const SiftVerdict v = sift(pattern, alice, bob, scheme);
            if (v.status != SiftStatus::Conclusive) continue;
            mass.announced += dist[mask];
            if (v.alice_key_bit != v.bob_key_bit) mass.errors += dist[mask];
        }
    }
    mass.announced /= 16.0;
    mass.errors /= 16.0;
    return mass;
}

}  // namespace qkd
