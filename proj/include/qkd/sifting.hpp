#pragma once

#include <array>
#include <cstdint>
#include <optional>

#include "qkd/optics.hpp"

namespace qkd {

// Detector/time-bin cells are indexed det*3 + bin with det 0 = c, det 1 = d.
// A full click record is a 6-bit mask over those cells.
inline constexpr int kNumBins = 3;
inline constexpr int kNumCells = 6;
inline constexpr int kNumClickMasks = 64;

inline int cell_index(int detector, int bin) { return detector * kNumBins + bin; }

/// Which detectors fired in each of the three time bins.
struct DetectionPattern {
    std::array<bool, kNumBins> c{};  // detector c clicked in bin i
    std::array<bool, kNumBins> d{};  // detector d clicked in bin i

    static DetectionPattern from_mask(unsigned mask);
    unsigned mask() const;

    int total_clicks() const;
    /// Exactly two bins with exactly one click each, third bin silent.
    bool is_conclusive() const;
};

/// The two encoding bits of one party; bit value 1 encodes a pi phase step.
struct EncodingBits {
    bool b1 = false;
    bool b2 = false;

    double phase1() const { return b1 ? kPi : 0.0; }
    double phase2() const { return b2 ? kPi : 0.0; }
};

enum class SiftScheme { Original, Improved };

enum class SiftStatus { Conclusive, Discarded };

enum class BitRelation { Correlated, AntiCorrelated };

struct SiftVerdict {
    SiftScheme scheme = SiftScheme::Improved;
    SiftStatus status = SiftStatus::Discarded;
    bool alice_key_bit = false;
    bool bob_key_bit = false;
    BitRelation relation = BitRelation::Correlated;
};

/// Maps a conclusive pattern to its announcement row 1..12:
///   1 (c,c,0)   2 (d,d,0)   3 (c,d,0)   4 (d,c,0)
///   5 (c,0,c)   6 (d,0,d)   7 (c,0,d)   8 (d,0,c)
///   9 (0,c,c)  10 (0,d,d)  11 (0,c,d)  12 (0,d,c)
/// Everything else (single clicks, >=3 clicks, two clicks sharing a bin,
/// both detectors in one bin) is inconclusive.
std::optional<int> classify(const DetectionPattern& pattern);

/// Static properties of one announcement row.
struct RowRule {
    int row = 0;
    int first_bin = 0;
    int second_bin = 0;
    bool anti = false;        // true when the implied phase relation is pi
    bool kept_original = false;
};

const RowRule& row_rule(int row);

bool row_kept(SiftScheme scheme, int row);

/// True when the phase relation implied by the row holds for these encodings
/// (e.g. row 1 demands dphi1 = 0, row 11 demands |dphi1 - dphi2| = pi).
bool row_relation_matches(int row, const EncodingBits& alice, const EncodingBits& bob);

/// Key extraction per the sifting tables. Rows 1-4 key on the first bits,
/// rows 5-8 on the second, rows 9-12 (Improved only) on the XOR of both.
SiftVerdict sift(const DetectionPattern& pattern, const EncodingBits& alice,
                 const EncodingBits& bob, SiftScheme scheme);

/// Sum of row probabilities over the rows the scheme keeps.
double sifting_rate(SiftScheme scheme, const std::array<double, 12>& row_probs);

}  // namespace qkd
