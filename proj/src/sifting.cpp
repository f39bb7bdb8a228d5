#include "qkd/sifting.hpp"

#include <stdexcept>

namespace qkd {

DetectionPattern DetectionPattern::from_mask(unsigned mask) {
    DetectionPattern p;
    for (int bin = 0; bin < kNumBins; ++bin) {
        p.c[bin] = (mask >> cell_index(0, bin)) & 1u;
        p.d[bin] = (mask >> cell_index(1, bin)) & 1u;
    }
    return p;
}

unsigned DetectionPattern::mask() const {
    unsigned m = 0;
    for (int bin = 0; bin < kNumBins; ++bin) {
        if (c[bin]) m |= 1u << cell_index(0, bin);
        if (d[bin]) m |= 1u << cell_index(1, bin);
    }
    return m;
}

int DetectionPattern::total_clicks() const {
    int n = 0;
    for (int bin = 0; bin < kNumBins; ++bin) n += int(c[bin]) + int(d[bin]);
    return n;
}

bool DetectionPattern::is_conclusive() const {
    if (total_clicks() != 2) return false;
    for (int bin = 0; bin < kNumBins; ++bin)
        if (c[bin] && d[bin]) return false;  // both detectors in one bin
    // Two clicks, no doubly-hit bin: the clicks land in two distinct bins.
    return true;
}

namespace {

// Row layout: (first detector, second detector, bin pair). Bin pairs follow
// the tables: rows 1-4 use bins (0,1), 5-8 use (0,2), 9-12 use (1,2).
struct RowLayout {
    int det_first;   // 0 = c, 1 = d
    int det_second;
    int first_bin;
    int second_bin;
};

constexpr RowLayout kRows[12] = {
    {0, 0, 0, 1}, {1, 1, 0, 1}, {0, 1, 0, 1}, {1, 0, 0, 1},
    {0, 0, 0, 2}, {1, 1, 0, 2}, {0, 1, 0, 2}, {1, 0, 0, 2},
    {0, 0, 1, 2}, {1, 1, 1, 2}, {0, 1, 1, 2}, {1, 0, 1, 2},
};

constexpr RowRule make_rule(int row) {
    const RowLayout& l = kRows[row - 1];
    return RowRule{row, l.first_bin, l.second_bin,
                   l.det_first != l.det_second,  // cross-detector rows imply pi
                   row <= 8};
}

constexpr std::array<RowRule, 12> kRules = {
    make_rule(1), make_rule(2),  make_rule(3),  make_rule(4),
    make_rule(5), make_rule(6),  make_rule(7),  make_rule(8),
    make_rule(9), make_rule(10), make_rule(11), make_rule(12),
};

}  // namespace

std::optional<int> classify(const DetectionPattern& pattern) {
    if (!pattern.is_conclusive()) return std::nullopt;
    for (int row = 1; row <= 12; ++row) {
        const RowLayout& l = kRows[row - 1];
        DetectionPattern expect;
        (l.det_first == 0 ? expect.c : expect.d)[l.first_bin] = true;
        (l.det_second == 0 ? expect.c : expect.d)[l.second_bin] = true;
        if (expect.mask() == pattern.mask()) return row;
    }
    return std::nullopt;  // unreachable for conclusive patterns
}

const RowRule& row_rule(int row) {
    if (row < 1 || row > 12) throw std::out_of_range("row_rule: row must be 1..12");
    return kRules[row - 1];
}

bool row_kept(SiftScheme scheme, int row) {
    return scheme == SiftScheme::Improved || row_rule(row).kept_original;
}

bool row_relation_matches(int row, const EncodingBits& alice, const EncodingBits& bob) {
    const RowRule& rule = row_rule(row);
    bool delta;  // true when the relevant phase relation equals pi
    if (rule.first_bin == 0 && rule.second_bin == 1)
        delta = alice.b1 != bob.b1;
    else if (rule.first_bin == 0 && rule.second_bin == 2)
        delta = alice.b2 != bob.b2;
    else
        delta = (alice.b1 != bob.b1) != (alice.b2 != bob.b2);
    return delta == rule.anti;
}

SiftVerdict sift(const DetectionPattern& pattern, const EncodingBits& alice,
                 const EncodingBits& bob, SiftScheme scheme) {
    SiftVerdict v;
    v.scheme = scheme;
    const std::optional<int> row = classify(pattern);
    if (!row || !row_kept(scheme, *row)) {
        v.status = SiftStatus::Discarded;
        return v;
    }
    const RowRule& rule = row_rule(*row);
    v.status = SiftStatus::Conclusive;
    v.relation = rule.anti ? BitRelation::AntiCorrelated : BitRelation::Correlated;
    if (rule.first_bin == 0 && rule.second_bin == 1) {
        v.alice_key_bit = alice.b1;
        v.bob_key_bit = rule.anti ? !bob.b1 : bob.b1;
    } else if (rule.first_bin == 0 && rule.second_bin == 2) {
        v.alice_key_bit = alice.b2;
        v.bob_key_bit = rule.anti ? !bob.b2 : bob.b2;
    } else {
        v.alice_key_bit = alice.b1 != alice.b2;
        const bool bob_xor = bob.b1 != bob.b2;
        v.bob_key_bit = rule.anti ? !bob_xor : bob_xor;
    }
    return v;
}

double sifting_rate(SiftScheme scheme, const std::array<double, 12>& row_probs) {
    double sum = 0.0;
    for (int row = 1; row <= 12; ++row)
        if (row_kept(scheme, row)) sum += row_probs[row - 1];
    return sum;
}

}  // namespace qkd
