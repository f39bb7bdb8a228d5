#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <set>

#include "qkd/sifting.hpp"

using namespace qkd;

namespace {

DetectionPattern pattern_row(int row) {
    // Build the canonical pattern for a row through the public table layout.
    const RowRule& rule = row_rule(row);
    DetectionPattern p;
    // Rows alternate (c,c),(d,d),(c,d),(d,c) within each bin-pair block.
    const int in_block = (row - 1) % 4;
    const bool first_is_c = in_block == 0 || in_block == 2;
    const bool second_is_c = in_block == 0 || in_block == 3;
    (first_is_c ? p.c : p.d)[rule.first_bin] = true;
    (second_is_c ? p.c : p.d)[rule.second_bin] = true;
    return p;
}

}  // namespace

TEST_CASE("classification of table rows") {
    DetectionPattern cc0;
    cc0.c[0] = cc0.c[1] = true;
    CHECK(classify(cc0) == 1);

    DetectionPattern odc;  // (0,d,c)
    odc.d[1] = true;
    odc.c[2] = true;
    CHECK(classify(odc) == 12);

    DetectionPattern single;
    single.c[0] = true;
    CHECK(!classify(single).has_value());
}

TEST_CASE("classification is a bijection over the 64 click masks") {
    std::set<int> seen;
    int conclusive = 0;
    for (unsigned mask = 0; mask < kNumClickMasks; ++mask) {
        const DetectionPattern p = DetectionPattern::from_mask(mask);
        CHECK(p.mask() == mask);
        const auto row = classify(p);
        if (row) {
            ++conclusive;
            seen.insert(*row);
            CHECK(p.is_conclusive());
        } else {
            CHECK(!p.is_conclusive());
        }
    }
    CHECK(conclusive == 12);
    CHECK(seen.size() == 12);
    CHECK(*seen.begin() == 1);
    CHECK(*seen.rbegin() == 12);
}

TEST_CASE("patterns with coincidences or extra clicks are inconclusive") {
    DetectionPattern both_one_bin;  // c and d both fire in bin 0
    both_one_bin.c[0] = both_one_bin.d[0] = true;
    CHECK(!classify(both_one_bin).has_value());

    DetectionPattern three;
    three.c[0] = three.c[1] = three.c[2] = true;
    CHECK(!classify(three).has_value());

    CHECK(!classify(DetectionPattern{}).has_value());
}

TEST_CASE("sift verdicts match the table rows") {
    // (d,c,0) with a1=0, b1=1: anti-correlated first bits.
    DetectionPattern dc0;
    dc0.d[0] = true;
    dc0.c[1] = true;
    const SiftVerdict v1 = sift(dc0, EncodingBits{false, false}, EncodingBits{true, false},
                                SiftScheme::Original);
    CHECK(v1.status == SiftStatus::Conclusive);
    CHECK(v1.relation == BitRelation::AntiCorrelated);
    CHECK(v1.alice_key_bit == false);
    CHECK(v1.bob_key_bit == false);  // complement of b1

    // (0,c,c) with a=(1,0), b=(0,1): XOR keys agree.
    DetectionPattern occ;
    occ.c[1] = occ.c[2] = true;
    const SiftVerdict v2 =
        sift(occ, EncodingBits{true, false}, EncodingBits{false, true}, SiftScheme::Improved);
    CHECK(v2.status == SiftStatus::Conclusive);
    CHECK(v2.relation == BitRelation::Correlated);
    CHECK(v2.alice_key_bit == true);
    CHECK(v2.bob_key_bit == true);

    // (0,c,d) with a=(0,0), b=(1,0): complement of Bob's XOR.
    DetectionPattern ocd;
    ocd.c[1] = ocd.d[2] = true;
    const SiftVerdict v3 =
        sift(ocd, EncodingBits{false, false}, EncodingBits{true, false}, SiftScheme::Improved);
    CHECK(v3.status == SiftStatus::Conclusive);
    CHECK(v3.relation == BitRelation::AntiCorrelated);
    CHECK(v3.alice_key_bit == false);
    CHECK(v3.bob_key_bit == false);
}

TEST_CASE("original scheme discards the XOR rows, improved keeps them") {
    for (int row = 1; row <= 12; ++row) {
        CHECK(row_kept(SiftScheme::Improved, row));
        CHECK(row_kept(SiftScheme::Original, row) == (row <= 8));
    }
    DetectionPattern occ;
    occ.c[1] = occ.c[2] = true;
    const SiftVerdict v =
        sift(occ, EncodingBits{false, false}, EncodingBits{false, false}, SiftScheme::Original);
    CHECK(v.status == SiftStatus::Discarded);
}

TEST_CASE("inconclusive patterns are discarded") {
    DetectionPattern single;
    single.d[2] = true;
    CHECK(sift(single, {}, {}, SiftScheme::Improved).status == SiftStatus::Discarded);
}

TEST_CASE("key agreement holds exactly when the row's phase relation holds") {
    for (int enc = 0; enc < 16; ++enc) {
        const EncodingBits alice{bool(enc & 1), bool(enc & 2)};
        const EncodingBits bob{bool(enc & 4), bool(enc & 8)};
        for (int row = 1; row <= 12; ++row) {
            const DetectionPattern p = pattern_row(row);
            REQUIRE(classify(p) == row);
            const SiftVerdict v = sift(p, alice, bob, SiftScheme::Improved);
            REQUIRE(v.status == SiftStatus::Conclusive);
            CHECK((v.alice_key_bit == v.bob_key_bit) == row_relation_matches(row, alice, bob));
        }
    }
}

TEST_CASE("improved is a superset of original with identical key bits") {
    for (int enc = 0; enc < 16; ++enc) {
        const EncodingBits alice{bool(enc & 1), bool(enc & 2)};
        const EncodingBits bob{bool(enc & 4), bool(enc & 8)};
        for (int row = 1; row <= 8; ++row) {
            const DetectionPattern p = pattern_row(row);
            const SiftVerdict orig = sift(p, alice, bob, SiftScheme::Original);
            const SiftVerdict imp = sift(p, alice, bob, SiftScheme::Improved);
            REQUIRE(orig.status == SiftStatus::Conclusive);
            REQUIRE(imp.status == SiftStatus::Conclusive);
            CHECK(orig.alice_key_bit == imp.alice_key_bit);
            CHECK(orig.bob_key_bit == imp.bob_key_bit);
            CHECK(orig.relation == imp.relation);
        }
    }
}

TEST_CASE("sifting rate over distributions") {
    std::array<double, 12> uniform;
    uniform.fill(1.0 / 18.0);  // ideal single-photon announcement weights
    CHECK(sifting_rate(SiftScheme::Original, uniform) ==
          doctest::Approx(4.0 / 9.0).epsilon(1e-14));
    CHECK(sifting_rate(SiftScheme::Improved, uniform) ==
          doctest::Approx(2.0 / 3.0).epsilon(1e-14));

    std::array<double, 12> degenerate{};
    degenerate[0] = 1.0;
    CHECK(sifting_rate(SiftScheme::Improved, degenerate) == 1.0);
    CHECK(sifting_rate(SiftScheme::Original, degenerate) == 1.0);
}
