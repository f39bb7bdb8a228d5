#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "qkd/keyrate.hpp"
#include "qkd/rng.hpp"
#include "qkd/sifting.hpp"

namespace qkd {

enum class SourceModel { SinglePhoton, WeakCoherent };

struct SimConfig {
    ProtocolParams params;
    SourceModel source_model = SourceModel::WeakCoherent;
    uint64_t n_rounds = 1'000'000;
    uint64_t seed = 1;
    int slice_offset = 0;  // announced rounds kept when slice_a - slice_b = offset (mod N)
    SiftScheme scheme = SiftScheme::Improved;

    void validate() const;
};

/// One protocol round, as recorded by the simulator.
struct RoundRecord {
    EncodingBits alice_bits;
    EncodingBits bob_bits;
    double theta_a = 0.0;
    double theta_b = 0.0;
    int slice_a = 0;
    int slice_b = 0;
    DetectionPattern pattern;
    SiftVerdict verdict;
    bool slice_match = false;  // offset condition satisfied
};

/// Integer tallies merged across chunks; merging is commutative so results
/// are independent of thread count and chunk order. Rows 1-8 (the original
/// sifting set, which the sliced-gain integrals cover) and all 12 rows are
/// tracked side by side.
struct Tally {
    uint64_t rounds = 0;
    uint64_t announced8 = 0;   // conclusive, row 1-8
    uint64_t announced12 = 0;  // conclusive, any row
    uint64_t kept8 = 0;        // announced8 and slice condition met
    uint64_t kept12 = 0;
    uint64_t errors8 = 0;      // kept8 with disagreeing key bits
    uint64_t errors12 = 0;
    uint64_t errors8_unsliced = 0;
    uint64_t errors12_unsliced = 0;

    void merge(const Tally& other);
};

struct Estimate {
    double value = 0.0;
    double std_err = 0.0;
    uint64_t trials = 0;
    uint64_t successes = 0;
};

Estimate binomial_estimate(uint64_t successes, uint64_t trials);

struct WilsonInterval {
    double lo = 0.0;
    double hi = 1.0;
};

/// Wilson score interval (95% by default).
WilsonInterval wilson_interval(uint64_t successes, uint64_t trials, double z = 1.959963985);

struct EmpiricalReport {
    SimConfig config;
    Tally tally;
    Estimate conclusive_fraction;           // announced12 / rounds
    Estimate conclusive_fraction_original;  // announced8 / rounds
    Estimate gain;   // kept / rounds for the configured scheme's row set
    Estimate qber;   // errors / kept, same row set
    Estimate qber_unsliced;
    WilsonInterval qber_ci;
};

/// Chunked Monte Carlo run; parallelized with OpenMP when available. The
/// per-chunk RNG streams are derived from (seed, chunk index), so output is
/// bit-identical for any thread count.
EmpiricalReport simulate(const SimConfig& config);

/// Same computation on one thread, kept as the reference implementation.
EmpiricalReport simulate_serial(const SimConfig& config);

/// Single round against a caller-provided RNG (exposed for tests).
RoundRecord simulate_round(const SimConfig& config, Rng& rng);

/// QBER point estimate with Wilson 95% interval over the kept rounds.
/// Throws std::domain_error when no conclusive round exists.
struct QberEstimate {
    double value = 0.0;
    WilsonInterval ci;
    uint64_t kept = 0;
};

QberEstimate estimate_qber(const EmpiricalReport& report);

// ---- Validation against the analytic route --------------------------------

struct QuantityCheck {
    std::string name;
    double analytic = 0.0;
    double empirical = 0.0;
    double std_err = 0.0;
    double z = 0.0;
    bool skipped = false;  // no events to compare
    bool pass = false;
};

struct ValidationLedger {
    std::vector<QuantityCheck> checks;
    bool all_pass = true;
};

/// Runs the configured simulation and z-tests the empirical gain, QBER and
/// single-photon yields against the matching analytic quantities (slice
/// integrals under the full-width convention the simulator implements;
/// state-oracle masses for single-photon sources). Pass criterion |z| < 3.
ValidationLedger validate_against_analytic(const SimConfig& config);

}  // namespace qkd
