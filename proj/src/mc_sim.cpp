#include "qkd/mc_sim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "qkd/state_oracle.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace qkd {

namespace {

constexpr uint64_t kChunkRounds = 1u << 16;

// Per-configuration tables reused by every round.
struct SimContext {
    // Single-photon outcome CDFs, one per encoding combination (a1,a2,b1,b2).
    std::vector<std::array<double, kNumClickMasks>> cdf;
    double amp_a = 0.0;  // per-bin coherent magnitude sqrt(eta mu / 3)
    double amp_b = 0.0;
};

SimContext make_context(const SimConfig& config) {
    SimContext ctx;
    const ProtocolParams& p = config.params;
    if (config.source_model == SourceModel::SinglePhoton) {
        ctx.cdf.resize(16);
        for (int enc = 0; enc < 16; ++enc) {
            const EncodingBits alice{bool(enc & 1), bool(enc & 2)};
            const EncodingBits bob{bool(enc & 4), bool(enc & 8)};
            auto dist = outcome_distribution(alice, bob, p.frame, p.eta_a(), p.eta_b(),
                                             p.p_dark);
            double acc = 0.0;
            for (double& v : dist) {
                acc += v;
                v = acc;
            }
            ctx.cdf[enc] = dist;
        }
    } else {
        ctx.amp_a = std::sqrt(p.eta_a() * p.mu_a / 3.0);
        ctx.amp_b = std::sqrt(p.eta_b() * p.mu_b / 3.0);
    }
    return ctx;
}

int slice_of(double theta, int n_slices) {
    int s = int(theta * n_slices / (2.0 * kPi));
    return s >= n_slices ? n_slices - 1 : s;  // guard the theta ~ 2pi edge
}

RoundRecord run_round(const SimConfig& config, const SimContext& ctx, Rng& rng) {
    const ProtocolParams& p = config.params;
    RoundRecord rec;
    rec.theta_a = rng.next_double() * 2.0 * kPi;
    rec.theta_b = rng.next_double() * 2.0 * kPi;
    rec.alice_bits = EncodingBits{rng.bernoulli(0.5), rng.bernoulli(0.5)};
    rec.bob_bits = EncodingBits{rng.bernoulli(0.5), rng.bernoulli(0.5)};
    rec.slice_a = slice_of(rec.theta_a, p.n_slices);
    rec.slice_b = slice_of(rec.theta_b, p.n_slices);
    const int diff = ((rec.slice_a - rec.slice_b) % p.n_slices + p.n_slices) % p.n_slices;
    rec.slice_match = diff == config.slice_offset;

    if (config.source_model == SourceModel::WeakCoherent) {
        const double phases_a[kNumBins] = {0.0, rec.alice_bits.phase1(),
                                           rec.alice_bits.phase2()};
        const double phases_b[kNumBins] = {0.0, rec.bob_bits.phase1(), rec.bob_bits.phase2()};
        for (int bin = 0; bin < kNumBins; ++bin) {
            const double delta = rec.theta_a - rec.theta_b + phases_a[bin] - phases_b[bin];
            const PortMeans means = bs_output_means(CoherentAmplitude{ctx.amp_a, 0.0},
                                                    CoherentAmplitude{ctx.amp_b, 0.0},
                                                    p.frame, delta);
            rec.pattern.c[bin] = rng.bernoulli(click_probability(means.mu_c, p.p_dark));
            rec.pattern.d[bin] = rng.bernoulli(click_probability(means.mu_d, p.p_dark));
        }
    } else {
        const int enc = int(rec.alice_bits.b1) | int(rec.alice_bits.b2) << 1 |
                        int(rec.bob_bits.b1) << 2 | int(rec.bob_bits.b2) << 3;
        const auto& cdf = ctx.cdf[enc];
        const double u = rng.next_double();
        unsigned mask = 0;
        while (mask + 1 < kNumClickMasks && cdf[mask] <= u) ++mask;
        rec.pattern = DetectionPattern::from_mask(mask);
    }

    rec.verdict = sift(rec.pattern, rec.alice_bits, rec.bob_bits, config.scheme);
    return rec;
}

Tally run_chunk(const SimConfig& config, const SimContext& ctx, uint64_t chunk_index,
                uint64_t rounds) {
    Rng rng = Rng::for_chunk(config.seed, chunk_index);
    Tally t;
    t.rounds = rounds;
    for (uint64_t i = 0; i < rounds; ++i) {
        const RoundRecord rec = run_round(config, ctx, rng);
        const auto row = classify(rec.pattern);
        if (!row) continue;
        const SiftVerdict v = sift(rec.pattern, rec.alice_bits, rec.bob_bits,
                                   SiftScheme::Improved);
        const bool error = v.alice_key_bit != v.bob_key_bit;
        ++t.announced12;
        t.errors12_unsliced += error;
        if (rec.slice_match) {
            ++t.kept12;
            t.errors12 += error;
        }
        if (*row <= 8) {
            ++t.announced8;
            t.errors8_unsliced += error;
            if (rec.slice_match) {
                ++t.kept8;
                t.errors8 += error;
            }
        }
    }
    return t;
}

EmpiricalReport assemble_report(const SimConfig& config, const Tally& tally) {
    EmpiricalReport r;
    r.config = config;
    r.tally = tally;
    r.conclusive_fraction = binomial_estimate(tally.announced12, tally.rounds);
    r.conclusive_fraction_original = binomial_estimate(tally.announced8, tally.rounds);
    const bool improved = config.scheme == SiftScheme::Improved;
    const uint64_t kept = improved ? tally.kept12 : tally.kept8;
    const uint64_t errors = improved ? tally.errors12 : tally.errors8;
    const uint64_t announced = improved ? tally.announced12 : tally.announced8;
    const uint64_t errors_uns = improved ? tally.errors12_unsliced : tally.errors8_unsliced;
    r.gain = binomial_estimate(kept, tally.rounds);
    r.qber = binomial_estimate(errors, kept);
    r.qber_unsliced = binomial_estimate(errors_uns, announced);
    r.qber_ci = wilson_interval(errors, kept);
    return r;
}

uint64_t chunk_count(uint64_t n_rounds) { return (n_rounds + kChunkRounds - 1) / kChunkRounds; }

uint64_t rounds_in_chunk(uint64_t n_rounds, uint64_t chunk) {
    const uint64_t start = chunk * kChunkRounds;
    return std::min(kChunkRounds, n_rounds - start);
}

}  // namespace

void SimConfig::validate() const {
    params.validate();
    if (n_rounds < 1) throw std::invalid_argument("SimConfig: n_rounds must be >= 1");
    if (slice_offset < 0 || slice_offset >= params.n_slices)
        throw std::invalid_argument("SimConfig: slice_offset must be in [0, n_slices)");
}

void Tally::merge(const Tally& other) {
    rounds += other.rounds;
    announced8 += other.announced8;
    announced12 += other.announced12;
    kept8 += other.kept8;
    kept12 += other.kept12;
    errors8 += other.errors8;
    errors12 += other.errors12;
    errors8_unsliced += other.errors8_unsliced;
    errors12_unsliced += other.errors12_unsliced;
}

Estimate binomial_estimate(uint64_t successes, uint64_t trials) {
    Estimate e;
    e.trials = trials;
    e.successes = successes;
    if (trials == 0) return e;
    e.value = double(successes) / double(trials);
    e.std_err = std::sqrt(e.value * (1.0 - e.value) / double(trials));
    return e;
}

WilsonInterval wilson_interval(uint64_t successes, uint64_t trials, double z) {
    if (trials == 0) return WilsonInterval{0.0, 1.0};
    const double n = double(trials);
    const double phat = double(successes) / n;
    const double z2 = z * z;
    const double denom = 1.0 + z2 / n;
    const double center = phat + z2 / (2.0 * n);
    const double margin = z * std::sqrt(phat * (1.0 - phat) / n + z2 / (4.0 * n * n));
    return WilsonInterval{std::max(0.0, (center - margin) / denom),
                          std::min(1.0, (center + margin) / denom)};
}

RoundRecord simulate_round(const SimConfig& config, Rng& rng) {
    config.validate();
    const SimContext ctx = make_context(config);
    return run_round(config, ctx, rng);
}

EmpiricalReport simulate(const SimConfig& config) {
    config.validate();
    const SimContext ctx = make_context(config);
    const uint64_t n_chunks = chunk_count(config.n_rounds);
    std::vector<Tally> partial(n_chunks);

#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic)
#endif
    for (int64_t c = 0; c < int64_t(n_chunks); ++c)
        partial[c] = run_chunk(config, ctx, uint64_t(c),
                               rounds_in_chunk(config.n_rounds, uint64_t(c)));

    Tally total;
    for (const Tally& t : partial) total.merge(t);
    return assemble_report(config, total);
}

EmpiricalReport simulate_serial(const SimConfig& config) {
    config.validate();
    const SimContext ctx = make_context(config);
    const uint64_t n_chunks = chunk_count(config.n_rounds);
    Tally total;
    for (uint64_t c = 0; c < n_chunks; ++c)
        total.merge(run_chunk(config, ctx, c, rounds_in_chunk(config.n_rounds, c)));
    return assemble_report(config, total);
}

QberEstimate estimate_qber(const EmpiricalReport& report) {
    const bool improved = report.config.scheme == SiftScheme::Improved;
    const uint64_t kept = improved ? report.tally.kept12 : report.tally.kept8;
    const uint64_t errors = improved ? report.tally.errors12 : report.tally.errors8;
    if (kept == 0)
        throw std::domain_error("estimate_qber: no conclusive rounds, QBER undefined");
    QberEstimate q;
    q.kept = kept;
    q.value = double(errors) / double(kept);
    q.ci = wilson_interval(errors, kept);
    return q;
}

namespace {

// Score-style z-test: the standard error is taken under the analytic value,
// which stays well defined when the empirical count is zero.
QuantityCheck make_check(const std::string& name, double analytic, const Estimate& emp) {
    QuantityCheck c;
    c.name = name;
    c.analytic = analytic;
    c.empirical = emp.value;
    if (emp.trials == 0) {
        c.skipped = true;
        c.pass = true;  // nothing to compare
        return c;
    }
    c.std_err = std::sqrt(std::max(analytic * (1.0 - analytic), 0.0) / double(emp.trials));
    if (c.std_err == 0.0) {
        c.pass = emp.value == analytic;
        c.z = c.pass ? 0.0 : std::numeric_limits<double>::infinity();
        return c;
    }
    c.z = (emp.value - analytic) / c.std_err;
    c.pass = std::abs(c.z) < 3.0;
    return c;
}

}  // namespace

ValidationLedger validate_against_analytic(const SimConfig& config) {
    const EmpiricalReport rep = simulate(config);
    ValidationLedger ledger;
    const ProtocolParams& p = config.params;

    if (config.source_model == SourceModel::WeakCoherent) {
        const double q_m = gain_sliced(p, config.slice_offset,
                                       SliceConvention::FullWidth);
        ledger.checks.push_back(make_check(
            "gain", q_m, binomial_estimate(rep.tally.kept8, rep.tally.rounds)));
        const double e_m = qber_sliced(p, config.slice_offset,
                                       SliceConvention::FullWidth);
        ledger.checks.push_back(
            make_check("qber", e_m, binomial_estimate(rep.tally.errors8, rep.tally.kept8)));
    } else {
        ledger.checks.push_back(make_check(
            "yield_improved", yield_single_photon_improved(p),
            binomial_estimate(rep.tally.announced12, rep.tally.rounds)));
        ledger.checks.push_back(make_check(
            "yield_original", yield_single_photon_original(p),
            binomial_estimate(rep.tally.announced8, rep.tally.rounds)));
        const ConclusiveMass mass = oracle_conclusive_mass(
            SiftScheme::Improved, p.frame, p.eta_a(), p.eta_b(), p.p_dark);
        const double oracle_qber = mass.announced > 0.0 ? mass.errors / mass.announced : 0.0;
        ledger.checks.push_back(make_check(
            "qber_oracle", oracle_qber,
            binomial_estimate(rep.tally.errors12_unsliced, rep.tally.announced12)));
    }

    for (const QuantityCheck& c : ledger.checks)
        if (!c.pass) ledger.all_pass = false;
    return ledger;
}

}  // namespace qkd
