#include "qkd/profile.hpp"

#include <charconv>
#include <fstream>
#include <stdexcept>

namespace qkd {

std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

std::string_view sweep_axis_name(SweepAxis axis) {
    switch (axis) {
        case SweepAxis::Distance: return "distance";
        case SweepAxis::PolMismatchDeg: return "pol_mismatch_deg";
        case SweepAxis::DeltaFwhmPs: return "delta_fwhm_ps";
        case SweepAxis::DeltaLKm: return "delta_l_km";
        case SweepAxis::Mu: return "mu";
    }
    return "?";
}

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
        s.remove_suffix(1);
    return s;
}

double parse_double(std::string_view key, std::string_view value) {
    double out = 0.0;
    const auto res = std::from_chars(value.data(), value.data() + value.size(), out);
    if (res.ec != std::errc{} || res.ptr != value.data() + value.size())
        throw std::invalid_argument("profile: bad numeric value for " + std::string(key) +
                                    ": '" + std::string(value) + "'");
    return out;
}

uint64_t parse_u64(std::string_view key, std::string_view value) {
    uint64_t out = 0;
    const auto res = std::from_chars(value.data(), value.data() + value.size(), out);
    if (res.ec != std::errc{} || res.ptr != value.data() + value.size())
        throw std::invalid_argument("profile: bad integer value for " + std::string(key) +
                                    ": '" + std::string(value) + "'");
    return out;
}

SweepAxis parse_axis(std::string_view value) {
    if (value == "distance") return SweepAxis::Distance;
    if (value == "pol_mismatch_deg") return SweepAxis::PolMismatchDeg;
    if (value == "delta_fwhm_ps") return SweepAxis::DeltaFwhmPs;
    if (value == "delta_l_km") return SweepAxis::DeltaLKm;
    if (value == "mu") return SweepAxis::Mu;
    throw std::invalid_argument("profile: unknown sweep_axis '" + std::string(value) + "'");
}

}  // namespace

void RunProfile::set_key(std::string_view key, std::string_view value) {
    if (key == "profile_name") name = std::string(value);
    else if (key == "mu_a") params.mu_a = parse_double(key, value);
    else if (key == "mu_b") params.mu_b = parse_double(key, value);
    else if (key == "mu") { params.mu_a = params.mu_b = parse_double(key, value); }
    else if (key == "p_dark") params.p_dark = parse_double(key, value);
    else if (key == "distance_km") params.channel.distance_km = parse_double(key, value);
    else if (key == "gamma_db_per_km") params.channel.gamma_db_per_km = parse_double(key, value);
    else if (key == "eta_det") params.channel.eta_det = parse_double(key, value);
    else if (key == "f_ec") params.f_ec = parse_double(key, value);
    else if (key == "e_d") params.e_d = parse_double(key, value);
    else if (key == "n_slices") params.n_slices = int(parse_u64(key, value));
    else if (key == "pol_mismatch_deg") params.frame.mismatch_deg = parse_double(key, value);
    else if (key == "scheme") {
        if (value == "improved") scheme = SiftScheme::Improved;
        else if (value == "original") scheme = SiftScheme::Original;
        else throw std::invalid_argument("profile: scheme must be improved|original");
    } else if (key == "slice_m") slice_m = int(parse_u64(key, value));
    else if (key == "slice_convention") {
        if (value == "half") slice_convention = SliceConvention::HalfWidth;
        else if (value == "full") slice_convention = SliceConvention::FullWidth;
        else throw std::invalid_argument("profile: slice_convention must be half|full");
    } else if (key == "base_fwhm_ps") base_fwhm_ps = parse_double(key, value);
    else if (key == "hom_mu") hom_mu = parse_double(key, value);
    else if (key == "delta_omega_rad_per_ps") delta_omega = parse_double(key, value);
    else if (key == "detuning_sign") {
        if (value == "printed") detuning_sign = DetuningSign::AsPrinted;
        else if (value == "physical") detuning_sign = DetuningSign::Physical;
        else throw std::invalid_argument("profile: detuning_sign must be printed|physical");
    } else if (key == "d_ps_per_nm_km") d_ps_per_nm_km = parse_double(key, value);
    else if (key == "delta_lambda_nm") delta_lambda_nm = parse_double(key, value);
    else if (key == "rounds") rounds = parse_u64(key, value);
    else if (key == "seed") seed = parse_u64(key, value);
    else if (key == "sweep_axis") {
        if (value == "none") sweep_axis.reset();
        else sweep_axis = parse_axis(value);
    } else if (key == "sweep_start") sweep_start = parse_double(key, value);
    else if (key == "sweep_stop") sweep_stop = parse_double(key, value);
    else if (key == "sweep_step") sweep_step = parse_double(key, value);
    else throw std::invalid_argument("profile: unknown key '" + std::string(key) + "'");
}

std::vector<std::pair<std::string, std::string>> RunProfile::echo() const {
    std::vector<std::pair<std::string, std::string>> kv;
    kv.emplace_back("profile_name", name);
    kv.emplace_back("mu_a", format_double(params.mu_a));
    kv.emplace_back("mu_b", format_double(params.mu_b));
    kv.emplace_back("p_dark", format_double(params.p_dark));
    kv.emplace_back("distance_km", format_double(params.channel.distance_km));
    kv.emplace_back("gamma_db_per_km", format_double(params.channel.gamma_db_per_km));
    kv.emplace_back("eta_det", format_double(params.channel.eta_det));
    kv.emplace_back("f_ec", format_double(params.f_ec));
    kv.emplace_back("e_d", format_double(params.e_d));
    kv.emplace_back("n_slices", std::to_string(params.n_slices));
    kv.emplace_back("pol_mismatch_deg", format_double(params.frame.mismatch_deg));
    kv.emplace_back("scheme", scheme == SiftScheme::Improved ? "improved" : "original");
    kv.emplace_back("slice_m", std::to_string(slice_m));
    kv.emplace_back("slice_convention",
                    slice_convention == SliceConvention::HalfWidth ? "half" : "full");
    kv.emplace_back("base_fwhm_ps", format_double(base_fwhm_ps));
    kv.emplace_back("hom_mu", format_double(hom_mu));
    kv.emplace_back("delta_omega_rad_per_ps", format_double(delta_omega));
    kv.emplace_back("detuning_sign",
                    detuning_sign == DetuningSign::AsPrinted ? "printed" : "physical");
    kv.emplace_back("d_ps_per_nm_km", format_double(d_ps_per_nm_km));
    kv.emplace_back("delta_lambda_nm", format_double(delta_lambda_nm));
    kv.emplace_back("rounds", std::to_string(rounds));
    kv.emplace_back("seed", std::to_string(seed));
    kv.emplace_back("sweep_axis",
                    sweep_axis ? std::string(sweep_axis_name(*sweep_axis)) : "none");
    kv.emplace_back("sweep_start", format_double(sweep_start));
    kv.emplace_back("sweep_stop", format_double(sweep_stop));
    kv.emplace_back("sweep_step", format_double(sweep_step));
    return kv;
}

std::vector<double> RunProfile::sweep_grid() const {
    if (!(sweep_step > 0.0))
        throw std::invalid_argument("profile: sweep_step must be > 0");
    if (sweep_stop < sweep_start)
        throw std::invalid_argument("profile: sweep_stop must be >= sweep_start");
    std::vector<double> grid;
    // Index-based stepping avoids accumulation drift on long sweeps.
    const double span = sweep_stop - sweep_start;
    const auto count = uint64_t(span / sweep_step + 1e-9);
    grid.reserve(count + 1);
    for (uint64_t i = 0; i <= count; ++i) grid.push_back(sweep_start + double(i) * sweep_step);
    return grid;
}

void RunProfile::validate() const {
    params.validate();
    if (!(base_fwhm_ps > 0.0))
        throw std::invalid_argument("profile: base_fwhm_ps must be > 0");
    if (!(hom_mu > 0.0)) throw std::invalid_argument("profile: hom_mu must be > 0");
    if (rounds < 1) throw std::invalid_argument("profile: rounds must be >= 1");
    if (slice_m < 0 || slice_m >= params.n_slices)
        throw std::invalid_argument("profile: slice_m must be in [0, n_slices)");
}

RunProfile load_profile_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("profile: cannot open '" + path + "'");
    RunProfile profile;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string_view sv = trim(line);
        if (sv.empty() || sv.front() == '#' || sv.front() == ';') continue;
        if (sv.front() == '[') continue;  // section headers are decorative
        const size_t eq = sv.find('=');
        if (eq == std::string_view::npos)
            throw std::runtime_error("profile: '" + path + "' line " +
                                     std::to_string(lineno) + ": expected key=value");
        profile.set_key(trim(sv.substr(0, eq)), trim(sv.substr(eq + 1)));
    }
    return profile;
}

void apply_overrides(RunProfile& profile, std::span<const std::string> assignments) {
    for (const std::string& a : assignments) {
        const size_t eq = a.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("--set expects key=value, got '" + a + "'");
        profile.set_key(trim(std::string_view(a).substr(0, eq)),
                        trim(std::string_view(a).substr(eq + 1)));
    }
}

}  // namespace qkd
