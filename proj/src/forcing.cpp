#include "cascade/forcing.hpp"

#include <charconv>
#include <cmath>
#include <sstream>

namespace cascade {

namespace {

double parse_double(const std::string& s, const std::string& what) {
    double v = 0.0;
    const char* b = s.data();
    const char* e = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(b, e, v);
    if (ec != std::errc() || ptr != e || !std::isfinite(v))
        throw Error("noise profile: bad number '" + s + "' for " + what);
    return v;
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream is(s);
    while (std::getline(is, cur, sep)) out.push_back(cur);
    if (!s.empty() && s.back() == sep) out.emplace_back();
    return out;
}

std::string format_double(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

}  // namespace

NoiseProfile NoiseProfile::parse(const std::string& text) {
    NoiseProfile p;
    if (text == "zero") {
        p.kind = ProfileKind::zero;
        p.band.clear();
        return p;
    }
    const auto colon = text.find(':');
    if (colon == std::string::npos) throw Error("noise profile: expected 'kind:args', got '" + text + "'");
    const std::string kind = text.substr(0, colon);
    const std::string args = text.substr(colon + 1);
    if (kind == "power" || kind == "exp") {
        const std::string key = kind == "power" ? "p=" : "a=";
        if (args.rfind(key, 0) != 0) throw Error("noise profile: '" + kind + "' expects " + key + "<value>");
        p.kind = kind == "power" ? ProfileKind::power : ProfileKind::exponential;
        p.param = parse_double(args.substr(2), kind);
        if (p.kind == ProfileKind::exponential && p.param < 0.0)
            throw Error("noise profile: exp rate must be >= 0");
        p.band.clear();
    } else if (kind == "band") {
        p.kind = ProfileKind::band;
        p.band.clear();
        for (const auto& tok : split(args, ',')) {
            const double b = parse_double(tok, "band entry");
            if (b < 0.0) throw Error("noise profile: band amplitudes must be >= 0");
            p.band.push_back(b);
        }
        if (p.band.empty()) throw Error("noise profile: empty band");
    } else if (kind == "single") {
        p.kind = ProfileKind::single;
        p.band.clear();
        for (const auto& kv : split(args, ',')) {
            if (kv.rfind("d=", 0) == 0) {
                for (const auto& c : split(kv.substr(2), 'x')) {
                    const double v = parse_double(c, "single mode");
                    if (v < 1.0 || v != std::floor(v)) throw Error("noise profile: mode entries must be integers >= 1");
                    p.single_mode.push_back(static_cast<int>(v));
                }
            } else if (kv.rfind("b=", 0) == 0) {
                p.single_amplitude = parse_double(kv.substr(2), "single amplitude");
                if (p.single_amplitude < 0.0) throw Error("noise profile: amplitude must be >= 0");
            } else {
                throw Error("noise profile: unknown single argument '" + kv + "'");
            }
        }
        if (p.single_mode.empty()) throw Error("noise profile: single requires d=<mode>");
    } else {
        throw Error("noise profile: unknown kind '" + kind + "'");
    }
    return p;
}

std::string NoiseProfile::to_string() const {
    switch (kind) {
        case ProfileKind::power: return "power:p=" + format_double(param);
        case ProfileKind::exponential: return "exp:a=" + format_double(param);
        case ProfileKind::zero: return "zero";
        case ProfileKind::band: {
            std::string s = "band:";
            for (std::size_t i = 0; i < band.size(); ++i) s += (i ? "," : "") + format_double(band[i]);
            return s;
        }
        case ProfileKind::single: {
            std::string s = "single:d=";
            for (std::size_t i = 0; i < single_mode.size(); ++i)
                s += (i ? "x" : "") + std::to_string(single_mode[i]);
            if (single_amplitude != 1.0) s += ",b=" + format_double(single_amplitude);
            return s;
        }
    }
    return {};
}

NoiseSpec::NoiseSpec(GridSpec grid, NoiseProfile profile)
    : grid_(std::move(grid)), profile_(std::move(profile)), amps_(grid_.mode_count(), 0.0) {
    const auto& w = grid_.mode_norm_sq();
    switch (profile_.kind) {
        case ProfileKind::power:
            for (std::size_t r = 0; r < amps_.size(); ++r) amps_[r] = std::pow(w[r], -0.5 * profile_.param);
            break;
        case ProfileKind::exponential:
            for (std::size_t r = 0; r < amps_.size(); ++r) amps_[r] = std::exp(-profile_.param * std::sqrt(w[r]));
            break;
        case ProfileKind::band:
            for (std::size_t r = 0; r < amps_.size(); ++r) {
                auto k = static_cast<std::size_t>(std::sqrt(w[r]));
                while (static_cast<double>(k * k) > w[r]) --k;
                while (static_cast<double>((k + 1) * (k + 1)) <= w[r]) ++k;
                if (k >= 1 && k <= profile_.band.size()) amps_[r] = profile_.band[k - 1];
            }
            break;
        case ProfileKind::single: {
            ModeIndex d = profile_.single_mode;
            if (d.size() == 1 && grid_.dim() > 1) d.assign(static_cast<std::size_t>(grid_.dim()), d[0]);
            if (d.size() != static_cast<std::size_t>(grid_.dim()))
                throw Error("noise profile: single mode has wrong dimension");
            bool inside = true;
            for (int dj : d) inside = inside && dj <= grid_.modes();
            if (inside) amps_[grid_.rank_of(d)] = profile_.single_amplitude;
            break;
        }
        case ProfileKind::zero: break;
    }
    for (std::size_t r = 0; r < amps_.size(); ++r)
        if (amps_[r] != 0.0) active_.push_back(r);
}

NoiseSpec NoiseSpec::parse(const GridSpec& grid, const std::string& text) {
    return NoiseSpec(grid, NoiseProfile::parse(text));
}

double NoiseSpec::bk_sum(double k) const {
    const auto& w = grid_.mode_norm_sq();
    double s = 0.0;
    for (std::size_t r : active_) s += std::pow(w[r], k) * amps_[r] * amps_[r];
    return s;
}

double NoiseSpec::b_star() const {
    double s = 0.0;
    for (std::size_t r : active_) s += std::abs(amps_[r]);
    return s;
}

int m_star(int dim) { return dim / 2 + 1; }

SpectralField sample_increments(const NoiseSpec& spec, double dt, RngStream& rng) {
    if (!(dt > 0.0)) throw Error("sample_increments: dt must be > 0");
    SpectralField out(spec.grid());
    path_increment(spec, rng, rng.take_cell(), 1, dt, out);
    return out;
}

void path_increment(const NoiseSpec& spec, const RngStream& rng, std::uint64_t first_cell,
                    std::uint64_t count, double cell_dt, SpectralField& out) {
    if (!(out.grid() == spec.grid())) out = SpectralField(spec.grid());
    auto c = out.coeffs();
    std::fill(c.begin(), c.end(), Complex{});
    const double s = std::sqrt(cell_dt);
    for (std::size_t r : spec.active_modes()) {
        double re = 0.0;
        double im = 0.0;
        for (std::uint64_t cell = first_cell; cell < first_cell + count; ++cell) {
            const auto [gr, gi] = rng.gaussian_pair(cell, r);
            re += gr;
            im += gi;
        }
        c[r] = spec.amplitude(r) * s * Complex{re, im};
    }
}

double linear_stationary_mode_energy(const NoiseSpec& spec, std::size_t rank) {
    const double b = spec.amplitude(rank);
    return b * b / spec.grid().mode_norm_sq()[rank];
}

double linear_mean_energy(const NoiseSpec& spec, const SpectralField& u0, double nu, double t) {
    require_same_grid(spec.grid(), u0.grid(), "linear_mean_energy");
    const auto& w = spec.grid().mode_norm_sq();
    double s = 0.0;
    for (std::size_t r = 0; r < w.size(); ++r) {
        const double decay = std::exp(-2.0 * nu * w[r] * t);
        const double b = spec.amplitude(r);
        s += decay * std::norm(u0[r]) - std::expm1(-2.0 * nu * w[r] * t) * b * b / w[r];
    }
    return s;
}

}  // namespace cascade
