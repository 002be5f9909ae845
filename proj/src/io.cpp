#include "cascade/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace cascade {

namespace {

std::vector<std::string> split_csv_row(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream is(line);
    while (std::getline(is, cur, ',')) {
        if (!cur.empty() && cur.back() == '\r') cur.pop_back();
        out.push_back(cur);
    }
    return out;
}

double parse_cell(const std::string& s) {
    if (s == "nan") return std::nan("");
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) throw Error("csv: bad number '" + s + "'");
    return v;
}

Json number_or_null(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

}  // namespace

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

std::vector<std::string> csv_columns(const DiagnosticsStream& s) {
    std::vector<std::string> cols{"t", "tau"};
    for (double m : s.norm_orders) cols.push_back("norm_" + format_double(m));
    cols.emplace_back("sup");
    if (s.cm_order >= 0) cols.emplace_back("cm");
    if (s.has_shells && !s.records.empty())
        for (std::size_t k = 1; k <= s.records.front().shells.size(); ++k)
            cols.push_back("shell_" + std::to_string(k));
    return cols;
}

void write_stream_csv(std::ostream& os, const DiagnosticsStream& s) {
    const auto cols = csv_columns(s);
    for (std::size_t i = 0; i < cols.size(); ++i) os << (i ? "," : "") << cols[i];
    os << "\n";
    for (const auto& r : s.records) {
        os << format_double(r.t) << ',' << format_double(r.tau);
        for (double v : r.norms) os << ',' << format_double(v);
        os << ',' << format_double(r.sup);
        if (s.cm_order >= 0) os << ',' << format_double(r.cm.value_or(std::nan("")));
        if (s.has_shells)
            for (double e : r.shells) os << ',' << format_double(e);
        os << "\n";
    }
}

std::string stream_csv(const DiagnosticsStream& s) {
    std::ostringstream os;
    write_stream_csv(os, s);
    return os.str();
}

DiagnosticsStream read_stream_csv(std::istream& is, std::uint64_t stream_id) {
    std::string line;
    if (!std::getline(is, line)) throw Error("csv: empty stream file");
    const auto cols = split_csv_row(line);
    if (cols.size() < 3 || cols[0] != "t" || cols[1] != "tau") throw Error("csv: unexpected header");
    DiagnosticsStream s;
    s.stream_id = stream_id;
    int sup_col = -1, cm_col = -1;
    std::vector<std::size_t> norm_cols, shell_cols;
    for (std::size_t i = 2; i < cols.size(); ++i) {
        if (cols[i].rfind("norm_", 0) == 0) {
            s.norm_orders.push_back(parse_cell(cols[i].substr(5)));
            norm_cols.push_back(i);
        } else if (cols[i] == "sup") {
            sup_col = static_cast<int>(i);
        } else if (cols[i] == "cm") {
            cm_col = static_cast<int>(i);
        } else if (cols[i].rfind("shell_", 0) == 0) {
            shell_cols.push_back(i);
        } else {
            throw Error("csv: unknown column '" + cols[i] + "'");
        }
    }
    if (sup_col < 0) throw Error("csv: missing sup column");
    s.has_shells = !shell_cols.empty();
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        const auto cells = split_csv_row(line);
        if (cells.size() != cols.size()) throw Error("csv: ragged row");
        DiagnosticsRecord r;
        r.t = parse_cell(cells[0]);
        r.tau = parse_cell(cells[1]);
        for (std::size_t c : norm_cols) r.norms.push_back(parse_cell(cells[c]));
        r.sup = parse_cell(cells[static_cast<std::size_t>(sup_col)]);
        if (cm_col >= 0) r.cm = parse_cell(cells[static_cast<std::size_t>(cm_col)]);
        for (std::size_t c : shell_cols) r.shells.push_back(parse_cell(cells[c]));
        s.records.push_back(std::move(r));
    }
    if (s.records.size() < 2) throw Error("csv: need at least two records");
    s.sample_dt = s.records[1].t - s.records[0].t;
    s.nu = s.records[1].tau / s.records[1].t;
    // cm order is not recoverable from the CSV; callers set it from the manifest
    s.cm_order = cm_col >= 0 ? 0 : -1;
    return s;
}

std::vector<ScalingPoint> read_scaling_csv(std::istream& is) {
    std::vector<ScalingPoint> pts;
    std::string line;
    bool first = true;
    while (std::getline(is, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        const auto cells = split_csv_row(line);
        if (cells.size() < 2) throw Error("fit csv: expected two columns (nu, q)");
        if (first) {
            first = false;
            double probe = 0.0;
            auto [ptr, ec] = std::from_chars(cells[0].data(), cells[0].data() + cells[0].size(), probe);
            if (ec != std::errc()) continue;  // header row
        }
        pts.push_back({parse_cell(cells[0]), parse_cell(cells[1]), 0.0});
    }
    return pts;
}

void atomic_write(const std::filesystem::path& path, const std::string& content) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
        if (!os) throw Error("cannot open " + tmp.string() + " for writing");
        os.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!os) throw Error("write failed: " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw Error("cannot open " + path.string());
    std::ostringstream os;
    os << is.rdbuf();
    return os.str();
}

std::string fnv1a_hex(const std::string& data) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : data) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

Json schema_json() {
    Json j;
    j["schema_version"] = kSchemaVersion;
    j["stream_csv"] = {{"columns", {"t", "tau", "norm_<m> (one per recorded order)", "sup",
                                    "cm (when a C^m order is recorded)",
                                    "shell_<k> (k = 1..ceil(sqrt(n) D), when shells are recorded)"}},
                       {"format", "RFC-4180, '.' decimal point, shortest round-trip doubles"}};
    j["records"] = {
        {"ensemble_summary", {"nu", "members", "aborted", "observables"}},
        {"observable_summary", {"name", "count", "mean", "variance", "se", "q05", "q25", "q50", "q75", "q95"}},
        {"scaling_fit", {"alpha", "intercept", "r2", "points"}},
        {"verdict", {"observable", "means", "ses", "medians", "fit", "upper_ok", "positive_ok",
                     "monotone_means", "monotone_medians", "median_spread", "exp_moments", "pass"}},
        {"occupation", {"chi", "gamma", "tau0", "tau", "b0", "lhs_estimate", "lhs_se", "rhs_bound",
                        "trajectories", "capped", "pass"}},
        {"stationary_probability", {"chi", "gamma", "frequency", "wilson_lo", "wilson_hi", "bound",
                                    "samples", "applicable", "pass"}},
        {"balance", {"burn_in_tau", "end_tau", "avg_h1_sq", "se", "batches", "b0",
                     "relative_residual", "degenerate", "short_window"}},
        {"stationary_entry", {"nu", "aborted", "balance", "moments"}},
        {"moment_bracket", {"m", "fit", "lower_exponent", "upper_exponent", "c_upper", "c_lower",
                            "consistent"}},
        {"spectrum", {"k", "energy", "se"}},
    };
    return j;
}

Json to_json(const EnsembleSummary& s) {
    Json obs = Json::array();
    for (const auto& o : s.observables) {
        Json j;
        j["name"] = o.name;
        j["count"] = o.count;
        j["mean"] = number_or_null(o.mean);
        j["variance"] = number_or_null(o.variance);
        j["se"] = number_or_null(o.se);
        j["q05"] = o.quantiles[0];
        j["q25"] = o.quantiles[1];
        j["q50"] = o.quantiles[2];
        j["q75"] = o.quantiles[3];
        j["q95"] = o.quantiles[4];
        obs.push_back(j);
    }
    Json j;
    j["nu"] = s.nu;
    j["members"] = s.members;
    j["aborted"] = s.aborted;
    j["observables"] = obs;
    return j;
}

Json to_json(const ScalingFit& f) {
    Json pts = Json::array();
    for (const auto& p : f.points) pts.push_back({{"nu", p.nu}, {"q", p.q}, {"se", p.se}});
    Json j;
    j["alpha"] = f.alpha;
    j["intercept"] = f.intercept;
    j["r2"] = f.r2;
    j["points"] = pts;
    return j;
}

Json to_json(const ObservableVerdict& v) {
    Json j;
    j["observable"] = v.observable.name();
    j["means"] = v.means;
    j["ses"] = v.ses;
    j["medians"] = v.medians;
    j["fit"] = v.fit ? to_json(*v.fit) : Json(nullptr);
    j["upper_ok"] = v.upper_ok ? Json(*v.upper_ok) : Json(nullptr);
    j["positive_ok"] = v.positive_ok ? Json(*v.positive_ok) : Json(nullptr);
    j["monotone_means"] = v.monotone_means;
    j["monotone_medians"] = v.monotone_medians;
    j["median_spread"] = number_or_null(v.median_spread);
    Json em = Json::array();
    for (const auto& e : v.exp_moments)
        em.push_back({{"c", kExpMomentC}, {"value", number_or_null(e.value)},
                      {"half_value", number_or_null(e.half_value)}, {"stable", e.stable}});
    j["exp_moments"] = em;
    return j;
}

Json to_json(const OccupationReport& r) {
    Json j;
    j["chi"] = r.chi;
    j["gamma"] = r.gamma;
    j["tau0"] = r.tau0;
    j["tau"] = r.tau;
    j["b0"] = r.b0;
    j["lhs_estimate"] = r.lhs_estimate;
    j["lhs_se"] = r.lhs_se;
    j["rhs_bound"] = r.rhs_bound;
    j["trajectories"] = r.trajectories;
    j["capped"] = r.capped;
    j["pass"] = r.pass;
    return j;
}

Json to_json(const StationaryReport& r) {
    Json j;
    j["chi"] = r.chi;
    j["gamma"] = r.gamma;
    j["frequency"] = r.frequency;
    j["wilson_lo"] = r.wilson_lo;
    j["wilson_hi"] = r.wilson_hi;
    j["bound"] = r.bound;
    j["samples"] = r.samples;
    j["applicable"] = r.applicable;
    j["pass"] = r.pass;
    return j;
}

Json to_json(const BalanceReport& r) {
    Json j;
    j["burn_in_tau"] = r.burn_in_tau;
    j["end_tau"] = r.end_tau;
    j["avg_h1_sq"] = r.avg_h1_sq;
    j["se"] = r.se;
    j["batches"] = r.batches;
    j["b0"] = r.b0;
    j["relative_residual"] = number_or_null(r.relative_residual);
    j["degenerate"] = r.degenerate;
    j["short_window"] = r.short_window;
    return j;
}

Json to_json(const StationaryEntry& e, const std::vector<double>& orders) {
    Json moments = Json::array();
    for (std::size_t i = 0; i < e.moments.size(); ++i)
        moments.push_back({{"m", orders[i]}, {"mean", e.moments[i].mean}, {"se", e.moments[i].se}});
    Json j;
    j["nu"] = e.nu;
    j["aborted"] = e.aborted;
    j["balance"] = to_json(e.balance);
    j["moments"] = moments;
    return j;
}

Json to_json(const MomentBracket& b) {
    Json j;
    j["m"] = b.m;
    j["fit"] = b.fit ? to_json(*b.fit) : Json(nullptr);
    j["lower_exponent"] = b.lower_exponent;
    j["upper_exponent"] = b.upper_exponent;
    j["c_upper"] = b.c_upper;
    j["c_lower"] = b.c_lower;
    j["consistent"] = b.consistent;
    return j;
}

std::string json_line(const std::string& record, Json body) {
    Json j;
    j["schema_version"] = kSchemaVersion;
    j["record"] = record;
    for (auto it = body.begin(); it != body.end(); ++it) j[it.key()] = it.value();
    return j.dump() + "\n";
}

}  // namespace cascade
