#include "anisoqubit/config.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iterator>
#include <json.hpp>
#include <sstream>

#include "anisoqubit/manifest.h"
#include "anisoqubit/oracles.h"
#include "anisoqubit/units.h"

namespace anisoqubit {

namespace {

using json = nlohmann::json;

struct Context {
    std::vector<std::string> missing;
    std::vector<std::string> defaulted;
};

std::string join(const std::string &path, const std::string &key) { return path.empty() ? key : path + "." + key; }

std::string repr(double v) {
    std::ostringstream s;
    s << v;
    return s.str();
}

/// Typed, path-aware access to one JSON object. finish() rejects keys never asked for.
class Section {
   public:
    Section(const json &obj, std::string path, Context &ctx) : obj_(obj), path_(std::move(path)), ctx_(ctx) {
        if (!obj_.is_object()) throw ConfigError(path_.empty() ? "<root>" : path_, "expected an object");
    }

    bool has(const std::string &key) {
        known_.push_back(key);
        return obj_.contains(key);
    }

    const json &at(const std::string &key) const { return obj_.at(key); }
    std::string path(const std::string &key) const { return join(path_, key); }

    double number(const std::string &key, double fallback) {
        if (!has(key)) {
            ctx_.defaulted.push_back(path(key) + " = " + repr(fallback));
            return fallback;
        }
        return as_number(key);
    }

    std::optional<double> required_number(const std::string &key) {
        if (!has(key)) {
            ctx_.missing.push_back(path(key));
            return std::nullopt;
        }
        return as_number(key);
    }

    std::optional<double> optional_number(const std::string &key) {
        if (!has(key)) return std::nullopt;
        return as_number(key);
    }

    std::uint64_t count(const std::string &key, std::uint64_t fallback) {
        if (!has(key)) {
            ctx_.defaulted.push_back(path(key) + " = " + std::to_string(fallback));
            return fallback;
        }
        return as_count(key);
    }

    std::optional<std::uint64_t> required_count(const std::string &key) {
        if (!has(key)) {
            ctx_.missing.push_back(path(key));
            return std::nullopt;
        }
        return as_count(key);
    }

    std::string text(const std::string &key, const std::string &fallback) {
        if (!has(key)) {
            ctx_.defaulted.push_back(path(key) + " = \"" + fallback + "\"");
            return fallback;
        }
        const json &v = obj_.at(key);
        if (!v.is_string()) throw ConfigError(path(key), "expected a string");
        return v.get<std::string>();
    }

    std::optional<std::string> required_text(const std::string &key) {
        if (!has(key)) {
            ctx_.missing.push_back(path(key));
            return std::nullopt;
        }
        const json &v = obj_.at(key);
        if (!v.is_string()) throw ConfigError(path(key), "expected a string");
        return v.get<std::string>();
    }

    void finish() const {
        for (const auto &item : obj_.items()) {
            if (std::find(known_.begin(), known_.end(), item.key()) == known_.end()) {
                throw ConfigError(path(item.key()), "unknown field");
            }
        }
    }

   private:
    double as_number(const std::string &key) const {
        const json &v = obj_.at(key);
        if (!v.is_number()) throw ConfigError(path(key), "expected a number");
        double d = v.get<double>();
        if (!std::isfinite(d)) throw ConfigError(path(key), "must be finite");
        return d;
    }

    std::uint64_t as_count(const std::string &key) const {
        const json &v = obj_.at(key);
        if (v.is_number_unsigned()) return v.get<std::uint64_t>();
        if (v.is_number_integer() && v.get<std::int64_t>() >= 0) return static_cast<std::uint64_t>(v.get<std::int64_t>());
        throw ConfigError(path(key), "expected a non-negative integer");
    }

    const json &obj_;
    std::string path_;
    Context &ctx_;
    std::vector<std::string> known_;
};

const json &empty_object() {
    static const json e = json::object();
    return e;
}

const json &child(Section &parent, const std::string &key) {
    return parent.has(key) ? parent.at(key) : empty_object();
}

/// Either a list of numbers or {"start", "step", "count"}.
std::vector<double> read_grid(const json &v, const std::string &path) {
    std::vector<double> out;
    if (v.is_array()) {
        for (std::size_t i = 0; i < v.size(); ++i) {
            if (!v[i].is_number()) throw ConfigError(path + "[" + std::to_string(i) + "]", "expected a number");
            out.push_back(v[i].get<double>());
        }
        if (out.empty()) throw ConfigError(path, "grid is empty");
        return out;
    }
    Context unused;
    Section s(v, path, unused);
    auto start = s.required_number("start");
    auto step = s.required_number("step");
    auto count = s.required_count("count");
    s.finish();
    if (!unused.missing.empty()) throw ConfigError(unused.missing.front(), "missing field");
    if (*count == 0) throw ConfigError(s.path("count"), "must be >= 1");
    if (*count > 10'000'000) throw ConfigError(s.path("count"), "too many grid points");
    for (std::uint64_t i = 0; i < *count; ++i) out.push_back(*start + *step * static_cast<double>(i));
    return out;
}

template <class Parse>
auto parse_enum(const std::string &value, const std::string &path, Parse parse) {
    try {
        return parse(value);
    } catch (const std::invalid_argument &e) {
        throw ConfigError(path, e.what());
    }
}

NoiseSpec read_noise(const json &v, const std::string &path, Context &ctx) {
    Section s(v, path, ctx);
    const std::size_t missing_before = ctx.missing.size();
    NoiseSpec spec;
    auto kind = s.required_text("kind");
    if (kind) spec.kind = parse_enum(*kind, s.path("kind"), parse_noise_kind);
    if (auto a = s.required_number("amplitude_mhz")) spec.amplitude_mhz = *a;
    bool switching = spec.kind == NoiseKind::rts || spec.kind == NoiseKind::lowpass_rts;
    if (switching) {
        if (auto r = s.required_number("switching_rate_mhz")) spec.switching_rate_mhz = *r;
    } else if (auto r = s.optional_number("switching_rate_mhz")) {
        spec.switching_rate_mhz = *r;
    }
    if (spec.kind == NoiseKind::lowpass_rts) {
        if (auto c = s.required_number("cutoff_mhz")) spec.cutoff_mhz = *c;
    } else {
        spec.cutoff_mhz = s.number("cutoff_mhz", 0.0);
    }
    std::string dist = s.text("distribution", spec.kind == NoiseKind::quasistatic ? "gaussian" : "bimodal");
    spec.distribution = parse_enum(dist, s.path("distribution"), parse_distribution);
    spec.seed = s.count("seed", 0);
    s.finish();
    // Value checks only make sense once every required field is present.
    if (kind && ctx.missing.size() == missing_before) {
        try {
            spec.validate();
        } catch (const std::invalid_argument &e) {
            throw ConfigError(path, e.what());
        }
    }
    return spec;
}

OracleModel parse_oracle_model(std::string_view s) {
    for (auto m : {OracleModel::quasistatic_ramsey, OracleModel::quasistatic_relaxation, OracleModel::lindblad_ramsey,
                   OracleModel::isotropic_lindblad}) {
        if (s == to_string(m)) return m;
    }
    throw std::invalid_argument("unknown oracle model '" + std::string(s) + "'");
}

PsdMethod parse_psd_method(std::string_view s) {
    if (s == "periodogram") return PsdMethod::periodogram;
    if (s == "welch") return PsdMethod::welch;
    throw std::invalid_argument("unknown PSD method '" + std::string(s) + "' (periodogram, welch)");
}

PsdSeries parse_psd_series(std::string_view s) {
    if (s == "approx-purity") return PsdSeries::approx_purity;
    if (s == "purity") return PsdSeries::purity;
    throw std::invalid_argument("unknown PSD series '" + std::string(s) + "' (approx-purity, purity)");
}

Detrend parse_detrend(std::string_view s) {
    if (s == "none") return Detrend::none;
    if (s == "mean") return Detrend::mean;
    if (s == "linear") return Detrend::linear;
    throw std::invalid_argument("unknown detrend '" + std::string(s) + "' (none, mean, linear)");
}

std::string_view to_string(PsdMethod m) { return m == PsdMethod::welch ? "welch" : "periodogram"; }
std::string_view to_string(PsdSeries s) { return s == PsdSeries::purity ? "purity" : "approx-purity"; }
std::string_view to_string(Detrend d) {
    switch (d) {
        case Detrend::none:
            return "none";
        case Detrend::mean:
            return "mean";
        case Detrend::linear:
            return "linear";
    }
    return "?";
}

std::string location(std::string_view text, std::size_t byte) {
    std::size_t line = 1;
    std::size_t column = 1;
    std::size_t end = std::min(byte > 0 ? byte - 1 : 0, text.size());
    for (std::size_t i = 0; i < end; ++i) {
        if (text[i] == '\n') {
            ++line;
            column = 1;
        } else {
            ++column;
        }
    }
    return "line " + std::to_string(line) + ", column " + std::to_string(column);
}

json noise_json(const NoiseSpec &s) {
    return {{"kind", to_string(s.kind)},
            {"amplitude_mhz", s.amplitude_mhz},
            {"switching_rate_mhz", s.switching_rate_mhz},
            {"cutoff_mhz", s.cutoff_mhz},
            {"distribution", to_string(s.distribution)},
            {"seed", s.seed}};
}

std::string describe(const NoiseSpec &s) {
    std::ostringstream o;
    o << to_string(s.kind) << ", amplitude " << s.amplitude_mhz << " MHz";
    if (s.kind == NoiseKind::rts || s.kind == NoiseKind::lowpass_rts) o << ", switching " << s.switching_rate_mhz << " MHz";
    if (s.cutoff_mhz > 0.0) o << ", cutoff " << s.cutoff_mhz << " MHz";
    o << ", " << to_string(s.distribution) << ", seed salt " << s.seed;
    return o.str();
}

}  // namespace

std::string_view to_string(OracleModel m) {
    switch (m) {
        case OracleModel::quasistatic_ramsey:
            return "quasistatic-ramsey";
        case OracleModel::quasistatic_relaxation:
            return "quasistatic-relaxation";
        case OracleModel::lindblad_ramsey:
            return "lindblad-ramsey";
        case OracleModel::isotropic_lindblad:
            return "isotropic-lindblad";
    }
    return "?";
}

RunConfig parse_config(std::string_view text) {
    json root;
    if (text.find_first_not_of(" \t\r\n") == std::string_view::npos) {
        root = json::object();
    } else {
        try {
            root = json::parse(text);
        } catch (const json::parse_error &e) {
            std::string msg = e.what();
            auto pos = msg.find("parse error");
            throw ConfigError(location(text, e.byte), pos == std::string::npos ? msg : msg.substr(pos));
        }
    }

    Context ctx;
    RunConfig cfg;
    ProtocolConfig &p = cfg.protocol;
    Section top(root, "", ctx);

    {
        Section s(child(top, "qubit"), "qubit", ctx);
        if (auto f = s.required_number("f01_mhz")) p.f01_mhz = *f;
        s.finish();
    }
    {
        Section s(child(top, "noise"), "noise", ctx);
        std::string routing = s.text("routing", "y-only");
        p.two_axis.routing = parse_enum(routing, s.path("routing"), parse_routing);
        p.two_axis.rotations = static_cast<int>(s.count("rotations", 1));
        if (s.has("x")) p.noise_x = read_noise(s.at("x"), s.path("x"), ctx);
        if (s.has("y")) p.noise_y = read_noise(s.at("y"), s.path("y"), ctx);
        s.finish();
    }
    {
        Section s(child(top, "protocol"), "protocol", ctx);
        p.phi = deg_to_rad(s.number("phi_deg", 0.0));
        p.tau_b = s.number("tau_b_ns", 10.0);
        p.t_ramp = s.number("t_ramp_ns", 0.5);
        if (s.has("tau_n_ns")) {
            p.tau_n_grid = read_grid(s.at("tau_n_ns"), s.path("tau_n_ns"));
        } else {
            ctx.missing.push_back(s.path("tau_n_ns"));
        }
        p.detuning_correction_mhz = s.number("detuning_correction_mhz", 0.0);
        p.dt_max = s.number("dt_max_ns", 0.0);
        std::vector<double> sweep_deg;
        if (s.has("phi_sweep_deg")) {
            sweep_deg = read_grid(s.at("phi_sweep_deg"), s.path("phi_sweep_deg"));
        } else {
            for (int k = 0; k < 24; ++k) sweep_deg.push_back(15.0 * k);
            ctx.defaulted.push_back(s.path("phi_sweep_deg") + " = {start 0, step 15, count 24}");
        }
        for (double d : sweep_deg) cfg.phi_sweep.push_back(deg_to_rad(d));
        cfg.isotropic_rotations = static_cast<int>(s.count("isotropic_rotations", 19));
        if (cfg.isotropic_rotations < 1) throw ConfigError(s.path("isotropic_rotations"), "must be >= 1");
        s.finish();
    }
    {
        Section s(child(top, "run"), "run", ctx);
        p.n_shots = s.count("shots", 1000);
        if (auto seed = s.required_count("seed")) p.seed = *seed;
        if (auto t = s.optional_number("threads")) {
            if (*t < 1 || *t != std::floor(*t)) throw ConfigError(s.path("threads"), "must be a positive integer");
            cfg.threads = static_cast<unsigned>(*t);
        }
        s.finish();
    }
    {
        Section s(child(top, "oracle"), "oracle", ctx);
        cfg.oracle.model = parse_enum(s.text("model", "quasistatic-ramsey"), s.path("model"), parse_oracle_model);
        cfg.oracle.gamma_mhz = s.number("gamma_mhz", 0.0);
        cfg.oracle.theta_deg = s.number("theta_deg", 0.0);
        cfg.oracle.eta_rms_mhz = s.optional_number("eta_rms_mhz");
        if (cfg.oracle.gamma_mhz < 0.0) throw ConfigError(s.path("gamma_mhz"), "must be >= 0");
        if (cfg.oracle.eta_rms_mhz && *cfg.oracle.eta_rms_mhz < 0.0) {
            throw ConfigError(s.path("eta_rms_mhz"), "must be >= 0");
        }
        s.finish();
    }
    {
        Section s(child(top, "psd"), "psd", ctx);
        cfg.psd.method = parse_enum(s.text("method", "periodogram"), s.path("method"), parse_psd_method);
        cfg.psd.series = parse_enum(s.text("series", "approx-purity"), s.path("series"), parse_psd_series);
        cfg.psd.detrend = parse_enum(s.text("detrend", "mean"), s.path("detrend"), parse_detrend);
        cfg.psd.segment_length = s.count("segment_length", 256);
        cfg.psd.overlap = s.number("overlap", 0.5);
        cfg.psd.input = s.text("input", "");
        if (cfg.psd.segment_length < 8) throw ConfigError(s.path("segment_length"), "must be >= 8");
        if (cfg.psd.overlap < 0.0 || cfg.psd.overlap > 0.9) throw ConfigError(s.path("overlap"), "must be in [0, 0.9]");
        s.finish();
    }
    {
        Section s(child(top, "noise_gen"), "noise_gen", ctx);
        cfg.noise_gen.duration_ns = s.number("duration_ns", 1000.0);
        cfg.noise_gen.dt_ns = s.number("dt_ns", 0.1);
        cfg.noise_gen.traces = s.count("traces", 1);
        if (!(cfg.noise_gen.duration_ns > 0.0)) throw ConfigError(s.path("duration_ns"), "must be > 0");
        if (!(cfg.noise_gen.dt_ns > 0.0)) throw ConfigError(s.path("dt_ns"), "must be > 0");
        if (cfg.noise_gen.traces < 1) throw ConfigError(s.path("traces"), "must be >= 1");
        s.finish();
    }
    {
        Section s(child(top, "output"), "output", ctx);
        cfg.output_dir = s.text("directory", ".");
        cfg.prefix = s.text("prefix", "");
        s.finish();
    }
    top.finish();

    if (!ctx.missing.empty()) {
        std::string list;
        for (const auto &m : ctx.missing) list += (list.empty() ? "" : ", ") + m;
        throw ConfigError("", "missing required fields: " + list);
    }
    try {
        p.validate();
    } catch (const std::invalid_argument &e) {
        throw ConfigError("protocol", e.what());
    }
    cfg.defaulted = std::move(ctx.defaulted);
    return cfg;
}

RunConfig load_config(const std::filesystem::path &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError(path.string(), "cannot open config file");
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return parse_config(text);
}

std::string canonical_json(const RunConfig &c) {
    const ProtocolConfig &p = c.protocol;
    json j;
    j["qubit"] = {{"f01_mhz", p.f01_mhz}};
    json noise = {{"routing", to_string(p.two_axis.routing)}, {"rotations", p.two_axis.rotations}};
    if (p.noise_x) noise["x"] = noise_json(*p.noise_x);
    if (p.noise_y) noise["y"] = noise_json(*p.noise_y);
    j["noise"] = noise;
    std::vector<double> sweep_deg;
    for (double phi : c.phi_sweep) sweep_deg.push_back(rad_to_deg(phi));
    j["protocol"] = {{"phi_deg", rad_to_deg(p.phi)},
                     {"tau_b_ns", p.tau_b},
                     {"t_ramp_ns", p.t_ramp},
                     {"tau_n_ns", p.tau_n_grid},
                     {"detuning_correction_mhz", p.detuning_correction_mhz},
                     {"dt_max_ns", p.dt_max},
                     {"phi_sweep_deg", sweep_deg},
                     {"isotropic_rotations", c.isotropic_rotations}};
    j["run"] = {{"shots", p.n_shots}, {"seed", p.seed}};
    json oracle = {{"model", to_string(c.oracle.model)},
                   {"gamma_mhz", c.oracle.gamma_mhz},
                   {"theta_deg", c.oracle.theta_deg}};
    if (c.oracle.eta_rms_mhz) oracle["eta_rms_mhz"] = *c.oracle.eta_rms_mhz;
    j["oracle"] = oracle;
    j["psd"] = {{"method", to_string(c.psd.method)},
                {"series", to_string(c.psd.series)},
                {"detrend", to_string(c.psd.detrend)},
                {"segment_length", c.psd.segment_length},
                {"overlap", c.psd.overlap},
                {"input", c.psd.input}};
    j["noise_gen"] = {{"duration_ns", c.noise_gen.duration_ns},
                      {"dt_ns", c.noise_gen.dt_ns},
                      {"traces", c.noise_gen.traces}};
    j["output"] = {{"directory", c.output_dir.generic_string()}, {"prefix", c.prefix}};
    return j.dump();
}

std::string config_digest(const RunConfig &config) { return hex64(fnv1a64(canonical_json(config))); }

std::string validation_report(const RunConfig &c) {
    const ProtocolConfig &p = c.protocol;
    std::ostringstream o;
    o << "config OK (digest " << config_digest(c) << ")\n";
    o << "qubit: f01 = " << p.f01_mhz << " MHz, tau_L = " << 1e3 / p.f01_mhz << " ns\n";
    o << "noise: routing " << to_string(p.two_axis.routing) << ", rotations " << p.two_axis.rotations << "\n";
    if (p.noise_x) o << "  x: " << describe(*p.noise_x) << "\n";
    if (p.noise_y) o << "  y: " << describe(*p.noise_y) << "\n";
    if (!p.noise_x && !p.noise_y) o << "  (no noise sources)\n";
    ResolvedGrid grid = resolve_grid(p);
    o << "protocol: phi = " << rad_to_deg(p.phi) << " deg, tau_b = " << p.tau_b << " ns, t_ramp = " << p.t_ramp
      << " ns\n";
    o << "  tau_n: " << grid.tau_n.size() << " points, " << grid.tau_n.front() << " .. " << grid.tau_n.back()
      << " ns, integration step " << grid.dt << " ns\n";
    o << "  phi sweep (deg):";
    for (double phi : c.phi_sweep) o << ' ' << rad_to_deg(phi);
    o << "\n";
    o << "run: " << p.n_shots << " shots, seed " << p.seed << "\n";
    for (const auto *spec : {p.noise_x ? &*p.noise_x : nullptr, p.noise_y ? &*p.noise_y : nullptr}) {
        if (spec == nullptr) continue;
        if (auto w = oracles::quasistatic_validity(spec->variance(), p.omega())) o << "warning: " << *w << "\n";
    }
    if (!c.defaulted.empty()) {
        o << "defaulted fields:\n";
        for (const auto &d : c.defaulted) o << "  " << d << "\n";
    }
    return o.str();
}

}  // namespace anisoqubit
