#include "npe/config.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "npe/errors.hpp"

namespace npe {

namespace {

const std::set<std::string>& known_keys() {
    static const std::set<std::string> keys = {
        "grid.n",
        "params.D", "params.eps", "params.kbtk", "params.nu", "params.ell", "params.variant",
        "time.dt", "time.t_end", "time.dt_max", "time.cfl_safety", "time.adaptive",
        "ic.preset", "ic.snapshot", "ic.seed",
        "ic.a", "ic.b", "ic.sigma_bar", "ic.w",
        "ic.blob_amplitude", "ic.blob_width", "ic.background", "ic.blob_omega",
        "ic.amplitude", "ic.conc_background", "ic.omega_amplitude", "ic.kmax",
        "output.series_path", "output.series_interval",
        "output.snapshot_path", "output.snapshot_interval", "output.report_path",
        "experiment.kind", "experiment.nu_list", "experiment.mode", "experiment.ell_list",
        "experiment.sample_times", "experiment.T0", "experiment.n_iters", "experiment.dt",
    };
    return keys;
}

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

struct Document {
    std::map<std::string, std::string> values;
};

void insert_entry(Document& doc, const std::string& key, const std::string& value, int line) {
    if (!known_keys().count(key)) throw ParseError("unknown key \"" + key + "\"", line);
    if (doc.values.count(key)) throw ParseError("duplicate key \"" + key + "\"", line);
    doc.values[key] = value;
}

Document parse_document(const std::string& text, const std::vector<std::string>& overrides) {
    Document doc;
    std::istringstream in(text);
    std::string raw;
    int lineno = 0;
    while (std::getline(in, raw)) {
        ++lineno;
        const auto hash = raw.find('#');
        std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ParseError("expected key = value, got \"" + line + "\"", lineno);
        insert_entry(doc, trim(line.substr(0, eq)), trim(line.substr(eq + 1)), lineno);
    }
    for (const auto& ov : overrides) {
        const auto eq = ov.find('=');
        if (eq == std::string::npos)
            throw ParseError("override expects key=value, got \"" + ov + "\"", 0);
        const std::string key = trim(ov.substr(0, eq));
        if (!known_keys().count(key)) throw ParseError("unknown key \"" + key + "\"", 0);
        doc.values[key] = trim(ov.substr(eq + 1));
    }
    return doc;
}

class Reader {
public:
    explicit Reader(const Document& doc) : doc_(doc) {}

    bool has(const std::string& key) const { return doc_.values.count(key) != 0; }

    std::string str(const std::string& key, const std::string& dflt) const {
        const auto it = doc_.values.find(key);
        return it == doc_.values.end() ? dflt : it->second;
    }

    double num(const std::string& key, double dflt) const {
        const auto it = doc_.values.find(key);
        if (it == doc_.values.end()) return dflt;
        return parse_double(key, it->second);
    }

    long integer(const std::string& key, long dflt) const {
        const auto it = doc_.values.find(key);
        if (it == doc_.values.end()) return dflt;
        const double v = parse_double(key, it->second);
        const long l = std::lround(v);
        if (v != static_cast<double>(l))
            throw ValidationError(key + " must be an integer, got " + it->second);
        return l;
    }

    bool boolean(const std::string& key, bool dflt) const {
        const auto it = doc_.values.find(key);
        if (it == doc_.values.end()) return dflt;
        if (it->second == "true") return true;
        if (it->second == "false") return false;
        throw ValidationError(key + " must be true or false, got " + it->second);
    }

    std::vector<double> list(const std::string& key) const {
        std::vector<double> out;
        const auto it = doc_.values.find(key);
        if (it == doc_.values.end()) return out;
        std::istringstream in(it->second);
        std::string item;
        while (std::getline(in, item, ',')) {
            item = trim(item);
            if (item.empty()) continue;
            out.push_back(parse_double(key, item));
        }
        return out;
    }

private:
    static double parse_double(const std::string& key, const std::string& text) {
        double v = 0.0;
        const char* begin = text.data();
        const char* end = begin + text.size();
        const auto res = std::from_chars(begin, end, v);
        if (res.ec != std::errc() || res.ptr != end)
            throw ValidationError(key + " is not a number: \"" + text + "\"");
        return v;
    }

    const Document& doc_;
};

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string format_list(const std::vector<double>& v) {
    std::string out;
    for (size_t i = 0; i < v.size(); ++i) {
        if (i) out += ",";
        out += format_double(v[i]);
    }
    return out;
}

std::string kind_name(ExperimentKind k) {
    switch (k) {
    case ExperimentKind::None: return "none";
    case ExperimentKind::InviscidSweep: return "inviscid_sweep";
    case ExperimentKind::MollificationSweep: return "mollification_sweep";
    case ExperimentKind::Picard: return "picard";
    }
    return "?";
}

ExperimentKind kind_from_name(const std::string& s) {
    if (s == "none") return ExperimentKind::None;
    if (s == "inviscid_sweep") return ExperimentKind::InviscidSweep;
    if (s == "mollification_sweep") return ExperimentKind::MollificationSweep;
    if (s == "picard") return ExperimentKind::Picard;
    throw ValidationError("unknown experiment.kind '" + s + "'");
}

} // namespace

RunConfig parse_config(const std::string& text, const std::vector<std::string>& overrides) {
    const Document doc = parse_document(text, overrides);
    const Reader r(doc);

    RunConfig cfg;
    cfg.grid = Grid(static_cast<int>(r.integer("grid.n", 128)));

    cfg.params.D = r.num("params.D", 1.0);
    cfg.params.eps = r.num("params.eps", 1.0);
    cfg.params.kbtk = r.num("params.kbtk", 1.0);
    cfg.params.nu = r.num("params.nu", 0.0);
    cfg.params.ell = r.num("params.ell", 0.0);
    if (r.has("params.variant")) {
        cfg.params.variant = variant_from_name(r.str("params.variant", ""));
    } else {
        cfg.params.variant = cfg.params.ell > 0.0  ? Variant::Regularized
                             : cfg.params.nu > 0.0 ? Variant::NPNS
                                                   : Variant::NPE;
    }
    validate_params(cfg.params);

    cfg.stepper.dt = r.num("time.dt", 1e-3);
    cfg.stepper.t_end = r.num("time.t_end", 0.0);
    cfg.stepper.dt_max = r.num("time.dt_max", cfg.stepper.dt);
    cfg.stepper.cfl_safety = r.num("time.cfl_safety", 0.5);
    cfg.stepper.adaptive = r.boolean("time.adaptive", false);
    validate_stepper(cfg.stepper);

    cfg.ic_preset = r.str("ic.preset", "random-smooth");
    cfg.ic_snapshot = r.str("ic.snapshot", "");
    if (r.has("ic.preset") && !cfg.ic_snapshot.empty())
        throw ValidationError("ic.preset and ic.snapshot are mutually exclusive");
    cfg.preset.seed = static_cast<uint64_t>(r.integer("ic.seed", 1));
    cfg.preset.a = r.num("ic.a", cfg.preset.a);
    cfg.preset.b = r.num("ic.b", cfg.preset.b);
    cfg.preset.sigma_bar = r.num("ic.sigma_bar", cfg.preset.sigma_bar);
    cfg.preset.w = r.num("ic.w", cfg.preset.w);
    cfg.preset.blob_amplitude = r.num("ic.blob_amplitude", cfg.preset.blob_amplitude);
    cfg.preset.blob_width = r.num("ic.blob_width", cfg.preset.blob_width);
    cfg.preset.background = r.num("ic.background", cfg.preset.background);
    cfg.preset.blob_omega = r.num("ic.blob_omega", cfg.preset.blob_omega);
    cfg.preset.amplitude = r.num("ic.amplitude", cfg.preset.amplitude);
    cfg.preset.conc_background = r.num("ic.conc_background", cfg.preset.conc_background);
    cfg.preset.omega_amplitude = r.num("ic.omega_amplitude", cfg.preset.omega_amplitude);
    cfg.preset.kmax = static_cast<int>(r.integer("ic.kmax", cfg.preset.kmax));

    cfg.output.series_path = r.str("output.series_path", "");
    cfg.output.series_interval = r.num("output.series_interval", 1e-2);
    cfg.output.snapshot_path = r.str("output.snapshot_path", "");
    cfg.output.snapshot_interval = r.num("output.snapshot_interval", 0.0);
    cfg.output.report_path = r.str("output.report_path", "");
    if (!(cfg.output.series_interval > 0.0))
        throw ValidationError("output.series_interval must be > 0");
    if (cfg.output.snapshot_interval < 0.0)
        throw ValidationError("output.snapshot_interval must be >= 0");

    cfg.experiment.kind = kind_from_name(r.str("experiment.kind", "none"));
    cfg.experiment.nu_list = r.list("experiment.nu_list");
    const std::string mode = r.str("experiment.mode", "matched");
    if (mode == "matched")
        cfg.experiment.mode = InviscidMode::Matched;
    else if (mode == "regularized")
        cfg.experiment.mode = InviscidMode::RegularizedKappa;
    else
        throw ValidationError("experiment.mode must be matched or regularized");
    cfg.experiment.ell_list = r.list("experiment.ell_list");
    if (r.has("experiment.sample_times")) cfg.experiment.sample_times = r.list("experiment.sample_times");
    cfg.experiment.T0 = r.num("experiment.T0", 0.0);
    cfg.experiment.n_iters = static_cast<int>(r.integer("experiment.n_iters", 10));
    cfg.experiment.dt = r.num("experiment.dt", 0.0);

    switch (cfg.experiment.kind) {
    case ExperimentKind::InviscidSweep:
        if (cfg.experiment.nu_list.empty())
            throw ValidationError("inviscid_sweep requires experiment.nu_list");
        break;
    case ExperimentKind::MollificationSweep:
        if (cfg.experiment.ell_list.empty())
            throw ValidationError("mollification_sweep requires experiment.ell_list");
        break;
    case ExperimentKind::Picard:
        if (cfg.experiment.n_iters < 2)
            throw ValidationError("picard requires experiment.n_iters >= 2");
        break;
    case ExperimentKind::None:
        break;
    }
    if (cfg.experiment.kind == ExperimentKind::InviscidSweep ||
        cfg.experiment.kind == ExperimentKind::MollificationSweep) {
        if (cfg.experiment.sample_times.empty())
            throw ValidationError("sweeps require experiment.sample_times");
        double prev = 0.0;
        for (double t : cfg.experiment.sample_times) {
            if (!(t > prev))
                throw ValidationError("experiment.sample_times must be positive and ascending");
            prev = t;
        }
    }
    return cfg;
}

std::string serialize_config(const RunConfig& cfg) {
    std::ostringstream out;
    out << "grid.n = " << cfg.grid.n << "\n";
    out << "params.D = " << format_double(cfg.params.D) << "\n";
    out << "params.eps = " << format_double(cfg.params.eps) << "\n";
    out << "params.kbtk = " << format_double(cfg.params.kbtk) << "\n";
    out << "params.nu = " << format_double(cfg.params.nu) << "\n";
    out << "params.ell = " << format_double(cfg.params.ell) << "\n";
    out << "params.variant = " << variant_name(cfg.params.variant) << "\n";
    out << "time.dt = " << format_double(cfg.stepper.dt) << "\n";
    out << "time.t_end = " << format_double(cfg.stepper.t_end) << "\n";
    out << "time.dt_max = " << format_double(cfg.stepper.dt_max) << "\n";
    out << "time.cfl_safety = " << format_double(cfg.stepper.cfl_safety) << "\n";
    out << "time.adaptive = " << (cfg.stepper.adaptive ? "true" : "false") << "\n";
    if (cfg.ic_snapshot.empty())
        out << "ic.preset = " << cfg.ic_preset << "\n";
    else
        out << "ic.snapshot = " << cfg.ic_snapshot << "\n";
    out << "ic.seed = " << cfg.preset.seed << "\n";
    out << "ic.a = " << format_double(cfg.preset.a) << "\n";
    out << "ic.b = " << format_double(cfg.preset.b) << "\n";
    out << "ic.sigma_bar = " << format_double(cfg.preset.sigma_bar) << "\n";
    out << "ic.w = " << format_double(cfg.preset.w) << "\n";
    out << "ic.blob_amplitude = " << format_double(cfg.preset.blob_amplitude) << "\n";
    out << "ic.blob_width = " << format_double(cfg.preset.blob_width) << "\n";
    out << "ic.background = " << format_double(cfg.preset.background) << "\n";
    out << "ic.blob_omega = " << format_double(cfg.preset.blob_omega) << "\n";
    out << "ic.amplitude = " << format_double(cfg.preset.amplitude) << "\n";
    out << "ic.conc_background = " << format_double(cfg.preset.conc_background) << "\n";
    out << "ic.omega_amplitude = " << format_double(cfg.preset.omega_amplitude) << "\n";
    out << "ic.kmax = " << cfg.preset.kmax << "\n";
    if (!cfg.output.series_path.empty())
        out << "output.series_path = " << cfg.output.series_path << "\n";
    out << "output.series_interval = " << format_double(cfg.output.series_interval) << "\n";
    if (!cfg.output.snapshot_path.empty())
        out << "output.snapshot_path = " << cfg.output.snapshot_path << "\n";
    out << "output.snapshot_interval = " << format_double(cfg.output.snapshot_interval) << "\n";
    if (!cfg.output.report_path.empty())
        out << "output.report_path = " << cfg.output.report_path << "\n";
    out << "experiment.kind = " << kind_name(cfg.experiment.kind) << "\n";
    if (!cfg.experiment.nu_list.empty())
        out << "experiment.nu_list = " << format_list(cfg.experiment.nu_list) << "\n";
    out << "experiment.mode = " << inviscid_mode_name(cfg.experiment.mode) << "\n";
    if (!cfg.experiment.ell_list.empty())
        out << "experiment.ell_list = " << format_list(cfg.experiment.ell_list) << "\n";
    out << "experiment.sample_times = " << format_list(cfg.experiment.sample_times) << "\n";
    out << "experiment.T0 = " << format_double(cfg.experiment.T0) << "\n";
    out << "experiment.n_iters = " << cfg.experiment.n_iters << "\n";
    out << "experiment.dt = " << format_double(cfg.experiment.dt) << "\n";
    return out.str();
}

RunConfig load_config_file(const std::string& path, const std::vector<std::string>& overrides) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config file " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str(), overrides);
}

} // namespace npe
