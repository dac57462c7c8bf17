#include "qpc/setup.hpp"

#include <boost/multiprecision/mpfr.hpp>

#include <cctype>
#include <fstream>
#include <map>
#include <sstream>

namespace qpc {

namespace {

using boost::multiprecision::exp;

std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

// Unit factors to SI. A value token is "<number> [unit]".
const std::map<std::string, const char*> kUnitScale = {
    {"m", "1"},        {"mm", "1e-3"},  {"um", "1e-6"}, {"\xc2\xb5m", "1e-6"},
    {"nm", "1e-9"},    {"pm", "1e-12"}, {"s", "1"},     {"ms", "1e-3"},
    {"us", "1e-6"},    {"ns", "1e-9"},  {"ps", "1e-12"},{"kg", "1"},
    {"J*s", "1"},      {"J.s", "1"},    {"m/s", "1"},   {"1/m^2", "1"},
    {"dB", "1"},
};

Real parse_value(const std::string& token, int line_no) {
    std::string t = trim(token);
    if (t.empty()) throw ConfigParseError("line " + std::to_string(line_no) + ": empty value");
    std::size_t split = t.find_first_of(" \t");
    std::string num = t, unit;
    if (split != std::string::npos) {
        num = trim(t.substr(0, split));
        unit = trim(t.substr(split + 1));
    }
    Real v;
    try {
        v = Real(num);
    } catch (const std::exception&) {
        throw ConfigParseError("line " + std::to_string(line_no) + ": bad number '" + num + "'");
    }
    if (!unit.empty()) {
        auto it = kUnitScale.find(unit);
        if (it == kUnitScale.end())
            throw ConfigParseError("line " + std::to_string(line_no) + ": unknown unit '" + unit + "'");
        v *= Real(it->second);
    }
    return v;
}

std::vector<Real> parse_list(const std::string& raw, int line_no) {
    std::string t = trim(raw);
    if (t.size() < 2 || t.front() != '[' || t.back() != ']')
        throw ConfigParseError("line " + std::to_string(line_no) + ": expected [list]");
    t = t.substr(1, t.size() - 2);
    std::vector<Real> out;
    std::string item;
    std::istringstream ss(t);
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(parse_value(item, line_no));
    }
    return out;
}

struct RawConfig {
    // section -> key -> (value text, line)
    std::map<std::string, std::map<std::string, std::pair<std::string, int>>> sections;

    bool has(const std::string& sec, const std::string& key) const {
        auto s = sections.find(sec);
        return s != sections.end() && s->second.count(key) > 0;
    }
    std::pair<std::string, int> get(const std::string& sec, const std::string& key) const {
        auto s = sections.find(sec);
        if (s == sections.end() || !s->second.count(key))
            throw ConfigParseError("missing key '" + key + "' in section [" + sec + "]");
        return s->second.at(key);
    }
};

RawConfig tokenize(const std::string& text) {
    RawConfig raw;
    std::istringstream ss(text);
    std::string line, section;
    int line_no = 0;
    while (std::getline(ss, line)) {
        ++line_no;
        std::size_t hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ConfigParseError("line " + std::to_string(line_no) + ": unterminated section header");
            section = trim(line.substr(1, line.size() - 2));
            raw.sections[section];
            continue;
        }
        std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigParseError("line " + std::to_string(line_no) + ": expected key = value");
        if (section.empty())
            throw ConfigParseError("line " + std::to_string(line_no) + ": key outside any section");
        std::string key = trim(line.substr(0, eq));
        raw.sections[section][key] = {trim(line.substr(eq + 1)), line_no};
    }
    return raw;
}

long to_long(const std::string& s, int line_no) {
    try {
        return std::stol(s);
    } catch (const std::exception&) {
        throw ConfigParseError("line " + std::to_string(line_no) + ": expected integer, got '" + s + "'");
    }
}

std::uint64_t to_u64(const std::string& s, int line_no) {
    try {
        return std::stoull(s);
    } catch (const std::exception&) {
        throw ConfigParseError("line " + std::to_string(line_no) + ": expected integer, got '" + s + "'");
    }
}

} // namespace

void PhysicalConstants::validate() const {
    if (mass <= 0) throw std::invalid_argument("constants: mass must be positive");
    if (hbar <= 0) throw std::invalid_argument("constants: hbar must be positive");
    if (v_z <= 0) throw std::invalid_argument("constants: v_z must be positive");
}

void SetupGeometry::validate() const {
    if (num_planes < 2) throw std::invalid_argument("geometry: N must be >= 2");
    const int planes = num_planes - 1;
    if (static_cast<int>(slit_centers.size()) != planes)
        throw std::invalid_argument("geometry: need slit centers for " + std::to_string(planes) + " planes");
    if (static_cast<int>(slit_half_widths.size()) != planes)
        throw std::invalid_argument("geometry: need one half-width per slit plane");
    if (static_cast<int>(plane_distances.size()) != num_planes)
        throw std::invalid_argument("geometry: need " + std::to_string(num_planes) + " plane distances");
    if (source_width <= 0) throw std::invalid_argument("geometry: source_width must be positive");
    if (separation_factor < 1) throw std::invalid_argument("geometry: alpha must be >= 1");
    for (int j = 0; j < num_planes; ++j)
        if (plane_distances[j] <= 0)
            throw std::invalid_argument("geometry: distance " + std::to_string(j) + " must be positive");
    for (int j = 0; j < planes; ++j) {
        const auto& xs = slit_centers[j];
        const Real& beta = slit_half_widths[j];
        if (beta <= 0)
            throw std::invalid_argument("geometry: half-width of plane " + std::to_string(j + 1) +
                                        " must be positive");
        if (xs.empty())
            throw std::invalid_argument("geometry: plane " + std::to_string(j + 1) + " has no slits");
        if (static_cast<int>(xs.size()) % 2 == 0)
            throw std::invalid_argument("geometry: plane " + std::to_string(j + 1) +
                                        " must carry an odd slit count (indices -S..S)");
        for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
            if (xs[i + 1] <= xs[i])
                throw std::invalid_argument("geometry: plane " + std::to_string(j + 1) +
                                            " slit centers must be strictly increasing (slit " +
                                            std::to_string(i) + ")");
            Real gap = xs[i + 1] - xs[i];
            if (gap <= 2 * separation_factor * beta)
                throw std::invalid_argument(
                    "geometry: plane " + std::to_string(j + 1) + " slits " + std::to_string(i) + "," +
                    std::to_string(i + 1) + " violate the separation constraint gap > 2*alpha*beta");
        }
        // coarse-grained exclusivity lint: neighboring windows must barely overlap
        for (std::size_t a = 0; a < xs.size(); ++a)
            for (std::size_t b = a + 1; b < xs.size(); ++b) {
                Real gap = xs[b] - xs[a];
                Real overlap = exp(-(gap * gap) / (2 * beta * beta));
                if (overlap > overlap_threshold)
                    throw std::invalid_argument(
                        "geometry: plane " + std::to_string(j + 1) + " slits " + std::to_string(a) + "," +
                        std::to_string(b) + " overlap metric " + to_string(overlap, 3) +
                        " exceeds threshold " + to_string(overlap_threshold, 3));
            }
    }
}

void ExperimentConfig::validate() const {
    if (sampling_interval <= 0) throw std::invalid_argument("experiment: sampling_interval must be positive");
    if (k_max < k_min) throw std::invalid_argument("experiment: k_max must be >= k_min");
    if (exotic_order < 0) throw std::invalid_argument("experiment: exotic_order must be >= 0");
    precision.validate();
}

void TimeSchedule::validate() const {
    Real prev{0};
    for (std::size_t j = 0; j < cumulative.size(); ++j) {
        if (leg[j] <= 0) throw std::invalid_argument("schedule: leg times must be positive");
        if (cumulative[j] <= prev) throw std::invalid_argument("schedule: cumulative times must increase");
        prev = cumulative[j];
    }
}

TimeSchedule derive_schedule(const SetupGeometry& geom, const PhysicalConstants& consts) {
    TimeSchedule ts;
    Real acc{0};
    for (const Real& L : geom.plane_distances) {
        ts.leg.push_back(L / consts.v_z);
        acc += ts.leg.back();
        ts.cumulative.push_back(acc);
    }
    ts.validate();
    return ts;
}

Config parse_config_text(const std::string& text) {
    RawConfig raw = tokenize(text);
    Config cfg;
    cfg.source_text = text;

    {
        auto [v, ln] = raw.get("constants", "mass");
        cfg.constants.mass = parse_value(v, ln);
        std::tie(v, ln) = raw.get("constants", "hbar");
        cfg.constants.hbar = parse_value(v, ln);
        std::tie(v, ln) = raw.get("constants", "v_z");
        cfg.constants.v_z = parse_value(v, ln);
    }

    SetupGeometry& g = cfg.geometry;
    {
        auto [v, ln] = raw.get("geometry", "source_width");
        g.source_width = parse_value(v, ln);
        std::tie(v, ln) = raw.get("geometry", "plane_distances");
        g.plane_distances = parse_list(v, ln);
        g.num_planes = static_cast<int>(g.plane_distances.size());
        if (raw.has("geometry", "alpha")) {
            std::tie(v, ln) = raw.get("geometry", "alpha");
            g.separation_factor = parse_value(v, ln);
        }
        if (raw.has("geometry", "overlap_threshold")) {
            std::tie(v, ln) = raw.get("geometry", "overlap_threshold");
            g.overlap_threshold = parse_value(v, ln);
        }
    }
    for (int j = 1; j < g.num_planes; ++j) {
        std::string sec = "geometry.plane." + std::to_string(j);
        auto [cv, cln] = raw.get(sec, "centers");
        g.slit_centers.push_back(parse_list(cv, cln));
        auto [wv, wln] = raw.get(sec, "half_width");
        g.slit_half_widths.push_back(parse_value(wv, wln));
    }

    ExperimentConfig& e = cfg.experiment;
    {
        auto [v, ln] = raw.get("experiment", "sampling_interval");
        e.sampling_interval = parse_value(v, ln);
        std::tie(v, ln) = raw.get("experiment", "k_min");
        e.k_min = to_long(v, ln);
        std::tie(v, ln) = raw.get("experiment", "k_max");
        e.k_max = to_long(v, ln);
        if (raw.has("experiment", "exotic_order")) {
            std::tie(v, ln) = raw.get("experiment", "exotic_order");
            e.exotic_order = static_cast<int>(to_long(v, ln));
        }
        if (raw.has("experiment", "precision_digits")) {
            std::tie(v, ln) = raw.get("experiment", "precision_digits");
            e.precision.decimal_digits = static_cast<unsigned>(to_long(v, ln));
        }
        if (raw.has("experiment", "escalation_factor")) {
            std::tie(v, ln) = raw.get("experiment", "escalation_factor");
            e.precision.escalation_factor = static_cast<unsigned>(to_long(v, ln));
        }
        if (raw.has("experiment", "rng_seed")) {
            std::tie(v, ln) = raw.get("experiment", "rng_seed");
            e.rng_seed = to_u64(v, ln);
        }
        if (raw.has("experiment", "path_cap")) {
            std::tie(v, ln) = raw.get("experiment", "path_cap");
            e.path_cap = to_u64(v, ln);
        }
        if (raw.has("experiment", "d_override")) {
            std::tie(v, ln) = raw.get("experiment", "d_override");
            e.d_override = parse_list(v, ln);
        }
    }
    if (raw.sections.count("noise")) {
        NoiseConfig n;
        if (raw.has("noise", "snr_db")) {
            auto [v, ln] = raw.get("noise", "snr_db");
            n.snr_db = parse_value(v, ln);
        }
        if (raw.has("noise", "sigma")) {
            auto [v, ln] = raw.get("noise", "sigma");
            n.sigma = parse_value(v, ln);
        }
        if (raw.has("noise", "sigma_max")) {
            auto [v, ln] = raw.get("noise", "sigma_max");
            n.sigma_max = parse_value(v, ln);
        }
        if (raw.has("noise", "seed")) {
            auto [v, ln] = raw.get("noise", "seed");
            n.seed = to_u64(v, ln);
        }
        cfg.experiment.noise = n;
    }

    cfg.constants.validate();
    cfg.geometry.validate();
    cfg.experiment.validate();
    if (!e.d_override.empty() &&
        static_cast<int>(e.d_override.size()) != cfg.geometry.num_planes - 1)
        throw std::invalid_argument("experiment: d_override length must be N-1");
    return cfg;
}

Config load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigParseError("cannot open config file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str());
}

std::string config_to_text(const Config& cfg) {
    std::ostringstream out;
    auto emit = [&](const Real& v) { return to_string_full(v); };
    out << "[constants]\n";
    out << "mass = " << emit(cfg.constants.mass) << " kg\n";
    out << "hbar = " << emit(cfg.constants.hbar) << " J*s\n";
    out << "v_z = " << emit(cfg.constants.v_z) << " m/s\n\n";
    out << "[geometry]\n";
    out << "source_width = " << emit(cfg.geometry.source_width) << " m\n";
    out << "alpha = " << emit(cfg.geometry.separation_factor) << "\n";
    out << "overlap_threshold = " << emit(cfg.geometry.overlap_threshold) << "\n";
    out << "plane_distances = [";
    for (std::size_t j = 0; j < cfg.geometry.plane_distances.size(); ++j)
        out << (j ? ", " : "") << emit(cfg.geometry.plane_distances[j]) << " m";
    out << "]\n\n";
    for (int j = 1; j < cfg.geometry.num_planes; ++j) {
        out << "[geometry.plane." << j << "]\n";
        out << "half_width = " << emit(cfg.geometry.slit_half_widths[j - 1]) << " m\n";
        out << "centers = [";
        const auto& xs = cfg.geometry.slit_centers[j - 1];
        for (std::size_t i = 0; i < xs.size(); ++i) out << (i ? ", " : "") << emit(xs[i]) << " m";
        out << "]\n\n";
    }
    const auto& e = cfg.experiment;
    out << "[experiment]\n";
    out << "sampling_interval = " << emit(e.sampling_interval) << " m\n";
    out << "k_min = " << e.k_min << "\n";
    out << "k_max = " << e.k_max << "\n";
    out << "exotic_order = " << e.exotic_order << "\n";
    out << "precision_digits = " << e.precision.decimal_digits << "\n";
    out << "escalation_factor = " << e.precision.escalation_factor << "\n";
    out << "rng_seed = " << e.rng_seed << "\n";
    out << "path_cap = " << e.path_cap << "\n";
    if (!e.d_override.empty()) {
        out << "d_override = [";
        for (std::size_t i = 0; i < e.d_override.size(); ++i)
            out << (i ? ", " : "") << emit(e.d_override[i]);
        out << "]\n";
    }
    if (e.noise) {
        out << "\n[noise]\n";
        if (e.noise->snr_db) out << "snr_db = " << emit(*e.noise->snr_db) << "\n";
        if (e.noise->sigma) out << "sigma = " << emit(*e.noise->sigma) << "\n";
        if (e.noise->sigma_max != 0) out << "sigma_max = " << emit(e.noise->sigma_max) << "\n";
        out << "seed = " << e.noise->seed << "\n";
    }
    return out.str();
}

} // namespace qpc
