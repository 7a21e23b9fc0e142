#include "spikelab/config.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace spikelab {

namespace {

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

double parse_double(const std::string& key, const std::string& text) {
    const std::string t = trim(text);
    char* end = nullptr;
    const double v = std::strtod(t.c_str(), &end);
    if (t.empty() || end != t.c_str() + t.size())
        throw std::invalid_argument("config key '" + key + "': not a number: '" + text + "'");
    return v;
}

}  // namespace

KeyValueConfig KeyValueConfig::parse(const std::string& text) {
    KeyValueConfig cfg;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        const auto eq = t.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config line " + std::to_string(lineno) + ": expected key = value");
        const std::string key = trim(t.substr(0, eq));
        if (key.empty()) throw std::invalid_argument("config line " + std::to_string(lineno) + ": empty key");
        cfg.entries_[key] = trim(t.substr(eq + 1));
    }
    return cfg;
}

KeyValueConfig KeyValueConfig::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    return parse(buf.str());
}

const std::string& KeyValueConfig::raw(const std::string& key) const {
    auto it = entries_.find(key);
    if (it == entries_.end()) throw std::invalid_argument("config key '" + key + "' is missing");
    return it->second;
}

std::string KeyValueConfig::get_string(const std::string& key) const { return raw(key); }

std::string KeyValueConfig::get_string(const std::string& key, const std::string& fallback) const {
    return has(key) ? raw(key) : fallback;
}

double KeyValueConfig::get_double(const std::string& key) const { return parse_double(key, raw(key)); }

double KeyValueConfig::get_double(const std::string& key, double fallback) const {
    return has(key) ? get_double(key) : fallback;
}

long long KeyValueConfig::get_int(const std::string& key) const {
    const std::string t = trim(raw(key));
    char* end = nullptr;
    const long long v = std::strtoll(t.c_str(), &end, 10);
    if (t.empty() || end != t.c_str() + t.size())
        throw std::invalid_argument("config key '" + key + "': not an integer: '" + t + "'");
    return v;
}

long long KeyValueConfig::get_int(const std::string& key, long long fallback) const {
    return has(key) ? get_int(key) : fallback;
}

std::vector<std::string> KeyValueConfig::get_strings(const std::string& key) const {
    std::vector<std::string> out;
    std::stringstream ss(raw(key));
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

std::vector<double> KeyValueConfig::get_doubles(const std::string& key) const {
    std::vector<double> out;
    for (const auto& s : get_strings(key)) out.push_back(parse_double(key, s));
    return out;
}

JumpLaw jump_law_from_config(const KeyValueConfig& cfg) {
    const std::string kind = cfg.get_string("jump.kind", "mixture");
    if (kind == "mixture") {
        if (!cfg.has("jump.weights")) return study_jump_law();
        std::vector<int> signs;
        for (double s : cfg.get_doubles("jump.signs")) signs.push_back(s < 0 ? -1 : 1);
        return JumpLaw::exponential_mixture(cfg.get_doubles("jump.weights"), cfg.get_doubles("jump.rates"), signs);
    }
    if (kind == "empirical") return JumpLaw::empirical(cfg.get_doubles("jump.samples"));
    if (kind == "point") return JumpLaw::point_mass(cfg.get_double("jump.size"));
    throw std::invalid_argument("unknown jump.kind '" + kind + "'");
}

std::optional<SpikeParams> spikes_from_config(const KeyValueConfig& cfg) {
    if (!cfg.has("lambda") || cfg.get_double("lambda") == 0.0) return std::nullopt;
    SpikeParams p{cfg.get_double("lambda"), cfg.get_double("beta"), jump_law_from_config(cfg)};
    validate(p);
    return p;
}

ContinuousSpec continuous_from_config(const KeyValueConfig& cfg) {
    const std::string kind = cfg.get_string("cont.kind", "exp_ou");
    if (kind == "exp_ou") {
        ExpOUSpec s;
        s.reversion = cfg.get_double("cont.reversion", s.reversion);
        s.vol = cfg.get_double("cont.vol", s.vol);
        s.initial = cfg.get_double("cont.initial", s.initial);
        if (!(s.vol > 0.0) || !(s.initial > 0.0))
            throw std::invalid_argument("exp_ou needs cont.vol > 0 and cont.initial > 0");
        return s;
    }
    if (kind == "two_factor") {
        TwoFactorSpec s;
        s.params.alpha = cfg.get_double("cont.alpha");
        s.params.sigma_s = cfg.get_double("cont.sigma_s");
        s.params.sigma_l = cfg.get_double("cont.sigma_l");
        s.params.rho = cfg.get_double("cont.rho", 0.0);
        validate(s.params);
        if (cfg.has("cont.curve_levels"))
            s.curve = ForwardCurve::piecewise(cfg.get_doubles("cont.curve_starts"), cfg.get_doubles("cont.curve_levels"));
        else
            s.curve = ForwardCurve::flat(cfg.get_double("cont.curve_level", 40.0));
        return s;
    }
    if (kind == "flat") return FlatSpec{cfg.get_double("cont.constant", 0.0)};
    throw std::invalid_argument("unknown cont.kind '" + kind + "'");
}

ModelSpec model_from_config(const KeyValueConfig& cfg) {
    return ModelSpec{continuous_from_config(cfg), spikes_from_config(cfg)};
}

GridSpec grid_from_config(const KeyValueConfig& cfg) {
    return GridSpec(static_cast<Index>(cfg.get_int("grid.n", 10000)), cfg.get_double("grid.horizon", 1.0));
}

}  // namespace spikelab
