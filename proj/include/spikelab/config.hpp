#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "spikelab/model.hpp"

namespace spikelab {

// Flat `key = value` configuration. Lines starting with '#' are comments;
// list values are comma separated.
//
// Model keys:
//   lambda, beta                       spike intensity and reversion (omit lambda for no spikes)
//   jump.kind                          mixture | empirical | point
//   jump.weights, jump.rates, jump.signs   mixture components (rates are 1/mean)
//   jump.samples                       empirical law
//   jump.size                          point mass
//   cont.kind                          exp_ou | two_factor | flat
//   cont.reversion, cont.vol, cont.initial            exp_ou
//   cont.alpha, cont.sigma_s, cont.sigma_l, cont.rho  two_factor
//   cont.curve_level | cont.curve_starts + cont.curve_levels
//   cont.constant                      flat
//   grid.n, grid.horizon
class KeyValueConfig {
public:
    static KeyValueConfig parse(const std::string& text);
    static KeyValueConfig load(const std::filesystem::path& path);

    bool has(const std::string& key) const { return entries_.count(key) != 0; }
    const std::string& raw(const std::string& key) const;

    std::string get_string(const std::string& key) const;
    std::string get_string(const std::string& key, const std::string& fallback) const;
    double get_double(const std::string& key) const;
    double get_double(const std::string& key, double fallback) const;
    long long get_int(const std::string& key) const;
    long long get_int(const std::string& key, long long fallback) const;
    std::vector<double> get_doubles(const std::string& key) const;
    std::vector<std::string> get_strings(const std::string& key) const;

    void set(const std::string& key, const std::string& value) { entries_[key] = value; }
    const std::map<std::string, std::string>& entries() const { return entries_; }

private:
    std::map<std::string, std::string> entries_;
};

JumpLaw jump_law_from_config(const KeyValueConfig& config);
std::optional<SpikeParams> spikes_from_config(const KeyValueConfig& config);
ContinuousSpec continuous_from_config(const KeyValueConfig& config);
ModelSpec model_from_config(const KeyValueConfig& config);
GridSpec grid_from_config(const KeyValueConfig& config);

}  // namespace spikelab
