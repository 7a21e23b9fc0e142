#pragma once

#include <cstdint>
#include <random>

namespace spikelab {

// Mixes (master, stream) into a child seed. Replication r of an experiment
// always draws from derive_seed(master, r), whatever the worker count.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream);

class RandomSource {
public:
    explicit RandomSource(std::uint64_t seed);

    // Independent child stream keyed by (key(), stream).
    RandomSource derive(std::uint64_t stream) const;

    std::uint64_t key() const { return key_; }

    double uniform();       // [0, 1)
    double uniform_open();  // (0, 1]
    double normal();
    std::int64_t poisson(double mean);
    std::size_t index(std::size_t size);  // uniform on {0, ..., size-1}

    std::mt19937_64& engine() { return engine_; }

private:
    std::uint64_t key_;
    std::mt19937_64 engine_;
    std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace spikelab
