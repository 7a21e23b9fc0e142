#include "spikelab/random.hpp"

namespace spikelab {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
    return splitmix64(splitmix64(master) ^ splitmix64(stream ^ 0xD1B54A32D192ED03ULL));
}

RandomSource::RandomSource(std::uint64_t seed) : key_(seed), engine_(splitmix64(seed)) {}

RandomSource RandomSource::derive(std::uint64_t stream) const {
    return RandomSource(derive_seed(key_, stream));
}

double RandomSource::uniform() {
    // 53 random mantissa bits.
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double RandomSource::uniform_open() { return 1.0 - uniform(); }

double RandomSource::normal() { return normal_(engine_); }

std::int64_t RandomSource::poisson(double mean) {
    if (mean <= 0.0) return 0;
    std::poisson_distribution<std::int64_t> dist(mean);
    return dist(engine_);
}

std::size_t RandomSource::index(std::size_t size) {
    std::uniform_int_distribution<std::size_t> dist(0, size - 1);
    return dist(engine_);
}

}  // namespace spikelab
