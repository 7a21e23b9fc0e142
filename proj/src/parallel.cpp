#include "spikelab/parallel.hpp"

#include <cstdlib>
#include <string>

namespace spikelab {

unsigned default_threads() {
    if (const char* env = std::getenv("SPIKELAB_THREADS")) {
        try {
            const long value = std::stol(env);
            if (value > 0) return static_cast<unsigned>(value);
        } catch (...) {
        }
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

}  // namespace spikelab
