#include "spikelab/quadrature.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace spikelab {

namespace {

struct Panel {
    double a, b, fa, fm, fb, whole, tol;
};

double simpson(double a, double b, double fa, double fm, double fb) { return (b - a) / 6.0 * (fa + 4.0 * fm + fb); }

}  // namespace

QuadratureResult adaptive_simpson(const std::function<double(double)>& f, double a, double b, double tol,
                                  int max_intervals) {
    if (!(tol > 0.0)) throw std::invalid_argument("quadrature tolerance must be positive");
    if (a == b) return {0.0, 0};

    const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
    std::vector<Panel> stack{{a, b, fa, fm, fb, simpson(a, b, fa, fm, fb), tol}};
    QuadratureResult result;
    while (!stack.empty()) {
        const Panel p = stack.back();
        stack.pop_back();
        const double m = 0.5 * (p.a + p.b);
        const double flm = f(0.5 * (p.a + m));
        const double frm = f(0.5 * (m + p.b));
        const double left = simpson(p.a, m, p.fa, flm, p.fm);
        const double right = simpson(m, p.b, p.fm, frm, p.fb);
        const double diff = left + right - p.whole;
        if (std::abs(diff) <= 15.0 * p.tol || m == p.a || m == p.b) {
            result.value += left + right + diff / 15.0;
            if (++result.intervals > max_intervals)
                throw std::runtime_error("adaptive quadrature exceeded its interval budget");
            continue;
        }
        if (static_cast<int>(stack.size()) + result.intervals + 2 > 2 * max_intervals)
            throw std::runtime_error("adaptive quadrature exceeded its interval budget");
        stack.push_back({m, p.b, p.fm, frm, p.fb, right, 0.5 * p.tol});
        stack.push_back({p.a, m, p.fa, flm, p.fm, left, 0.5 * p.tol});
    }
    if (!std::isfinite(result.value)) throw std::runtime_error("quadrature produced a non-finite value");
    return result;
}

}  // namespace spikelab
