#pragma once

// Closed-form reference values, computed without the library.

#include <algorithm>
#include <cmath>
#include <vector>

namespace oracle {

/// Unit disk, uniform density: 0, then m = 1, 2, ... each twice.
inline std::vector<double> disk_spectrum(int count)
{
    std::vector<double> out{0.0};
    for (int m = 1; static_cast<int>(out.size()) < count; ++m) {
        out.push_back(m);
        out.push_back(m);
    }
    out.resize(count);
    return out;
}

/// Flat cylinder [-T, T] x S^1 of circumference 2*pi, uniform density.
/// Modes: constant (0), t (1/T), and for n >= 1 cosh(nt) e^{in theta}
/// (n tanh nT) and sinh(nt) e^{in theta} (n coth nT), each twice.
inline std::vector<double> cylinder_spectrum(double T, int count)
{
    std::vector<double> out{0.0, 1.0 / T};
    for (int n = 1; n <= count; ++n) {
        for (int copy = 0; copy < 2; ++copy) {
            out.push_back(n * std::tanh(n * T));
            out.push_back(n / std::tanh(n * T));
        }
    }
    std::sort(out.begin(), out.end());
    out.resize(count);
    return out;
}

/// Root of T tanh T = 1 by Newton's method from T = 1.
inline double critical_half_height()
{
    double t = 1.0;
    for (int i = 0; i < 50; ++i) {
        const double c = std::cosh(t);
        const double f = t * std::tanh(t) - 1.0;
        const double df = std::tanh(t) + t / (c * c);
        t -= f / df;
    }
    return t;
}

/// Perimeter of the regular n-gon inscribed in a circle of radius r.
inline double inscribed_perimeter(int n, double r)
{
    return 2.0 * n * r * std::sin(M_PI / n);
}

}  // namespace oracle
