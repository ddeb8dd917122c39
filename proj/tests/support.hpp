#pragma once

#include <cmath>
#include <random>
#include <vector>

#include "fsw/fields.hpp"

namespace fsw::gen {

using Rng = std::mt19937_64;

inline double uniform(Rng& r, double a, double b) { return std::uniform_real_distribution<double>(a, b)(r); }

struct Wave {
    int m1, m2;
    double a, phase;
};

// A few low modes with amplitudes decaying in |m|, scaled so max |eta| <= amp.
inline std::vector<Wave> random_waves(Rng& r, double amp, int count = 4, int mmax = 3) {
    std::vector<Wave> w;
    double total = 0.0;
    for (int i = 0; i < count; ++i) {
        Wave x;
        x.m1 = int(uniform(r, 0, mmax + 1));
        x.m2 = int(uniform(r, -mmax, mmax + 1));
        if (x.m1 == 0 && x.m2 == 0) x.m1 = 1;
        x.a = uniform(r, 0.2, 1.0) / (1.0 + x.m1 * x.m1 + x.m2 * x.m2);
        x.phase = uniform(r, 0, 2 * M_PI);
        total += x.a;
        w.push_back(x);
    }
    for (auto& x : w) x.a *= amp / total;
    return w;
}

inline double wave_sum(const std::vector<Wave>& w, const Grid& g, double x1, double x2) {
    double v = 0.0;
    for (const auto& x : w) v += x.a * std::cos(2 * M_PI * (x.m1 * x1 / g.l1() + x.m2 * x2 / g.l2()) + x.phase);
    return v;
}

inline SurfaceField random_surface(const GridPtr& g, Rng& r, double amp, int count = 4, int mmax = 3) {
    const auto w = random_waves(r, amp, count, mmax);
    return SurfaceField::from_function(g, [&](double x1, double x2) { return wave_sum(w, *g, x1, x2); });
}

// Smooth vector field vanishing on the bottom, with polynomial depth profile.
inline VolumeField random_velocity(const GridPtr& g, Rng& r, double amp) {
    std::vector<Wave> w[3];
    double c[3][3];
    for (int i = 0; i < 3; ++i) {
        w[i] = random_waves(r, amp, 3, 2);
        for (auto& q : c[i]) q = uniform(r, -1, 1);
    }
    const double b = g->b();
    return VolumeField::from_function3(g, [&](double x1, double x2, double x3) {
        const double s = (x3 + b) / b;
        std::array<double, 3> v{};
        for (int i = 0; i < 3; ++i)
            v[i] = wave_sum(w[i], *g, x1, x2) * s * (c[i][0] + c[i][1] * s + c[i][2] * s * s);
        return v;
    });
}

inline VolumeField random_scalar(const GridPtr& g, Rng& r, double amp) {
    const auto w = random_waves(r, amp, 3, 2);
    const double k = uniform(r, 0.5, 2.0);
    return VolumeField::from_function(
        g, [&](double x1, double x2, double x3) { return wave_sum(w, *g, x1, x2) * std::cosh(k * x3) + 0.3 * amp * x3; });
}

}  // namespace fsw::gen
