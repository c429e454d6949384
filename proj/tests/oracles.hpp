#pragma once

// Naive reference evaluations written directly from the model formulas.

#include <cmath>
#include <complex>
#include <limits>
#include <random>
#include <vector>

namespace oracle {

using cd = std::complex<double>;
using CMat = std::vector<std::vector<cd>>;  // [m][k]

inline double sinr(int k, const std::vector<double>& p, const CMat& g, const CMat& ghat,
                   const std::vector<int>& cluster, double noise)
{
    if (p[k] == 0.0)
        return 0.0;
    double signal_re = 0.0, signal_im = 0.0;
    for (int m : cluster) {
        const cd t = std::conj(ghat[m][k]) * g[m][k];
        signal_re += t.real();
        signal_im += t.imag();
    }
    const double num = p[k] * (signal_re * signal_re + signal_im * signal_im);
    double interference = 0.0;
    for (std::size_t j = 0; j < p.size(); ++j) {
        if (static_cast<int>(j) == k)
            continue;
        double re = 0.0, im = 0.0;
        for (int m : cluster) {
            const cd t = std::conj(ghat[m][k]) * g[m][j];
            re += t.real();
            im += t.imag();
        }
        interference += p[j] * (re * re + im * im);
    }
    double est = 0.0;
    for (int m : cluster)
        est += ghat[m][k].real() * ghat[m][k].real() + ghat[m][k].imag() * ghat[m][k].imag();
    return num / (interference + noise * est);
}

inline double hata(double f, double h_ap, double h_u)
{
    return 46.3 + 33.9 * std::log10(f) - 13.82 * std::log10(h_ap) -
           (1.1 * std::log10(f) - 0.7) * h_u + (1.56 * std::log10(f) - 0.8);
}

inline double three_slope(double d, double L, double d0, double d1)
{
    if (d > d1)
        return -L - 35.0 * std::log10(d);
    if (d > d0)
        return -L - 15.0 * std::log10(d1) - 20.0 * std::log10(d);
    return -L - 15.0 * std::log10(d1) - 20.0 * std::log10(d0);
}

struct Local {
    double bits, t, e;
};

inline Local local(double T, double alpha, double fmax, double td, double N, double kappa)
{
    const double f = alpha * fmax;
    const double cap = td * f / N;
    const double bits = T < cap ? T : cap;
    if (bits == 0.0)
        return {0.0, 0.0, 0.0};
    double t = bits * N / f;
    if (t > td)
        t = td;
    return {bits, t, kappa * bits * N * f * f};
}

struct Offload {
    double t_tr, t_comp, t, e;
};

inline Offload offload(double bits, double R, double fcpu, double p, double N, double slot)
{
    if (bits == 0.0)
        return {0.0, 0.0, 0.0, 0.0};
    const double inf = std::numeric_limits<double>::infinity();
    if (R == 0.0 || fcpu == 0.0)
        return {R == 0.0 ? inf : bits / R, fcpu == 0.0 ? inf : bits * N / fcpu, inf, p * slot};
    const double t_tr = bits / R;
    const double t_comp = bits * N / fcpu;
    return {t_tr, t_comp, t_tr + t_comp, p * t_tr};
}

inline double reward(const std::vector<double>& energy_j, const std::vector<bool>& met)
{
    double r = 0.0;
    for (std::size_t k = 0; k < energy_j.size(); ++k)
        r -= (met[k] ? 1.0 : 10.0) * (energy_j[k] * 1000.0);
    return r;
}

inline double fpc(double lambda, double p0, double nu, double pmax)
{
    const double p = p0 / std::pow(lambda, nu);
    return p < pmax ? p : pmax;
}

inline double rel_err(double a, double b)
{
    if (a == b)
        return 0.0;
    return std::abs(a - b) / std::max(std::abs(a), std::abs(b));
}

}  // namespace oracle
