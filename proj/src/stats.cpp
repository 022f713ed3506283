#include "deadpatch/stats.hpp"

#include <cmath>
#include <stdexcept>

namespace deadpatch {

namespace {

// Lentz's continued fraction for the incomplete beta.
double betacf(double a, double b, double x) {
    const int max_iter = 500;
    const double eps = 1e-15, fpmin = 1e-300;
    double qab = a + b, qap = a + 1.0, qam = a - 1.0;
    double c = 1.0, d = 1.0 - qab * x / qap;
    if (std::fabs(d) < fpmin) d = fpmin;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= max_iter; ++m) {
        int m2 = 2 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < fpmin) d = fpmin;
        c = 1.0 + aa / c;
        if (std::fabs(c) < fpmin) c = fpmin;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < fpmin) d = fpmin;
        c = 1.0 + aa / c;
        if (std::fabs(c) < fpmin) c = fpmin;
        d = 1.0 / d;
        double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < eps) break;
    }
    return h;
}

}  // namespace

double incomplete_beta(double a, double b, double x) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    double ln_bt = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                   a * std::log(x) + b * std::log1p(-x);
    double bt = std::exp(ln_bt);
    if (x < (a + 1.0) / (a + b + 2.0)) return bt * betacf(a, b, x) / a;
    return 1.0 - bt * betacf(b, a, 1.0 - x) / b;
}

double beta_quantile(double a, double b, double q) {
    if (q <= 0.0) return 0.0;
    if (q >= 1.0) return 1.0;
    double lo = 0.0, hi = 1.0;
    for (int i = 0; i < 200; ++i) {
        double mid = 0.5 * (lo + hi);
        if (incomplete_beta(a, b, mid) < q) lo = mid; else hi = mid;
        if (hi - lo < 1e-10 && i > 60) break;
    }
    return 0.5 * (lo + hi);
}

std::pair<double, double> beta_ci(uint64_t failures, uint64_t shots, double level) {
    if (failures > shots) throw std::invalid_argument("beta_ci: failures > shots");
    double a = double(failures) + 1.0, b = double(shots - failures) + 1.0;
    double tail = (1.0 - level) / 2.0;
    return {beta_quantile(a, b, tail), beta_quantile(a, b, 1.0 - tail)};
}

double beta_posterior_median(uint64_t failures, uint64_t shots) {
    return beta_quantile(double(failures) + 1.0, double(shots - failures) + 1.0, 0.5);
}

namespace {

double gamma_p_series(double a, double x) {
    double sum = 1.0 / a, term = sum;
    for (int n = 1; n < 1000; ++n) {
        term *= x / (a + n);
        sum += term;
        if (std::fabs(term) < std::fabs(sum) * 1e-15) break;
    }
    return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

double gamma_q_cf(double a, double x) {
    const double fpmin = 1e-300;
    double b = x + 1.0 - a, c = 1.0 / fpmin, d = 1.0 / b, h = d;
    for (int i = 1; i < 1000; ++i) {
        double an = -double(i) * (double(i) - a);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < fpmin) d = fpmin;
        c = b + an / c;
        if (std::fabs(c) < fpmin) c = fpmin;
        d = 1.0 / d;
        double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < 1e-15) break;
    }
    return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

}  // namespace

double incomplete_gamma_p(double a, double x) {
    if (x < 0.0 || a <= 0.0) throw std::invalid_argument("incomplete_gamma_p: bad args");
    if (x == 0.0) return 0.0;
    if (x < a + 1.0) return gamma_p_series(a, x);
    return 1.0 - gamma_q_cf(a, x);
}

double chi_square_sf(double x, double k) {
    if (x <= 0.0) return 1.0;
    return 1.0 - incomplete_gamma_p(k / 2.0, x / 2.0);
}

namespace {
uint64_t splitmix64_step(uint64_t &x) {
    x += 0x9e3779b97f4a7c15ULL;
    uint64_t z = x;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}
}  // namespace

RngStream::RngStream(uint64_t seed, uint64_t stream) {
    // Mix the key so nearby (seed, stream) pairs decorrelate.
    uint64_t x = seed;
    uint64_t a = splitmix64_step(x);
    x = stream ^ 0xa02bdbf7bb3c0a7ULL;
    uint64_t b = splitmix64_step(x);
    state_ = a ^ (b * 0xda942042e4dd58b5ULL);
}

uint64_t RngStream::next_u64() { return splitmix64_step(state_); }

double RngStream::next_double() {
    return double(next_u64() >> 11) * 0x1.0p-53;
}

}  // namespace deadpatch
