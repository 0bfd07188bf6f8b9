#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace gibbslab {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// ---------------------------------------------------------------- threading

/// Worker count: GIBBSLAB_THREADS if set, else hardware concurrency.
inline unsigned thread_count()
{
    if (const char* env = std::getenv("GIBBSLAB_THREADS")) {
        long v = std::strtol(env, nullptr, 10);
        if (v >= 1) return static_cast<unsigned>(v);
    }
    unsigned hc = std::thread::hardware_concurrency();
    return hc ? hc : 1;
}

/// Static-partition parallel loop over [0, n). Body must be reentrant.
inline void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& body)
{
    unsigned nt = thread_count();
    if (nt <= 1 || n < 2048) {
        body(0, n);
        return;
    }
    nt = std::min<std::size_t>(nt, n);
    std::vector<std::thread> pool;
    pool.reserve(nt);
    std::size_t chunk = (n + nt - 1) / nt;
    for (unsigned t = 0; t < nt; ++t) {
        std::size_t lo = t * chunk, hi = std::min(n, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back(body, lo, hi);
    }
    for (auto& th : pool) th.join();
}

// ------------------------------------------------------------------ hashing

/// FNV-1a, used for config/content hashes in reports.
inline std::uint64_t fnv1a(const std::string& s)
{
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

inline std::string hash_hex(const std::string& s)
{
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(fnv1a(s)));
    return std::string(buf);
}

// -------------------------------------------------------- counter-based RNG

/// Philox4x32-10 counter-based generator. Streams are keyed by
/// (seed, stream id) and indexed by (step, block); identical inputs give
/// identical outputs on any schedule.
struct Philox {
    static constexpr std::uint32_t M0 = 0xD2511F53u, M1 = 0xCD9E8D57u;
    static constexpr std::uint32_t W0 = 0x9E3779B9u, W1 = 0xBB67AE85u;

    static void round(std::uint32_t* c, const std::uint32_t* k)
    {
        std::uint64_t p0 = std::uint64_t(M0) * c[0];
        std::uint64_t p1 = std::uint64_t(M1) * c[2];
        std::uint32_t h0 = std::uint32_t(p0 >> 32), l0 = std::uint32_t(p0);
        std::uint32_t h1 = std::uint32_t(p1 >> 32), l1 = std::uint32_t(p1);
        std::uint32_t n0 = h1 ^ c[1] ^ k[0];
        std::uint32_t n1 = l1;
        std::uint32_t n2 = h0 ^ c[3] ^ k[1];
        std::uint32_t n3 = l0;
        c[0] = n0; c[1] = n1; c[2] = n2; c[3] = n3;
    }

    /// 4x32 bits for counter (lo, hi, stream, block) under key = seed.
    static void block(std::uint64_t seed, std::uint64_t ctr, std::uint32_t stream,
                      std::uint32_t blk, std::uint32_t out[4])
    {
        std::uint32_t c[4] = {std::uint32_t(ctr), std::uint32_t(ctr >> 32), stream, blk};
        std::uint32_t k[2] = {std::uint32_t(seed), std::uint32_t(seed >> 32)};
        for (int r = 0; r < 10; ++r) {
            round(c, k);
            k[0] += W0;
            k[1] += W1;
        }
        out[0] = c[0]; out[1] = c[1]; out[2] = c[2]; out[3] = c[3];
    }

    /// Two standard normals per (seed, stream, step, block) via Box-Muller.
    static void normal_pair(std::uint64_t seed, std::uint32_t stream, std::uint64_t step,
                            std::uint32_t blk, double& z0, double& z1)
    {
        std::uint32_t r[4];
        block(seed, step, stream, blk, r);
        std::uint64_t a = (std::uint64_t(r[0]) << 32) | r[1];
        std::uint64_t b = (std::uint64_t(r[2]) << 32) | r[3];
        // u in (0,1), 53-bit mantissa
        double u1 = double(a >> 11) * 0x1p-53 + 0x1p-54;
        double u2 = double(b >> 11) * 0x1p-53 + 0x1p-54;
        double rad = std::sqrt(-2.0 * std::log(u1));
        double ang = 2.0 * M_PI * u2;
        z0 = rad * std::cos(ang);
        z1 = rad * std::sin(ang);
    }

    /// Uniform double in (0,1).
    static double uniform(std::uint64_t seed, std::uint32_t stream, std::uint64_t step,
                          std::uint32_t blk)
    {
        std::uint32_t r[4];
        block(seed, step, stream, blk, r);
        std::uint64_t a = (std::uint64_t(r[0]) << 32) | r[1];
        return double(a >> 11) * 0x1p-53 + 0x1p-54;
    }
};

// -------------------------------------------------------------- small stats

struct LinearFit {
    double intercept = 0.0;
    double slope = 0.0;
    double r_squared = 0.0;
};

/// Ordinary least squares y ~ a + b x with R^2.
inline LinearFit linear_fit(const std::vector<double>& x, const std::vector<double>& y)
{
    if (x.size() != y.size() || x.size() < 2)
        throw std::invalid_argument("linear_fit: need >= 2 points");
    std::size_t n = x.size();
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < n; ++i) { mx += x[i]; my += y[i]; }
    mx /= double(n); my /= double(n);
    double sxy = 0, sxx = 0, syy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
        syy += (y[i] - my) * (y[i] - my);
    }
    LinearFit f;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    double ssres = 0;
    for (std::size_t i = 0; i < n; ++i) {
        double e = y[i] - (f.intercept + f.slope * x[i]);
        ssres += e * e;
    }
    f.r_squared = syy > 0 ? 1.0 - ssres / syy : 1.0;
    return f;
}

inline double mean_of(const std::vector<double>& v)
{
    double s = 0;
    for (double x : v) s += x;
    return s / double(v.size());
}

inline double variance_of(const std::vector<double>& v)
{
    double m = mean_of(v), s = 0;
    for (double x : v) s += (x - m) * (x - m);
    return s / double(v.size() - 1);
}

/// Gauss-Legendre nodes/weights on [a, b].
inline void gauss_legendre(int n, double a, double b, std::vector<double>& x, std::vector<double>& w)
{
    x.assign(n, 0.0);
    w.assign(n, 0.0);
    int m = (n + 1) / 2;
    for (int i = 0; i < m; ++i) {
        double z = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double pp = 0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = 0.0;
            for (int j = 0; j < n; ++j) {
                double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j + 1.0) * z * p1 - j * p2) / (j + 1.0);
            }
            pp = n * (z * p0 - p1) / (z * z - 1.0);
            double dz = p0 / pp;
            z -= dz;
            if (std::abs(dz) < 1e-15) break;
        }
        double xm = 0.5 * (b + a), xl = 0.5 * (b - a);
        x[i] = xm - xl * z;
        x[n - 1 - i] = xm + xl * z;
        w[i] = 2.0 * xl / ((1.0 - z * z) * pp * pp);
        w[n - 1 - i] = w[i];
    }
}

}  // namespace gibbslab
