#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace oracles {

namespace {

constexpr double kEps = 1e-15;
constexpr int kMaxIter = 500;

// Series for the regularized lower incomplete gamma P(a, x), x < a + 1.
double gser(double a, double x) {
    double ap = a;
    double sum = 1.0 / a;
    double del = sum;
    for (int n = 0; n < kMaxIter; ++n) {
        ap += 1.0;
        del *= x / ap;
        sum += del;
        if (std::fabs(del) < std::fabs(sum) * kEps) break;
    }
    return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Continued fraction for Q(a, x), x >= a + 1 (modified Lentz).
double gcf(double a, double x) {
    const double tiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= kMaxIter; ++i) {
        const double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < kEps) break;
    }
    return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

// Continued fraction for the incomplete beta (modified Lentz).
double betacf(double a, double b, double x) {
    const double tiny = 1e-300;
    const double qab = a + b;
    const double qap = a + 1.0;
    const double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::fabs(d) < tiny) d = tiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= kMaxIter; ++m) {
        const double dm = static_cast<double>(m);
        const double m2 = 2.0 * dm;
        double aa = dm * (b - dm) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < tiny) d = tiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + dm) * (qab + dm) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < tiny) d = tiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < kEps) break;
    }
    return h;
}

} // namespace

double gammq(double a, double x) {
    if (x < 0.0 || a <= 0.0) throw std::invalid_argument("gammq domain");
    if (x == 0.0) return 1.0;
    if (x < a + 1.0) return 1.0 - gser(a, x);
    return gcf(a, x);
}

double chi2_sf(double x, int df) { return gammq(0.5 * df, 0.5 * x); }

double chi2_critical(int df, double alpha) {
    double lo = 0.0;
    double hi = 1.0;
    while (chi2_sf(hi, df) > alpha) hi *= 2.0;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (chi2_sf(mid, df) > alpha)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

double betai(double a, double b, double x) {
    if (x < 0.0 || x > 1.0) throw std::invalid_argument("betai domain");
    if (x == 0.0) return 0.0;
    if (x == 1.0) return 1.0;
    const double bt = std::exp(std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                               a * std::log(x) + b * std::log(1.0 - x));
    if (x < (a + 1.0) / (a + b + 2.0)) return bt * betacf(a, b, x) / a;
    return 1.0 - bt * betacf(b, a, 1.0 - x) / b;
}

double f_sf(double f, int d1, int d2) {
    if (f <= 0.0) return 1.0;
    const double x = static_cast<double>(d2) / (static_cast<double>(d2) + d1 * f);
    return betai(0.5 * d2, 0.5 * d1, x);
}

double row_chi2(const std::vector<uint32_t>& row_r, const std::vector<uint32_t>& row_s) {
    if (row_r.size() != row_s.size()) throw std::invalid_argument("row size mismatch");
    double fr = 0.0;
    double fs = 0.0;
    for (uint32_t v : row_r) fr += v;
    for (uint32_t v : row_s) fs += v;
    const double total = fr + fs;
    double chi2 = 0.0;
    for (size_t j = 0; j < row_r.size(); ++j) {
        const double col = static_cast<double>(row_r[j]) + static_cast<double>(row_s[j]);
        if (col == 0.0) continue;
        const double er = fr * col / total;
        const double es = fs * col / total;
        const double dr = row_r[j] - er;
        const double ds = row_s[j] - es;
        chi2 += dr * dr / er + ds * ds / es;
    }
    return chi2;
}

double anova_p(const std::vector<std::vector<double>>& groups) {
    const int k = static_cast<int>(groups.size());
    int n = 0;
    double grand = 0.0;
    for (const auto& g : groups) {
        n += static_cast<int>(g.size());
        for (double x : g) grand += x;
    }
    grand /= n;
    double ssb = 0.0;
    double ssw = 0.0;
    for (const auto& g : groups) {
        double m = 0.0;
        for (double x : g) m += x;
        m /= static_cast<double>(g.size());
        ssb += static_cast<double>(g.size()) * (m - grand) * (m - grand);
        for (double x : g) ssw += (x - m) * (x - m);
    }
    const int df1 = k - 1;
    const int df2 = n - k;
    const double f = (ssb / df1) / (ssw / df2);
    return f_sf(f, df1, df2);
}

std::vector<Merge> single_linkage(const std::vector<std::vector<double>>& dist) {
    const int n = static_cast<int>(dist.size());
    std::vector<std::vector<int>> clusters;
    clusters.reserve(n);
    for (int i = 0; i < n; ++i) clusters.push_back({i});

    std::vector<Merge> merges;
    while (clusters.size() > 1) {
        double best = std::numeric_limits<double>::infinity();
        size_t bi = 0;
        size_t bj = 1;
        int best_lo = -1;
        int best_hi = -1;
        for (size_t i = 0; i < clusters.size(); ++i) {
            for (size_t j = i + 1; j < clusters.size(); ++j) {
                double d = std::numeric_limits<double>::infinity();
                for (int p : clusters[i])
                    for (int q : clusters[j]) d = std::min(d, dist[p][q]);
                const int rep_i = clusters[i].front();
                const int rep_j = clusters[j].front();
                const int lo = std::min(rep_i, rep_j);
                const int hi = std::max(rep_i, rep_j);
                const bool better =
                    d < best || (d == best && (lo < best_lo || (lo == best_lo && hi < best_hi)));
                if (better) {
                    best = d;
                    bi = i;
                    bj = j;
                    best_lo = lo;
                    best_hi = hi;
                }
            }
        }
        merges.push_back({best_lo, best_hi, best});
        std::vector<int> merged;
        merged.reserve(clusters[bi].size() + clusters[bj].size());
        std::merge(clusters[bi].begin(), clusters[bi].end(), clusters[bj].begin(),
                   clusters[bj].end(), std::back_inserter(merged));
        clusters[bi] = std::move(merged);
        clusters.erase(clusters.begin() + static_cast<std::ptrdiff_t>(bj));
    }
    return merges;
}

std::vector<int> cut(int n, const std::vector<Merge>& merges, int k) {
    std::vector<int> label(n);
    for (int i = 0; i < n; ++i) label[i] = i;
    const int steps = n - k;
    for (int s = 0; s < steps; ++s) {
        const Merge& m = merges[static_cast<size_t>(s)];
        for (int i = 0; i < n; ++i)
            if (label[i] == m.b) label[i] = m.a;
    }
    return label;
}

std::vector<std::pair<uint32_t, uint32_t>> adjacent_pairs(const std::vector<double>& xs,
                                                          const std::vector<double>& ys,
                                                          double range) {
    std::vector<std::pair<uint32_t, uint32_t>> out;
    for (size_t i = 0; i < xs.size(); ++i) {
        for (size_t j = i + 1; j < xs.size(); ++j) {
            const double dx = xs[i] - xs[j];
            const double dy = ys[i] - ys[j];
            if (dx * dx + dy * dy <= range * range)
                out.emplace_back(static_cast<uint32_t>(i), static_cast<uint32_t>(j));
        }
    }
    return out;
}

} // namespace oracles
